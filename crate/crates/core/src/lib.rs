//! Beat-tracking evaluation with annotation coverage analysis.
//!
//! Besides the usual F-measure, continuity (CMLt/AMLt) and L-correct
//! scores, the crate checks every reference beat for L-correct detection
//! under ten metric-level conditions (onbeat, three offbeat phases, three
//! subharmonic and three harmonic tempi). The per-beat results form a
//! [`CoverageMatrix`], from which the annotation coverage ratios (ACR) and
//! the metric-level switching ratio (MLSR) are derived.
//!
//! ```
//! use beatcov::{matching, metrics, BeatSequence, Condition, ToleranceParams};
//!
//! let reference = BeatSequence::new((0..16).map(|k| k as f64 * 0.5).collect()).unwrap();
//! let double = BeatSequence::new((0..31).map(|k| k as f64 * 0.25).collect()).unwrap();
//! let cm = matching::coverage_matrix(&reference, &double, &ToleranceParams::default()).unwrap();
//! let acr = metrics::acr_scores(&cm);
//! assert_eq!(acr.get(Condition::HarmonicDouble), 1.0);
//! assert_eq!(acr.get(Condition::Onbeat), 0.0);
//! ```

pub mod error;
pub mod io;
pub mod matching;
pub mod metrics;
mod par;
pub mod synth;
pub mod trackers;
pub mod types;
pub mod variants;

pub use error::{Error, Result};
pub use par::with_workers;
pub use types::{
    validate_beats, ActivationFunction, BeatSequence, Condition, CoverageMatrix, MetricLevel,
    ToleranceParams, ValidatedBeats,
};
