//! File formats, batch evaluation and rendering.

mod formats;
mod report;
mod svg;

pub use formats::{
    format_activation, format_beats, parse_activation_file, parse_activation_str, parse_beats_file,
    parse_beats_str, write_activation_file, write_beats_file,
};
pub use report::{
    dataset_stats, evaluate_dataset, files_by_stem, track_means, DatasetReport, DatasetStats,
    MLSR_RULE, SCHEMA_VERSION,
};
pub use svg::{covered_runs, render_coverage_svg, write_coverage_svg};
