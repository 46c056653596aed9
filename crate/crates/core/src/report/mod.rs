//! Manifest-driven experiment runs.
//!
//! A manifest is flat `key = value` text, one key per line, `#` comments.
//! Running it writes versioned CSV/JSON artifacts plus a `report.json` into
//! the manifest's output directory; every file is written via a temporary
//! file and renamed into place.

mod manifest;
mod output;
mod run;
mod summary;

pub use manifest::{parse_count, ExperimentKind, ExperimentManifest};
pub use output::{gaps_csv, lacunary_listing, windows_csv, write_atomic, SCHEMA_PREFIX};
pub use run::{run_experiment, Metric, MetricValue, RunReport, REPORT_FILE};
pub use summary::{emit_summary, load_reports, SummaryOutput};
