//! Scenario configuration, runners, manifests and plot emission: the user
//! surface behind the command-line interface.

mod config;
mod manifest;
mod plots;
mod runners;
mod two_slit;

pub use config::{parse_kv, ScenarioConfig, ScenarioKind};
pub use manifest::{sha256_hex, ManifestFile, OutputWriter, RunManifest, MANIFEST_NAME};
pub use plots::emit_plots;
pub use runners::{run, ScenarioOutcome};
