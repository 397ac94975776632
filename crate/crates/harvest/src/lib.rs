//! Batch front end for `harvest-core`: scenario construction from flat
//! parameter maps, parallel deterministic sweeps, CSV/JSON emission, figure
//! presets and an invariant self-test.

pub mod config;
pub mod emit;
pub mod error;
pub mod presets;
pub mod scenario;
pub mod selftest;
pub mod sweep;

pub use error::{CliError, CliResult};
pub use scenario::Scenario;
pub use sweep::{run_sweep, Axis, Overlay, SweepRow, SweepSpec, SweepTable};
