//! Scenario configuration, the multi-lane simulation loop, reproducible
//! experiments and file output.
//!
//! Event order inside one UI, per lane: waveform sample, three slicers,
//! phase detector and level adaptation, proportional update. Every 32 UI the
//! lanes' net votes go to the shared integral path, the fractional divider
//! emits its next edge and the ILCM realigns, which sets the clock for the
//! next word.

mod config;
mod engine;
mod experiments;
mod output;
mod report;
mod sweep;

pub use config::{ChannelConfig, ChannelKind, ScenarioConfig, TelemetryConfig, BATCH_UI, MAX_LANES};
pub use engine::{check_lock, run, GlobalRow, LaneRow, RunOutput, Simulator, Traces};
pub use experiments::{bathtub, eye, fdiv_run, jtol, spectrum_run, FdivRun, SpectrumRun};
pub use output::{write_csv_rows, write_run_outputs};
pub use report::{GlobalReport, LaneReport, OracleReport, RunReport};
pub use sweep::{parse_sweep_values, sweep, write_sweep_csv, SweepPoint};
