//! Experiment orchestration: configuration, end-to-end link runs, power
//! calibration, parameter sweeps and CSV reporting.

mod calibrate;
mod config;
mod link;
mod sweep;

pub use calibrate::calibrate_power_axis;
pub use config::{
    load_config, BerBudget, EqualizerConfig, ExperimentConfig, PrbsConfig, PulseConfig, RinConfig,
    SweepConfig, SweepSpec,
};
pub use link::{run_link, transmit_waveform, LinkReport};
pub use sweep::{sweep, write_summary_csv, write_sweep_csv, SweepPoint, SweepValue};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("config parse: {0}")]
    Parse(String),
    #[error("unknown config key: {0}")]
    UnknownKey(String),
    #[error("config validation: {0}")]
    Validation(String),
    #[error("calibration failed: {0}")]
    CalibrationFailure(String),
    #[error("link error in {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<HarnessError>,
    },
    #[error(transparent)]
    Linecode(#[from] crate::linecode::LinecodeError),
    #[error(transparent)]
    Waveform(#[from] crate::waveform::WaveformError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
    #[error(transparent)]
    RxDsp(#[from] crate::rxdsp::RxDspError),
}

impl HarnessError {
    /// Wraps an error with the pipeline stage it occurred in.
    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(HarnessError) -> HarnessError {
        move |source| HarnessError::Stage { stage, source: Box::new(source) }
    }

    /// Stable one-token category for machine-readable CLI error lines.
    pub fn category(&self) -> &'static str {
        match self {
            HarnessError::Io(_) => "io",
            HarnessError::Parse(_) => "parse",
            HarnessError::UnknownKey(_) => "unknown-key",
            HarnessError::Validation(_) => "validation",
            HarnessError::CalibrationFailure(_) => "calibration",
            HarnessError::Stage { source, .. } => source.category(),
            HarnessError::Linecode(_) => "linecode",
            HarnessError::Waveform(_) => "waveform",
            HarnessError::Channel(_) => "channel",
            HarnessError::RxDsp(_) => "rxdsp",
        }
    }
}
