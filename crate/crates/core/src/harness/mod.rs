//! Scripted heading-lock experiments: trial runs, response metrics,
//! disturbance calibration and gain comparison.

mod calibrate;
mod compare;
mod metrics;
mod trial;

use thiserror::Error;

use crate::params::ParamsError;
use crate::sim::SimError;

pub use calibrate::{
    calibrate_disturbance, closed_form_moment, closed_form_sse, differential_yaw_gain, Calibration,
    SSE_TOLERANCE,
};
pub use compare::{compare_gains, ComparisonReport, ComparisonRow};
pub use metrics::{compute_metrics, metrics_from_series, TrialMetrics, STEADY_STATE_WINDOW};
pub use trial::{run_trial, TrialConfig, TrialRecord, TrialSample};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("record has no samples")]
    EmptyRecord,
    #[error("record is invalid: {0}")]
    InvalidRecord(String),
    #[error("invalid trial configuration: {0}")]
    InvalidConfig(String),
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::EmptyRecord => "EmptyRecord",
            Self::InvalidRecord(_) => "InvalidRecord",
            Self::InvalidConfig(_) => "InvalidConfig",
            Self::CalibrationFailed(_) => "CalibrationFailed",
            Self::Sim(_) => "Simulation",
            Self::Params(_) => "Params",
            Self::Io(_) => "Io",
        }
    }
}
