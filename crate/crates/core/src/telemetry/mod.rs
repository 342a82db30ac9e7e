//! Surface-station link: telemetry frames out, operator commands in.
//!
//! Both directions are newline-delimited UTF-8 records over a stream
//! socket. Frames are emitted on a simulation-time clock and also appended
//! to a CSV log; commands are validated per connection and funnelled into a
//! single ordered queue that the simulation drains between control ticks.
//! Browser stations get the same records over WebSocket, one per message.

mod bridge;
mod command;
mod frame;
mod publish;
mod replay;
mod server;

use thiserror::Error;

pub use command::{decode_command, encode_command, Command, CommandDecoder, CommandKind};
pub use frame::{
    decode_frame, encode_frame, FrameLog, TelemetryFrame, LEAK_SENSORS, LOG_HEADER,
    THRUSTER_CHANNELS,
};
pub use publish::{Fanout, FrameClock, TelemetryPublisher};
pub use replay::{parse_command_log, replay};
pub use server::{
    command_intake, run_loop, serve, IntakeSummary, LoopOptions, LoopSummary, ServeError,
    ServeOptions, TelemetryServer, SUBSCRIBER_CAPACITY,
};

/// Default telemetry rate, Hz.
pub const DEFAULT_RATE_HZ: f64 = 35.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("malformed command: {0}")]
    MalformedCommand(String),
    #[error("command {seq}: {msg}")]
    RangeViolation { seq: u64, msg: String },
    #[error("sequence {seq} is not after {last}")]
    StaleSequence { seq: u64, last: u64 },
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
}

impl ProtocolError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::MalformedCommand(_) => "MalformedCommand",
            Self::RangeViolation { .. } => "RangeViolation",
            Self::StaleSequence { .. } => "StaleSequence",
            Self::MalformedFrame(_) => "MalformedFrame",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub rate_hz: f64,
    pub listen: String,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            rate_hz: DEFAULT_RATE_HZ,
            listen: "127.0.0.1:7700".into(),
        }
    }
}

impl StreamConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(1.0..=100.0).contains(&self.rate_hz) {
            return Err(format!("rate {} Hz outside [1, 100]", self.rate_hz));
        }
        Ok(())
    }
}
