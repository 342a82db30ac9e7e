//! Headless re-run of a live session from its command log.

use super::command::{decode_command, Command};
use super::frame::TelemetryFrame;
use super::publish::FrameClock;
use super::server::{ServeError, ServeOptions};
use super::ProtocolError;
use crate::params::VehicleConfig;
use crate::sim::Simulator;

/// Parse `tick=<n> <record>` lines as written by the server's command log.
pub fn parse_command_log(text: &str) -> Result<Vec<(u64, Command)>, ProtocolError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || ProtocolError::MalformedCommand(format!("command log line {}: {line:?}", i + 1));
        let (tick, record) = line.split_once(' ').ok_or_else(bad)?;
        let tick = tick
            .strip_prefix("tick=")
            .and_then(|t| t.parse::<u64>().ok())
            .ok_or_else(bad)?;
        if out.last().is_some_and(|(t, _)| *t > tick) {
            return Err(bad());
        }
        out.push((tick, decode_command(record.as_bytes())?));
    }
    Ok(out)
}

/// Re-run a session: same start as [`serve`](super::serve) with `opts`,
/// each command applied before the tick it was logged at, frames sampled
/// on the same clock for `duration` seconds.
pub fn replay(
    config: VehicleConfig,
    opts: &ServeOptions,
    commands: &[(u64, Command)],
    duration: f64,
) -> Result<Vec<TelemetryFrame>, ServeError> {
    opts.stream.validate().map_err(ServeError::Config)?;
    let mut sim = opts.simulator(config)?;
    let mut clock = FrameClock::new(opts.stream.rate_hz);
    let mut frames = Vec::new();
    let mut sample = |sim: &Simulator, frames: &mut Vec<TelemetryFrame>| {
        while let Some(ts) = clock.poll(sim.time()) {
            frames.push(sim.frame(ts));
        }
    };
    sample(&sim, &mut frames);
    let mut pending = commands.iter().peekable();
    while sim.time() + 1e-9 < duration {
        while let Some((_, cmd)) = pending.next_if(|(t, _)| *t <= sim.ticks()) {
            sim.apply_command(cmd);
        }
        sim.control_tick_with(|s| sample(s, &mut frames))?;
    }
    Ok(frames)
}
