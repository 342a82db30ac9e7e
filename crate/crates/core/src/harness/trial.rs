use std::io;

use crate::autopilot::{PidGains, CONTROL_PERIOD};
use crate::dynamics::{GeneralizedForce, Pose, SimState};
use crate::params::VehicleConfig;
use crate::sim::{substeps_for, Simulator, DEFAULT_DT};
use crate::telemetry::CommandKind;

use super::HarnessError;

/// One scripted heading-lock run: manual cruise, then engage.
///
/// The vehicle starts at rest, `initial_offset` degrees clockwise of the
/// setpoint. A positive `disturbance_yaw_moment` pushes it further
/// clockwise, so the steady error is on the far side of the setpoint from
/// the approach and a crossing means a genuine overshoot.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub cruise_thrust: f64,
    pub warmup_seconds: f64,
    pub heading_setpoint: f64,
    pub initial_offset: f64,
    pub gains: PidGains,
    /// N m about the body z axis.
    pub disturbance_yaw_moment: f64,
    /// Recorded time after engage, s.
    pub duration: f64,
    pub dt: f64,
    /// Degrees.
    pub error_band: f64,
    pub initial_depth: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            cruise_thrust: 0.30,
            warmup_seconds: 5.0,
            heading_setpoint: 120.0,
            initial_offset: 60.0,
            gains: PidGains::proportional(5.0),
            disturbance_yaw_moment: 0.0,
            duration: 60.0,
            dt: DEFAULT_DT,
            error_band: 2.0,
            initial_depth: 20.0,
        }
    }
}

impl TrialConfig {
    pub fn with_kp(&self, kp: f64) -> Self {
        Self {
            gains: PidGains::proportional(kp),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.cruise_thrust) {
            return bad(format!("cruise thrust {} outside [0, 1]", self.cruise_thrust));
        }
        if !(self.warmup_seconds >= 0.0) {
            return bad("warmup must be non-negative".into());
        }
        if !(self.duration > self.warmup_seconds) {
            return bad(format!(
                "duration {} s must exceed warmup {} s",
                self.duration, self.warmup_seconds
            ));
        }
        if !(0.0..360.0).contains(&self.heading_setpoint) {
            return bad(format!("setpoint {} outside [0, 360)", self.heading_setpoint));
        }
        if !(self.initial_offset.is_finite() && self.disturbance_yaw_moment.is_finite()) {
            return bad("offset and disturbance must be finite".into());
        }
        if !(self.error_band > 0.0) {
            return bad("error band must be positive".into());
        }
        self.gains
            .validate()
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        substeps_for(self.dt).map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    fn ticks(seconds: f64) -> usize {
        (seconds / CONTROL_PERIOD).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSample {
    /// Seconds since engage.
    pub t: f64,
    pub yaw: f64,
    pub setpoint: f64,
    pub error: f64,
    pub commands: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub config: TrialConfig,
    pub params_fingerprint: String,
    /// One per control tick after engage.
    pub samples: Vec<TrialSample>,
    /// Set when the simulation aborted; `samples` is then partial.
    pub failure: Option<String>,
}

impl TrialRecord {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }

    /// CSV with a `#` metadata preamble.
    pub fn write_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        let c = &self.config;
        writeln!(out, "# params_sha256={}", self.params_fingerprint)?;
        writeln!(
            out,
            "# kp={} ki={} kd={} setpoint={} offset={} cruise={} warmup={} duration={} dt={} disturbance={} band={} depth={}",
            c.gains.kp,
            c.gains.ki,
            c.gains.kd,
            c.heading_setpoint,
            c.initial_offset,
            c.cruise_thrust,
            c.warmup_seconds,
            c.duration,
            c.dt,
            c.disturbance_yaw_moment,
            c.error_band,
            c.initial_depth
        )?;
        match &self.failure {
            None => writeln!(out, "# valid=true")?,
            Some(f) => writeln!(out, "# valid=false reason={f}")?,
        }
        let mut w = csv::Writer::from_writer(out);
        let n = self.samples.first().map_or(0, |s| s.commands.len());
        let mut header = vec!["t".to_string(), "yaw".into(), "setpoint".into(), "error".into()];
        header.extend((1..=n).map(|i| format!("cmd_{i}")));
        w.write_record(&header).map_err(io::Error::other)?;
        for s in &self.samples {
            let mut row = vec![
                s.t.to_string(),
                s.yaw.to_string(),
                s.setpoint.to_string(),
                s.error.to_string(),
            ];
            row.extend(s.commands.iter().map(|c| c.to_string()));
            w.write_record(&row).map_err(io::Error::other)?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Run the scripted trial. Simulation failures end the run early and are
/// reported through [`TrialRecord::failure`].
pub fn run_trial(vehicle: &VehicleConfig, config: &TrialConfig) -> Result<TrialRecord, HarnessError> {
    config.validate()?;
    let initial = SimState {
        pose: Pose {
            z: config.initial_depth,
            psi: (config.heading_setpoint + config.initial_offset).to_radians(),
            ..Default::default()
        },
        ..Default::default()
    };
    let mut sim = Simulator::new(vehicle.clone(), initial, config.dt)?
        .with_disturbance(GeneralizedForce::yaw_moment(config.disturbance_yaw_moment));
    let mut record = TrialRecord {
        config: config.clone(),
        params_fingerprint: vehicle.fingerprint(),
        samples: Vec::with_capacity(TrialConfig::ticks(config.duration)),
        failure: None,
    };

    let c = config.cruise_thrust;
    sim.apply(&CommandKind::SetManualThrust([c, c, c]));
    for _ in 0..TrialConfig::ticks(config.warmup_seconds) {
        if let Err(e) = sim.control_tick() {
            record.failure = Some(format!("during warmup: {e}"));
            return Ok(record);
        }
    }

    let g = config.gains;
    sim.apply(&CommandKind::Engage {
        setpoint: config.heading_setpoint,
        kp: g.kp,
        ki: g.ki,
        kd: g.kd,
    });
    for k in 0..TrialConfig::ticks(config.duration) {
        match sim.control_tick() {
            Ok(s) => record.samples.push(TrialSample {
                t: k as f64 * CONTROL_PERIOD,
                yaw: s.yaw,
                setpoint: s.setpoint,
                error: s.error,
                commands: s.commands,
            }),
            Err(e) => {
                record.failure = Some(format!("at t={:.3}s after engage: {e}", k as f64 * CONTROL_PERIOD));
                break;
            }
        }
    }
    Ok(record)
}
