//! Heading-lock autopilot.
//!
//! Errors are in degrees and gains are in command-percent per degree, so a
//! proportional gain of 5 turns an 8 degree error into a 40 % yaw command.
//! In heading lock the axial thruster holds the cruise command and the
//! lateral pair is driven differentially around `lateral_trim`.

use thiserror::Error;

/// Control period, s.
pub const CONTROL_PERIOD: f64 = 0.030;

/// PID output that maps to a full-scale (1.0) command.
pub const FULL_SCALE_PERCENT: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutopilotError {
    #[error("heading lock is not engaged")]
    NotEngaged,
    #[error("invalid gains: {0}")]
    InvalidGains(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub fn proportional(kp: f64) -> Self {
        Self { kp, ki: 0.0, kd: 0.0 }
    }

    pub fn validate(&self) -> Result<(), AutopilotError> {
        for (name, g) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(AutopilotError::InvalidGains(format!("{name} = {g}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Manual,
    HeadingLock,
}

/// Which thruster indices play which role in heading lock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixerLayout {
    pub axial: usize,
    pub port: usize,
    pub starboard: usize,
}

impl Default for MixerLayout {
    fn default() -> Self {
        Self { axial: 0, port: 1, starboard: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutopilotState {
    pub mode: Mode,
    /// Degrees in `[0, 360)`.
    pub heading_setpoint: f64,
    pub cruise_thrust: f64,
    /// Degree-seconds.
    pub integral: f64,
    pub last_error: f64,
    /// False until the first tick after engage; suppresses the derivative kick.
    pub primed: bool,
    pub sample_period: f64,
    pub lateral_trim: f64,
    pub layout: MixerLayout,
    /// Operator commands passed through in manual mode.
    pub manual_command: Vec<f64>,
}

impl AutopilotState {
    pub fn new(thrusters: usize) -> Self {
        Self {
            mode: Mode::Manual,
            heading_setpoint: 0.0,
            cruise_thrust: 0.0,
            integral: 0.0,
            last_error: 0.0,
            primed: false,
            sample_period: CONTROL_PERIOD,
            lateral_trim: 0.0,
            layout: MixerLayout::default(),
            manual_command: vec![0.0; thrusters],
        }
    }

    /// Operator thrust in manual mode. The axial command also becomes the
    /// cruise thrust carried into heading lock.
    pub fn set_manual(&mut self, cmd: &[f64]) {
        self.manual_command = cmd.iter().map(|c| c.clamp(-1.0, 1.0)).collect();
        if let Some(axial) = self.manual_command.get(self.layout.axial) {
            self.cruise_thrust = axial.clamp(0.0, 1.0);
        }
    }

    pub fn disengage(&self) -> Self {
        Self {
            mode: Mode::Manual,
            integral: 0.0,
            last_error: 0.0,
            primed: false,
            ..self.clone()
        }
    }
}

/// Normalized per-thruster commands.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorCommand {
    pub per_thruster: Vec<f64>,
}

impl ActuatorCommand {
    fn clamped(mut v: Vec<f64>) -> Self {
        for c in v.iter_mut() {
            *c = if c.is_nan() { 0.0 } else { c.clamp(-1.0, 1.0) };
        }
        Self { per_thruster: v }
    }
}

/// Wrap degrees to `[0, 360)`.
pub fn wrap_360(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Shortest signed turn from `psi` to `setpoint`, in `[-180, 180)`.
pub fn heading_error(setpoint: f64, psi: f64) -> f64 {
    let r = (setpoint - psi + 180.0).rem_euclid(360.0);
    if r >= 360.0 {
        -180.0
    } else {
        r - 180.0
    }
}

/// One PID update. Returns the normalized yaw command.
pub fn pid_step(
    gains: &PidGains,
    state: &AutopilotState,
    error: f64,
) -> Result<(f64, AutopilotState), AutopilotError> {
    if state.mode != Mode::HeadingLock {
        return Err(AutopilotError::NotEngaged);
    }
    let dt = state.sample_period;
    let mut integral = state.integral + error * dt;
    if gains.ki > 0.0 {
        // anti-windup: the integral term alone never exceeds full scale
        let limit = FULL_SCALE_PERCENT / gains.ki;
        integral = integral.clamp(-limit, limit);
    }
    let derivative = if state.primed {
        (error - state.last_error) / dt
    } else {
        0.0
    };
    let raw = gains.kp * error + gains.ki * integral + gains.kd * derivative;
    let cmd = (raw / FULL_SCALE_PERCENT).clamp(-1.0, 1.0);
    let next = AutopilotState {
        integral,
        last_error: error,
        primed: true,
        ..state.clone()
    };
    Ok((cmd, next))
}

/// Switch to heading lock with a fresh controller history.
pub fn engage(state: &AutopilotState, setpoint: f64, gains: &PidGains) -> AutopilotState {
    debug_assert!(gains.validate().is_ok());
    AutopilotState {
        mode: Mode::HeadingLock,
        heading_setpoint: wrap_360(setpoint),
        integral: 0.0,
        last_error: 0.0,
        primed: false,
        ..state.clone()
    }
}

/// One control period: manual passthrough or heading-lock mixing.
pub fn control_tick(
    state: &AutopilotState,
    gains: &PidGains,
    measured_psi: f64,
) -> (ActuatorCommand, AutopilotState) {
    match state.mode {
        Mode::Manual => (ActuatorCommand::clamped(state.manual_command.clone()), state.clone()),
        Mode::HeadingLock => {
            let error = heading_error(state.heading_setpoint, measured_psi);
            let (yaw, next) = pid_step(gains, state, error).expect("heading lock engaged");
            let n = state.manual_command.len();
            let mut cmd = vec![0.0; n];
            let l = state.layout;
            cmd[l.axial] = state.cruise_thrust;
            // positive yaw moment comes from pushing the port side forward
            cmd[l.port] = state.lateral_trim + yaw;
            cmd[l.starboard] = state.lateral_trim - yaw;
            (ActuatorCommand::clamped(cmd), next)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn locked(kp: f64) -> (AutopilotState, PidGains) {
        let gains = PidGains::proportional(kp);
        let mut s = AutopilotState::new(3);
        s.set_manual(&[0.3, 0.3, 0.3]);
        (engage(&s, 120.0, &gains), gains)
    }

    #[test]
    fn heading_error_cases() {
        assert_eq!(heading_error(10.0, 350.0), 20.0);
        assert_eq!(heading_error(90.0, 90.0), 0.0);
        assert_eq!(heading_error(0.0, 180.0), -180.0);
        assert_eq!(heading_error(180.0, 0.0), -180.0);
        assert_eq!(heading_error(350.0, 10.0), -20.0);
    }

    #[test]
    fn proportional_arithmetic() {
        let (s, g) = locked(5.0);
        let (cmd, _) = pid_step(&g, &s, 8.0).unwrap();
        assert!((cmd - 0.40).abs() < 1e-12);
        let (cmd, _) = pid_step(&g, &s, 0.0).unwrap();
        assert_eq!(cmd, 0.0);
        let (s, g) = locked(10.0);
        let (cmd, _) = pid_step(&g, &s, 25.0).unwrap();
        assert_eq!(cmd, 1.0);
    }

    #[test]
    fn pid_requires_engagement() {
        let s = AutopilotState::new(3);
        assert_eq!(
            pid_step(&PidGains::proportional(5.0), &s, 1.0).unwrap_err(),
            AutopilotError::NotEngaged
        );
    }

    #[test]
    fn integral_is_clamped() {
        let gains = PidGains { kp: 0.0, ki: 2.0, kd: 0.0 };
        let mut s = engage(&AutopilotState::new(3), 0.0, &gains);
        for _ in 0..100_000 {
            s = pid_step(&gains, &s, 90.0).unwrap().1;
        }
        assert!(gains.ki * s.integral <= FULL_SCALE_PERCENT + 1e-9);
    }

    #[test]
    fn no_derivative_kick_on_first_tick() {
        let gains = PidGains { kp: 0.0, ki: 0.0, kd: 3.0 };
        let s = engage(&AutopilotState::new(3), 0.0, &gains);
        let (cmd, s) = pid_step(&gains, &s, 30.0).unwrap();
        assert_eq!(cmd, 0.0);
        let (cmd, _) = pid_step(&gains, &s, 30.3).unwrap();
        assert!((cmd - 3.0 * 0.3 / CONTROL_PERIOD / 100.0).abs() < 1e-9);
    }

    #[test]
    fn engage_keeps_cruise_and_is_idempotent() {
        let gains = PidGains::proportional(5.0);
        let mut manual = AutopilotState::new(3);
        manual.set_manual(&[0.3, 0.3, 0.3]);
        let a = engage(&manual, 120.0, &gains);
        assert_eq!(a.mode, Mode::HeadingLock);
        assert_eq!(a.heading_setpoint, 120.0);
        assert_eq!(a.cruise_thrust, 0.3);
        assert_eq!(engage(&a, 120.0, &gains), a);
    }

    #[test]
    fn disengage_clears_integral() {
        let gains = PidGains { kp: 1.0, ki: 1.0, kd: 0.0 };
        let s = engage(&AutopilotState::new(3), 120.0, &gains);
        let (_, s) = pid_step(&gains, &s, 10.0).unwrap();
        assert!(s.integral != 0.0);
        let off = s.disengage();
        assert_eq!(off.mode, Mode::Manual);
        assert_eq!(off.integral, 0.0);
    }

    #[test]
    fn manual_passthrough() {
        let mut s = AutopilotState::new(3);
        s.set_manual(&[0.3, 0.3, 0.3]);
        let (cmd, next) = control_tick(&s, &PidGains::default(), 42.0);
        assert_eq!(cmd.per_thruster, vec![0.3, 0.3, 0.3]);
        assert_eq!(next, s);
    }

    #[test]
    fn heading_lock_mixing() {
        let (s, g) = locked(5.0);
        let (cmd, _) = control_tick(&s, &g, 120.0);
        assert_eq!(cmd.per_thruster, vec![0.3, 0.0, 0.0]);
        let (cmd, _) = control_tick(&s, &g, 112.0);
        assert!((cmd.per_thruster[1] - 0.4).abs() < 1e-12);
        assert!((cmd.per_thruster[2] + 0.4).abs() < 1e-12);
        assert_eq!(cmd.per_thruster[0], 0.3);
    }
}
