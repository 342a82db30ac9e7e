//! The closed-loop vehicle: hull dynamics, thrusters and autopilot advanced
//! on a fixed control period with several integrator substeps per period.

use thiserror::Error;

use crate::actuation::{allocate, thruster_step, ActuationError, ControlVector, ThrusterState};
use crate::autopilot::{
    control_tick, engage, heading_error, wrap_360, AutopilotState, Mode, PidGains, CONTROL_PERIOD,
};
use crate::dynamics::{DynamicsError, GeneralizedForce, SimState, VehicleModel};
use crate::params::VehicleConfig;
use crate::telemetry::{Command, CommandKind, TelemetryFrame, LEAK_SENSORS, THRUSTER_CHANNELS};

/// Default integrator step, s.
pub const DEFAULT_DT: f64 = 0.005;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Actuation(#[from] ActuationError),
    #[error("integrator step {0} s does not divide the {CONTROL_PERIOD} s control period")]
    StepDoesNotDivide(f64),
    #[error("thruster layout has {0} thrusters; heading lock needs at least 3")]
    Layout(usize),
}

/// What the controller saw and did on one control tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSample {
    /// Simulation time at the start of the tick, s.
    pub time: f64,
    /// Measured heading, degrees `[0, 360)`.
    pub yaw: f64,
    pub setpoint: f64,
    /// `heading_error(setpoint, yaw)`; zero in manual mode.
    pub error: f64,
    pub mode: Mode,
    pub commands: Vec<f64>,
}

/// Number of integrator substeps per control period, if `dt` divides it.
pub fn substeps_for(dt: f64) -> Result<usize, SimError> {
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(SimError::Dynamics(DynamicsError::InvalidStep(dt)));
    }
    let n = (CONTROL_PERIOD / dt).round();
    if n < 1.0 || (n * dt - CONTROL_PERIOD).abs() > 1e-9 {
        return Err(SimError::StepDoesNotDivide(dt));
    }
    Ok(n as usize)
}

#[derive(Debug, Clone)]
pub struct Simulator {
    model: VehicleModel,
    config: VehicleConfig,
    state: SimState,
    thrusters: Vec<ThrusterState>,
    autopilot: AutopilotState,
    gains: PidGains,
    disturbance: GeneralizedForce,
    dt: f64,
    substeps: usize,
    ticks: u64,
}

impl Simulator {
    pub fn new(config: VehicleConfig, initial: SimState, dt: f64) -> Result<Self, SimError> {
        let substeps = substeps_for(dt)?;
        let model = VehicleModel::new(config.hull.clone())?;
        config.thruster.validate()?;
        let n = config.allocation.thruster_count();
        if n < 3 {
            return Err(SimError::Layout(n));
        }
        initial.pose.check_attitude()?;
        Ok(Self {
            model,
            state: SimState { pose: initial.pose.wrapped(), ..initial },
            thrusters: vec![ThrusterState::default(); n],
            autopilot: AutopilotState::new(n),
            gains: PidGains::default(),
            disturbance: GeneralizedForce::ZERO,
            dt,
            substeps,
            ticks: 0,
            config,
        })
    }

    pub fn with_disturbance(mut self, w: GeneralizedForce) -> Self {
        self.disturbance = w;
        self
    }

    pub fn set_disturbance(&mut self, w: GeneralizedForce) {
        self.disturbance = w;
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn thrusters(&self) -> &[ThrusterState] {
        &self.thrusters
    }

    pub fn autopilot(&self) -> &AutopilotState {
        &self.autopilot
    }

    pub fn gains(&self) -> &PidGains {
        &self.gains
    }

    pub fn model(&self) -> &VehicleModel {
        &self.model
    }

    pub fn config(&self) -> &VehicleConfig {
        &self.config
    }

    /// Heading in degrees, `[0, 360)`.
    pub fn heading_deg(&self) -> f64 {
        wrap_360(self.state.pose.psi.to_degrees())
    }

    /// Apply an operator command. Only called between control ticks.
    pub fn apply(&mut self, cmd: &CommandKind) {
        match *cmd {
            CommandKind::SetManualThrust(t) => {
                let mut manual = vec![0.0; self.thrusters.len()];
                for (slot, v) in manual.iter_mut().zip(t) {
                    *slot = v;
                }
                self.autopilot.set_manual(&manual);
            }
            CommandKind::Engage { setpoint, kp, ki, kd } => {
                self.gains = PidGains { kp, ki, kd };
                self.autopilot = engage(&self.autopilot, setpoint, &self.gains);
            }
            CommandKind::Disengage => self.autopilot = self.autopilot.disengage(),
            CommandKind::SetGains { kp, ki, kd } => self.gains = PidGains { kp, ki, kd },
            CommandKind::SetCruiseThrust(c) => self.autopilot.cruise_thrust = c.clamp(0.0, 1.0),
        }
    }

    pub fn apply_command(&mut self, cmd: &Command) {
        self.apply(&cmd.kind);
    }

    pub fn control_tick(&mut self) -> Result<TickSample, SimError> {
        self.control_tick_with(|_| {})
    }

    /// Run one control period; `on_substep` sees the simulator after every
    /// integrator substep.
    pub fn control_tick_with(
        &mut self,
        mut on_substep: impl FnMut(&Simulator),
    ) -> Result<TickSample, SimError> {
        let yaw = self.heading_deg();
        let (cmd, next) = control_tick(&self.autopilot, &self.gains, yaw);
        let error = match self.autopilot.mode {
            Mode::HeadingLock => heading_error(self.autopilot.heading_setpoint, yaw),
            Mode::Manual => 0.0,
        };
        let sample = TickSample {
            time: self.state.time,
            yaw,
            setpoint: self.autopilot.heading_setpoint,
            error,
            mode: self.autopilot.mode,
            commands: cmd.per_thruster.clone(),
        };
        self.autopilot = next;
        for _ in 0..self.substeps {
            for (th, &c) in self.thrusters.iter_mut().zip(&cmd.per_thruster) {
                *th = thruster_step(th, &self.config.thruster, c, self.dt)?;
            }
            let tau = allocate(&self.config.allocation, &ControlVector::from_states(&self.thrusters))?;
            self.state = self.model.step(&self.state, &tau, &self.disturbance, self.dt)?;
            on_substep(self);
        }
        self.ticks += 1;
        Ok(sample)
    }

    /// Current telemetry channels stamped with `timestamp_ms`.
    pub fn frame(&self, timestamp_ms: u64) -> TelemetryFrame {
        let pose = &self.state.pose;
        let signed = |rad: f64| {
            let d = (rad.to_degrees() + 180.0).rem_euclid(360.0) - 180.0;
            if d >= 180.0 {
                -180.0
            } else {
                d
            }
        };
        let mut rpm = [0i32; THRUSTER_CHANNELS];
        for (slot, th) in rpm.iter_mut().zip(&self.thrusters) {
            *slot = th.rpm.round() as i32;
        }
        TelemetryFrame {
            timestamp_ms,
            roll: signed(pose.phi),
            pitch: signed(pose.theta),
            yaw: self.heading_deg(),
            depth: pose.z,
            altitude: self.config.lakebed_depth - pose.z,
            obstacle_range: -1.0,
            thruster_rpm: rpm,
            leak: [false; LEAK_SENSORS],
            voltage: self.config.supply_voltage,
        }
    }
}
