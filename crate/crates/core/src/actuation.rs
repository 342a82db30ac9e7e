//! Thruster models and force allocation.
//!
//! A normalized command passes through a dead zone and a power-law
//! thrust curve, then a first-order lag. Thruster forces map to the body
//! frame through the allocation matrix `tau = B u`.

use nalgebra::{DMatrix, DVector, Vector3};
use thiserror::Error;

use crate::dynamics::GeneralizedForce;

/// Upper bound on the total forward thrust of the default vehicle.
pub const MAX_TOTAL_SURGE: f64 = 900.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActuationError {
    #[error("thruster command {0} outside [-1, 1]")]
    CommandOutOfRange(f64),
    #[error("dimension mismatch: allocation has {expected} columns, got {got} thruster forces")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid thruster parameters: {0}")]
    InvalidParams(String),
    #[error("invalid time step {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrusterParams {
    /// Bollard thrust at full command, N.
    pub max_thrust: f64,
    /// Commands with magnitude at or below this produce no thrust.
    pub dead_zone: f64,
    /// First-order lag time constant, s.
    pub time_constant: f64,
    pub curve_exponent: f64,
    /// Shaft speed reported at full thrust.
    pub max_rpm: f64,
}

impl Default for ThrusterParams {
    fn default() -> Self {
        Self {
            max_thrust: 300.0,
            dead_zone: 0.05,
            time_constant: 0.2,
            curve_exponent: 2.0,
            max_rpm: 3000.0,
        }
    }
}

impl ThrusterParams {
    pub fn validate(&self) -> Result<(), ActuationError> {
        let bad = |m: &str| Err(ActuationError::InvalidParams(m.to_string()));
        if !(self.max_thrust > 0.0 && self.max_thrust.is_finite()) {
            return bad("max thrust must be positive");
        }
        if !(self.dead_zone >= 0.0 && self.dead_zone < 1.0) {
            return bad("dead zone must lie in [0, 1)");
        }
        if !(self.time_constant > 0.0 && self.time_constant.is_finite()) {
            return bad("time constant must be positive");
        }
        if !(self.curve_exponent >= 1.0 && self.curve_exponent.is_finite()) {
            return bad("curve exponent must be at least 1");
        }
        if !(self.max_rpm > 0.0 && self.max_rpm.is_finite()) {
            return bad("max rpm must be positive");
        }
        Ok(())
    }

    /// Smallest command magnitude that yields `thrust` newtons at steady
    /// state. Inverse of [`steady_thrust`] on the positive branch.
    pub fn command_for_thrust(&self, thrust: f64) -> Option<f64> {
        let frac = thrust.abs() / self.max_thrust;
        if frac > 1.0 {
            return None;
        }
        let mag = self.dead_zone + (1.0 - self.dead_zone) * frac.powf(1.0 / self.curve_exponent);
        Some(mag.copysign(thrust))
    }
}

/// Steady-state thrust for a normalized command.
pub fn steady_thrust(params: &ThrusterParams, cmd: f64) -> Result<f64, ActuationError> {
    if !(cmd.abs() <= 1.0) {
        return Err(ActuationError::CommandOutOfRange(cmd));
    }
    let mag = cmd.abs();
    if mag <= params.dead_zone {
        return Ok(0.0);
    }
    let frac = ((mag - params.dead_zone) / (1.0 - params.dead_zone)).min(1.0);
    Ok((params.max_thrust * frac.powf(params.curve_exponent)).copysign(cmd))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThrusterState {
    pub command: f64,
    pub thrust: f64,
    pub rpm: f64,
}

/// Advance one thruster by `dt` toward the steady thrust of `cmd`.
pub fn thruster_step(
    state: &ThrusterState,
    params: &ThrusterParams,
    cmd: f64,
    dt: f64,
) -> Result<ThrusterState, ActuationError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ActuationError::InvalidStep(dt));
    }
    let target = steady_thrust(params, cmd)?;
    let alpha = 1.0 - (-dt / params.time_constant).exp();
    let thrust = (state.thrust + (target - state.thrust) * alpha)
        .clamp(-params.max_thrust, params.max_thrust);
    let rpm = params.max_rpm * (thrust.abs() / params.max_thrust).sqrt();
    Ok(ThrusterState {
        command: cmd,
        thrust,
        rpm: if thrust < 0.0 { -rpm } else { rpm },
    })
}

/// Mounting of one thruster in the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrusterMount {
    pub position: Vector3<f64>,
    /// Unit thrust direction.
    pub axis: Vector3<f64>,
}

/// The 6 x n map from thruster forces to body force and moment.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationMatrix {
    entries: DMatrix<f64>,
    mounts: Vec<ThrusterMount>,
}

impl AllocationMatrix {
    /// Build `B` column by column from the thruster geometry.
    pub fn from_mounts(mounts: Vec<ThrusterMount>) -> Result<Self, ActuationError> {
        if mounts.is_empty() {
            return Err(ActuationError::InvalidParams("need at least one thruster".into()));
        }
        let mut entries = DMatrix::zeros(6, mounts.len());
        for (j, m) in mounts.iter().enumerate() {
            let axis = m.axis.normalize();
            let moment = m.position.cross(&axis);
            for i in 0..3 {
                entries[(i, j)] = axis[i];
                entries[(i + 3, j)] = moment[i];
            }
        }
        Ok(Self { entries, mounts })
    }

    /// Use explicit rows; `mounts` is carried as metadata.
    pub fn from_rows(rows: &[Vec<f64>; 6], mounts: Vec<ThrusterMount>) -> Result<Self, ActuationError> {
        let n = rows[0].len();
        if n == 0 {
            return Err(ActuationError::InvalidParams("need at least one thruster".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(ActuationError::DimensionMismatch { expected: n, got: r.len() });
        }
        if !mounts.is_empty() && mounts.len() != n {
            return Err(ActuationError::DimensionMismatch { expected: n, got: mounts.len() });
        }
        let entries = DMatrix::from_fn(6, n, |i, j| rows[i][j]);
        Ok(Self { entries, mounts })
    }

    /// Stern axial thruster plus a port/starboard pair, all pointing forward.
    pub fn default_layout(lever_arm: f64) -> Self {
        let fwd = Vector3::x();
        Self::from_mounts(vec![
            ThrusterMount { position: Vector3::new(-2.2, 0.0, 0.0), axis: fwd },
            ThrusterMount { position: Vector3::new(-1.5, -lever_arm, 0.0), axis: fwd },
            ThrusterMount { position: Vector3::new(-1.5, lever_arm, 0.0), axis: fwd },
        ])
        .expect("non-empty layout")
    }

    pub fn thruster_count(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn mounts(&self) -> &[ThrusterMount] {
        &self.mounts
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.entries.row(i).iter().copied().collect()
    }

    /// Surge force when every thruster delivers `max_thrust` forward.
    pub fn full_forward_surge(&self, max_thrust: f64) -> f64 {
        self.entries.row(0).iter().map(|b| b.max(0.0) * max_thrust).sum()
    }
}

/// Thruster forces in newtons, one per allocation column.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlVector(pub Vec<f64>);

impl ControlVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_states(states: &[ThrusterState]) -> Self {
        Self(states.iter().map(|s| s.thrust).collect())
    }
}

/// `tau = B u`.
pub fn allocate(b: &AllocationMatrix, u: &ControlVector) -> Result<GeneralizedForce, ActuationError> {
    if u.0.len() != b.thruster_count() {
        return Err(ActuationError::DimensionMismatch {
            expected: b.thruster_count(),
            got: u.0.len(),
        });
    }
    let tau = &b.entries * DVector::from_column_slice(&u.0);
    Ok(GeneralizedForce {
        fx: tau[0],
        fy: tau[1],
        fz: tau[2],
        mx: tau[3],
        my: tau[4],
        mz: tau[5],
    })
}
