use crate::actuation::steady_thrust;
use crate::autopilot::{MixerLayout, FULL_SCALE_PERCENT};
use crate::params::VehicleConfig;

use super::{compute_metrics, run_trial, HarnessError, TrialConfig};

/// Yaw moment per newton of differential thrust on the lateral pair.
pub fn differential_yaw_gain(vehicle: &VehicleConfig) -> f64 {
    let l = MixerLayout::default();
    let row = vehicle.allocation.row(5);
    row[l.port] - row[l.starboard]
}

/// Steady heading error of a proportional loop holding off a constant yaw
/// moment, from the static balance alone.
///
/// At rest the lateral pair must cancel `moment`, which fixes the yaw
/// command and hence `error = 100 * command / kp`. With a linear thrust
/// curve this is `moment / (k * kp)`.
pub fn closed_form_sse(vehicle: &VehicleConfig, moment: f64, kp: f64) -> Option<f64> {
    let k = differential_yaw_gain(vehicle);
    if k == 0.0 || kp <= 0.0 {
        return None;
    }
    let per_thruster = (moment / k).abs();
    let cmd = vehicle.thruster.command_for_thrust(per_thruster)?;
    if moment == 0.0 {
        return Some(0.0);
    }
    Some(FULL_SCALE_PERCENT * cmd.abs() / kp)
}

/// Inverse of [`closed_form_sse`]: the moment held off with `sse` degrees of
/// error at gain `kp`.
pub fn closed_form_moment(vehicle: &VehicleConfig, sse: f64, kp: f64) -> Option<f64> {
    let cmd = kp * sse / FULL_SCALE_PERCENT;
    if !(cmd.abs() <= 1.0) {
        return None;
    }
    let thrust = steady_thrust(&vehicle.thruster, cmd).ok()?;
    Some(thrust.abs() * differential_yaw_gain(vehicle).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub moment: f64,
    /// Steady error of the simulated trial at `moment`.
    pub measured_sse: f64,
    /// The static-balance prediction for the same target.
    pub closed_form_moment: Option<f64>,
    pub trials: usize,
}

/// Tolerance on the calibrated steady error, degrees.
pub const SSE_TOLERANCE: f64 = 0.02;

/// Find the constant yaw disturbance that makes a proportional trial at
/// `kp` settle with `target_sse` degrees of error, by bisection on
/// simulated trials.
pub fn calibrate_disturbance(
    vehicle: &VehicleConfig,
    base: &TrialConfig,
    kp: f64,
    target_sse: f64,
) -> Result<Calibration, HarnessError> {
    let closed = closed_form_moment(vehicle, target_sse, kp);
    if target_sse == 0.0 {
        return Ok(Calibration {
            moment: 0.0,
            measured_sse: 0.0,
            closed_form_moment: closed,
            trials: 0,
        });
    }
    if !(target_sse > 0.0 && kp > 0.0) {
        return Err(HarnessError::CalibrationFailed(format!(
            "need positive target and gain (target {target_sse}, kp {kp})"
        )));
    }
    if kp * target_sse >= FULL_SCALE_PERCENT {
        return Err(HarnessError::CalibrationFailed(format!(
            "{target_sse} deg at kp {kp} needs a saturated yaw command"
        )));
    }
    let cfg = base.with_kp(kp);
    let mut trials = 0;
    let mut sse_at = |moment: f64| -> Result<f64, HarnessError> {
        trials += 1;
        let record = run_trial(
            vehicle,
            &TrialConfig {
                disturbance_yaw_moment: moment,
                ..cfg.clone()
            },
        )?;
        Ok(compute_metrics(&record, cfg.error_band)?.steady_state_error)
    };

    let authority = differential_yaw_gain(vehicle).abs() * vehicle.thruster.max_thrust;
    let mut lo = 0.0;
    let sse_lo = sse_at(lo)?;
    if sse_lo >= target_sse {
        return Err(HarnessError::CalibrationFailed(format!(
            "undisturbed run already has {sse_lo:.3} deg of error"
        )));
    }
    let mut hi = closed.map_or(0.5 * authority, |m| (1.25 * m).min(authority));
    let mut sse_hi = sse_at(hi)?;
    while sse_hi < target_sse {
        if hi >= authority {
            return Err(HarnessError::CalibrationFailed(format!(
                "full yaw authority ({authority:.1} N m) only reaches {sse_hi:.3} deg"
            )));
        }
        lo = hi;
        hi = (hi * 1.5).min(authority);
        sse_hi = sse_at(hi)?;
    }

    let (mut best, mut best_sse) = (hi, sse_hi);
    for _ in 0..60 {
        if (best_sse - target_sse).abs() <= SSE_TOLERANCE || hi - lo < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let sse = sse_at(mid)?;
        if sse < target_sse {
            lo = mid;
        } else {
            hi = mid;
        }
        if (sse - target_sse).abs() < (best_sse - target_sse).abs() {
            best = mid;
            best_sse = sse;
        }
    }
    if (best_sse - target_sse).abs() > 0.5 {
        return Err(HarnessError::CalibrationFailed(format!(
            "bisection stalled at {best_sse:.3} deg for target {target_sse} deg"
        )));
    }
    Ok(Calibration {
        moment: best,
        measured_sse: best_sse,
        closed_form_moment: closed,
        trials,
    })
}
