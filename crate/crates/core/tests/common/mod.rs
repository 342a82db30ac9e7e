#![allow(dead_code)]

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use auvsim::dynamics::{BodyVelocity, VehicleParams};
use auvsim::VehicleConfig;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default hull with damping removed and weight equal to buoyancy at a
/// common centre, so nothing but inertia and Coriolis terms remain.
pub fn conservative_hull() -> VehicleParams {
    let mut p = VehicleConfig::default().hull;
    p.d1 = Vector6::zeros();
    p.d2 = Vector6::zeros();
    p.buoyancy = p.weight;
    p.cb = p.cg;
    p
}

/// A hull with fully coupled (but still positive definite) inertia: off-
/// centre gravity, products of inertia and dense added mass.
pub fn coupled_hull() -> VehicleParams {
    let mut p = conservative_hull();
    p.cg = Vector3::new(0.05, -0.02, 0.03);
    p.cb = p.cg;
    p.inertia = Matrix3::new(30.0, 1.5, -2.0, 1.5, 600.0, 4.0, -2.0, 4.0, 620.0);
    let mut a = Matrix6::<f64>::zeros();
    let mut r = rng(99);
    for i in 0..6 {
        for j in 0..6 {
            a[(i, j)] = r.gen_range(-3.0..3.0);
        }
    }
    p.added_mass += a * a.transpose();
    p
}

/// `M = M_R + M_A` assembled independently of the library.
pub fn inertia_oracle(p: &VehicleParams) -> Matrix6<f64> {
    let m = p.mass;
    let c = p.cg;
    let s = Matrix3::new(0.0, -c.z, c.y, c.z, 0.0, -c.x, -c.y, c.x, 0.0) * m;
    let mut mr = Matrix6::zeros();
    for i in 0..3 {
        mr[(i, i)] = m;
        for j in 0..3 {
            mr[(i, j + 3)] = -s[(i, j)];
            mr[(i + 3, j)] = s[(i, j)];
            mr[(i + 3, j + 3)] = p.inertia[(i, j)];
        }
    }
    mr + p.added_mass
}

pub fn random_velocity<R: Rng>(r: &mut R, lin: f64, ang: f64) -> BodyVelocity {
    BodyVelocity {
        u: r.gen_range(-lin..lin),
        v: r.gen_range(-lin..lin),
        w: r.gen_range(-lin..lin),
        p: r.gen_range(-ang..ang),
        q: r.gen_range(-ang..ang),
        r: r.gen_range(-ang..ang),
    }
}

pub fn kinetic_energy(m: &Matrix6<f64>, v: &BodyVelocity) -> f64 {
    let nu = Vector6::new(v.u, v.v, v.w, v.p, v.q, v.r);
    0.5 * nu.dot(&(m * nu))
}

use auvsim::telemetry::{Command, CommandKind, TelemetryFrame};

pub fn random_frame<R: Rng>(r: &mut R) -> TelemetryFrame {
    // mix round numbers with full-precision ones
    let mut val = |lo: f64, hi: f64| {
        let x = r.gen_range(lo..hi);
        if r.gen_bool(0.2) {
            (x * 100.0).round() / 100.0
        } else {
            x
        }
    };
    let (roll, pitch, yaw) = (val(-180.0, 180.0), val(-180.0, 180.0), val(0.0, 360.0));
    let (depth, altitude) = (val(0.0, 100.0), val(-10.0, 100.0));
    let voltage = val(0.0, 200.0);
    let obstacle_range = if r.gen_bool(0.5) { -1.0 } else { r.gen_range(0.0..50.0) };
    TelemetryFrame {
        timestamp_ms: r.gen_range(0..u64::MAX / 2),
        roll,
        pitch,
        yaw,
        depth,
        altitude,
        obstacle_range,
        thruster_rpm: [r.gen_range(-3000..=3000), r.gen_range(-3000..=3000), r.gen_range(-3000..=3000)],
        leak: std::array::from_fn(|_| r.gen_bool(0.1)),
        voltage,
    }
}

pub fn random_command<R: Rng>(r: &mut R, seq: u64) -> Command {
    let gain = |r: &mut R| if r.gen_bool(0.3) { r.gen_range(0..20) as f64 } else { r.gen_range(0.0..50.0) };
    let kind = match r.gen_range(0..5) {
        0 => CommandKind::SetManualThrust(std::array::from_fn(|_| r.gen_range(-1.0..=1.0))),
        1 => CommandKind::Engage { setpoint: r.gen_range(0.0..360.0), kp: gain(r), ki: gain(r), kd: gain(r) },
        2 => CommandKind::Disengage,
        3 => CommandKind::SetGains { kp: gain(r), ki: gain(r), kd: gain(r) },
        _ => CommandKind::SetCruiseThrust(r.gen_range(0.0..=1.0)),
    };
    Command { seq, kind }
}
