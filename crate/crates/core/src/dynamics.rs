//! Six degree-of-freedom rigid body + hydrodynamic model.
//!
//! State is split into the earth-fixed pose `eta = [x y z phi theta psi]`
//! (NED, z down, Z-Y-X Euler angles) and the body-fixed velocity
//! `nu = [u v w p q r]`. The model is
//!
//! ```text
//! eta_dot = J(eta) nu
//! M nu_dot + C(nu) nu + D(nu) nu + G(eta) = tau + w
//! ```
//!
//! with `M = M_R + M_A`, `C` built from `M` by the two-block skew
//! construction, `D` diagonal (linear + quadratic) and `G` the restoring
//! terms of weight and buoyancy.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Cholesky, Matrix3, Matrix6, Vector3, Vector6, U6};
use thiserror::Error;

/// Standard gravity used when converting masses to weights.
pub const GRAVITY: f64 = 9.81;

/// Pitch angles closer than this to +-pi/2 are rejected.
pub const PITCH_GUARD: f64 = 1e-6;

/// Condition threshold below which the combined inertia is treated as singular.
pub const INERTIA_CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("pitch {theta} rad is within {PITCH_GUARD} of the Euler singularity")]
    SingularAttitude { theta: f64 },
    #[error("combined inertia matrix is singular (reciprocal condition {rcond:e})")]
    SingularInertia { rcond: f64 },
    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),
    #[error("time step {0} s outside (0, 0.1]")]
    InvalidStep(f64),
}

/// Wrap an angle in radians to `[-pi, pi)`.
pub fn wrap_pi(angle: f64) -> f64 {
    if (-PI..PI).contains(&angle) {
        return angle;
    }
    let r = (angle + PI).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if r >= TAU {
        -PI
    } else {
        r - PI
    }
}

/// Earth-fixed position and attitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl Pose {
    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
            phi: v[3],
            theta: v[4],
            psi: v[5],
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.x, self.y, self.z, self.phi, self.theta, self.psi)
    }

    /// Roll and yaw wrapped to `[-pi, pi)`.
    pub fn wrapped(mut self) -> Self {
        self.phi = wrap_pi(self.phi);
        self.psi = wrap_pi(self.psi);
        self
    }

    pub fn check_attitude(&self) -> Result<(), DynamicsError> {
        if self.theta.is_finite() && self.theta.abs() < FRAC_PI_2 - PITCH_GUARD {
            Ok(())
        } else {
            Err(DynamicsError::SingularAttitude { theta: self.theta })
        }
    }
}

/// Body-fixed linear and angular velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyVelocity {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BodyVelocity {
    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            u: v[0],
            v: v[1],
            w: v[2],
            p: v[3],
            q: v[4],
            r: v[5],
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.u, self.v, self.w, self.p, self.q, self.r)
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|c| c.is_finite())
    }
}

/// Body-frame forces (N) and moments (N m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeneralizedForce {
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl GeneralizedForce {
    pub const ZERO: Self = Self {
        fx: 0.0,
        fy: 0.0,
        fz: 0.0,
        mx: 0.0,
        my: 0.0,
        mz: 0.0,
    };

    /// A pure yaw moment.
    pub fn yaw_moment(mz: f64) -> Self {
        Self { mz, ..Self::ZERO }
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            fx: v[0],
            fy: v[1],
            fz: v[2],
            mx: v[3],
            my: v[4],
            mz: v[5],
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.fx, self.fy, self.fz, self.mx, self.my, self.mz)
    }
}

/// Full state advanced by [`step`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimState {
    pub time: f64,
    pub pose: Pose,
    pub velocity: BodyVelocity,
}

/// Hull mass, inertia and hydrodynamic coefficients.
///
/// `inertia` is taken about the body origin. `cg` and `cb` are body-frame
/// offsets (x forward, y starboard, z down).
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleParams {
    pub mass: f64,
    pub inertia: Matrix3<f64>,
    pub added_mass: Matrix6<f64>,
    pub d1: Vector6<f64>,
    pub d2: Vector6<f64>,
    pub weight: f64,
    pub buoyancy: f64,
    pub cg: Vector3<f64>,
    pub cb: Vector3<f64>,
    pub length: f64,
    pub hull_diameter: f64,
}

impl VehicleParams {
    /// Check the physical invariants, including positive definiteness of
    /// `M_R + M_A`.
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: &str| Err(DynamicsError::InvalidParams(m.to_string()));
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad("mass must be positive");
        }
        if (self.inertia - self.inertia.transpose()).abs().max() > 1e-9 * self.inertia.abs().max() {
            return bad("inertia tensor must be symmetric");
        }
        if Cholesky::new(self.inertia).is_none() {
            return bad("inertia tensor must be positive definite");
        }
        let ma_scale = self.added_mass.abs().max().max(1.0);
        if (self.added_mass - self.added_mass.transpose()).abs().max() > 1e-9 * ma_scale {
            return bad("added mass must be symmetric");
        }
        let min_eig = self.added_mass.symmetric_eigenvalues().min();
        if min_eig < -1e-9 * ma_scale {
            return bad("added mass must be positive semidefinite");
        }
        if self.d1.iter().chain(self.d2.iter()).any(|d| !(*d >= 0.0)) {
            return bad("damping coefficients must be non-negative");
        }
        if !(self.weight.is_finite() && self.buoyancy.is_finite()) {
            return bad("weight and buoyancy must be finite");
        }
        Ok(())
    }

    /// Rigid-body inertia `M_R` about the body origin.
    pub fn rigid_body_inertia(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        let s = skew(&(self.cg * self.mass));
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(Matrix3::identity() * self.mass));
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-s));
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&s);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.inertia);
        m
    }

    /// `M = M_R + M_A`.
    pub fn inertia_matrix(&self) -> Matrix6<f64> {
        self.rigid_body_inertia() + self.added_mass
    }
}

/// Cross-product matrix: `skew(a) * b == a x b`.
pub fn skew(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Z-Y-X rotation from body to earth frame.
pub fn rotation_matrix(phi: f64, theta: f64, psi: f64) -> Matrix3<f64> {
    let (sphi, cphi) = phi.sin_cos();
    let (sth, cth) = theta.sin_cos();
    let (spsi, cpsi) = psi.sin_cos();
    Matrix3::new(
        cpsi * cth,
        -spsi * cphi + cpsi * sth * sphi,
        spsi * sphi + cpsi * cphi * sth,
        spsi * cth,
        cpsi * cphi + sphi * sth * spsi,
        -cpsi * sphi + sth * spsi * cphi,
        -sth,
        cth * sphi,
        cth * cphi,
    )
}

/// Body rates to Euler angle rates.
pub fn euler_rate_matrix(phi: f64, theta: f64) -> Result<Matrix3<f64>, DynamicsError> {
    if !(theta.abs() < FRAC_PI_2 - PITCH_GUARD) {
        return Err(DynamicsError::SingularAttitude { theta });
    }
    let (sphi, cphi) = phi.sin_cos();
    let (sth, cth) = theta.sin_cos();
    let tth = sth / cth;
    Ok(Matrix3::new(
        1.0,
        sphi * tth,
        cphi * tth,
        0.0,
        cphi,
        -sphi,
        0.0,
        sphi / cth,
        cphi / cth,
    ))
}

/// The block-diagonal 6x6 velocity transformation `J(eta)`.
pub fn transform_matrix(pose: &Pose) -> Result<Matrix6<f64>, DynamicsError> {
    let t = euler_rate_matrix(pose.phi, pose.theta)?;
    let mut j = Matrix6::zeros();
    j.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&rotation_matrix(pose.phi, pose.theta, pose.psi));
    j.fixed_view_mut::<3, 3>(3, 3).copy_from(&t);
    Ok(j)
}

/// Earth-frame pose rates `J(eta) nu`.
pub fn kinematic_transform(pose: &Pose, vel: &BodyVelocity) -> Result<Vector6<f64>, DynamicsError> {
    Ok(transform_matrix(pose)? * vel.to_vector())
}

/// Coriolis-centripetal matrix of a symmetric inertia `m`.
///
/// ```text
/// C(nu) = [ 0            -S(M11 v1 + M12 v2) ]
///         [ -S(M11 v1 + M12 v2)  -S(M21 v1 + M22 v2) ]
/// ```
///
/// The result is skew-symmetric, so `nu^T C(nu) nu == 0`.
pub fn coriolis_matrix(m: &Matrix6<f64>, vel: &BodyVelocity) -> Matrix6<f64> {
    let nu = vel.to_vector();
    let nu1 = nu.fixed_rows::<3>(0);
    let nu2 = nu.fixed_rows::<3>(3);
    let a = m.fixed_view::<3, 3>(0, 0) * nu1 + m.fixed_view::<3, 3>(0, 3) * nu2;
    let b = m.fixed_view::<3, 3>(3, 0) * nu1 + m.fixed_view::<3, 3>(3, 3) * nu2;
    let sa = skew(&a);
    let sb = skew(&b);
    let mut c = Matrix6::zeros();
    c.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-sa));
    c.fixed_view_mut::<3, 3>(3, 0).copy_from(&(-sa));
    c.fixed_view_mut::<3, 3>(3, 3).copy_from(&(-sb));
    c
}

/// Hydrodynamic damping acting on the hull: `-(d1 + d2 |v|) v` per axis.
pub fn damping_force(params: &VehicleParams, vel: &BodyVelocity) -> GeneralizedForce {
    let nu = vel.to_vector();
    let f = Vector6::from_fn(|i, _| -(params.d1[i] + params.d2[i] * nu[i].abs()) * nu[i]);
    GeneralizedForce::from_vector(&f)
}

/// Net weight/buoyancy force and moment acting on the hull, in body frame.
///
/// Positive heave means downward, so a buoyant vehicle gets a negative
/// `fz`; a positive roll with the buoyancy centre above gravity yields a
/// negative (righting) roll moment.
pub fn restoring_force(params: &VehicleParams, pose: &Pose) -> GeneralizedForce {
    let r = rotation_matrix(pose.phi, pose.theta, pose.psi);
    // earth-frame vertical loads expressed in body frame
    let down = r.transpose() * Vector3::z();
    let fg = down * params.weight;
    let fb = -down * params.buoyancy;
    let force = fg + fb;
    let moment = params.cg.cross(&fg) + params.cb.cross(&fb);
    GeneralizedForce {
        fx: force.x,
        fy: force.y,
        fz: force.z,
        mx: moment.x,
        my: moment.y,
        mz: moment.z,
    }
}

/// A validated vehicle with its combined inertia factored once.
#[derive(Debug, Clone)]
pub struct VehicleModel {
    params: VehicleParams,
    inertia: Matrix6<f64>,
    factor: Cholesky<f64, U6>,
}

impl VehicleModel {
    pub fn new(params: VehicleParams) -> Result<Self, DynamicsError> {
        params.validate()?;
        let inertia = params.inertia_matrix();
        let rcond = reciprocal_condition(&inertia);
        if !(rcond > INERTIA_CONDITION_TOL) {
            return Err(DynamicsError::SingularInertia { rcond });
        }
        let factor =
            Cholesky::new(inertia).ok_or(DynamicsError::SingularInertia { rcond })?;
        Ok(Self {
            params,
            inertia,
            factor,
        })
    }

    pub fn params(&self) -> &VehicleParams {
        &self.params
    }

    /// Combined inertia `M_R + M_A`.
    pub fn inertia(&self) -> &Matrix6<f64> {
        &self.inertia
    }

    /// Kinetic energy `nu^T M nu / 2`.
    pub fn kinetic_energy(&self, vel: &BodyVelocity) -> f64 {
        let nu = vel.to_vector();
        0.5 * nu.dot(&(self.inertia * nu))
    }

    /// Everything on the left of the equation of motion except `M nu_dot`:
    /// `C(nu) nu + D(nu) nu + G(eta)`.
    pub fn passive_terms(&self, state: &SimState) -> Vector6<f64> {
        let nu = state.velocity.to_vector();
        let coriolis = coriolis_matrix(&self.inertia, &state.velocity) * nu;
        let damping = -damping_force(&self.params, &state.velocity).to_vector();
        let restoring = -restoring_force(&self.params, &state.pose).to_vector();
        coriolis + damping + restoring
    }

    /// Body acceleration `nu_dot = M^-1 (tau + w - C nu - D nu - G)`.
    pub fn acceleration(
        &self,
        state: &SimState,
        tau: &GeneralizedForce,
        w: &GeneralizedForce,
    ) -> Vector6<f64> {
        let rhs = tau.to_vector() + w.to_vector() - self.passive_terms(state);
        self.factor.solve(&rhs)
    }

    fn derivative(
        &self,
        pose: &Pose,
        vel: &BodyVelocity,
        tau: &GeneralizedForce,
        w: &GeneralizedForce,
    ) -> Result<(Vector6<f64>, Vector6<f64>), DynamicsError> {
        let eta_dot = kinematic_transform(pose, vel)?;
        let state = SimState {
            time: 0.0,
            pose: *pose,
            velocity: *vel,
        };
        Ok((eta_dot, self.acceleration(&state, tau, w)))
    }

    /// One classical RK4 step with `tau` and `w` held over the interval.
    pub fn step(
        &self,
        state: &SimState,
        tau: &GeneralizedForce,
        w: &GeneralizedForce,
        dt: f64,
    ) -> Result<SimState, DynamicsError> {
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(DynamicsError::InvalidStep(dt));
        }
        state.pose.check_attitude()?;
        let eta0 = state.pose.to_vector();
        let nu0 = state.velocity.to_vector();
        let stage = |eta: Vector6<f64>, nu: Vector6<f64>| {
            self.derivative(
                &Pose::from_vector(&eta),
                &BodyVelocity::from_vector(&nu),
                tau,
                w,
            )
        };
        let (ke1, kn1) = stage(eta0, nu0)?;
        let (ke2, kn2) = stage(eta0 + ke1 * (dt / 2.0), nu0 + kn1 * (dt / 2.0))?;
        let (ke3, kn3) = stage(eta0 + ke2 * (dt / 2.0), nu0 + kn2 * (dt / 2.0))?;
        let (ke4, kn4) = stage(eta0 + ke3 * dt, nu0 + kn3 * dt)?;
        let eta = eta0 + (ke1 + ke2 * 2.0 + ke3 * 2.0 + ke4) * (dt / 6.0);
        let nu = nu0 + (kn1 + kn2 * 2.0 + kn3 * 2.0 + kn4) * (dt / 6.0);
        let pose = Pose::from_vector(&eta).wrapped();
        pose.check_attitude()?;
        Ok(SimState {
            time: state.time + dt,
            pose,
            velocity: BodyVelocity::from_vector(&nu),
        })
    }
}

/// `q_dot = M^-1 (tau + w - C q - D q - G)` for a parameter set.
pub fn acceleration(
    params: &VehicleParams,
    state: &SimState,
    tau: &GeneralizedForce,
    w: &GeneralizedForce,
) -> Result<Vector6<f64>, DynamicsError> {
    Ok(VehicleModel::new(params.clone())?.acceleration(state, tau, w))
}

/// Advance `state` by `dt` with fixed-step RK4.
pub fn step(
    params: &VehicleParams,
    state: &SimState,
    tau: &GeneralizedForce,
    w: &GeneralizedForce,
    dt: f64,
) -> Result<SimState, DynamicsError> {
    VehicleModel::new(params.clone())?.step(state, tau, w, dt)
}

fn reciprocal_condition(m: &Matrix6<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} != {b} (tol {})", $tol);
        }};
    }

    fn unit_params() -> VehicleParams {
        VehicleParams {
            mass: 500.0,
            inertia: Matrix3::from_diagonal(&Vector3::new(30.0, 600.0, 600.0)),
            added_mass: Matrix6::zeros(),
            d1: Vector6::zeros(),
            d2: Vector6::zeros(),
            weight: 500.0 * GRAVITY,
            buoyancy: 500.0 * GRAVITY,
            cg: Vector3::zeros(),
            cb: Vector3::zeros(),
            length: 4.4,
            hull_diameter: 0.75,
        }
    }

    #[test]
    fn transform_identity_at_level_attitude() {
        let out = kinematic_transform(&Pose::default(), &BodyVelocity { u: 1.0, ..Default::default() })
            .unwrap();
        assert_eq!(out, Vector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn yawed_surge_maps_to_east() {
        let pose = Pose {
            psi: FRAC_PI_2,
            ..Default::default()
        };
        let out = kinematic_transform(&pose, &BodyVelocity { u: 1.0, ..Default::default() }).unwrap();
        let expected = Vector6::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        assert!((out - expected).abs().max() < 1e-15);
    }

    #[test]
    fn singular_pitch_rejected() {
        let pose = Pose {
            theta: FRAC_PI_2 - 1e-7,
            ..Default::default()
        };
        assert!(matches!(
            kinematic_transform(&pose, &BodyVelocity::default()),
            Err(DynamicsError::SingularAttitude { .. })
        ));
    }

    #[test]
    fn coriolis_zero_at_rest() {
        let m = unit_params().inertia_matrix();
        assert_eq!(coriolis_matrix(&m, &BodyVelocity::default()), Matrix6::zeros());
    }

    #[test]
    fn pure_yaw_has_no_coriolis_force() {
        let m = Matrix6::from_diagonal(&Vector6::new(500.0, 500.0, 500.0, 30.0, 600.0, 600.0));
        let vel = BodyVelocity { r: 0.7, ..Default::default() };
        let f = coriolis_matrix(&m, &vel) * vel.to_vector();
        assert_eq!(f.fixed_rows::<3>(0).abs().max(), 0.0);
    }

    #[test]
    fn damping_laws() {
        let mut p = unit_params();
        p.d1[0] = 10.0;
        let f = damping_force(&p, &BodyVelocity { u: 2.0, ..Default::default() });
        assert_eq!(f.fx, -20.0);

        let mut p = unit_params();
        p.d2[0] = 5.0;
        let f = damping_force(&p, &BodyVelocity { u: -3.0, ..Default::default() });
        assert_eq!(f.fx, 45.0);
        assert_eq!(damping_force(&p, &BodyVelocity::default()), GeneralizedForce::ZERO);
    }

    #[test]
    fn net_buoyancy_lifts() {
        let mut p = unit_params();
        p.weight = 3629.7;
        p.buoyancy = 3708.2;
        let g = restoring_force(&p, &Pose::default());
        assert_close!(g.fz, -78.5, 1e-9);
        assert_close!(g.fx, 0.0, 1e-12);
        assert_close!(g.my, 0.0, 1e-12);
    }

    #[test]
    fn righting_moment_opposes_roll() {
        let mut p = unit_params();
        p.cb = Vector3::new(0.0, 0.0, -0.05);
        let pose = Pose { phi: 0.1, ..Default::default() };
        let g = restoring_force(&p, &pose);
        assert!(g.mx < 0.0);
        assert_close!(g.mx.abs(), p.weight * 0.05 * 0.1_f64.sin(), 1e-9);
    }

    #[test]
    fn neutral_coincident_restoring_is_zero() {
        let p = unit_params();
        let pose = Pose { phi: 0.4, theta: -0.3, psi: 2.0, ..Default::default() };
        let g = restoring_force(&p, &pose).to_vector();
        assert!(g.abs().max() < 1e-9);
    }

    #[test]
    fn surge_acceleration_is_force_over_mass() {
        let model = VehicleModel::new(unit_params()).unwrap();
        let tau = GeneralizedForce { fx: 300.0, ..Default::default() };
        let acc = model.acceleration(&SimState::default(), &tau, &GeneralizedForce::ZERO);
        assert_close!(acc[0], 0.6, 1e-12);
        let acc = model.acceleration(&SimState::default(), &GeneralizedForce::ZERO, &GeneralizedForce::ZERO);
        assert_eq!(acc, Vector6::zeros());
    }

    #[test]
    fn singular_inertia_detected() {
        let mut p = unit_params();
        p.inertia = Matrix3::from_diagonal(&Vector3::new(1e-10, 600.0, 600.0));
        p.mass = 600.0;
        let err = VehicleModel::new(p).unwrap_err();
        assert!(matches!(err, DynamicsError::SingularInertia { .. }), "{err:?}");
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = unit_params();
        p.d1[2] = -1.0;
        assert!(matches!(p.validate(), Err(DynamicsError::InvalidParams(_))));
        let mut p = unit_params();
        p.mass = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let model = VehicleModel::new(unit_params()).unwrap();
        let s0 = SimState { time: 1.0, pose: Pose { z: 10.0, psi: 0.3, ..Default::default() }, ..Default::default() };
        let s1 = model.step(&s0, &GeneralizedForce::ZERO, &GeneralizedForce::ZERO, 0.005).unwrap();
        assert_eq!(s1.pose, s0.pose);
        assert_eq!(s1.velocity, s0.velocity);
        assert_close!(s1.time, 1.005, 1e-15);
    }

    #[test]
    fn step_rejects_bad_dt() {
        let model = VehicleModel::new(unit_params()).unwrap();
        for dt in [0.0, -0.01, 0.2, f64::NAN] {
            assert!(model.step(&SimState::default(), &GeneralizedForce::ZERO, &GeneralizedForce::ZERO, dt).is_err());
        }
    }

    #[test]
    fn yaw_wraps_after_step() {
        let model = VehicleModel::new(unit_params()).unwrap();
        let s0 = SimState {
            pose: Pose { psi: PI - 1e-4, ..Default::default() },
            velocity: BodyVelocity { r: 0.1, ..Default::default() },
            ..Default::default()
        };
        let s1 = model.step(&s0, &GeneralizedForce::ZERO, &GeneralizedForce::ZERO, 0.01).unwrap();
        assert!(s1.pose.psi < 0.0 && s1.pose.psi >= -PI);
    }

    #[test]
    fn wrap_pi_range() {
        assert_eq!(wrap_pi(PI), -PI);
        assert_eq!(wrap_pi(-PI), -PI);
        assert_close!(wrap_pi(3.0 * PI + 0.5), -PI + 0.5, 1e-12);
        assert_eq!(wrap_pi(0.25), 0.25);
    }
}
