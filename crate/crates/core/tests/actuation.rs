mod common;

use nalgebra::Vector3;
use proptest::prelude::*;

use auvsim::actuation::{
    allocate, steady_thrust, thruster_step, ActuationError, AllocationMatrix, ControlVector,
    ThrusterMount, ThrusterParams, ThrusterState, MAX_TOTAL_SURGE,
};
use auvsim::VehicleConfig;

#[test]
fn lag_reaches_63_percent_at_one_time_constant() {
    let p = ThrusterParams::default();
    let target = steady_thrust(&p, 0.9).unwrap();
    let mut s = ThrusterState::default();
    let dt = 0.005;
    let steps = (p.time_constant / dt).round() as usize;
    for _ in 0..steps {
        s = thruster_step(&s, &p, 0.9, dt).unwrap();
    }
    let frac = s.thrust / target;
    assert!((frac - (1.0 - (-1.0f64).exp())).abs() < 0.01, "{frac}");
    for _ in 0..4 * steps {
        s = thruster_step(&s, &p, 0.9, dt).unwrap();
    }
    assert!((s.thrust - target).abs() / target < 0.01);
    for _ in 0..10 * steps {
        s = thruster_step(&s, &p, 0.9, dt).unwrap();
    }
    assert!((s.thrust - target).abs() / target < 1e-3);
}

#[test]
fn shipped_allocation_matches_geometry() {
    let cfg = VehicleConfig::default();
    let from_geometry = AllocationMatrix::from_mounts(cfg.allocation.mounts().to_vec()).unwrap();
    assert!((from_geometry.entries() - cfg.allocation.entries()).abs().max() < 1e-12);
    assert_eq!(cfg.allocation.row(0), vec![1.0, 1.0, 1.0]);
    assert_eq!(cfg.allocation.full_forward_surge(cfg.thruster.max_thrust), MAX_TOTAL_SURGE);
}

#[test]
fn angled_thruster_splits_force() {
    let b = AllocationMatrix::from_mounts(vec![ThrusterMount {
        position: Vector3::new(1.0, 0.0, 0.0),
        axis: Vector3::new(1.0, 1.0, 0.0),
    }])
    .unwrap();
    let tau = allocate(&b, &ControlVector(vec![2f64.sqrt()])).unwrap();
    assert!((tau.fx - 1.0).abs() < 1e-12 && (tau.fy - 1.0).abs() < 1e-12);
    assert!((tau.mz - 1.0).abs() < 1e-12);
}

#[test]
fn wrong_width_is_rejected() {
    let b = VehicleConfig::default().allocation;
    assert_eq!(
        allocate(&b, &ControlVector(vec![1.0; 2])),
        Err(ActuationError::DimensionMismatch { expected: 3, got: 2 })
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn curve_is_odd_and_monotone(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let p = ThrusterParams::default();
        let (ta, tb) = (steady_thrust(&p, a).unwrap(), steady_thrust(&p, b).unwrap());
        prop_assert_eq!(steady_thrust(&p, -a).unwrap(), -ta);
        if a <= b {
            prop_assert!(ta <= tb);
        }
        prop_assert!(ta.abs() <= p.max_thrust);
    }

    #[test]
    fn dead_zone_is_exactly_flat(c in -0.05..=0.05f64) {
        prop_assert_eq!(steady_thrust(&ThrusterParams::default(), c).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_commands_rejected(c in 1.0000001..10.0f64) {
        let p = ThrusterParams::default();
        prop_assert!(matches!(steady_thrust(&p, c), Err(ActuationError::CommandOutOfRange(_))));
        prop_assert!(steady_thrust(&p, -c).is_err());
    }

    #[test]
    fn inverse_curve_round_trips(t in -300.0..=300.0f64) {
        let p = ThrusterParams::default();
        let c = p.command_for_thrust(t).unwrap();
        prop_assert!((steady_thrust(&p, c).unwrap() - t).abs() < 1e-9);
    }

    #[test]
    fn lagged_thrust_stays_between_old_and_target(
        cmds in prop::collection::vec(-1.0..=1.0f64, 1..50),
        dt in 0.001..0.1f64,
    ) {
        let p = ThrusterParams::default();
        let mut s = ThrusterState::default();
        for c in cmds {
            let target = steady_thrust(&p, c).unwrap();
            let next = thruster_step(&s, &p, c, dt).unwrap();
            let (lo, hi) = if s.thrust <= target { (s.thrust, target) } else { (target, s.thrust) };
            prop_assert!(next.thrust >= lo - 1e-12 && next.thrust <= hi + 1e-12);
            prop_assert!(next.rpm.abs() <= p.max_rpm);
            prop_assert_eq!(next.rpm.signum() * next.thrust.signum() >= 0.0, true);
            s = next;
        }
    }

    #[test]
    fn allocation_is_linear(
        u in prop::array::uniform3(-300.0..300.0f64),
        v in prop::array::uniform3(-300.0..300.0f64),
        k in -2.0..2.0f64,
    ) {
        let b = VehicleConfig::default().allocation;
        let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + k * b).collect();
        let lhs = allocate(&b, &ControlVector(combo)).unwrap().to_vector();
        let rhs = allocate(&b, &ControlVector(u.to_vec())).unwrap().to_vector()
            + allocate(&b, &ControlVector(v.to_vec())).unwrap().to_vector() * k;
        prop_assert!((lhs - rhs).abs().max() < 1e-9);
    }
}
