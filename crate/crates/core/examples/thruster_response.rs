//! The thrust curve with its dead zone, and the first-order lag of a single
//! thruster following a step command.

use auvsim::actuation::{allocate, steady_thrust, thruster_step, ControlVector, ThrusterState};
use auvsim::VehicleConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = VehicleConfig::default();
    let p = config.thruster;

    println!("steady curve");
    for cmd in [-1.0, -0.5, -0.05, 0.0, 0.04, 0.1, 0.3, 0.5, 0.75, 1.0] {
        println!("  cmd {cmd:>5.2} -> {:>8.2} N", steady_thrust(&p, cmd)?);
    }

    println!("step to 0.8 (tau = {} s)", p.time_constant);
    let mut s = ThrusterState::default();
    let dt = 0.005;
    for k in 1..=300 {
        s = thruster_step(&s, &p, 0.8, dt)?;
        if k % 40 == 0 {
            println!("  t {:>5.2}  thrust {:>7.2} N  rpm {:>6.0}", k as f64 * dt, s.thrust, s.rpm);
        }
    }

    let u = ControlVector(vec![150.0, 100.0, -100.0]);
    let tau = allocate(&config.allocation, &u)?;
    println!("u = {:?} N -> surge {} N, yaw {} N m", u.0, tau.fx, tau.mz);
    Ok(())
}
