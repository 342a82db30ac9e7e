//! Give the hull an initial push and let it coast: drag bleeds off surge,
//! net buoyancy lifts it, and kinetic energy only ever falls.

use auvsim::dynamics::{BodyVelocity, GeneralizedForce, Pose, SimState, VehicleModel};
use auvsim::VehicleConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = VehicleConfig::default();
    let model = VehicleModel::new(config.hull.clone())?;

    let mut state = SimState {
        pose: Pose { z: 20.0, ..Default::default() },
        velocity: BodyVelocity { u: 1.5, r: 0.2, ..Default::default() },
        ..Default::default()
    };
    let dt = 0.005;
    println!("{:>6} {:>8} {:>8} {:>8} {:>8} {:>10}", "t", "x", "depth", "u", "yaw", "energy");
    for k in 0..=4000 {
        if k % 400 == 0 {
            println!(
                "{:>6.2} {:>8.3} {:>8.3} {:>8.4} {:>8.2} {:>10.4}",
                state.time,
                state.pose.x,
                state.pose.z,
                state.velocity.u,
                state.pose.psi.to_degrees(),
                model.kinetic_energy(&state.velocity)
            );
        }
        state = model.step(&state, &GeneralizedForce::ZERO, &GeneralizedForce::ZERO, dt)?;
    }
    Ok(())
}
