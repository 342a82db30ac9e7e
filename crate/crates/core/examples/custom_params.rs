//! Load the default parameter set, change a few values and run a trial on
//! the modified vehicle.

use auvsim::harness::{compute_metrics, run_trial, TrialConfig};
use auvsim::params::DEFAULT_PARAMS;
use auvsim::VehicleConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stock = VehicleConfig::default();
    let heavier = DEFAULT_PARAMS
        .replace("thruster_time_constant = 0.2", "thruster_time_constant = 0.6")
        .replace("thruster_dead_zone = 0.05", "thruster_dead_zone = 0.15");
    let slow = VehicleConfig::parse(&heavier)?;
    println!("stock {}\nslow  {}", stock.fingerprint(), slow.fingerprint());

    let cfg = TrialConfig { error_band: 5.0, ..TrialConfig::default() };
    for (name, v) in [("stock", &stock), ("slow", &slow)] {
        let m = compute_metrics(&run_trial(v, &cfg)?, cfg.error_band)?;
        println!(
            "{name:>5}: to band {:.2} s, settle {:.2} s, steady {:.3} deg, crossings {}",
            m.time_to_band, m.settling_time, m.steady_state_error, m.overshoot_count
        );
    }
    Ok(())
}
