//! One scripted heading-lock trial with its response metrics.
//!
//! `cargo run --example heading_trial -- 10 trial.csv` runs at kp = 10 and
//! writes the samples.

use std::fs::File;
use std::io::BufWriter;

use auvsim::harness::{compute_metrics, run_trial, TrialConfig};
use auvsim::VehicleConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let kp: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5.0);
    let out = args.next();

    let vehicle = VehicleConfig::default();
    let cfg = TrialConfig {
        disturbance_yaw_moment: 30.0,
        error_band: 10.0,
        ..TrialConfig::default().with_kp(kp)
    };
    let record = run_trial(&vehicle, &cfg)?;
    for s in record.samples.iter().step_by(150) {
        println!("t {:>6.2}  yaw {:>7.2}  error {:>7.2}  cmd {:?}", s.t, s.yaw, s.error, s.commands);
    }
    let m = compute_metrics(&record, cfg.error_band)?;
    println!("{m:#?}");
    if let Some(path) = out {
        record.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("wrote {path}");
    }
    Ok(())
}
