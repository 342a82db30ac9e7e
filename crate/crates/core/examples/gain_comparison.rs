//! Calibrate the yaw disturbance so kp = 5 settles 8 degrees off, then run
//! a gain sweep under that disturbance.

use auvsim::autopilot::PidGains;
use auvsim::harness::{calibrate_disturbance, closed_form_sse, compare_gains, TrialConfig};
use auvsim::VehicleConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vehicle = VehicleConfig::default();
    let base = TrialConfig { duration: 90.0, error_band: 10.0, ..TrialConfig::default() };

    let cal = calibrate_disturbance(&vehicle, &base, 5.0, 8.0)?;
    println!(
        "disturbance {:.3} N m after {} trials (static balance says {:.3})",
        cal.moment,
        cal.trials,
        cal.closed_form_moment.unwrap_or(f64::NAN)
    );

    let base = TrialConfig { disturbance_yaw_moment: cal.moment, ..base };
    let gains: Vec<_> = [5.0, 2.5, 10.0, 20.0].map(PidGains::proportional).into();
    let report = compare_gains(&vehicle, &base, &gains)?;
    print!("{}", report.summary());
    for row in &report.rows {
        let predicted = closed_form_sse(&vehicle, cal.moment, row.gains.kp).unwrap_or(f64::NAN);
        println!("kp {:>4}: predicted steady error {predicted:.3} deg", row.gains.kp);
    }
    if let Some(dir) = std::env::args().nth(1) {
        for p in report.write_dir(dir.as_ref())? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}
