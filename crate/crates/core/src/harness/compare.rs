use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::thread;

use crate::autopilot::PidGains;
use crate::params::VehicleConfig;

use super::{compute_metrics, run_trial, HarnessError, TrialConfig, TrialMetrics, TrialRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub gains: PidGains,
    pub metrics: TrialMetrics,
    /// `time_to_band` minus that of the first row.
    pub time_to_band_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub error_band: f64,
    pub disturbance_yaw_moment: f64,
    pub rows: Vec<ComparisonRow>,
    pub records: Vec<TrialRecord>,
}

/// Run one trial per gain set with everything else held fixed.
pub fn compare_gains(
    vehicle: &VehicleConfig,
    base: &TrialConfig,
    gains: &[PidGains],
) -> Result<ComparisonReport, HarnessError> {
    if gains.len() < 2 {
        return Err(HarnessError::InvalidConfig("need at least two gain settings".into()));
    }
    let records: Vec<Result<TrialRecord, HarnessError>> = thread::scope(|scope| {
        let handles: Vec<_> = gains
            .iter()
            .map(|g| {
                let cfg = TrialConfig { gains: *g, ..base.clone() };
                scope.spawn(move || run_trial(vehicle, &cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("trial thread panicked"))
            .collect()
    });
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    let metrics = records
        .iter()
        .map(|r| compute_metrics(r, base.error_band))
        .collect::<Result<Vec<_>, _>>()?;
    let reference = metrics[0].time_to_band;
    let rows = gains
        .iter()
        .zip(&metrics)
        .map(|(g, m)| ComparisonRow {
            gains: *g,
            metrics: *m,
            time_to_band_delta: m.time_to_band - reference,
        })
        .collect();
    Ok(ComparisonReport {
        error_band: base.error_band,
        disturbance_yaw_moment: base.disturbance_yaw_moment,
        rows,
        records,
    })
}

impl ComparisonReport {
    pub fn write_metrics_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "kp",
            "ki",
            "kd",
            "time_to_band",
            "settling_time",
            "steady_state_error",
            "overshoot_count",
            "time_to_band_delta",
        ])
        .map_err(io::Error::other)?;
        for r in &self.rows {
            w.write_record([
                r.gains.kp.to_string(),
                r.gains.ki.to_string(),
                r.gains.kd.to_string(),
                r.metrics.time_to_band.to_string(),
                r.metrics.settling_time.to_string(),
                r.metrics.steady_state_error.to_string(),
                r.metrics.overshoot_count.to_string(),
                r.time_to_band_delta.to_string(),
            ])
            .map_err(io::Error::other)?;
        }
        w.flush()
    }

    /// `metrics.csv` plus one `heading_<i>_kp<kp>.csv` per trial.
    pub fn write_dir(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let metrics = dir.join("metrics.csv");
        self.write_metrics_csv(BufWriter::new(File::create(&metrics)?))?;
        written.push(metrics);
        for (i, (row, record)) in self.rows.iter().zip(&self.records).enumerate() {
            let path = dir.join(format!("heading_{i}_kp{}.csv", row.gains.kp));
            record.write_csv(BufWriter::new(File::create(&path)?))?;
            written.push(path);
        }
        Ok(written)
    }

    /// Human-readable table.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "band {} deg, disturbance {:.3} N m\n{:>8} {:>12} {:>12} {:>10} {:>10} {:>10}\n",
            self.error_band,
            self.disturbance_yaw_moment,
            "kp",
            "to_band_s",
            "settle_s",
            "sse_deg",
            "crossings",
            "delta_s"
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:>8} {:>12.3} {:>12.3} {:>10.3} {:>10} {:>10.3}\n",
                r.gains.kp,
                r.metrics.time_to_band,
                r.metrics.settling_time,
                r.metrics.steady_state_error,
                r.metrics.overshoot_count,
                r.time_to_band_delta
            ));
        }
        s
    }
}
