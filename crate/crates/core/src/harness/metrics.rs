use super::{HarnessError, TrialRecord};

/// Heading-lock performance figures, all measured from the engage instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    /// Start of the final stay inside the error band; `INFINITY` if the run
    /// ends outside it.
    pub settling_time: f64,
    /// Mean absolute error over the final 20 % of samples, degrees.
    pub steady_state_error: f64,
    /// Number of times the heading crosses the setpoint.
    pub overshoot_count: usize,
    /// First entry into the error band; `INFINITY` if never.
    pub time_to_band: f64,
}

/// Fraction of the run, counted from the end, averaged for the steady error.
pub const STEADY_STATE_WINDOW: f64 = 0.2;

/// Metrics of a `(time, error)` series. Times are taken relative to the first
/// sample.
pub fn metrics_from_series(series: &[(f64, f64)], error_band: f64) -> Result<TrialMetrics, HarnessError> {
    let (t0, _) = *series.first().ok_or(HarnessError::EmptyRecord)?;
    let outside = |e: f64| !(e.abs() <= error_band);

    let time_to_band = series
        .iter()
        .find(|(_, e)| !outside(*e))
        .map_or(f64::INFINITY, |(t, _)| t - t0);

    let settling_time = match series.iter().rposition(|(_, e)| outside(*e)) {
        None => 0.0,
        Some(i) if i + 1 == series.len() => f64::INFINITY,
        Some(i) => series[i + 1].0 - t0,
    };

    let n = series.len();
    let start = ((n as f64) * (1.0 - STEADY_STATE_WINDOW)).floor() as usize;
    let start = start.min(n - 1);
    let tail = &series[start..];
    let steady_state_error = tail.iter().map(|(_, e)| e.abs()).sum::<f64>() / tail.len() as f64;

    let mut overshoot_count = 0;
    let mut last_sign = 0.0;
    for &(_, e) in series {
        if e == 0.0 || e.is_nan() {
            continue;
        }
        let sign = e.signum();
        if last_sign != 0.0 && sign != last_sign {
            overshoot_count += 1;
        }
        last_sign = sign;
    }

    Ok(TrialMetrics {
        settling_time,
        steady_state_error,
        overshoot_count,
        time_to_band,
    })
}

/// Metrics of a completed trial.
pub fn compute_metrics(record: &TrialRecord, error_band: f64) -> Result<TrialMetrics, HarnessError> {
    if let Some(reason) = &record.failure {
        return Err(HarnessError::InvalidRecord(reason.clone()));
    }
    let series: Vec<(f64, f64)> = record.samples.iter().map(|s| (s.t, s.error)).collect();
    metrics_from_series(&series, error_band)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error() {
        let series: Vec<_> = (0..100).map(|i| (i as f64 * 0.03, 0.0)).collect();
        let m = metrics_from_series(&series, 2.0).unwrap();
        assert_eq!(m.settling_time, 0.0);
        assert_eq!(m.time_to_band, 0.0);
        assert_eq!(m.steady_state_error, 0.0);
        assert_eq!(m.overshoot_count, 0);
    }

    #[test]
    fn never_enters_band() {
        let series: Vec<_> = (0..10).map(|i| (i as f64, 5.0)).collect();
        let m = metrics_from_series(&series, 2.0).unwrap();
        assert!(m.settling_time.is_infinite());
        assert!(m.time_to_band.is_infinite());
        assert_eq!(m.steady_state_error, 5.0);
    }

    #[test]
    fn empty() {
        assert!(matches!(metrics_from_series(&[], 2.0), Err(HarnessError::EmptyRecord)));
    }

    #[test]
    fn settling_after_exit() {
        // enters at t=1, leaves at t=2, back for good at t=3
        let series = [(0.0, 5.0), (1.0, 1.0), (2.0, -3.0), (3.0, -1.0), (4.0, 0.5)];
        let m = metrics_from_series(&series, 2.0).unwrap();
        assert_eq!(m.time_to_band, 1.0);
        assert_eq!(m.settling_time, 3.0);
        assert_eq!(m.overshoot_count, 2);
    }

    #[test]
    fn time_offset_is_removed() {
        let series = [(10.0, 5.0), (10.5, 1.0)];
        assert_eq!(metrics_from_series(&series, 2.0).unwrap().time_to_band, 0.5);
    }
}
