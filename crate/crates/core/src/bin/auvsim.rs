use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use auvsim::autopilot::PidGains;
use auvsim::harness::{
    calibrate_disturbance, compare_gains, compute_metrics, run_trial, HarnessError, TrialConfig,
};
use auvsim::telemetry::{serve, ServeError, ServeOptions, StreamConfig};
use auvsim::VehicleConfig;

#[derive(Parser)]
#[command(name = "auvsim", version, about = "Underwater vehicle heading-lock simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct ParamsArg {
    /// Vehicle parameter file (defaults to the built-in set).
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
}

impl ParamsArg {
    fn load(&self) -> Result<VehicleConfig, HarnessError> {
        Ok(match &self.params {
            Some(p) => VehicleConfig::load(p)?,
            None => VehicleConfig::default(),
        })
    }
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, default_value_t = 120.0, value_name = "DEG")]
    setpoint: f64,
    /// Cruise thrust in percent.
    #[arg(long, default_value_t = 30.0, value_name = "PCT")]
    cruise: f64,
    /// Recorded seconds after engage.
    #[arg(long, default_value_t = 60.0, value_name = "S")]
    duration: f64,
    #[arg(long, default_value_t = 5.0, value_name = "S")]
    warmup: f64,
    /// Starting heading relative to the setpoint.
    #[arg(long, default_value_t = 60.0, value_name = "DEG")]
    offset: f64,
    /// Constant yaw disturbance.
    #[arg(long, default_value_t = 0.0, value_name = "NM", allow_negative_numbers = true)]
    disturbance: f64,
}

impl ScenarioArgs {
    fn trial(&self, gains: PidGains, band: f64) -> TrialConfig {
        TrialConfig {
            cruise_thrust: self.cruise / 100.0,
            warmup_seconds: self.warmup,
            heading_setpoint: self.setpoint,
            initial_offset: self.offset,
            gains,
            disturbance_yaw_moment: self.disturbance,
            duration: self.duration,
            error_band: band,
            ..TrialConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Live simulator streaming telemetry and accepting station commands.
    Serve {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, env = "AUVSIM_LISTEN", default_value = "127.0.0.1:7700", value_name = "HOST:PORT")]
        listen: String,
        /// Also accept browser stations over WebSocket here.
        #[arg(long, env = "AUVSIM_BRIDGE", value_name = "HOST:PORT")]
        bridge: Option<String>,
        #[arg(long, env = "AUVSIM_RATE", default_value_t = 35.0, value_name = "HZ")]
        rate: f64,
        /// Pace the simulation to wall-clock time.
        #[arg(long, env = "AUVSIM_REALTIME")]
        realtime: bool,
        /// Stop after this much simulated time.
        #[arg(long, value_name = "S")]
        duration: Option<f64>,
        #[arg(long, default_value = "telemetry.csv", value_name = "CSV")]
        log: PathBuf,
        /// Record applied commands with their tick index.
        #[arg(long, value_name = "FILE")]
        command_log: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, value_name = "NM", allow_negative_numbers = true)]
        disturbance: f64,
    },
    /// Run one scripted heading-lock trial.
    Trial {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 5.0)]
        kp: f64,
        #[arg(long, default_value_t = 0.0)]
        ki: f64,
        #[arg(long, default_value_t = 0.0)]
        kd: f64,
        #[arg(long, default_value_t = 2.0, value_name = "DEG")]
        band: f64,
        /// Sample CSV (stdout when omitted).
        #[arg(long, value_name = "CSV")]
        out: Option<PathBuf>,
    },
    /// Find the yaw disturbance that yields a target steady error.
    Calibrate {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, default_value_t = 8.0, value_name = "DEG")]
        target_sse: f64,
        #[arg(long, default_value_t = 5.0)]
        kp: f64,
        #[arg(long, default_value_t = 90.0, value_name = "S")]
        duration: f64,
    },
    /// Run the same scenario at several proportional gains.
    Compare {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_delimiter = ',', default_value = "5,10")]
        kp_list: Vec<f64>,
        #[arg(long, default_value_t = 10.0, value_name = "DEG")]
        band: f64,
        /// Calibrate the disturbance to this steady error at the first gain
        /// instead of using --disturbance.
        #[arg(long, value_name = "DEG")]
        calibrate_sse: Option<f64>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Self { kind: e.kind(), message: e.to_string() }
    }
}

impl From<ServeError> for Failure {
    fn from(e: ServeError) -> Self {
        let kind = match e {
            ServeError::Sim(_) => "Simulation",
            ServeError::Io(_) => "Io",
            ServeError::Config(_) => "InvalidConfig",
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self { kind: "Io", message: e.to_string() }
    }
}

fn fmt_metric(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3}")
    } else {
        "inf".into()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Serve { params, listen, bridge, rate, realtime, duration, log, command_log, disturbance } => {
            let vehicle = params.load()?;
            let opts = ServeOptions {
                stream: StreamConfig { rate_hz: rate, listen },
                bridge,
                realtime,
                duration,
                frame_log: Some(log),
                command_log,
                disturbance_yaw_moment: disturbance,
                ..ServeOptions::default()
            };
            let summary = serve(vehicle, &opts)?;
            eprintln!(
                "ran {:.3} s: {} ticks, {} frames, {} commands",
                summary.sim_time, summary.ticks, summary.frames, summary.commands_applied
            );
        }
        Cmd::Trial { params, scenario, kp, ki, kd, band, out } => {
            let vehicle = params.load()?;
            let cfg = scenario.trial(PidGains { kp, ki, kd }, band);
            let record = run_trial(&vehicle, &cfg)?;
            match &out {
                Some(path) => record.write_csv(BufWriter::new(File::create(path)?))?,
                None => record.write_csv(io::stdout().lock())?,
            }
            let m = compute_metrics(&record, band)?;
            eprintln!(
                "time_to_band={} settling_time={} steady_state_error={:.3} overshoot_count={}",
                fmt_metric(m.time_to_band),
                fmt_metric(m.settling_time),
                m.steady_state_error,
                m.overshoot_count
            );
        }
        Cmd::Calibrate { params, target_sse, kp, duration } => {
            let vehicle = params.load()?;
            let base = TrialConfig { duration, ..TrialConfig::default() };
            let cal = calibrate_disturbance(&vehicle, &base, kp, target_sse)?;
            println!("disturbance_yaw_moment={}", cal.moment);
            println!("measured_sse={:.4}", cal.measured_sse);
            if let Some(m) = cal.closed_form_moment {
                println!("closed_form_moment={m}");
            }
            println!("trials={}", cal.trials);
        }
        Cmd::Compare { params, scenario, kp_list, band, calibrate_sse, out } => {
            let vehicle = params.load()?;
            let gains: Vec<PidGains> = kp_list.iter().map(|&k| PidGains::proportional(k)).collect();
            let mut base = scenario.trial(gains.first().copied().unwrap_or_default(), band);
            if let Some(target) = calibrate_sse {
                let cal = calibrate_disturbance(&vehicle, &base, gains[0].kp, target)?;
                base.disturbance_yaw_moment = cal.moment;
            }
            let report = compare_gains(&vehicle, &base, &gains)?;
            report.write_dir(&out)?;
            let mut stdout = io::stdout().lock();
            stdout.write_all(report.summary().as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let message = f.message.replace('"', "'");
            eprintln!("error kind={} message=\"{message}\"", f.kind);
            ExitCode::FAILURE
        }
    }
}
