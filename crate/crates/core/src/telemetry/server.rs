use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::bridge::bridge_connection;
use super::command::{encode_command, Command, CommandDecoder};
use super::publish::{Fanout, TelemetryPublisher};
use super::StreamConfig;
use crate::dynamics::{GeneralizedForce, Pose, SimState};
use crate::params::VehicleConfig;
use crate::sim::{SimError, Simulator, DEFAULT_DT};

/// Records queued per connection before the station counts as too slow.
pub const SUBSCRIBER_CAPACITY: usize = 512;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Config(String),
}

/// Counts from one connection's command stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntakeSummary {
    pub accepted: usize,
    pub rejected: usize,
}

/// Read command records until EOF, queueing the valid ones in arrival order.
///
/// Every record gets a reply: `ACK seq=N` or `ERR kind=K msg=...`. Bad
/// records never reach the queue.
pub fn command_intake<R: BufRead>(
    reader: R,
    queue: &Sender<Command>,
    mut reply: impl FnMut(String),
) -> io::Result<IntakeSummary> {
    let mut decoder = CommandDecoder::new();
    let mut summary = IntakeSummary::default();
    for line in reader.split(b'\n') {
        let line = line?;
        match intake_record(&mut decoder, &line, queue) {
            Intake::Blank => {}
            Intake::Accepted(r) => {
                summary.accepted += 1;
                reply(r);
            }
            Intake::Rejected(r) => {
                summary.rejected += 1;
                reply(r);
            }
            Intake::Closed(r) => {
                reply(r);
                break;
            }
        }
    }
    Ok(summary)
}

pub(crate) enum Intake {
    Blank,
    Accepted(String),
    Rejected(String),
    Closed(String),
}

/// Decode one record, queue it if valid, and build the reply line.
pub(crate) fn intake_record(decoder: &mut CommandDecoder, line: &[u8], queue: &Sender<Command>) -> Intake {
    if line.iter().all(|b| b.is_ascii_whitespace()) {
        return Intake::Blank;
    }
    match decoder.decode(line) {
        Ok(cmd) => {
            let seq = cmd.seq;
            if queue.send(cmd).is_err() {
                Intake::Closed(format!("ERR kind=Shutdown seq={seq} msg=simulation stopped\n"))
            } else {
                Intake::Accepted(format!("ACK seq={seq}\n"))
            }
        }
        Err(e) => Intake::Rejected(format!("ERR kind={} msg={}\n", e.kind(), e)),
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoopOptions {
    /// Stop once simulation time reaches this many seconds.
    pub duration: Option<f64>,
    /// Pace the loop so simulation time does not run ahead of wall time.
    pub realtime: bool,
    pub stop: Option<Arc<AtomicBool>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LoopSummary {
    pub ticks: u64,
    pub frames: u64,
    pub commands_applied: u64,
    pub sim_time: f64,
}

/// Drive the simulator: drain queued commands, run one control tick while
/// publishing every frame that comes due, repeat.
///
/// Commands are applied only at tick boundaries, in queue order.
/// `on_applied` sees the tick index and each command as it is applied.
pub fn run_loop(
    sim: &mut Simulator,
    publisher: &mut TelemetryPublisher,
    commands: &Receiver<Command>,
    opts: &LoopOptions,
    mut on_applied: impl FnMut(u64, &Command),
) -> Result<LoopSummary, ServeError> {
    let started = Instant::now();
    let t0 = sim.time();
    let mut applied = 0;
    publisher.poll(sim);
    loop {
        if opts.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed)) {
            break;
        }
        if opts.duration.is_some_and(|d| sim.time() - t0 + 1e-9 >= d) {
            break;
        }
        while let Ok(cmd) = commands.try_recv() {
            sim.apply_command(&cmd);
            applied += 1;
            on_applied(sim.ticks(), &cmd);
        }
        sim.control_tick_with(|s| publisher.poll(s))?;
        if let Some(e) = publisher.take_error() {
            return Err(e.into());
        }
        if opts.realtime {
            let target = Duration::from_secs_f64(sim.time() - t0);
            if let Some(wait) = target.checked_sub(started.elapsed()) {
                thread::sleep(wait);
            }
        }
    }
    publisher.finish()?;
    Ok(LoopSummary {
        ticks: sim.ticks(),
        frames: publisher.published(),
        commands_applied: applied,
        sim_time: sim.time(),
    })
}

/// TCP front end: every connection receives the frame stream and may send
/// commands, which land in one shared queue.
pub struct TelemetryServer {
    listener: TcpListener,
    fanout: Arc<Fanout>,
    queue_tx: Sender<Command>,
    queue_rx: Receiver<Command>,
    stop: Arc<AtomicBool>,
}

impl TelemetryServer {
    pub fn bind(addr: &str) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let (queue_tx, queue_rx) = channel();
        Ok(Self {
            listener,
            fanout: Fanout::new(),
            queue_tx,
            queue_rx,
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn fanout(&self) -> &Arc<Fanout> {
        &self.fanout
    }

    pub fn stop_flag(&self) -> Arc<AtomicBool> {
        self.stop.clone()
    }

    /// Accept connections in the background until the stop flag is set.
    pub fn spawn_acceptor(&self) -> io::Result<JoinHandle<()>> {
        let listener = self.listener.try_clone()?;
        listener.set_nonblocking(true)?;
        let fanout = self.fanout.clone();
        let queue = self.queue_tx.clone();
        let stop = self.stop.clone();
        Ok(thread::spawn(move || {
            while !stop.load(Ordering::Relaxed) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        if let Err(e) = handle_connection(stream, &fanout, queue.clone()) {
                            eprintln!("connection setup failed: {e}");
                        }
                    }
                    Err(e) if e.kind() == io::ErrorKind::WouldBlock => {
                        thread::sleep(Duration::from_millis(5));
                    }
                    Err(e) => {
                        eprintln!("accept failed: {e}");
                        thread::sleep(Duration::from_millis(50));
                    }
                }
            }
        }))
    }

    /// Accept browser stations over WebSocket on `addr`, carrying the same
    /// records as the plain socket (one record per text message).
    pub fn spawn_bridge(&self, addr: &str) -> io::Result<(SocketAddr, JoinHandle<()>)> {
        let listener = TcpListener::bind(addr)?;
        let local = listener.local_addr()?;
        listener.set_nonblocking(true)?;
        let fanout = self.fanout.clone();
        let queue = self.queue_tx.clone();
        let stop = self.stop.clone();
        let handle = thread::spawn(move || {
            while !stop.load(Ordering::Relaxed) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let (fanout, queue) = (fanout.clone(), queue.clone());
                        thread::spawn(move || {
                            if let Err(e) = bridge_connection(stream, &fanout, queue) {
                                eprintln!("bridge connection failed: {e}");
                            }
                        });
                    }
                    Err(e) if e.kind() == io::ErrorKind::WouldBlock => {
                        thread::sleep(Duration::from_millis(5));
                    }
                    Err(e) => {
                        eprintln!("bridge accept failed: {e}");
                        thread::sleep(Duration::from_millis(50));
                    }
                }
            }
        });
        Ok((local, handle))
    }

    /// Run the simulation loop against this server's queue and fan-out.
    pub fn run(
        &self,
        sim: &mut Simulator,
        publisher: &mut TelemetryPublisher,
        opts: &LoopOptions,
        on_applied: impl FnMut(u64, &Command),
    ) -> Result<LoopSummary, ServeError> {
        let opts = LoopOptions {
            stop: opts.stop.clone().or_else(|| Some(self.stop.clone())),
            ..opts.clone()
        };
        run_loop(sim, publisher, &self.queue_rx, &opts, on_applied)
    }

    /// Stop the loop and acceptor and disconnect every station.
    pub fn shutdown(&self) {
        self.stop.store(true, Ordering::Relaxed);
        self.fanout.clear();
    }
}

fn handle_connection(stream: TcpStream, fanout: &Arc<Fanout>, queue: Sender<Command>) -> io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    let reader = stream.try_clone()?;
    let mut writer = BufWriter::new(stream);
    let (id, tx, rx) = fanout.subscribe(SUBSCRIBER_CAPACITY);
    let watch = fanout.clone();
    thread::spawn(move || {
        loop {
            let record = match rx.recv_timeout(Duration::from_millis(50)) {
                Ok(r) => r,
                Err(RecvTimeoutError::Timeout) if watch.is_subscribed(id) => continue,
                // dropped from the fan-out (too slow, or shutting down)
                Err(_) => break,
            };
            if writer.write_all(record.as_bytes()).is_err() {
                break;
            }
            let mut failed = false;
            while let Ok(more) = rx.try_recv() {
                if writer.write_all(more.as_bytes()).is_err() {
                    failed = true;
                    break;
                }
            }
            if failed || writer.flush().is_err() {
                break;
            }
        }
        let _ = writer.flush();
        let _ = writer.get_ref().shutdown(std::net::Shutdown::Both);
    });
    let fanout = fanout.clone();
    thread::spawn(move || {
        let _ = command_intake(BufReader::new(reader), &queue, |r| {
            let _ = tx.try_send(r.into());
        });
        fanout.unsubscribe(id);
    });
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub stream: StreamConfig,
    /// WebSocket endpoint for browser stations, if any.
    pub bridge: Option<String>,
    pub realtime: bool,
    pub duration: Option<f64>,
    pub frame_log: Option<PathBuf>,
    pub command_log: Option<PathBuf>,
    pub initial_depth: f64,
    pub initial_heading_deg: f64,
    pub disturbance_yaw_moment: f64,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            stream: StreamConfig::default(),
            bridge: None,
            realtime: true,
            duration: None,
            frame_log: Some(PathBuf::from("telemetry.csv")),
            command_log: None,
            initial_depth: 20.0,
            initial_heading_deg: 0.0,
            disturbance_yaw_moment: 0.0,
        }
    }
}

impl ServeOptions {
    /// The simulator a live run starts from.
    pub fn simulator(&self, config: VehicleConfig) -> Result<Simulator, SimError> {
        let initial = SimState {
            pose: Pose {
                z: self.initial_depth,
                psi: self.initial_heading_deg.to_radians(),
                ..Default::default()
            },
            ..Default::default()
        };
        Ok(Simulator::new(config, initial, DEFAULT_DT)?
            .with_disturbance(GeneralizedForce::yaw_moment(self.disturbance_yaw_moment)))
    }
}

/// Bind, accept stations and run the live simulator until `duration`
/// (or forever).
pub fn serve(config: VehicleConfig, opts: &ServeOptions) -> Result<LoopSummary, ServeError> {
    opts.stream.validate().map_err(ServeError::Config)?;
    let server = TelemetryServer::bind(&opts.stream.listen)?;
    eprintln!("listening on {}", server.local_addr()?);
    let mut sim = opts.simulator(config)?;
    let mut publisher = TelemetryPublisher::new(opts.stream.rate_hz, server.fanout().clone());
    if let Some(path) = &opts.frame_log {
        publisher = publisher.with_log(Box::new(BufWriter::new(File::create(path)?)))?;
    }
    let mut command_log = match &opts.command_log {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };
    let acceptor = server.spawn_acceptor()?;
    let bridge = match &opts.bridge {
        Some(addr) => {
            let (local, handle) = server.spawn_bridge(addr)?;
            eprintln!("browser bridge on ws://{local}");
            Some(handle)
        }
        None => None,
    };
    let loop_opts = LoopOptions {
        duration: opts.duration,
        realtime: opts.realtime,
        stop: None,
    };
    let result = server.run(&mut sim, &mut publisher, &loop_opts, |tick, cmd| {
        if let Some(log) = command_log.as_mut() {
            let _ = write!(log, "tick={tick} {}", encode_command(cmd));
        }
    });
    server.shutdown();
    let _ = acceptor.join();
    if let Some(b) = bridge {
        let _ = b.join();
    }
    if let Some(mut log) = command_log {
        log.flush()?;
    }
    result
}
