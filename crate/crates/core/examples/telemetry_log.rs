//! Headless run of the live loop: a scripted station queues commands, the
//! loop applies them between ticks and logs every 35 Hz frame to CSV.

use std::fs::File;
use std::io::BufWriter;
use std::sync::mpsc::channel;

use auvsim::dynamics::{Pose, SimState};
use auvsim::telemetry::{
    encode_command, run_loop, Command, CommandKind, Fanout, LoopOptions, TelemetryPublisher,
    DEFAULT_RATE_HZ,
};
use auvsim::{Simulator, VehicleConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "telemetry.csv".into());
    let initial = SimState { pose: Pose { z: 10.0, ..Default::default() }, ..Default::default() };
    let mut sim = Simulator::new(VehicleConfig::default(), initial, 0.005)?;

    let fanout = Fanout::new();
    let (_id, _tx, frames) = fanout.subscribe(1024);
    let mut publisher = TelemetryPublisher::new(DEFAULT_RATE_HZ, fanout)
        .with_log(Box::new(BufWriter::new(File::create(&path)?)))?;

    let (queue, commands) = channel();
    for (seq, kind) in [
        CommandKind::SetManualThrust([0.3, 0.3, 0.3]),
        CommandKind::Engage { setpoint: 45.0, kp: 5.0, ki: 0.0, kd: 0.0 },
    ]
    .into_iter()
    .enumerate()
    {
        queue.send(Command { seq: seq as u64 + 1, kind })?;
    }

    let opts = LoopOptions { duration: Some(10.0), ..LoopOptions::default() };
    let summary = run_loop(&mut sim, &mut publisher, &commands, &opts, |tick, cmd| {
        print!("tick {tick:>4}: {}", encode_command(cmd));
    })?;
    println!("{summary:?}");

    let received: Vec<_> = frames.try_iter().collect();
    println!("first: {}", received[0].trim_end());
    println!("last:  {}", received[received.len() - 1].trim_end());
    println!("log: {path}");
    Ok(())
}
