//! Live TCP server with an in-process station: the station engages heading
//! lock over the socket and watches the yaw channel come round.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::thread;

use auvsim::dynamics::SimState;
use auvsim::telemetry::{
    decode_frame, encode_command, Command, CommandKind, LoopOptions, TelemetryPublisher,
    TelemetryServer,
};
use auvsim::{Simulator, VehicleConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let server = TelemetryServer::bind("127.0.0.1:0")?;
    let addr = server.local_addr()?;
    let acceptor = server.spawn_acceptor()?;
    println!("listening on {addr}");

    let station = thread::spawn(move || -> std::io::Result<()> {
        let mut stream = TcpStream::connect(addr)?;
        let reader = BufReader::new(stream.try_clone()?);
        let engage = Command {
            seq: 1,
            kind: CommandKind::Engage { setpoint: 90.0, kp: 8.0, ki: 0.0, kd: 0.0 },
        };
        stream.write_all(encode_command(&engage).as_bytes())?;
        for line in reader.lines() {
            let line = line?;
            match decode_frame(&line) {
                Ok(f) if f.timestamp_ms % 1000 == 0 => {
                    println!("t {:>5} ms  yaw {:>7.2}  rpm {:?}", f.timestamp_ms, f.yaw, f.thruster_rpm)
                }
                Ok(_) => {}
                Err(_) => println!("reply: {line}"),
            }
        }
        Ok(())
    });

    let mut sim = Simulator::new(VehicleConfig::default(), SimState::default(), 0.005)?;
    let mut publisher = TelemetryPublisher::new(35.0, server.fanout().clone());
    let opts = LoopOptions { duration: Some(20.0), realtime: true, stop: None };
    // give the station a moment to connect before the clock starts
    thread::sleep(std::time::Duration::from_millis(100));
    let summary = server.run(&mut sim, &mut publisher, &opts, |_, _| {})?;
    server.shutdown();
    acceptor.join().ok();
    println!("{summary:?}");
    drop(publisher);
    let _ = station.join();
    Ok(())
}
