//! WebSocket carriage of the line protocol for browser stations.

use std::io;
use std::net::TcpStream;
use std::sync::mpsc::{Sender, TryRecvError};
use std::sync::Arc;
use std::time::Duration;

use tungstenite::{Error as WsError, Message};

use super::command::{Command, CommandDecoder};
use super::publish::Fanout;
use super::server::{intake_record, Intake, SUBSCRIBER_CAPACITY};

const POLL: Duration = Duration::from_millis(10);

fn would_block(e: &WsError) -> bool {
    matches!(e, WsError::Io(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut))
}

fn text(record: &str) -> Message {
    Message::Text(record.trim_end_matches('\n').to_owned())
}

pub(crate) fn bridge_connection(stream: TcpStream, fanout: &Arc<Fanout>, queue: Sender<Command>) -> io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let mut ws = tungstenite::accept(stream).map_err(io::Error::other)?;
    ws.get_ref().set_read_timeout(Some(POLL))?;

    let (id, _tx, rx) = fanout.subscribe(SUBSCRIBER_CAPACITY);
    let mut decoder = CommandDecoder::new();
    'conn: loop {
        loop {
            match rx.try_recv() {
                Ok(record) => {
                    if ws.write(text(&record)).is_err() {
                        break 'conn;
                    }
                }
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => break 'conn,
            }
        }
        match ws.flush() {
            Ok(()) => {}
            Err(e) if would_block(&e) => {}
            Err(_) => break,
        }
        if !fanout.is_subscribed(id) {
            break;
        }
        match ws.read() {
            Ok(Message::Text(body)) => {
                for line in body.lines() {
                    let reply = match intake_record(&mut decoder, line.as_bytes(), &queue) {
                        Intake::Blank => continue,
                        Intake::Accepted(r) | Intake::Rejected(r) => r,
                        Intake::Closed(r) => {
                            let _ = ws.send(text(&r));
                            break 'conn;
                        }
                    };
                    if ws.write(text(&reply)).is_err() {
                        break 'conn;
                    }
                }
            }
            Ok(Message::Close(_)) => break,
            Ok(_) => {}
            Err(e) if would_block(&e) => {}
            Err(_) => break,
        }
    }
    fanout.unsubscribe(id);
    let _ = ws.close(None);
    let _ = ws.flush();
    Ok(())
}
