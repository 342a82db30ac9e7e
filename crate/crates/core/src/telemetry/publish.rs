use std::io;
use std::sync::mpsc::{sync_channel, Receiver, SyncSender, TrySendError};
use std::sync::{Arc, Mutex};

use super::frame::{encode_frame, FrameLog, TelemetryFrame};
use crate::sim::Simulator;

/// Frame schedule on the simulation clock: frame `k` is due at `k / rate`
/// seconds and carries that instant, rounded to milliseconds, as its stamp.
#[derive(Debug, Clone)]
pub struct FrameClock {
    rate_hz: f64,
    next: u64,
}

impl FrameClock {
    pub fn new(rate_hz: f64) -> Self {
        Self { rate_hz, next: 0 }
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    /// Scheduled time of the next frame, s.
    pub fn next_due(&self) -> f64 {
        self.next as f64 / self.rate_hz
    }

    /// Timestamp of the next frame if it is due at `sim_time`.
    pub fn poll(&mut self, sim_time: f64) -> Option<u64> {
        // tolerance absorbs accumulated float error in the substep clock
        if sim_time + 1e-9 >= self.next_due() {
            let ts = (self.next as f64 * 1000.0 / self.rate_hz).round() as u64;
            self.next += 1;
            Some(ts)
        } else {
            None
        }
    }
}

/// Bounded per-subscriber queues of encoded records. A subscriber whose
/// queue is full or whose receiver is gone is dropped.
#[derive(Debug, Default)]
pub struct Fanout {
    subscribers: Mutex<Vec<(u64, SyncSender<Arc<str>>)>>,
    next_id: Mutex<u64>,
}

impl Fanout {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    /// Register a subscriber. The returned sender may also be used to queue
    /// replies on the same connection.
    pub fn subscribe(&self, capacity: usize) -> (u64, SyncSender<Arc<str>>, Receiver<Arc<str>>) {
        let (tx, rx) = sync_channel(capacity.max(1));
        let id = {
            let mut n = self.next_id.lock().expect("fanout id lock");
            *n += 1;
            *n
        };
        self.subscribers.lock().expect("fanout lock").push((id, tx.clone()));
        (id, tx, rx)
    }

    pub fn unsubscribe(&self, id: u64) {
        self.subscribers.lock().expect("fanout lock").retain(|(i, _)| *i != id);
    }

    pub fn is_subscribed(&self, id: u64) -> bool {
        self.subscribers.lock().expect("fanout lock").iter().any(|(i, _)| *i == id)
    }

    /// Drop every subscriber.
    pub fn clear(&self) {
        self.subscribers.lock().expect("fanout lock").clear();
    }

    pub fn subscriber_count(&self) -> usize {
        self.subscribers.lock().expect("fanout lock").len()
    }

    /// Send one record to everyone; returns how many subscribers were dropped.
    pub fn broadcast(&self, record: Arc<str>) -> usize {
        let mut subs = self.subscribers.lock().expect("fanout lock");
        let before = subs.len();
        subs.retain(|(_, tx)| match tx.try_send(record.clone()) {
            Ok(()) => true,
            Err(TrySendError::Full(_)) | Err(TrySendError::Disconnected(_)) => false,
        });
        before - subs.len()
    }
}

/// Samples the simulator on its frame clock, fans frames out and logs them.
pub struct TelemetryPublisher {
    clock: FrameClock,
    fanout: Arc<Fanout>,
    log: Option<FrameLog<Box<dyn io::Write + Send>>>,
    published: u64,
    dropped: usize,
    error: Option<io::Error>,
}

impl TelemetryPublisher {
    pub fn new(rate_hz: f64, fanout: Arc<Fanout>) -> Self {
        Self {
            clock: FrameClock::new(rate_hz),
            fanout,
            log: None,
            published: 0,
            dropped: 0,
            error: None,
        }
    }

    pub fn with_log(mut self, sink: Box<dyn io::Write + Send>) -> io::Result<Self> {
        self.log = Some(FrameLog::new(sink)?);
        Ok(self)
    }

    pub fn fanout(&self) -> &Arc<Fanout> {
        &self.fanout
    }

    pub fn published(&self) -> u64 {
        self.published
    }

    /// Subscribers disconnected for falling behind or hanging up.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn publish(&mut self, frame: &TelemetryFrame) -> io::Result<()> {
        let record: Arc<str> = encode_frame(frame).into();
        self.dropped += self.fanout.broadcast(record);
        if let Some(log) = self.log.as_mut() {
            log.append(frame)?;
        }
        self.published += 1;
        Ok(())
    }

    /// Emit every frame that has come due by the simulator's current time.
    pub fn poll(&mut self, sim: &Simulator) {
        while let Some(ts) = self.clock.poll(sim.time()) {
            if let Err(e) = self.publish(&sim.frame(ts)) {
                self.error.get_or_insert(e);
            }
        }
    }

    /// First log error seen by [`poll`](Self::poll), if any.
    pub fn take_error(&mut self) -> Option<io::Error> {
        self.error.take()
    }

    pub fn finish(&mut self) -> io::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        if let Some(log) = self.log.as_mut() {
            log.flush()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_spacing() {
        let mut c = FrameClock::new(35.0);
        let mut stamps = Vec::new();
        let mut t = 0.0;
        for i in 0..=2000 {
            t = i as f64 * 0.005;
            while let Some(ts) = c.poll(t) {
                stamps.push(ts);
            }
        }
        assert!((t - 10.0).abs() < 1e-9);
        assert_eq!(stamps.len(), 351);
        assert!(stamps.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(stamps[35], 1000);
    }

    #[test]
    fn slow_subscriber_dropped() {
        let fan = Fanout::new();
        let (_, _tx, _rx) = fan.subscribe(2);
        for _ in 0..2 {
            assert_eq!(fan.broadcast("x\n".into()), 0);
        }
        assert_eq!(fan.broadcast("x\n".into()), 1);
        assert_eq!(fan.subscriber_count(), 0);
    }

    #[test]
    fn hung_up_subscriber_dropped() {
        let fan = Fanout::new();
        let (_, tx, rx) = fan.subscribe(8);
        drop(rx);
        drop(tx);
        assert_eq!(fan.broadcast("x\n".into()), 1);
    }
}
