use std::fmt::Write as _;
use std::io;

use super::ProtocolError;

pub const LEAK_SENSORS: usize = 8;
pub const THRUSTER_CHANNELS: usize = 3;

/// One sample of the vehicle's telemetry channel set.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryFrame {
    pub timestamp_ms: u64,
    /// Degrees in `[-180, 180)`.
    pub roll: f64,
    /// Degrees in `[-180, 180)`.
    pub pitch: f64,
    /// Degrees in `[0, 360)`.
    pub yaw: f64,
    pub depth: f64,
    pub altitude: f64,
    /// Metres, or -1 when nothing is in range.
    pub obstacle_range: f64,
    pub thruster_rpm: [i32; THRUSTER_CHANNELS],
    pub leak: [bool; LEAK_SENSORS],
    pub voltage: f64,
}

/// CSV header of the frame log, in field order.
pub const LOG_HEADER: [&str; 19] = [
    "timestamp_ms",
    "roll",
    "pitch",
    "yaw",
    "depth",
    "altitude",
    "obstacle_range",
    "rpm_1",
    "rpm_2",
    "rpm_3",
    "leak_1",
    "leak_2",
    "leak_3",
    "leak_4",
    "leak_5",
    "leak_6",
    "leak_7",
    "leak_8",
    "voltage",
];

impl TelemetryFrame {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |m: String| Err(ProtocolError::MalformedFrame(m));
        for (name, v) in [
            ("depth", self.depth),
            ("altitude", self.altitude),
            ("obstacle", self.obstacle_range),
            ("volt", self.voltage),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} is not finite"));
            }
        }
        for (name, v) in [("roll", self.roll), ("pitch", self.pitch)] {
            if !(-180.0..180.0).contains(&v) {
                return bad(format!("{name} {v} outside [-180, 180)"));
            }
        }
        if !(0.0..360.0).contains(&self.yaw) {
            return bad(format!("yaw {} outside [0, 360)", self.yaw));
        }
        Ok(())
    }

    /// Log row values in column order.
    pub fn log_fields(&self) -> Vec<String> {
        let mut out = vec![
            self.timestamp_ms.to_string(),
            self.roll.to_string(),
            self.pitch.to_string(),
            self.yaw.to_string(),
            self.depth.to_string(),
            self.altitude.to_string(),
            self.obstacle_range.to_string(),
        ];
        out.extend(self.thruster_rpm.iter().map(|r| r.to_string()));
        out.extend(self.leak.iter().map(|&l| u8::from(l).to_string()));
        out.push(self.voltage.to_string());
        out
    }
}

/// One newline-terminated record:
///
/// ```text
/// FRAME t=1000 roll=0 pitch=0 yaw=90 depth=20 alt=30 obstacle=-1 rpm=0,0,0 leak=00000000 volt=150
/// ```
pub fn encode_frame(f: &TelemetryFrame) -> String {
    let mut s = String::with_capacity(128);
    let _ = write!(
        s,
        "FRAME t={} roll={} pitch={} yaw={} depth={} alt={} obstacle={} rpm={},{},{} leak=",
        f.timestamp_ms,
        f.roll,
        f.pitch,
        f.yaw,
        f.depth,
        f.altitude,
        f.obstacle_range,
        f.thruster_rpm[0],
        f.thruster_rpm[1],
        f.thruster_rpm[2],
    );
    for &l in &f.leak {
        s.push(if l { '1' } else { '0' });
    }
    let _ = writeln!(s, " volt={}", f.voltage);
    s
}

const FRAME_KEYS: [&str; 10] = [
    "t", "roll", "pitch", "yaw", "depth", "alt", "obstacle", "rpm", "leak", "volt",
];

pub fn decode_frame(line: &str) -> Result<TelemetryFrame, ProtocolError> {
    let malformed = |m: String| ProtocolError::MalformedFrame(m);
    let mut parts = line.trim_end_matches(['\n', '\r']).split(' ');
    if parts.next() != Some("FRAME") {
        return Err(malformed("record does not start with FRAME".into()));
    }
    let mut values = Vec::with_capacity(FRAME_KEYS.len());
    for key in FRAME_KEYS {
        let field = parts.next().ok_or_else(|| malformed(format!("missing field `{key}`")))?;
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| malformed(format!("field `{field}` is not key=value")))?;
        if k != key {
            return Err(malformed(format!("expected `{key}`, found `{k}`")));
        }
        values.push(v);
    }
    if let Some(extra) = parts.next() {
        return Err(malformed(format!("unexpected trailing field `{extra}`")));
    }
    let num = |i: usize| -> Result<f64, ProtocolError> {
        values[i]
            .parse::<f64>()
            .map_err(|_| malformed(format!("`{}` is not a number", values[i])))
    };
    let timestamp_ms = values[0]
        .parse::<u64>()
        .map_err(|_| malformed(format!("bad timestamp `{}`", values[0])))?;
    let rpm: Vec<i32> = values[7]
        .split(',')
        .map(|r| r.parse::<i32>().map_err(|_| malformed(format!("bad rpm `{r}`"))))
        .collect::<Result<_, _>>()?;
    let thruster_rpm: [i32; THRUSTER_CHANNELS] = rpm
        .try_into()
        .map_err(|_| malformed(format!("expected {THRUSTER_CHANNELS} rpm values")))?;
    let leak_chars: Vec<char> = values[8].chars().collect();
    if leak_chars.len() != LEAK_SENSORS || leak_chars.iter().any(|c| *c != '0' && *c != '1') {
        return Err(malformed(format!("bad leak field `{}`", values[8])));
    }
    let mut leak = [false; LEAK_SENSORS];
    for (slot, c) in leak.iter_mut().zip(leak_chars) {
        *slot = c == '1';
    }
    let frame = TelemetryFrame {
        timestamp_ms,
        roll: num(1)?,
        pitch: num(2)?,
        yaw: num(3)?,
        depth: num(4)?,
        altitude: num(5)?,
        obstacle_range: num(6)?,
        thruster_rpm,
        leak,
        voltage: num(9)?,
    };
    frame.validate()?;
    Ok(frame)
}

/// CSV frame log: one header row, one row per frame.
pub struct FrameLog<W: io::Write> {
    writer: csv::Writer<W>,
    rows: u64,
}

impl<W: io::Write> FrameLog<W> {
    pub fn new(inner: W) -> io::Result<Self> {
        let mut writer = csv::Writer::from_writer(inner);
        writer
            .write_record(LOG_HEADER)
            .map_err(io::Error::other)?;
        Ok(Self { writer, rows: 0 })
    }

    pub fn append(&mut self, frame: &TelemetryFrame) -> io::Result<()> {
        self.writer.write_record(frame.log_fields()).map_err(io::Error::other)?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.writer.flush()
    }

    pub fn into_inner(self) -> io::Result<W> {
        self.writer.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_frame() -> TelemetryFrame {
        TelemetryFrame {
            timestamp_ms: 0,
            roll: 0.0,
            pitch: 0.0,
            yaw: 0.0,
            depth: 0.0,
            altitude: 0.0,
            obstacle_range: -1.0,
            thruster_rpm: [0; 3],
            leak: [false; 8],
            voltage: 150.0,
        }
    }

    #[test]
    fn zero_attitude_literal() {
        assert_eq!(
            encode_frame(&zero_frame()),
            "FRAME t=0 roll=0 pitch=0 yaw=0 depth=0 alt=0 obstacle=-1 rpm=0,0,0 leak=00000000 volt=150\n"
        );
    }

    #[test]
    fn round_trip() {
        let mut f = zero_frame();
        f.timestamp_ms = 28571;
        f.roll = -3.25;
        f.yaw = 359.999;
        f.thruster_rpm = [1200, -40, 2999];
        f.leak[3] = true;
        assert_eq!(decode_frame(&encode_frame(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_out_of_range_and_reordered() {
        let good = encode_frame(&zero_frame());
        assert!(decode_frame(&good.replace("yaw=0", "yaw=360")).is_err());
        assert!(decode_frame(&good.replace("roll=0 pitch=0", "pitch=0 roll=0")).is_err());
        assert!(decode_frame(&good.replace("leak=00000000", "leak=0000000")).is_err());
        assert!(decode_frame(&good.replace("rpm=0,0,0", "rpm=0,0")).is_err());
        assert!(decode_frame("TELEMETRY t=0").is_err());
    }

    #[test]
    fn log_has_header_and_rows() {
        let mut log = FrameLog::new(Vec::new()).unwrap();
        log.append(&zero_frame()).unwrap();
        let text = String::from_utf8(log.into_inner().unwrap()).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("timestamp_ms,roll,pitch,yaw,depth,altitude,obstacle_range,rpm_1"));
        assert!(header.ends_with("leak_8,voltage"));
        assert_eq!(lines.next().unwrap(), "0,0,0,0,0,0,-1,0,0,0,0,0,0,0,0,0,0,0,150");
    }
}
