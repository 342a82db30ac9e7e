use std::fmt::Write as _;

use super::frame::THRUSTER_CHANNELS;
use super::ProtocolError;

/// Operator commands. Records start with the variant name followed by
/// `seq=` and the variant's fields in a fixed order:
///
/// ```text
/// SetManualThrust seq=1 thrust=0.3,0.3,0.3
/// Engage seq=2 setpoint=120 kp=5 ki=0 kd=0
/// Disengage seq=3
/// SetGains seq=4 kp=10 ki=0 kd=0
/// SetCruiseThrust seq=5 thrust=0.3
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum CommandKind {
    SetManualThrust([f64; THRUSTER_CHANNELS]),
    Engage { setpoint: f64, kp: f64, ki: f64, kd: f64 },
    Disengage,
    SetGains { kp: f64, ki: f64, kd: f64 },
    SetCruiseThrust(f64),
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SetManualThrust(_) => "SetManualThrust",
            Self::Engage { .. } => "Engage",
            Self::Disengage => "Disengage",
            Self::SetGains { .. } => "SetGains",
            Self::SetCruiseThrust(_) => "SetCruiseThrust",
        }
    }

    fn check_ranges(&self) -> Result<(), String> {
        let gain = |name: &str, g: f64| {
            if g >= 0.0 && g.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} = {g} must be finite and non-negative"))
            }
        };
        match *self {
            Self::SetManualThrust(t) => {
                if let Some(bad) = t.iter().find(|c| !(c.abs() <= 1.0)) {
                    return Err(format!("thrust {bad} outside [-1, 1]"));
                }
            }
            Self::Engage { setpoint, kp, ki, kd } => {
                if !(0.0..360.0).contains(&setpoint) {
                    return Err(format!("setpoint {setpoint} outside [0, 360)"));
                }
                gain("kp", kp)?;
                gain("ki", ki)?;
                gain("kd", kd)?;
            }
            Self::SetGains { kp, ki, kd } => {
                gain("kp", kp)?;
                gain("ki", ki)?;
                gain("kd", kd)?;
            }
            Self::SetCruiseThrust(c) => {
                if !(0.0..=1.0).contains(&c) {
                    return Err(format!("cruise thrust {c} outside [0, 1]"));
                }
            }
            Self::Disengage => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub seq: u64,
    pub kind: CommandKind,
}

pub fn encode_command(cmd: &Command) -> String {
    let mut s = format!("{} seq={}", cmd.kind.name(), cmd.seq);
    let _ = match &cmd.kind {
        CommandKind::SetManualThrust(t) => write!(s, " thrust={},{},{}", t[0], t[1], t[2]),
        CommandKind::Engage { setpoint, kp, ki, kd } => {
            write!(s, " setpoint={setpoint} kp={kp} ki={ki} kd={kd}")
        }
        CommandKind::Disengage => Ok(()),
        CommandKind::SetGains { kp, ki, kd } => write!(s, " kp={kp} ki={ki} kd={kd}"),
        CommandKind::SetCruiseThrust(c) => write!(s, " thrust={c}"),
    };
    s.push('\n');
    s
}

struct Fields<'a> {
    parts: std::str::Split<'a, char>,
}

impl<'a> Fields<'a> {
    fn raw(&mut self, key: &str) -> Result<&'a str, ProtocolError> {
        let field = self
            .parts
            .next()
            .ok_or_else(|| ProtocolError::MalformedCommand(format!("missing field `{key}`")))?;
        match field.split_once('=') {
            Some((k, v)) if k == key => Ok(v),
            _ => Err(ProtocolError::MalformedCommand(format!(
                "expected `{key}=...`, found `{field}`"
            ))),
        }
    }

    fn num(&mut self, key: &str) -> Result<f64, ProtocolError> {
        let v = self.raw(key)?;
        parse_num(v)
    }

    fn finish(mut self) -> Result<(), ProtocolError> {
        match self.parts.next() {
            Some(extra) => Err(ProtocolError::MalformedCommand(format!(
                "unexpected trailing field `{extra}`"
            ))),
            None => Ok(()),
        }
    }
}

fn parse_num(v: &str) -> Result<f64, ProtocolError> {
    v.parse::<f64>()
        .map_err(|_| ProtocolError::MalformedCommand(format!("`{v}` is not a number")))
}

/// Parse and range-check one command record. Sequence ordering is checked
/// by [`CommandDecoder`].
pub fn decode_command(bytes: &[u8]) -> Result<Command, ProtocolError> {
    let line = std::str::from_utf8(bytes)
        .map_err(|_| ProtocolError::MalformedCommand("record is not UTF-8".into()))?
        .trim_end_matches(['\n', '\r']);
    let mut parts = line.split(' ');
    let name = parts.next().unwrap_or("");
    let mut f = Fields { parts };
    let seq_raw = f.raw("seq")?;
    let seq = seq_raw
        .parse::<u64>()
        .map_err(|_| ProtocolError::MalformedCommand(format!("bad seq `{seq_raw}`")))?;
    let kind = match name {
        "SetManualThrust" => {
            let raw = f.raw("thrust")?;
            let vals: Vec<f64> = raw.split(',').map(parse_num).collect::<Result<_, _>>()?;
            let t: [f64; THRUSTER_CHANNELS] = vals.try_into().map_err(|_| {
                ProtocolError::MalformedCommand(format!("expected {THRUSTER_CHANNELS} thrust values"))
            })?;
            CommandKind::SetManualThrust(t)
        }
        "Engage" => CommandKind::Engage {
            setpoint: f.num("setpoint")?,
            kp: f.num("kp")?,
            ki: f.num("ki")?,
            kd: f.num("kd")?,
        },
        "Disengage" => CommandKind::Disengage,
        "SetGains" => CommandKind::SetGains {
            kp: f.num("kp")?,
            ki: f.num("ki")?,
            kd: f.num("kd")?,
        },
        "SetCruiseThrust" => CommandKind::SetCruiseThrust(f.num("thrust")?),
        other => {
            return Err(ProtocolError::MalformedCommand(format!("unknown command `{other}`")))
        }
    };
    f.finish()?;
    kind.check_ranges().map_err(|m| ProtocolError::RangeViolation { seq, msg: m })?;
    Ok(Command { seq, kind })
}

/// Per-connection decoder enforcing strictly increasing sequence numbers.
/// Only accepted commands advance the sequence.
#[derive(Debug, Default)]
pub struct CommandDecoder {
    last_seq: Option<u64>,
}

impl CommandDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decode(&mut self, bytes: &[u8]) -> Result<Command, ProtocolError> {
        let cmd = decode_command(bytes)?;
        if let Some(last) = self.last_seq {
            if cmd.seq <= last {
                return Err(ProtocolError::StaleSequence { seq: cmd.seq, last });
            }
        }
        self.last_seq = Some(cmd.seq);
        Ok(cmd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engage_record() {
        let cmd = decode_command(b"Engage seq=7 setpoint=120 kp=5 ki=0 kd=0\n").unwrap();
        assert_eq!(
            cmd,
            Command {
                seq: 7,
                kind: CommandKind::Engage { setpoint: 120.0, kp: 5.0, ki: 0.0, kd: 0.0 }
            }
        );
        assert_eq!(encode_command(&cmd), "Engage seq=7 setpoint=120 kp=5 ki=0 kd=0\n");
    }

    #[test]
    fn range_violation() {
        let err = decode_command(b"SetManualThrust seq=1 thrust=1.5,0,0").unwrap_err();
        assert!(matches!(err, ProtocolError::RangeViolation { seq: 1, .. }), "{err:?}");
        assert!(matches!(
            decode_command(b"SetCruiseThrust seq=1 thrust=-0.1"),
            Err(ProtocolError::RangeViolation { .. })
        ));
        assert!(matches!(
            decode_command(b"SetGains seq=1 kp=-1 ki=0 kd=0"),
            Err(ProtocolError::RangeViolation { .. })
        ));
        assert!(matches!(
            decode_command(b"Engage seq=1 setpoint=360 kp=1 ki=0 kd=0"),
            Err(ProtocolError::RangeViolation { .. })
        ));
    }

    #[test]
    fn stale_sequence() {
        let mut d = CommandDecoder::new();
        d.decode(b"Disengage seq=3").unwrap();
        assert_eq!(
            d.decode(b"Disengage seq=3").unwrap_err(),
            ProtocolError::StaleSequence { seq: 3, last: 3 }
        );
        assert!(d.decode(b"Disengage seq=2").is_err());
        d.decode(b"Disengage seq=4").unwrap();
    }

    #[test]
    fn rejected_command_does_not_advance_sequence() {
        let mut d = CommandDecoder::new();
        assert!(d.decode(b"SetCruiseThrust seq=5 thrust=2").is_err());
        d.decode(b"SetCruiseThrust seq=5 thrust=0.5").unwrap();
    }

    #[test]
    fn malformed_records() {
        for bad in [
            &b"Launch seq=1"[..],
            b"Disengage",
            b"Disengage seq=x",
            b"Disengage seq=1 extra=2",
            b"Engage seq=1 kp=5 setpoint=120 ki=0 kd=0",
            b"SetManualThrust seq=1 thrust=0.1,0.2",
            b"SetCruiseThrust seq=1 thrust=fast",
            b"\xff\xfe",
            b"",
        ] {
            assert!(
                matches!(decode_command(bad), Err(ProtocolError::MalformedCommand(_))),
                "{:?}",
                String::from_utf8_lossy(bad)
            );
        }
    }
}
