//! Vehicle parameter files.
//!
//! Flat `key = value` text, one entry per line, `#` comments. Vectors and
//! matrices are comma-separated, matrices row-major. Unknown keys are an
//! error so typos do not silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::actuation::{ActuationError, AllocationMatrix, ThrusterMount, ThrusterParams};
use crate::dynamics::{DynamicsError, VehicleParams};

/// The shipped parameter set.
pub const DEFAULT_PARAMS: &str = include_str!("../data/default.params");

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{key}`: expected {expected} values, got {got}")]
    Arity { key: String, expected: usize, got: usize },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Actuation(#[from] ActuationError),
    #[error("allocation: {0}")]
    Allocation(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Everything needed to simulate one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleConfig {
    pub hull: VehicleParams,
    pub thruster: ThrusterParams,
    pub allocation: AllocationMatrix,
    /// Water depth under the vehicle, m; altitude = lakebed_depth - depth.
    pub lakebed_depth: f64,
    /// Reported supply voltage, V.
    pub supply_voltage: f64,
    /// Hull pitching-moment coefficient, kept for reference only.
    pub reference_moment_coefficient: Option<f64>,
}

impl Default for VehicleConfig {
    fn default() -> Self {
        Self::parse(DEFAULT_PARAMS).expect("shipped parameter file is valid")
    }
}

/// Diagonal added mass as fractions of the rigid-body diagonal.
pub fn diagonal_added_mass(
    mass: f64,
    inertia: &Matrix3<f64>,
    linear_fraction: f64,
    angular_fraction: f64,
) -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(
        linear_fraction * mass,
        linear_fraction * mass,
        linear_fraction * mass,
        angular_fraction * inertia[(0, 0)],
        angular_fraction * inertia[(1, 1)],
        angular_fraction * inertia[(2, 2)],
    ))
}

struct Entries {
    map: BTreeMap<String, (usize, Vec<f64>)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<Vec<f64>> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn vec(&mut self, key: &str, n: usize) -> Result<Vec<f64>, ParamsError> {
        let v = self.take(key).ok_or_else(|| ParamsError::Missing(key.into()))?;
        if v.len() != n {
            return Err(ParamsError::Arity { key: key.into(), expected: n, got: v.len() });
        }
        Ok(v)
    }

    fn scalar(&mut self, key: &str) -> Result<f64, ParamsError> {
        Ok(self.vec(key, 1)?[0])
    }

    fn scalar_or(&mut self, key: &str, default: f64) -> Result<f64, ParamsError> {
        if self.map.contains_key(key) {
            self.scalar(key)
        } else {
            Ok(default)
        }
    }

    fn vector3(&mut self, key: &str) -> Result<Vector3<f64>, ParamsError> {
        Ok(Vector3::from_column_slice(&self.vec(key, 3)?))
    }

    fn vector6(&mut self, key: &str) -> Result<Vector6<f64>, ParamsError> {
        Ok(Vector6::from_column_slice(&self.vec(key, 6)?))
    }
}

fn parse_entries(text: &str) -> Result<Entries, ParamsError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ParamsError::Syntax {
            line: line_no,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ParamsError::Syntax { line: line_no, msg: "empty key".into() });
        }
        let values = value
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ParamsError::Syntax {
                        line: line_no,
                        msg: format!("`{s}` is not a finite number"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some((first, _)) = map.insert(key.to_string(), (line_no, values)) {
            return Err(ParamsError::Syntax {
                line: line_no,
                msg: format!("duplicate key `{key}` (first on line {first})"),
            });
        }
    }
    Ok(Entries { map })
}

impl VehicleConfig {
    pub fn parse(text: &str) -> Result<Self, ParamsError> {
        let mut e = parse_entries(text)?;
        let mass = e.scalar("mass")?;
        let inertia = Matrix3::from_row_slice(&e.vec("inertia", 9)?);
        let added_mass = match e.take("added_mass") {
            Some(v) if v.len() == 36 => Matrix6::from_row_slice(&v),
            Some(v) => {
                return Err(ParamsError::Arity { key: "added_mass".into(), expected: 36, got: v.len() })
            }
            None => {
                let lin = e.scalar_or("added_mass_linear_fraction", 0.1)?;
                let ang = e.scalar_or("added_mass_angular_fraction", 0.1)?;
                diagonal_added_mass(mass, &inertia, lin, ang)
            }
        };
        let hull = VehicleParams {
            mass,
            inertia,
            added_mass,
            d1: e.vector6("d1")?,
            d2: e.vector6("d2")?,
            weight: e.scalar("weight")?,
            buoyancy: e.scalar("buoyancy")?,
            cg: e.vector3("cg")?,
            cb: e.vector3("cb")?,
            length: e.scalar("length")?,
            hull_diameter: e.scalar("hull_diameter")?,
        };
        hull.validate()?;

        let thruster = ThrusterParams {
            max_thrust: e.scalar("thruster_max_thrust")?,
            dead_zone: e.scalar("thruster_dead_zone")?,
            time_constant: e.scalar("thruster_time_constant")?,
            curve_exponent: e.scalar("thruster_curve_exponent")?,
            max_rpm: e.scalar("thruster_max_rpm")?,
        };
        thruster.validate()?;

        let count = e.scalar("thruster_count")?;
        if !(count >= 1.0 && count.fract() == 0.0) {
            return Err(ParamsError::Allocation(format!("thruster_count {count} is not a positive integer")));
        }
        let count = count as usize;
        let mut mounts = Vec::with_capacity(count);
        for i in 0..count {
            mounts.push(ThrusterMount {
                position: e.vector3(&format!("thruster_{i}_position"))?,
                axis: e.vector3(&format!("thruster_{i}_axis"))?,
            });
        }
        let mut rows: [Vec<f64>; 6] = Default::default();
        for (i, row) in rows.iter_mut().enumerate() {
            *row = e.vec(&format!("allocation_row_{i}"), count)?;
        }
        let allocation = AllocationMatrix::from_rows(&rows, mounts)?;
        let surge = allocation.full_forward_surge(thruster.max_thrust);
        if surge > crate::actuation::MAX_TOTAL_SURGE + 1e-9 {
            return Err(ParamsError::Allocation(format!(
                "full forward command gives {surge} N of surge, above {} N",
                crate::actuation::MAX_TOTAL_SURGE
            )));
        }

        let lakebed_depth = e.scalar_or("lakebed_depth", 50.0)?;
        let supply_voltage = e.scalar_or("supply_voltage", 150.0)?;
        let reference_moment_coefficient = match e.take("reference_moment_coefficient") {
            Some(v) if v.len() == 1 => Some(v[0]),
            Some(v) => {
                return Err(ParamsError::Arity {
                    key: "reference_moment_coefficient".into(),
                    expected: 1,
                    got: v.len(),
                })
            }
            None => None,
        };

        if let Some((key, (line, _))) = e.map.into_iter().next() {
            return Err(ParamsError::Syntax { line, msg: format!("unknown key `{key}`") });
        }
        Ok(Self {
            hull,
            thruster,
            allocation,
            lakebed_depth,
            supply_voltage,
            reference_moment_coefficient,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ParamsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ParamsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Canonical text form; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        fn join<'a>(v: impl IntoIterator<Item = &'a f64>) -> String {
            v.into_iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
        }
        let h = &self.hull;
        let row_major = |m: &Matrix6<f64>| join(m.transpose().iter());
        let mut s = String::new();
        let _ = writeln!(s, "mass = {:?}", h.mass);
        let _ = writeln!(s, "inertia = {}", join(h.inertia.transpose().iter()));
        let _ = writeln!(s, "added_mass = {}", row_major(&h.added_mass));
        let _ = writeln!(s, "d1 = {}", join(h.d1.iter()));
        let _ = writeln!(s, "d2 = {}", join(h.d2.iter()));
        let _ = writeln!(s, "weight = {:?}", h.weight);
        let _ = writeln!(s, "buoyancy = {:?}", h.buoyancy);
        let _ = writeln!(s, "cg = {}", join(h.cg.iter()));
        let _ = writeln!(s, "cb = {}", join(h.cb.iter()));
        let _ = writeln!(s, "length = {:?}", h.length);
        let _ = writeln!(s, "hull_diameter = {:?}", h.hull_diameter);
        let t = &self.thruster;
        let _ = writeln!(s, "thruster_max_thrust = {:?}", t.max_thrust);
        let _ = writeln!(s, "thruster_dead_zone = {:?}", t.dead_zone);
        let _ = writeln!(s, "thruster_time_constant = {:?}", t.time_constant);
        let _ = writeln!(s, "thruster_curve_exponent = {:?}", t.curve_exponent);
        let _ = writeln!(s, "thruster_max_rpm = {:?}", t.max_rpm);
        let _ = writeln!(s, "thruster_count = {}", self.allocation.thruster_count());
        for (i, m) in self.allocation.mounts().iter().enumerate() {
            let _ = writeln!(s, "thruster_{i}_position = {}", join(m.position.iter()));
            let _ = writeln!(s, "thruster_{i}_axis = {}", join(m.axis.iter()));
        }
        for i in 0..6 {
            let _ = writeln!(s, "allocation_row_{i} = {}", join(self.allocation.row(i).iter()));
        }
        let _ = writeln!(s, "lakebed_depth = {:?}", self.lakebed_depth);
        let _ = writeln!(s, "supply_voltage = {:?}", self.supply_voltage);
        if let Some(cm) = self.reference_moment_coefficient {
            let _ = writeln!(s, "reference_moment_coefficient = {cm:?}");
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_file_parses() {
        let cfg = VehicleConfig::default();
        assert_eq!(cfg.hull.mass, 370.0);
        assert_eq!(cfg.thruster.max_thrust, 300.0);
        assert_eq!(cfg.allocation.thruster_count(), 3);
        assert_eq!(cfg.allocation.full_forward_surge(300.0), 900.0);
        assert_eq!(cfg.supply_voltage, 150.0);
    }

    #[test]
    fn canonical_text_round_trips() {
        let cfg = VehicleConfig::default();
        let again = VehicleConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.fingerprint(), cfg.fingerprint());
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{}\nmas = 1\n", VehicleConfig::default().to_text());
        let err = VehicleConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("unknown key `mas`"), "{err}");
    }

    #[test]
    fn duplicate_and_garbage_rejected() {
        let base = VehicleConfig::default().to_text();
        assert!(VehicleConfig::parse(&format!("{base}mass = 2\n")).is_err());
        assert!(VehicleConfig::parse(&base.replace("mass = 370.0", "mass = heavy")).is_err());
        assert!(VehicleConfig::parse(&base.replace("mass = 370.0", "mass 370")).is_err());
    }

    #[test]
    fn missing_key_reported() {
        let text: String = VehicleConfig::default()
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("d2 "))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(VehicleConfig::parse(&text), Err(ParamsError::Missing(k)) if k == "d2"));
    }

    #[test]
    fn surge_bound_enforced() {
        let text = VehicleConfig::default()
            .to_text()
            .replace("thruster_max_thrust = 300.0", "thruster_max_thrust = 400.0");
        assert!(matches!(VehicleConfig::parse(&text), Err(ParamsError::Allocation(_))));
    }

    #[test]
    fn added_mass_fractions() {
        let text: String = VehicleConfig::default()
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("added_mass"))
            .map(|l| format!("{l}\n"))
            .collect();
        let cfg = VehicleConfig::parse(&format!("{text}added_mass_linear_fraction = 0.2\n")).unwrap();
        assert!((cfg.hull.added_mass[(0, 0)] - 74.0).abs() < 1e-12);
        assert!((cfg.hull.added_mass[(5, 5)] - 0.1 * cfg.hull.inertia[(2, 2)]).abs() < 1e-12);
    }
}
