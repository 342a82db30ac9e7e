//! Deterministic six degree-of-freedom underwater vehicle simulator.
//!
//! * [`dynamics`]: rigid body + added mass, Coriolis, damping and restoring
//!   terms, integrated with fixed-step RK4.
//! * [`actuation`]: thruster dead zone, thrust curve, lag and allocation.
//! * [`autopilot`]: PID heading lock with manual/automatic modes.
//! * [`sim`]: the closed loop on a 30 ms control period.
//! * [`telemetry`]: line protocol, frame log and the TCP station link.
//! * [`harness`]: scripted trials, metrics, calibration and gain comparison.
//! * [`params`]: the vehicle parameter file.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actuation;
pub mod autopilot;
pub mod dynamics;
pub mod harness;
pub mod params;
pub mod sim;
pub mod telemetry;

pub use params::VehicleConfig;
pub use sim::Simulator;
