//! Trajectory-constrained phase balancing of unicycle agents.
//!
//! Agents move at unit speed and steer with u_k = κ(1 + ζ_k), where ζ_k
//! combines a barrier term that confines each agent within distance δ of
//! a circular or elliptical orbit and a phase-coupling term that spreads
//! the swarm evenly along it. Curve phases come from arc length, which
//! for the ellipse is an incomplete elliptic integral of the second kind
//! with (typically negative) parameter 1 − (a/b)².

pub mod cli;
pub mod control;
pub mod curve;
pub mod error;
pub mod scenario;
pub mod sim;
pub mod specfun;

pub use control::{ControlGains, ControlOutput};
pub use curve::{CurveKind, CurveSpec, Orbit, PerimeterMode};
pub use error::{Error, Result};
pub use scenario::ScenarioFile;
pub use sim::{AgentState, Scenario, SigmaMode, TrajectoryLog};
