//! Norm emergence among learning agents that may explain their actions.
//!
//! Agents learn explicit IF-THEN norms with an XCS-style classifier system.
//! XSIGA agents share the norms behind each action so that observers can
//! judge it in context; NSIGA agents do not. [`simulation::Simulation`] runs
//! the phone-ringer world and [`experiment`] turns seeded runs into CSV
//! files and paired statistics.

pub mod agents;
pub mod engine;
pub mod experiment;
pub mod explanation;
pub mod metrics;
pub mod norm;
pub mod scenario;
pub mod simulation;
pub mod stats;
