//! Simulator and learning stack for joint vehicle association and
//! spectrum/compute/cache allocation in a vehicular network served by an
//! MEC-mounted base station and two MEC-mounted UAVs.
//!
//! - [`scenario`]: road, mobility, and per-slot task generation;
//! - [`network`]: channel gains, uplink rates, task delay, decision scoring;
//! - [`env`]: state encoding, action projection, rewards, step/reset;
//! - [`agent`]: from-scratch MLPs, replay memory, and the DDPG learner;
//! - [`baseline`]: the random scheme and an exhaustive small-instance oracle;
//! - [`config`], [`metrics`], [`harness`]: run configuration, metrics files,
//!   and the train/evaluate/plot pipeline used by the CLI.

pub mod agent;
pub mod baseline;
pub mod config;
pub mod env;
pub mod harness;
pub mod metrics;
pub mod network;
pub mod scenario;
