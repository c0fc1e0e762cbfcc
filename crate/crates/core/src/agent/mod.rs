//! Learning stack: dense networks, replay memory, and the DDPG agent.

pub mod ddpg;
pub mod mlp;
pub mod replay;

pub use ddpg::{AgentConfig, AgentError, DdpgAgent, EpisodeRecord};
pub use mlp::{Activation, Gradients, Mlp};
pub use replay::{ReplayBuffer, Transition};
