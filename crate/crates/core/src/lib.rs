//! Simulation engine for two endogenous social-network models.
//!
//! * [`reinforcement`]: agents live on a Bianconi-Barabási network that is
//!   regenerated every period from their current fitness; random edge shocks
//!   reward (or punish) both endpoints, and fitness accumulates.
//! * [`tribes`]: agents hold a real-valued opinion ("fitness") on a persistent
//!   network. Neighbours average their opinions when they are within a
//!   confidence threshold, unused ties decay and die, and dead ties are rewired
//!   towards similar, well-connected agents.
//!
//! [`sweep`] runs Monte Carlo replications over parameter grids and
//! [`io`] handles configuration files, result tables and graph snapshots.
//! All randomness flows through explicitly passed generators; see [`seed`]
//! for how per-replication streams are derived from a master seed.

pub mod error;
pub mod generator;
pub mod graph;
pub mod io;
pub mod presets;
pub mod reinforcement;
pub mod sampling;
pub mod seed;
pub mod sweep;
pub mod tribes;

pub use error::{Error, Result};
pub use generator::{generate_bb, select_by_kernel, AttachmentKernel, BBParams};
pub use graph::{AgentId, EdgeState, SocialGraph};
pub use reinforcement::{FitnessVector, Model1Config, RewardScheme, RunSummary};
pub use seed::SimRng;
pub use sweep::{run_sweep, AggregateRow, SweepResult, SweepSpec};

pub use tribes::{Kernel, Model2Config, TribeMetrics};
