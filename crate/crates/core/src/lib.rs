//! Simulation of social networks that form by reinforcement.
//!
//! Agents repeatedly visit one another. Each visit plays a two-player game,
//! and the payoffs reinforce (or inhibit) the visitor's and host's weights
//! for each other. The weights in turn set next round's visit
//! probabilities. The crate covers:
//!
//! - [`state`]: weight and probability matrices, strategy profiles, games
//!   and the dynamics configuration;
//! - [`dynamics`]: the linear, resistance, log-likelihood and transfer
//!   rules, noise and discounting;
//! - [`games`]: payoff tables and imitate-the-best strategy revision;
//! - [`engine`]: rounds, episodes and seeded ensembles;
//! - [`analysis`]: classification of limit states and the statistics used
//!   to check them.

pub mod analysis;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod games;
pub mod rng;
pub mod state;

pub use analysis::{EnsembleSummary, StateClass, StateLabel};
pub use dynamics::VisitOutcome;
pub use engine::{run_ensemble, run_episode, run_round, TrajectoryRecord};
pub use error::{Error, Result};
pub use games::RoundPayoffLedger;
pub use rng::RandomSource;
pub use state::{
    new_uniform_state, AgentType, DynamicsConfig, GameName, GameSpec, ProbabilityMatrix, Rule,
    StrategyProfile, WeightMatrix,
};
