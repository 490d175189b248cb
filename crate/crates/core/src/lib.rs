//! Game-theoretic simulation of broadcast ("friendcast") information
//! diffusion.
//!
//! A sender offers one assertion to `N` receivers; each receiver may answer
//! with feedback. Whether anything is sent or answered is the equilibrium of
//! an `(N+1)`-player game whose payoffs are utility changes built from
//! knowledge, reputation and popularity.

pub mod actor;
pub mod config;
pub mod error;
pub mod game;
pub mod knowledge;
pub mod output;
pub mod sim;
pub mod transfer;
pub mod world;

pub use actor::{decay_popularity, reputation, utility, Actor, Personality, TrustMatrix};
pub use config::{KnowledgeTier, OntologySpec, ScenarioConfig};
pub use error::{Error, Result};
pub use game::{
    build_payoff_tensor, find_pure_nash, select_profile, PayoffTensor, ReceiverAction,
    SenderAction, StrategyProfile,
};
pub use knowledge::{assertion_value, learn, learn_weighted, Assertion, KnowledgeBase, Ontology};
pub use output::{RunManifest, Summary};
pub use sim::{init_population, run, step, RunOutput, RunStats, Simulation, Snapshot};
pub use transfer::{
    apply_feedback_transfer, apply_knowledge_transfer, execute_session, perceived_delta,
    popularity_update, trust_update, BeliefWeight, SessionOutcome, TransferParams,
};
pub use world::World;
