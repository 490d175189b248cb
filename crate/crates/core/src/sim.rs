//! Population setup, the random-session loop, and periodic snapshots.
//!
//! All randomness comes from one ChaCha8 stream seeded with `rng_seed`, drawn
//! in a fixed order: initial beliefs (actor by actor, assertion by
//! assertion), then per step the sender, the receivers and the assertion.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::actor::{Actor, TrustMatrix};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::game::{build_payoff_tensor, select_profile, StrategyProfile};
use crate::knowledge::{Assertion, KnowledgeBase};
use crate::transfer::{execute_session, SessionOutcome};
use crate::world::World;

pub type SimRng = ChaCha8Rng;

pub const HISTOGRAM_BINS: usize = 20;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest-remainder apportionment of `n` actors over tier fractions.
/// Ties in the remainder go to the earlier tier.
pub fn tier_counts(fractions: &[f64], n: usize) -> Vec<usize> {
    let quotas: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &t in order.iter().cycle().take(n.saturating_sub(assigned)) {
        counts[t] += 1;
    }
    counts
}

/// Builds the initial world: tiers in id order, every assertion at the
/// tier's knowledge with a belief of -1 or +1 drawn uniformly.
pub fn init_population(cfg: &ScenarioConfig, rng: &mut SimRng) -> Result<World> {
    cfg.validate()?;
    let fractions: Vec<f64> = cfg.knowledge_tiers.iter().map(|t| t.fraction).collect();
    let counts = tier_counts(&fractions, cfg.n_actors);
    let targets = cfg
        .knowledge_tiers
        .iter()
        .zip(&counts)
        .flat_map(|(tier, &c)| std::iter::repeat_n(tier.target_k, c));

    let actors = targets
        .enumerate()
        .map(|(id, k)| {
            let kb = (0..cfg.n_assertions)
                .map(|_| {
                    let b = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    Assertion::new(k, b)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Actor::new(
                id,
                KnowledgeBase::new(kb),
                cfg.personality,
                cfg.w,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    World::new(
        actors,
        TrustMatrix::uniform(cfg.n_actors, cfg.trust_init)?,
        Arc::new(cfg.build_ontology()?),
    )
}

/// Sender, receivers in friend-list order, and the assertion to offer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draw {
    pub sender: usize,
    pub receivers: Vec<usize>,
    /// `None` when the sender knows nothing.
    pub assertion: Option<usize>,
}

pub fn draw_session(world: &World, n_receivers: usize, rng: &mut SimRng) -> Draw {
    let n = world.len();
    let sender = rng.random_range(0..n);
    let mut pool: Vec<usize> = (0..n).filter(|&x| x != sender).collect();
    for k in 0..n_receivers {
        let j = rng.random_range(k..pool.len());
        pool.swap(k, j);
    }
    pool.truncate(n_receivers);
    let known = world.actors[sender].kb.known_indices();
    let assertion = if known.is_empty() {
        None
    } else {
        Some(known[rng.random_range(0..known.len())])
    };
    Draw {
        sender,
        receivers: pool,
        assertion,
    }
}

/// One simulation step: draw participants, solve the game, play it.
pub fn step(world: &mut World, cfg: &ScenarioConfig, rng: &mut SimRng) -> Result<SessionOutcome> {
    let params = cfg.transfer_params();
    let draw = draw_session(world, cfg.n_receivers, rng);
    let (i, profile) = match draw.assertion {
        Some(i) => {
            let tensor = build_payoff_tensor(world, draw.sender, &draw.receivers, i, &params)?;
            (i, select_profile(&tensor))
        }
        None => (0, StrategyProfile::all_hold(cfg.n_receivers)),
    };
    execute_session(world, draw.sender, &draw.receivers, i, &profile, &params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: u64,
    /// Per actor: mean of `a_i`.
    pub mean_value: Vec<f64>,
    /// Per actor: mean of `|a_i|`.
    pub mean_abs_value: Vec<f64>,
    pub popularity: Vec<f64>,
    pub reputation: Vec<f64>,
    /// Counts of per-actor mean value over 20 equal bins on `[-1, 1]`.
    pub histogram: [u64; HISTOGRAM_BINS],
    pub population_mean: f64,
    /// Population standard deviation of per-actor mean value.
    pub population_std: f64,
    pub population_mean_abs: f64,
}

/// Bin of `v` in `[-1, 1]`: right-open bins, the last one closed.
pub fn histogram_bin(v: f64) -> usize {
    let idx = ((v + 1.0) / 2.0 * HISTOGRAM_BINS as f64).floor();
    (idx.max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

impl Snapshot {
    pub fn capture(world: &World, step: u64) -> Result<Self> {
        let n = world.len() as f64;
        let mut mean_value = Vec::with_capacity(world.len());
        let mut mean_abs_value = Vec::with_capacity(world.len());
        let mut reputation = Vec::with_capacity(world.len());
        let mut histogram = [0u64; HISTOGRAM_BINS];
        for (x, actor) in world.actors.iter().enumerate() {
            let v = actor.kb.mean_value()?;
            histogram[histogram_bin(v)] += 1;
            mean_value.push(v);
            mean_abs_value.push(actor.kb.average_knowledge()?);
            reputation.push(world.reputation(x)?);
        }
        let population_mean = mean_value.iter().sum::<f64>() / n;
        let variance = mean_value
            .iter()
            .map(|v| (v - population_mean).powi(2))
            .sum::<f64>()
            / n;
        let population_mean_abs = mean_abs_value.iter().sum::<f64>() / n;
        Ok(Snapshot {
            step,
            mean_value,
            mean_abs_value,
            popularity: world.actors.iter().map(|a| a.popularity).collect(),
            reputation,
            histogram,
            population_mean,
            population_std: variance.sqrt(),
            population_mean_abs,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: u64,
    pub sends: u64,
    /// Receiver slots in sessions where the sender sent.
    pub offered: u64,
    pub feedbacks: u64,
}

impl RunStats {
    pub fn record(&mut self, outcome: &SessionOutcome) {
        self.steps += 1;
        if outcome.sent {
            self.sends += 1;
            self.offered += (outcome.participants.len() - 1) as u64;
            self.feedbacks += outcome.responders.len() as u64;
        }
    }

    pub fn send_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.sends as f64 / self.steps as f64
        }
    }

    pub fn feedback_rate(&self) -> f64 {
        if self.offered == 0 {
            0.0
        } else {
            self.feedbacks as f64 / self.offered as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub stats: RunStats,
    pub world: World,
}

/// A running simulation: world, generator and counters.
pub struct Simulation {
    cfg: ScenarioConfig,
    world: World,
    rng: SimRng,
    step: u64,
    stats: RunStats,
}

impl Simulation {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        let mut rng = seeded_rng(cfg.rng_seed);
        let world = init_population(&cfg, &mut rng)?;
        Ok(Simulation {
            cfg,
            world,
            rng,
            step: 0,
            stats: RunStats::default(),
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn current_step(&self) -> u64 {
        self.step
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    pub fn advance(&mut self) -> Result<SessionOutcome> {
        let outcome = step(&mut self.world, &self.cfg, &mut self.rng)?;
        self.stats.record(&outcome);
        self.step += 1;
        Ok(outcome)
    }

    pub fn snapshot(&self) -> Result<Snapshot> {
        Snapshot::capture(&self.world, self.step)
    }

    /// Runs the remaining steps, snapshotting at step 0, every
    /// `snapshot_every` steps, and at the final step.
    pub fn run_to_end(mut self) -> Result<RunOutput> {
        let mut snapshots = vec![self.snapshot()?];
        while self.step < self.cfg.n_steps {
            self.advance()?;
            if self.step.is_multiple_of(self.cfg.snapshot_every) || self.step == self.cfg.n_steps {
                snapshots.push(self.snapshot()?);
            }
        }
        Ok(RunOutput {
            snapshots,
            stats: self.stats,
            world: self.world,
        })
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    Simulation::new(cfg.clone())?.run_to_end()
}
