use std::sync::Arc;

use crate::actor::{Actor, TrustMatrix};
use crate::error::{Error, Result};
use crate::knowledge::Ontology;

/// The whole population: actors, directed trust, and the shared ontology.
///
/// Actor `x` sits at `actors[x]` and has `id == x`; trust is indexed the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub actors: Vec<Actor>,
    pub trust: TrustMatrix,
    pub ontology: Arc<Ontology>,
    outside: Option<OutsideTrust>,
}

/// Trust held by actors that were dropped from a restricted world.
#[derive(Debug, Clone, PartialEq)]
struct OutsideTrust {
    incoming: Vec<f64>,
    population: usize,
}

impl World {
    pub fn new(actors: Vec<Actor>, trust: TrustMatrix, ontology: Arc<Ontology>) -> Result<Self> {
        let world = World {
            actors,
            trust,
            ontology,
            outside: None,
        };
        world.validate()?;
        Ok(world)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.actors.len();
        if self.population() < 2 {
            return Err(Error::PopulationTooSmall(self.population()));
        }
        if self.trust.len() != n {
            return Err(Error::config(format!(
                "trust matrix is {0}x{0} for {n} actors",
                self.trust.len()
            )));
        }
        for (x, actor) in self.actors.iter().enumerate() {
            if actor.id != x {
                return Err(Error::config(format!("actor at {x} has id {}", actor.id)));
            }
            if actor.kb.len() != self.ontology.size() {
                return Err(Error::config(format!(
                    "actor {x} holds {} assertions, ontology has {}",
                    actor.kb.len(),
                    self.ontology.size()
                )));
            }
            actor.validate()?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.actors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actors.is_empty()
    }

    pub fn n_assertions(&self) -> usize {
        self.ontology.size()
    }

    /// Size of the population reputation is averaged over.
    pub fn population(&self) -> usize {
        self.outside
            .as_ref()
            .map_or(self.actors.len(), |o| o.population)
    }

    pub fn reputation(&self, x: usize) -> Result<f64> {
        let population = self.population();
        if population < 2 {
            return Err(Error::PopulationTooSmall(population));
        }
        let outside = self.outside.as_ref().map_or(0.0, |o| o.incoming[x]);
        Ok((outside + self.trust.incoming_sum(x)) / (population - 1) as f64)
    }

    pub fn utility(&self, x: usize) -> Result<f64> {
        let actor = &self.actors[x];
        let k = actor.kb.average_knowledge()?;
        Ok(actor
            .personality
            .combine(k, self.reputation(x)?, actor.popularity))
    }

    /// A smaller world holding only `ids`, re-indexed in the given order.
    ///
    /// Trust from the dropped actors is frozen into per-actor offsets, so
    /// reputation and utility inside the restricted world equal their values
    /// in the full world as long as only trust among `ids` changes.
    pub fn restrict(&self, ids: &[usize]) -> World {
        let actors = ids
            .iter()
            .enumerate()
            .map(|(local, &x)| {
                let mut a = self.actors[x].clone();
                a.id = local;
                a
            })
            .collect();
        let incoming = ids
            .iter()
            .map(|&x| {
                let kept: f64 = ids
                    .iter()
                    .filter(|&&y| y != x)
                    .map(|&y| self.trust.get(y, x))
                    .sum();
                let base = self.outside.as_ref().map_or(0.0, |o| o.incoming[x]);
                base + self.trust.incoming_sum(x) - kept
            })
            .collect();
        World {
            actors,
            trust: self.trust.restrict(ids),
            ontology: Arc::clone(&self.ontology),
            outside: Some(OutsideTrust {
                incoming,
                population: self.population(),
            }),
        }
    }
}
