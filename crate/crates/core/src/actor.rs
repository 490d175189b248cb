use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::{check_unit, KnowledgeBase};

/// Weights an actor puts on knowledge, reputation and popularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Personality {
    pub kappa: f64,
    pub rho: f64,
    pub pi: f64,
}

impl Personality {
    pub const EXPERT: Personality = Personality {
        kappa: 0.2,
        rho: 0.7,
        pi: 0.1,
    };

    pub const TROLL: Personality = Personality {
        kappa: 0.1,
        rho: 0.1,
        pi: 0.8,
    };

    pub fn new(kappa: f64, rho: f64, pi: f64) -> Result<Self> {
        let p = Personality { kappa, rho, pi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("kappa", self.kappa)?;
        check_unit("rho", self.rho)?;
        check_unit("pi", self.pi)?;
        let sum = self.kappa + self.rho + self.pi;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "personality weights must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }

    /// Convex combination of the three utility components.
    #[inline]
    pub fn combine(&self, knowledge: f64, reputation: f64, popularity: f64) -> f64 {
        self.kappa * knowledge + self.rho * reputation + self.pi * popularity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Actor {
    pub id: usize,
    pub kb: KnowledgeBase,
    pub personality: Personality,
    /// Perceived popularity in `[0, 1]`.
    pub popularity: f64,
    /// Willingness to learn in `[0, 1]`.
    pub willingness: f64,
}

impl Actor {
    pub fn new(id: usize, kb: KnowledgeBase, personality: Personality, willingness: f64) -> Self {
        Actor {
            id,
            kb,
            personality,
            popularity: 0.0,
            willingness,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.personality.validate()?;
        check_unit("popularity", self.popularity)?;
        check_unit("willingness", self.willingness)?;
        if self.kb.is_empty() {
            return Err(Error::EmptyKnowledgeBase);
        }
        Ok(())
    }
}

/// Directed trust: row is the truster, column the trustee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustMatrix {
    n: usize,
    t: Vec<f64>,
}

impl TrustMatrix {
    /// `init` everywhere off the diagonal, 1 on it.
    pub fn uniform(n: usize, init: f64) -> Result<Self> {
        check_unit("trust_init", init)?;
        let mut t = vec![init; n * n];
        for x in 0..n {
            t[x * n + x] = 1.0;
        }
        Ok(TrustMatrix { n, t })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut t = Vec::with_capacity(n * n);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::config(format!("trust row {x} has wrong length")));
            }
            for (y, &v) in row.iter().enumerate() {
                check_unit("trust", v)?;
                if x == y && v != 1.0 {
                    return Err(Error::config(format!("self-trust of {x} must be 1")));
                }
            }
            t.extend_from_slice(row);
        }
        Ok(TrustMatrix { n, t })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Trust of `truster` in `trustee`.
    #[inline]
    pub fn get(&self, truster: usize, trustee: usize) -> f64 {
        self.t[truster * self.n + trustee]
    }

    /// Sets an off-diagonal entry, clamped to `[0, 1]`. Self-trust stays at 1.
    pub fn set(&mut self, truster: usize, trustee: usize, value: f64) {
        if truster != trustee {
            self.t[truster * self.n + trustee] = value.clamp(0.0, 1.0);
        }
    }

    /// Sum of the trust every other actor has in `x`.
    pub fn incoming_sum(&self, x: usize) -> f64 {
        (0..self.n)
            .filter(|&y| y != x)
            .map(|y| self.get(y, x))
            .sum()
    }

    /// Average trust of all other actors in `x`.
    pub fn reputation(&self, x: usize) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::PopulationTooSmall(self.n));
        }
        Ok(self.incoming_sum(x) / (self.n - 1) as f64)
    }

    /// Square submatrix over `ids`, re-indexed in the given order.
    pub fn restrict(&self, ids: &[usize]) -> TrustMatrix {
        let n = ids.len();
        let mut t = Vec::with_capacity(n * n);
        for &x in ids {
            for &y in ids {
                t.push(self.get(x, y));
            }
        }
        TrustMatrix { n, t }
    }
}

/// Free-function form of [`TrustMatrix::reputation`].
pub fn reputation(x: usize, tm: &TrustMatrix) -> Result<f64> {
    tm.reputation(x)
}

/// `kappa K + rho R + pi P` for `actor`, with reputation taken from `tm`.
pub fn utility(actor: &Actor, tm: &TrustMatrix) -> Result<f64> {
    let k = actor.kb.average_knowledge()?;
    let r = tm.reputation(actor.id)?;
    Ok(actor.personality.combine(k, r, actor.popularity))
}

/// Popularity after one idle step.
#[inline]
pub fn decay_popularity(popularity: f64, rate: f64) -> f64 {
    popularity * (1.0 - rate)
}
