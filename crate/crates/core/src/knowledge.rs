//! Assertions and the learning operator.
//!
//! An assertion instance is a `(knowledge, belief)` pair with knowledge in
//! `[0, 1]` and belief in `[-1, 1]`. Its value is the product of the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest floating-point drift that [`settle`] silently absorbs.
const DRIFT_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    k: f64,
    b: f64,
}

impl Assertion {
    /// The no-knowledge, no-belief instance.
    pub const EMPTY: Assertion = Assertion { k: 0.0, b: 0.0 };

    pub fn new(knowledge: f64, belief: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&knowledge) {
            return Err(Error::config(format!(
                "knowledge {knowledge} outside [0, 1]"
            )));
        }
        if !(-1.0..=1.0).contains(&belief) {
            return Err(Error::config(format!("belief {belief} outside [-1, 1]")));
        }
        Ok(Assertion {
            k: knowledge,
            b: belief,
        })
    }

    #[inline]
    pub fn knowledge(&self) -> f64 {
        self.k
    }

    #[inline]
    pub fn belief(&self) -> f64 {
        self.b
    }

    /// `k * b`, in `[-1, 1]`.
    #[inline]
    pub fn value(&self) -> f64 {
        self.k * self.b
    }

    /// Builds an assertion from computed components, clamping float drift.
    ///
    /// Panics if a component is off its range by more than `DRIFT_LIMIT`,
    /// which means an operation broke its own closure guarantee.
    pub(crate) fn settle(k: f64, b: f64) -> Self {
        assert!(
            (-DRIFT_LIMIT..=1.0 + DRIFT_LIMIT).contains(&k),
            "knowledge drifted out of range: {k}"
        );
        assert!(
            (-1.0 - DRIFT_LIMIT..=1.0 + DRIFT_LIMIT).contains(&b),
            "belief drifted out of range: {b}"
        );
        Assertion {
            k: k.clamp(0.0, 1.0),
            b: b.clamp(-1.0, 1.0),
        }
    }

    /// Both components scaled by `sqrt(remembrance)`.
    pub(crate) fn faded(&self, scale: f64) -> Self {
        Assertion::settle(self.k * scale, self.b * scale)
    }
}

/// `x ⊕ y`: combines an existing instance `x` with a newly learned instance `y`.
///
/// Knowledge combines as `k_x + k_y (1 - k_x)`. The added belief is weighted by
/// the added knowledge and pulls toward `+1` when `b_y >= 0`, toward `-1`
/// otherwise. With no knowledge on either side `x` is returned unchanged.
pub fn learn(x: Assertion, y: Assertion) -> Assertion {
    learn_weighted(x, y, y.k)
}

/// [`learn`] with an explicit weight on the added belief instead of `y.k`.
pub fn learn_weighted(x: Assertion, y: Assertion, belief_weight: f64) -> Assertion {
    if x.k + y.k == 0.0 && belief_weight == 0.0 {
        return x;
    }
    let k = x.k + y.k * (1.0 - x.k);
    let pull = belief_weight * y.b;
    let b = if y.b >= 0.0 {
        x.b + pull * (1.0 - x.b)
    } else {
        x.b + pull * (1.0 + x.b)
    };
    Assertion::settle(k, b)
}

/// An actor's instances of every assertion in the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBase(Vec<Assertion>);

impl KnowledgeBase {
    pub fn new(assertions: Vec<Assertion>) -> Self {
        KnowledgeBase(assertions)
    }

    pub fn empty(len: usize) -> Self {
        KnowledgeBase(vec![Assertion::EMPTY; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Assertion {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, a: Assertion) {
        self.0[i] = a;
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Assertion> {
        self.0.iter()
    }

    /// Mean of `|k_i b_i|` over the knowledge base.
    pub fn average_knowledge(&self) -> Result<f64> {
        if self.0.is_empty() {
            return Err(Error::EmptyKnowledgeBase);
        }
        Ok(mean(self.0.iter().map(|a| a.value().abs())))
    }

    /// Mean of the signed values `k_i b_i`.
    pub fn mean_value(&self) -> Result<f64> {
        if self.0.is_empty() {
            return Err(Error::EmptyKnowledgeBase);
        }
        Ok(mean(self.0.iter().map(Assertion::value)))
    }

    /// One tick of forgetting: both components shrink by `sqrt(remembrance)`,
    /// so every value shrinks by `remembrance`.
    pub fn forget(&self, remembrance: f64) -> Result<KnowledgeBase> {
        let mut out = self.clone();
        out.forget_in_place(remembrance)?;
        Ok(out)
    }

    pub(crate) fn forget_in_place(&mut self, remembrance: f64) -> Result<()> {
        check_unit("remembrance", remembrance)?;
        if remembrance == 1.0 {
            return Ok(());
        }
        let scale = remembrance.sqrt();
        for a in &mut self.0 {
            *a = a.faded(scale);
        }
        Ok(())
    }

    /// Indices with nonzero knowledge.
    pub fn known_indices(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, a)| a.k > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Value of a single assertion; free-function form of [`Assertion::value`].
pub fn assertion_value(a: Assertion) -> f64 {
    a.value()
}

/// Dense `|A| x |A|` correlation matrix between assertions.
///
/// Row `i`, column `j` holds `m_ij`: how a change of belief in assertion `i`
/// carries over to assertion `j`. Not required to be symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ontology {
    size: usize,
    m: Vec<f64>,
}

impl Ontology {
    pub fn identity(size: usize) -> Self {
        let mut m = vec![0.0; size * size];
        for i in 0..size {
            m[i * size + i] = 1.0;
        }
        Ontology { size, m }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut m = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::config(format!(
                    "ontology row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::config(format!(
                        "ontology entry ({i}, {j}) = {v} outside [-1, 1]"
                    )));
                }
                if i == j && v != 1.0 {
                    return Err(Error::config(format!(
                        "ontology diagonal ({i}, {i}) must be 1, got {v}"
                    )));
                }
            }
            m.extend_from_slice(row);
        }
        Ok(Ontology { size, m })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.m
            .chunks(self.size.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }
}

/// Compensated (Neumaier) mean; empty input gives NaN.
pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    let mut n = 0usize;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
        n += 1;
    }
    (sum + carry) / n as f64
}

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(format!("{name} = {v} outside [0, 1]")))
    }
}
