//! The (N+1)-player send/feedback game.
//!
//! Profiles are enumerated lexicographically over `(sender, r_1, .., r_N)`
//! with `Hold < Send` and `Silent < Feedback`, so profile index `p` has the
//! sender action in bit `N` and receiver `k` in bit `N - 1 - k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transfer::{execute_session, TransferParams};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SenderAction {
    Hold,
    Send,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverAction {
    Silent,
    Feedback,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub sender: SenderAction,
    pub receivers: Vec<ReceiverAction>,
}

impl StrategyProfile {
    pub fn all_hold(n_receivers: usize) -> Self {
        StrategyProfile {
            sender: SenderAction::Hold,
            receivers: vec![ReceiverAction::Silent; n_receivers],
        }
    }

    pub fn sending(receivers: Vec<ReceiverAction>) -> Self {
        StrategyProfile {
            sender: SenderAction::Send,
            receivers,
        }
    }

    /// No feedback without a send.
    pub fn is_feasible(&self) -> bool {
        self.sender == SenderAction::Send
            || self.receivers.iter().all(|&r| r == ReceiverAction::Silent)
    }

    /// Lexicographic position among the `2^(N+1)` profiles.
    pub fn index(&self) -> usize {
        let n = self.receivers.len();
        let mut idx = usize::from(self.sender == SenderAction::Send) << n;
        for (k, &r) in self.receivers.iter().enumerate() {
            if r == ReceiverAction::Feedback {
                idx |= 1 << (n - 1 - k);
            }
        }
        idx
    }

    pub fn from_index(idx: usize, n_receivers: usize) -> Self {
        let sender = if idx >> n_receivers & 1 == 1 {
            SenderAction::Send
        } else {
            SenderAction::Hold
        };
        let receivers = (0..n_receivers)
            .map(|k| {
                if idx >> (n_receivers - 1 - k) & 1 == 1 {
                    ReceiverAction::Feedback
                } else {
                    ReceiverAction::Silent
                }
            })
            .collect();
        StrategyProfile { sender, receivers }
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.sender {
            SenderAction::Hold => "H",
            SenderAction::Send => "S",
        })?;
        if !self.receivers.is_empty() {
            f.write_str(" ")?;
        }
        for r in &self.receivers {
            f.write_str(match r {
                ReceiverAction::Silent => "-",
                ReceiverAction::Feedback => "F",
            })?;
        }
        Ok(())
    }
}

/// Utility changes for every profile; player 0 is the sender, then the
/// receivers in friend-list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTensor {
    n_receivers: usize,
    payoffs: Vec<Vec<f64>>,
}

impl PayoffTensor {
    /// Builds a tensor from per-profile payoff rows indexed by
    /// [`StrategyProfile::index`]. Rows of infeasible profiles are replaced
    /// by the all-hold row.
    pub fn new(n_receivers: usize, mut payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if payoffs.len() != 1 << (n_receivers + 1) {
            return Err(Error::config(format!(
                "expected {} payoff rows for {n_receivers} receivers, got {}",
                1 << (n_receivers + 1),
                payoffs.len()
            )));
        }
        if let Some(row) = payoffs.iter().find(|row| row.len() != n_receivers + 1) {
            return Err(Error::config(format!(
                "payoff row has {} entries, expected {}",
                row.len(),
                n_receivers + 1
            )));
        }
        let hold = payoffs[0].clone();
        for row in payoffs.iter_mut().take(1 << n_receivers).skip(1) {
            row.clone_from(&hold);
        }
        Ok(PayoffTensor {
            n_receivers,
            payoffs,
        })
    }

    pub fn n_receivers(&self) -> usize {
        self.n_receivers
    }

    pub fn n_players(&self) -> usize {
        self.n_receivers + 1
    }

    pub fn n_profiles(&self) -> usize {
        self.payoffs.len()
    }

    pub fn payoffs(&self, profile: &StrategyProfile) -> &[f64] {
        &self.payoffs[profile.index()]
    }

    pub fn payoff_at(&self, idx: usize, player: usize) -> f64 {
        self.payoffs[idx][player]
    }

    pub fn profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        (0..self.n_profiles()).map(|idx| StrategyProfile::from_index(idx, self.n_receivers))
    }

    /// Bit that toggles `player`'s action in a profile index.
    #[inline]
    fn flip_bit(&self, player: usize) -> usize {
        1 << (self.n_receivers - player)
    }

    /// How much `player` could gain by deviating alone from profile `idx`.
    fn regret(&self, idx: usize, player: usize) -> f64 {
        let here = self.payoffs[idx][player];
        let there = self.payoffs[idx ^ self.flip_bit(player)][player];
        (there - here).max(0.0)
    }

    fn is_pure_nash(&self, idx: usize) -> bool {
        (0..self.n_players())
            .all(|p| self.payoffs[idx ^ self.flip_bit(p)][p] <= self.payoffs[idx][p])
    }
}

impl fmt::Display for PayoffTensor {
    /// One profile per line: the profile, a tab, then the payoff vector.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (profile, row) in self.profiles().zip(&self.payoffs) {
            write!(f, "{profile}\t")?;
            for (p, v) in row.iter().enumerate() {
                if p > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v:+.6e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Evaluates every feasible profile on a throwaway copy of the participants
/// and records each participant's utility change.
pub fn build_payoff_tensor(
    world: &World,
    sender: usize,
    receivers: &[usize],
    i: usize,
    params: &TransferParams,
) -> Result<PayoffTensor> {
    let n = receivers.len();
    let participants: Vec<usize> = std::iter::once(sender)
        .chain(receivers.iter().copied())
        .collect();
    let local = world.restrict(&participants);
    let local_receivers: Vec<usize> = (1..=n).collect();

    let mut payoffs = vec![Vec::new(); 1 << (n + 1)];
    for idx in std::iter::once(0).chain(1 << n..1 << (n + 1)) {
        let profile = StrategyProfile::from_index(idx, n);
        let mut scratch = local.clone();
        let outcome = execute_session(&mut scratch, 0, &local_receivers, i, &profile, params)?;
        payoffs[idx] = outcome.utility_deltas;
    }
    let hold = payoffs[0].clone();
    for row in payoffs.iter_mut().take(1 << n).skip(1) {
        row.clone_from(&hold);
    }
    PayoffTensor::new(n, payoffs)
}

/// Every profile from which no single player strictly gains by deviating.
pub fn find_pure_nash(tensor: &PayoffTensor) -> Vec<StrategyProfile> {
    (0..tensor.n_profiles())
        .filter(|&idx| tensor.is_pure_nash(idx))
        .map(|idx| StrategyProfile::from_index(idx, tensor.n_receivers))
        .collect()
}

/// Total unilateral regret of the profile at `idx`.
pub fn total_regret(tensor: &PayoffTensor, profile: &StrategyProfile) -> f64 {
    let idx = profile.index();
    (0..tensor.n_players()).map(|p| tensor.regret(idx, p)).sum()
}

/// The profile the players settle on.
///
/// Among pure equilibria: highest sender payoff, then the lexicographically
/// first profile (hold before send, silent before feedback). Without a pure
/// equilibrium: lowest total unilateral regret, same lexicographic tie-break.
pub fn select_profile(tensor: &PayoffTensor) -> StrategyProfile {
    let nash: Vec<usize> = (0..tensor.n_profiles())
        .filter(|&idx| tensor.is_pure_nash(idx))
        .collect();
    let chosen = if nash.is_empty() {
        let mut best = 0;
        let mut best_regret = f64::INFINITY;
        for idx in 0..tensor.n_profiles() {
            let r: f64 = (0..tensor.n_players()).map(|p| tensor.regret(idx, p)).sum();
            if r < best_regret {
                best = idx;
                best_regret = r;
            }
        }
        best
    } else {
        let mut best = nash[0];
        for &idx in &nash[1..] {
            if tensor.payoff_at(idx, 0) > tensor.payoff_at(best, 0) {
                best = idx;
            }
        }
        best
    };
    let mut profile = StrategyProfile::from_index(chosen, tensor.n_receivers);
    if profile.sender == SenderAction::Hold {
        profile = StrategyProfile::all_hold(tensor.n_receivers);
    }
    profile
}
