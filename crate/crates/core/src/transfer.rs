//! One friendcast session: knowledge transfer from the sender to every
//! receiver, ordered feedback back to the sender, and the trust and
//! popularity bookkeeping both directions trigger.

use serde::{Deserialize, Serialize};

use crate::actor::{decay_popularity, Actor, TrustMatrix};
use crate::error::{Error, Result};
use crate::game::{ReceiverAction, SenderAction, StrategyProfile};
use crate::knowledge::{check_unit, learn_weighted, Assertion, KnowledgeBase, Ontology};
use crate::world::World;

/// Which knowledge weights the belief part of a transferred delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefWeight {
    /// The knowledge actually carried by the delta (zero off the diagonal).
    #[default]
    Transferred,
    /// `w * k` of the message's source assertion, for every target.
    Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferParams {
    /// Per-step remembrance `zeta`.
    pub remembrance: f64,
    /// Weight `xi` of the old trust value in a trust update.
    pub trust_memory: f64,
    /// Idle popularity decay rate.
    pub popularity_decay: f64,
    pub belief_weight: BeliefWeight,
}

impl Default for TransferParams {
    fn default() -> Self {
        TransferParams {
            remembrance: 1.0,
            trust_memory: 0.5,
            popularity_decay: 0.01,
            belief_weight: BeliefWeight::Transferred,
        }
    }
}

impl TransferParams {
    pub fn validate(&self) -> Result<()> {
        check_unit("zeta", self.remembrance)?;
        check_unit("xi", self.trust_memory)?;
        check_unit("delta_p", self.popularity_decay)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub sent: bool,
    pub assertion_index: usize,
    /// Receivers that sent feedback, in friend-list order.
    pub responders: Vec<usize>,
    /// Sender followed by the receivers in friend-list order.
    pub participants: Vec<usize>,
    /// Utility change of each participant, aligned with `participants`.
    pub utility_deltas: Vec<f64>,
}

/// The receiver's belief guess about sender assertion `i`: mean over `k` of
/// `m_ki * b_k` over the receiver's own knowledge base.
fn self_assessed_belief(receiver: &KnowledgeBase, i: usize, ontology: &Ontology) -> f64 {
    let sum: f64 = receiver
        .iter()
        .enumerate()
        .map(|(k, a)| ontology.get(k, i) * a.belief())
        .sum();
    sum / receiver.len() as f64
}

fn delta_from_guess(
    sender_assertion: Assertion,
    i: usize,
    j: usize,
    ontology: &Ontology,
    trust: f64,
    willingness: f64,
    guess: f64,
) -> Assertion {
    let k = if i == j {
        willingness * sender_assertion.knowledge()
    } else {
        0.0
    };
    let m = ontology.get(i, j);
    let b = m * trust * sender_assertion.belief() + m * (1.0 - trust) * guess;
    Assertion::settle(k, b)
}

/// Sender assertion `i` as perceived by the receiver for its assertion `j`.
///
/// The knowledge part is `w * k_i` on the diagonal and zero elsewhere. The
/// belief part mixes the sender's belief (weighted by trust) with the
/// receiver's own ontology-based guess (weighted by distrust), scaled by `m_ij`.
pub fn perceived_delta(
    receiver: &KnowledgeBase,
    sender_assertion: Assertion,
    i: usize,
    j: usize,
    ontology: &Ontology,
    trust: f64,
    willingness: f64,
) -> Assertion {
    let guess = self_assessed_belief(receiver, i, ontology);
    delta_from_guess(sender_assertion, i, j, ontology, trust, willingness, guess)
}

/// Combines an (already faded) receiver knowledge base with sender assertion `i`.
fn absorb(
    receiver: &KnowledgeBase,
    sender_assertion: Assertion,
    i: usize,
    ontology: &Ontology,
    trust: f64,
    willingness: f64,
    mode: BeliefWeight,
) -> KnowledgeBase {
    let guess = self_assessed_belief(receiver, i, ontology);
    let source_weight = willingness * sender_assertion.knowledge();
    let mut out = receiver.clone();
    for j in 0..receiver.len() {
        let delta = delta_from_guess(sender_assertion, i, j, ontology, trust, willingness, guess);
        let weight = match mode {
            BeliefWeight::Transferred => delta.knowledge(),
            BeliefWeight::Source => source_weight,
        };
        out.set(j, learn_weighted(receiver.get(j), delta, weight));
    }
    out
}

/// Receiver after learning sender assertion `i`, including one tick of forgetting.
pub fn apply_knowledge_transfer(
    receiver: &Actor,
    sender: &Actor,
    i: usize,
    ontology: &Ontology,
    tm: &TrustMatrix,
    params: &TransferParams,
) -> Result<Actor> {
    let faded = receiver.kb.forget(params.remembrance)?;
    let mut out = receiver.clone();
    out.kb = absorb(
        &faded,
        sender.kb.get(i),
        i,
        ontology,
        tm.get(receiver.id, sender.id),
        receiver.willingness,
        params.belief_weight,
    );
    Ok(out)
}

fn absorb_feedback(
    sender: &KnowledgeBase,
    response: Assertion,
    i: usize,
    ontology: &Ontology,
    trust: f64,
    source_weight: f64,
    mode: BeliefWeight,
) -> KnowledgeBase {
    let mut out = sender.clone();
    for j in 0..sender.len() {
        let delta = Assertion::settle(0.0, ontology.get(i, j) * trust * response.belief());
        let weight = match mode {
            BeliefWeight::Transferred => 0.0,
            BeliefWeight::Source => source_weight,
        };
        out.set(j, learn_weighted(sender.get(j), delta, weight));
    }
    out
}

/// Sender after taking in a receiver's feedback on assertion `i`.
///
/// Feedback carries belief only, so no knowledge component of the sender
/// ever changes, and there is no forgetting.
pub fn apply_feedback_transfer(
    sender: &Actor,
    receiver: &Actor,
    i: usize,
    ontology: &Ontology,
    tm: &TrustMatrix,
    mode: BeliefWeight,
) -> Actor {
    let mut out = sender.clone();
    out.kb = absorb_feedback(
        &sender.kb,
        receiver.kb.get(i),
        i,
        ontology,
        tm.get(sender.id, receiver.id),
        sender.willingness * receiver.kb.get(i).knowledge(),
        mode,
    );
    out
}

/// Combines popularity with the mean absolute value change observed at the
/// other side, `p + dp - p * dp`. Empty slices leave popularity unchanged.
pub fn popularity_update(popularity: f64, before: &[f64], after: &[f64]) -> f64 {
    assert_eq!(before.len(), after.len(), "mismatched value slices");
    if before.is_empty() {
        return popularity;
    }
    let change = before
        .iter()
        .zip(after)
        .map(|(b, a)| (a - b).abs())
        .sum::<f64>()
        / before.len() as f64;
    let change = change.clamp(0.0, 1.0);
    (popularity + change * (1.0 - popularity)).clamp(0.0, 1.0)
}

/// Blends old trust with the agreement `1 - |b_s - b_r|`, clamped to `[0, 1]`.
pub fn trust_update(trust: f64, sender_belief: f64, receiver_belief: f64, memory: f64) -> f64 {
    let agreement = 1.0 - (sender_belief - receiver_belief).abs();
    (memory * trust + (1.0 - memory) * agreement).clamp(0.0, 1.0)
}

fn check_session(
    world: &World,
    sender: usize,
    receivers: &[usize],
    i: usize,
    profile: &StrategyProfile,
) -> Result<()> {
    let n = world.len();
    if sender >= n {
        return Err(Error::config(format!("sender {sender} out of range")));
    }
    if i >= world.n_assertions() {
        return Err(Error::config(format!("assertion {i} out of range")));
    }
    for (pos, &r) in receivers.iter().enumerate() {
        if r >= n || r == sender || receivers[..pos].contains(&r) {
            return Err(Error::config(format!(
                "invalid receiver list {receivers:?}"
            )));
        }
    }
    if profile.receivers.len() != receivers.len() {
        return Err(Error::InfeasibleProfile(format!(
            "profile has {} receiver actions for {} receivers",
            profile.receivers.len(),
            receivers.len()
        )));
    }
    if !profile.is_feasible() {
        return Err(Error::InfeasibleProfile(format!(
            "feedback without a send in {profile}"
        )));
    }
    Ok(())
}

/// Runs one session on `world` under a fixed strategy profile.
///
/// Order of effects: forgetting for the whole population; if the sender
/// sends, simultaneous transfer to all receivers followed by their trust
/// updates and the sender's popularity update; feedback from each responder
/// in friend-list order; idle decay for every actor that did not act.
pub fn execute_session(
    world: &mut World,
    sender: usize,
    receivers: &[usize],
    i: usize,
    profile: &StrategyProfile,
    params: &TransferParams,
) -> Result<SessionOutcome> {
    check_session(world, sender, receivers, i, profile)?;

    let participants: Vec<usize> = std::iter::once(sender)
        .chain(receivers.iter().copied())
        .collect();
    let before = participants
        .iter()
        .map(|&x| world.utility(x))
        .collect::<Result<Vec<_>>>()?;

    for actor in &mut world.actors {
        actor.kb.forget_in_place(params.remembrance)?;
    }

    let sent = profile.sender == SenderAction::Send;
    let mut acted = vec![false; world.len()];
    let mut responders = Vec::new();

    if sent {
        acted[sender] = true;
        let sent_assertion = world.actors[sender].kb.get(i);
        let mut values_before = Vec::with_capacity(receivers.len());
        let mut values_after = Vec::with_capacity(receivers.len());
        let mut beliefs_before = Vec::with_capacity(receivers.len());
        for &r in receivers {
            let old = world.actors[r].kb.get(i);
            let learned = absorb(
                &world.actors[r].kb,
                sent_assertion,
                i,
                &world.ontology,
                world.trust.get(r, sender),
                world.actors[r].willingness,
                params.belief_weight,
            );
            values_before.push(old.value());
            values_after.push(learned.get(i).value());
            beliefs_before.push(old.belief());
            world.actors[r].kb = learned;
        }
        for (&r, &b_r) in receivers.iter().zip(&beliefs_before) {
            let t = trust_update(
                world.trust.get(r, sender),
                sent_assertion.belief(),
                b_r,
                params.trust_memory,
            );
            world.trust.set(r, sender, t);
        }
        let s = &mut world.actors[sender];
        s.popularity = popularity_update(s.popularity, &values_before, &values_after);

        for (&r, action) in receivers.iter().zip(&profile.receivers) {
            if *action != ReceiverAction::Feedback {
                continue;
            }
            acted[r] = true;
            responders.push(r);
            let old = world.actors[sender].kb.get(i);
            let updated = apply_feedback_transfer(
                &world.actors[sender],
                &world.actors[r],
                i,
                &world.ontology,
                &world.trust,
                params.belief_weight,
            );
            let new = updated.kb.get(i);
            world.actors[sender] = updated;
            let t = trust_update(
                world.trust.get(sender, r),
                world.actors[r].kb.get(i).belief(),
                old.belief(),
                params.trust_memory,
            );
            world.trust.set(sender, r, t);
            let rp = &mut world.actors[r];
            rp.popularity = popularity_update(rp.popularity, &[old.value()], &[new.value()]);
        }
    }

    for (actor, &active) in world.actors.iter_mut().zip(&acted) {
        if !active {
            actor.popularity = decay_popularity(actor.popularity, params.popularity_decay);
        }
    }

    let utility_deltas = participants
        .iter()
        .zip(&before)
        .map(|(&x, &u)| Ok(world.utility(x)? - u))
        .collect::<Result<Vec<_>>>()?;

    Ok(SessionOutcome {
        sent,
        assertion_index: i,
        responders,
        participants,
        utility_deltas,
    })
}
