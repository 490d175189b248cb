//! Test-only oracles, written straight from the model equations on plain
//! arrays. They share no code with the library's transfer or game paths.

#![allow(dead_code, clippy::too_many_arguments, clippy::needless_range_loop)]

use std::collections::HashMap;
use std::sync::Arc;

use friendcast::{
    Actor, Assertion, BeliefWeight, KnowledgeBase, Ontology, Personality, ReceiverAction,
    SenderAction, StrategyProfile, TransferParams, TrustMatrix, World,
};
use rand::Rng;

/// Plain-array copy of a world.
#[derive(Debug, Clone)]
pub struct Flat {
    pub k: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub t: Vec<Vec<f64>>,
    pub p: Vec<f64>,
    pub w: Vec<f64>,
    pub weights: Vec<(f64, f64, f64)>,
    pub m: Vec<Vec<f64>>,
}

impl Flat {
    pub fn of(world: &World) -> Flat {
        let n = world.len();
        let na = world.n_assertions();
        Flat {
            k: world
                .actors
                .iter()
                .map(|a| a.kb.iter().map(|x| x.knowledge()).collect())
                .collect(),
            b: world
                .actors
                .iter()
                .map(|a| a.kb.iter().map(|x| x.belief()).collect())
                .collect(),
            t: (0..n)
                .map(|x| (0..n).map(|y| world.trust.get(x, y)).collect())
                .collect(),
            p: world.actors.iter().map(|a| a.popularity).collect(),
            w: world.actors.iter().map(|a| a.willingness).collect(),
            weights: world
                .actors
                .iter()
                .map(|a| (a.personality.kappa, a.personality.rho, a.personality.pi))
                .collect(),
            m: (0..na)
                .map(|i| (0..na).map(|j| world.ontology.get(i, j)).collect())
                .collect(),
        }
    }

    pub fn utility(&self, x: usize) -> f64 {
        let n = self.p.len();
        let na = self.k[x].len();
        let kk: f64 = (0..na)
            .map(|i| (self.k[x][i] * self.b[x][i]).abs())
            .sum::<f64>()
            / na as f64;
        let r: f64 = (0..n)
            .filter(|&y| y != x)
            .map(|y| self.t[y][x])
            .sum::<f64>()
            / (n - 1) as f64;
        let (kappa, rho, pi) = self.weights[x];
        kappa * kk + rho * r + pi * self.p[x]
    }
}

fn oplus(kx: f64, bx: f64, ky: f64, by: f64, weight: f64) -> (f64, f64) {
    let k = kx + ky - kx * ky;
    let b = if by >= 0.0 {
        bx + weight * by * (1.0 - bx)
    } else {
        bx + weight * by * (1.0 + bx)
    };
    (k.clamp(0.0, 1.0), b.clamp(-1.0, 1.0))
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// One session evaluated line by line; returns the new state and the
/// participants' utility deltas.
pub fn oracle_session(
    before: &Flat,
    s: usize,
    rs: &[usize],
    i: usize,
    send: bool,
    feedback: &[bool],
    zeta: f64,
    xi: f64,
    dp: f64,
    source_mode: bool,
) -> (Flat, Vec<f64>) {
    let mut st = before.clone();
    let n = st.p.len();
    let na = st.m.len();
    let u0: Vec<f64> = std::iter::once(s)
        .chain(rs.iter().copied())
        .map(|x| before.utility(x))
        .collect();

    // forgetting
    let f = zeta.sqrt();
    if zeta != 1.0 {
        for x in 0..n {
            for j in 0..na {
                st.k[x][j] = clamp01(st.k[x][j] * f);
                st.b[x][j] = (st.b[x][j] * f).clamp(-1.0, 1.0);
            }
        }
    }

    let mut active = vec![false; n];
    if send {
        active[s] = true;
        let (ks, bs) = (st.k[s][i], st.b[s][i]);
        let mut old_vals = vec![];
        let mut new_vals = vec![];
        let mut old_b = vec![];
        for &r in rs {
            let trs = st.t[r][s];
            let guess: f64 = (0..na).map(|q| st.m[q][i] * st.b[r][q]).sum::<f64>() / na as f64;
            let (mut nk, mut nb) = (st.k[r].clone(), st.b[r].clone());
            for j in 0..na {
                let dk = if i == j { st.w[r] * ks } else { 0.0 };
                let db = st.m[i][j] * trs * bs + st.m[i][j] * (1.0 - trs) * guess;
                let weight = if source_mode { st.w[r] * ks } else { dk };
                let (a, c) = oplus(st.k[r][j], st.b[r][j], dk, db, weight);
                nk[j] = a;
                nb[j] = c;
            }
            old_vals.push(st.k[r][i] * st.b[r][i]);
            old_b.push(st.b[r][i]);
            new_vals.push(nk[i] * nb[i]);
            st.k[r] = nk;
            st.b[r] = nb;
        }
        for (idx, &r) in rs.iter().enumerate() {
            let dt = 1.0 - (bs - old_b[idx]).abs();
            st.t[r][s] = clamp01(xi * st.t[r][s] + (1.0 - xi) * dt);
        }
        let dps = clamp01(
            old_vals
                .iter()
                .zip(&new_vals)
                .map(|(o, v)| (v - o).abs())
                .sum::<f64>()
                / rs.len() as f64,
        );
        st.p[s] = clamp01(st.p[s] + dps - st.p[s] * dps);

        for (idx, &r) in rs.iter().enumerate() {
            if !feedback[idx] {
                continue;
            }
            active[r] = true;
            let tsr = st.t[s][r];
            let (kr, br) = (st.k[r][i], st.b[r][i]);
            let old_si = (st.k[s][i], st.b[s][i]);
            for j in 0..na {
                let db = st.m[i][j] * tsr * br;
                let weight = if source_mode { st.w[s] * kr } else { 0.0 };
                let (a, c) = oplus(st.k[s][j], st.b[s][j], 0.0, db, weight);
                st.k[s][j] = a;
                st.b[s][j] = c;
            }
            let dt = 1.0 - (br - old_si.1).abs();
            st.t[s][r] = clamp01(xi * st.t[s][r] + (1.0 - xi) * dt);
            let dpr = clamp01((st.k[s][i] * st.b[s][i] - old_si.0 * old_si.1).abs());
            st.p[r] = clamp01(st.p[r] + dpr - st.p[r] * dpr);
        }
    }
    for x in 0..n {
        if !active[x] {
            st.p[x] *= 1.0 - dp;
        }
    }
    let du = std::iter::once(s)
        .chain(rs.iter().copied())
        .zip(&u0)
        .map(|(x, u)| st.utility(x) - u)
        .collect();
    (st, du)
}

/// Random micro-world with random states, ontology and trust.
pub fn random_world(rng: &mut impl Rng, n: usize, na: usize) -> World {
    let m: Vec<Vec<f64>> = (0..na)
        .map(|i| {
            (0..na)
                .map(|j| {
                    if i == j {
                        1.0
                    } else {
                        rng.random_range(-1.0..=1.0)
                    }
                })
                .collect()
        })
        .collect();
    let actors = (0..n)
        .map(|x| {
            let kb = (0..na)
                .map(|_| {
                    let k = if rng.random_bool(0.1) {
                        0.0
                    } else {
                        rng.random_range(0.0..=1.0)
                    };
                    let b = rng.random_range(-1.0..=1.0);
                    Assertion::new(k, b).unwrap()
                })
                .collect();
            let kappa: f64 = rng.random_range(0.0..=1.0);
            let rho: f64 = rng.random_range(0.0..=(1.0 - kappa));
            let pi = 1.0 - kappa - rho;
            let mut a = Actor::new(
                x,
                KnowledgeBase::new(kb),
                Personality { kappa, rho, pi },
                rng.random_range(0.0..=1.0),
            );
            a.popularity = rng.random_range(0.0..=1.0);
            a
        })
        .collect();
    let t: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    if x == y {
                        1.0
                    } else {
                        rng.random_range(0.0..=1.0)
                    }
                })
                .collect()
        })
        .collect();
    World::new(
        actors,
        TrustMatrix::from_rows(&t).unwrap(),
        Arc::new(Ontology::from_rows(&m).unwrap()),
    )
    .unwrap()
}

pub fn random_params(rng: &mut impl Rng) -> TransferParams {
    TransferParams {
        remembrance: if rng.random_bool(0.3) {
            1.0
        } else {
            rng.random_range(0.0..=1.0)
        },
        trust_memory: rng.random_range(0.0..=1.0),
        popularity_decay: rng.random_range(0.0..=0.2),
        belief_weight: if rng.random_bool(0.5) {
            BeliefWeight::Transferred
        } else {
            BeliefWeight::Source
        },
    }
}

/// Profile as a flat action vector: sender first.
pub fn actions(profile: &StrategyProfile) -> Vec<bool> {
    std::iter::once(profile.sender == SenderAction::Send)
        .chain(
            profile
                .receivers
                .iter()
                .map(|&r| r == ReceiverAction::Feedback),
        )
        .collect()
}

pub fn profile_of(actions: &[bool]) -> StrategyProfile {
    StrategyProfile {
        sender: if actions[0] {
            SenderAction::Send
        } else {
            SenderAction::Hold
        },
        receivers: actions[1..]
            .iter()
            .map(|&f| {
                if f {
                    ReceiverAction::Feedback
                } else {
                    ReceiverAction::Silent
                }
            })
            .collect(),
    }
}

/// Every action vector of `players` players, in lexicographic order.
pub fn all_action_vectors(players: usize) -> Vec<Vec<bool>> {
    (0..1usize << players)
        .map(|code| {
            (0..players)
                .map(|p| code >> (players - 1 - p) & 1 == 1)
                .collect()
        })
        .collect()
}

/// Brute-force pure equilibria over a payoff table keyed by action vectors.
pub fn oracle_nash(table: &HashMap<Vec<bool>, Vec<f64>>, players: usize) -> Vec<Vec<bool>> {
    all_action_vectors(players)
        .into_iter()
        .filter(|prof| {
            (0..players).all(|p| {
                let mut dev = prof.clone();
                dev[p] = !dev[p];
                table[&dev][p] <= table[prof][p]
            })
        })
        .collect()
}

pub fn oracle_regret(table: &HashMap<Vec<bool>, Vec<f64>>, prof: &[bool]) -> f64 {
    (0..prof.len())
        .map(|p| {
            let mut dev = prof.to_vec();
            dev[p] = !dev[p];
            (table[&dev][p] - table[prof][p]).max(0.0)
        })
        .sum()
}

/// Expected selection: best sender payoff among equilibria, else least total
/// regret; ties to the lexicographically first profile; hold drops feedback.
pub fn oracle_select(table: &HashMap<Vec<bool>, Vec<f64>>, players: usize) -> Vec<bool> {
    let nash = oracle_nash(table, players);
    let mut pick = if nash.is_empty() {
        let mut all = all_action_vectors(players);
        all.sort_by(|a, b| {
            oracle_regret(table, a)
                .partial_cmp(&oracle_regret(table, b))
                .unwrap()
                .then_with(|| a.cmp(b))
        });
        all[0].clone()
    } else {
        let mut nash = nash;
        nash.sort_by(|a, b| {
            table[b][0]
                .partial_cmp(&table[a][0])
                .unwrap()
                .then_with(|| a.cmp(b))
        });
        nash[0].clone()
    };
    if !pick[0] {
        pick.iter_mut().for_each(|f| *f = false);
    }
    pick
}
