//! Detectable broadcast among a sender `S` and receivers `R0`, `R1` using
//! shared Aharonov triplets measured in the computational basis.
//!
//! A triplet is stored as `(S, R0, R1)` outcomes; bits `0`/`1` map to
//! qutrit values `0`/`1` and `2` is the value neither bit can take.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{Basis, NamedState, PERMUTATIONS_3};
use crate::QState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    Sender,
    R0,
    R1,
}

/// How triplet outcomes are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DealMode {
    /// Uniform random permutation of `(0, 1, 2)`.
    #[default]
    Classical,
    /// Measure a simulated Aharonov state per triplet.
    StateVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripletPool {
    triplets: Vec<[u8; 3]>,
}

impl TripletPool {
    pub fn from_triplets(triplets: Vec<[u8; 3]>) -> Result<Self> {
        for t in &triplets {
            let mut s = *t;
            s.sort_unstable();
            if s != [0, 1, 2] {
                return Err(Error::domain(format!("{t:?} is not a permutation of (0, 1, 2)")));
            }
        }
        Ok(Self { triplets })
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn triplets(&self) -> &[[u8; 3]] {
        &self.triplets
    }

    pub fn value(&self, j: usize, role: Role) -> u8 {
        self.triplets[j][role as usize]
    }
}

pub fn deal_triplets<R: Rng + ?Sized>(m: usize, mode: DealMode, rng: &mut R) -> Result<TripletPool> {
    if m == 0 {
        return Err(Error::domain("at least one triplet is required"));
    }
    let triplets = match mode {
        DealMode::Classical => (0..m)
            .map(|_| {
                let mut t = [0u8, 1, 2];
                t.shuffle(rng);
                t
            })
            .collect(),
        DealMode::StateVector => {
            let state: QState = NamedState::Aharonov3.build();
            (0..m)
                .map(|_| {
                    let (rec, _) = state.measure(&[0, 1, 2], &Basis::Computational, rng)?;
                    Ok([rec.outcome[0] as u8, rec.outcome[1] as u8, rec.outcome[2] as u8])
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    TripletPool::from_triplets(triplets)
}

/// Exact probability of each `(S, R0, R1)` outcome, from the state vector.
pub fn triplet_distribution() -> Vec<([u8; 3], f64)> {
    let state: QState = NamedState::Aharonov3.build();
    let d = state
        .outcome_distribution(&[0, 1, 2], &Basis::Computational)
        .expect("three-site distribution");
    PERMUTATIONS_3
        .iter()
        .map(|(p, _)| {
            let key = p.to_vec();
            ([p[0] as u8, p[1] as u8, p[2] as u8], d.get(&key).copied().unwrap_or(0.0))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SenderStrategy {
    Honest,
    /// Sends 0 to `R0` and 1 to `R1`, each with a self-consistent index set.
    CheatSplit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    AllHonest,
    SCheats,
    R0Cheats,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_honest" => Ok(Scenario::AllHonest),
            "s_cheats" => Ok(Scenario::SCheats),
            "r0_cheats" => Ok(Scenario::R0Cheats),
            _ => Err(Error::Lookup { kind: "byzantine scenario", name: s.into() }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SendPhase {
    /// Bits sent to `R0`, `R1`.
    pub x: [bool; 2],
    pub j: [Vec<usize>; 2],
}

fn indices_where(pool: &TripletPool, role: Role, value: u8) -> Vec<usize> {
    (0..pool.len()).filter(|&j| pool.value(j, role) == value).collect()
}

pub fn send_phase(pool: &TripletPool, x: bool, strategy: SenderStrategy) -> SendPhase {
    let (x0, x1) = match strategy {
        SenderStrategy::Honest => (x, x),
        SenderStrategy::CheatSplit => (false, true),
    };
    SendPhase {
        x: [x0, x1],
        j: [
            indices_where(pool, Role::Sender, u8::from(x0)),
            indices_where(pool, Role::Sender, u8::from(x1)),
        ],
    }
}

/// Qualitative acceptance levels made concrete.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// Share of proof indices that must lie outside the checker's own set.
    pub a: f64,
    /// Share of proof indices where the checker must hold `2`.
    pub b: f64,
    /// Minimum proof size as a fraction of `m`.
    pub min_proof: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { a: 0.75, b: 0.75, min_proof: 1.0 / 12.0 }
    }
}

impl Thresholds {
    /// Smallest index set a receiver accepts: `m/6`, relaxed for small `m`
    /// to five standard deviations below the honest mean `m/3`.
    pub fn min_index_set(&self, m: usize) -> usize {
        let mf = m as f64;
        let sigma = (2.0 * mf / 9.0).sqrt();
        let floor = (mf / 3.0 - 5.0 * sigma).floor().max(0.0) as usize;
        ((mf / 6.0).ceil() as usize).min(floor)
    }

    pub fn min_proof_size(&self, m: usize) -> usize {
        (self.min_proof * m as f64).ceil() as usize
    }
}

/// `Some(x_p)` when every indexed triplet shows a value other than `x_p` for
/// receiver `p`, and the set is large enough; `None` (`?`) otherwise.
pub fn consistency_check(
    pool: &TripletPool,
    receiver: Role,
    x_p: bool,
    j_p: &[usize],
    thresholds: &Thresholds,
) -> Option<bool> {
    let v = u8::from(x_p);
    let ok = j_p.len() >= thresholds.min_index_set(pool.len())
        && j_p.iter().all(|&j| j < pool.len() && pool.value(j, receiver) != v);
    ok.then_some(x_p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Bit(bool),
    Abort,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BroadcastOutcome {
    pub flags: [Option<bool>; 2],
    /// Decisions of `S`, `R0`, `R1`.
    pub decisions: [Decision; 3],
    pub detected_cheater: Option<Role>,
    /// Whether the step-6 proof exchange took place, and its verdict.
    pub proof_accepted: Option<bool>,
}

impl BroadcastOutcome {
    pub fn receivers_consistent(&self) -> bool {
        self.decisions[1] == self.decisions[2]
    }
}

/// Does `R1` accept `R0`'s proof for `y0`?
pub fn check_proof(
    pool: &TripletPool,
    proof: &[usize],
    j1: &[usize],
    thresholds: &Thresholds,
) -> bool {
    if proof.len() < thresholds.min_proof_size(pool.len()).max(1) {
        return false;
    }
    if proof.iter().any(|&k| k >= pool.len()) {
        return false;
    }
    let own: HashSet<usize> = j1.iter().copied().collect();
    let n = proof.len() as f64;
    let outside = proof.iter().filter(|k| !own.contains(k)).count() as f64;
    let twos = proof.iter().filter(|&&k| pool.value(k, Role::R1) == 2).count() as f64;
    outside / n >= thresholds.a && twos / n >= thresholds.b
}

/// Steps 3–6: flag exchange, adoption and, for conflicting definite flags,
/// the proof sent by `R0`.
pub fn resolve(
    sender_bit: bool,
    flags: [Option<bool>; 2],
    proof: &[usize],
    j1: &[usize],
    pool: &TripletPool,
    thresholds: &Thresholds,
) -> BroadcastOutcome {
    let s = Decision::Bit(sender_bit);
    let both = |d: Decision| BroadcastOutcome {
        flags,
        decisions: [s, d, d],
        detected_cheater: None,
        proof_accepted: None,
    };
    match flags {
        [Some(a), Some(b)] if a == b => both(Decision::Bit(a)),
        [Some(a), None] | [None, Some(a)] => both(Decision::Bit(a)),
        [None, None] => both(Decision::Abort),
        [Some(y0), Some(y1)] => {
            let accepted = check_proof(pool, proof, j1, thresholds);
            let r1 = if accepted { y0 } else { y1 };
            BroadcastOutcome {
                flags,
                decisions: [s, Decision::Bit(y0), Decision::Bit(r1)],
                // an accepted proof contradicts R1's consistent view: S lied
                detected_cheater: Some(if accepted { Role::Sender } else { Role::R0 }),
                proof_accepted: Some(accepted),
            }
        }
    }
}

/// One complete broadcast of bit `x` over `m` triplets.
pub fn run_broadcast<R: Rng + ?Sized>(
    m: usize,
    x: bool,
    scenario: Scenario,
    mode: DealMode,
    rng: &mut R,
) -> Result<BroadcastOutcome> {
    if m < 12 {
        return Err(Error::domain(format!("m = {m}; at least 12 triplets are required")));
    }
    let th = Thresholds::default();
    let pool = deal_triplets(m, mode, rng)?;
    let strategy = match scenario {
        Scenario::SCheats => SenderStrategy::CheatSplit,
        _ => SenderStrategy::Honest,
    };
    let sent = send_phase(&pool, x, strategy);
    let honest_flag0 = consistency_check(&pool, Role::R0, sent.x[0], &sent.j[0], &th);
    let y1 = consistency_check(&pool, Role::R1, sent.x[1], &sent.j[1], &th);
    let (y0, proof) = match scenario {
        Scenario::R0Cheats => {
            // claim the opposite bit and offer every index where R0 holds
            // the bit it actually received
            let claim = !sent.x[0];
            (Some(claim), indices_where(&pool, Role::R0, u8::from(!claim)))
        }
        _ => {
            let proof = match honest_flag0 {
                Some(y0) => sent.j[0]
                    .iter()
                    .copied()
                    .filter(|&k| pool.value(k, Role::R0) == u8::from(!y0))
                    .collect(),
                None => Vec::new(),
            };
            (honest_flag0, proof)
        }
    };
    Ok(resolve(x, [y0, y1], &proof, &sent.j[1], &pool, &th))
}
