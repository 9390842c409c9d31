use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Parity-reconciliation schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReconcileConfig {
    /// Fixed block size; derived from the error-rate hint when `None`.
    pub block_size: Option<usize>,
    pub min_passes: usize,
    /// A pass that still finds a mismatched block after this many passes
    /// leaves the keys unverified and the check below decides.
    pub max_passes: usize,
    /// Random-subset parities compared after the last pass.
    pub verify_bits: usize,
}

impl Default for ReconcileConfig {
    fn default() -> Self {
        Self {
            block_size: None,
            min_passes: 2,
            max_passes: 16,
            verify_bits: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    /// Corrected error rate above `e_max`.
    ErrorRate,
    /// A verification parity still disagreed.
    Unverified,
    /// Privacy amplification would leave no key.
    KeyExhausted,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReconcileTranscript {
    pub block_size: usize,
    /// Parities disclosed (`K`), including bisection and verification.
    pub disclosed_parities: usize,
    pub discarded: usize,
    /// Positions of the input key dropped after disclosure.
    #[serde(skip)]
    pub discarded_positions: Vec<usize>,
    pub passes: usize,
    pub corrected: usize,
    pub bisection_steps: usize,
    /// Corrected errors over the input length.
    pub error_rate: f64,
    pub aborted: Option<AbortReason>,
}

/// Block size that makes two errors in one block unlikely.
pub fn block_size_for(qber_hint: f64, n: usize) -> usize {
    let rate = qber_hint.max(1.0 / n as f64);
    ((0.73 / rate).ceil() as usize).clamp(4, (n / 2).max(4))
}

/// Records a disclosed parity and the position it costs.
fn disclose(pos: usize, t: &mut ReconcileTranscript) -> usize {
    t.disclosed_parities += 1;
    t.discarded += 1;
    t.discarded_positions.push(pos);
    pos
}

fn parity(key: &[bool], positions: &[usize]) -> bool {
    positions.iter().fold(false, |acc, &i| acc ^ key[i])
}

/// Interactive parity reconciliation; Bob's key is corrected towards
/// Alice's.
///
/// Each pass applies a fresh shared permutation, compares block parities
/// and bisects mismatched blocks down to the erroneous bit. For every parity
/// disclosed, the last bit of the corresponding block is discarded once the
/// pass ends, so `discarded == disclosed_parities`. Passes repeat until one
/// finds no mismatch (after `min_passes`), then random-subset parities
/// verify the result.
pub fn reconcile<R: Rng + ?Sized>(
    alice: &[bool],
    bob: &[bool],
    qber_hint: f64,
    e_max: f64,
    config: &ReconcileConfig,
    rng: &mut R,
) -> Result<(Vec<bool>, Vec<bool>, ReconcileTranscript)> {
    let n = alice.len();
    if bob.len() != n {
        return Err(Error::domain("keys differ in length"));
    }
    if n < 8 {
        return Err(Error::domain(format!("key of {n} bits is too short to reconcile")));
    }
    let b = config.block_size.unwrap_or_else(|| block_size_for(qber_hint, n)).max(1);
    let a = alice;
    let mut bob = bob.to_vec();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut dropped = vec![false; n];
    let mut t = ReconcileTranscript {
        block_size: b,
        ..Default::default()
    };

    loop {
        let mut order = alive.clone();
        order.shuffle(rng);
        let mut mismatched = 0;
        let mut pass_drops = Vec::new();
        for block in order.chunks(b) {
            pass_drops.push(disclose(block[block.len() - 1], &mut t));
            if parity(a, block) == parity(&bob, block) {
                continue;
            }
            mismatched += 1;
            let mut part = block;
            while part.len() > 1 {
                let (left, right) = part.split_at(part.len() / 2);
                pass_drops.push(disclose(left[left.len() - 1], &mut t));
                t.bisection_steps += 1;
                part = if parity(a, left) != parity(&bob, left) { left } else { right };
            }
            bob[part[0]] = !bob[part[0]];
            t.corrected += 1;
        }
        for p in pass_drops {
            dropped[p] = true;
        }
        alive.retain(|&i| !dropped[i]);
        t.passes += 1;
        t.error_rate = t.corrected as f64 / n as f64;
        if t.error_rate > e_max {
            t.aborted = Some(AbortReason::ErrorRate);
            break;
        }
        let done = mismatched == 0 && t.passes >= config.min_passes;
        if done || t.passes >= config.max_passes || alive.len() < 2 {
            break;
        }
    }

    if t.aborted.is_none() {
        for _ in 0..config.verify_bits {
            if alive.len() < 2 {
                break;
            }
            let subset: Vec<usize> = alive.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
            let Some(&last) = subset.last() else { continue };
            let agree = parity(a, &subset) == parity(&bob, &subset);
            disclose(last, &mut t);
            dropped[last] = true;
            alive.retain(|&i| i != last);
            if !agree {
                t.aborted = Some(AbortReason::Unverified);
                break;
            }
        }
    }

    let a_out = alive.iter().map(|&i| a[i]).collect();
    let b_out = alive.iter().map(|&i| bob[i]).collect();
    Ok((a_out, b_out, t))
}
