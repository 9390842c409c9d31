use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// The bit budget of a session: sifted length `n` less reconciliation
/// disclosures `k`, eavesdropper information `l`, sampled bits `r` and the
/// security margin `s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KeyBudget {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub s: usize,
}

impl KeyBudget {
    /// `N − K − L − R − S`, or `None` if nothing would remain.
    pub fn final_len(&self) -> Option<usize> {
        self.n
            .checked_sub(self.k + self.l + self.r + self.s)
            .filter(|&m| m > 0)
    }
}

/// Random binary Toeplitz matrix `T[i][j] = t[i − j + cols − 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Toeplitz {
    rows: usize,
    cols: usize,
    /// Diagonal bits, packed little-endian, one spare word of padding.
    diag: Vec<u64>,
}

fn pack(bits: impl ExactSizeIterator<Item = bool>) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64) + 1];
    for (i, b) in bits.enumerate() {
        if b {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

fn window(words: &[u64], offset: usize) -> u64 {
    let (q, r) = (offset / 64, offset % 64);
    let lo = words.get(q).copied().unwrap_or(0) >> r;
    if r == 0 {
        lo
    } else {
        lo | (words.get(q + 1).copied().unwrap_or(0) << (64 - r))
    }
}

impl Toeplitz {
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let len = rows + cols - 1;
        let diag = pack((0..len).map(|_| rng.random_bool(0.5)));
        Self { rows, cols, diag }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        let d = i + self.cols - 1 - j;
        (self.diag[d / 64] >> (d % 64)) & 1 == 1
    }

    /// `T·key` over GF(2).
    pub fn hash(&self, key: &[bool]) -> Result<Vec<bool>> {
        if key.len() != self.cols {
            return Err(Error::domain(format!(
                "key has {} bits, hash expects {}",
                key.len(),
                self.cols
            )));
        }
        // Row i pairs t[i + j'] with the reversed key bit key[cols − 1 − j'].
        let rev = pack(key.iter().rev().copied());
        let words = self.cols.div_ceil(64);
        Ok((0..self.rows)
            .map(|i| {
                let acc = (0..words).fold(0u64, |acc, w| acc ^ (window(&self.diag, i + 64 * w) & rev[w]));
                acc.count_ones() & 1 == 1
            })
            .collect())
    }
}

/// Compresses `key` to `N − K − L − R − S` bits with a Toeplitz hash drawn
/// from `rng`.
pub fn privacy_amplify<R: Rng + ?Sized>(
    key: &[bool],
    budget: &KeyBudget,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let m = budget
        .final_len()
        .ok_or_else(|| Error::Exhausted(format!("no secret bits remain from budget {budget:?}")))?;
    if m > key.len() {
        return Err(Error::domain(format!(
            "cannot hash {} bits up to {m}",
            key.len()
        )));
    }
    Toeplitz::random(m, key.len(), rng).hash(key)
}
