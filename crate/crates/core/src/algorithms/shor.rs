use rand::Rng;
use serde::Serialize;

use super::qft::qft;
use crate::error::{Error, Result};
use crate::qsim::{Basis, Gate, MAX_SITES};
use crate::QState;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Smallest `r ≥ 1` with `y^r ≡ 1 (mod m)`.
pub fn classical_order(y: u64, m: u64) -> Option<u64> {
    if gcd(y, m) != 1 {
        return None;
    }
    let mut v = y % m;
    for r in 1..=m {
        if v == 1 {
            return Some(r);
        }
        v = v * y % m;
    }
    None
}

fn bits_for(x: u64) -> usize {
    (64 - x.leading_zeros()) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderFindingInstance {
    pub m: u64,
    pub y: u64,
    /// First-register size, `M² ≤ 2^n < 2M²`.
    pub n: usize,
    /// Second-register size, `⌈log2 M⌉`.
    pub w: usize,
}

impl OrderFindingInstance {
    pub fn new(m: u64, y: u64) -> Result<Self> {
        if m < 3 {
            return Err(Error::domain(format!("modulus {m} too small")));
        }
        if !(2..m).contains(&y) || gcd(y, m) != 1 {
            return Err(Error::domain(format!("y = {y} must be coprime to and below {m}")));
        }
        let n = bits_for(m * m - 1);
        let w = bits_for(m - 1);
        if n + w > MAX_SITES {
            return Err(Error::domain(format!("M = {m} needs {} qubits", n + w)));
        }
        Ok(Self { m, y, n, w })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderAttempt {
    /// First-register readout after the Fourier transform.
    pub c: u64,
    /// Validated order, or `None` when this readout was inconclusive.
    pub period: Option<u64>,
}

/// Continued-fraction convergent denominators of `c / 2^n`.
fn convergent_denominators(c: u64, n: usize) -> Vec<u64> {
    let (mut num, mut den) = (c, 1u64 << n);
    let (mut q_prev, mut q) = (1u64, 0u64);
    let mut out = Vec::new();
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num % den);
        (q_prev, q) = (q, a.saturating_mul(q).saturating_add(q_prev));
        out.push(q);
    }
    out
}

fn prime_factors(mut r: u64) -> Vec<u64> {
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= r {
        if r % p == 0 {
            ps.push(p);
            while r % p == 0 {
                r /= p;
            }
        }
        p += 1;
    }
    if r > 1 {
        ps.push(r);
    }
    ps
}

/// Largest multiple of a convergent denominator tried as a period; covers
/// readouts `c/2^n ≈ j/r` where `gcd(j, r) > 1`.
const MAX_MULTIPLE: u64 = 4;

/// Turns a readout into the order of `y`: try each convergent denominator
/// `2 ≤ q ≤ M` and its small multiples, keep those with `y^r ≡ 1`, and strip
/// superfluous prime factors.
fn extract_period(c: u64, inst: &OrderFindingInstance) -> Option<u64> {
    let (y, m) = (inst.y, inst.m);
    let mut best: Option<u64> = None;
    for q in convergent_denominators(c, inst.n) {
        if q < 2 || q > m {
            continue;
        }
        if let Some(r) = (1..=MAX_MULTIPLE)
            .map(|k| k * q)
            .find(|&r| r <= m && mod_pow(y, r, m) == 1)
        {
            best = Some(best.map_or(r, |b| b.min(r)));
        }
    }
    let mut r = best?;
    for p in prime_factors(r) {
        while r % p == 0 && mod_pow(y, r / p, m) == 1 {
            r /= p;
        }
    }
    Some(r)
}

/// One run of the quantum order-finding routine.
pub fn order_find<R: Rng + ?Sized>(inst: &OrderFindingInstance, rng: &mut R) -> Result<OrderAttempt> {
    let (n, w) = (inst.n, inst.w);
    let dims = vec![2; n + w];
    let h = Gate::library("H")?;
    let mut s = QState::basis(&dims, 0)?;
    for site in 0..n {
        s = s.apply(&h, &[site])?;
    }
    // |a, z⟩ → |a, z ⊕ y^a mod M⟩
    let mask = (1usize << w) - 1;
    let table: Vec<usize> = (0..1u64 << n).map(|a| mod_pow(inst.y, a, inst.m) as usize).collect();
    s = s.permute_basis(|i| {
        let (a, z) = (i >> w, i & mask);
        (a << w) | (z ^ table[a])
    })?;
    let second: Vec<usize> = (n..n + w).collect();
    let (rec, _) = s.measure(&second, &Basis::Computational, rng)?;
    let first = s.condition_on(&second, &rec.outcome)?;
    let sites: Vec<usize> = (0..n).collect();
    let out = qft(&first, &sites)?;
    let (rec, _) = out.measure(&sites, &Basis::Computational, rng)?;
    let c = rec.outcome.iter().fold(0u64, |acc, &b| acc * 2 + b as u64);
    Ok(OrderAttempt {
        c,
        period: extract_period(c, inst),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptKind {
    /// `gcd(y, M) > 1` already gave a factor.
    GcdShortcut,
    Inconclusive,
    OddOrder,
    /// `y^{r/2} ≡ −1 (mod M)`.
    MinusOne,
    Factor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AttemptRecord {
    pub y: u64,
    pub kind: AttemptKind,
    pub order: Option<u64>,
    pub factor: Option<u64>,
}

/// Steps 1–7 for a given base `y`.
pub fn shor_attempt<R: Rng + ?Sized>(m: u64, y: u64, rng: &mut R) -> Result<AttemptRecord> {
    let record = |kind, order, factor| AttemptRecord { y, kind, order, factor };
    let g = gcd(y, m);
    if g > 1 {
        return Ok(record(AttemptKind::GcdShortcut, None, Some(g)));
    }
    let inst = OrderFindingInstance::new(m, y)?;
    let Some(r) = order_find(&inst, rng)?.period else {
        return Ok(record(AttemptKind::Inconclusive, None, None));
    };
    if r % 2 == 1 {
        return Ok(record(AttemptKind::OddOrder, Some(r), None));
    }
    let half = mod_pow(y, r / 2, m);
    if half == m - 1 {
        return Ok(record(AttemptKind::MinusOne, Some(r), None));
    }
    let f = [gcd(half + m - 1, m), gcd(half + 1, m)]
        .into_iter()
        .find(|&f| f > 1 && f < m);
    Ok(match f {
        Some(f) => record(AttemptKind::Factor, Some(r), Some(f)),
        None => record(AttemptKind::Inconclusive, Some(r), None),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShorReport {
    pub m: u64,
    pub factor: u64,
    pub cofactor: u64,
    pub attempts: Vec<AttemptRecord>,
}

fn is_prime(m: u64) -> bool {
    m >= 2 && (2..).take_while(|p| p * p <= m).all(|p| m % p != 0)
}

fn is_prime_power(m: u64) -> bool {
    let ps = prime_factors(m);
    ps.len() == 1
}

/// Repeats attempts with uniformly random `y ∈ [2, M−1]`.
pub fn shor_factor<R: Rng + ?Sized>(m: u64, rng: &mut R, max_attempts: usize) -> Result<ShorReport> {
    if m < 15 || m % 2 == 0 || is_prime(m) || is_prime_power(m) {
        return Err(Error::domain(format!("{m} is not an odd composite with two distinct primes")));
    }
    let mut attempts = Vec::new();
    for _ in 0..max_attempts {
        let y = rng.random_range(2..m);
        let rec = shor_attempt(m, y, rng)?;
        attempts.push(rec);
        if let Some(f) = rec.factor {
            assert!(f > 1 && f < m && m % f == 0, "reported factor must divide M");
            return Ok(ShorReport { m, factor: f, cofactor: m / f, attempts });
        }
    }
    Err(Error::Exhausted(format!("no factor of {m} after {max_attempts} attempts")))
}

/// Fraction of coprime bases whose order yields a factor.
pub fn classical_success_rate(m: u64) -> f64 {
    let (mut good, mut total) = (0, 0);
    for y in 2..m {
        let Some(r) = classical_order(y, m) else { continue };
        total += 1;
        if r % 2 == 0 && mod_pow(y, r / 2, m) != m - 1 {
            good += 1;
        }
    }
    good as f64 / total as f64
}

/// `1 − 2^{1−k}` with `k` the number of distinct odd prime factors of `m`.
pub fn shor_bound(m: u64) -> f64 {
    let k = prime_factors(m).into_iter().filter(|&p| p != 2).count() as i32;
    1.0 - 2f64.powi(1 - k)
}
