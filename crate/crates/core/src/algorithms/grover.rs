use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{digits_of, Basis, Gate};
use crate::QState;

/// Largest search register.
pub const MAX_QUBITS: usize = 14;

/// Search space `[0, 2^n)` with a marked subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroverInstance {
    n: usize,
    marked: Vec<bool>,
}

impl GroverInstance {
    pub fn new(n: usize, predicate: impl Fn(usize) -> bool) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::domain(format!("{n} qubits outside 1..={MAX_QUBITS}")));
        }
        Ok(Self {
            n,
            marked: (0..1usize << n).map(predicate).collect(),
        })
    }

    pub fn with_marked(n: usize, marked: &[usize]) -> Result<Self> {
        Self::new(n, |x| marked.contains(&x))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    pub fn is_marked(&self, x: usize) -> bool {
        self.marked.get(x).copied().unwrap_or(false)
    }
}

/// `⌊(π/4)·√(2^n/k)⌋`, at least one.
pub fn default_iterations(n: usize, k: usize) -> usize {
    let ratio = (1u64 << n) as f64 / k.max(1) as f64;
    ((std::f64::consts::FRAC_PI_4 * ratio.sqrt()).floor() as usize).max(1)
}

/// `sin²((2T+1)θ)` with `sin θ = √(k/2^n)`.
pub fn theoretical_success(n: usize, k: usize, iterations: usize) -> f64 {
    let theta = ((k as f64) / (1u64 << n) as f64).sqrt().asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

/// `a_i → 2·mean − a_i` over the amplitudes of `sites`, i.e.
/// `H^⊗(2|0⟩⟨0| − I)H^⊗`. Uses the direct formula when `sites` is the whole
/// register.
pub fn inversion_about_average(state: &QState, sites: &[usize]) -> Result<QState> {
    if sites.iter().any(|&s| s >= state.num_sites() || state.dims()[s] != 2) {
        return Err(Error::domain("inversion sites must be existing qubits"));
    }
    let whole = sites.len() == state.num_sites() && {
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == sites.len()
    };
    if whole {
        let amps = state.amplitudes();
        let mean = amps.iter().sum::<Complex<f64>>() / amps.len() as f64;
        return QState::from_amplitudes(state.dims(), amps.iter().map(|&a| mean * 2.0 - a).collect());
    }
    let h = Gate::library("H")?;
    let mut s = state.clone();
    for &site in sites {
        s = s.apply(&h, &[site])?;
    }
    let dims = s.dims().to_vec();
    let s = s.flip_phase_where(|i| {
        let d = digits_of(i, &dims);
        sites.iter().any(|&site| d[site] != 0)
    });
    let mut s = s;
    for &site in sites {
        s = s.apply(&h, &[site])?;
    }
    Ok(s)
}

/// State after `iterations` rounds of oracle plus inversion.
pub fn grover_state(inst: &GroverInstance, iterations: usize) -> Result<QState> {
    let n = inst.n;
    let sites: Vec<usize> = (0..n).collect();
    let h = Gate::library("H")?;
    let mut s = QState::basis(&vec![2; n], 0)?;
    for &site in &sites {
        s = s.apply(&h, &[site])?;
    }
    for _ in 0..iterations {
        s = s.flip_phase_where(|x| inst.marked[x]);
        s = inversion_about_average(&s, &sites)?;
    }
    Ok(s)
}

/// Probability that measuring after `iterations` rounds gives a marked item.
pub fn success_probability(inst: &GroverInstance, iterations: usize) -> Result<f64> {
    let s = grover_state(inst, iterations)?;
    Ok(s.amplitudes()
        .iter()
        .enumerate()
        .filter(|(x, _)| inst.marked[*x])
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroverReport {
    /// Last measured value.
    pub x: usize,
    pub found: bool,
    pub iterations: usize,
    pub restarts: usize,
    /// Exact success probability of one run with this iteration count.
    pub success_probability: f64,
}

fn measure_register<R: Rng + ?Sized>(s: &QState, rng: &mut R) -> Result<usize> {
    let sites: Vec<usize> = (0..s.num_sites()).collect();
    let (rec, _) = s.measure(&sites, &Basis::Computational, rng)?;
    Ok(rec.outcome.iter().fold(0, |acc, &b| acc * 2 + b))
}

/// Runs the search once with the given or default iteration count. With no
/// marked item the run ends with `found == false`.
pub fn grover_search<R: Rng + ?Sized>(
    inst: &GroverInstance,
    iterations: Option<usize>,
    rng: &mut R,
) -> Result<GroverReport> {
    let t = iterations.unwrap_or_else(|| default_iterations(inst.n, inst.k()));
    let s = grover_state(inst, t)?;
    let p: f64 = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(x, _)| inst.marked[*x])
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let x = measure_register(&s, rng)?;
    Ok(GroverReport {
        x,
        found: inst.is_marked(x),
        iterations: t,
        restarts: 0,
        success_probability: p,
    })
}

/// Search without knowing `k`: each restart draws an iteration count
/// uniformly from `[0, ⌊(π/4)√2^n⌋]` and checks the measured candidate.
pub fn grover_search_unknown<R: Rng + ?Sized>(
    inst: &GroverInstance,
    max_restarts: usize,
    rng: &mut R,
) -> Result<GroverReport> {
    let cap = default_iterations(inst.n, 1);
    let mut last = None;
    for restart in 0..max_restarts.max(1) {
        let t = rng.random_range(0..=cap);
        let mut r = grover_search(inst, Some(t), rng)?;
        r.restarts = restart;
        if r.found {
            return Ok(r);
        }
        last = Some(r);
    }
    Ok(last.expect("at least one restart"))
}
