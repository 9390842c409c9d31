//! Quantized Prisoner's Dilemma and quantum contracts.

mod contract;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{Basis, Gate};
use crate::{GateOp, QState};

pub use contract::{
    contract_commit, expected_revocation_fidelity, hostage_exchange, Adversary, ContractState,
    ExchangeOutcome, ExchangeReport, Side,
};

/// Row-player and column-player payoffs, indexed `[row][col]` with
/// `0 = C` (or `F`) and `1 = D` (or `NF`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PayoffMatrix {
    pub entries: [[(f64, f64); 2]; 2],
}

impl PayoffMatrix {
    pub fn prisoners_dilemma() -> Self {
        Self {
            entries: [[(3.0, 3.0), (0.0, 5.0)], [(5.0, 0.0), (1.0, 1.0)]],
        }
    }

    /// Alice cooperates or defects; Bob turns out faithful or not.
    pub fn one_sided() -> Self {
        Self {
            entries: [[(1.0, 1.0), (-5.0, 5.0)], [(0.0, 0.0), (0.0, 0.0)]],
        }
    }

    /// With revocable data an unfaithful Bob gains nothing after the
    /// deadline and Alice loses nothing.
    pub fn one_sided_contracted() -> Self {
        let mut m = Self::one_sided();
        m.entries[0][1] = m.entries[0][0];
        m
    }

    pub fn get(&self, row: usize, col: usize) -> (f64, f64) {
        self.entries[row][col]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GameConfig {
    /// Entanglement, in `[0, π/2]`.
    pub gamma: f64,
    pub payoffs: PayoffMatrix,
}

impl GameConfig {
    pub fn new(gamma: f64, payoffs: PayoffMatrix) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&gamma) {
            return Err(Error::domain(format!("gamma = {gamma} outside [0, π/2]")));
        }
        Ok(Self { gamma, payoffs })
    }
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// `U(θ, φ) = [[e^{iφ}cos(θ/2), sin(θ/2)], [−sin(θ/2), e^{−iφ}cos(θ/2)]]`.
pub fn strategy(theta: f64, phi: f64) -> GateOp {
    let (s, co) = (theta / 2.0).sin_cos();
    Gate::single(
        format!("U({theta:.4},{phi:.4})"),
        [
            Complex::from_polar(co, phi),
            c(s, 0.0),
            c(-s, 0.0),
            Complex::from_polar(co, -phi),
        ],
    )
    .expect("strategy family is unitary")
}

pub fn cooperate() -> GateOp {
    Gate::library("I").expect("library gate").renamed("C")
}

pub fn defect() -> GateOp {
    Gate::library("X").expect("library gate").renamed("D")
}

/// `diag(i, −i)`.
pub fn quantum_q() -> GateOp {
    Gate::single("Q", [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]).expect("unitary")
}

/// `J = exp(iγ D⊗D/2)` with `D = U(π, 0)`; since `(D⊗D)² = I` this is
/// `cos(γ/2)·I + i sin(γ/2)·D⊗D`.
pub fn entangler(gamma: f64) -> GateOp {
    let d = strategy(std::f64::consts::PI, 0.0);
    let dd = d.kron(&d).expect("two qubits");
    let (s, co) = (gamma / 2.0).sin_cos();
    let matrix = (0..16)
        .map(|k| {
            let id = if k % 5 == 0 { c(co, 0.0) } else { c(0.0, 0.0) };
            id + dd.matrix()[k] * c(0.0, s)
        })
        .collect();
    Gate::new(format!("J({gamma:.4})"), matrix, 2, 2).expect("entangler is unitary")
}

/// Probabilities of `CC, CD, DC, DD` after `J†(Ua⊗Ub)J|CC⟩`.
pub fn ewl_distribution(ua: &GateOp, ub: &GateOp, config: &GameConfig) -> Result<[f64; 4]> {
    for g in [ua, ub] {
        if g.arity() != 1 || g.site_dim() != 2 {
            return Err(Error::domain(format!("strategy {} is not a single-qubit gate", g.name())));
        }
    }
    let j = entangler(config.gamma);
    let s = QState::basis(&[2, 2], 0)?
        .apply(&j, &[0, 1])?
        .apply(ua, &[0])?
        .apply(ub, &[1])?
        .apply(&j.dagger(), &[0, 1])?;
    let d = s.outcome_distribution(&[0, 1], &Basis::Computational)?;
    let mut p = [0.0; 4];
    for (k, v) in d {
        p[2 * k[0] + k[1]] = v;
    }
    Ok(p)
}

/// Expected payoffs for strategies given as 2×2 row-major matrices.
pub fn ewl_play(ua: [Complex<f64>; 4], ub: [Complex<f64>; 4], config: &GameConfig) -> Result<(f64, f64)> {
    ewl_payoffs(&Gate::single("Ua", ua)?, &Gate::single("Ub", ub)?, config)
}

pub fn ewl_payoffs(ua: &GateOp, ub: &GateOp, config: &GameConfig) -> Result<(f64, f64)> {
    let p = ewl_distribution(ua, ub, config)?;
    let mut out = (0.0, 0.0);
    for (k, pk) in p.iter().enumerate() {
        let (a, b) = config.payoffs.get(k / 2, k % 2);
        out.0 += pk * a;
        out.1 += pk * b;
    }
    Ok(out)
}

/// Grid of `U(θ, φ)` over `θ ∈ [0, π]`, `φ ∈ [0, π/2]`, endpoints included.
pub fn strategy_grid(resolution: usize) -> Vec<(f64, f64)> {
    let step = |k: usize, max: f64| max * k as f64 / (resolution - 1) as f64;
    let mut g = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            g.push((step(i, std::f64::consts::PI), step(j, std::f64::consts::FRAC_PI_2)));
        }
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Deviation {
    pub theta: f64,
    pub phi: f64,
    pub payoff: f64,
}

/// Alice's best grid response to Bob playing `against`.
pub fn best_deviation(against: &GateOp, config: &GameConfig, resolution: usize) -> Result<Deviation> {
    let mut best = Deviation { theta: 0.0, phi: 0.0, payoff: f64::NEG_INFINITY };
    for (theta, phi) in strategy_grid(resolution) {
        let (pa, _) = ewl_payoffs(&strategy(theta, phi), against, config)?;
        if pa > best.payoff {
            best = Deviation { theta, phi, payoff: pa };
        }
    }
    Ok(best)
}

/// True when neither player gains more than `1e-6` by deviating
/// unilaterally from `(s, s)` to any grid strategy.
pub fn nash_check(s: &GateOp, config: &GameConfig, resolution: usize) -> Result<bool> {
    if resolution < 8 {
        return Err(Error::domain("grid resolution must be at least 8"));
    }
    let (pa, pb) = ewl_payoffs(s, s, config)?;
    for (theta, phi) in strategy_grid(resolution) {
        let u = strategy(theta, phi);
        if ewl_payoffs(&u, s, config)?.0 > pa + 1e-6 || ewl_payoffs(s, &u, config)?.1 > pb + 1e-6 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Move {
    C,
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneSidedDecision {
    pub choice: Move,
    pub ev_cooperate: f64,
    pub ev_defect: f64,
    /// Probability of an unfaithful Bob at which Alice is indifferent, if
    /// the payoffs cross in `[0, 1]`.
    pub threshold: Option<f64>,
}

/// Alice cooperates iff cooperation has the larger expected payoff when Bob
/// is unfaithful with probability `p`.
pub fn one_sided_decision(p: f64, payoffs: &PayoffMatrix) -> Result<OneSidedDecision> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("p = {p} outside [0, 1]")));
    }
    let a = |r: usize, c: usize| payoffs.get(r, c).0;
    let ev = |r: usize| (1.0 - p) * a(r, 0) + p * a(r, 1);
    let (ev_c, ev_d) = (ev(0), ev(1));
    let gain_f = a(0, 0) - a(1, 0);
    let gain_nf = a(0, 1) - a(1, 1);
    let threshold = (gain_f != gain_nf)
        .then(|| gain_f / (gain_f - gain_nf))
        .filter(|t| (0.0..=1.0).contains(t));
    Ok(OneSidedDecision {
        choice: if ev_c > ev_d { Move::C } else { Move::D },
        ev_cooperate: ev_c,
        ev_defect: ev_d,
        threshold,
    })
}
