use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qsim::Gate;
use crate::{GateOp, QState};

/// Gate list on sites `0..n`, applied in order.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub n: usize,
    pub ops: Vec<(GateOp, Vec<usize>)>,
}

impl Circuit {
    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }

    /// Runs the circuit with local site `i` mapped to `sites[i]`.
    pub fn run(&self, state: &QState, sites: &[usize]) -> Result<QState> {
        if sites.len() != self.n {
            return Err(Error::domain("circuit width does not match the site list"));
        }
        let mut s = state.clone();
        for (g, targets) in &self.ops {
            let mapped: Vec<usize> = targets.iter().map(|&t| sites[t]).collect();
            s = s.apply(g, &mapped)?;
        }
        Ok(s)
    }

    pub fn inverse(&self) -> Self {
        Self {
            n: self.n,
            ops: self.ops.iter().rev().map(|(g, t)| (g.dagger(), t.clone())).collect(),
        }
    }
}

/// Hadamards and controlled phases only, `n(n+1)/2` gates. The output
/// register comes out in reversed site order, which [`qft`] undoes by
/// relabelling sites rather than with gates.
pub fn qft_circuit(n: usize) -> Circuit {
    let h = Gate::library("H").expect("library gate");
    let mut ops = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        ops.push((h.clone(), vec![j]));
        for k in j + 1..n {
            let theta = 2.0 * std::f64::consts::PI / f64::from(1u32 << (k - j + 1));
            ops.push((Gate::controlled_phase(theta), vec![k, j]));
        }
    }
    Circuit { n, ops }
}

fn reverse_sites(state: &QState, sites: &[usize]) -> Result<QState> {
    let mut order: Vec<usize> = (0..state.num_sites()).collect();
    for (i, &s) in sites.iter().enumerate() {
        order[s] = sites[sites.len() - 1 - i];
    }
    state.reorder_sites(&order)
}

fn check_qubits(state: &QState, sites: &[usize]) -> Result<()> {
    if sites.is_empty() || sites.iter().any(|&s| s >= state.num_sites() || state.dims()[s] != 2) {
        return Err(Error::domain("QFT sites must be existing qubits"));
    }
    Ok(())
}

/// `|a⟩ → 2^{-n/2} Σ_c e^{2πi ac/2^n} |c⟩` on `sites` (first site most
/// significant).
pub fn qft(state: &QState, sites: &[usize]) -> Result<QState> {
    check_qubits(state, sites)?;
    let s = qft_circuit(sites.len()).run(state, sites)?;
    reverse_sites(&s, sites)
}

pub fn inverse_qft(state: &QState, sites: &[usize]) -> Result<QState> {
    check_qubits(state, sites)?;
    let s = reverse_sites(state, sites)?;
    qft_circuit(sites.len()).inverse().run(&s, sites)
}

/// The transform as a dense matrix, for checking the circuit.
pub fn qft_matrix(n: usize) -> GateOp {
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    let matrix = (0..dim * dim)
        .map(|k| {
            let (c, a) = (k / dim, k % dim);
            let angle = 2.0 * std::f64::consts::PI * ((a * c) % dim) as f64 / dim as f64;
            Complex::from_polar(norm, angle)
        })
        .collect();
    Gate::new(format!("QFT{n}"), matrix, n, 2).expect("Fourier matrix is unitary")
}
