//! Quantum fingerprints `|h_x⟩ = m^{-1/2} Σ_i |i⟩|E_i(x)⟩` compared by a
//! SWAP-test referee.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::{Basis, Gate};
use crate::QState;

/// Error-correcting code used to spread inputs apart before fingerprinting.
pub trait Code {
    /// Input length in bits.
    fn n(&self) -> usize;
    /// Codeword length.
    fn m(&self) -> usize;
    fn min_distance(&self) -> usize;
    fn encode_bits(&self, x: &[bool]) -> Vec<bool>;

    fn delta(&self) -> f64 {
        1.0 - self.min_distance() as f64 / self.m() as f64
    }

    fn encode(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.n() {
            return Err(Error::domain(format!(
                "input has {} bits, code expects {}",
                x.len(),
                self.n()
            )));
        }
        Ok(self.encode_bits(x))
    }
}

/// `E_i(x) = ⟨i, x⟩ mod 2` for `i < 2^n`; distinct codewords differ in
/// exactly half their positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HadamardCode {
    n: usize,
}

impl HadamardCode {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(Error::domain(format!("Hadamard code input length {n} out of range")));
        }
        Ok(Self { n })
    }
}

/// Big-endian bits of `value`.
pub fn bits_of(value: usize, n: usize) -> Vec<bool> {
    (0..n).rev().map(|k| (value >> k) & 1 == 1).collect()
}

fn value_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

impl Code for HadamardCode {
    fn n(&self) -> usize {
        self.n
    }

    fn m(&self) -> usize {
        1 << self.n
    }

    fn min_distance(&self) -> usize {
        self.m() / 2
    }

    fn encode_bits(&self, x: &[bool]) -> Vec<bool> {
        let x = value_of(x);
        (0..self.m()).map(|i| (i & x).count_ones() % 2 == 1).collect()
    }
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fingerprint {
    pub state: QState,
}

impl Fingerprint {
    pub fn num_qubits(&self) -> usize {
        self.state.num_sites()
    }
}

/// Builds `|h_x⟩` on `⌈log2 m⌉ + 1` qubits (index register, codeword bit).
pub fn fingerprint_state(x: &[bool], code: &dyn Code) -> Result<Fingerprint> {
    let word = code.encode(x)?;
    let m = word.len();
    let index_qubits = m.next_power_of_two().trailing_zeros() as usize;
    let dims = vec![2; index_qubits + 1];
    let amp = Complex::new(1.0 / (m as f64).sqrt(), 0.0);
    let mut amps = vec![Complex::new(0.0, 0.0); 1 << (index_qubits + 1)];
    for (i, &bit) in word.iter().enumerate() {
        amps[2 * i + usize::from(bit)] = amp;
    }
    Ok(Fingerprint {
        state: QState::from_amplitudes(&dims, amps)?,
    })
}

/// `ancilla ⊗ a ⊗ b` after the SWAP-test circuit, before readout.
fn swap_test_circuit(a: &QState, b: &QState) -> Result<QState> {
    if a.dims() != b.dims() {
        return Err(Error::domain("SWAP test needs registers of equal shape"));
    }
    if a.dims().iter().any(|&d| d != 2) {
        return Err(Error::domain("SWAP test is defined on qubit registers"));
    }
    let k = a.num_sites();
    let h = Gate::library("H")?;
    let cswap = Gate::library("CSWAP")?;
    let mut s = QState::basis(&[2], 0)?.tensor(a).tensor(b).apply(&h, &[0])?;
    for i in 0..k {
        s = s.apply(&cswap, &[0, 1 + i, 1 + k + i])?;
    }
    s.apply(&h, &[0])
}

/// Exact probability that the SWAP test accepts (ancilla reads 0).
pub fn swap_test_probability(a: &QState, b: &QState) -> Result<f64> {
    let s = swap_test_circuit(a, b)?;
    let d = s.outcome_distribution(&[0], &Basis::Computational)?;
    Ok(d.get(&vec![0]).copied().unwrap_or(0.0))
}

/// One sampled SWAP test.
pub fn swap_test<R: Rng + ?Sized>(a: &Fingerprint, b: &Fingerprint, rng: &mut R) -> Result<bool> {
    let s = swap_test_circuit(&a.state, &b.state)?;
    let (rec, _) = s.measure(&[0], &Basis::Computational, rng)?;
    Ok(rec.outcome[0] == 0)
}

/// Declares `x` and `y` equal iff `r` independent SWAP tests all accept.
pub fn referee_compare<R: Rng + ?Sized>(
    x: &[bool],
    y: &[bool],
    code: &dyn Code,
    r: usize,
    rng: &mut R,
) -> Result<bool> {
    if r == 0 {
        return Err(Error::domain("at least one repetition is required"));
    }
    let fx = fingerprint_state(x, code)?;
    let fy = fingerprint_state(y, code)?;
    for _ in 0..r {
        if !swap_test(&fx, &fy, rng)? {
            return Ok(false);
        }
    }
    Ok(true)
}
