//! BB84 and B92 key distribution with an intercept-resend eavesdropper,
//! followed by sifting, error estimation, parity reconciliation and
//! Toeplitz privacy amplification.
//!
//! Pulses are simulated at the symbol level: a polarization measured in its
//! own basis returns its bit, otherwise a fair coin. [`measurement_probabilities`]
//! derives the same table from the state-vector simulator, and
//! [`ReceiveMode::StateVector`] runs every pulse through it instead.

mod amplify;
mod b92;
mod reconcile;
mod session;

use std::fmt;
use std::io::{self, Write};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{Basis, Gate};
use crate::QState;

pub use amplify::{privacy_amplify, KeyBudget, Toeplitz};
pub use b92::{b92_receive, b92_session, b92_transmit};
pub use reconcile::{block_size_for, reconcile, AbortReason, ReconcileConfig, ReconcileTranscript};
pub use session::{
    run_bb84, run_bb84_session, QkdParams, ReceiveMode, Session, SessionReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PolBasis {
    /// `+`: horizontal/vertical.
    Rectilinear,
    /// `×`: 45°/135°.
    Diagonal,
}

impl PolBasis {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random_bool(0.5) {
            PolBasis::Diagonal
        } else {
            PolBasis::Rectilinear
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PolBasis::Rectilinear => '+',
            PolBasis::Diagonal => 'x',
        }
    }
}

impl fmt::Display for PolBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Polarization {
    H,
    V,
    D45,
    D135,
}

impl Polarization {
    pub fn encode(basis: PolBasis, bit: bool) -> Self {
        match (basis, bit) {
            (PolBasis::Rectilinear, false) => Polarization::H,
            (PolBasis::Rectilinear, true) => Polarization::V,
            (PolBasis::Diagonal, true) => Polarization::D45,
            (PolBasis::Diagonal, false) => Polarization::D135,
        }
    }

    pub fn basis(self) -> PolBasis {
        match self {
            Polarization::H | Polarization::V => PolBasis::Rectilinear,
            Polarization::D45 | Polarization::D135 => PolBasis::Diagonal,
        }
    }

    pub fn bit(self) -> bool {
        matches!(self, Polarization::V | Polarization::D45)
    }

    /// The orthogonal polarization in the same basis.
    pub fn flipped(self) -> Self {
        Self::encode(self.basis(), !self.bit())
    }

    /// Single-qubit state: `H=|0⟩, V=|1⟩, D45=|+⟩, D135=|−⟩`.
    pub fn state(self) -> QState {
        let h = Gate::library("H").expect("library gate");
        let zero = QState::basis(&[2], 0).expect("qubit");
        let one = QState::basis(&[2], 1).expect("qubit");
        match self {
            Polarization::H => zero,
            Polarization::V => one,
            Polarization::D45 => zero.apply(&h, &[0]).expect("qubit"),
            Polarization::D135 => one.apply(&h, &[0]).expect("qubit"),
        }
    }

    /// Symbol-level measurement.
    pub fn measure<R: Rng + ?Sized>(self, basis: PolBasis, rng: &mut R) -> bool {
        if basis == self.basis() {
            self.bit()
        } else {
            rng.random_bool(0.5)
        }
    }

    /// Measurement through the state-vector simulator.
    pub fn measure_state<R: Rng + ?Sized>(self, basis: PolBasis, rng: &mut R) -> bool {
        let (rec, _) = self
            .state()
            .measure(&[0], &qsim_basis(basis), rng)
            .expect("single-qubit measurement");
        outcome_bit(basis, rec.outcome[0])
    }
}

fn qsim_basis(basis: PolBasis) -> Basis {
    match basis {
        PolBasis::Rectilinear => Basis::Computational,
        PolBasis::Diagonal => Basis::diagonal(),
    }
}

/// Bit carried by computational outcome `k` after rotating into `basis`.
fn outcome_bit(basis: PolBasis, k: usize) -> bool {
    match basis {
        PolBasis::Rectilinear => k == 1,
        // |+⟩ reads as 0 after the Hadamard and carries bit 1
        PolBasis::Diagonal => k == 0,
    }
}

/// `[P(bit 0), P(bit 1)]` for measuring `pol` in `basis`, from the
/// state-vector simulator.
pub fn measurement_probabilities(pol: Polarization, basis: PolBasis) -> [f64; 2] {
    let d = pol
        .state()
        .outcome_distribution(&[0], &qsim_basis(basis))
        .expect("single-qubit distribution");
    let mut p = [0.0; 2];
    for (k, v) in d {
        p[usize::from(outcome_bit(basis, k[0]))] += v;
    }
    p
}

/// Alice's raw material for one session.
#[derive(Clone, Debug, PartialEq)]
pub struct Transmission {
    pub bits: Vec<bool>,
    pub bases: Vec<PolBasis>,
    pub pulses: Vec<Polarization>,
}

pub fn bb84_transmit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Transmission> {
    if n == 0 {
        return Err(Error::domain("at least one pulse is required"));
    }
    let mut t = Transmission {
        bits: Vec::with_capacity(n),
        bases: Vec::with_capacity(n),
        pulses: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let bit = rng.random_bool(0.5);
        let basis = PolBasis::random(rng);
        t.bits.push(bit);
        t.bases.push(basis);
        t.pulses.push(Polarization::encode(basis, bit));
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EveAction {
    Pass,
    Intercept { basis: PolBasis, bit: bool },
}

impl fmt::Display for EveAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EveAction::Pass => f.write_str("none"),
            EveAction::Intercept { basis, bit } => write!(f, "intercept{}{}", basis, u8::from(*bit)),
        }
    }
}

fn check_probability(name: &str, v: f64, max: f64) -> Result<()> {
    if !(0.0..=max).contains(&v) {
        return Err(Error::domain(format!("{name} = {v} outside [0, {max}]")));
    }
    Ok(())
}

/// Passes pulses through an intercept-resend eavesdropper (attack
/// probability `eve_lambda`) and then a channel that flips each pulse within
/// its basis with probability `channel_flip`.
pub fn channel_transmit<R: Rng + ?Sized>(
    pulses: &[Polarization],
    eve_lambda: f64,
    channel_flip: f64,
    rng: &mut R,
) -> Result<(Vec<Polarization>, Vec<EveAction>)> {
    check_probability("eve_lambda", eve_lambda, 1.0)?;
    check_probability("channel_flip", channel_flip, 0.5)?;
    let mut out = Vec::with_capacity(pulses.len());
    let mut eve = Vec::with_capacity(pulses.len());
    for &p in pulses {
        let mut p = p;
        if eve_lambda > 0.0 && rng.random_bool(eve_lambda) {
            let basis = PolBasis::random(rng);
            let bit = p.measure(basis, rng);
            p = Polarization::encode(basis, bit);
            eve.push(EveAction::Intercept { basis, bit });
        } else {
            eve.push(EveAction::Pass);
        }
        if channel_flip > 0.0 && rng.random_bool(channel_flip) {
            p = p.flipped();
        }
        out.push(p);
    }
    Ok((out, eve))
}

/// Bob's random-basis measurements.
pub fn bb84_receive<R: Rng + ?Sized>(
    pulses: &[Polarization],
    mode: ReceiveMode,
    rng: &mut R,
) -> (Vec<PolBasis>, Vec<bool>) {
    let mut bases = Vec::with_capacity(pulses.len());
    let mut bits = Vec::with_capacity(pulses.len());
    for &p in pulses {
        let basis = PolBasis::random(rng);
        bases.push(basis);
        bits.push(match mode {
            ReceiveMode::Symbolic => p.measure(basis, rng),
            ReceiveMode::StateVector => p.measure_state(basis, rng),
        });
    }
    (bases, bits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sifted {
    pub alice: Vec<bool>,
    pub bob: Vec<bool>,
    pub kept: Vec<usize>,
}

/// Keeps exactly the positions where the bases agree.
pub fn sift(
    alice_bases: &[PolBasis],
    bob_bases: &[PolBasis],
    alice_bits: &[bool],
    bob_bits: &[bool],
) -> Result<Sifted> {
    let n = alice_bases.len();
    if bob_bases.len() != n || alice_bits.len() != n || bob_bits.len() != n {
        return Err(Error::domain("sifting inputs differ in length"));
    }
    let kept: Vec<usize> = (0..n).filter(|&i| alice_bases[i] == bob_bases[i]).collect();
    Ok(Sifted {
        alice: kept.iter().map(|&i| alice_bits[i]).collect(),
        bob: kept.iter().map(|&i| bob_bits[i]).collect(),
        kept,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QberEstimate {
    pub qber: f64,
    /// Bits disclosed and removed from both keys (`R`).
    pub revealed: usize,
    pub alice: Vec<bool>,
    pub bob: Vec<bool>,
}

/// Compares a uniformly sampled subset of `⌊fraction·N⌋` positions in the
/// open and drops them from both keys.
pub fn estimate_qber<R: Rng + ?Sized>(
    alice: &[bool],
    bob: &[bool],
    sample_fraction: f64,
    rng: &mut R,
) -> Result<QberEstimate> {
    if alice.len() != bob.len() {
        return Err(Error::domain("keys differ in length"));
    }
    if !(sample_fraction > 0.0 && sample_fraction < 1.0) {
        return Err(Error::domain(format!("sample_fraction {sample_fraction} outside (0, 1)")));
    }
    let r = (sample_fraction * alice.len() as f64).floor() as usize;
    if r == 0 {
        return Err(Error::domain("QBER sample is empty"));
    }
    let mut revealed = vec![false; alice.len()];
    for i in rand::seq::index::sample(rng, alice.len(), r) {
        revealed[i] = true;
    }
    let errors = (0..alice.len())
        .filter(|&i| revealed[i] && alice[i] != bob[i])
        .count();
    let keep = |k: &[bool]| -> Vec<bool> {
        k.iter()
            .zip(&revealed)
            .filter(|(_, &r)| !r)
            .map(|(&b, _)| b)
            .collect()
    };
    Ok(QberEstimate {
        qber: errors as f64 / r as f64,
        revealed: r,
        alice: keep(alice),
        bob: keep(bob),
    })
}

/// Fraction of the sifted key an opaque intercept-resend attacker learns.
pub fn eve_information(lambda: f64) -> f64 {
    0.5 * lambda
}

/// One line of a session transcript.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PulseRecord {
    pub index: usize,
    pub alice_basis: PolBasis,
    pub alice_bit: bool,
    pub eve_action: EveAction,
    pub bob_basis: PolBasis,
    pub bob_bit: bool,
}

pub const TRANSCRIPT_HEADER: &str = "index,alice_basis,alice_bit,eve_action,bob_basis,bob_bit";

/// Writes the transcript as CSV: a header row, then one pulse per line.
pub fn write_transcript<W: Write>(records: &[PulseRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{TRANSCRIPT_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.index,
            r.alice_basis,
            u8::from(r.alice_bit),
            r.eve_action,
            r.bob_basis,
            u8::from(r.bob_bit)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn bases(s: &str) -> Vec<PolBasis> {
        s.chars()
            .map(|c| if c == '+' { PolBasis::Rectilinear } else { PolBasis::Diagonal })
            .collect()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn encoding_table() {
        assert_eq!(Polarization::encode(PolBasis::Rectilinear, true), Polarization::V);
        assert_eq!(Polarization::encode(PolBasis::Diagonal, true), Polarization::D45);
        for basis in [PolBasis::Rectilinear, PolBasis::Diagonal] {
            for bit in [false, true] {
                let p = Polarization::encode(basis, bit);
                assert_eq!((p.basis(), p.bit()), (basis, bit));
            }
        }
    }

    #[test]
    fn symbol_table_matches_state_vector() {
        for pol in [Polarization::H, Polarization::V, Polarization::D45, Polarization::D135] {
            for basis in [PolBasis::Rectilinear, PolBasis::Diagonal] {
                let p = measurement_probabilities(pol, basis);
                let want = if basis == pol.basis() {
                    if pol.bit() { [0.0, 1.0] } else { [1.0, 0.0] }
                } else {
                    [0.5, 0.5]
                };
                assert!((p[0] - want[0]).abs() < 1e-12 && (p[1] - want[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn thirteen_pulse_sift() {
        let alice_bits = bits("1010011011010");
        let a = bases("+x++xx++xx++x");
        let b = bases("+xx++x+xx+x+x");
        let s = sift(&a, &b, &alice_bits, &alice_bits).unwrap();
        assert_eq!(s.kept, vec![0, 1, 3, 5, 6, 8, 11, 12]);
        assert_eq!(s.alice, bits("10011110"));
        assert!(sift(&a, &b[..3], &alice_bits, &alice_bits).is_err());
    }

    #[test]
    fn clean_channel_is_identity() {
        let mut rng = seeded(2);
        let t = bb84_transmit(200, &mut rng).unwrap();
        let (out, eve) = channel_transmit(&t.pulses, 0.0, 0.0, &mut rng).unwrap();
        assert_eq!(out, t.pulses);
        assert!(eve.iter().all(|e| *e == EveAction::Pass));
        assert!(channel_transmit(&t.pulses, 1.5, 0.0, &mut rng).is_err());
        assert!(bb84_transmit(0, &mut rng).is_err());
    }

    #[test]
    fn qber_sample_of_identical_keys() {
        let mut rng = seeded(4);
        let k = vec![true; 100];
        let e = estimate_qber(&k, &k, 0.1, &mut rng).unwrap();
        assert_eq!(e.qber, 0.0);
        assert_eq!(e.revealed, 10);
        assert_eq!(e.alice.len(), 90);
        assert!(estimate_qber(&k[..5], &k[..5], 0.1, &mut rng).is_err());
    }

    #[test]
    fn eve_information_values() {
        assert_eq!(eve_information(1.0), 0.5);
        assert!((eve_information(0.1) - 0.05).abs() < 1e-15);
        assert_eq!(eve_information(0.0), 0.0);
    }

    #[test]
    fn transcript_format() {
        let rec = PulseRecord {
            index: 0,
            alice_basis: PolBasis::Rectilinear,
            alice_bit: true,
            eve_action: EveAction::Intercept { basis: PolBasis::Diagonal, bit: false },
            bob_basis: PolBasis::Diagonal,
            bob_bit: false,
        };
        let mut buf = Vec::new();
        write_transcript(&[rec], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{TRANSCRIPT_HEADER}\n0,+,1,interceptx0,x,0\n")
        );
    }
}
