use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{Basis, Gate, NamedState};
use crate::QState;

/// Revocable hand-over of qubit data: each `α|0⟩+β|1⟩` becomes
/// `α|00⟩+β|11⟩`, Alice keeping site 0 and Bob receiving site 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractState {
    pairs: Vec<QState>,
    originals: Vec<QState>,
    pub deadline: u64,
    revoked: bool,
}

fn entangle_copy(psi: &QState) -> Result<QState> {
    if psi.dims() != [2] {
        return Err(Error::domain("contract data must be single qubits"));
    }
    psi.tensor(&QState::basis(&[2], 0)?)
        .apply(&Gate::library("CNOT")?, &[0, 1])
}

pub fn contract_commit(info: &[QState], deadline: u64) -> Result<ContractState> {
    Ok(ContractState {
        pairs: info.iter().map(entangle_copy).collect::<Result<_>>()?,
        originals: info.to_vec(),
        deadline,
        revoked: false,
    })
}

/// Undoes the copy with a CNOT from Bob's half and returns Bob's qubit.
fn release_pair(pair: &QState) -> Result<QState> {
    pair.apply(&Gate::library("CNOT")?, &[1, 0])?
        .condition_on(&[0], &[0])
}

impl ContractState {
    pub fn pairs(&self) -> &[QState] {
        &self.pairs
    }

    pub fn is_revoked(&self) -> bool {
        self.revoked
    }

    /// Alice measures every retained half; Bob's qubits collapse.
    pub fn revoke<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self> {
        if self.revoked {
            return Err(Error::State("contract already revoked".into()));
        }
        let pairs = self
            .pairs
            .iter()
            .map(|p| Ok(p.measure(&[0], &Basis::Computational, rng)?.1))
            .collect::<Result<_>>()?;
        Ok(Self {
            pairs,
            originals: self.originals.clone(),
            deadline: self.deadline,
            revoked: true,
        })
    }

    /// Alice hands over her halves, giving Bob the original data.
    pub fn release(&self) -> Result<Vec<QState>> {
        if self.revoked {
            return Err(Error::State("revoked contract cannot be released".into()));
        }
        self.pairs.iter().map(release_pair).collect()
    }

    /// Fidelity of Bob's (reduced) qubit `i` with the original data.
    pub fn bob_fidelity(&self, i: usize) -> Result<f64> {
        self.pairs[i]
            .reduced_density(&[1])?
            .fidelity_with(&self.originals[i])
    }
}

/// `Σ_k P(k)·F(Bob's branch k, ψ)` over Alice's revocation outcomes; equals
/// `|α|⁴ + |β|⁴`.
pub fn expected_revocation_fidelity(psi: &QState) -> Result<f64> {
    let pair = entangle_copy(psi)?;
    let mut total = 0.0;
    for k in 0..2 {
        if let Ok((rec, post)) = pair.measure_forced(&[0], &Basis::Computational, &[k]) {
            let bob = post.condition_on(&[0], &[k])?;
            total += rec.probability * bob.fidelity(psi)?;
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    None,
    BobMeasuresEarly,
    AliceMeasuresEarly,
    BothMeasureEarly,
}

impl Adversary {
    fn cheats(self, side: Side) -> bool {
        matches!(
            (self, side),
            (Adversary::BothMeasureEarly, _)
                | (Adversary::BobMeasuresEarly, Side::Bob)
                | (Adversary::AliceMeasuresEarly, Side::Alice)
        )
    }
}

impl std::str::FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Adversary::None),
            "bob_measures_early" => Ok(Adversary::BobMeasuresEarly),
            "alice_measures_early" => Ok(Adversary::AliceMeasuresEarly),
            "both_measure_early" => Ok(Adversary::BothMeasureEarly),
            _ => Err(Error::Lookup { kind: "adversary", name: s.into() }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeOutcome {
    /// No test failed; `tampered` records an undetected early measurement.
    Completed { tampered: bool },
    /// The named side was caught measuring early.
    ViolationDetected(Side),
    MutualDestruction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExchangeReport {
    pub outcome: ExchangeOutcome,
    /// Pairs built from Alice's data (Bob holds site 1), final state.
    pub alice_data_pairs: Vec<QState>,
    pub bob_data_pairs: Vec<QState>,
    /// Mean fidelity of the data each side ends up holding after release;
    /// `None` when the data was destroyed instead of released.
    pub fidelity_received: [Option<f64>; 2],
}

fn measure_site<R: Rng + ?Sized>(s: &QState, site: usize, rng: &mut R) -> Result<QState> {
    Ok(s.measure(&[site], &Basis::Computational, rng)?.1)
}

/// One side's holdings: its own data pairs and its decoys, with the other
/// side holding site 1 of each.
struct Stake {
    data: Vec<QState>,
    decoys: Vec<QState>,
}

impl Stake {
    fn new(data: &[QState], t: usize) -> Result<Self> {
        let bell: QState = NamedState::Bell(0, 0).build();
        Ok(Self {
            data: data.iter().map(entangle_copy).collect::<Result<_>>()?,
            decoys: vec![bell; t],
        })
    }

    /// The holder measures every received half in the computational basis.
    fn tamper<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        for s in self.data.iter_mut().chain(self.decoys.iter_mut()) {
            *s = measure_site(s, 1, rng)?;
        }
        Ok(())
    }

    /// Owner and holder measure each decoy in the `×` basis and compare.
    fn test_decoys<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<bool> {
        let diag = Basis::diagonal();
        for d in &self.decoys {
            let (rec, _) = d.measure(&[0, 1], &diag, rng)?;
            if rec.outcome[0] != rec.outcome[1] {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn punish<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        for s in self.data.iter_mut() {
            *s = measure_site(s, 0, rng)?;
        }
        Ok(())
    }

    fn released_fidelity(&self, originals: &[QState]) -> Result<f64> {
        if originals.is_empty() {
            return Ok(1.0);
        }
        let mut total = 0.0;
        for (pair, psi) in self.data.iter().zip(originals) {
            total += release_pair(pair)?.fidelity(psi)?;
        }
        Ok(total / originals.len() as f64)
    }
}

/// Two-sided exchange with `t` decoy pairs per side.
///
/// Each side entangles its data with retained halves and sends the other
/// halves, interleaved with halves of `|β00⟩` decoys. Before the deadline
/// each owner tests its decoys; a failed test makes the owner measure its
/// retained halves, destroying the data held by the cheater.
pub fn hostage_exchange<R: Rng + ?Sized>(
    a_data: &[QState],
    b_data: &[QState],
    t: usize,
    adversary: Adversary,
    rng: &mut R,
) -> Result<ExchangeReport> {
    if t == 0 {
        return Err(Error::domain("at least one decoy per side is required"));
    }
    // alice.* is held by Bob, bob.* by Alice
    let mut alice = Stake::new(a_data, t)?;
    let mut bob = Stake::new(b_data, t)?;
    if adversary.cheats(Side::Bob) {
        alice.tamper(rng)?;
    }
    if adversary.cheats(Side::Alice) {
        bob.tamper(rng)?;
    }
    let bob_caught = alice.test_decoys(rng)?;
    let alice_caught = bob.test_decoys(rng)?;
    if bob_caught {
        alice.punish(rng)?;
    }
    if alice_caught {
        bob.punish(rng)?;
    }
    let outcome = match (alice_caught, bob_caught) {
        (true, true) => ExchangeOutcome::MutualDestruction,
        (false, true) => ExchangeOutcome::ViolationDetected(Side::Bob),
        (true, false) => ExchangeOutcome::ViolationDetected(Side::Alice),
        (false, false) => ExchangeOutcome::Completed {
            tampered: adversary != Adversary::None,
        },
    };
    let fidelity_received = [
        (!alice_caught).then(|| bob.released_fidelity(b_data)).transpose()?,
        (!bob_caught).then(|| alice.released_fidelity(a_data)).transpose()?,
    ];
    Ok(ExchangeReport {
        outcome,
        alice_data_pairs: alice.data,
        bob_data_pairs: bob.data,
        fidelity_received,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use num_complex::Complex;

    fn plus() -> QState {
        QState::normalized(&[2], vec![Complex::new(1.0, 0.0); 2]).unwrap()
    }

    #[test]
    fn commit_hides_data() {
        let c = contract_commit(&[plus(), QState::basis(&[2], 0).unwrap()], 10).unwrap();
        let rho = c.pairs()[0].reduced_density(&[1]).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-12 && rho.entry(0, 1).norm() < 1e-12);
        assert_eq!(c.pairs()[0].schmidt_rank(&[0]).unwrap(), 2);
        assert_eq!(c.pairs()[1].schmidt_rank(&[0]).unwrap(), 1);
        let released = c.release().unwrap();
        assert!(released[0].same_ray(&plus()));
    }

    #[test]
    fn revocation() {
        let mut rng = seeded(3);
        let c = contract_commit(&[plus()], 1).unwrap();
        let r = c.revoke(&mut rng).unwrap();
        assert_eq!(r.pairs()[0].schmidt_rank(&[0]).unwrap(), 1);
        assert!((r.bob_fidelity(0).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(r.revoke(&mut rng), Err(Error::State(_))));
        assert!(r.release().is_err());
        assert!((expected_revocation_fidelity(&plus()).unwrap() - 0.5).abs() < 1e-12);
        let one = QState::basis(&[2], 1).unwrap();
        assert!((expected_revocation_fidelity(&one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn honest_exchange_completes() {
        let mut rng = seeded(5);
        let r = hostage_exchange(&[plus()], &[plus(), plus()], 4, Adversary::None, &mut rng).unwrap();
        assert_eq!(r.outcome, ExchangeOutcome::Completed { tampered: false });
        for f in r.fidelity_received {
            assert!((f.unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn detected_cheater_loses_data() {
        let mut rng = seeded(6);
        let r = hostage_exchange(&[plus()], &[plus()], 20, Adversary::BobMeasuresEarly, &mut rng).unwrap();
        assert_eq!(r.outcome, ExchangeOutcome::ViolationDetected(Side::Bob));
        assert!(r.alice_data_pairs.iter().all(|p| p.schmidt_rank(&[0]).unwrap() == 1));
        assert_eq!(r.fidelity_received[1], None);
        let both = hostage_exchange(&[plus()], &[plus()], 20, Adversary::BothMeasureEarly, &mut rng).unwrap();
        assert_eq!(both.outcome, ExchangeOutcome::MutualDestruction);
    }
}
