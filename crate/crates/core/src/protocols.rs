//! Introductory communication demos: single-photon interferometry,
//! superdense coding, teleportation and relay-mediated entanglement.

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{Basis, Gate, NamedState};
use crate::scalar::Real;
use crate::{GateOp, QState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterferometerConfig {
    pub splitters: u8,
    /// Absorbing screen on the lower path between the splitters.
    pub obstacle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionStats {
    pub p_a: f64,
    pub p_b: f64,
    pub p_absorbed: f64,
}

/// Symmetric 50/50 splitter acting on the path qubit.
pub fn beam_splitter() -> GateOp {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = Complex::new(h, 0.0);
    let t = Complex::new(0.0, h);
    Gate::single("BS", [r, t, t, r]).expect("splitter is unitary")
}

/// Exact detection probabilities for a photon entering on path `|0⟩`.
///
/// Detector A sits on output `|0⟩`. Between two splitters both paths are
/// folded by mirrors, modelled as `X`.
pub fn interferometer(config: InterferometerConfig) -> Result<DetectionStats> {
    let bs = beam_splitter();
    let mirror = Gate::library("X")?;
    let photon = QState::basis(&[2], 0)?;
    let after_first = photon.apply(&bs, &[0])?;
    let stats = |s: &QState, weight: f64, absorbed: f64| -> Result<DetectionStats> {
        let d = s.outcome_distribution(&[0], &Basis::Computational)?;
        Ok(DetectionStats {
            p_a: weight * d.get(&vec![0]).copied().unwrap_or(0.0),
            p_b: weight * d.get(&vec![1]).copied().unwrap_or(0.0),
            p_absorbed: absorbed,
        })
    };
    match (config.splitters, config.obstacle) {
        (1, false) => stats(&after_first, 1.0, 0.0),
        (2, false) => stats(&after_first.apply(&mirror, &[0])?.apply(&bs, &[0])?, 1.0, 0.0),
        (2, true) => {
            // The screen measures which path was taken; only the open
            // branch reaches the second splitter.
            let (_, open) = after_first.measure_forced(&[0], &Basis::Computational, &[0])?;
            let d = after_first.outcome_distribution(&[0], &Basis::Computational)?;
            let p_open = d[&vec![0]];
            stats(&open.apply(&mirror, &[0])?.apply(&bs, &[0])?, p_open, 1.0 - p_open)
        }
        (1, true) => Err(Error::domain("an obstacle needs a second splitter")),
        (n, _) => Err(Error::domain(format!("{n} splitters; expected 1 or 2"))),
    }
}

fn is_bell00(state: &QState) -> bool {
    state.dims() == [2, 2] && state.same_ray(&NamedState::Bell(0, 0).build())
}

/// Alice's local operation for the two-bit message `bits` (`0..4`, high bit
/// first).
pub fn superdense_gate(bits: u8) -> Result<GateOp> {
    match bits {
        0 => Gate::library("I"),
        1 => Gate::library("X"),
        2 => Gate::library("Z"),
        3 => Gate::library("Y_real")?
            .scaled(Complex::new(0.0, 1.0))
            .map(|g| g.renamed("iY_real")),
        _ => Err(Error::domain(format!("{bits} is not a two-bit value"))),
    }
}

/// Encodes two bits into Alice's half (site 0) of a shared `|β00⟩`.
pub fn superdense_encode(bits: u8, shared: &QState) -> Result<QState> {
    if !is_bell00(shared) {
        return Err(Error::Precondition("shared pair is not |β00⟩".into()));
    }
    shared.apply(&superdense_gate(bits)?, &[0])
}

/// Bell-basis measurement; returns `2x + y` for `|β_xy⟩`.
pub fn superdense_decode(state: &QState) -> Result<u8> {
    if state.dims() != [2, 2] {
        return Err(Error::domain("superdense decoding needs a two-qubit state"));
    }
    let d = state.outcome_distribution(&[0, 1], &Basis::Bell)?;
    d.iter()
        .find(|(_, &p)| p > 1.0 - f64::TOLERANCE)
        .map(|(o, _)| (2 * o[0] + o[1]) as u8)
        .ok_or_else(|| Error::Ambiguous("input is not a Bell state".into()))
}

/// Outcome of one teleportation.
#[derive(Clone, Debug, PartialEq)]
pub struct Teleported {
    /// `(L1, L2)`: outcomes on the source and on the sender's pair half.
    pub bits: (u8, u8),
    pub state: QState,
}

fn teleport_core<R: Rng + ?Sized>(
    state: &QState,
    src: usize,
    via: usize,
    dst: usize,
    outcome: Option<(u8, u8)>,
    rng: Option<&mut R>,
) -> Result<Teleported> {
    if src == via || via == dst || src == dst {
        return Err(Error::domain("teleportation sites must be distinct"));
    }
    let rotated = state
        .apply(&Gate::library("CNOT")?, &[src, via])?
        .apply(&Gate::library("H")?, &[src])?;
    let sites = [src, via];
    let (rec, _) = match (outcome, rng) {
        (Some((l1, l2)), _) => rotated.measure_forced(
            &sites,
            &Basis::Computational,
            &[usize::from(l1), usize::from(l2)],
        )?,
        (None, Some(rng)) => rotated.measure(&sites, &Basis::Computational, rng)?,
        (None, None) => unreachable!("either a branch or an rng is supplied"),
    };
    let (l1, l2) = (rec.outcome[0] as u8, rec.outcome[1] as u8);
    let mut rest = rotated.condition_on(&sites, &rec.outcome)?;
    let dst_after = dst - usize::from(src < dst) - usize::from(via < dst);
    if l2 == 1 {
        rest = rest.apply(&Gate::library("X")?, &[dst_after])?;
    }
    if l1 == 1 {
        rest = rest.apply(&Gate::library("Z")?, &[dst_after])?;
    }
    Ok(Teleported {
        bits: (l1, l2),
        state: rest,
    })
}

/// Teleports site `src` onto site `dst` through the pair `(via, dst)`.
///
/// The two measured sites are removed from the returned register; the
/// others keep their relative order.
pub fn teleport_within<R: Rng + ?Sized>(
    state: &QState,
    src: usize,
    via: usize,
    dst: usize,
    rng: &mut R,
) -> Result<Teleported> {
    teleport_core(state, src, via, dst, None, Some(rng))
}

fn check_teleport_inputs(psi: &QState, shared: &QState) -> Result<QState> {
    if psi.dims() != [2] {
        return Err(Error::domain("teleportation input must be one qubit"));
    }
    if !is_bell00(shared) {
        return Err(Error::Precondition("shared pair is not |β00⟩".into()));
    }
    Ok(psi.tensor(shared))
}

/// Teleports `psi` using `shared` (`|β00⟩`, Alice holds site 0).
pub fn teleport<R: Rng + ?Sized>(psi: &QState, shared: &QState, rng: &mut R) -> Result<Teleported> {
    let joint = check_teleport_inputs(psi, shared)?;
    teleport_within(&joint, 0, 1, 2, rng)
}

/// Teleportation with the measurement branch `(L1, L2)` fixed.
pub fn teleport_branch(psi: &QState, shared: &QState, l1: u8, l2: u8) -> Result<Teleported> {
    let joint = check_teleport_inputs(psi, shared)?;
    teleport_core::<crate::rng::SimRng>(&joint, 0, 1, 2, Some((l1, l2)), None)
}

/// Quantum and classical resources spent by a distribution procedure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Resources {
    pub pairs: usize,
    pub cbits: usize,
}

impl std::ops::AddAssign for Resources {
    fn add_assign(&mut self, o: Self) {
        self.pairs += o.pairs;
        self.cbits += o.cbits;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Distributed {
    /// Two-qubit state shared by the end points.
    pub state: QState,
    pub resources: Resources,
}

/// A router prepares `|β00⟩` locally and teleports one half to each end
/// point over pre-shared pairs.
pub fn entangle_distribute<R: Rng + ?Sized>(rng: &mut R) -> Result<Distributed> {
    let bell: QState = NamedState::Bell(0, 0).build();
    // [r1, r2, ra, alice, rb, bob]
    let joint = bell.tensor(&bell).tensor(&bell);
    let to_alice = teleport_within(&joint, 0, 2, 3, rng)?;
    // now [r2, alice, rb, bob]
    let to_bob = teleport_within(&to_alice.state, 0, 2, 3, rng)?;
    Ok(Distributed {
        state: to_bob.state,
        resources: Resources { pairs: 2, cbits: 4 },
    })
}

/// Builds end-to-end entanglement across `hops` links by swapping at every
/// intermediate node, left to right.
pub fn swap_chain<R: Rng + ?Sized>(hops: usize, rng: &mut R) -> Result<Distributed> {
    if hops == 0 {
        return Err(Error::domain("a chain needs at least one link"));
    }
    let bell: QState = NamedState::Bell(0, 0).build();
    let mut state = bell.clone();
    let mut resources = Resources { pairs: 1, cbits: 0 };
    for _ in 1..hops {
        // [a, x] ⊗ [y, next]: forward x through the next link.
        let joint = state.tensor(&bell);
        state = teleport_within(&joint, 1, 2, 3, rng)?.state;
        resources += Resources { pairs: 1, cbits: 2 };
    }
    Ok(Distributed { state, resources })
}
