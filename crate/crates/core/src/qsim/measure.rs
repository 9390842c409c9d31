use std::collections::BTreeMap;

use rand::Rng;

use super::gate::Gate;
use super::state::{check_sites, digits_of, strides, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Measurement basis for a set of sites.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis<T: Real = f64> {
    Computational,
    /// Bell basis on exactly two qubits; outcome `(x, y)` means `|β_xy⟩`.
    Bell,
    /// Unitary applied before computational readout. A single-site gate is
    /// applied to every measured site, otherwise the arity must match.
    Custom(Gate<T>),
}

impl<T: Real> Basis<T> {
    /// Hadamard (`×`) basis.
    pub fn diagonal() -> Self {
        Basis::Custom(Gate::library("H").expect("library gate"))
    }

    pub fn label(&self) -> String {
        match self {
            Basis::Computational => "computational".into(),
            Basis::Bell => "bell".into(),
            Basis::Custom(g) => format!("custom:{}", g.name()),
        }
    }

    /// Rotates `state` so that a computational readout of `sites` realizes
    /// this basis.
    fn rotate_in(&self, state: &StateVector<T>, sites: &[usize]) -> Result<StateVector<T>> {
        match self {
            Basis::Computational => Ok(state.clone()),
            Basis::Bell => {
                if sites.len() != 2 || sites.iter().any(|&s| state.dims()[s] != 2) {
                    return Err(Error::domain("Bell measurement needs exactly two qubits"));
                }
                state
                    .apply(&Gate::library("CNOT")?, sites)?
                    .apply(&Gate::library("H")?, &sites[..1])
            }
            Basis::Custom(g) if g.arity() == 1 && sites.len() > 1 => {
                let mut s = state.clone();
                for &site in sites {
                    s = s.apply(g, &[site])?;
                }
                Ok(s)
            }
            Basis::Custom(g) => state.apply(g, sites),
        }
    }

    fn rotate_out(&self, state: &StateVector<T>, sites: &[usize]) -> Result<StateVector<T>> {
        match self {
            Basis::Computational => Ok(state.clone()),
            Basis::Bell => state
                .apply(&Gate::library("H")?, &sites[..1])?
                .apply(&Gate::library("CNOT")?, sites),
            Basis::Custom(g) if g.arity() == 1 && sites.len() > 1 => {
                let inv = g.dagger();
                let mut s = state.clone();
                for &site in sites {
                    s = s.apply(&inv, &[site])?;
                }
                Ok(s)
            }
            Basis::Custom(g) => state.apply(&g.dagger(), sites),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord<T: Real = f64> {
    pub sites: Vec<usize>,
    pub basis: Basis<T>,
    /// One value per measured site, in the order of `sites`.
    pub outcome: Vec<usize>,
    pub probability: T,
}

fn computational_distribution<T: Real>(
    state: &StateVector<T>,
    sites: &[usize],
) -> BTreeMap<Vec<usize>, T> {
    let dims = state.dims();
    let mut dist = BTreeMap::new();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p == T::zero() {
            continue;
        }
        let digits = digits_of(i, dims);
        let key: Vec<usize> = sites.iter().map(|&s| digits[s]).collect();
        let slot = dist.entry(key).or_insert_with(T::zero);
        *slot = *slot + p;
    }
    dist
}

fn project<T: Real>(
    state: &StateVector<T>,
    sites: &[usize],
    outcome: &[usize],
    probability: T,
) -> Result<StateVector<T>> {
    let dims = state.dims();
    let stride = strides(dims);
    let scale = probability.sqrt();
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let matches = sites
                .iter()
                .zip(outcome)
                .all(|(&s, &v)| (i / stride[s]) % dims[s] == v);
            if matches {
                a / scale
            } else {
                a * T::zero()
            }
        })
        .collect();
    StateVector::from_amplitudes(dims, amps)
}

impl<T: Real> StateVector<T> {
    /// Exact outcome probabilities for measuring `sites` in `basis`.
    ///
    /// Outcomes with zero probability are omitted.
    pub fn outcome_distribution(
        &self,
        sites: &[usize],
        basis: &Basis<T>,
    ) -> Result<BTreeMap<Vec<usize>, T>> {
        check_sites(self.dims(), sites)?;
        let rotated = basis.rotate_in(self, sites)?;
        Ok(computational_distribution(&rotated, sites))
    }

    /// Projective measurement of `sites` in `basis`, sampled from `rng`.
    ///
    /// The post-measurement state is expressed in the original frame, so
    /// it is an eigenstate of the measured basis on those sites.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        sites: &[usize],
        basis: &Basis<T>,
        rng: &mut R,
    ) -> Result<(MeasurementRecord<T>, StateVector<T>)> {
        check_sites(self.dims(), sites)?;
        if sites.is_empty() {
            return Err(Error::domain("nothing to measure"));
        }
        let rotated = basis.rotate_in(self, sites)?;
        let dist = computational_distribution(&rotated, sites);
        let total: T = dist.values().copied().sum();
        let draw = T::lit(rng.random::<f64>()) * total;
        let mut acc = T::zero();
        let mut chosen = None;
        for (outcome, &p) in &dist {
            acc = acc + p;
            if draw < acc {
                chosen = Some((outcome.clone(), p));
                break;
            }
        }
        let (outcome, probability) = match chosen {
            Some(c) => c,
            // draw landed in rounding slack above the last bucket
            None => dist
                .iter()
                .rev()
                .find(|(_, &p)| p > T::zero())
                .map(|(o, &p)| (o.clone(), p))
                .ok_or_else(|| Error::domain("empty outcome distribution"))?,
        };
        let post = project(&rotated, sites, &outcome, probability)?;
        let post = basis.rotate_out(&post, sites)?;
        Ok((
            MeasurementRecord {
                sites: sites.to_vec(),
                basis: basis.clone(),
                outcome,
                probability,
            },
            post,
        ))
    }

    /// Measurement with a prescribed outcome, for enumerating branches.
    ///
    /// Fails with a domain error when the outcome has probability below
    /// [`Real::NEGLIGIBLE`].
    pub fn measure_forced(
        &self,
        sites: &[usize],
        basis: &Basis<T>,
        outcome: &[usize],
    ) -> Result<(MeasurementRecord<T>, StateVector<T>)> {
        check_sites(self.dims(), sites)?;
        if outcome.len() != sites.len() {
            return Err(Error::domain("one outcome value per measured site required"));
        }
        let rotated = basis.rotate_in(self, sites)?;
        let dist = computational_distribution(&rotated, sites);
        let probability = dist.get(outcome).copied().unwrap_or_else(T::zero);
        if probability < T::NEGLIGIBLE {
            return Err(Error::domain(format!(
                "outcome {outcome:?} on sites {sites:?} has probability {probability}"
            )));
        }
        let post = project(&rotated, sites, outcome, probability)?;
        let post = basis.rotate_out(&post, sites)?;
        Ok((
            MeasurementRecord {
                sites: sites.to_vec(),
                basis: basis.clone(),
                outcome: outcome.to_vec(),
                probability,
            },
            post,
        ))
    }
}
