use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::gate::Gate;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register the dense simulator accepts.
pub const MAX_SITES: usize = 22;

/// Dense amplitude vector over an ordered list of qubit/qutrit sites.
///
/// Basis states are indexed in mixed radix with the leftmost site most
/// significant, so `|10⟩` on two qubits is index 2. Operations never mutate
/// a state in place; they return a new one.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real = f64> {
    dims: Vec<usize>,
    amps: Vec<Complex<T>>,
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::domain("a register needs at least one site"));
    }
    if dims.len() > MAX_SITES {
        return Err(Error::domain(format!(
            "{} sites exceeds the {MAX_SITES}-site limit",
            dims.len()
        )));
    }
    if let Some(d) = dims.iter().find(|&&d| d != 2 && d != 3) {
        return Err(Error::domain(format!("site dimension {d} (must be 2 or 3)")));
    }
    Ok(dims.iter().product())
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * dims[i + 1];
    }
    out
}

/// Mixed-radix digits of `index`, most significant site first.
pub fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub fn index_of(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&v, &d)| acc * d + v)
}

pub(crate) fn check_sites(dims: &[usize], sites: &[usize]) -> Result<()> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= dims.len() {
            return Err(Error::domain(format!(
                "site {s} out of range for a {}-site register",
                dims.len()
            )));
        }
        if sites[..i].contains(&s) {
            return Err(Error::domain(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|basis_index⟩`.
    pub fn basis(dims: &[usize], basis_index: usize) -> Result<Self> {
        let len = check_dims(dims)?;
        if basis_index >= len {
            return Err(Error::domain(format!(
                "basis index {basis_index} out of range (dimension {len})"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); len];
        amps[basis_index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Wraps an amplitude vector that must already be normalized.
    pub fn from_amplitudes(dims: &[usize], amps: Vec<Complex<T>>) -> Result<Self> {
        let len = check_dims(dims)?;
        if amps.len() != len {
            return Err(Error::domain(format!(
                "expected {len} amplitudes, got {}",
                amps.len()
            )));
        }
        let state = Self {
            dims: dims.to_vec(),
            amps,
        };
        let defect = (state.norm_sqr() - T::one()).abs();
        if defect > T::TOLERANCE {
            return Err(Error::domain(format!("state norm off by {defect}")));
        }
        Ok(state)
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(dims: &[usize], amps: Vec<Complex<T>>) -> Result<Self> {
        let len = check_dims(dims)?;
        if amps.len() != len {
            return Err(Error::domain(format!(
                "expected {len} amplitudes, got {}",
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::NEGLIGIBLE {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        Ok(Self {
            dims: dims.to_vec(),
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// `α|0⟩ + β|1⟩`.
    pub fn qubit(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        Self::from_amplitudes(&[2], vec![alpha, beta])
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let len = check_dims(dims)?;
        let amps = (0..len)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::normalized(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex<T> {
        self.amps[index_of(digits, &self.dims)]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Composite state `self ⊗ other`; sites of `other` follow those of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, amps }
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dims != other.dims {
            return Err(Error::domain(format!(
                "inner product of registers with dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies `gate` with its first operand on `targets[0]`.
    pub fn apply(&self, gate: &Gate<T>, targets: &[usize]) -> Result<Self> {
        if targets.len() != gate.arity() {
            return Err(Error::domain(format!(
                "gate {} acts on {} sites, {} targets given",
                gate.name(),
                gate.arity(),
                targets.len()
            )));
        }
        check_sites(&self.dims, targets)?;
        if let Some(&t) = targets.iter().find(|&&t| self.dims[t] != gate.site_dim()) {
            return Err(Error::domain(format!(
                "gate {} needs dimension-{} sites but site {t} has dimension {}",
                gate.name(),
                gate.site_dim(),
                self.dims[t]
            )));
        }

        let stride = strides(&self.dims);
        let d = gate.site_dim();
        let sub = gate.dim();
        let offsets: Vec<usize> = (0..sub)
            .map(|s| {
                let mut rem = s;
                let mut off = 0;
                for &t in targets.iter().rev() {
                    off += (rem % d) * stride[t];
                    rem /= d;
                }
                off
            })
            .collect();

        let m = gate.matrix();
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; self.amps.len()];
        let mut buf = vec![zero; sub];
        for base in 0..self.amps.len() {
            if targets
                .iter()
                .any(|&t| (base / stride[t]) % self.dims[t] != 0)
            {
                continue;
            }
            for (slot, off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &m[r * sub..(r + 1) * sub];
                out[base + off] = row.iter().zip(&buf).fold(zero, |acc, (g, a)| acc + g * a);
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            amps: out,
        })
    }

    /// Applies a sequence of `(gate, targets)` pairs left to right.
    pub fn apply_all<'a, I>(&self, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a Gate<T>, &'a [usize])>,
    {
        let mut state = self.clone();
        for (gate, targets) in ops {
            state = state.apply(gate, targets)?;
        }
        Ok(state)
    }

    /// Negates the amplitude of every basis index satisfying `marked`.
    pub fn flip_phase_where(&self, marked: impl Fn(usize) -> bool) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| if marked(i) { -a } else { a })
            .collect();
        Self {
            dims: self.dims.clone(),
            amps,
        }
    }

    /// Applies the basis permutation `|i⟩ → |map(i)⟩`, which is unitary
    /// exactly when `map` is a bijection on the index range.
    pub fn permute_basis(&self, map: impl Fn(usize) -> usize) -> Result<Self> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; self.amps.len()];
        let mut hit = vec![false; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let j = map(i);
            if j >= out.len() || hit[j] {
                return Err(Error::domain("basis map is not a permutation"));
            }
            hit[j] = true;
            out[j] = a;
        }
        Ok(Self {
            dims: self.dims.clone(),
            amps: out,
        })
    }

    /// Relabels sites: site `k` of the result is site `order[k]` of `self`.
    pub fn reorder_sites(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.dims.len() {
            return Err(Error::domain("site order must list every site once"));
        }
        check_sites(&self.dims, order)?;
        let new_dims: Vec<usize> = order.iter().map(|&s| self.dims[s]).collect();
        let old_stride = strides(&self.dims);
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; self.amps.len()];
        for (j, slot) in out.iter_mut().enumerate() {
            let digits = digits_of(j, &new_dims);
            let i: usize = digits
                .iter()
                .zip(order)
                .map(|(&v, &s)| v * old_stride[s])
                .sum();
            *slot = self.amps[i];
        }
        Ok(Self {
            dims: new_dims,
            amps: out,
        })
    }

    /// Projects `sites` onto `values` and removes them from the register.
    ///
    /// The remaining sites keep their relative order. Fails when the
    /// projection has (numerically) zero weight.
    pub fn condition_on(&self, sites: &[usize], values: &[usize]) -> Result<Self> {
        check_sites(&self.dims, sites)?;
        if sites.len() != values.len() {
            return Err(Error::domain("one value per conditioned site required"));
        }
        if sites.len() == self.dims.len() {
            return Err(Error::domain("cannot condition away every site"));
        }
        for (&s, &v) in sites.iter().zip(values) {
            if v >= self.dims[s] {
                return Err(Error::domain(format!("value {v} out of range for site {s}")));
            }
        }
        let stride = strides(&self.dims);
        let keep: Vec<usize> = (0..self.dims.len()).filter(|s| !sites.contains(s)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&s| self.dims[s]).collect();
        let fixed: usize = sites.iter().zip(values).map(|(&s, &v)| v * stride[s]).sum();
        let len: usize = keep_dims.iter().product();
        let amps: Vec<Complex<T>> = (0..len)
            .map(|j| {
                let idx: usize = digits_of(j, &keep_dims)
                    .iter()
                    .zip(&keep)
                    .map(|(&v, &s)| v * stride[s])
                    .sum();
                self.amps[fixed + idx]
            })
            .collect();
        let weight: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if weight < T::NEGLIGIBLE {
            return Err(Error::domain(format!(
                "conditioning sites {sites:?} on {values:?} has zero probability"
            )));
        }
        Self::normalized(&keep_dims, amps)
    }

    /// True when the two states differ only by a global phase.
    pub fn same_ray(&self, other: &Self) -> bool {
        self.fidelity(other)
            .map(|f| (f - T::one()).abs() < T::TOLERANCE)
            .unwrap_or(false)
    }
}
