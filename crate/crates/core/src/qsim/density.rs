use num_complex::Complex;

use super::linalg;
use super::state::{check_sites, digits_of, index_of, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Density matrix of a subsystem, obtained by partial trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real = f64> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

/// Reshapes amplitudes into a `keep x rest` matrix across the cut.
fn split_matrix<T: Real>(
    state: &StateVector<T>,
    keep: &[usize],
) -> Result<(usize, usize, Vec<Complex<T>>)> {
    let dims = state.dims();
    check_sites(dims, keep)?;
    if keep.is_empty() {
        return Err(Error::domain("at least one site must be kept"));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&s| dims[s]).collect();
    let rows: usize = keep_dims.iter().product();
    let cols: usize = rest_dims.iter().product();
    let mut m = vec![Complex::new(T::zero(), T::zero()); rows * cols];
    for (i, &a) in state.amplitudes().iter().enumerate() {
        let d = digits_of(i, dims);
        let r = index_of(&keep.iter().map(|&s| d[s]).collect::<Vec<_>>(), &keep_dims);
        let c = index_of(&rest.iter().map(|&s| d[s]).collect::<Vec<_>>(), &rest_dims);
        m[r * cols + c] = a;
    }
    Ok((rows, cols, m))
}

impl<T: Real> StateVector<T> {
    /// Reduced state of `keep_sites` (in the given order).
    pub fn reduced_density(&self, keep_sites: &[usize]) -> Result<DensityMatrix<T>> {
        let (rows, cols, m) = split_matrix(self, keep_sites)?;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); rows * rows];
        for i in 0..rows {
            for j in 0..rows {
                entries[i * rows + j] = (0..cols).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                    acc + m[i * cols + k] * m[j * cols + k].conj()
                });
            }
        }
        Ok(DensityMatrix { dim: rows, entries })
    }

    /// Schmidt coefficients across the cut `bipartition | rest`, largest first.
    pub fn schmidt_coefficients(&self, bipartition: &[usize]) -> Result<Vec<T>> {
        if bipartition.is_empty() || bipartition.len() >= self.num_sites() {
            return Err(Error::domain(
                "bipartition must be a proper nonempty subset of the sites",
            ));
        }
        let (rows, cols, m) = split_matrix(self, bipartition)?;
        Ok(linalg::singular_values(rows, cols, &m))
    }

    /// Number of Schmidt coefficients above [`Real::TOLERANCE`]; 1 exactly
    /// for product states across the cut.
    pub fn schmidt_rank(&self, bipartition: &[usize]) -> Result<usize> {
        Ok(self
            .schmidt_coefficients(bipartition)?
            .into_iter()
            .filter(|&s| s > T::TOLERANCE)
            .count())
    }
}

impl<T: Real> DensityMatrix<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.entry(i, i)
        })
    }

    /// Max-norm of `ρ − ρ†`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        linalg::hermitian_eigenvalues(self.dim, &self.entries)
    }

    /// Hermitian, unit trace and positive semidefinite within tolerance.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect() < T::TOLERANCE
            && (self.trace() - Complex::new(T::one(), T::zero())).norm() < T::TOLERANCE
            && self.eigenvalues().iter().all(|&e| e >= -T::TOLERANCE)
    }

    pub fn purity(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + (self.entry(i, j) * self.entry(j, i)).re;
            }
        }
        acc
    }

    /// `⟨ψ|ρ|ψ⟩` for a pure state on the same space.
    pub fn fidelity_with(&self, psi: &StateVector<T>) -> Result<T> {
        if psi.len() != self.dim {
            return Err(Error::domain("state and density matrix dimensions differ"));
        }
        let a = psi.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + a[i].conj() * self.entry(i, j) * a[j];
            }
        }
        Ok(acc.re)
    }

    /// Max-norm distance to another density matrix of equal dimension.
    pub fn distance(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Builds a density matrix from a row-major array of real diagonal/off-
    /// diagonal entries; mainly for comparisons in tests and reports.
    pub fn from_entries(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::domain("density matrix entries must be dim x dim"));
        }
        Ok(Self { dim, entries })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let dim = values.len();
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (i, &v) in values.iter().enumerate() {
            entries[i * dim + i] = Complex::new(v, T::zero());
        }
        Self { dim, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::named::NamedState;

    #[test]
    fn bell_half_is_maximally_mixed() {
        let bell = NamedState::Bell(0, 0).build::<f64>();
        let rho = bell.reduced_density(&[0]).unwrap();
        assert!(rho.distance(&DensityMatrix::diagonal(&[0.5, 0.5])) < 1e-12);
        assert!(rho.is_valid());
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let s = StateVector::<f64>::basis(&[2, 2], 1).unwrap();
        let rho = s.reduced_density(&[0]).unwrap();
        assert!(rho.distance(&DensityMatrix::diagonal(&[1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn schmidt_rank_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex::new(0.0, 0.0);
        let r = Complex::new(h, 0.0);
        let bell = StateVector::from_amplitudes(&[2, 2], vec![r, z, z, r]).unwrap();
        assert_eq!(bell.schmidt_rank(&[0]).unwrap(), 2);
        let product = StateVector::from_amplitudes(&[2, 2], vec![r, r, z, z]).unwrap();
        assert_eq!(product.schmidt_rank(&[0]).unwrap(), 1);
        let basis = StateVector::<f64>::basis(&[2, 2], 0).unwrap();
        assert_eq!(basis.schmidt_rank(&[1]).unwrap(), 1);
        assert!(basis.schmidt_rank(&[0, 1]).is_err());
        assert!(basis.schmidt_rank(&[]).is_err());
    }

    #[test]
    fn aharonov_cut_is_rank_three() {
        let a = NamedState::Aharonov3.build::<f64>();
        assert_eq!(a.schmidt_rank(&[0]).unwrap(), 3);
        let rho = a.reduced_density(&[2]).unwrap();
        let third = 1.0 / 3.0;
        assert!(rho.distance(&DensityMatrix::diagonal(&[third, third, third])) < 1e-12);
    }
}
