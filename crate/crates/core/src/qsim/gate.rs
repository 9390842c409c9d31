use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unitary acting on `arity` sites of equal dimension `site_dim`.
///
/// The matrix is stored row-major over the `site_dim^arity` dimensional
/// operand space, first operand most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T: Real = f64> {
    name: String,
    matrix: Vec<Complex<T>>,
    arity: usize,
    site_dim: usize,
}

/// Names accepted by [`Gate::library`].
pub const LIBRARY_NAMES: &[&str] = &[
    "I", "X", "Y", "Y_real", "Z", "H", "T", "CNOT", "SWAP", "CSWAP",
];

fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

impl<T: Real> Gate<T> {
    /// Builds a gate, rejecting matrices of the wrong shape or that are not
    /// unitary within [`Real::TOLERANCE`].
    pub fn new(
        name: impl Into<String>,
        matrix: Vec<Complex<T>>,
        arity: usize,
        site_dim: usize,
    ) -> Result<Self> {
        let name = name.into();
        if arity == 0 || !(site_dim == 2 || site_dim == 3) {
            return Err(Error::domain(format!(
                "gate {name}: arity {arity}, site dimension {site_dim}"
            )));
        }
        let dim = site_dim.pow(arity as u32);
        if matrix.len() != dim * dim {
            return Err(Error::domain(format!(
                "gate {name}: expected {dim}x{dim} matrix, got {} entries",
                matrix.len()
            )));
        }
        let gate = Self {
            name,
            matrix,
            arity,
            site_dim,
        };
        let defect = gate.unitarity_defect();
        if defect >= T::TOLERANCE {
            return Err(Error::domain(format!(
                "gate {} is not unitary (defect {defect})",
                gate.name
            )));
        }
        Ok(gate)
    }

    fn from_real(name: &str, rows: &[f64], arity: usize) -> Self {
        let matrix = rows.iter().map(|&x| cx(x, 0.0)).collect();
        Self::new(name, matrix, arity, 2).expect("library matrix is unitary")
    }

    /// Looks up a fixed gate by name; see [`LIBRARY_NAMES`].
    ///
    /// `Y_real` is the real matrix `[[0,-1],[1,0]] = ZX`; `Y` is the usual
    /// Hermitian Pauli-Y. `H` carries the `1/√2` normalization.
    pub fn library(name: &str) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let gate = match name {
            "I" => Self::from_real("I", &[1., 0., 0., 1.], 1),
            "X" => Self::from_real("X", &[0., 1., 1., 0.], 1),
            "Y_real" => Self::from_real("Y_real", &[0., -1., 1., 0.], 1),
            "Y" => Self::new(
                "Y",
                vec![cx(0., 0.), cx(0., -1.), cx(0., 1.), cx(0., 0.)],
                1,
                2,
            )?,
            "Z" => Self::from_real("Z", &[1., 0., 0., -1.], 1),
            "H" => Self::from_real("H", &[h, h, h, -h], 1),
            "T" => Self::phase(T::FRAC_PI_4()).renamed("T"),
            "CNOT" => Self::from_real(
                "CNOT",
                &[
                    1., 0., 0., 0., //
                    0., 1., 0., 0., //
                    0., 0., 0., 1., //
                    0., 0., 1., 0.,
                ],
                2,
            ),
            "SWAP" => Self::from_real(
                "SWAP",
                &[
                    1., 0., 0., 0., //
                    0., 0., 1., 0., //
                    0., 1., 0., 0., //
                    0., 0., 0., 1.,
                ],
                2,
            ),
            "CSWAP" => {
                let mut rows = vec![0.0; 64];
                for i in 0..8 {
                    let j = if i >= 4 { (i & 4) | ((i & 1) << 1) | ((i & 2) >> 1) } else { i };
                    rows[i * 8 + j] = 1.0;
                }
                Self::from_real("CSWAP", &rows, 3)
            }
            _ => {
                return Err(Error::Lookup {
                    kind: "gate",
                    name: name.to_string(),
                })
            }
        };
        Ok(gate)
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: T) -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            name: format!("P({theta})"),
            matrix: vec![one, zero, zero, Complex::from_polar(T::one(), theta)],
            arity: 1,
            site_dim: 2,
        }
    }

    /// Controlled phase: `|11⟩ → e^{iθ}|11⟩`.
    pub fn controlled_phase(theta: T) -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let mut matrix = vec![zero; 16];
        matrix[0] = one;
        matrix[5] = one;
        matrix[10] = one;
        matrix[15] = Complex::from_polar(T::one(), theta);
        Self {
            name: format!("CP({theta})"),
            matrix,
            arity: 2,
            site_dim: 2,
        }
    }

    /// Single-qubit unitary from a 2x2 row-major matrix.
    pub fn single(name: impl Into<String>, m: [Complex<T>; 4]) -> Result<Self> {
        Self::new(name, m.to_vec(), 1, 2)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn scaled(&self, factor: Complex<T>) -> Result<Self> {
        Self::new(
            format!("{}*{}", factor, self.name),
            self.matrix.iter().map(|&m| m * factor).collect(),
            self.arity,
            self.site_dim,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &[Complex<T>] {
        &self.matrix
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    /// Side length of the matrix.
    pub fn dim(&self) -> usize {
        self.site_dim.pow(self.arity as u32)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[row * self.dim() + col]
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim();
        let mut matrix = self.matrix.clone();
        for r in 0..n {
            for c in 0..n {
                matrix[c * n + r] = self.matrix[r * n + c].conj();
            }
        }
        Self {
            name: format!("{}†", self.name),
            matrix,
            arity: self.arity,
            site_dim: self.site_dim,
        }
    }

    /// `self · other` (other applied first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.arity != other.arity || self.site_dim != other.site_dim {
            return Err(Error::domain("composing gates of different shape"));
        }
        Self::new(
            format!("{}·{}", self.name, other.name),
            matmul(&self.matrix, &other.matrix, self.dim()),
            self.arity,
            self.site_dim,
        )
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.site_dim != other.site_dim {
            return Err(Error::domain("kron of gates on different site dimensions"));
        }
        let (a, b) = (self.dim(), other.dim());
        let n = a * b;
        let zero = Complex::new(T::zero(), T::zero());
        let mut matrix = vec![zero; n * n];
        for i in 0..a {
            for j in 0..a {
                let s = self.matrix[i * a + j];
                for k in 0..b {
                    for l in 0..b {
                        matrix[(i * b + k) * n + j * b + l] = s * other.matrix[k * b + l];
                    }
                }
            }
        }
        Self::new(
            format!("{}⊗{}", self.name, other.name),
            matrix,
            self.arity + other.arity,
            self.site_dim,
        )
    }

    /// Max-norm of `M†M − I`.
    pub fn unitarity_defect(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..n {
                    acc = acc + self.matrix[k * n + r].conj() * self.matrix[k * n + c];
                }
                if r == c {
                    acc = acc - Complex::new(T::one(), T::zero());
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Max-norm distance between two gate matrices of equal shape.
    pub fn distance(&self, other: &Self) -> T {
        self.matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

pub(crate) fn matmul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    out
}
