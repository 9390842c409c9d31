use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::gate::Gate;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Frequently used entangled and superposed registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedState {
    /// `|β_xy⟩ = (|0y⟩ + (−1)^x |1ȳ⟩)/√2`.
    Bell(u8, u8),
    /// Totally antisymmetric state of three qutrits.
    Aharonov3,
    /// `H^⊗n |0…0⟩`.
    Uniform(usize),
}

impl NamedState {
    pub fn build<T: Real>(self) -> StateVector<T> {
        match self {
            NamedState::Bell(x, y) => {
                let h = T::FRAC_1_SQRT_2();
                let sign = if x == 0 { h } else { -h };
                let mut amps = vec![Complex::new(T::zero(), T::zero()); 4];
                let y = usize::from(y & 1);
                amps[y] = Complex::new(h, T::zero());
                amps[2 + (1 - y)] = Complex::new(sign, T::zero());
                StateVector::from_amplitudes(&[2, 2], amps).expect("normalized Bell state")
            }
            NamedState::Aharonov3 => {
                let c = T::one() / T::lit(6.0).sqrt();
                let mut amps = vec![Complex::new(T::zero(), T::zero()); 27];
                for (perm, sign) in PERMUTATIONS_3 {
                    let idx = perm[0] * 9 + perm[1] * 3 + perm[2];
                    amps[idx] = Complex::new(c * T::lit(sign), T::zero());
                }
                StateVector::from_amplitudes(&[3, 3, 3], amps).expect("normalized Aharonov state")
            }
            NamedState::Uniform(n) => {
                let dims = vec![2; n.max(1)];
                let h = Gate::<T>::library("H").expect("library gate");
                let mut s = StateVector::basis(&dims, 0).expect("valid register");
                for site in 0..dims.len() {
                    s = s.apply(&h, &[site]).expect("qubit site");
                }
                s
            }
        }
    }
}

/// Permutations of (0,1,2) with their signs.
pub const PERMUTATIONS_3: [([usize; 3], f64); 6] = [
    ([0, 1, 2], 1.0),
    ([1, 2, 0], 1.0),
    ([2, 0, 1], 1.0),
    ([0, 2, 1], -1.0),
    ([2, 1, 0], -1.0),
    ([1, 0, 2], -1.0),
];

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Bell(x, y) => write!(f, "bell{x}{y}"),
            NamedState::Aharonov3 => f.write_str("aharonov3"),
            NamedState::Uniform(n) => write!(f, "uniform({n})"),
        }
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lookup = || Error::Lookup {
            kind: "state",
            name: s.to_string(),
        };
        match s {
            "bell00" => Ok(NamedState::Bell(0, 0)),
            "bell01" => Ok(NamedState::Bell(0, 1)),
            "bell10" => Ok(NamedState::Bell(1, 0)),
            "bell11" => Ok(NamedState::Bell(1, 1)),
            "aharonov3" => Ok(NamedState::Aharonov3),
            _ => {
                let n = s
                    .strip_prefix("uniform(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(lookup)?;
                if n == 0 || n > super::state::MAX_SITES {
                    return Err(Error::domain(format!("uniform({n}) register size out of range")));
                }
                Ok(NamedState::Uniform(n))
            }
        }
    }
}

/// Looks up a named state by identifier, e.g. `"bell10"` or `"uniform(3)"`.
pub fn named_state<T: Real>(name: &str) -> Result<StateVector<T>> {
    Ok(name.parse::<NamedState>()?.build())
}
