//! Simulation library for quantum communication and networking protocols.
//!
//! The [`qsim`] core is generic over the real scalar type; the protocol
//! layers built on it work in `f64`.

pub mod algorithms;
pub mod byzantine;
pub mod error;
pub mod fingerprint;
pub mod games;
pub mod netsim;
pub mod protocols;
pub mod qkd;
pub mod qsim;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision register.
pub type QState = qsim::StateVector<f64>;
/// Single-precision register.
pub type QState32 = qsim::StateVector<f32>;
pub type GateOp = qsim::Gate<f64>;
pub type Density = qsim::DensityMatrix<f64>;
