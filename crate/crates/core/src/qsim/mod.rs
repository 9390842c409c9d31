//! Dense state-vector simulation of mixed qubit/qutrit registers.

mod density;
mod gate;
pub mod linalg;
mod measure;
mod named;
mod state;

pub use density::DensityMatrix;
pub use gate::{Gate, LIBRARY_NAMES};
pub use measure::{Basis, MeasurementRecord};
pub use named::{named_state, NamedState, PERMUTATIONS_3};
pub use state::{digits_of, index_of, StateVector, MAX_SITES};
