//! Desk-scale Shor factoring and Grover search.

mod grover;
mod qft;
mod shor;

pub use grover::{
    default_iterations, grover_search, grover_search_unknown, grover_state, inversion_about_average,
    success_probability, theoretical_success, GroverInstance, GroverReport,
};
pub use qft::{inverse_qft, qft, qft_circuit, qft_matrix, Circuit};
pub use shor::{
    classical_order, classical_success_rate, gcd, mod_pow, order_find, shor_attempt, shor_bound,
    shor_factor, AttemptKind, AttemptRecord, OrderAttempt, OrderFindingInstance, ShorReport,
};
