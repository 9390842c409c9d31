//! Real scalar abstraction for the simulator core.
//!
//! All amplitude arithmetic is written against [`Real`], so the same code
//! runs in single or double precision. Protocol layers pick `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};

pub trait Real: Float + FloatConst + Debug + Display + Sum + Send + Sync + Default + 'static {
    /// Tolerance for algebraic identities (unitarity, normalization).
    const TOLERANCE: Self;
    /// Probability below which a measurement branch counts as impossible.
    const NEGLIGIBLE: Self;

    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;
}

impl Real for f64 {
    const TOLERANCE: Self = 1e-9;
    const NEGLIGIBLE: Self = 1e-12;

    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    const TOLERANCE: Self = 1e-5;
    const NEGLIGIBLE: Self = 1e-7;

    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}
