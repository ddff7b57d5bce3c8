use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Numeric tolerances shared by every module.
///
/// One record per scalar type; the f64 values are the reference ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of a state norm from 1.
    pub normalization: f64,
    /// Slack for equalities and certified inequalities.
    pub equality: f64,
    /// Eigenvalues of the cost Hamiltonian below this count as zero.
    pub zero_eigenvalue: f64,
}

pub const F64_TOLERANCES: Tolerances = Tolerances {
    normalization: 1e-12,
    equality: 1e-10,
    zero_eigenvalue: 1e-10,
};

pub const F32_TOLERANCES: Tolerances = Tolerances {
    normalization: 1e-5,
    equality: 1e-4,
    zero_eigenvalue: 1e-4,
};

/// Real scalar the simulation is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    const TOL: Tolerances;

    /// Lossy conversion from an `f64` literal or sample.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    #[inline]
    fn norm_tol() -> Self {
        Self::of(Self::TOL.normalization)
    }

    #[inline]
    fn eq_tol() -> Self {
        Self::of(Self::TOL.equality)
    }
}

impl Scalar for f64 {
    const TOL: Tolerances = F64_TOLERANCES;
}

impl Scalar for f32 {
    const TOL: Tolerances = F32_TOLERANCES;
}
