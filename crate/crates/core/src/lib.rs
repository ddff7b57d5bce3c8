//! Numerical lab for query lower bounds on quantum state verification and
//! quantum linear system solving.
//!
//! Everything works in the eigenbasis of `A`, so `A` is a diagonal of real
//! eigenvalues and states are complex amplitude vectors in that basis.

// `!(x > 0)` style guards are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod cost;
pub mod eigen;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod pm;
pub mod quadrature;
pub mod scalar;
pub mod typical;
pub mod verifier;

pub use adversary::{build_pair, AdversarialPair, PairCertificate, QueryBound};
pub use cost::{spectral_gap, CostSpectrum, GapReport};
pub use error::{QsvError, Result};
pub use instances::{InstanceRecord, QlspInstance, Spectrum, SpectrumMode};
pub use linalg::{mixed_trace_distance, pure_trace_distance, DensityState, StateVector};
pub use pm::{pm_certificate, PmCertificate};
pub use scalar::{Scalar, Tolerances};
pub use verifier::{run_verifier, TestState, TestStateKind, VerifierOutcome};

pub type StateVectorF64 = StateVector<f64>;
pub type StateVectorF32 = StateVector<f32>;
pub type DensityStateF64 = DensityState<f64>;
pub type DensityStateF32 = DensityState<f32>;
pub type SpectrumF64 = Spectrum<f64>;
pub type SpectrumF32 = Spectrum<f32>;
pub type QlspInstanceF64 = QlspInstance<f64>;
pub type QlspInstanceF32 = QlspInstance<f32>;
pub type AdversarialPairF64 = AdversarialPair<f64>;
pub type AdversarialPairF32 = AdversarialPair<f32>;
