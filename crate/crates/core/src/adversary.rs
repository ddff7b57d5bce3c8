//! Companion-instance construction behind the query lower bound.
//!
//! Given `(A, |b>)` we build `|b'>` close to `|b>` (distance `O(||A^{-1}|b>||/kappa)`)
//! whose solution `|x'>` is far from `|x>` (trace distance above 5/8), and
//! certify every inequality of the resulting bound chain numerically.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, QsvError, Result};
use crate::instances::{floor_u64, QlspInstance};
use crate::linalg::{euclidean_norm, inner, pure_trace_distance, StateVector};
use crate::scalar::Scalar;

/// A query count that may be unbounded (identical instances).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryBound {
    Finite(u64),
    Unbounded,
}

impl QueryBound {
    pub fn finite(self) -> Option<u64> {
        match self {
            QueryBound::Finite(q) => Some(q),
            QueryBound::Unbounded => None,
        }
    }

    /// `self >= q`, with `Unbounded` dominating everything.
    pub fn at_least(self, q: u64) -> bool {
        match self {
            QueryBound::Finite(p) => p >= q,
            QueryBound::Unbounded => true,
        }
    }
}

impl Serialize for QueryBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QueryBound::Finite(q) => s.serialize_u64(*q),
            QueryBound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for QueryBound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(q) => Ok(QueryBound::Finite(q)),
            Raw::S(s) if s == "unbounded" => Ok(QueryBound::Unbounded),
            Raw::S(s) => Err(serde::de::Error::custom(format!("unexpected bound {s:?}"))),
        }
    }
}

/// `|b> = v |m> + v_perp |perp>` with `|m>` the selected 1/kappa eigenvector
/// (carrying the phase of `b_m`) and `|perp>` orthogonal to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub min_index: usize,
    pub v: T,
    pub v_perp: T,
    pub comp_min: StateVector<T>,
    pub comp_perp: StateVector<T>,
}

pub fn decompose_b<T: Scalar>(inst: &QlspInstance<T>) -> Result<Decomposition<T>> {
    let m = inst
        .spectrum()
        .minimal_index()
        .ok_or(QsvError::NoMinimalEigenvalue)?;
    let n = inst.dim();
    let b = inst.b().amps();
    let bm = b[m];
    let v = bm.norm();
    let mut min_amps = vec![Complex::new(T::zero(), T::zero()); n];
    min_amps[m] = if v > T::zero() {
        bm / v
    } else {
        Complex::new(T::one(), T::zero())
    };
    let comp_min = StateVector::from_normalized(min_amps)?;

    // residual is b with component m removed: exact orthogonality to e_m
    let mut residual = b.to_vec();
    residual[m] = Complex::new(T::zero(), T::zero());
    let v_perp = euclidean_norm(&residual);
    let comp_perp = if v_perp > T::norm_tol() {
        StateVector::new(residual)?
    } else {
        // deterministic fill: lowest-index basis vector other than e_m
        StateVector::basis(n, if m == 0 { 1 } else { 0 })?
    };
    Ok(Decomposition {
        min_index: m,
        v,
        v_perp,
        comp_min,
        comp_perp,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialPair<T> {
    pub base: QlspInstance<T>,
    pub companion: QlspInstance<T>,
    pub b_prime: StateVector<T>,
    pub x_prime: StateVector<T>,
    pub v: T,
    pub v_perp: T,
    pub theta: T,
    pub dist_bb: T,
    pub dist_xx: T,
    pub sin_theta: T,
    pub q0_exact: QueryBound,
    pub q0_floor13: u64,
    pub min_eig_sign: i8,
}

/// `sqrt(25/61)`: the smallest solution distance the construction can produce.
pub fn extremal_distance<T: Scalar>() -> T {
    (T::of(25.0) / T::of(61.0)).sqrt()
}

/// `(2 sqrt(26) / 5) * ||A^{-1}|b>|| / kappa`.
pub fn b_distance_bound<T: Scalar>(inst: &QlspInstance<T>) -> T {
    T::of(2.0) * T::of(26.0).sqrt() / T::of(5.0) * inst.inverse_norm() / inst.kappa()
}

/// Builds the companion instance
/// `|b~> = |b> + (||A^{-1}|b>|| / kappa) (-|m> + |perp>/5)`, `|b'> = |b~>/|| |b~> ||`.
///
/// The same formula serves eigenvalue `-1/kappa`: that geometry is the
/// reflection `|m> -> -|m>` of the positive one, so every overlap agrees.
pub fn build_pair<T: Scalar>(inst: &QlspInstance<T>) -> Result<AdversarialPair<T>> {
    let dec = decompose_b(inst)?;
    let kappa = inst.kappa();
    let scale = inst.inverse_norm() / kappa;
    let fifth = T::of(0.2);
    let b_tilde: Vec<Complex<T>> = inst
        .b()
        .amps()
        .iter()
        .zip(dec.comp_min.amps())
        .zip(dec.comp_perp.amps())
        .map(|((b, m), p)| b + (p * fifth - m) * scale)
        .collect();
    assert!(euclidean_norm(&b_tilde) > T::zero(), "b~ cannot vanish");
    let b_prime = StateVector::new(b_tilde)?;
    let companion = inst.with_b(b_prime.clone())?;
    let x_prime = companion.solve().clone();

    let theta = rotation_angle(inst.b(), &b_prime)?;
    let sin_theta = controlled_unitary_distance(theta)?;
    let dist_bb = {
        let diff: Vec<Complex<T>> = inst
            .b()
            .amps()
            .iter()
            .zip(b_prime.amps())
            .map(|(u, w)| u - w)
            .collect();
        euclidean_norm(&diff)
    };
    let dist_xx = pure_trace_distance(inst.solve(), &x_prime)?;
    let lambda_min = inst.spectrum().eigvals()[dec.min_index];

    let pair = AdversarialPair {
        base: inst.clone(),
        companion,
        b_prime,
        x_prime,
        v: dec.v,
        v_perp: dec.v_perp,
        theta,
        dist_bb,
        dist_xx,
        sin_theta,
        q0_exact: q0_from_sin(sin_theta),
        q0_floor13: inst.q0_general_bound(),
        min_eig_sign: if lambda_min < T::zero() { -1 } else { 1 },
    };
    Ok(pair)
}

/// `theta = arccos <b'|b>`, evaluated as `atan2(|| b' - <b|b'> b ||, <b'|b>)`
/// for accuracy at small angles.
pub fn rotation_angle<T: Scalar>(b: &StateVector<T>, b_prime: &StateVector<T>) -> Result<T> {
    let ov = inner(b_prime, b)?;
    if ov.im.abs() > T::of(1e-8) {
        return Err(QsvError::ComplexOverlap(ov.im.as_f64()));
    }
    let cos = ov.re.max(-T::one()).min(T::one());
    let ovc = ov.conj();
    let orth: Vec<Complex<T>> = b_prime
        .amps()
        .iter()
        .zip(b.amps())
        .map(|(p, q)| p - q * ovc)
        .collect();
    let sin = euclidean_norm(&orth).min(T::one());
    let theta = sin.atan2(cos);
    Ok(theta.max(T::zero()).min(T::FRAC_PI_2()))
}

/// Distinguishability `max_psi sqrt(1 - |<psi| cU_b^{-1} cU_b' |psi>|^2)` of the
/// controlled rotation by `theta`; closed form `sin theta`.
pub fn controlled_unitary_distance<T: Scalar>(theta: T) -> Result<T> {
    let tol = T::norm_tol();
    if !(theta >= -tol && theta <= T::FRAC_PI_2() + tol) {
        return Err(out_of_range("theta", format!("{theta} outside [0, pi/2]")));
    }
    Ok(theta.max(T::zero()).min(T::FRAC_PI_2()).sin())
}

/// `floor(1 / (6 sin theta))`.
pub fn q0_from_sin<T: Scalar>(sin_theta: T) -> QueryBound {
    if sin_theta <= T::zero() {
        return QueryBound::Unbounded;
    }
    QueryBound::Finite(floor_u64((T::of(6.0) * sin_theta).recip()))
}

pub fn q0_exact<T: Scalar>(pair: &AdversarialPair<T>) -> QueryBound {
    pair.q0_exact
}

/// One line per certified inequality; all must hold for `bounds_ok`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundChecks {
    pub weights_valid: bool,
    pub theta_in_range: bool,
    pub overlap_nonnegative: bool,
    pub distance_above_five_eighths: bool,
    pub distance_above_extremal: bool,
    pub sin_below_dist_bb: bool,
    pub dist_bb_below_bound: bool,
    pub q0_above_floor13: bool,
}

impl BoundChecks {
    pub fn all(&self) -> bool {
        self.weights_valid
            && self.theta_in_range
            && self.overlap_nonnegative
            && self.distance_above_five_eighths
            && self.distance_above_extremal
            && self.sin_below_dist_bb
            && self.dist_bb_below_bound
            && self.q0_above_floor13
    }
}

impl<T: Scalar> AdversarialPair<T> {
    pub fn checks(&self) -> BoundChecks {
        let ntol = T::norm_tol();
        let etol = T::eq_tol();
        let overlap = inner(&self.b_prime, self.base.b()).expect("same dimension");
        BoundChecks {
            weights_valid: self.v >= T::zero()
                && self.v_perp >= T::zero()
                && (self.v * self.v + self.v_perp * self.v_perp - T::one()).abs() <= ntol,
            theta_in_range: self.theta >= -ntol && self.theta <= T::FRAC_PI_2() + ntol,
            overlap_nonnegative: overlap.re >= -etol && overlap.re <= T::one() + etol,
            distance_above_five_eighths: self.dist_xx > T::of(0.625),
            distance_above_extremal: self.dist_xx >= extremal_distance::<T>() - etol,
            sin_below_dist_bb: self.sin_theta <= self.dist_bb + etol,
            dist_bb_below_bound: self.dist_bb <= b_distance_bound(&self.base) + etol,
            q0_above_floor13: self.q0_exact.at_least(self.q0_floor13),
        }
    }

    pub fn bounds_ok(&self) -> bool {
        self.checks().all()
    }

    pub fn certificate(&self) -> PairCertificate {
        PairCertificate {
            kappa: self.base.kappa().as_f64(),
            inverse_norm: self.base.inverse_norm().as_f64(),
            v: self.v.as_f64(),
            theta: self.theta.as_f64(),
            dist_bb: self.dist_bb.as_f64(),
            dist_xx: self.dist_xx.as_f64(),
            sin_theta: self.sin_theta.as_f64(),
            q0_exact: self.q0_exact,
            q0_floor13: self.q0_floor13,
            bounds_ok: self.bounds_ok(),
        }
    }
}

/// Wire format of a certified pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub kappa: f64,
    pub inverse_norm: f64,
    pub v: f64,
    pub theta: f64,
    pub dist_bb: f64,
    pub dist_xx: f64,
    pub sin_theta: f64,
    pub q0_exact: QueryBound,
    pub q0_floor13: u64,
    pub bounds_ok: bool,
}
