//! Pure states, finite ensembles, overlaps, and trace distances.

use num_complex::Complex;

use crate::eigen::{hermitian_eigen, HermitianMatrix};
use crate::error::{QsvError, Result};
use crate::scalar::Scalar;

/// Largest combined member count `mixed_trace_distance` accepts.
pub const MAX_ENSEMBLE_RANK: usize = 64;

/// A normalized complex amplitude vector of dimension at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// Normalizes `amps` into a unit state.
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(QsvError::DimensionTooSmall(amps.len()));
        }
        let norm = euclidean_norm(&amps);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(QsvError::ZeroVector);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { amps })
    }

    /// Accepts `amps` only if they are already unit-norm within tolerance.
    pub fn from_normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(QsvError::DimensionTooSmall(amps.len()));
        }
        let norm = euclidean_norm(&amps);
        if (norm - T::one()).abs() > T::norm_tol() {
            return Err(QsvError::NotNormalized {
                norm: norm.as_f64(),
            });
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[T]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| Complex::new(a, T::zero())).collect())
    }

    /// Computational basis vector `e_index` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(QsvError::DimensionTooSmall(dim));
        }
        if index >= dim {
            return Err(crate::error::out_of_range(
                "index",
                format!("{index} >= dimension {dim}"),
            ));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn scaled_phase(&self, phase: T) -> Self {
        let factor = Complex::from_polar(T::one(), phase);
        Self {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// A unit vector orthogonal to `self`: the basis vector with the smallest
    /// overlap, Gram-Schmidt-corrected.
    pub fn orthogonal_complement_vector(&self) -> Self {
        let (j, _) = self
            .amps
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
            .expect("dimension >= 2");
        let mut e = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        e[j] = Complex::new(T::one(), T::zero());
        let proj = self.amps[j].conj();
        for (ek, sk) in e.iter_mut().zip(&self.amps) {
            *ek = *ek - sk * proj;
        }
        // second pass for accuracy
        let proj2 = inner_unchecked(&self.amps, &e);
        for (ek, sk) in e.iter_mut().zip(&self.amps) {
            *ek = *ek - sk * proj2;
        }
        Self::new(e).expect("complement of a unit vector is nonzero")
    }
}

pub(crate) fn euclidean_norm<T: Scalar>(amps: &[Complex<T>]) -> T {
    // scaled to avoid overflow/underflow on extreme inputs
    let scale = amps
        .iter()
        .map(|a| a.re.abs().max(a.im.abs()))
        .fold(T::zero(), T::max);
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s: T = amps.iter().map(|a| (a / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

pub(crate) fn inner_unchecked<T: Scalar>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter()
        .zip(v)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
            acc + a.conj() * b
        })
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(QsvError::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `<u|v>`, conjugate-linear in `u`.
pub fn inner<T: Scalar>(u: &StateVector<T>, v: &StateVector<T>) -> Result<Complex<T>> {
    check_dims(u.dim(), v.dim())?;
    Ok(inner_unchecked(&u.amps, &v.amps))
}

// ||v - <u|v> u||, i.e. sqrt(1 - |<u|v>|^2) without the cancellation near 1.
fn residual_norm<T: Scalar>(u: &[Complex<T>], v: &[Complex<T>]) -> T {
    let ov = inner_unchecked(u, v);
    let r: Vec<Complex<T>> = u.iter().zip(v).map(|(a, b)| b - a * ov).collect();
    euclidean_norm(&r)
}

/// Trace distance between pure states, `sqrt(1 - |<u|v>|^2)`.
pub fn pure_trace_distance<T: Scalar>(u: &StateVector<T>, v: &StateVector<T>) -> Result<T> {
    check_dims(u.dim(), v.dim())?;
    let two = T::one() + T::one();
    let d = (residual_norm(&u.amps, &v.amps) + residual_norm(&v.amps, &u.amps)) / two;
    Ok(d.max(T::zero()).min(T::one()))
}

/// A density operator as a finite ensemble `sum_i w_i |psi_i><psi_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState<T> {
    ensemble: Vec<(T, StateVector<T>)>,
}

impl<T: Scalar> DensityState<T> {
    pub fn pure(state: StateVector<T>) -> Self {
        Self {
            ensemble: vec![(T::one(), state)],
        }
    }

    pub fn mixture(ensemble: Vec<(T, StateVector<T>)>) -> Result<Self> {
        let first = ensemble
            .first()
            .ok_or_else(|| QsvError::InvalidEnsemble("empty ensemble".into()))?;
        let dim = first.1.dim();
        let mut total = T::zero();
        for (w, s) in &ensemble {
            if !(*w >= T::zero()) || *w > T::one() {
                return Err(QsvError::InvalidEnsemble(format!(
                    "weight {w} outside [0,1]"
                )));
            }
            check_dims(dim, s.dim())?;
            total = total + *w;
        }
        if (total - T::one()).abs() > T::norm_tol() {
            return Err(QsvError::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { ensemble })
    }

    pub fn dim(&self) -> usize {
        self.ensemble[0].1.dim()
    }

    pub fn members(&self) -> &[(T, StateVector<T>)] {
        &self.ensemble
    }

    pub fn rank_bound(&self) -> usize {
        self.ensemble.len()
    }

    /// `<x|rho|x>`.
    pub fn fidelity_with_pure(&self, x: &StateVector<T>) -> Result<T> {
        check_dims(self.dim(), x.dim())?;
        Ok(self
            .ensemble
            .iter()
            .map(|(w, s)| *w * inner_unchecked(&x.amps, &s.amps).norm_sqr())
            .sum())
    }

    /// `Tr(rho sigma)`.
    pub fn overlap(&self, other: &DensityState<T>) -> Result<T> {
        check_dims(self.dim(), other.dim())?;
        let mut acc = T::zero();
        for (w, s) in &self.ensemble {
            for (u, t) in &other.ensemble {
                acc = acc + *w * *u * inner_unchecked(&s.amps, &t.amps).norm_sqr();
            }
        }
        Ok(acc)
    }
}

impl<T: Scalar> From<StateVector<T>> for DensityState<T> {
    fn from(s: StateVector<T>) -> Self {
        Self::pure(s)
    }
}

/// Trace distance between two ensembles.
///
/// The difference operator `sum_i r_i |psi_i><psi_i| - sum_j s_j |phi_j><phi_j|`
/// is compressed onto an orthonormal basis of the members' span, so the
/// eigenproblem is at most (members x members) whatever the dimension.
pub fn mixed_trace_distance<T: Scalar>(r: &DensityState<T>, s: &DensityState<T>) -> Result<T> {
    check_dims(r.dim(), s.dim())?;
    let rank = r.rank_bound() + s.rank_bound();
    if rank > MAX_ENSEMBLE_RANK {
        return Err(QsvError::RankLimitExceeded {
            rank,
            limit: MAX_ENSEMBLE_RANK,
        });
    }
    let members: Vec<(T, &StateVector<T>)> = r
        .ensemble
        .iter()
        .map(|(w, v)| (*w, v))
        .chain(s.ensemble.iter().map(|(w, v)| (-*w, v)))
        .collect();

    // two-pass Gram-Schmidt; members already in the span are skipped
    let keep = T::of(100.0) * T::epsilon();
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    for (_, m) in &members {
        let mut w = m.amps.clone();
        for _ in 0..2 {
            for q in &basis {
                let ov = inner_unchecked(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi = *wi - qi * ov);
            }
        }
        let nrm = euclidean_norm(&w);
        if nrm > keep {
            basis.push(w.into_iter().map(|c| c / nrm).collect());
        }
    }
    let coords: Vec<Vec<Complex<T>>> = members
        .iter()
        .map(|(_, m)| basis.iter().map(|q| inner_unchecked(q, &m.amps)).collect())
        .collect();
    let compressed = HermitianMatrix::from_fn(basis.len(), |a, b| {
        members
            .iter()
            .zip(&coords)
            .fold(Complex::new(T::zero(), T::zero()), |acc, ((w, _), c)| {
                acc + c[a] * c[b].conj() * *w
            })
    });
    let eig = hermitian_eigen(&compressed);
    let d: T = eig.values.iter().map(|x| x.abs()).sum::<T>() * T::of(0.5);
    Ok(d.max(T::zero()).min(T::one()))
}
