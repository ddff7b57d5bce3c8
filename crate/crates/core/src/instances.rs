//! QLSP instances in the eigenbasis of `A`.
//!
//! `A` is represented by its eigenvalues; `|b>` and `|x>` are amplitude
//! vectors in the same basis, so `A^{-1}` acts component-wise.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, QsvError, Result};
use crate::linalg::{euclidean_norm, StateVector};
use crate::scalar::Scalar;

pub const DEFAULT_EPSILON: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    /// Extremal magnitudes are exactly 1 and 1/kappa.
    Strict,
    /// Only `|lambda| in [1/kappa, 1]` is enforced; kappa is the sampling parameter.
    Typical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    eigvals: Vec<T>,
    kappa: T,
    mode: SpectrumMode,
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(eigvals: Vec<T>, kappa: T) -> Result<Self> {
        Self::with_mode(eigvals, kappa, SpectrumMode::Strict)
    }

    pub fn typical(eigvals: Vec<T>, kappa: T) -> Result<Self> {
        Self::with_mode(eigvals, kappa, SpectrumMode::Typical)
    }

    pub fn with_mode(eigvals: Vec<T>, kappa: T, mode: SpectrumMode) -> Result<Self> {
        if eigvals.len() < 2 {
            return Err(QsvError::DimensionTooSmall(eigvals.len()));
        }
        if !(kappa >= T::one()) || !kappa.is_finite() {
            return Err(QsvError::InvalidSpectrum(format!(
                "kappa = {kappa} must be >= 1"
            )));
        }
        let tol = T::norm_tol();
        let lo = kappa.recip();
        for &l in &eigvals {
            let a = l.abs();
            if !a.is_finite() || a < lo - tol || a > T::one() + tol {
                return Err(QsvError::InvalidSpectrum(format!(
                    "|{l}| outside [1/kappa, 1] for kappa = {kappa}"
                )));
            }
        }
        if mode == SpectrumMode::Strict {
            let max = eigvals.iter().map(|l| l.abs()).fold(T::zero(), T::max);
            let min = eigvals.iter().map(|l| l.abs()).fold(T::infinity(), T::min);
            if (max - T::one()).abs() > tol {
                return Err(QsvError::InvalidSpectrum(format!(
                    "max |lambda| = {max}, expected 1"
                )));
            }
            if (min - lo).abs() > tol {
                return Err(QsvError::InvalidSpectrum(format!(
                    "min |lambda| = {min}, expected 1/kappa = {lo}"
                )));
            }
        }
        Ok(Self {
            eigvals,
            kappa,
            mode,
        })
    }

    pub fn eigvals(&self) -> &[T] {
        &self.eigvals
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn mode(&self) -> SpectrumMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    /// Lowest index whose eigenvalue has magnitude 1/kappa (within tolerance).
    pub fn minimal_index(&self) -> Option<usize> {
        let lo = self.kappa.recip();
        self.eigvals
            .iter()
            .position(|l| (l.abs() - lo).abs() <= T::norm_tol())
    }

    /// Eigenvalue magnitudes, ascending.
    pub fn sorted_magnitudes(&self) -> Vec<T> {
        let mut m: Vec<T> = self.eigvals.iter().map(|l| l.abs()).collect();
        m.sort_by(|a, b| a.partial_cmp(b).unwrap());
        m
    }
}

/// `(A, |b>, epsilon)` together with the cached solution `|x>` and `||A^{-1}|b>||`.
#[derive(Debug, Clone, PartialEq)]
pub struct QlspInstance<T> {
    spectrum: Spectrum<T>,
    b: StateVector<T>,
    epsilon: T,
    x: StateVector<T>,
    inverse_norm: T,
}

impl<T: Scalar> QlspInstance<T> {
    pub fn new(spectrum: Spectrum<T>, b: StateVector<T>, epsilon: T) -> Result<Self> {
        if spectrum.dim() != b.dim() {
            return Err(QsvError::DimensionMismatch {
                left: spectrum.dim(),
                right: b.dim(),
            });
        }
        if !(epsilon > T::zero()) {
            return Err(out_of_range("epsilon", format!("{epsilon} must be > 0")));
        }
        let unnormalized: Vec<Complex<T>> = b
            .amps()
            .iter()
            .zip(spectrum.eigvals())
            .map(|(a, &l)| a / l)
            .collect();
        let inverse_norm = euclidean_norm(&unnormalized);
        let x = StateVector::new(unnormalized)?;
        Ok(Self {
            spectrum,
            b,
            epsilon,
            x,
            inverse_norm,
        })
    }

    pub fn with_default_epsilon(spectrum: Spectrum<T>, b: StateVector<T>) -> Result<Self> {
        Self::new(spectrum, b, T::of(DEFAULT_EPSILON))
    }

    /// Same `A` and epsilon, different right-hand side.
    pub fn with_b(&self, b: StateVector<T>) -> Result<Self> {
        Self::new(self.spectrum.clone(), b, self.epsilon)
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn b(&self) -> &StateVector<T> {
        &self.b
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn kappa(&self) -> T {
        self.spectrum.kappa
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    /// `|x> = A^{-1}|b> / ||A^{-1}|b>||`.
    pub fn solve(&self) -> &StateVector<T> {
        &self.x
    }

    /// `||A^{-1}|b>||`, in `[1, kappa]`.
    pub fn inverse_norm(&self) -> T {
        self.inverse_norm
    }

    /// `kappa / ||A^{-1}|b>||`.
    pub fn susceptibility(&self) -> T {
        self.kappa() / self.inverse_norm
    }

    /// `floor(susceptibility / 13)`: the general lower bound on the number of
    /// controlled state-preparation calls.
    pub fn q0_general_bound(&self) -> u64 {
        floor_u64(self.susceptibility() / T::of(13.0))
    }

    /// `A v`, component-wise.
    pub fn apply_a(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        v.iter()
            .zip(self.spectrum.eigvals())
            .map(|(a, &l)| a * l)
            .collect()
    }

    pub fn to_record(&self) -> InstanceRecord {
        InstanceRecord {
            eigvals: self.spectrum.eigvals.iter().map(|l| l.as_f64()).collect(),
            kappa: self.kappa().as_f64(),
            b_re: self.b.amps().iter().map(|a| a.re.as_f64()).collect(),
            b_im: self.b.amps().iter().map(|a| a.im.as_f64()).collect(),
            epsilon: self.epsilon.as_f64(),
        }
    }

    /// Rebuilds an instance. The amplitudes must already be normalized so the
    /// round trip is exact; spectra failing the strict extremal check fall
    /// back to typical mode.
    pub fn from_record(record: &InstanceRecord) -> Result<Self> {
        if record.b_re.len() != record.b_im.len() {
            return Err(QsvError::InvalidRecord(
                "b_re and b_im lengths differ".into(),
            ));
        }
        let eigvals: Vec<T> = record.eigvals.iter().map(|&l| T::of(l)).collect();
        let kappa = T::of(record.kappa);
        let spectrum =
            Spectrum::new(eigvals.clone(), kappa).or_else(|_| Spectrum::typical(eigvals, kappa))?;
        let amps = record
            .b_re
            .iter()
            .zip(&record.b_im)
            .map(|(&re, &im)| Complex::new(T::of(re), T::of(im)))
            .collect();
        let b = StateVector::from_normalized(amps)?;
        Self::new(spectrum, b, T::of(record.epsilon))
    }
}

pub(crate) fn floor_u64<T: Scalar>(x: T) -> u64 {
    let f = x.floor();
    if f <= T::zero() {
        0
    } else {
        f.to_u64().unwrap_or(u64::MAX)
    }
}

/// Wire format of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub eigvals: Vec<f64>,
    pub kappa: f64,
    pub b_re: Vec<f64>,
    pub b_im: Vec<f64>,
    pub epsilon: f64,
}

impl InstanceRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| QsvError::InvalidRecord(e.to_string()))
    }
}

/// High-susceptibility instance: `|b>` is the eigenvector of eigenvalue 1,
/// eigenvalue 1/kappa sits at index 1, and any further eigenvalues are
/// spaced evenly inside `(1/kappa, 1)`.
pub fn worst_case_instance<T: Scalar>(kappa: T, n: usize) -> Result<QlspInstance<T>> {
    if n < 2 {
        return Err(QsvError::DimensionTooSmall(n));
    }
    if !(kappa >= T::one()) {
        return Err(out_of_range("kappa", format!("{kappa} must be >= 1")));
    }
    let lo = kappa.recip();
    let mut eigvals = vec![T::one(), lo];
    let steps = T::of((n - 1) as f64);
    for j in 2..n {
        let frac = T::of((j - 1) as f64) / steps;
        eigvals.push(lo + (T::one() - lo) * frac);
    }
    let spectrum = Spectrum::new(eigvals, kappa)?;
    QlspInstance::with_default_epsilon(spectrum, StateVector::basis(n, 0)?)
}

/// The two-dimensional pair `b = |1>`, `b' ∝ |1> + (1/kappa)|(1/kappa)>`,
/// whose solutions sit at trace distance `sqrt(1/2)` while `||b - b'|| = O(1/kappa)`.
pub fn worst_case_perturbed_pair<T: Scalar>(
    kappa: T,
) -> Result<(QlspInstance<T>, QlspInstance<T>)> {
    if !(kappa > T::one()) {
        return Err(out_of_range("kappa", format!("{kappa} must be > 1")));
    }
    let base = worst_case_instance(kappa, 2)?;
    let b_prime = StateVector::from_real(&[T::one(), kappa.recip()])?;
    let other = base.with_b(b_prime)?;
    Ok((base, other))
}
