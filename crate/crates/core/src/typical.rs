//! Random instances: Porter-Thomas right-hand sides and uniform spectra on
//! `[-1, -1/kappa] ∪ [1/kappa, 1]`, plus the concentration experiment for
//! `||A^{-1}|b>||` and the Chernoff/MGF bounds that control its tails.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, QsvError, Result};
use crate::instances::{QlspInstance, Spectrum};
use crate::linalg::StateVector;
use crate::quadrature::integrate;
use crate::scalar::Scalar;

/// Exponent constants of the four tail bounds.
pub const NORM_UPPER_RATE: f64 = 0.087;
pub const NORM_LOWER_RATE: f64 = 0.014;
pub const INVERSE_UPPER_RATE: f64 = 0.013;
pub const INVERSE_LOWER_RATE: f64 = 0.017;

/// Independent stream for trial `index` of an experiment seeded with `seed`.
/// Streams do not depend on scheduling, so parallel runs are bit-identical.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Unnormalized squared amplitudes `p_j`, i.i.d. with density `N e^{-N p}`.
pub fn sample_porter_thomas_weights<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let exp = Exp::new(n as f64).expect("rate N > 0");
    (0..n).map(|_| T::of(exp.sample(rng))).collect()
}

fn porter_thomas_amplitudes<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> (Vec<T>, Vec<Complex<T>>) {
    let weights: Vec<T> = sample_porter_thomas_weights(n, rng);
    let amps = weights
        .iter()
        .map(|&p| {
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            Complex::from_polar(p.sqrt(), T::of(phase))
        })
        .collect();
    (weights, amps)
}

/// Porter-Thomas state with uniform phases, renormalized.
pub fn sample_porter_thomas_state<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<StateVector<T>> {
    if n < 2 {
        return Err(QsvError::DimensionTooSmall(n));
    }
    StateVector::new(porter_thomas_amplitudes(n, rng).1)
}

/// Eigenvalues with a fair random sign and magnitude uniform on `[1/kappa, 1]`.
pub fn sample_uniform_spectrum<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    kappa: T,
    rng: &mut R,
) -> Result<Spectrum<T>> {
    if n < 2 {
        return Err(QsvError::DimensionTooSmall(n));
    }
    if !(kappa > T::one()) {
        return Err(out_of_range("kappa", format!("{kappa} must be > 1")));
    }
    let lo = kappa.recip().as_f64();
    let eigvals = (0..n)
        .map(|_| {
            let mag = rng.random_range(lo..=1.0);
            let sign = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            T::of(sign * mag)
        })
        .collect();
    Spectrum::typical(eigvals, kappa)
}

/// A random instance whose spectrum has exact extremal magnitudes 1 and
/// 1/kappa (random signs) at indices 0 and 1, the rest uniform, and a
/// Porter-Thomas right-hand side.
pub fn sample_strict_instance<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    kappa: T,
    rng: &mut R,
) -> Result<QlspInstance<T>> {
    let typical = sample_uniform_spectrum(n, kappa, rng)?;
    let mut eigvals = typical.eigvals().to_vec();
    let flip = |rng: &mut R| {
        if rng.random_bool(0.5) {
            -T::one()
        } else {
            T::one()
        }
    };
    eigvals[0] = flip(rng);
    eigvals[1] = flip(rng) * kappa.recip();
    let spectrum = Spectrum::new(eigvals, kappa)?;
    QlspInstance::with_default_epsilon(spectrum, sample_porter_thomas_state(n, rng)?)
}

/// Raw quantities of a single random draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSample {
    /// `|| |b_bar> ||^2 = sum p`.
    pub norm_sq: f64,
    /// `|| A^{-1} |b_bar> ||^2 = sum p / lambda^2`.
    pub inverse_norm_sq_unnormalized: f64,
    /// `|| A^{-1} |b> ||` for the renormalized state.
    pub inverse_norm: f64,
}

pub fn sample_trial(n: usize, kappa: f64, seed: u64, index: u64) -> Result<TrialSample> {
    let mut rng = trial_rng(seed, index);
    let spectrum: Spectrum<f64> = sample_uniform_spectrum(n, kappa, &mut rng)?;
    let (weights, amps) = porter_thomas_amplitudes::<f64, _>(n, &mut rng);
    let norm_sq: f64 = weights.iter().sum();
    let inv_sq: f64 = weights
        .iter()
        .zip(spectrum.eigvals())
        .map(|(p, l)| p / (l * l))
        .sum();
    let inst = QlspInstance::with_default_epsilon(spectrum, StateVector::new(amps)?)?;
    Ok(TrialSample {
        norm_sq,
        inverse_norm_sq_unnormalized: inv_sq,
        inverse_norm: inst.inverse_norm(),
    })
}

/// `[sqrt(kappa/2), sqrt(3 kappa/2)]`.
pub fn concentration_window(kappa: f64) -> (f64, f64) {
    ((kappa / 2.0).sqrt(), (1.5 * kappa).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub kappa: f64,
    pub trials: usize,
    pub values: Vec<f64>,
    pub tail_count: usize,
    pub empirical_tail: f64,
    pub bound_value: f64,
    pub seed: u64,
}

impl ConcentrationReport {
    pub fn in_window(&self, index: usize) -> bool {
        let (lo, hi) = concentration_window(self.kappa);
        (lo..=hi).contains(&self.values[index])
    }
}

/// Samples `trials` random instances and counts how often `||A^{-1}|b>||`
/// leaves the concentration window. Uses the ambient rayon pool.
pub fn concentration_experiment(
    n: usize,
    kappa: f64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if trials == 0 {
        return Err(out_of_range("trials", "must be >= 1"));
    }
    if n < 2 {
        return Err(QsvError::DimensionTooSmall(n));
    }
    if !(kappa > 1.0) {
        return Err(out_of_range("kappa", format!("{kappa} must be > 1")));
    }
    let samples: Vec<TrialSample> = (0..trials as u64)
        .into_par_iter()
        .map(|i| sample_trial(n, kappa, seed, i))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.inverse_norm).collect();
    let (lo, hi) = concentration_window(kappa);
    let tail_count = values.iter().filter(|v| !(lo..=hi).contains(*v)).count();
    Ok(ConcentrationReport {
        n,
        kappa,
        trials,
        values,
        tail_count,
        empirical_tail: tail_count as f64 / trials as f64,
        bound_value: chernoff_bounds(n, kappa)?.simplified,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffBounds {
    /// `Pr(sum p >= 3/2) <= e^{-0.087 N}`.
    pub norm_upper: f64,
    /// `Pr(sum p <= 5/6) <= e^{-0.014 N}`.
    pub norm_lower: f64,
    /// `Pr(sum p/lambda^2 >= 5 kappa/4) <= e^{-0.013 N/kappa}`.
    pub inverse_upper: f64,
    /// `Pr(sum p/lambda^2 <= 3 kappa/4) <= e^{-0.017 N/kappa}`.
    pub inverse_lower: f64,
    pub sum: f64,
    /// `4 e^{-0.013 N/kappa}`.
    pub simplified: f64,
    /// `N = 0`: every bound is trivially 1.
    pub degenerate: bool,
}

pub fn chernoff_bounds(n: usize, kappa: f64) -> Result<ChernoffBounds> {
    if !(kappa >= 1.0) {
        return Err(out_of_range("kappa", format!("{kappa} must be >= 1")));
    }
    let nf = n as f64;
    let norm_upper = (-NORM_UPPER_RATE * nf).exp();
    let norm_lower = (-NORM_LOWER_RATE * nf).exp();
    let inverse_upper = (-INVERSE_UPPER_RATE * nf / kappa).exp();
    let inverse_lower = (-INVERSE_LOWER_RATE * nf / kappa).exp();
    Ok(ChernoffBounds {
        norm_upper,
        norm_lower,
        inverse_upper,
        inverse_lower,
        sum: norm_upper + norm_lower + inverse_upper + inverse_lower,
        simplified: 4.0 * inverse_upper,
        degenerate: n == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgfSign {
    Plus,
    Minus,
}

/// `E[e^{±t N p / lambda^2}] = (1/(1 - 1/kappa)) int_{1/kappa}^1 dlambda / (1 ∓ t/lambda^2)`.
pub fn mgf_lambda_integral<T: Scalar>(kappa: T, t: T, sign: MgfSign) -> Result<T> {
    if !(kappa > T::one()) {
        return Err(out_of_range("kappa", format!("{kappa} must be > 1")));
    }
    if !(t >= T::zero()) {
        return Err(out_of_range("t", format!("{t} must be >= 0")));
    }
    let s = match sign {
        MgfSign::Plus => {
            if t * kappa * kappa >= T::one() {
                return Err(out_of_range(
                    "t",
                    "t * kappa^2 >= 1 makes the integrand singular",
                ));
            }
            -T::one()
        }
        MgfSign::Minus => T::one(),
    };
    let lo = kappa.recip();
    let integrand = move |l: T| T::one() / (T::one() + s * t / (l * l));
    let rel = T::of(1e-12).max(T::epsilon() * T::of(64.0));
    Ok(integrate(integrand, lo, T::one(), rel) / (T::one() - lo))
}

/// `t = 1/(8 kappa^2)`, the evaluation point of the MGF bounds.
pub fn mgf_reference_t(kappa: f64) -> f64 {
    1.0 / (8.0 * kappa * kappa)
}
