//! Solve-then-compare verification: prepare (an approximation of) `|x>`,
//! run the swap test against the candidate 64 times, and accept when at
//! least 59 shots report 1.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, QsvError, Result};
use crate::instances::QlspInstance;
use crate::linalg::{inner_unchecked, mixed_trace_distance, DensityState, StateVector};
use crate::scalar::Scalar;
use crate::typical::trial_rng;

pub const SHOTS: usize = 64;
pub const ACCEPT_THRESHOLD: usize = 59;
/// Largest solver error the amplification analysis covers.
pub const MAX_SOLVER_ERROR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestStateKind {
    /// `cos(a)|x> + sin(a)|x_perp>` with `sin(a) = D`.
    Pure,
    /// `(1 - D)|x><x| + D|y><y|` with `y ⟂ x`.
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestState<T> {
    pub rho: DensityState<T>,
    pub target_distance: T,
    pub kind: TestStateKind,
}

pub fn make_test_state<T: Scalar>(
    x: &StateVector<T>,
    distance: T,
    kind: TestStateKind,
) -> Result<TestState<T>> {
    if !(distance >= T::zero() && distance <= T::one()) {
        return Err(out_of_range("D", format!("{distance} outside [0, 1]")));
    }
    let perp = x.orthogonal_complement_vector();
    let rho = match kind {
        TestStateKind::Pure => {
            let sin = distance;
            let cos = (T::one() - sin * sin).max(T::zero()).sqrt();
            let amps = x
                .amps()
                .iter()
                .zip(perp.amps())
                .map(|(a, p)| a * cos + p * sin)
                .collect();
            DensityState::pure(StateVector::new(amps)?)
        }
        TestStateKind::Mixed => {
            DensityState::mixture(vec![(T::one() - distance, x.clone()), (distance, perp)])?
        }
    };
    let measured = mixed_trace_distance(&rho, &DensityState::pure(x.clone()))?;
    debug_assert!((measured - distance).abs() <= T::eq_tol());
    Ok(TestState {
        rho,
        target_distance: measured,
        kind,
    })
}

/// `(1 + Tr(rho sigma)) / 2`.
pub fn swap_test_prob<T: Scalar>(rho: &DensityState<T>, sigma: &DensityState<T>) -> Result<T> {
    let ov = rho.overlap(sigma)?;
    Ok(((T::one() + ov) * T::of(0.5)).max(T::of(0.5)).min(T::one()))
}

fn binomial<T: Scalar>(n: u32, k: u32) -> T {
    (0..k).fold(T::one(), |acc, i| {
        acc * T::of((n - i) as f64) / T::of((i + 1) as f64)
    })
}

/// Probability that at least 59 of 64 independent shots succeed:
/// `sum_{k=0}^{5} C(64,k) (1-p)^k p^{64-k}`.
pub fn amplify64<T: Scalar>(p: T) -> T {
    let p = p.max(T::zero()).min(T::one());
    let q = T::one() - p;
    let shots = SHOTS as u32;
    let misses = (SHOTS - ACCEPT_THRESHOLD) as u32;
    (0..=misses)
        .map(|k| binomial::<T>(shots, k) * q.powi(k as i32) * p.powi((shots - k) as i32))
        .sum::<T>()
        .min(T::one())
}

/// `(amplify64(15/16 - 1/100), amplify64(7/8 + 1/100))`: acceptance
/// probability on the close branch and on the far branch with solver error 1/100.
pub fn amplify64_noisy_thresholds<T: Scalar>() -> (T, T) {
    let eps = T::of(MAX_SOLVER_ERROR);
    (
        amplify64(T::of(15.0) / T::of(16.0) - eps),
        amplify64(T::of(7.0) / T::of(8.0) + eps),
    )
}

/// `(||A^{-1}|b>|| / kappa)^2`.
pub fn p_success<T: Scalar>(inst: &QlspInstance<T>) -> T {
    let r = inst.inverse_norm() / inst.kappa();
    r * r
}

/// Amplitude-amplification rounds, `round(1/sqrt(p_success))`, at least 1.
pub fn amplification_rounds<T: Scalar>(p: T) -> u64 {
    let r = p.sqrt().recip().round();
    r.to_u64().unwrap_or(u64::MAX).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifierOutcome {
    pub r: bool,
    pub shots: Vec<bool>,
    pub p_prime: f64,
    pub p_r1_exact: f64,
    pub q_uses: u64,
    pub p_success: f64,
    /// Success probability of the imperfect solver, `p (1 + delta)` with `|delta| <= eps`.
    pub p_success_solver: f64,
    pub rounds: u64,
    pub seed: u64,
}

impl VerifierOutcome {
    pub fn hamming(&self) -> usize {
        self.shots.iter().filter(|s| **s).count()
    }

    pub fn record(&self) -> OutcomeRecord {
        OutcomeRecord {
            r: u8::from(self.r),
            hamming: self.hamming(),
            p_r1_exact: self.p_r1_exact,
            q_uses: self.q_uses,
            rounds: self.rounds,
            p_success: self.p_success,
            seed: self.seed,
        }
    }
}

/// Wire format of one verifier run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub r: u8,
    pub hamming: usize,
    pub p_r1_exact: f64,
    pub q_uses: u64,
    pub rounds: u64,
    pub p_success: f64,
    pub seed: u64,
}

/// Approximate solution at exact trace distance `eps` from `x`, tilted along
/// a random direction orthogonal to `x`.
fn noisy_solution<T: Scalar, R: Rng + ?Sized>(
    x: &StateVector<T>,
    eps: T,
    rng: &mut R,
) -> Result<StateVector<T>> {
    if eps == T::zero() {
        return Ok(x.clone());
    }
    let mut dir: Vec<Complex<T>> = (0..x.dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(T::of(re), T::of(im))
        })
        .collect();
    for _ in 0..2 {
        let ov = inner_unchecked(x.amps(), &dir);
        for (d, a) in dir.iter_mut().zip(x.amps()) {
            *d = *d - a * ov;
        }
    }
    let dir = StateVector::new(dir)?;
    let cos = (T::one() - eps * eps).sqrt();
    StateVector::new(
        x.amps()
            .iter()
            .zip(dir.amps())
            .map(|(a, d)| a * cos + d * eps)
            .collect(),
    )
}

/// One verification run. `seed` is recorded in the outcome; randomness
/// comes from `rng`.
pub fn run_verifier<T: Scalar, R: Rng + ?Sized>(
    inst: &QlspInstance<T>,
    rho: &DensityState<T>,
    eps_solver: T,
    seed: u64,
    rng: &mut R,
) -> Result<VerifierOutcome> {
    if !(eps_solver >= T::zero()) || eps_solver > T::of(MAX_SOLVER_ERROR) {
        return Err(QsvError::SolverErrorTooLarge(eps_solver.as_f64()));
    }
    if rho.dim() != inst.dim() {
        return Err(QsvError::DimensionMismatch {
            left: inst.dim(),
            right: rho.dim(),
        });
    }
    let solution = noisy_solution(inst.solve(), eps_solver, rng)?;
    let p_prime = swap_test_prob(rho, &DensityState::pure(solution))?.as_f64();
    let shots: Vec<bool> = (0..SHOTS).map(|_| rng.random_bool(p_prime)).collect();
    let weight = shots.iter().filter(|s| **s).count();
    let p = p_success(inst).as_f64();
    let delta = if eps_solver > T::zero() {
        let e = eps_solver.as_f64();
        rng.random_range(-e..=e)
    } else {
        0.0
    };
    let rounds = amplification_rounds(p);
    Ok(VerifierOutcome {
        r: weight >= ACCEPT_THRESHOLD,
        shots,
        p_prime,
        p_r1_exact: amplify64(p_prime),
        q_uses: SHOTS as u64 * rounds,
        p_success: p,
        p_success_solver: p * (1.0 + delta),
        rounds,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceStats {
    pub runs: usize,
    pub accepts: usize,
    pub accept_rate: f64,
    /// Mean of the exact per-run acceptance probabilities.
    pub expected_rate: f64,
    /// Binomial standard deviation of `accept_rate` around `expected_rate`.
    pub sigma: f64,
}

/// Monte Carlo over `runs` independent verifier executions; run `i` draws
/// from stream `i` of `seed`.
pub fn verifier_runs<T: Scalar>(
    inst: &QlspInstance<T>,
    rho: &DensityState<T>,
    eps_solver: T,
    runs: usize,
    seed: u64,
) -> Result<Vec<VerifierOutcome>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|i| run_verifier(inst, rho, eps_solver, seed, &mut trial_rng(seed, i)))
        .collect()
}

pub fn acceptance_stats(outcomes: &[VerifierOutcome]) -> AcceptanceStats {
    let runs = outcomes.len();
    let accepts = outcomes.iter().filter(|o| o.r).count();
    let expected = outcomes.iter().map(|o| o.p_r1_exact).sum::<f64>() / runs.max(1) as f64;
    AcceptanceStats {
        runs,
        accepts,
        accept_rate: accepts as f64 / runs.max(1) as f64,
        expected_rate: expected,
        sigma: (expected * (1.0 - expected) / runs.max(1) as f64).sqrt(),
    }
}
