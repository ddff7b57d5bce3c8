//! The variational cost Hamiltonian `H = A (1 - |b><b|) A`.
//!
//! In the eigenbasis of `A`, `H = D - z z^H` with `D = diag(lambda^2)` and
//! `z = A|b>`, a diagonal matrix minus a rank-one term. Its spectrum is
//! found from the secular equation `1 = sum_j |z_j|^2 / (d_j - mu)` after
//! deflating repeated diagonal entries and vanishing components.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, QsvError, Result};
use crate::instances::QlspInstance;
use crate::linalg::{euclidean_norm, inner_unchecked, DensityState};
use crate::scalar::{Scalar, F64_TOLERANCES};

/// Largest dimension `spectral_gap` will diagonalize.
pub const DENSE_BUDGET: usize = 2048;
/// Non-ground eigenvalues in this window are flagged as near-degenerate.
pub const NEAR_ZERO_WINDOW: (f64, f64) = (1e-12, 1e-8);

/// `H v`, matrix-free.
pub fn apply_h<T: Scalar>(inst: &QlspInstance<T>, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if v.len() != inst.dim() {
        return Err(QsvError::DimensionMismatch {
            left: inst.dim(),
            right: v.len(),
        });
    }
    let mut u = inst.apply_a(v);
    let b = inst.b().amps();
    let proj = inner_unchecked(b, &u);
    for (ui, bi) in u.iter_mut().zip(b) {
        *ui = *ui - bi * proj;
    }
    Ok(inst.apply_a(&u))
}

fn expectation<T: Scalar>(inst: &QlspInstance<T>, psi: &[Complex<T>]) -> T {
    // <psi|H|psi> = ||A psi||^2 - |<b|A psi>|^2
    let a_psi = inst.apply_a(psi);
    let n = euclidean_norm(&a_psi);
    n * n - inner_unchecked(inst.b().amps(), &a_psi).norm_sqr()
}

/// `C(rho) = Tr(rho H)`.
pub fn cost<T: Scalar>(inst: &QlspInstance<T>, rho: &DensityState<T>) -> Result<T> {
    if rho.dim() != inst.dim() {
        return Err(QsvError::DimensionMismatch {
            left: inst.dim(),
            right: rho.dim(),
        });
    }
    Ok(rho
        .members()
        .iter()
        .map(|(w, s)| *w * expectation(inst, s.amps()))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode<T> {
    /// Root of the secular equation, `mu = poles[origin] + tau`.
    Secular { origin: usize, tau: T },
    /// Deflated basis vector `e_j`.
    Basis(usize),
    /// `k`-th vector orthogonal to `z` inside a repeated-eigenvalue group.
    GroupComplement { group: usize, k: usize },
}

/// Full eigendecomposition of `H`, eigenvalues ascending, eigenvectors on demand.
#[derive(Debug, Clone)]
pub struct CostSpectrum<T> {
    d: Vec<T>,
    z: Vec<Complex<T>>,
    groups: Vec<Vec<usize>>,
    live: Vec<bool>,
    poles: Vec<T>,
    weights: Vec<T>,
    pairs: Vec<(T, Mode<T>)>,
}

impl<T: Scalar> CostSpectrum<T> {
    pub fn new(inst: &QlspInstance<T>) -> Self {
        let n = inst.dim();
        let lambdas = inst.spectrum().eigvals();
        let d: Vec<T> = lambdas.iter().map(|l| *l * *l).collect();
        let z = inst.apply_a(inst.b().amps());

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
        let eps = T::epsilon();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &j in &order {
            match groups.last_mut() {
                Some(g) if d[j] - d[g[0]] <= T::of(4.0) * eps * d[j] => g.push(j),
                _ => groups.push(vec![j]),
            }
        }

        let total_w: T = z.iter().map(|c| c.norm_sqr()).sum();
        let d_max = d.iter().copied().fold(T::zero(), T::max);
        let scale = d_max.max(total_w);
        let deflate_below = (eps * scale) * (eps * scale);

        let mut live = vec![false; groups.len()];
        let mut poles = Vec::new();
        let mut weights = Vec::new();
        let mut pairs = Vec::with_capacity(n);
        for (gi, g) in groups.iter().enumerate() {
            let w: T = g.iter().map(|&j| z[j].norm_sqr()).sum();
            if w * total_w <= deflate_below {
                pairs.extend(g.iter().map(|&j| (d[j], Mode::Basis(j))));
            } else {
                live[gi] = true;
                poles.push(d[g[0]]);
                weights.push(w);
                pairs.extend(
                    (0..g.len() - 1).map(|k| (d[g[0]], Mode::GroupComplement { group: gi, k })),
                );
            }
        }

        let w_sum: T = weights.iter().copied().sum();
        for i in 0..poles.len() {
            let (origin, tau) = secular_root(&poles, &weights, w_sum, i);
            pairs.push((poles[origin] + tau, Mode::Secular { origin, tau }));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        Self {
            d,
            z,
            groups,
            live,
            poles,
            weights,
            pairs,
        }
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Unit eigenvector of the `index`-th smallest eigenvalue.
    pub fn eigenvector(&self, index: usize) -> Vec<Complex<T>> {
        let n = self.d.len();
        let zero = Complex::new(T::zero(), T::zero());
        let mut v = vec![zero; n];
        match self.pairs[index].1 {
            Mode::Basis(j) => v[j] = Complex::new(T::one(), T::zero()),
            Mode::Secular { origin, tau } => {
                let p = self.poles[origin];
                for (g, alive) in self.groups.iter().zip(&self.live) {
                    if !alive {
                        continue;
                    }
                    for &j in g {
                        v[j] = self.z[j] / ((self.d[j] - p) - tau);
                    }
                }
                let nrm = euclidean_norm(&v);
                v.iter_mut().for_each(|c| *c = *c / nrm);
            }
            Mode::GroupComplement { group, k } => {
                let g = &self.groups[group];
                let basis = group_complement(g.iter().map(|&j| self.z[j]).collect());
                for (slot, &j) in g.iter().enumerate() {
                    v[j] = basis[k][slot];
                }
            }
        }
        v
    }

    #[doc(hidden)]
    pub fn pole_weights(&self) -> (&[T], &[T]) {
        (&self.poles, &self.weights)
    }
}

// f(tau) = 1 - sum_j w_j / ((p_j - p_origin) - tau), decreasing between poles.
fn secular<T: Scalar>(poles: &[T], weights: &[T], origin: usize, tau: T) -> T {
    let po = poles[origin];
    T::one()
        - poles
            .iter()
            .zip(weights)
            .map(|(&p, &w)| w / ((p - po) - tau))
            .sum::<T>()
}

/// Root in interval `i`: `(p_0 - W, p_0)` for `i = 0`, else `(p_{i-1}, p_i)`.
/// Returned relative to the nearer pole.
fn secular_root<T: Scalar>(poles: &[T], weights: &[T], w_sum: T, i: usize) -> (usize, T) {
    let half = T::of(0.5);
    let (origin, mut lo, mut hi) = if i == 0 {
        (0, -w_sum, T::zero())
    } else {
        let gap = poles[i] - poles[i - 1];
        if secular(poles, weights, i - 1, gap * half) >= T::zero() {
            (i, -gap * half, T::zero())
        } else {
            (i - 1, T::zero(), gap * half)
        }
    };
    // f(lo) >= 0 > f(hi) with f decreasing
    for _ in 0..2200 {
        let mid = (lo + hi) * half;
        if mid == lo || mid == hi {
            break;
        }
        if secular(poles, weights, origin, mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (origin, (lo + hi) * half)
}

// Orthonormal basis of the complement of `z` inside one group (local coordinates).
fn group_complement<T: Scalar>(z: Vec<Complex<T>>) -> Vec<Vec<Complex<T>>> {
    let m = z.len();
    let zn = euclidean_norm(&z);
    let mut found: Vec<Vec<Complex<T>>> = vec![z.iter().map(|c| c / zn).collect()];
    let accept = T::of(0.5) / T::of(m as f64).sqrt();
    for j in 0..m {
        if found.len() == m {
            break;
        }
        let mut w = vec![Complex::new(T::zero(), T::zero()); m];
        w[j] = Complex::new(T::one(), T::zero());
        for _ in 0..2 {
            for u in &found {
                let ov = inner_unchecked(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi = *wi - ui * ov;
                }
            }
        }
        let nrm = euclidean_norm(&w);
        if nrm > accept {
            found.push(w.into_iter().map(|c| c / nrm).collect());
        }
    }
    found.remove(0);
    found
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gap: f64,
    pub lambda_ss: f64,
    pub bound: f64,
    pub ground_energy: f64,
    pub ground_overlap_with_x: f64,
    pub zero_count: usize,
    pub near_degenerate: bool,
}

impl GapReport {
    pub fn invariants_hold(&self) -> bool {
        self.ground_energy <= 1e-10
            && self.ground_overlap_with_x >= 1.0 - 1e-8
            && self.gap <= self.bound + 1e-10
    }
}

/// Second-smallest eigenvalue magnitude of `A` (counting multiplicity).
pub fn lambda_ss<T: Scalar>(inst: &QlspInstance<T>) -> T {
    inst.spectrum().sorted_magnitudes()[1]
}

pub fn spectral_gap<T: Scalar>(inst: &QlspInstance<T>) -> Result<GapReport> {
    if inst.dim() > DENSE_BUDGET {
        return Err(QsvError::OverBudget {
            n: inst.dim(),
            budget: DENSE_BUDGET,
        });
    }
    let spec = CostSpectrum::new(inst);
    let values = spec.eigenvalues();
    let zero = T::of(T::TOL.zero_eigenvalue);
    let gap = values
        .iter()
        .copied()
        .find(|&v| v > zero)
        .ok_or(QsvError::VanishingGap(0.0))?;
    let ground = spec.eigenvector(0);
    let overlap = inner_unchecked(&ground, inst.solve().amps()).norm();
    let (lo, hi) = (T::of(NEAR_ZERO_WINDOW.0), T::of(NEAR_ZERO_WINDOW.1));
    let ss = lambda_ss(inst);
    Ok(GapReport {
        gap: gap.as_f64(),
        lambda_ss: ss.as_f64(),
        bound: (ss * ss).as_f64(),
        ground_energy: values[0].as_f64(),
        ground_overlap_with_x: overlap.as_f64(),
        zero_count: values.iter().filter(|&&v| v <= zero).count(),
        near_degenerate: values[1..].iter().any(|&v| v > lo && v < hi),
    })
}

/// `Delta / 64`: any pure state with cost below this lies within trace
/// distance 1/8 of `|x>`, since `C >= Delta D^2`.
pub fn cmin_estimate(report: &GapReport) -> Result<f64> {
    if !(report.gap > F64_TOLERANCES.zero_eigenvalue) {
        return Err(QsvError::VanishingGap(report.gap));
    }
    Ok(report.gap / 64.0)
}

/// `ceil(z^2 Var / cmin^2)` with the single-shot variance bounded by `||H||^2 <= 1`.
pub fn shots_to_resolve(report: &GapReport, confidence_z: f64) -> Result<u64> {
    if !(confidence_z > 0.0) {
        return Err(out_of_range(
            "confidence_z",
            format!("{confidence_z} must be > 0"),
        ));
    }
    let cmin = cmin_estimate(report)?;
    let shots = (confidence_z * confidence_z / (cmin * cmin)).ceil();
    Ok(if shots >= u64::MAX as f64 {
        u64::MAX
    } else {
        shots as u64
    })
}

/// Trial state orthogonal to `|x>` in the span of the two smallest-|lambda|
/// eigenvectors, with its energy `<x_perp|H|x_perp>` and `<x_perp|A^2|x_perp>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapWitness<T> {
    pub state: Vec<Complex<T>>,
    pub energy: T,
    pub a_squared: T,
}

pub fn gap_witness<T: Scalar>(inst: &QlspInstance<T>) -> GapWitness<T> {
    let eig = inst.spectrum().eigvals();
    let mut idx: Vec<usize> = (0..eig.len()).collect();
    idx.sort_by(|&i, &j| eig[i].abs().partial_cmp(&eig[j].abs()).unwrap());
    let (i0, i1) = (idx[0], idx[1]);
    let x = inst.solve().amps();
    let (a, c) = (x[i0], x[i1]);
    let mut state = vec![Complex::new(T::zero(), T::zero()); eig.len()];
    if a.norm_sqr() + c.norm_sqr() > T::zero() {
        // <x_perp|x> = conj(alpha) a + conj(beta) c = 0
        state[i0] = c.conj();
        state[i1] = -a.conj();
    } else {
        state[i0] = Complex::new(T::one(), T::zero());
    }
    let nrm = euclidean_norm(&state);
    state.iter_mut().for_each(|s| *s = *s / nrm);
    let a_state = inst.apply_a(&state);
    let a_sq = euclidean_norm(&a_state);
    GapWitness {
        energy: expectation(inst, &state),
        a_squared: a_sq * a_sq,
        state,
    }
}
