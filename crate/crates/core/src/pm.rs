//! Copy-count lower bounds for verifiers that only consume copies of `|b>`.

use serde::{Deserialize, Serialize};

use crate::adversary::{AdversarialPair, QueryBound};
use crate::error::{out_of_range, Result};
use crate::instances::{floor_u64, QlspInstance};
use crate::scalar::Scalar;

/// Overlaps this close to 1 count as identical instances.
pub const UNIT_OVERLAP_TOL: f64 = 1e-14;

/// `D(|b>^{⊗q}, |b'>^{⊗q}) = sqrt(1 - |<b|b'>|^{2q})`.
pub fn tensor_power_distance<T: Scalar>(overlap: T, q: u64) -> Result<T> {
    check_overlap(overlap)?;
    Ok(distance_from_defect(one_minus_sq(overlap), q))
}

// 1 - (1 - defect)^q via expm1/ln1p, stable when the defect is tiny
fn distance_from_defect<T: Scalar>(defect: T, q: u64) -> T {
    if q == 0 || defect <= T::zero() {
        return T::zero();
    }
    if defect >= T::one() {
        return T::one();
    }
    let qf = T::of(q as f64);
    let d = -(qf * (-defect).ln_1p()).exp_m1();
    d.max(T::zero()).min(T::one()).sqrt()
}

fn one_minus_sq<T: Scalar>(overlap: T) -> T {
    let o = overlap.abs();
    (T::one() - o) * (T::one() + o)
}

fn check_overlap<T: Scalar>(overlap: T) -> Result<()> {
    let o = overlap.abs();
    if !(o <= T::one() + T::of(UNIT_OVERLAP_TOL)) {
        return Err(out_of_range("overlap", format!("|{overlap}| > 1")));
    }
    Ok(())
}

/// `floor(1 / (36 (1 - |<b|b'>|^2)))`, unbounded for overlap 1.
pub fn pm_q0<T: Scalar>(overlap: T) -> Result<QueryBound> {
    check_overlap(overlap)?;
    if T::one() - overlap.abs() <= T::of(UNIT_OVERLAP_TOL) {
        return Ok(QueryBound::Unbounded);
    }
    Ok(pm_q0_from_defect(one_minus_sq(overlap)))
}

/// `pm_q0` in terms of `1 - |<b|b'>|^2 = sin^2 theta` directly.
pub fn pm_q0_from_defect<T: Scalar>(defect: T) -> QueryBound {
    if defect <= T::zero() {
        return QueryBound::Unbounded;
    }
    QueryBound::Finite(floor_u64((T::of(36.0) * defect).recip()))
}

/// `floor((kappa / ||A^{-1}|b>||)^2 / 150)`.
pub fn pm_lower_bound<T: Scalar>(inst: &QlspInstance<T>) -> u64 {
    let s = inst.susceptibility();
    floor_u64(s * s / T::of(150.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmCertificate {
    pub overlap: f64,
    pub q0_pm_exact: QueryBound,
    pub q0_pm_floor150: u64,
    pub distance_at_q0: f64,
}

impl PmCertificate {
    /// Certificate for a pair at rotation angle `theta` whose base instance
    /// yields the floor bound `floor150`.
    pub fn from_angle<T: Scalar>(theta: T, floor150: u64) -> Self {
        let sin = theta.sin();
        let defect = sin * sin;
        let q0 = pm_q0_from_defect(defect);
        let distance = match q0 {
            QueryBound::Finite(q) => distance_from_defect(defect, q),
            QueryBound::Unbounded => T::zero(),
        };
        PmCertificate {
            overlap: theta.cos().max(T::zero()).as_f64(),
            q0_pm_exact: q0,
            q0_pm_floor150: floor150,
            distance_at_q0: distance.as_f64(),
        }
    }

    pub fn invariants_hold(&self) -> bool {
        self.q0_pm_exact.at_least(self.q0_pm_floor150) && self.distance_at_q0 <= 1.0 / 6.0 + 1e-12
    }
}

pub fn pm_certificate<T: Scalar>(pair: &AdversarialPair<T>) -> PmCertificate {
    PmCertificate::from_angle(pair.theta, pm_lower_bound(&pair.base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::build_pair;
    use crate::instances::worst_case_instance;

    #[test]
    fn tensor_power_examples() {
        assert_eq!(tensor_power_distance(0.3f64, 0).unwrap(), 0.0);
        assert_eq!(tensor_power_distance(0.0f64, 1).unwrap(), 1.0);
        let d = tensor_power_distance(0.5f64.sqrt(), 2).unwrap();
        assert!((d - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(tensor_power_distance(1.2f64, 2).is_err());
    }

    #[test]
    fn tensor_power_monotone_and_subadditive() {
        for i in 0..=50 {
            let ov = i as f64 / 50.0;
            let mut prev = 0.0;
            for q in 0..40u64 {
                let d = tensor_power_distance(ov, q).unwrap();
                assert!(d >= prev - 1e-15);
                assert!(d <= (q as f64 * (1.0 - ov * ov)).sqrt() + 1e-12);
                prev = d;
            }
        }
    }

    #[test]
    fn pm_q0_examples() {
        assert_eq!(pm_q0_from_defect(1.0f64 / 36.0), QueryBound::Finite(1));
        assert_eq!(pm_q0(1.0f64).unwrap(), QueryBound::Unbounded);
        assert_eq!(pm_q0_from_defect(1e-4f64), QueryBound::Finite(277));
        assert_eq!(
            pm_q0((1.0f64 - 1e-4).sqrt()).unwrap(),
            QueryBound::Finite(277)
        );
    }

    #[test]
    fn pm_q0_floor_correctness() {
        for i in 1..200 {
            let ov = 1.0 - (i as f64).powi(2) * 1e-6;
            let q = pm_q0(ov).unwrap().finite().unwrap() as f64;
            let defect = 1.0 - ov * ov;
            assert!(36.0 * q * defect <= 1.0 + 1e-9);
            assert!(36.0 * (q + 1.0) * defect > 1.0 - 1e-9);
        }
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(pm_lower_bound(&worst_case_instance(300.0, 2).unwrap()), 600);
        assert_eq!(pm_lower_bound(&worst_case_instance(12.0, 2).unwrap()), 0);
    }

    #[test]
    fn certificate_examples() {
        let pair = build_pair(&worst_case_instance(300.0, 2).unwrap()).unwrap();
        let c = pm_certificate(&pair);
        assert!(c.q0_pm_exact.at_least(600));
        assert!(c.invariants_hold(), "{c:?}");
        let ortho = PmCertificate::from_angle(std::f64::consts::FRAC_PI_2, 0);
        assert_eq!(ortho.q0_pm_exact, QueryBound::Finite(0));
        assert_eq!(ortho.distance_at_q0, 0.0);
        let same = PmCertificate::from_angle(0.0f64, 3);
        assert_eq!(same.q0_pm_exact, QueryBound::Unbounded);
        assert!(same.invariants_hold());
    }
}
