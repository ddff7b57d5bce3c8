use num_complex::Complex64;

use qsvlab::cost::{
    apply_h, cmin_estimate, cost, gap_witness, lambda_ss, shots_to_resolve, spectral_gap,
    CostSpectrum,
};
use qsvlab::instances::worst_case_instance;
use qsvlab::typical::{sample_strict_instance, trial_rng};
use qsvlab::{DensityStateF64, QlspInstanceF64, Spectrum, StateVectorF64};

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn hamiltonian_action() {
    let inst: QlspInstanceF64 = sample_strict_instance(40, 25.0, &mut trial_rng(1, 1)).unwrap();
    assert!(norm(&apply_h(&inst, inst.solve().amps()).unwrap()) <= 1e-10);
    let id = QlspInstanceF64::with_default_epsilon(
        Spectrum::new(vec![1.0, 1.0], 1.0).unwrap(),
        StateVectorF64::from_real(&[1.0, 0.0]).unwrap(),
    )
    .unwrap();
    let e1 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    assert_eq!(apply_h(&id, &e1).unwrap(), e1.to_vec());
    let zero = vec![Complex64::new(0.0, 0.0); 40];
    assert_eq!(apply_h(&inst, &zero).unwrap(), zero);
}

#[test]
fn cost_examples() {
    let inst: QlspInstanceF64 = sample_strict_instance(24, 12.0, &mut trial_rng(2, 2)).unwrap();
    let x = inst.solve().clone();
    assert!(
        cost(&inst, &DensityStateF64::pure(x.clone()))
            .unwrap()
            .abs()
            < 1e-14
    );
    let spec = CostSpectrum::new(&inst);
    let delta = spec.eigenvalues()[1];
    let excited = StateVectorF64::new(spec.eigenvector(1)).unwrap();
    assert!((cost(&inst, &DensityStateF64::pure(excited.clone())).unwrap() - delta).abs() < 1e-13);
    let w = 0.4;
    let mix = DensityStateF64::mixture(vec![(1.0 - w, x), (w, excited)]).unwrap();
    assert!((cost(&inst, &mix).unwrap() - w * delta).abs() < 1e-13);
}

#[test]
fn gap_examples() {
    let kappa = 10.0;
    let r = spectral_gap(&worst_case_instance(kappa, 2).unwrap()).unwrap();
    assert!(r.gap <= 1.0 / (kappa * kappa) + 1e-10);
    for b in [[1.0, 0.0], [0.6, 0.8], [0.0, 1.0]] {
        let id = QlspInstanceF64::with_default_epsilon(
            Spectrum::new(vec![1.0, -1.0], 1.0).unwrap(),
            StateVectorF64::from_real(&b).unwrap(),
        )
        .unwrap();
        let r = spectral_gap(&id).unwrap();
        assert!((r.gap - 1.0).abs() < 1e-14 && r.bound == 1.0);
    }
}

#[test]
fn random_sweep_at_256() {
    for seed in 0..20 {
        let inst: QlspInstanceF64 =
            sample_strict_instance(256, 32.0, &mut trial_rng(seed, 5)).unwrap();
        let values = CostSpectrum::new(&inst).eigenvalues();
        assert!(values[0] >= -1e-10);
        assert_eq!(values.iter().filter(|v| **v < 1e-10).count(), 1);
        let r = spectral_gap(&inst).unwrap();
        assert!(r.invariants_hold(), "{r:?}");
        let ss = lambda_ss(&inst);
        assert!(r.gap <= ss * ss + 1e-10);
        let w = gap_witness(&inst);
        assert!(r.gap <= w.energy + 1e-12);
    }
}

#[test]
fn cmin_examples() {
    let inst: QlspInstanceF64 = sample_strict_instance(16, 8.0, &mut trial_rng(3, 3)).unwrap();
    let r = spectral_gap(&inst).unwrap();
    let cmin = cmin_estimate(&r).unwrap();
    assert!(cost(&inst, &DensityStateF64::pure(inst.solve().clone())).unwrap() <= cmin);
    for kappa in [4.0, 16.0, 100.0] {
        let r = spectral_gap(&worst_case_instance(kappa, 6).unwrap()).unwrap();
        assert!(cmin_estimate(&r).unwrap() <= 1.0 / (64.0 * kappa * kappa) + 1e-18);
    }
}

#[test]
fn shot_scaling() {
    for kappa in [4.0f64, 8.0, 16.0, 32.0] {
        let r = spectral_gap(&worst_case_instance(kappa, 8).unwrap()).unwrap();
        assert_eq!(
            shots_to_resolve(&r, 1.0).unwrap(),
            4096 * kappa.powi(4) as u64
        );
        assert!(shots_to_resolve(&r, 0.0).is_err());
    }
}
