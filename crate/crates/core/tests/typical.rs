use qsvlab::typical::{
    chernoff_bounds, concentration_experiment, mgf_lambda_integral, sample_porter_thomas_weights,
    sample_uniform_spectrum, trial_rng, MgfSign, NORM_UPPER_RATE,
};
use qsvlab::Spectrum;

#[test]
fn porter_thomas_total_weight() {
    let draws = 10_000u64;
    let mut sum = 0.0;
    let mut heavy = 0;
    for i in 0..draws {
        let w: Vec<f64> = sample_porter_thomas_weights(64, &mut trial_rng(1, i));
        sum += w.iter().sum::<f64>();
        let w128: Vec<f64> = sample_porter_thomas_weights(128, &mut trial_rng(2, i));
        heavy += usize::from(w128.iter().sum::<f64>() >= 1.5);
    }
    assert!((sum / draws as f64 - 1.0).abs() < 0.02);
    // bound e^{-0.087 * 128} ~ 1.5e-5, so any hit in 10^4 draws would be suspicious
    let bound = (-NORM_UPPER_RATE * 128.0).exp();
    assert!((heavy as f64 / draws as f64) <= bound + 3.0 * (bound / draws as f64).sqrt() + 1e-4);
}

#[test]
fn porter_thomas_is_reproducible() {
    let a: Vec<f64> = sample_porter_thomas_weights(2, &mut trial_rng(7, 0));
    let b: Vec<f64> = sample_porter_thomas_weights(2, &mut trial_rng(7, 0));
    assert_eq!(a, b);
}

#[test]
fn uniform_spectrum_moments() {
    let kappa = 2.0;
    let s: Spectrum<f64> = sample_uniform_spectrum(50_000, kappa, &mut trial_rng(3, 0)).unwrap();
    assert!(s.eigvals().iter().all(|l| (0.5..=1.0).contains(&l.abs())));
    let n = s.dim() as f64;
    let mean_sq = s.eigvals().iter().map(|l| l * l).sum::<f64>() / n;
    let want = (1.0 - kappa.powi(-3)) / (3.0 * (1.0 - 1.0 / kappa));
    assert!((mean_sq - want).abs() < 0.005, "{mean_sq} vs {want}");
    let negative = s.eigvals().iter().filter(|l| **l < 0.0).count() as f64 / n;
    assert!((negative - 0.5).abs() < 3.0 * (0.25 / n).sqrt());
}

#[test]
fn concentration_at_4096() {
    let r = concentration_experiment(4096, 16.0, 1000, 0).unwrap();
    assert_eq!(r.empirical_tail, 0.0);
    assert!((r.bound_value - 4.0 * (-3.328f64).exp()).abs() < 1e-15);
    let inside = r
        .values
        .iter()
        .filter(|v| (12.0..=20.0).contains(&(**v * **v)))
        .count();
    assert!(inside as f64 >= 0.99 * r.trials as f64);
}

#[test]
fn single_trial_report() {
    let r = concentration_experiment(16, 4.0, 1, 9).unwrap();
    assert_eq!(r.values.len(), 1);
    assert!(r.empirical_tail == 0.0 || r.empirical_tail == 1.0);
    assert!(concentration_experiment(16, 4.0, 0, 9).is_err());
}

#[test]
fn tail_shrinks_with_n_over_kappa() {
    let trials = 400;
    let tails: Vec<f64> = [16, 64, 256, 1024]
        .iter()
        .map(|&n| {
            concentration_experiment(n, 16.0, trials, 21)
                .unwrap()
                .empirical_tail
        })
        .collect();
    for w in tails.windows(2) {
        let sigma = (w[0] * (1.0 - w[0]) / trials as f64)
            .sqrt()
            .max(1.0 / trials as f64);
        assert!(w[1] <= w[0] + 3.0 * sigma, "{tails:?}");
    }
    assert!(tails[0] > tails[3]);
}

#[test]
fn report_is_independent_of_worker_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| concentration_experiment(256, 8.0, 300, 42).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&run(3)).unwrap()
    );
}

#[test]
fn chernoff_examples() {
    let c = chernoff_bounds(100, 1.0).unwrap();
    let want = [
        (-8.7f64).exp(),
        (-1.4f64).exp(),
        (-1.3f64).exp(),
        (-1.7f64).exp(),
    ];
    for (got, w) in [c.norm_upper, c.norm_lower, c.inverse_upper, c.inverse_lower]
        .iter()
        .zip(want)
    {
        assert!((got - w).abs() < 1e-15);
    }
    assert!(c.sum <= 4.0 * (-1.3f64).exp());
    assert!(chernoff_bounds(0, 5.0).unwrap().degenerate);
}

#[test]
fn mgf_examples() {
    for sign in [MgfSign::Plus, MgfSign::Minus] {
        assert!((mgf_lambda_integral(10.0f64, 0.0, sign).unwrap() - 1.0).abs() < 1e-14);
    }
    let t = 1.0 / 800.0;
    assert!(mgf_lambda_integral(10.0f64, t, MgfSign::Plus).unwrap() <= (1.0f64 / 70.0).exp());
    assert!(mgf_lambda_integral(10.0f64, t, MgfSign::Minus).unwrap() <= (-1.0f64 / 90.0).exp());
    assert!(mgf_lambda_integral(10.0f64, 0.01, MgfSign::Plus).is_err());
}
