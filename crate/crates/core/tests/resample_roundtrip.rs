use relplan_core::numerics::SeededRng;
use relplan_core::{calibrate_latent, estimate_moments, generate, validate_moments, PreferenceMatrix};

fn survey(seed: u64, n: usize, k: usize) -> PreferenceMatrix {
    let mut rng = SeededRng::new(seed);
    let base: Vec<f64> = (0..n).map(|_| rng.range_f64(0.2, 0.8)).collect();
    let mut rows = vec![vec![0u8; k]; n];
    for u in 0..k {
        let mood = rng.uniform();
        for i in 0..n {
            let p = 0.5 * base[i] + 0.5 * mood;
            rows[i][u] = rng.bernoulli(p) as u8;
        }
    }
    PreferenceMatrix::from_rows(&rows).unwrap()
}

#[test]
fn latent_correlations_survive_a_round_trip() {
    let targets = estimate_moments(&survey(17, 5, 300));
    let model = calibrate_latent(&targets).unwrap().with_seed(99);
    let big = generate(&model, 1_000_000).unwrap();
    let again = calibrate_latent(&estimate_moments(&big)).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let (a, b) = (model.latent_corr().get(i, j), again.latent_corr().get(i, j));
            assert!((a - b).abs() <= 0.02, "({i},{j}): {a} vs {b}");
        }
    }
}

#[test]
fn marginals_within_four_standard_errors() {
    let count = 50_000;
    for seed in [1u64, 2, 3] {
        let targets = estimate_moments(&survey(seed, 6, 200));
        let model = calibrate_latent(&targets).unwrap().with_seed(seed);
        let g = generate(&model, count).unwrap();
        let got = estimate_moments(&g);
        for (i, (&m, &t)) in got.mu().iter().zip(targets.mu()).enumerate() {
            let se = (t * (1.0 - t) / count as f64).sqrt();
            assert!((m - t).abs() <= 4.0 * se, "seed {seed} feature {i}");
        }
        let r = validate_moments(&g, &targets, Some(&model)).unwrap();
        assert!(r.max_cov_deviation <= 0.02);
    }
}
