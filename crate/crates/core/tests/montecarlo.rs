use postsel_core::montecarlo::{self, ArmConditioning, DetectionConfig, Mode, Model, RunConfig};
use postsel_core::protocol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quantum(n: u64, seed: u64, mode: Mode) -> RunConfig {
    RunConfig::new(n, seed, mode, Model::Quantum).unwrap()
}

#[test]
fn conditioned_mean_converges_across_seeds() {
    let (eps, r) = (0.1f64, 0.01);
    let exact = protocol::postselected_mean_exact(eps, r).unwrap();
    let zs: Vec<f64> = (0..20)
        .map(|seed| {
            let s = montecarlo::run_quantum(&quantum(200_000, seed, Mode::Conditioned), eps, r, None).unwrap();
            (s.postselected_mean - exact) / s.standard_error
        })
        .collect();
    assert!(zs.iter().all(|z| z.abs() < 4.0), "{zs:?}");
    let mean_z = zs.iter().sum::<f64>() / zs.len() as f64;
    // mean of 20 unit normals
    assert!(mean_z.abs() < 4.0 / 20f64.sqrt());
}

#[test]
fn full_mode_acceptance_matches_closed_form() {
    let (eps, r) = (0.3, 0.05);
    let n = 2_000_000;
    let s = montecarlo::run_quantum(&quantum(n, 9, Mode::Full), eps, r, None).unwrap();
    let p = protocol::postselection_probability(eps, r);
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((s.empirical_p_success.unwrap() - p).abs() < 4.0 * se, "{s:?} {p} {se}");
    assert_eq!(s.p_success_exact, Some(p));
}

#[test]
fn seeded_runs_are_bit_identical_and_seed_sensitive() {
    for mode in [Mode::Full, Mode::Conditioned] {
        let a = montecarlo::run_quantum(&quantum(300_000, 77, mode), 0.05, 0.004, Some(3e-11)).unwrap();
        let b = montecarlo::run_quantum(&quantum(300_000, 77, mode), 0.05, 0.004, Some(3e-11)).unwrap();
        assert_eq!(a.postselected_mean.to_bits(), b.postselected_mean.to_bits());
        assert_eq!(a.sample_std.to_bits(), b.sample_std.to_bits());
        assert_eq!(a, b);
        let c = montecarlo::run_quantum(&quantum(300_000, 78, mode), 0.05, 0.004, Some(3e-11)).unwrap();
        assert_ne!(a.postselected_mean, c.postselected_mean);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = quantum(500_000, 5, Mode::Conditioned);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| montecarlo::run_quantum(&cfg, 0.02, 0.001, None).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn classical_conditioning_never_repels() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (eps, r) = (0.01, 1e-3);
    for k in 0..20 {
        let cond = ArmConditioning::new(rng.random(), rng.random()).unwrap();
        let cfg = RunConfig::new(200_000, k, Mode::Full, Model::Classical).unwrap();
        let s = montecarlo::run_classical(&cfg, eps, r, &cond, None).unwrap();
        assert!(s.postselected_mean <= 4.0 * s.standard_error + 1e-300, "{cond:?} {s:?}");
        assert!(s.postselected_mean >= -r - 4.0 * s.standard_error, "{cond:?} {s:?}");
        assert!(s.p_success_exact.is_none());
    }
}

#[test]
fn detection_run_count_is_near_analytic() {
    let (eps, r) = (0.05, 0.01);
    let p = protocol::postselection_probability(eps, r);
    let analytic = 9.0 / ((r / eps) * (r / eps) * p);
    let cfg = DetectionConfig::new(3.0, 12);
    let (median, runs) = montecarlo::median_runs_to_detection(eps, r, 1.0, &cfg, 15).unwrap();
    assert_eq!(runs.len(), 15);
    let ratio = median as f64 / analytic;
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "median {median} analytic {analytic}");
    assert!(runs.iter().all(|d| d.z >= 3.0 && d.total_trials >= d.n_postselected));
}
