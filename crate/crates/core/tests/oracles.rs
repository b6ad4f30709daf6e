//! Closed-form algebra against brute-force grid integration.

use num_complex::Complex;
use postsel_core::gaussian::{self, GaussianComponent, WavepacketSuperposition};
use postsel_core::protocol;
use postsel_core::quadrature::{quadrature_moments, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_superposition(rng: &mut ChaCha8Rng) -> WavepacketSuperposition<f64> {
    let width = rng.random_range(0.5..2.0);
    let n = rng.random_range(1..=5);
    let comps = (0..n)
        .map(|_| {
            let c = rng.random_range(-3.0..3.0);
            let mag = rng.random_range(0.1..1.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            GaussianComponent::new(c, width, Complex::from_polar(mag, phase)).unwrap()
        })
        .collect();
    WavepacketSuperposition::new(comps).unwrap()
}

#[test]
fn random_superpositions_match_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let grid = GridSpec {
        points: 20_001,
        half_window: 14.0,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_superposition(&mut rng);
        let exact = gaussian::moments(&s).unwrap();
        let q = quadrature_moments(&s, grid).unwrap();
        let e_norm = (exact.norm_sqr - q.norm_sqr).abs() / exact.norm_sqr;
        let e_mean = (exact.mean - q.mean).abs() / (1.0 + exact.mean.abs());
        let e_var = (exact.variance - q.variance).abs() / (1.0 + exact.variance.abs());
        worst = worst.max(e_norm).max(e_mean).max(e_var);
        assert!(e_norm < 1e-8 && e_mean < 1e-8 && e_var < 1e-8, "{s:?}: {e_norm} {e_mean} {e_var}");
    }
    assert!(worst < 1e-8);
}

#[test]
fn p_success_and_mean_match_quadrature_on_grid() {
    for i in 0..20 {
        let eps = 0.001 + 0.9 * i as f64 / 19.0;
        for j in 0..20 {
            let r = 1e-4 + 2.0 * j as f64 / 19.0;
            let post = protocol::postselected_state(eps, r).unwrap();
            let q = quadrature_moments(&post.state, GridSpec::default()).unwrap();
            let closed = protocol::postselection_probability(eps, r);
            assert!(((closed - q.norm_sqr) / closed).abs() < 1e-10, "eps {eps} r {r}");
            let mean = protocol::postselected_mean_exact(eps, r).unwrap();
            assert!((mean - q.mean).abs() < 1e-10 * (1.0 + mean.abs()), "eps {eps} r {r}");
        }
    }
}

#[test]
fn dark_port_mean_matches_quadrature() {
    let mean = protocol::postselected_mean_exact(0.01f64, 1e-3).unwrap();
    let post = protocol::postselected_state(0.01, 1e-3).unwrap();
    let q = quadrature_moments(&post.state, GridSpec::default()).unwrap();
    assert!(((mean - q.mean) / mean).abs() < 1e-10);
}

#[test]
fn decomposition_coefficient_and_residual() {
    let chi = GaussianComponent::<f64>::ground();
    for r in [1e-4f64, 1e-3, 1e-2, 0.05, 0.1, 0.3] {
        let d = gaussian::orthogonal_decomposition(&chi.shifted(-r), &chi).unwrap();
        let lead = -r / std::f64::consts::SQRT_2;
        assert!(((d.perpendicular.re - lead) / lead).abs() <= r * r, "r {r}");
        assert!(d.perpendicular.im.abs() < 1e-15);
        assert!(d.residual_norm <= 2.0 * r * r);
        let total = d.parallel.norm_sqr() + d.perpendicular.norm_sqr() + d.residual_norm.powi(2);
        assert!((total - 1.0).abs() < 1e-12);
    }
}
