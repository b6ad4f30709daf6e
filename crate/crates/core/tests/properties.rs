use num_complex::Complex;
use postsel_core::gaussian::{self, GaussianComponent, WavepacketSuperposition};
use postsel_core::montecarlo::InverseCdfSampler;
use postsel_core::params::{self, ExperimentParams, PhysicalConstants};
use postsel_core::{protocol, statistics};
use proptest::prelude::*;

fn component() -> impl Strategy<Value = GaussianComponent<f64>> {
    (-3.0..3.0f64, 0.1..1.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(c, m, ph)| GaussianComponent::new(c, 1.0, Complex::from_polar(m, ph)).unwrap())
}

fn superposition() -> impl Strategy<Value = WavepacketSuperposition<f64>> {
    prop::collection::vec(component(), 1..=5).prop_map(|v| WavepacketSuperposition::new(v).unwrap())
}

fn scenario() -> impl Strategy<Value = ExperimentParams> {
    (
        -16.0..-12.0f64,
        -15.0..-11.0f64,
        -5.0..-3.0f64,
        -1.0..1.0f64,
        -1.0..4.0f64,
        -3.0..0.0f64,
        -3.0..-0.5f64,
    )
        .prop_map(|(m1, m2, d, tau, omega, eta, eps)| ExperimentParams {
            m1: 10f64.powf(m1),
            m2: 10f64.powf(m2),
            d: 10f64.powf(d),
            delta_x: 10f64.powf(d),
            tau: 10f64.powf(tau),
            omega: 10f64.powf(omega),
            eta: 10f64.powf(eta),
            epsilon: 10f64.powf(eps),
            t_flight: 10.0,
            density: 3500.0,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn overlap_is_conjugate_symmetric(a in component(), b in component()) {
        let ab = gaussian::overlap(&a, &b);
        let ba = gaussian::overlap(&b, &a).conj();
        prop_assert!((ab - ba).norm() <= 1e-15 * (1.0 + ab.norm()));
    }

    #[test]
    fn moments_ignore_global_phase(s in superposition(), phase in 0.0..std::f64::consts::TAU) {
        prop_assume!(gaussian::norm_sqr(&s) > 1e-6);
        let a = gaussian::moments(&s).unwrap();
        let b = gaussian::moments(&s.scaled(Complex::from_polar(1.0, phase))).unwrap();
        prop_assert!((a.norm_sqr - b.norm_sqr).abs() <= 1e-13 * a.norm_sqr);
        prop_assert!((a.mean - b.mean).abs() <= 1e-12 * (1.0 + a.mean.abs()));
        prop_assert!((a.variance - b.variance).abs() <= 1e-12 * (1.0 + a.variance));
    }

    #[test]
    fn p_success_closed_form_matches_state_norm(eps in 1e-3..0.99f64, r in 0.0..3.0f64) {
        let post = protocol::postselected_state(eps, r).unwrap();
        let closed = protocol::postselection_probability(eps, r);
        prop_assert!(((post.p_success - closed) / closed).abs() < 1e-12);
    }

    #[test]
    fn weak_value_correction_is_second_order(eps in 1e-4..0.5f64) {
        let pre = protocol::preselect(eps).unwrap();
        let w = protocol::weak_value_exact(&pre, &protocol::dark_port()).unwrap();
        prop_assert!(w.im == 0.0);
        let err = eps * w.re + 1.0;
        prop_assert!((err - eps / 2.0).abs() <= eps * eps);
    }

    #[test]
    fn postselected_probe_is_repelled(eps in 1e-3..0.99f64, frac in 1e-4..1.0f64) {
        let r = frac * eps;
        let mean = protocol::postselected_mean_exact(eps, r).unwrap();
        prop_assert!(mean > 0.0);
        if eps <= 0.3 {
            prop_assert!(mean > r);
        }
    }

    #[test]
    fn amplified_shift_tracks_leading_order(eps in 1e-3..0.2f64, frac in 1e-4..0.1f64) {
        let r = frac * eps;
        let ratio = protocol::postselected_mean_exact(eps, r).unwrap() / protocol::postselected_mean_approx(eps, r);
        prop_assert!((0.8..=1.2).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn epsilon_required_identity(p in scenario()) {
        let c = PhysicalConstants::default();
        let direct = params::epsilon_required(&p, &c);
        let chained = 10.0 * params::delta_p(&p, &c) / params::momentum_width(&p, &c);
        prop_assert!(((direct - chained) / chained).abs() < 1e-12);
    }

    #[test]
    fn kick_and_width_scale_with_mass_and_distance(p in scenario(), k in 1.1..10.0f64) {
        let c = PhysicalConstants::default();
        let mut q = p;
        q.m2 *= k;
        let dp = params::delta_p(&q, &c) / params::delta_p(&p, &c);
        let bp = params::momentum_width(&q, &c) / params::momentum_width(&p, &c);
        prop_assert!((dp / k - 1.0).abs() < 1e-12);
        prop_assert!((bp / k.sqrt() - 1.0).abs() < 1e-12);
        let mut q = p;
        q.d *= k;
        let dd = params::delta_p(&q, &c) / params::delta_p(&p, &c);
        prop_assert!((dd * k * k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discrimination_is_symmetric(a in superposition(), b in superposition()) {
        prop_assume!(gaussian::norm_sqr(&a) > 1e-6 && gaussian::norm_sqr(&b) > 1e-6);
        let ab = statistics::discrimination_probability(&a, &b).unwrap();
        let ba = statistics::discrimination_probability(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn runs_estimate_is_the_ceiling(ps in 1e-8..1.0f64, pd in 1e-6..1.0f64, target in 1u64..1000) {
        let n = statistics::runs_estimate(ps, pd, target).unwrap();
        prop_assert!(n as f64 * ps * pd >= target as f64);
        prop_assert!(((n - 1) as f64) * ps * pd < target as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn far_field_width_is_sqrt2_std(c in -2.0..2.0f64, t in 0.1..100.0f64, m in 1e-15..1e-10f64) {
        let model = statistics::ReadoutModel::new(t, m, 1e-10).unwrap();
        let s = WavepacketSuperposition::single(GaussianComponent::unit(c));
        let dens = statistics::far_field_position_density(&s, &model, 1e-24).unwrap();
        prop_assert!((dens.width_m / dens.std_dev_m - std::f64::consts::SQRT_2).abs() < 1e-12);
        prop_assert!((dens.mean_m / (c * model.meters_per_width(1e-24)) - 1.0).abs() < 1e-12 || c.abs() < 1e-12);
    }

    #[test]
    fn sampler_quantiles_are_monotone(eps in 0.01..0.9f64, r in 0.0..0.5f64, u in 0.0..1.0f64, du in 0.0..0.1f64) {
        let post = protocol::postselected_state(eps, r).unwrap();
        let s = InverseCdfSampler::new(&post.state).unwrap();
        let v = (u + du).min(1.0 - 1e-12);
        prop_assert!(s.sample(u) <= s.sample(v));
    }

    #[test]
    fn single_precision_tracks_double(eps in 0.01..0.9f64, r in 0.0..1.0f64) {
        let a = protocol::postselection_probability(eps, r);
        let b = protocol::postselection_probability(eps as f32, r as f32) as f64;
        prop_assert!(((a - b) / a).abs() < 1e-5);
        let ma = protocol::postselected_mean_exact(eps, r).unwrap();
        let mb = protocol::postselected_mean_exact(eps as f32, r as f32).unwrap() as f64;
        prop_assert!((ma - mb).abs() < 1e-4 * (1.0 + ma.abs()));
    }
}
