//! Observables at readout: far-field position density, wavepacket
//! discrimination, detection significance and run-count planning.

use num_complex::Complex;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gaussian::{self, WavepacketSuperposition};
use crate::scalar::Real;

/// Successes per detection claim used by default in run-count estimates.
pub const DEFAULT_TARGET_SUCCESSES: u64 = 10;

/// Position readout after free flight. Assumes `free_flight_time` is much
/// longer than the interferometer so that `x = p T / m2` (far field).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReadoutModel {
    pub free_flight_time: f64,
    pub probe_mass: f64,
    pub position_resolution: f64,
}

impl ReadoutModel {
    pub fn new(free_flight_time: f64, probe_mass: f64, position_resolution: f64) -> Result<Self> {
        for (field, v) in [
            ("T", free_flight_time),
            ("m2", probe_mass),
            ("position_resolution", position_resolution),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    rule: format!("must be finite and > 0 (got {v})"),
                });
            }
        }
        Ok(Self {
            free_flight_time,
            probe_mass,
            position_resolution,
        })
    }

    /// Metres of displacement per momentum width, `big_delta_p T / m2`.
    pub fn meters_per_width(&self, big_delta_p: f64) -> f64 {
        big_delta_p * self.free_flight_time / self.probe_mass
    }

    /// True when the detector resolves `displacement`.
    pub fn resolves(&self, displacement: f64) -> bool {
        self.position_resolution < displacement.abs()
    }
}

/// Probe position distribution at readout.
#[derive(Clone, Debug)]
pub struct PositionDensity {
    state: WavepacketSuperposition<f64>,
    /// Metres per momentum width.
    pub scale: f64,
    pub mean_m: f64,
    /// Standard deviation of the position density.
    pub std_dev_m: f64,
    /// Packet width parameter `big_delta_p T / m2` (the amplitude's `exp(-x²/2w²)`
    /// width); `std_dev_m` is this over `sqrt 2` for a single Gaussian.
    pub width_m: f64,
}

impl PositionDensity {
    /// Probability density per metre.
    pub fn density(&self, x_m: f64) -> f64 {
        self.state.density(x_m / self.scale) / self.scale
    }
}

pub fn far_field_position_density(
    s: &WavepacketSuperposition<f64>,
    model: &ReadoutModel,
    big_delta_p: f64,
) -> Result<PositionDensity> {
    let state = s.normalized()?;
    let m = gaussian::moments(&state)?;
    let scale = model.meters_per_width(big_delta_p);
    Ok(PositionDensity {
        scale,
        mean_m: m.mean * scale,
        std_dev_m: m.variance.sqrt() * scale,
        width_m: state.width() * scale,
        state,
    })
}

/// `1 - |<a|b>|²` for the normalized states: the probability that a
/// projective test tells them apart.
pub fn discrimination_probability<T: Real>(
    a: &WavepacketSuperposition<T>,
    b: &WavepacketSuperposition<T>,
) -> Result<T> {
    let na = gaussian::norm_sqr(a);
    let nb = gaussian::norm_sqr(b);
    if !(na > T::zero() && nb > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    let o: Complex<T> = gaussian::inner(a, b);
    let fidelity = o.norm_sqr() / (na * nb);
    Ok((T::one() - fidelity).max(T::zero()).min(T::one()))
}

/// Leading-order estimate `shift²` for packets displaced by `shift` widths.
/// For pure displaced Gaussians the exact value is `1 - exp(-shift²/2)`, so this
/// overstates it by about a factor two.
pub fn discrimination_leading_order<T: Real>(shift: T) -> T {
    shift * shift
}

/// `ceil(target / (p_success p_discriminate))`.
pub fn runs_estimate(p_success: f64, p_discriminate: f64, target_successes: u64) -> Result<u64> {
    for p in [p_success, p_discriminate] {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::ZeroProbability(p));
        }
    }
    if target_successes == 0 {
        return Err(Error::InvalidParameter {
            field: "target_successes",
            rule: "must be >= 1".to_string(),
        });
    }
    let per_run = p_success * p_discriminate;
    let target = target_successes as f64;
    let mut n = (target / per_run).ceil() as u64;
    while (n as f64) * p_success * p_discriminate < target {
        n += 1;
    }
    Ok(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionPlan {
    pub p_success: f64,
    pub p_discriminate: f64,
    pub target_successes: u64,
    pub n_runs: u64,
}

impl DetectionPlan {
    pub fn new(p_success: f64, p_discriminate: f64, target_successes: u64) -> Result<Self> {
        Ok(Self {
            p_success,
            p_discriminate,
            target_successes,
            n_runs: runs_estimate(p_success, p_discriminate, target_successes)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Significance {
    pub z: f64,
    pub p_one_sided: f64,
}

/// z-score of a sample mean against a known null distribution.
pub fn z_score(sample_mean: f64, n: u64, null_mean: f64, null_sigma: f64) -> f64 {
    (sample_mean - null_mean) / (null_sigma / (n as f64).sqrt())
}

/// Upper tail of the standard normal.
pub fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// One-sided z-test of the sample mean against the unshifted null. Positive
/// `z` means net motion away from the source.
pub fn detection_significance(samples: &[f64], null_mean: f64, null_sigma: f64) -> Result<Significance> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSamples(format!("{} samples, need at least 2", samples.len())));
    }
    if !(null_sigma.is_finite() && null_sigma > 0.0) {
        return Err(Error::DegenerateSamples(format!("null sigma {null_sigma}")));
    }
    let mean = neumaier_sum(samples.iter().copied()) / samples.len() as f64;
    let z = z_score(mean, samples.len() as u64, null_mean, null_sigma);
    Ok(Significance {
        z,
        p_one_sided: upper_tail(z),
    })
}

/// Compensated summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianComponent;
    use crate::protocol;
    use approx::assert_relative_eq;

    #[test]
    fn far_field_scenario_a_width() {
        let model = ReadoutModel::new(10.0, 1e-12, 1e-10).unwrap();
        let dens = far_field_position_density(&WavepacketSuperposition::ground(), &model, 2.54e-24).unwrap();
        assert_relative_eq!(dens.width_m, 2.54e-11, max_relative = 1e-12);
        assert_relative_eq!(dens.std_dev_m, 2.54e-11 / 2f64.sqrt(), max_relative = 1e-12);
        // density integrates to one
        let h = dens.width_m / 50.0;
        let total: f64 = (-1000..=1000).map(|k| dens.density(k as f64 * h) * h).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn far_field_mean_follows_momentum() {
        let model = ReadoutModel::new(10.0, 1e-12, 1e-10).unwrap();
        let post = protocol::postselected_state(0.01, 1e-3).unwrap().state;
        let mean_p = gaussian::momentum_mean(&post).unwrap();
        let dens = far_field_position_density(&post, &model, 2.54e-24).unwrap();
        assert_relative_eq!(dens.mean_m, mean_p * 2.54e-24 * 1e13, max_relative = 1e-12);
        assert!(ReadoutModel::new(0.0, 1e-12, 1e-10).is_err());
    }

    #[test]
    fn discrimination_values() {
        let chi = WavepacketSuperposition::<f64>::ground();
        assert_eq!(discrimination_probability(&chi, &chi).unwrap(), 0.0);
        let shifted = WavepacketSuperposition::single(GaussianComponent::unit(0.1));
        let d = discrimination_probability(&chi, &shifted).unwrap();
        assert_relative_eq!(d, -(-0.005f64).exp_m1(), max_relative = 1e-10);
        assert!((d - 4.99e-3).abs() < 1e-5);
        assert_eq!(discrimination_leading_order(0.1f64), 0.1 * 0.1);
    }

    #[test]
    fn runs_estimate_values() {
        assert_eq!(runs_estimate(2.5e-5, 1e-2, 10).unwrap(), 40_000_000);
        assert_eq!(runs_estimate(1.0, 1.0, 1).unwrap(), 1);
        let a = runs_estimate(2.5e-5, 1e-2, 10).unwrap();
        let b = runs_estimate(2.5e-5, 0.5e-2, 10).unwrap();
        assert_eq!(b, 2 * a);
        assert!(matches!(runs_estimate(0.0, 0.1, 1), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn significance_of_known_shift() {
        // 2500 points exactly at mean 0.1 sigma: z = 0.1 sqrt(2500) = 5
        let s: Vec<f64> = (0..2500).map(|k| 0.1 + if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let sig = detection_significance(&s, 0.0, 1.0).unwrap();
        assert_relative_eq!(sig.z, 5.0, max_relative = 1e-12);
        assert!(sig.p_one_sided < 3e-7);
        assert!(detection_significance(&[1.0], 0.0, 1.0).is_err());
        assert!(detection_significance(&[1.0, 2.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn null_p_value_is_one_half() {
        assert_relative_eq!(upper_tail(0.0), 0.5, max_relative = 1e-15);
    }
}
