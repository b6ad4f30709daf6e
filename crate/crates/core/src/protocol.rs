//! Pre- and postselection of the source mass and its gravitational kick on
//! the probe.
//!
//! Momentum axis: positive points from the source toward the probe, i.e. away
//! from the source. Attraction by the near (`R`) arm is a kick of `-r`; the
//! postselected probe is shifted by about `+r/epsilon`.
//!
//! In a Stern-Gerlach realisation the path labels `L`/`R` ride on the spin
//! labels up/down. Once the interferometer closes only the spin carries the
//! which-arm information, and postselecting the spin on `(up - down)/sqrt 2`
//! yields the same numbers as postselecting the path on `(L - R)/sqrt 2`. One
//! two-level type therefore serves for both.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::{self, GaussianComponent, WavepacketSuperposition};
use crate::scalar::Real;

/// Amplitudes on the far (`L`) and near (`R`) arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPathState<T> {
    pub amp_l: Complex<T>,
    pub amp_r: Complex<T>,
}

fn norm_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

impl<T: Real> TwoPathState<T> {
    pub fn new(amp_l: Complex<T>, amp_r: Complex<T>) -> Result<Self> {
        let n = amp_l.norm_sqr() + amp_r.norm_sqr();
        if !((n - T::one()).abs() <= norm_tolerance::<T>()) {
            return Err(Error::InvalidParameter {
                field: "two-path state",
                rule: format!("|amp_l|² + |amp_r|² must be 1 (got {n})"),
            });
        }
        Ok(Self { amp_l, amp_r })
    }

    pub fn from_real(amp_l: T, amp_r: T) -> Result<Self> {
        Self::new(Complex::new(amp_l, T::zero()), Complex::new(amp_r, T::zero()))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amp_l.conj() * other.amp_l + self.amp_r.conj() * other.amp_r
    }
}

/// `(sqrt(1+eps) |L> + sqrt(1-eps) |R>) / sqrt 2`.
pub fn preselect<T: Real>(epsilon: T) -> Result<TwoPathState<T>> {
    if !(epsilon >= T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidParameter {
            field: "epsilon",
            rule: format!("preselection needs 0 <= epsilon < 1 (got {epsilon})"),
        });
    }
    let h = T::FRAC_1_SQRT_2();
    Ok(TwoPathState {
        amp_l: Complex::new((T::one() + epsilon).sqrt() * h, T::zero()),
        amp_r: Complex::new((T::one() - epsilon).sqrt() * h, T::zero()),
    })
}

/// The dark-port state `(|L> - |R>) / sqrt 2`.
pub fn dark_port<T: Real>() -> TwoPathState<T> {
    let h = T::FRAC_1_SQRT_2();
    TwoPathState {
        amp_l: Complex::new(h, T::zero()),
        amp_r: Complex::new(-h, T::zero()),
    }
}

/// Source path entangled with the probe: each branch already carries its path amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState<T> {
    pub branch_l: WavepacketSuperposition<T>,
    pub branch_r: WavepacketSuperposition<T>,
}

impl<T: Real> JointState<T> {
    pub fn norm_sqr(&self) -> T {
        gaussian::norm_sqr(&self.branch_l) + gaussian::norm_sqr(&self.branch_r)
    }
}

/// Kick on the far arm when both arms pull along the same line:
/// `kick_r d² / (d + delta_x)²`.
pub fn both_arms_left_kick<T: Real>(kick_r: T, d: T, delta_x: T) -> T {
    let ratio = d / (d + delta_x);
    kick_r * ratio * ratio
}

/// Entangles the probe with the source path. Each arm shifts `chi` toward the
/// source by its kick (in widths). Pass `kick_l = 0` to neglect the far arm,
/// or [`both_arms_left_kick`] for the collinear two-arm geometry.
pub fn gravitational_kick<T: Real>(
    pre: &TwoPathState<T>,
    chi: &GaussianComponent<T>,
    kick_r: T,
    kick_l: T,
) -> JointState<T> {
    JointState {
        branch_l: WavepacketSuperposition::single(chi.shifted(-kick_l).scaled(pre.amp_l)),
        branch_r: WavepacketSuperposition::single(chi.shifted(-kick_r).scaled(pre.amp_r)),
    }
}

/// Unnormalized conditional probe state and the probability of the outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Postselection<T> {
    pub state: WavepacketSuperposition<T>,
    pub p_success: T,
}

/// Projects the source onto `post`. The returned state is
/// `conj(post.l) branch_l + conj(post.r) branch_r` with norm² `p_success`.
pub fn postselect<T: Real>(joint: &JointState<T>, post: &TwoPathState<T>) -> Postselection<T> {
    let l = joint.branch_l.scaled(post.amp_l.conj());
    let r = joint.branch_r.scaled(post.amp_r.conj());
    let state = l.superpose(&r).expect("branches share the probe width");
    let p_success = gaussian::norm_sqr(&state);
    Postselection { state, p_success }
}

/// Ground-state probe, near-arm kick `r`, dark-port postselection.
pub fn postselected_state<T: Real>(epsilon: T, r: T) -> Result<Postselection<T>> {
    let pre = preselect(epsilon)?;
    let joint = gravitational_kick(&pre, &GaussianComponent::ground(), r, T::zero());
    Ok(postselect(&joint, &dark_port()))
}

/// Closed form `(1 - sqrt(1-eps²) exp(-r²/4)) / 2`, evaluated without cancellation.
pub fn postselection_probability<T: Real>(epsilon: T, r: T) -> T {
    let x = T::lit(0.5) * (-epsilon * epsilon).ln_1p() - r * r / T::lit(4.0);
    -x.exp_m1() / T::lit(2.0)
}

/// `<post|P_R|pre> / <post|pre>`.
pub fn weak_value_exact<T: Real>(pre: &TwoPathState<T>, post: &TwoPathState<T>) -> Result<Complex<T>> {
    let den = post.inner(pre);
    if den.norm() <= T::epsilon() * T::lit(8.0) {
        return Err(Error::OrthogonalPrePost);
    }
    Ok(post.amp_r.conj() * pre.amp_r / den)
}

/// Leading-order weak value of the near-arm projector, `-1/epsilon`.
pub fn weak_value_approx<T: Real>(epsilon: T) -> T {
    -T::one() / epsilon
}

/// Mean probe momentum (widths) after postselection, from the exact state.
pub fn postselected_mean_exact<T: Real>(epsilon: T, r: T) -> Result<T> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidParameter {
            field: "epsilon",
            rule: format!("needs 0 < epsilon < 1 (got {epsilon})"),
        });
    }
    if !(r >= T::zero()) {
        return Err(Error::InvalidParameter {
            field: "r",
            rule: format!("kick must be >= 0 (got {r})"),
        });
    }
    let post = postselected_state(epsilon, r)?;
    if !(post.p_success > T::zero()) {
        return Err(Error::ZeroSuccess);
    }
    gaussian::momentum_mean(&post.state)
}

/// First-order amplified shift `r / epsilon`.
pub fn postselected_mean_approx<T: Real>(epsilon: T, r: T) -> T {
    r / epsilon
}

/// `r / (sqrt 2 epsilon)`: the first-order picture needs this well below one.
pub fn regime_parameter<T: Real>(epsilon: T, r: T) -> T {
    r / (T::SQRT_2() * epsilon)
}

/// Regime parameter at or below which the amplified-shift picture is reported valid.
pub const REGIME_THRESHOLD: f64 = 0.1;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn preselect_amplitudes() {
        let s = preselect(0.0f64).unwrap();
        assert_relative_eq!(s.amp_l.re, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(s.amp_r.re, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        let s = preselect(0.01f64).unwrap();
        // sqrt(1.01/2), sqrt(0.99/2)
        assert_relative_eq!(s.amp_l.re, 0.710_633_520_177_595, max_relative = 1e-12);
        assert_relative_eq!(s.amp_r.re, 0.703_562_363_973_514_6, max_relative = 1e-12);
        assert!((s.amp_l.norm_sqr() + s.amp_r.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(preselect(1.0f64).is_err());
        assert!(preselect(-0.1f64).is_err());
    }

    #[test]
    fn two_path_state_rejects_unnormalized() {
        assert!(TwoPathState::from_real(1.0f64, 1.0).is_err());
        assert!(TwoPathState::from_real(1.0f64, 0.0).is_ok());
    }

    #[test]
    fn zero_kick_is_a_product_state() {
        let pre = preselect(0.3f64).unwrap();
        let joint = gravitational_kick(&pre, &GaussianComponent::ground(), 0.0, 0.0);
        assert_eq!(joint.branch_l.components()[0].center, joint.branch_r.components()[0].center);
        assert_relative_eq!(joint.norm_sqr(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn kicked_branch_center_and_norm() {
        let pre = preselect(0.01f64).unwrap();
        let joint = gravitational_kick(&pre, &GaussianComponent::ground(), 1e-3, 0.0);
        assert_eq!(joint.branch_r.components()[0].center, -1e-3);
        assert!((joint.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn both_arms_ratio() {
        // (20/70)²
        assert_relative_eq!(both_arms_left_kick(1.0f64, 20e-6, 50e-6), 0.081_632_653_061_224_5, max_relative = 1e-12);
    }

    #[test]
    fn balanced_dark_port_is_dark() {
        let post = postselected_state(0.0f64, 0.0).unwrap();
        assert_eq!(post.p_success, 0.0);
        assert!(matches!(postselected_mean_exact(0.0f64, 0.0), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn success_probability_small_kick_limit() {
        let p = postselected_state(0.01f64, 1e-9).unwrap().p_success;
        assert!((p / 2.5e-5 - 1.0).abs() < 1e-3);
        assert_relative_eq!(p, postselection_probability(0.01, 1e-9), max_relative = 1e-12);
    }

    #[test]
    fn weak_values() {
        let eps = 0.01f64;
        let w = weak_value_exact(&preselect(eps).unwrap(), &dark_port()).unwrap();
        let independent = -(1.0 - eps).sqrt() / ((1.0 + eps).sqrt() - (1.0 - eps).sqrt());
        assert_relative_eq!(w.re, independent, max_relative = 1e-12);
        assert!((w.re + 99.50).abs() < 0.01);
        assert_eq!(weak_value_approx(eps), -100.0);
        let all_left = TwoPathState::from_real(1.0f64, 0.0).unwrap();
        assert_eq!(weak_value_exact(&all_left, &dark_port()).unwrap().norm(), 0.0);
        let balanced = preselect(0.0f64).unwrap();
        assert!(matches!(weak_value_exact(&balanced, &dark_port()), Err(Error::OrthogonalPrePost)));
    }

    #[test]
    fn postselected_means() {
        assert_eq!(postselected_mean_exact(0.01f64, 0.0).unwrap().abs(), 0.0);
        let m = postselected_mean_exact(0.01f64, 1e-3).unwrap();
        assert!(m > 0.0 && (m / 0.1 - 1.0).abs() < 0.1);
        assert_eq!(postselected_mean_approx(0.01f64, 1e-3), 0.1);
        let off = postselected_mean_exact(0.5f64, 0.4).unwrap();
        assert!((off / postselected_mean_approx(0.5, 0.4) - 1.0).abs() > 0.1);
    }

    #[test]
    fn mean_closed_form_cross_check() {
        // mean = r/2 (eps / (1 - sqrt(1-eps²) e^{-r²/4}) - 1), derived by hand from the two-component state
        for &(eps, r) in &[(0.01f64, 1e-3f64), (0.2, 0.05), (0.5, 0.4), (0.9, 0.3)] {
            let a = (1.0 - eps * eps).sqrt() * (-r * r / 4.0).exp();
            let by_hand = r / 2.0 * (eps / (1.0 - a) - 1.0);
            assert_relative_eq!(postselected_mean_exact(eps, r).unwrap(), by_hand, max_relative = 1e-9);
        }
    }
}
