//! Arm separation history of a Stern-Gerlach interferometer and the impulse
//! it delivers to the probe.
//!
//! The arms separate under a constant spin-dependent force. A spin flip at
//! `tau/4` turns the relative acceleration around, the arms stop at maximal
//! separation at `tau/2`, fall back together, and a second flip at `3 tau/4`
//! brakes them to rest at `tau`. The separation is piecewise parabolic:
//!
//! ```text
//! s(t) = A t²/2                    0      <= t <= tau/4
//!      = dx - A (t - tau/2)²/2     tau/4  <= t <= 3tau/4
//!      = A (tau - t)²/2            3tau/4 <= t <= tau
//! ```
//!
//! with relative acceleration `A = 16 dx / tau²` (each arm `8 dx / tau²`).
//! Closure at rest fixes the flip instants; they are exposed, not chosen.

use crate::error::{Error, Result};
use crate::params::{self, ExperimentParams, PhysicalConstants};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitTrajectory<T> {
    pub tau: T,
    pub delta_x_max: T,
}

/// Builds the closed split history.
pub fn sg_trajectory<T: Real>(tau: T, delta_x_max: T) -> Result<SplitTrajectory<T>> {
    if !(tau.is_finite() && tau > T::zero()) {
        return Err(Error::InvalidParameter {
            field: "tau",
            rule: format!("must be finite and > 0 (got {tau})"),
        });
    }
    if !(delta_x_max.is_finite() && delta_x_max >= T::zero()) {
        return Err(Error::InvalidParameter {
            field: "delta_x",
            rule: format!("must be finite and >= 0 (got {delta_x_max})"),
        });
    }
    Ok(SplitTrajectory { tau, delta_x_max })
}

impl<T: Real> SplitTrajectory<T> {
    /// Relative acceleration of the two arms.
    pub fn relative_acceleration(&self) -> T {
        T::lit(16.0) * self.delta_x_max / (self.tau * self.tau)
    }

    /// Spin-flip instants.
    pub fn flip_times(&self) -> [T; 2] {
        [self.tau / T::lit(4.0), T::lit(0.75) * self.tau]
    }

    /// Segment boundaries `[0, tau/4, tau/2, 3tau/4, tau]`; `s` is a polynomial on each piece.
    pub fn knots(&self) -> [T; 5] {
        let q = self.tau / T::lit(4.0);
        [T::zero(), q, q + q, q + q + q, self.tau]
    }

    /// Separation at time `t`, clamped to the interferometer window.
    pub fn separation(&self, t: T) -> T {
        let t = t.max(T::zero()).min(self.tau);
        let a = self.relative_acceleration();
        let half = T::lit(0.5);
        let [t1, t3] = self.flip_times();
        if t <= t1 {
            half * a * t * t
        } else if t < t3 {
            let u = t - self.tau * half;
            self.delta_x_max - half * a * u * u
        } else {
            let u = self.tau - t;
            half * a * u * u
        }
    }

    /// Relative velocity `ds/dt`.
    pub fn velocity(&self, t: T) -> T {
        let t = t.max(T::zero()).min(self.tau);
        let a = self.relative_acceleration();
        let [t1, t3] = self.flip_times();
        if t <= t1 {
            a * t
        } else if t < t3 {
            -a * (t - self.tau / T::lit(2.0))
        } else {
            -a * (self.tau - t)
        }
    }
}

/// Where the source starts relative to the probe. The near arm sits at
/// `start_distance - s(t)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpulseGeometry<T> {
    pub start_distance: T,
}

impl<T: Real> ImpulseGeometry<T> {
    /// Symmetric split about the start position: the near arm reaches `d`
    /// exactly at the maximal separation `delta_x`.
    pub fn symmetric(d: T, delta_x: T) -> Self {
        Self::with_offset(d, delta_x / T::lit(2.0))
    }

    /// Start at `d + offset`.
    pub fn with_offset(d: T, offset: T) -> Self {
        Self {
            start_distance: d + offset,
        }
    }

    pub fn near_arm_distance(&self, trajectory: &SplitTrajectory<T>, t: T) -> T {
        self.start_distance - trajectory.separation(t) / T::lit(2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error_estimate: T,
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T) -> Result<Quadrature<T>> {
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) / T::lit(2.0);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let (value, error_estimate, ok) = refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH);
    if !ok || !value.is_finite() {
        return Err(Error::IntegrationFailed {
            estimate: error_estimate.as_f64(),
            tolerance: tol.as_f64(),
        });
    }
    Ok(Quadrature { value, error_estimate })
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> (T, T, bool) {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= T::lit(15.0) * tol {
        return (left + right + delta / T::lit(15.0), delta.abs() / T::lit(15.0), true);
    }
    if depth == 0 || (b - a).abs() <= T::epsilon() * (a.abs() + b.abs()) {
        return (left + right, delta.abs(), false);
    }
    let (lv, le, lok) = refine(f, a, m, fa, flm, fm, left, tol / two, depth - 1);
    let (rv, re, rok) = refine(f, m, b, fm, frm, fb, right, tol / two, depth - 1);
    (lv + rv, le + re, lok && rok)
}

/// Relative tolerance used for the impulse integral.
pub const IMPULSE_RTOL: f64 = 1e-9;

/// `(1/tau) ∫ (d / d_R(t))² dt`: the time-dependent impulse as a fraction of
/// the constant-distance impulse at `d`.
pub fn impulse_ratio<T: Real>(
    d: T,
    trajectory: &SplitTrajectory<T>,
    geometry: &ImpulseGeometry<T>,
) -> Result<Quadrature<T>> {
    let closest = geometry.start_distance - trajectory.delta_x_max / T::lit(2.0);
    if !(closest > T::zero()) {
        return Err(Error::InvalidParameter {
            field: "geometry",
            rule: "near arm would pass through the probe".to_string(),
        });
    }
    let integrand = |t: T| {
        let q = d / geometry.near_arm_distance(trajectory, t);
        q * q
    };
    // integrand is bounded by (d/closest)², so this is a relative bound
    let bound = (d / closest) * (d / closest);
    let rtol = T::lit(IMPULSE_RTOL).max(T::epsilon() * T::lit(32.0));
    let knots = trajectory.knots();
    let mut value = T::zero();
    let mut err = T::zero();
    for w in knots.windows(2) {
        let seg_tol = rtol * bound * (w[1] - w[0]);
        let q = adaptive_simpson(&integrand, w[0], w[1], seg_tol)?;
        value = value + q.value;
        err = err + q.error_estimate;
    }
    Ok(Quadrature {
        value: value / trajectory.tau,
        error_estimate: err / trajectory.tau,
    })
}

/// `∫_0^tau G m1 m2 / d_R(t)² dt` in kg m/s, with the error estimate of the quadrature.
pub fn impulse_time_dependent(
    params: &ExperimentParams,
    constants: &PhysicalConstants,
    trajectory: &SplitTrajectory<f64>,
    geometry: &ImpulseGeometry<f64>,
) -> Result<Quadrature<f64>> {
    let ratio = impulse_ratio(params.d, trajectory, geometry)?;
    // delta_p assumes the interaction lasts params.tau; the trajectory may differ
    let per_second = params::delta_p(params, constants) / params.tau;
    let scale = per_second * trajectory.tau;
    Ok(Quadrature {
        value: ratio.value * scale,
        error_estimate: ratio.error_estimate * scale,
    })
}

/// Closed-interferometer impulse for a parameter set using its own `tau` and `delta_x`.
pub fn scenario_impulse(params: &ExperimentParams, constants: &PhysicalConstants) -> Result<Quadrature<f64>> {
    let trajectory = sg_trajectory(params.tau, params.delta_x)?;
    let geometry = ImpulseGeometry::symmetric(params.d, params.delta_x);
    impulse_time_dependent(params, constants, &trajectory, &geometry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn separation_landmarks() {
        let tr = sg_trajectory(1.0f64, 50e-6).unwrap();
        assert_eq!(tr.separation(0.0), 0.0);
        assert_relative_eq!(tr.separation(0.25), 25e-6, max_relative = 1e-14);
        assert_relative_eq!(tr.separation(0.5), 50e-6, max_relative = 1e-14);
        assert_eq!(tr.separation(1.0), 0.0);
        assert_relative_eq!(tr.separation(0.9), tr.separation(0.1), max_relative = 1e-12);
        assert_eq!(tr.flip_times(), [0.25, 0.75]);
    }

    #[test]
    fn separation_continuous_and_bounded() {
        let tr = sg_trajectory(2.0f64, 1.0).unwrap();
        let n = 4000;
        let mut prev = tr.separation(0.0);
        for k in 1..=n {
            let t = 2.0 * k as f64 / n as f64;
            let s = tr.separation(t);
            assert!((0.0..=1.0 + 1e-15).contains(&s));
            // |ds| <= v_max dt, v_max = A tau/4 = 2
            assert!((s - prev).abs() <= 2.0 * (2.0 / n as f64) + 1e-12);
            prev = s;
        }
        for t in tr.flip_times() {
            assert_relative_eq!(tr.velocity(t - 1e-12), tr.velocity(t + 1e-12), epsilon = 1e-9);
        }
        assert_eq!(tr.velocity(0.0), 0.0);
        assert_eq!(tr.velocity(1.0), 0.0);
    }

    #[test]
    fn simpson_exact_on_cubic() {
        let q = adaptive_simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(q.value, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn simpson_reports_failure() {
        let r = adaptive_simpson(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::IntegrationFailed { .. })));
    }

    #[test]
    fn held_at_max_split_gives_constant_impulse() {
        let p = ExperimentParams::paper_a();
        let c = PhysicalConstants::default();
        // a stationary near arm at distance d
        let tr = sg_trajectory(p.tau, 0.0).unwrap();
        let geom = ImpulseGeometry::with_offset(p.d, 0.0);
        let q = impulse_time_dependent(&p, &c, &tr, &geom).unwrap();
        assert_relative_eq!(q.value, params::delta_p(&p, &c), max_relative = 1e-12);
    }

    #[test]
    fn stationary_source_at_mid_position() {
        let p = ExperimentParams::paper_a();
        let c = PhysicalConstants::default();
        let tr = sg_trajectory(p.tau, 0.0).unwrap();
        let geom = ImpulseGeometry::symmetric(p.d, p.delta_x);
        let q = impulse_time_dependent(&p, &c, &tr, &geom).unwrap();
        let expected = c.g * p.m1 * p.m2 * p.tau / (p.d + p.delta_x / 2.0).powi(2);
        assert_relative_eq!(q.value, expected, max_relative = 1e-12);
    }

    #[test]
    fn geometry_rejects_collision() {
        let tr = sg_trajectory(1.0f64, 1.0).unwrap();
        let geom = ImpulseGeometry::with_offset(0.1, 0.3);
        assert!(impulse_ratio(0.1, &tr, &geom).is_err());
    }
}
