//! Brute-force moments of `|psi(p)|²` on a uniform momentum grid.
//!
//! This is the independent oracle for the closed forms in [`crate::gaussian`]:
//! it only evaluates amplitudes pointwise and never touches the pairwise
//! overlap formulas. The trapezoid rule converges geometrically for Gaussian
//! integrands on a wide enough window.

use crate::error::{Error, Result};
use crate::gaussian::WavepacketSuperposition;
use crate::scalar::Real;

/// Minimum half-window, in widths, beyond the outermost centres.
pub const MIN_HALF_WINDOW: f64 = 12.0;
/// Largest accepted grid spacing, in widths.
pub const MAX_SPACING: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    /// Half-window beyond the outermost centres, in widths.
    pub half_window: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 10_001,
            half_window: MIN_HALF_WINDOW,
        }
    }
}

/// Norm squared and normalized mean/variance. `mean` and `variance` are NaN
/// for the zero state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureMoments<T> {
    pub norm_sqr: T,
    pub mean: T,
    pub variance: T,
}

pub fn quadrature_moments<T: Real>(
    s: &WavepacketSuperposition<T>,
    grid: GridSpec,
) -> Result<QuadratureMoments<T>> {
    if grid.half_window < MIN_HALF_WINDOW {
        return Err(Error::GridTooCoarse(format!(
            "half window {} widths is narrower than {MIN_HALF_WINDOW}",
            grid.half_window
        )));
    }
    if grid.points < 3 {
        return Err(Error::GridTooCoarse(format!("{} points", grid.points)));
    }
    let width = s.width();
    let (lo, hi) = s.center_range();
    let a = lo - T::lit(grid.half_window) * width;
    let b = hi + T::lit(grid.half_window) * width;
    let h = (b - a) / T::lit((grid.points - 1) as f64);
    if h > T::lit(MAX_SPACING) * width {
        return Err(Error::GridTooCoarse(format!(
            "spacing {} exceeds {MAX_SPACING} widths; use more points",
            (h / width).as_f64()
        )));
    }
    let reference = (lo + hi) / T::lit(2.0);

    let (mut m0, mut m1, mut m2) = (T::zero(), T::zero(), T::zero());
    for k in 0..grid.points {
        let p = a + h * T::lit(k as f64);
        let rho = s.density(p);
        let edge = if k == 0 || k + 1 == grid.points { T::lit(0.5) } else { T::one() };
        let x = p - reference;
        m0 = m0 + edge * rho;
        m1 = m1 + edge * rho * x;
        m2 = m2 + edge * rho * x * x;
    }
    let (m0, m1, m2) = (m0 * h, m1 * h, m2 * h);
    if m0 <= T::zero() {
        return Ok(QuadratureMoments {
            norm_sqr: T::zero(),
            mean: T::nan(),
            variance: T::nan(),
        });
    }
    let shift = m1 / m0;
    Ok(QuadratureMoments {
        norm_sqr: m0,
        mean: reference + shift,
        variance: m2 / m0 - shift * shift,
    })
}
