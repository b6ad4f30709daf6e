//! Momentum-space Gaussian wavepackets and their finite superpositions.
//!
//! Momenta are measured in units of the ground-state width `big_delta_p`, so
//! the unkicked probe is a unit-width Gaussian centred at zero. A component
//! with centre `c`, width `w` and weight `a` has amplitude
//!
//! ```text
//! a (pi w²)^(-1/4) exp(-(p - c)² / (2 w²))
//! ```
//!
//! i.e. every component is unit-normalized and the weight carries the
//! amplitude. The probability density of a single component therefore has
//! standard deviation `w / sqrt(2)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianComponent<T> {
    pub center: T,
    pub width: T,
    pub weight: Complex<T>,
}

impl<T: Real> GaussianComponent<T> {
    pub fn new(center: T, width: T, weight: Complex<T>) -> Result<Self> {
        if !(width.is_finite() && width > T::zero()) {
            return Err(Error::InvalidParameter {
                field: "width",
                rule: format!("must be finite and > 0 (got {width})"),
            });
        }
        if !(center.is_finite() && weight.re.is_finite() && weight.im.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "weight",
                rule: "centre and weight must be finite".to_string(),
            });
        }
        Ok(Self { center, width, weight })
    }

    /// Unit-width, unit-weight packet at `center`.
    pub fn unit(center: T) -> Self {
        Self {
            center,
            width: T::one(),
            weight: Complex::new(T::one(), T::zero()),
        }
    }

    /// Ground state of the probe.
    pub fn ground() -> Self {
        Self::unit(T::zero())
    }

    pub fn shifted(&self, by: T) -> Self {
        Self {
            center: self.center + by,
            ..*self
        }
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            weight: self.weight * factor,
            ..*self
        }
    }

    pub fn amplitude(&self, p: T) -> Complex<T> {
        let u = (p - self.center) / self.width;
        self.weight * (normalizer(self.width) * (-u * u / T::lit(2.0)).exp())
    }
}

/// `(pi w²)^(-1/4)`.
fn normalizer<T: Real>(width: T) -> T {
    (T::PI() * width * width).powf(T::lit(-0.25))
}

/// `<a|b>`, including `conj(a.weight) * b.weight`.
///
/// Widths may differ; for equal widths `w` and unit weights this is
/// `exp(-(c_a - c_b)² / (4 w²))`.
pub fn overlap<T: Real>(a: &GaussianComponent<T>, b: &GaussianComponent<T>) -> Complex<T> {
    let two = T::lit(2.0);
    let sum_sq = a.width * a.width + b.width * b.width;
    let dc = a.center - b.center;
    let basis = (two * a.width * b.width / sum_sq).sqrt() * (-dc * dc / (two * sum_sq)).exp();
    a.weight.conj() * b.weight * basis
}

/// Gaussian (`Zero`) or first Hermite function (`One`, odd about the centre).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteDegree {
    Zero,
    One,
}

/// Unit-normalized Hermite function of degree 0 or 1. Degree one exists to
/// represent the direction orthogonal to the ground state that a small kick
/// populates; general Hermite algebra is not provided.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiteComponent<T> {
    pub center: T,
    pub width: T,
    pub weight: Complex<T>,
    pub degree: HermiteDegree,
}

impl<T: Real> HermiteComponent<T> {
    pub fn gaussian(g: &GaussianComponent<T>) -> Self {
        Self {
            center: g.center,
            width: g.width,
            weight: g.weight,
            degree: HermiteDegree::Zero,
        }
    }

    /// `sqrt(2) (pi w²)^(-1/4) ((p - c)/w) exp(-(p - c)²/(2w²))` with the
    /// weight of `g`.
    pub fn first_excited(g: &GaussianComponent<T>) -> Self {
        Self {
            degree: HermiteDegree::One,
            ..Self::gaussian(g)
        }
    }

    pub fn amplitude(&self, p: T) -> Complex<T> {
        let u = (p - self.center) / self.width;
        let envelope = normalizer(self.width) * (-u * u / T::lit(2.0)).exp();
        let poly = match self.degree {
            HermiteDegree::Zero => T::one(),
            HermiteDegree::One => T::SQRT_2() * u,
        };
        self.weight * (poly * envelope)
    }
}

/// `<a|b>` for equal-width Hermite components of degree 0 or 1.
pub fn hermite_overlap<T: Real>(a: &HermiteComponent<T>, b: &HermiteComponent<T>) -> Result<Complex<T>> {
    if a.width != b.width {
        return Err(Error::UnequalWidths(a.width.as_f64(), b.width.as_f64()));
    }
    let w = a.width;
    let delta = a.center - b.center;
    let e = (-delta * delta / (T::lit(4.0) * w * w)).exp();
    let basis = match (a.degree, b.degree) {
        (HermiteDegree::Zero, HermiteDegree::Zero) => e,
        (HermiteDegree::One, HermiteDegree::Zero) => -delta / (T::SQRT_2() * w) * e,
        (HermiteDegree::Zero, HermiteDegree::One) => delta / (T::SQRT_2() * w) * e,
        (HermiteDegree::One, HermiteDegree::One) => (T::one() - delta * delta / (T::lit(2.0) * w * w)) * e,
    };
    Ok(a.weight.conj() * b.weight * basis)
}

/// Finite coherent sum of equal-width Gaussian components.
#[derive(Clone, Debug, PartialEq)]
pub struct WavepacketSuperposition<T> {
    components: Vec<GaussianComponent<T>>,
}

/// Norm squared, mean and variance of `|psi(p)|²` (normalized).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments<T> {
    pub norm_sqr: T,
    pub mean: T,
    pub variance: T,
}

impl<T: Real> WavepacketSuperposition<T> {
    pub fn new(components: Vec<GaussianComponent<T>>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptySuperposition)?;
        if let Some(bad) = components.iter().find(|c| c.width != first.width) {
            return Err(Error::UnequalWidths(first.width.as_f64(), bad.width.as_f64()));
        }
        Ok(Self { components })
    }

    pub fn single(component: GaussianComponent<T>) -> Self {
        Self {
            components: vec![component],
        }
    }

    pub fn ground() -> Self {
        Self::single(GaussianComponent::ground())
    }

    pub fn components(&self) -> &[GaussianComponent<T>] {
        &self.components
    }

    pub fn width(&self) -> T {
        self.components[0].width
    }

    pub fn amplitude(&self, p: T) -> Complex<T> {
        self.components
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc + c.amplitude(p))
    }

    pub fn density(&self, p: T) -> T {
        self.amplitude(p).norm_sqr()
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            components: self.components.iter().map(|c| c.scaled(factor)).collect(),
        }
    }

    pub fn shifted(&self, by: T) -> Self {
        Self {
            components: self.components.iter().map(|c| c.shifted(by)).collect(),
        }
    }

    /// Coherent sum `self + other`.
    pub fn superpose(&self, other: &Self) -> Result<Self> {
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        Self::new(components)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = norm(self);
        if n <= T::zero() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex::new(T::one() / n, T::zero())))
    }

    fn min_max_center(&self) -> (T, T) {
        self.components.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), c| {
            (lo.min(c.center), hi.max(c.center))
        })
    }

    /// Smallest and largest centre.
    pub fn center_range(&self) -> (T, T) {
        self.min_max_center()
    }
}

/// `<a|b>` between two superpositions.
pub fn inner<T: Real>(a: &WavepacketSuperposition<T>, b: &WavepacketSuperposition<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for x in &a.components {
        for y in &b.components {
            acc = acc + overlap(x, y);
        }
    }
    acc
}

/// Raw (unnormalized) moment sums about `reference`:
/// `(∫|psi|², ∫(p-ref)|psi|², ∫(p-ref)²|psi|²)`.
///
/// Each pair overlap `exp(-(ci-cj)²/4w²)` is split as `1 + expm1(..)`. The `1`
/// parts collapse to products of the plain weight sums `S = Σw`, `C = Σw c`,
/// `Q = Σw c²`, so the near-total cancellation at a dark port is done once on
/// `S` instead of across O(1) pair terms.
fn raw_moments<T: Real>(s: &WavepacketSuperposition<T>, reference: T) -> (T, T, T) {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let w = s.width();
    let half_w2 = w * w / two;

    let zero = Complex::new(T::zero(), T::zero());
    let (mut sum_w, mut sum_wc, mut sum_wc2) = (zero, zero, zero);
    for c in &s.components {
        let x = c.center - reference;
        sum_w = sum_w + c.weight;
        sum_wc = sum_wc + c.weight * x;
        sum_wc2 = sum_wc2 + c.weight * (x * x);
    }
    let mut m0 = sum_w.norm_sqr();
    let mut m1 = (sum_w.conj() * sum_wc).re;
    let mut m2 = ((sum_w.conj() * sum_wc2).re + sum_wc.norm_sqr()) / two + half_w2 * m0;

    for (i, a) in s.components.iter().enumerate() {
        for b in &s.components[i + 1..] {
            let dc = a.center - b.center;
            let em = (-dc * dc / (four * w * w)).exp_m1();
            if em == T::zero() {
                continue;
            }
            // pair (i, j) plus its conjugate (j, i)
            let ww = two * (a.weight.conj() * b.weight).re;
            let mid = (a.center + b.center) / two - reference;
            m0 = m0 + ww * em;
            m1 = m1 + ww * mid * em;
            m2 = m2 + ww * (mid * mid + half_w2) * em;
        }
    }
    (m0, m1, m2)
}

fn reference_center<T: Real>(s: &WavepacketSuperposition<T>) -> T {
    let (lo, hi) = s.min_max_center();
    (lo + hi) / T::lit(2.0)
}

pub fn norm_sqr<T: Real>(s: &WavepacketSuperposition<T>) -> T {
    let (m0, _, _) = raw_moments(s, reference_center(s));
    m0.max(T::zero())
}

/// `sqrt(Σ conj(wi) wj <i|j>)`.
pub fn norm<T: Real>(s: &WavepacketSuperposition<T>) -> T {
    norm_sqr(s).sqrt()
}

/// Closed-form norm, mean and variance of the momentum density.
pub fn moments<T: Real>(s: &WavepacketSuperposition<T>) -> Result<Moments<T>> {
    let reference = reference_center(s);
    let (m0, m1, m2) = raw_moments(s, reference);
    if !(m0 > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    let shift = m1 / m0;
    Ok(Moments {
        norm_sqr: m0,
        mean: reference + shift,
        variance: (m2 / m0 - shift * shift).max(T::zero()),
    })
}

pub fn momentum_mean<T: Real>(s: &WavepacketSuperposition<T>) -> Result<T> {
    moments(s).map(|m| m.mean)
}

pub fn momentum_variance<T: Real>(s: &WavepacketSuperposition<T>) -> Result<T> {
    moments(s).map(|m| m.variance)
}

/// `chi_prime = parallel * chi + perpendicular * chi_perp + residual`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition<T> {
    pub parallel: Complex<T>,
    pub perpendicular: Complex<T>,
    /// Unit-normalized first Hermite function about `chi`, carrying `chi`'s phase.
    pub chi_perp: HermiteComponent<T>,
    pub residual_norm: T,
}

/// `1 - e^{-x}(1 + x)` without cancellation for small `x`.
fn one_minus_exp_poly<T: Real>(x: T) -> T {
    if x > T::lit(0.1) {
        return T::one() - (-x).exp() * (T::one() + x);
    }
    // Σ_{k>=2} (-1)^k (k-1) x^k / k!
    let mut term = x * x / T::lit(2.0);
    let mut sum = term;
    for k in 3..20 {
        let kf = T::lit(k as f64);
        term = -term * x / kf * (kf - T::one()) / (kf - T::lit(2.0));
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() {
            break;
        }
    }
    sum
}

/// Splits `chi_prime` into its projections on `chi` and on the first excited
/// state about `chi`. For a kick of `r` widths the perpendicular coefficient
/// is `-r/sqrt(2)` to first order and the residual is `O(r²)`.
///
/// Both inputs are treated as unit-normalized basis states: `chi.weight` must
/// have modulus one.
pub fn orthogonal_decomposition<T: Real>(
    chi_prime: &GaussianComponent<T>,
    chi: &GaussianComponent<T>,
) -> Result<Decomposition<T>> {
    if chi_prime.width != chi.width {
        return Err(Error::UnequalWidths(chi_prime.width.as_f64(), chi.width.as_f64()));
    }
    let unit_tol = T::lit(1e-6).max(T::epsilon() * T::lit(64.0));
    if (chi.weight.norm() - T::one()).abs() > unit_tol {
        return Err(Error::InvalidParameter {
            field: "chi",
            rule: "reference state must be unit-normalized".to_string(),
        });
    }
    let chi_perp = HermiteComponent::first_excited(chi);
    let parallel = overlap(chi, chi_prime);
    let perpendicular = hermite_overlap(&chi_perp, &HermiteComponent::gaussian(chi_prime))?;
    let dc = chi_prime.center - chi.center;
    let x = dc * dc / (T::lit(2.0) * chi.width * chi.width);
    let residual_norm = chi_prime.weight.norm() * one_minus_exp_poly(x).max(T::zero()).sqrt();
    Ok(Decomposition {
        parallel,
        perpendicular,
        chi_perp,
        residual_norm,
    })
}
