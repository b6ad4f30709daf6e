//! Physical constants, experiment parameters and the feasibility chain.
//!
//! Everything here is SI double precision. The quantum modules only ever see
//! the two dimensionless numbers `epsilon` and the kick ratio `r = delta_p / big_delta_p`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::WavepacketSuperposition;
use crate::{protocol, statistics};

/// Diamond, kg/m³.
pub const DEFAULT_DENSITY: f64 = 3500.0;

/// Ratio `delta_p / (epsilon * big_delta_p)` the experiment is designed to hit.
pub const TARGET_SHIFT_RATIO: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Gravitational constant, m³ kg⁻¹ s⁻².
    #[serde(rename = "G")]
    pub g: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
}

impl Default for PhysicalConstants {
    /// CODATA 2018.
    fn default() -> Self {
        Self {
            g: 6.674_30e-11,
            hbar: 1.054_571_817e-34,
        }
    }
}

fn default_density() -> f64 {
    DEFAULT_DENSITY
}

/// Inputs of one experimental scenario, SI units throughout.
///
/// The JSON form uses exactly these field names (`T` upper case) and rejects
/// unknown keys. `density` may be omitted and defaults to diamond.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentParams {
    /// Source mass, kg.
    pub m1: f64,
    /// Probe mass, kg.
    pub m2: f64,
    /// Closest approach between the near arm and the probe, m.
    pub d: f64,
    /// Superposition size, m.
    pub delta_x: f64,
    /// Interferometer duration, s.
    pub tau: f64,
    /// Trap angular frequency, rad/s.
    pub omega: f64,
    /// Momentum squeezing factor, `0 < eta <= 1`.
    pub eta: f64,
    /// Preselection bias, `0 < epsilon < 1`.
    pub epsilon: f64,
    /// Free flight before position readout, s.
    #[serde(rename = "T")]
    pub t_flight: f64,
    /// Probe material density, kg/m³.
    #[serde(default = "default_density")]
    pub density: f64,
}

pub const PRESET_NAMES: [&str; 2] = ["paper-A", "paper-B"];

impl ExperimentParams {
    /// Scenario A: a 1e-12 kg probe in a 1 rad/s trap squeezed by 0.35.
    pub fn paper_a() -> Self {
        Self {
            m1: 1e-14,
            m2: 1e-12,
            d: 20e-6,
            delta_x: 50e-6,
            tau: 1.0,
            omega: 1.0,
            eta: 0.35,
            epsilon: 0.01,
            t_flight: 10.0,
            density: DEFAULT_DENSITY,
        }
    }

    /// Scenario B: a 1e-14 kg probe in a 1e4 rad/s trap squeezed by 1e-3.
    pub fn paper_b() -> Self {
        Self {
            m2: 1e-14,
            omega: 1e4,
            eta: 1e-3,
            ..Self::paper_a()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper-A" => Ok(Self::paper_a()),
            "paper-B" => Ok(Self::paper_b()),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    /// Names accepted by [`ExperimentParams::get`] and [`ExperimentParams::set`].
    pub const FIELDS: [&'static str; 10] = [
        "m1", "m2", "d", "delta_x", "tau", "omega", "eta", "epsilon", "T", "density",
    ];

    pub fn get(&self, field: &str) -> Option<f64> {
        Some(match field {
            "m1" => self.m1,
            "m2" => self.m2,
            "d" => self.d,
            "delta_x" => self.delta_x,
            "tau" => self.tau,
            "omega" => self.omega,
            "eta" => self.eta,
            "epsilon" => self.epsilon,
            "T" => self.t_flight,
            "density" => self.density,
            _ => return None,
        })
    }

    /// Returns `false` if `field` is not a parameter name.
    pub fn set(&mut self, field: &str, value: f64) -> bool {
        let slot = match field {
            "m1" => &mut self.m1,
            "m2" => &mut self.m2,
            "d" => &mut self.d,
            "delta_x" => &mut self.delta_x,
            "tau" => &mut self.tau,
            "omega" => &mut self.omega,
            "eta" => &mut self.eta,
            "epsilon" => &mut self.epsilon,
            "T" => &mut self.t_flight,
            "density" => &mut self.density,
            _ => return false,
        };
        *slot = value;
        true
    }
}

/// Momentum transferred by the near arm held at distance `d` for the whole
/// interferometer time: `G m1 m2 tau / d²`.
pub fn delta_p(params: &ExperimentParams, constants: &PhysicalConstants) -> f64 {
    constants.g * params.m1 * params.m2 * params.tau / (params.d * params.d)
}

/// Momentum uncertainty of the squeezed ground state: `eta sqrt(m2 omega hbar / 2)`.
pub fn momentum_width(params: &ExperimentParams, constants: &PhysicalConstants) -> f64 {
    params.eta * (params.m2 * params.omega * constants.hbar / 2.0).sqrt()
}

/// Preselection bias that makes the amplified shift equal to
/// [`TARGET_SHIFT_RATIO`] of the momentum width:
/// `10 G m1 sqrt(2 m2 / (omega hbar)) tau / (eta d²)`.
pub fn epsilon_required(params: &ExperimentParams, constants: &PhysicalConstants) -> f64 {
    10.0 * constants.g * params.m1 * (2.0 * params.m2 / (params.omega * constants.hbar)).sqrt() * params.tau
        / (params.eta * params.d * params.d)
}

/// Radius of a homogeneous sphere.
pub fn radius_from_mass(mass: f64, density: f64) -> f64 {
    (3.0 * mass / (4.0 * PI * density)).cbrt()
}

/// Far-field `(displacement, spread)` of the probe at readout time:
/// `((delta_p / epsilon) T / m2, big_delta_p T / m2)`.
pub fn displacement_and_spread(params: &ExperimentParams, constants: &PhysicalConstants) -> (f64, f64) {
    let lever = params.t_flight / params.m2;
    (
        delta_p(params, constants) / params.epsilon * lever,
        momentum_width(params, constants) * lever,
    )
}

/// Kick in units of the momentum width, `r = delta_p / big_delta_p`.
pub fn kick_ratio(params: &ExperimentParams, constants: &PhysicalConstants) -> f64 {
    delta_p(params, constants) / momentum_width(params, constants)
}

/// One broken invariant of an [`ExperimentParams`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Lists every broken invariant; empty when the parameter set is usable.
pub fn validate(params: &ExperimentParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let positive = [
        ("m1", params.m1),
        ("m2", params.m2),
        ("d", params.d),
        ("delta_x", params.delta_x),
        ("tau", params.tau),
        ("omega", params.omega),
        ("eta", params.eta),
        ("epsilon", params.epsilon),
        ("T", params.t_flight),
        ("density", params.density),
    ];
    for (field, value) in positive {
        if !(value.is_finite() && value > 0.0) {
            out.push(Violation {
                field,
                message: format!("{field} must be finite and strictly positive (got {value})"),
            });
        }
    }
    if params.epsilon.is_finite() && params.epsilon >= 1.0 {
        out.push(Violation {
            field: "epsilon",
            message: "epsilon out of (0,1)".to_string(),
        });
    }
    if params.eta.is_finite() && params.eta > 1.0 {
        out.push(Violation {
            field: "eta",
            message: "eta out of (0,1]".to_string(),
        });
    }
    if params.m2 > 0.0 && params.density > 0.0 && params.d > 0.0 {
        let radius = radius_from_mass(params.m2, params.density);
        if radius >= params.d {
            out.push(Violation {
                field: "m2",
                message: format!(
                    "probe radius exceeds separation ({radius:.3e} m >= d = {:.3e} m)",
                    params.d
                ),
            });
        }
    }
    out
}

/// Validates and converts the violation list into an error.
pub fn ensure_valid(params: &ExperimentParams) -> Result<()> {
    match validate(params).into_iter().next() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidParameter {
            field: v.field,
            rule: v.message,
        }),
    }
}

/// Every scalar of the feasibility chain for one parameter set.
///
/// `p_discriminate` is the leading-order estimate `(delta_p / (epsilon big_delta_p))²`
/// that the run-count argument multiplies through; `p_discriminate_exact` is
/// `1 - |<chi|chi_post>|²` on the exact postselected state and is roughly half
/// of it. The leading-order value is capped at one once the shift exceeds a
/// width. Both run counts are reported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub delta_p: f64,
    pub big_delta_p: f64,
    pub sigma: f64,
    pub kick_ratio: f64,
    pub shift_ratio: f64,
    pub epsilon_required: f64,
    pub epsilon_required_times_eta: f64,
    pub p_success: f64,
    pub p_success_leading: f64,
    pub p_discriminate: f64,
    pub p_discriminate_exact: f64,
    pub target_successes: u64,
    pub n_runs: u64,
    pub n_runs_exact: u64,
    pub displacement_t: f64,
    pub spread_t: f64,
    pub probe_radius: f64,
}

impl DerivedQuantities {
    pub fn evaluate(
        params: &ExperimentParams,
        constants: &PhysicalConstants,
        target_successes: u64,
    ) -> Result<Self> {
        ensure_valid(params)?;
        let dp = delta_p(params, constants);
        let big_dp = momentum_width(params, constants);
        let r = dp / big_dp;
        let eps = params.epsilon;
        let shift = r / eps;

        let p_success = protocol::postselection_probability(eps, r);
        let p_discriminate = statistics::discrimination_leading_order(shift).min(1.0);
        let post = protocol::postselected_state(eps, r)?;
        let chi = WavepacketSuperposition::ground();
        let p_discriminate_exact = statistics::discrimination_probability(&chi, &post.state)?;
        let (displacement_t, spread_t) = displacement_and_spread(params, constants);
        let eps_req = epsilon_required(params, constants);

        Ok(Self {
            delta_p: dp,
            big_delta_p: big_dp,
            sigma: constants.hbar / big_dp,
            kick_ratio: r,
            shift_ratio: shift,
            epsilon_required: eps_req,
            epsilon_required_times_eta: eps_req * params.eta,
            p_success,
            p_success_leading: eps * eps / 4.0,
            p_discriminate,
            p_discriminate_exact,
            target_successes,
            n_runs: statistics::runs_estimate(p_success, p_discriminate, target_successes)?,
            n_runs_exact: statistics::runs_estimate(p_success, p_discriminate_exact, target_successes)?,
            displacement_t,
            spread_t,
            probe_radius: radius_from_mass(params.m2, params.density),
        })
    }
}
