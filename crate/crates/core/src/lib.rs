//! Exact analytics and Monte Carlo simulation of a postselected weak-value
//! measurement of the gravitational pull of a source mass held in a spatial
//! superposition.
//!
//! A probe mass in a Gaussian ground state receives a momentum kick from the
//! near arm of the source interferometer. Conditioning on the dark output port
//! amplifies the kick by the anomalous weak value `-1/epsilon` and reverses its
//! sign: the probe appears to be pushed away from the source.
//!
//! Layout:
//!
//! - [`params`]: SI constants, experiment parameters, presets and the feasibility chain.
//! - [`gaussian`]: closed-form algebra of momentum-space Gaussian superpositions.
//! - [`quadrature`]: brute-force grid integration used as an independent oracle.
//! - [`protocol`]: pre/postselection, gravitational kick, weak values.
//! - [`trajectory`]: Stern-Gerlach split history and time-dependent impulse.
//! - [`statistics`]: far-field readout, discrimination, run counts, z-tests.
//! - [`montecarlo`]: reproducible simulation of the quantum model and a classical baseline.
//!
//! The dimensionless quantum algebra is generic over [`Real`] (`f32` or `f64`).
//! SI quantities are always `f64`: products like `G m1 m2` sit near 1e-37 and
//! underflow single precision.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gaussian;
pub mod montecarlo;
pub mod params;
pub mod protocol;
pub mod quadrature;
pub mod scalar;
pub mod statistics;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Real;

pub use gaussian::{GaussianComponent, HermiteComponent, HermiteDegree, WavepacketSuperposition};
pub use params::{DerivedQuantities, ExperimentParams, PhysicalConstants, Violation};
pub use protocol::{JointState, Postselection, TwoPathState};
pub use trajectory::{ImpulseGeometry, SplitTrajectory};

/// Complex amplitude in double precision.
pub type C64 = num_complex::Complex<f64>;

pub type Gaussian = GaussianComponent<f64>;
pub type Gaussian32 = GaussianComponent<f32>;
pub type Hermite = HermiteComponent<f64>;
pub type Superposition = WavepacketSuperposition<f64>;
pub type Superposition32 = WavepacketSuperposition<f32>;
pub type PathState = TwoPathState<f64>;
pub type PathState32 = TwoPathState<f32>;
pub type Joint = JointState<f64>;
pub type Trajectory = SplitTrajectory<f64>;
