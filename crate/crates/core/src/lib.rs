//! Stabilizer simulation of multipartite entanglement purification.
//!
//! The crate is organised bottom up:
//!
//! * [`pauli`] and [`tableau`]: Pauli algebra and CHP-style tableaux.
//! * [`circuit`]: the circuit IR, its validation, execution and file format.
//! * [`noise`]: fault sites for network, gate and measurement noise.
//! * [`protocols`]: states, distribution, the stabilizer-check gadget and
//!   the built-in purification circuits.
//! * [`montecarlo`], [`perturbative`] and [`exact`]: the three engines.
//! * [`harness`]: input-fidelity inversion and parameter sweeps.
//!
//! Probabilities and polynomial coefficients are generic over [`Scalar`];
//! the aliases below fix the common choices.

pub mod circuit;
mod error;
pub mod exact;
pub mod harness;
pub mod montecarlo;
pub mod noise;
pub mod pauli;
pub mod perturbative;
pub mod protocols;
pub mod scalar;
pub mod tableau;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational used for first-order coefficients and exact enumeration.
pub type Rational = num_rational::Ratio<i64>;

pub type RationalPolynomial = perturbative::LinearPolynomial<Rational>;
pub type F64Polynomial = perturbative::LinearPolynomial<f64>;
pub type RationalNoiseModel = noise::NoiseModel<Rational>;
pub type F64NoiseModel = noise::NoiseModel<f64>;
pub type F32NoiseModel = noise::NoiseModel<f32>;
