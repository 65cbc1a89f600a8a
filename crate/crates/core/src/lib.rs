//! Entanglement transfer from a broadband two-mode squeezed vacuum to the
//! mirrors of two driven optomechanical resonators.
//!
//! The physics modules ([`model`], [`closedform`], [`oracle`]) are generic
//! over the floating-point [`Scalar`]; the aliases below fix it to `f64`,
//! which is what [`sweep`] and [`cli`] use.

pub mod cli;
pub mod closedform;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod sweep;

pub use scalar::Scalar;

pub use oracle::{OracleError, Pair, QuadratureConfig};

pub type ResonatorParams = model::ResonatorParams<f64>;
pub type MirrorParams = model::MirrorParams<f64>;
pub type Unit = model::Unit<f64>;
pub type SqueezedBath = model::SqueezedBath<f64>;
pub type SystemParams = model::SystemParams<f64>;
pub type SteadyState = model::SteadyState<f64>;
pub type DuanResult = closedform::DuanResult<f64>;
pub type AdiabaticRates = closedform::AdiabaticRates<f64>;
pub type UnitRates = oracle::UnitRates<f64>;
pub type CovarianceMatrix = oracle::CovarianceMatrix<f64>;
pub type DriftDiffusion = oracle::DriftDiffusion<f64>;
