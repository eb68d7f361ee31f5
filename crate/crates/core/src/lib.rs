//! Finite-dimensional models of a factor in standard form: modular objects of
//! cyclic and separating vectors, block truncations of the infinite model,
//! and the classification of spectral data of `H₀`.
//!
//! Matrix code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases.

pub mod block_factor;
pub mod error;
pub mod finite_factor;
pub mod io;
pub mod linalg;
pub mod modular_engine;
pub mod sample;
pub mod scalar;
pub mod spectral;
pub mod vector_operator;
pub mod verify;

pub use error::{Error, Result};
pub use finite_factor::{AntilinearMap, FactorContext, LinearMap, MatrixElement};
pub use modular_engine::{ModularObjects, OracleObjects};
pub use scalar::{Real, C};
pub use spectral::{DeltaSpectrum, FactorType, GeometricTail, Multiplicity, SpectralData};
pub use vector_operator::VectorOperatorPair;

pub type Matrix = MatrixElement<f64>;
pub type Matrix32 = MatrixElement<f32>;
pub type Context = FactorContext<f64>;
pub type Context32 = FactorContext<f32>;
pub type Objects = ModularObjects<f64>;
pub type BlockVector = block_factor::BlockVector<f64>;
pub type BlockOperator = block_factor::BlockOperator<f64>;
