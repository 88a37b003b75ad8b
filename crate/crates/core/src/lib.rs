//! Classical simulation of measurement-based quantum computation with diagonal
//! two-qubit gates on finite-degree graphs, via cylinder-separable decompositions.
//!
//! The numerical core (`pauli`, `growth`, `lp`, `state_spaces`, `decomposer`) is
//! generic over [`Real`] (`f32` or `f64`); the sampler and the dense oracle run in `f64`.

pub mod decomposer;
pub mod error;
pub mod growth;
pub mod lp;
pub mod oracle;
pub mod pauli;
pub mod roots;
pub mod sampler;
pub mod scalar;
pub mod state_spaces;

pub use error::{Error, Result};
pub use scalar::Real;

pub type BlochOp64 = pauli::BlochOp<f64>;
pub type BlochOp32 = pauli::BlochOp<f32>;
pub type PauliCoeffMatrix64 = pauli::PauliCoeffMatrix<f64>;
pub type PauliCoeffMatrix32 = pauli::PauliCoeffMatrix<f32>;
pub type DiagonalGate64 = pauli::DiagonalGate<f64>;
pub type GrowthQuery64 = growth::GrowthQuery<f64>;
pub type ThetaBound64 = growth::ThetaBound<f64>;
pub type Cylinder64 = state_spaces::Cylinder<f64>;
pub type Spindle64 = state_spaces::Spindle<f64>;
pub type Discretization64 = state_spaces::Discretization<f64>;
pub type Discretization32 = state_spaces::Discretization<f32>;
pub type SepDecomposition64 = decomposer::SepDecomposition<f64>;
pub type SepDecomposition32 = decomposer::SepDecomposition<f32>;
