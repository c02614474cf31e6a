//! Parseval frames and the Hamiltonians they generate.
//!
//! Numerical code is generic over the real field (`f32` or `f64`); the
//! aliases below fix `f64`. Ladder and block-frame matrices are also
//! available over the exact [`Surd`] field.

// `!(a <= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cc;
pub mod error;
pub mod frame;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod pseudo_boson;
pub mod scalar;
pub mod surd;

pub use error::{FrameError, Result};
pub use scalar::{RadicalScalar, Real, C};
pub use surd::Surd;

pub type Vector64 = frame::Vector<f64>;
pub type Frame64 = frame::Frame<f64>;
pub type Frame32 = frame::Frame<f32>;
pub type Hamiltonian64 = hamiltonian::FrameHamiltonian<f64>;
pub type Weights64 = hamiltonian::Weights<f64>;
pub type CCBlock64 = cc::CCBlock<f64>;
pub type Grid64 = pseudo_boson::Grid<f64>;
pub type GridFunction64 = pseudo_boson::GridFunction<f64>;
