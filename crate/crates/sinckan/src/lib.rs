//! Sinc Kolmogorov-Arnold networks (SincKAN) and the reference baselines.
//!
//! The crate is organized around the pipeline it implements:
//!
//! - [`bases`]: Sinc cardinal series, step-size grids, B-spline and Chebyshev
//!   bases, and the input transformations the networks compose with.
//! - [`autodiff`]: forward-mode jets carrying first and pure second input
//!   derivatives, plus a reverse-mode tape for parameter gradients.
//! - [`networks`]: the five architectures (SincKAN, spline KAN, ChebyKAN,
//!   MLP, modified MLP) with deterministic initialization and a shared
//!   parameter store.
//! - [`problems`]: the benchmark registry of target functions and PDE
//!   problems with exact solutions and residual operators.
//! - [`training`]: Adam with exponential learning-rate decay and the
//!   supervised approximation loop.
//! - [`pinn`]: physics-informed loss assembly and the PIKAN training loop.

pub mod autodiff;
pub mod bases;
pub mod error;
pub mod networks;
pub mod pinn;
pub mod problems;
pub mod training;

pub use error::{Error, Result};
