//! Input-output pseudospectra and transient bounds for linear systems.
//!
//! The crate evaluates the transfer matrix `C (sI - A)^{-1} B` over the complex
//! plane and turns it into lower and upper bounds on the transient peak
//! `sup_{t >= 0} ||C e^{tA} B||`. Second-order network systems such as vehicle
//! platoons are handled through banded solves, so their cost is linear in the
//! number of agents.
//!
//! Every routine is generic over the real scalar (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.

// `!(x > 0)` guards reject NaN together with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `Complex<T>: DivAssign<T>` needs `NumAssign`, which `Real` does not imply.
#![allow(clippy::assign_op_pattern)]

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod pseudospectra;
pub mod quadrature;
pub mod scalar;
pub mod system;

pub use error::{Error, Result};
pub use linalg::NormKind;
pub use num_complex::Complex;
pub use scalar::Real;

pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type BandedComplexMatrix = linalg::BandedMatrix<f64>;
pub type StateSpaceSystem = system::StateSpace<f64>;
pub type MatrixPolynomialSystem = system::MatrixPolynomial<f64>;
pub type SecondOrderNetwork = system::Network<f64>;
pub type NetworkSystem = system::NetworkSystem<f64>;
pub type AnySystem = system::AnySystem<f64>;
pub type InputScenario = system::InputScenario<f64>;
pub type PlatoonSpec = system::PlatoonSpec<f64>;
pub type GridSpec = pseudospectra::GridSpec<f64>;
pub type ResolventGrid = pseudospectra::ResolventGrid<f64>;
pub type LevelCurve = pseudospectra::LevelCurve<f64>;
pub type BoundReport = bounds::BoundReport<f64>;
pub type QuadratureConfig = quadrature::QuadratureConfig<f64>;
pub type TransientTrace = oracle::TransientTrace<f64>;

pub type ComplexMatrix32 = linalg::CMatrix<f32>;
pub type StateSpaceSystem32 = system::StateSpace<f32>;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
