//! Dense and banded complex linear algebra.

mod banded;
mod eig;
mod expm;
mod lu;
mod matrix;
mod norm;

pub use banded::{solve_banded, BandedLu, BandedMatrix};
pub use eig::{eigenvalues, spectral_abscissa};
pub use expm::matrix_exponential;
pub use lu::{solve_dense, LuFactor};
pub use matrix::CMatrix;
pub use norm::{
    induced_norm, largest_eigenvalue_lanczos, singular_values, spectral_norm_power, NormKind, SVD_DIM_LIMIT,
};
