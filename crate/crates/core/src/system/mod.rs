//! System representations and the transfer-matrix evaluation interface.

mod any;
mod io;
mod network;
mod platoon;
mod polynomial;
mod state_space;

pub use any::{AnySystem, InputScenario};
pub use io::{detect_network, read_system, write_system};
pub use network::{Network, NetworkInput, NetworkSystem, OutputSelector, DENSE_LIMIT};
pub use platoon::{build_platoon, PlatoonSpec, Symmetry};
pub use polynomial::{companion_embed, MatrixPolynomial};
pub use state_space::StateSpace;

use num_complex::Complex;

use crate::error::Result;
use crate::linalg::{induced_norm, CMatrix, NormKind};
use crate::scalar::Real;

/// A linear input-output system `(A, B, C)` seen through its transfer matrix
/// `C (sI - A)^{-1} B`.
pub trait IoSystem<T: Real>: Sync {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;

    /// `C (sI - A)^{-1} B`; `SingularMatrix` when `s` is numerically an eigenvalue.
    fn transfer(&self, s: Complex<T>) -> Result<CMatrix<T>>;

    /// `||C (sI - A)^{-1} B||` in the given induced norm.
    fn transfer_norm(&self, s: Complex<T>, kind: NormKind) -> Result<T> {
        Ok(induced_norm(&self.transfer(s)?, kind))
    }

    fn a_norm(&self, kind: NormKind) -> T;
    fn b_norm(&self, kind: NormKind) -> T;
    fn c_norm(&self, kind: NormKind) -> T;

    /// True when `A`, `B`, `C` are real, so the transfer matrix satisfies
    /// `G(conj s) = conj G(s)`.
    fn is_real(&self) -> bool;

    /// Dense realization, when small enough to form.
    fn dense(&self) -> Option<StateSpace<T>>;

    /// Poles of the transfer matrix when they are cheap to locate.
    fn poles(&self) -> Option<Vec<Complex<T>>> {
        None
    }
}
