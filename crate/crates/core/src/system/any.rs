use num_complex::Complex;

use super::{IoSystem, NetworkInput, NetworkSystem, StateSpace};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, NormKind};
use crate::scalar::Real;

/// Which input matrix `B` a transient question is asked with.
#[derive(Clone, Debug, PartialEq)]
pub enum InputScenario<T> {
    /// Keep the system's own `B`.
    Impulse,
    /// `B = I_N`: worst case over all initial states.
    FullInitialCondition,
    /// `B = B0`: initial states restricted to the range of `B0`.
    StructuredInitialCondition(CMatrix<T>),
}

/// A dense state-space system or a structured second-order network.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySystem<T> {
    Dense(StateSpace<T>),
    Network(NetworkSystem<T>),
}

impl<T: Real> From<StateSpace<T>> for AnySystem<T> {
    fn from(s: StateSpace<T>) -> Self {
        AnySystem::Dense(s)
    }
}

impl<T: Real> From<NetworkSystem<T>> for AnySystem<T> {
    fn from(s: NetworkSystem<T>) -> Self {
        AnySystem::Network(s)
    }
}

impl<T: Real> AnySystem<T> {
    fn inner(&self) -> &dyn IoSystem<T> {
        match self {
            AnySystem::Dense(s) => s,
            AnySystem::Network(s) => s,
        }
    }

    /// The same system with the input matrix selected by `scenario`.
    pub fn scenario_matrices(&self, scenario: &InputScenario<T>) -> Result<Self> {
        let n = self.state_dim();
        if let InputScenario::StructuredInitialCondition(b0) = scenario {
            if b0.rows() != n {
                return Err(Error::DimensionMismatch(format!(
                    "initial-condition matrix has {} rows, expected {n}",
                    b0.rows()
                )));
            }
        }
        Ok(match (self, scenario) {
            (_, InputScenario::Impulse) => self.clone(),
            (AnySystem::Dense(s), InputScenario::FullInitialCondition) => {
                AnySystem::Dense(s.with_input(CMatrix::identity(n))?)
            }
            (AnySystem::Dense(s), InputScenario::StructuredInitialCondition(b0)) => {
                AnySystem::Dense(s.with_input(b0.clone())?)
            }
            (AnySystem::Network(s), InputScenario::FullInitialCondition) => {
                AnySystem::Network(s.with_input(NetworkInput::Identity)?)
            }
            (AnySystem::Network(s), InputScenario::StructuredInitialCondition(b0)) => {
                AnySystem::Network(s.with_input(NetworkInput::Dense(b0.clone()))?)
            }
        })
    }

    /// Dense input matrix.
    pub fn input_matrix(&self) -> CMatrix<T> {
        match self {
            AnySystem::Dense(s) => s.b().clone(),
            AnySystem::Network(s) => s.input_matrix(),
        }
    }
}

impl<T: Real> IoSystem<T> for AnySystem<T> {
    fn state_dim(&self) -> usize {
        self.inner().state_dim()
    }

    fn input_dim(&self) -> usize {
        self.inner().input_dim()
    }

    fn output_dim(&self) -> usize {
        self.inner().output_dim()
    }

    fn transfer(&self, s: Complex<T>) -> Result<CMatrix<T>> {
        self.inner().transfer(s)
    }

    fn transfer_norm(&self, s: Complex<T>, kind: NormKind) -> Result<T> {
        self.inner().transfer_norm(s, kind)
    }

    fn a_norm(&self, kind: NormKind) -> T {
        self.inner().a_norm(kind)
    }

    fn b_norm(&self, kind: NormKind) -> T {
        self.inner().b_norm(kind)
    }

    fn c_norm(&self, kind: NormKind) -> T {
        self.inner().c_norm(kind)
    }

    fn is_real(&self) -> bool {
        self.inner().is_real()
    }

    fn dense(&self) -> Option<StateSpace<T>> {
        self.inner().dense()
    }

    fn poles(&self) -> Option<Vec<Complex<T>>> {
        self.inner().poles()
    }
}
