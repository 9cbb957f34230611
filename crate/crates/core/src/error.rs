use thiserror::Error;

use crate::circuit::IrError;
use crate::cost::CostError;
use crate::decompose::DecomposeError;
use crate::graph::GraphError;
use crate::grover::GroverError;
use crate::oracle::OracleError;
use crate::prep::PrepError;
use crate::sim::SimError;

/// Any error raised by this crate.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Grover(#[from] GroverError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

impl Error {
    /// True when the failure is about instance size rather than bad input.
    pub fn is_too_large(&self) -> bool {
        matches!(
            self,
            Error::Graph(GraphError::TooLarge { .. })
                | Error::Grover(GroverError::TooLarge { .. })
                | Error::Grover(GroverError::Sim(SimError::TooLarge { .. }))
                | Error::Sim(SimError::TooLarge { .. })
                | Error::Cost(CostError::Grover(GroverError::TooLarge { .. }))
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
