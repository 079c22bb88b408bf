use thiserror::Error;

use crate::bounds_lab::LabError;
use crate::cayley_menger::CmError;
use crate::codes::CodeError;
use crate::constructions::ConstructionError;
use crate::norms::NormError;
use crate::search::SearchError;

/// Crate-wide error, one variant per module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    CayleyMenger(#[from] CmError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

impl Error {
    /// True when the failure is numerical (non-convergence, non-embeddable
    /// input, LP breakdown) rather than a rejected input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Norm(e) => e.is_numerical(),
            Error::Code(_) => false,
            Error::CayleyMenger(e) => e.is_numerical(),
            Error::Construction(e) => e.is_numerical(),
            Error::Lab(e) => e.is_numerical(),
            Error::Search(e) => e.is_numerical(),
        }
    }
}
