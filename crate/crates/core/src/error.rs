use thiserror::Error;

use crate::annealed::AnnealedError;
use crate::entropy::EntropyError;
use crate::graphgen::GraphError;
use crate::model::ModelError;
use crate::quenched::QuenchedError;
use crate::structures::StructureError;
use crate::walk::WalkError;

/// Umbrella error for code that crosses module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Quenched(#[from] QuenchedError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Annealed(#[from] AnnealedError),
    #[error("experiment failed: {0}")]
    Experiment(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
