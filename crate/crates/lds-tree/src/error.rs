use graph_core::GraphError;
use thiserror::Error;
use toolbox::ToolboxError;

#[derive(Debug, Error)]
pub enum LdsError {
    /// The parameter regime needs `ln ln n >= 2 eps' ln 3`; callers fall back
    /// to plain flooding.
    #[error("n = {n} is too small for the layered construction; use the flooding tree")]
    UseTrivial { n: usize },
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("beta must lie in (0, 1/3) for the phase count, got {0}")]
    BadBeta(f64),
    #[error("need at least {min} trials, got {trials}")]
    TooFewTrials { trials: usize, min: usize },
    #[error("root {root} is not a node of a graph with {n} nodes")]
    BadRoot { root: u32, n: usize },
    #[error("super-partition does not match the level: {0}")]
    Inconsistent(String),
    #[error("guess doubling did not cover the graph after {attempts} attempts")]
    GuessExhausted { attempts: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Toolbox(#[from] ToolboxError),
}

impl From<sim_kernel::SimError> for LdsError {
    fn from(e: sim_kernel::SimError) -> Self {
        LdsError::Toolbox(e.into())
    }
}
