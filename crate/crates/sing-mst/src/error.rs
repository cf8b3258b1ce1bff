use graph_core::GraphError;
use lds_tree::LdsError;
use sim_kernel::SimError;
use thiserror::Error;
use toolbox::ToolboxError;

#[derive(Debug, Error)]
pub enum MstError {
    #[error(transparent)]
    Toolbox(#[from] ToolboxError),
    #[error(transparent)]
    Tree(#[from] LdsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    /// A local rule produced a state its own checks reject.
    #[error("{step}: {detail}")]
    Protocol { step: &'static str, detail: String },
    #[error("census sizes add up to {got}, the graph has {n} nodes")]
    Census { got: u64, n: usize },
    #[error("{clusters} clusters left after the last merging phase")]
    Unfinished { clusters: usize },
}

impl From<SimError> for MstError {
    fn from(e: SimError) -> Self {
        MstError::Toolbox(e.into())
    }
}

impl MstError {
    pub(crate) fn protocol(step: &'static str, detail: impl Into<String>) -> Self {
        MstError::Protocol {
            step,
            detail: detail.into(),
        }
    }
}
