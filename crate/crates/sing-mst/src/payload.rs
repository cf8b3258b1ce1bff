use graph_core::{ClusterId, NodeId};
use sim_kernel::{Payload, HEADER_BITS};
use toolbox::MoeTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flag(pub bool);

impl Payload for Flag {
    fn bits(&self, _: u32) -> u32 {
        HEADER_BITS + 1
    }
}

/// A fragment's minimum outgoing edge, or the explicit "none" marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoeValue(pub Option<MoeTuple>);

impl Payload for MoeValue {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + self.0.map_or(0, |_| MoeTuple::WORDS * word)
    }
}

/// Convergecast summary: does this subtree hold the edge that makes the
/// fragment a supergraph root, and how many child edges end in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub tree_root: bool,
    pub children: u64,
}

impl Payload for Tally {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 1 + word
    }
}

/// Broadcast of a matching round: whom the fragment picked this round and
/// whether it is matched now.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Offer {
    pub pick: Option<NodeId>,
    pub matched: bool,
}

impl Payload for Offer {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 2 + word
    }
}

/// Traffic on supergraph edges during matching rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    /// Parent to child: was the child picked.
    Pick(bool),
    /// Child to parent.
    Status { fragment: NodeId, matched: bool },
}

impl Payload for Link {
    fn bits(&self, word: u32) -> u32 {
        match self {
            Link::Pick(_) => HEADER_BITS + 1,
            Link::Status { .. } => HEADER_BITS + 1 + word,
        }
    }
}

/// Outcome of the matching, told to every node of the fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchNote {
    pub partner: Option<NodeId>,
    /// Unmatched active fragment putting its own edge back.
    pub readd: bool,
}

impl Payload for MatchNote {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 2 + word
    }
}

/// Smallest fragment id seen in a component, and the node whose merge edge
/// brought it in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Best {
    pub id: NodeId,
    pub via: Option<NodeId>,
}

impl Payload for Best {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 1 + 2 * word
    }
}

/// Convergecast of the best candidate in a subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate(pub Option<(NodeId, NodeId)>);

impl Payload for Candidate {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + self.0.map_or(0, |_| 2 * word)
    }
}

/// The leader's answer to one base fragment in a merging phase: its new
/// cluster id and, if its proposal was taken, the endpoints of that edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub cluster: ClusterId,
    pub edge: Option<(NodeId, NodeId)>,
}

impl Payload for Verdict {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 1 + word + self.edge.map_or(0, |_| 2 * word)
    }
}
