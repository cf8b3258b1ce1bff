use std::collections::BTreeMap;

use graph_core::{ClusterId, NodeId, PortId, WeightedGraph};
use sim_kernel::{Entry, Network};

use crate::error::ToolboxError;

/// What one node knows about the fragment tree it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentView {
    pub fragment_id: NodeId,
    pub cluster_id: ClusterId,
    pub parent: Option<PortId>,
    pub children: Vec<PortId>,
    pub root_flag: bool,
}

/// Vertex-disjoint rooted trees covering every node; a fragment is named by
/// its root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    views: Vec<FragmentView>,
    parent_node: Vec<Option<NodeId>>,
}

impl Forest {
    /// `parent[v]` is `v`'s tree parent (a neighbour in `g`) or `None` for a
    /// root. Every member of a fragment must carry the same cluster id.
    pub fn from_parents(
        g: &WeightedGraph,
        parent: &[Option<NodeId>],
        cluster: &[ClusterId],
    ) -> Result<Self, ToolboxError> {
        let n = g.n();
        if parent.len() != n || cluster.len() != n {
            return Err(ToolboxError::Forest(format!(
                "{} parents and {} cluster ids for {n} nodes",
                parent.len(),
                cluster.len()
            )));
        }
        let mut root = vec![None; n];
        for v in 0..n {
            // Walk up with a step cap to catch cycles.
            let mut x = v;
            let mut steps = 0;
            while let Some(p) = parent[x] {
                x = p as usize;
                steps += 1;
                if x >= n || steps > n {
                    return Err(ToolboxError::Forest(format!("parent chain from {v} is broken")));
                }
            }
            root[v] = Some(x as NodeId);
        }
        let mut views: Vec<FragmentView> = (0..n)
            .map(|v| FragmentView {
                fragment_id: root[v].unwrap(),
                cluster_id: cluster[v],
                parent: None,
                children: Vec::new(),
                root_flag: parent[v].is_none(),
            })
            .collect();
        for v in 0..n {
            let Some(p) = parent[v] else { continue };
            let up = g.port_to(v as NodeId, p).ok_or_else(|| {
                ToolboxError::Forest(format!("parent {p} of {v} is not a neighbour"))
            })?;
            views[v].parent = Some(up);
            let back = g.port(v as NodeId, up).back;
            views[p as usize].children.push(back);
            if cluster[v] != cluster[p as usize] {
                return Err(ToolboxError::Forest(format!(
                    "nodes {v} and {p} share a tree but not a cluster"
                )));
            }
        }
        for view in &mut views {
            view.children.sort_unstable();
        }
        Ok(Self {
            views,
            parent_node: parent.to_vec(),
        })
    }

    /// One tree over all nodes; the cluster id of every node is the root.
    pub fn spanning(g: &WeightedGraph, parent: &[Option<NodeId>]) -> Result<Self, ToolboxError> {
        let roots: Vec<usize> = (0..parent.len()).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(ToolboxError::Forest(format!("{} roots in a spanning tree", roots.len())));
        }
        Self::from_parents(g, parent, &vec![roots[0] as ClusterId; parent.len()])
    }

    pub fn singletons(g: &WeightedGraph) -> Self {
        let ids: Vec<ClusterId> = g.nodes().collect();
        Self::from_parents(g, &vec![None; g.n()], &ids).expect("singletons are a forest")
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn view(&self, v: NodeId) -> &FragmentView {
        &self.views[v as usize]
    }

    pub fn views(&self) -> &[FragmentView] {
        &self.views
    }

    pub fn parent_node(&self, v: NodeId) -> Option<NodeId> {
        self.parent_node[v as usize]
    }

    pub fn parent_nodes(&self) -> &[Option<NodeId>] {
        &self.parent_node
    }

    pub fn roots(&self) -> Vec<NodeId> {
        (0..self.views.len() as NodeId)
            .filter(|&v| self.views[v as usize].root_flag)
            .collect()
    }

    pub fn fragment_of(&self, v: NodeId) -> NodeId {
        self.views[v as usize].fragment_id
    }

    /// Members of every fragment, keyed by root.
    pub fn fragments(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (v, view) in self.views.iter().enumerate() {
            out.entry(view.fragment_id).or_default().push(v as NodeId);
        }
        out
    }

    /// Hop distance of every node from its fragment root.
    pub fn depths(&self) -> Vec<u32> {
        let n = self.views.len();
        let mut depth = vec![u32::MAX; n];
        for v in 0..n {
            let mut chain = Vec::new();
            let mut x = v;
            while depth[x] == u32::MAX {
                match self.parent_node[x] {
                    Some(p) => {
                        chain.push(x);
                        x = p as usize;
                    }
                    None => {
                        depth[x] = 0;
                    }
                }
            }
            while let Some(y) = chain.pop() {
                depth[y] = depth[self.parent_node[y].unwrap() as usize] + 1;
            }
        }
        depth
    }

    /// Tree edges as `(child, parent)` pairs.
    pub fn tree_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.parent_node
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v as NodeId, p)))
            .collect()
    }

    /// Session entries: roots of the selected fragments start on their own,
    /// their members join on the first message, everybody else sits out.
    pub fn entries(&self, net: &Network<'_>, roots: impl Fn(NodeId) -> bool) -> Vec<Entry> {
        self.views
            .iter()
            .enumerate()
            .map(|(v, view)| {
                if !roots(view.fragment_id) {
                    Entry::Skip
                } else if view.root_flag {
                    Entry::At(net.exit_time(v as NodeId))
                } else {
                    Entry::OnMessage
                }
            })
            .collect()
    }
}
