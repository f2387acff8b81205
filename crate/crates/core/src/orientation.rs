//! Partial and total orientations of a host graph's edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Digraph, Graph, VertexOrder};

/// Direction of one host edge `(u, v)`, `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[repr(u8)]
pub enum EdgeState {
    #[default]
    Unset,
    /// `u -> v`
    Forward,
    /// `v -> u`
    Backward,
}

impl EdgeState {
    pub fn from_forward(forward: bool) -> Self {
        if forward {
            EdgeState::Forward
        } else {
            EdgeState::Backward
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            EdgeState::Forward => EdgeState::Backward,
            EdgeState::Backward => EdgeState::Forward,
            EdgeState::Unset => EdgeState::Unset,
        }
    }
}

/// Per-edge direction assignment over a host graph, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialOrientation {
    states: Vec<EdgeState>,
    set_count: usize,
}

impl PartialOrientation {
    pub fn unset(m: usize) -> Self {
        PartialOrientation { states: vec![EdgeState::Unset; m], set_count: 0 }
    }

    /// Total orientation from one bit per edge (bit set = forward).
    pub fn from_forward_bits(m: usize, bits: u64) -> Self {
        let states = (0..m).map(|e| EdgeState::from_forward(bits >> e & 1 == 1)).collect();
        PartialOrientation { states, set_count: m }
    }

    /// Every edge points from lower to higher rank.
    pub fn from_order(g: &Graph, order: &VertexOrder) -> Self {
        let states = g
            .edges()
            .iter()
            .map(|&(u, v)| EdgeState::from_forward(order.is_forward(u, v)))
            .collect();
        PartialOrientation { states, set_count: g.m() }
    }

    /// Sets the listed arcs; every arc must lie on a host edge, at most once.
    pub fn from_arcs(g: &Graph, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut po = Self::unset(g.m());
        for &(u, v) in arcs {
            let e = g.edge_id(u, v).ok_or_else(|| {
                Error::OrientationMismatch(format!("arc {u}->{v} is not an edge of the graph"))
            })?;
            if po.get(e) != EdgeState::Unset {
                return Err(Error::OrientationMismatch(format!("edge {u}-{v} oriented twice")));
            }
            po.set(e, EdgeState::from_forward(u < v));
        }
        Ok(po)
    }

    /// Total orientation read from a digraph whose arcs cover the host edges exactly.
    pub fn from_digraph(g: &Graph, d: &Digraph) -> Result<Self> {
        if d.n() != g.n() {
            return Err(Error::OrientationMismatch(format!(
                "digraph has {} vertices, graph has {}",
                d.n(),
                g.n()
            )));
        }
        let po = Self::from_arcs(g, d.arcs())?;
        if !po.is_total() {
            return Err(Error::OrientationMismatch(format!(
                "{} of {} edges left unoriented",
                g.m() - po.set_count(),
                g.m()
            )));
        }
        Ok(po)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    #[inline]
    pub fn get(&self, e: usize) -> EdgeState {
        self.states[e]
    }

    pub fn states(&self) -> &[EdgeState] {
        &self.states
    }

    pub fn set(&mut self, e: usize, s: EdgeState) {
        let old = self.states[e];
        self.set_count = self.set_count + (s != EdgeState::Unset) as usize
            - (old != EdgeState::Unset) as usize;
        self.states[e] = s;
    }

    pub fn set_count(&self) -> usize {
        self.set_count
    }

    pub fn is_total(&self) -> bool {
        self.set_count == self.states.len()
    }

    /// Oriented pairs of the set edges, in edge-id order.
    pub fn arcs(&self, g: &Graph) -> Vec<(usize, usize)> {
        self.states
            .iter()
            .enumerate()
            .filter_map(|(e, s)| {
                let (u, v) = g.edge(e);
                match s {
                    EdgeState::Forward => Some((u, v)),
                    EdgeState::Backward => Some((v, u)),
                    EdgeState::Unset => None,
                }
            })
            .collect()
    }

    pub fn to_digraph(&self, g: &Graph) -> Digraph {
        Digraph::from_arcs(g.n(), self.arcs(g)).expect("arcs of a simple graph are valid")
    }

    /// True if every edge set here is set the same way in `other`.
    pub fn is_contained_in(&self, other: &PartialOrientation) -> bool {
        self.states
            .iter()
            .zip(&other.states)
            .all(|(a, b)| *a == EdgeState::Unset || a == b)
    }
}
