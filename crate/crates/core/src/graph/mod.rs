//! Undirected graphs, digraphs and vertex orders.

mod independence;
mod paths;

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng;

pub use independence::{independence_number, Independence, IndependenceMode, EXACT_LIMIT};
pub use paths::{
    classify_tournament, gallai_milgram_partition, hamiltonian_path_tournament, PathPartition,
    TournamentClass,
};

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted; an edge's id is its
/// position in that list. "Forward" on a stored edge means `u -> v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<FixedBitSet>,
    nbrs: Vec<Vec<usize>>,
}

/// Which graph [`Graph::generate`] should build.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    Gnp { n: usize, p: f64, seed: u64 },
    Complete(usize),
    Cycle(usize),
    Path(usize),
    EdgeList { n: usize, pairs: Vec<(usize, usize)> },
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and bad labels.
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges = Vec::new();
        for (u, v) in pairs {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidVertex { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unchecked(n, edges))
    }

    fn from_sorted_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        let mut nbrs = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].insert(v);
            adj[v].insert(u);
            nbrs[u].push(v);
            nbrs[v].push(u);
        }
        for list in &mut nbrs {
            list.sort_unstable();
        }
        Graph { n, edges, adj, nbrs }
    }

    pub fn generate(kind: &GraphKind) -> Result<Self> {
        match kind {
            GraphKind::Gnp { n, p, seed } => Self::gnp(*n, *p, *seed),
            GraphKind::Complete(n) => Ok(Self::complete(*n)),
            GraphKind::Cycle(n) => Ok(Self::cycle(*n)),
            GraphKind::Path(n) => Ok(Self::path(*n)),
            GraphKind::EdgeList { n, pairs } => Self::from_edges(*n, pairs.iter().copied()),
        }
    }

    /// Binomial random graph. Pair `{u, v}` is present iff the uniform drawn
    /// from `derive(seed, [u, v])` is below `p`, so the result does not depend
    /// on the order in which pairs are visited.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if edge_coin(seed, u, v) < p {
                    edges.push((u, v));
                }
            }
        }
        Ok(Self::from_sorted_unchecked(n, edges))
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_sorted_unchecked(n, edges)
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_sorted_unchecked(n, edges)
    }

    /// Cycle on `n` vertices; for `n < 3` this degenerates to a path.
    pub fn cycle(n: usize) -> Self {
        let mut pairs: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            pairs.push((0, n - 1));
        }
        pairs.sort_unstable();
        Self::from_sorted_unchecked(n, pairs)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unchecked(n, Vec::new())
    }

    pub fn petersen() -> Self {
        let mut pairs = Vec::new();
        for i in 0..5 {
            pairs.push((i, (i + 1) % 5));
            pairs.push((i, i + 5));
            pairs.push((i + 5, (i + 2) % 5 + 5));
        }
        Self::from_edges(10, pairs).expect("petersen edge list is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    pub fn adjacency(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    /// Subgraph induced on `vertices`, relabelled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.nbrs[v] {
                let j = pos[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        Self::from_sorted_unchecked(vertices.len(), edges)
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    /// Whether `set` contains `k` pairwise adjacent vertices.
    pub fn has_clique_in(&self, set: &[usize], k: usize) -> bool {
        fn grow(g: &Graph, cands: &[usize], k: usize) -> bool {
            if k == 0 {
                return true;
            }
            cands.len() >= k
                && cands.iter().enumerate().any(|(i, &x)| {
                    let next: Vec<usize> = cands[i + 1..].iter().copied().filter(|&y| g.has_edge(x, y)).collect();
                    grow(g, &next, k - 1)
                })
        }
        grow(self, set, k)
    }

    pub fn has_clique(&self, k: usize) -> bool {
        let all: Vec<usize> = (0..self.n).collect();
        self.has_clique_in(&all, k)
    }

    /// `"n m"` header then one `"u v"` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (n, pairs) = parse_pairs(text)?;
        Self::from_edges(n, pairs)
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

#[inline]
fn edge_coin(seed: u64, u: usize, v: usize) -> f64 {
    rng::unit_f64(rng::derive(seed, &[u as u64, v as u64]))
}

fn parse_pairs(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing \"n m\" header".into(),
    })?;
    let [n, m] = parse_two(hline, header)?;
    let mut pairs = Vec::with_capacity(m);
    for (line, l) in lines {
        pairs.push(parse_two(line, l).map(|[u, v]| (u, v))?);
    }
    if pairs.len() != m {
        return Err(Error::Parse {
            line: hline,
            message: format!("header declares {m} edges, found {}", pairs.len()),
        });
    }
    Ok((n, pairs))
}

fn parse_two(line: usize, l: &str) -> Result<[usize; 2]> {
    let fields: Vec<_> = l.split_whitespace().collect();
    let bad = |message: String| Error::Parse { line, message };
    if fields.len() != 2 {
        return Err(bad(format!("expected two integers, got {l:?}")));
    }
    let mut out = [0; 2];
    for (slot, f) in out.iter_mut().zip(&fields) {
        *slot = f.parse().map_err(|_| bad(format!("not a non-negative integer: {f:?}")))?;
    }
    Ok(out)
}

/// Directed graph on `0..n` with at most one arc per ordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    out: Vec<FixedBitSet>,
}

impl Digraph {
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidVertex { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            list.push((u, v));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut out = vec![FixedBitSet::with_capacity(n); n];
        for &(u, v) in &list {
            out[u].insert(v);
        }
        Ok(Digraph { n, arcs: list, out })
    }

    pub fn empty(n: usize) -> Self {
        Digraph { n, arcs: Vec::new(), out: vec![FixedBitSet::with_capacity(n); n] }
    }

    /// `0 -> 1 -> ... -> k-1 -> 0`.
    pub fn directed_cycle(k: usize) -> Self {
        Self::from_arcs(k, (0..k).map(|i| (i, (i + 1) % k))).expect("cycle arcs are valid")
    }

    /// Tournament with `i -> j` for every `i < j`.
    pub fn transitive_tournament(k: usize) -> Self {
        Self::from_arcs(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))))
            .expect("transitive arcs are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.out[u].contains(v)
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].ones()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].count_ones(..)
    }

    /// Underlying simple graph; fails if some pair carries arcs both ways.
    pub fn underlying(&self) -> Result<Graph> {
        Graph::from_edges(self.n, self.arcs.iter().copied())
    }

    /// True if every unordered pair carries exactly one arc.
    pub fn is_tournament(&self) -> bool {
        (0..self.n).all(|u| {
            (u + 1..self.n).all(|v| self.has_arc(u, v) ^ self.has_arc(v, u))
        })
    }

    /// Sub-digraph induced on `vertices`, relabelled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Digraph {
        let mut arcs = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate() {
                if self.has_arc(u, v) {
                    arcs.push((i, j));
                }
            }
        }
        Digraph::from_arcs(vertices.len(), arcs).expect("induced arcs are valid")
    }

    /// Strongly connected components in topological order of the condensation.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let mut pg = petgraph::graph::DiGraph::<(), ()>::with_capacity(self.n, self.arcs.len());
        let nodes: Vec<_> = (0..self.n).map(|_| pg.add_node(())).collect();
        for &(u, v) in &self.arcs {
            pg.add_edge(nodes[u], nodes[v], ());
        }
        // tarjan_scc yields components in reverse topological order
        let mut comps: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&pg)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        comps.reverse();
        comps
    }

    /// True if the digraph has a directed cycle.
    pub fn has_cycle(&self) -> bool {
        self.strongly_connected_components().iter().any(|c| c.len() > 1)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.arcs.len());
        for &(u, v) in &self.arcs {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (n, pairs) = parse_pairs(text)?;
        Self::from_arcs(n, pairs)
    }
}

/// A permutation of the vertex set with O(1) rank lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrder {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl VertexOrder {
    pub fn identity(n: usize) -> Self {
        VertexOrder { order: (0..n).collect(), rank: (0..n).collect() }
    }

    /// `order[i]` is the vertex at rank `i`.
    pub fn from_permutation(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
            if rank[v] != usize::MAX {
                return Err(Error::InvalidParameter(format!("vertex {v} repeated in order")));
            }
            rank[v] = i;
        }
        Ok(VertexOrder { order, rank })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.order
    }

    /// Rank distance between the endpoints.
    pub fn length(&self, u: usize, v: usize) -> usize {
        self.rank[u].abs_diff(self.rank[v])
    }

    /// True if `u -> v` points from lower to higher rank.
    pub fn is_forward(&self, u: usize, v: usize) -> bool {
        self.rank[u] < self.rank[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_generators() {
        assert_eq!(Graph::complete(3).m(), 3);
        assert_eq!(Graph::cycle(5).m(), 5);
        assert_eq!(Graph::path(6).m(), 5);
        assert_eq!(Graph::petersen().m(), 15);
        assert!((0..10).all(|v| Graph::petersen().degree(v) == 3));
    }

    #[test]
    fn gnp_extremes_and_reproducibility() {
        assert_eq!(Graph::gnp(10, 0.0, 3).unwrap().m(), 0);
        assert_eq!(Graph::gnp(10, 1.0, 3).unwrap().m(), 45);
        assert_eq!(Graph::gnp(40, 0.3, 9).unwrap(), Graph::gnp(40, 0.3, 9).unwrap());
        assert_ne!(Graph::gnp(40, 0.3, 9).unwrap(), Graph::gnp(40, 0.3, 10).unwrap());
        assert!(matches!(Graph::gnp(4, 1.5, 0), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn gnp_edge_count_concentrates() {
        // m ~ Bin(C(1000,2), 1/2); allow 5 sigma.
        let pairs = 1000.0 * 999.0 / 2.0;
        let sigma = (pairs * 0.25f64).sqrt();
        let g = Graph::gnp(1000, 0.5, 0xfeed).unwrap();
        assert!((g.m() as f64 - 0.5 * pairs).abs() <= 5.0 * sigma, "m = {}", g.m());
    }

    #[test]
    fn gnp_prefix_consistent() {
        // per-pair derivation: G(n) restricted to the first k vertices is G(k)
        let big = Graph::gnp(30, 0.4, 77).unwrap();
        let small = Graph::gnp(20, 0.4, 77).unwrap();
        let vs: Vec<_> = (0..20).collect();
        assert_eq!(big.induced(&vs), small);
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(Graph::from_edges(3, [(0, 3)]), Err(Error::InvalidVertex { .. })));
        assert!(matches!(Graph::from_edges(3, [(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1))));
    }

    #[test]
    fn text_roundtrip_and_strictness() {
        let g = Graph::petersen();
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
        assert!(Graph::parse("3 2\n0 1\n").is_err());
        assert!(Graph::parse("3 2\n0 1\n1 0\n").is_err());
        assert!(Graph::parse("3 1\n0 x\n").is_err());
        assert!(Graph::parse("").is_err());
        let d = Digraph::parse("3 3\n0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(d, Digraph::directed_cycle(3));
        assert!(Digraph::parse("2 2\n0 1\n0 1\n").is_err());
        assert!(Digraph::parse("2 2\n0 1\n1 0\n").is_ok());
    }

    #[test]
    fn scc_examples() {
        assert_eq!(Digraph::directed_cycle(3).strongly_connected_components().len(), 1);
        let t = Digraph::transitive_tournament(4);
        assert_eq!(
            t.strongly_connected_components(),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
        let two = Digraph::from_arcs(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
            .unwrap();
        assert_eq!(two.strongly_connected_components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn scc_matches_reachability() {
        use rand::Rng;
        let mut r = crate::rng::stream(5, &[]);
        for _ in 0..100 {
            let n = r.gen_range(1..9);
            let mut arcs = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && r.gen_bool(0.3) {
                        arcs.push((u, v));
                    }
                }
            }
            let d = Digraph::from_arcs(n, arcs).unwrap();
            let mut reach = vec![vec![false; n]; n];
            for (u, row) in reach.iter_mut().enumerate() {
                row[u] = true;
                let mut stack = vec![u];
                while let Some(x) = stack.pop() {
                    for y in d.out_neighbors(x) {
                        if !row[y] {
                            row[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
            let comps = d.strongly_connected_components();
            let mut comp_of = vec![0; n];
            for (i, c) in comps.iter().enumerate() {
                for &v in c {
                    comp_of[v] = i;
                }
            }
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(comp_of[u] == comp_of[v], reach[u][v] && reach[v][u]);
                    // topological order: arcs never point to an earlier component
                    if d.has_arc(u, v) {
                        assert!(comp_of[u] <= comp_of[v]);
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_order() {
        let o = VertexOrder::from_permutation(vec![2, 0, 1]).unwrap();
        assert_eq!(o.rank(2), 0);
        assert_eq!(o.length(2, 1), 2);
        assert!(o.is_forward(0, 1));
        assert!(!o.is_forward(1, 2));
        assert!(VertexOrder::from_permutation(vec![0, 0]).is_err());
    }
}
