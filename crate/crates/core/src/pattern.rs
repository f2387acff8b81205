//! Forbidden families and their compilation into constraint copies.
//!
//! A family is described by a small undirected *template* (K_r, C_r or the
//! underlying graph of H) together with the set of template orientations
//! that are forbidden. Orientations of a template with `k` edges are `u32`
//! masks: bit `i` set means template edge `(a, b)`, `a < b`, points `a -> b`.
//!
//! Compiling a family against a host graph lists every copy of the template
//! in the host exactly once, each with the host edge ids of its template
//! edges and the flips needed to translate host directions into local bits.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Digraph, Graph};
use crate::orientation::EdgeState;

/// Default cap on the number of copies a compilation may produce.
pub const DEFAULT_COPY_BUDGET: usize = 10_000_000;

pub const MAX_CLIQUE_R: usize = 6;
pub const MAX_CYCLE_R: usize = 8;
pub const MAX_PATTERN_VERTICES: usize = 8;
pub const MAX_PATTERN_EDGES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForbiddenFamily {
    /// No cyclic triangle.
    CyclicTriangle,
    /// No directed cycle of length r.
    DirectedCycle(usize),
    /// Every K_r transitive.
    NonTransitiveClique(usize),
    /// No strongly connected K_r.
    StronglyConnectedClique(usize),
    /// No copy of the oriented graph H (which must contain a directed cycle).
    OrientedSubgraph(Digraph),
}

impl ForbiddenFamily {
    pub fn validate(&self) -> Result<()> {
        let unsupported = |s: String| Err(Error::UnsupportedFamily(s));
        match self {
            ForbiddenFamily::CyclicTriangle => Ok(()),
            ForbiddenFamily::DirectedCycle(r) if !(3..=MAX_CYCLE_R).contains(r) => {
                unsupported(format!("cycle length {r} outside 3..={MAX_CYCLE_R}"))
            }
            ForbiddenFamily::NonTransitiveClique(r) | ForbiddenFamily::StronglyConnectedClique(r)
                if !(3..=MAX_CLIQUE_R).contains(r) =>
            {
                unsupported(format!("clique size {r} outside 3..={MAX_CLIQUE_R}"))
            }
            ForbiddenFamily::OrientedSubgraph(h) => {
                let (core, _) = strip_isolated(h);
                if core.underlying().is_err() {
                    return unsupported("H has a pair joined in both directions".into());
                }
                if !core.has_cycle() {
                    return unsupported("H must contain a directed cycle".into());
                }
                if core.n() > MAX_PATTERN_VERTICES || core.arcs().len() > MAX_PATTERN_EDGES {
                    return unsupported(format!(
                        "H has {} non-isolated vertices and {} arcs; limits are {} and {}",
                        core.n(),
                        core.arcs().len(),
                        MAX_PATTERN_VERTICES,
                        MAX_PATTERN_EDGES
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Pattern size used in the windowed danger surrogate and cutoff formulas.
    pub fn pattern_vertices(&self) -> usize {
        match self {
            ForbiddenFamily::CyclicTriangle => 3,
            ForbiddenFamily::DirectedCycle(r)
            | ForbiddenFamily::NonTransitiveClique(r)
            | ForbiddenFamily::StronglyConnectedClique(r) => *r,
            ForbiddenFamily::OrientedSubgraph(h) => strip_isolated(h).0.n(),
        }
    }

    /// Parses `c3`, `cycle:r`, `transitive:r`, `strong:r`, `oriented:<file>`
    /// or the inline form `oriented:@n:u>v,u>v,...` produced by `Display`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = || Error::UnsupportedFamily(spec.to_string());
        let fam = if spec == "c3" {
            ForbiddenFamily::CyclicTriangle
        } else if let Some(rest) = spec.strip_prefix("oriented:") {
            let h = if let Some(inline) = rest.strip_prefix('@') {
                parse_inline_digraph(inline).ok_or_else(bad)?
            } else {
                Digraph::parse(&std::fs::read_to_string(rest)?)?
            };
            ForbiddenFamily::OrientedSubgraph(h)
        } else {
            let (kind, r) = spec.split_once(':').ok_or_else(bad)?;
            let r: usize = r.parse().map_err(|_| bad())?;
            match kind {
                "cycle" => ForbiddenFamily::DirectedCycle(r),
                "transitive" => ForbiddenFamily::NonTransitiveClique(r),
                "strong" => ForbiddenFamily::StronglyConnectedClique(r),
                _ => return Err(bad()),
            }
        };
        fam.validate()?;
        Ok(fam)
    }
}

fn parse_inline_digraph(s: &str) -> Option<Digraph> {
    let (n, arcs) = s.split_once(':')?;
    let n = n.parse().ok()?;
    let mut list = Vec::new();
    for a in arcs.split(',').filter(|a| !a.is_empty()) {
        let (u, v) = a.split_once('>')?;
        list.push((u.parse().ok()?, v.parse().ok()?));
    }
    Digraph::from_arcs(n, list).ok()
}

impl fmt::Display for ForbiddenFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForbiddenFamily::CyclicTriangle => write!(f, "c3"),
            ForbiddenFamily::DirectedCycle(r) => write!(f, "cycle:{r}"),
            ForbiddenFamily::NonTransitiveClique(r) => write!(f, "transitive:{r}"),
            ForbiddenFamily::StronglyConnectedClique(r) => write!(f, "strong:{r}"),
            ForbiddenFamily::OrientedSubgraph(h) => {
                let arcs: Vec<String> = h.arcs().iter().map(|(u, v)| format!("{u}>{v}")).collect();
                write!(f, "oriented:@{}:{}", h.n(), arcs.join(","))
            }
        }
    }
}

impl FromStr for ForbiddenFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Drops isolated vertices; returns the core digraph and the kept labels.
pub(crate) fn strip_isolated(h: &Digraph) -> (Digraph, Vec<usize>) {
    let mut used = vec![false; h.n()];
    for &(u, v) in h.arcs() {
        used[u] = true;
        used[v] = true;
    }
    let keep: Vec<usize> = (0..h.n()).filter(|&v| used[v]).collect();
    (h.induced(&keep), keep)
}

/// Set of forbidden orientations of a template, as a lookup table over masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenSet {
    edge_count: usize,
    table: FixedBitSet,
    masks: Vec<u32>,
}

impl ForbiddenSet {
    fn from_predicate(edge_count: usize, mut pred: impl FnMut(u32) -> bool) -> Self {
        let total = 1usize << edge_count;
        let mut table = FixedBitSet::with_capacity(total);
        let mut masks = Vec::new();
        for mask in 0..total as u32 {
            if pred(mask) {
                table.insert(mask as usize);
                masks.push(mask);
            }
        }
        ForbiddenSet { edge_count, table, masks }
    }

    #[inline]
    pub fn contains(&self, mask: u32) -> bool {
        self.table.contains(mask as usize)
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of orientations of the template.
    pub fn universe(&self) -> usize {
        1 << self.edge_count
    }
}

/// Undirected pattern plus its forbidden orientations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub vertices: usize,
    /// Sorted pairs `(a, b)` with `a < b`.
    pub edges: Vec<(usize, usize)>,
    pub forbidden: ForbiddenSet,
}

impl Template {
    fn new(
        vertices: usize,
        mut edges: Vec<(usize, usize)>,
        pred: impl Fn(&LocalDigraph) -> bool,
    ) -> Result<Self> {
        edges.sort_unstable();
        let forbidden =
            ForbiddenSet::from_predicate(edges.len(), |mask| pred(&LocalDigraph::new(vertices, &edges, mask)));
        if forbidden.is_empty() {
            return Err(Error::UnsupportedFamily("no orientation of the template is forbidden".into()));
        }
        // every forbidden orientation must contain a directed cycle
        if let Some(&bad) = forbidden
            .masks()
            .iter()
            .find(|&&m| !LocalDigraph::new(vertices, &edges, m).has_cycle())
        {
            return Err(Error::UnsupportedFamily(format!(
                "forbidden local orientation {bad:#b} is acyclic"
            )));
        }
        Ok(Template { vertices, edges, forbidden })
    }

    /// Orientation mask in which every edge points from the lower endpoint.
    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.edges.len()) - 1) as u32
    }
}

fn complete_edges(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect()
}

fn cycle_edges(k: usize) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = (0..k - 1).map(|i| (i, i + 1)).collect();
    e.push((0, k - 1));
    e
}

fn cyclic_triangle_template() -> Result<Template> {
    Template::new(3, complete_edges(3), |d| d.has_cyclic_triangle())
}

/// Template and forbidden orientations for the family's main pattern.
pub fn family_template(family: &ForbiddenFamily) -> Result<Template> {
    family.validate()?;
    match family {
        ForbiddenFamily::CyclicTriangle => cyclic_triangle_template(),
        ForbiddenFamily::DirectedCycle(r) => {
            Template::new(*r, cycle_edges(*r), |d| d.is_strongly_connected())
        }
        ForbiddenFamily::NonTransitiveClique(r) => {
            Template::new(*r, complete_edges(*r), |d| d.has_cyclic_triangle())
        }
        ForbiddenFamily::StronglyConnectedClique(r) => {
            Template::new(*r, complete_edges(*r), |d| d.is_strongly_connected())
        }
        ForbiddenFamily::OrientedSubgraph(h) => {
            let (core, _) = strip_isolated(h);
            let edges: Vec<_> = core.arcs().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
            let pattern = LocalDigraph::from_digraph(&core);
            Template::new(core.n(), edges, |d| d.contains(&pattern))
        }
    }
}

/// Forbidden orientations of the family's template edge set.
pub fn local_forbidden_orientations(family: &ForbiddenFamily) -> Result<ForbiddenSet> {
    Ok(family_template(family)?.forbidden)
}

/// Tiny digraph on at most 8 vertices, adjacency as bit rows.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LocalDigraph {
    k: usize,
    out: [u8; 8],
}

impl LocalDigraph {
    pub(crate) fn new(k: usize, edges: &[(usize, usize)], mask: u32) -> Self {
        let mut out = [0u8; 8];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                out[a] |= 1 << b;
            } else {
                out[b] |= 1 << a;
            }
        }
        LocalDigraph { k, out }
    }

    fn from_digraph(d: &Digraph) -> Self {
        let mut out = [0u8; 8];
        for &(u, v) in d.arcs() {
            out[u] |= 1 << v;
        }
        LocalDigraph { k: d.n(), out }
    }

    fn arc(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    fn reach(&self, start: usize, forward: bool) -> u8 {
        let mut seen = 1u8 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let next = if forward {
                self.out[v]
            } else {
                (0..self.k).filter(|&u| self.arc(u, v)).fold(0u8, |m, u| m | 1 << u)
            };
            let new = next & !seen;
            seen |= new;
            frontier |= new;
        }
        seen
    }

    pub(crate) fn is_strongly_connected(&self) -> bool {
        let all = ((1u16 << self.k) - 1) as u8;
        self.k > 0 && self.reach(0, true) == all && self.reach(0, false) == all
    }

    pub(crate) fn has_cycle(&self) -> bool {
        (0..self.k).any(|v| {
            let mut succ = self.out[v];
            let mut found = false;
            while succ != 0 && !found {
                let w = succ.trailing_zeros() as usize;
                succ &= succ - 1;
                found = self.reach(w, true) >> v & 1 == 1;
            }
            found
        })
    }

    pub(crate) fn has_cyclic_triangle(&self) -> bool {
        (0..self.k).any(|a| {
            (0..self.k).any(|b| self.arc(a, b) && (0..self.k).any(|c| self.arc(b, c) && self.arc(c, a)))
        })
    }

    /// Non-induced embedding of `h` by backtracking.
    pub(crate) fn contains(&self, h: &LocalDigraph) -> bool {
        fn extend(host: &LocalDigraph, h: &LocalDigraph, map: &mut [usize; 8], used: u8, i: usize) -> bool {
            if i == h.k {
                return true;
            }
            for x in 0..host.k {
                if used >> x & 1 == 1 {
                    continue;
                }
                let ok = (0..i).all(|j| {
                    (!h.arc(i, j) || host.arc(x, map[j])) && (!h.arc(j, i) || host.arc(map[j], x))
                });
                if ok {
                    map[i] = x;
                    if extend(host, h, map, used | 1 << x, i + 1) {
                        return true;
                    }
                }
            }
            false
        }
        h.k <= self.k && extend(self, h, &mut [0; 8], 0, 0)
    }
}

/// One copy of a template in the host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintCopy {
    /// Host image of each template vertex.
    pub vertices: Vec<usize>,
    /// Host edge id of each template edge.
    pub edges: Vec<usize>,
    /// Bit `i` set when template edge `i` runs from the higher host label,
    /// i.e. local bit = host forward XOR flip.
    pub flips: u32,
    /// Index into [`ConstraintSet::templates`].
    pub template: usize,
    pub max_vertex: usize,
}

impl ConstraintCopy {
    fn new(g: &Graph, tmpl: &Template, template: usize, vertices: Vec<usize>) -> Self {
        let mut edges = Vec::with_capacity(tmpl.edges.len());
        let mut flips = 0u32;
        for (i, &(a, b)) in tmpl.edges.iter().enumerate() {
            let (x, y) = (vertices[a], vertices[b]);
            edges.push(g.edge_id(x, y).expect("copy edges exist in host"));
            if x > y {
                flips |= 1 << i;
            }
        }
        let max_vertex = vertices.iter().copied().max().unwrap_or(0);
        ConstraintCopy { vertices, edges, flips, template, max_vertex }
    }

    /// Local mask of set edges and the values on them.
    #[inline]
    pub fn local_state(&self, states: &[EdgeState]) -> (u32, u32) {
        let mut set = 0u32;
        let mut val = 0u32;
        for (i, &e) in self.edges.iter().enumerate() {
            match states[e] {
                EdgeState::Unset => {}
                EdgeState::Forward => {
                    set |= 1 << i;
                    val |= (!self.flips >> i & 1) << i;
                }
                EdgeState::Backward => {
                    set |= 1 << i;
                    val |= (self.flips >> i & 1) << i;
                }
            }
        }
        (set, val & set)
    }

    /// Host direction of template edge `i` under local value `bit`.
    #[inline]
    pub fn host_state(&self, i: usize, bit: bool) -> EdgeState {
        EdgeState::from_forward(bit ^ (self.flips >> i & 1 == 1))
    }

    pub fn contains_edge(&self, e: usize) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }
}

/// All copies of a family's pattern in a host graph.
#[derive(Clone, Debug)]
pub struct ConstraintSet {
    graph: Graph,
    family: ForbiddenFamily,
    templates: Vec<Template>,
    copies: Vec<ConstraintCopy>,
    incidence: Vec<Vec<u32>>,
}

pub fn compile_constraints(g: &Graph, family: &ForbiddenFamily) -> Result<ConstraintSet> {
    compile_constraints_with_budget(g, family, DEFAULT_COPY_BUDGET)
}

pub fn compile_constraints_with_budget(
    g: &Graph,
    family: &ForbiddenFamily,
    budget: usize,
) -> Result<ConstraintSet> {
    let main = family_template(family)?;
    let counter = AtomicUsize::new(0);
    let tuples = match family {
        ForbiddenFamily::CyclicTriangle => cliques(g, 3, &counter, budget),
        ForbiddenFamily::NonTransitiveClique(r) | ForbiddenFamily::StronglyConnectedClique(r) => {
            cliques(g, *r, &counter, budget)
        }
        ForbiddenFamily::DirectedCycle(r) => cycles(g, *r, &counter, budget),
        ForbiddenFamily::OrientedSubgraph(_) => embeddings(g, &main, &counter, budget),
    };
    if counter.load(Ordering::Relaxed) > budget {
        return Err(Error::CopyBudgetExceeded { limit: budget });
    }
    let mut copies: Vec<ConstraintCopy> =
        tuples.into_iter().map(|vs| ConstraintCopy::new(g, &main, 0, vs)).collect();
    let mut templates = vec![main];

    if let ForbiddenFamily::NonTransitiveClique(r) = family {
        if *r > 3 {
            // every triangle inside a K_r copy must itself be transitive
            let mut tris = BTreeSet::new();
            for c in &copies {
                let vs = &c.vertices;
                for a in 0..vs.len() {
                    for b in a + 1..vs.len() {
                        for d in b + 1..vs.len() {
                            tris.insert([vs[a], vs[b], vs[d]]);
                        }
                    }
                }
            }
            if copies.len() + tris.len() > budget {
                return Err(Error::CopyBudgetExceeded { limit: budget });
            }
            let tri = cyclic_triangle_template()?;
            copies.extend(tris.into_iter().map(|t| ConstraintCopy::new(g, &tri, 1, t.to_vec())));
            templates.push(tri);
        }
    }

    let mut incidence = vec![Vec::new(); g.m()];
    for (i, c) in copies.iter().enumerate() {
        for &e in &c.edges {
            incidence[e].push(i as u32);
        }
    }
    Ok(ConstraintSet { graph: g.clone(), family: family.clone(), templates, copies, incidence })
}

fn bump(counter: &AtomicUsize, budget: usize) -> bool {
    counter.fetch_add(1, Ordering::Relaxed) < budget
}

/// Increasing vertex tuples spanning a clique.
fn cliques(g: &Graph, r: usize, counter: &AtomicUsize, budget: usize) -> Vec<Vec<usize>> {
    fn grow(
        g: &Graph,
        r: usize,
        cur: &mut Vec<usize>,
        cands: &[usize],
        out: &mut Vec<Vec<usize>>,
        counter: &AtomicUsize,
        budget: usize,
    ) -> bool {
        if cur.len() == r {
            out.push(cur.clone());
            return bump(counter, budget);
        }
        for (i, &v) in cands.iter().enumerate() {
            if cands.len() - i < r - cur.len() {
                break;
            }
            let next: Vec<usize> = cands[i + 1..].iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            cur.push(v);
            let go_on = grow(g, r, cur, &next, out, counter, budget);
            cur.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let mut out = Vec::new();
            let higher: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| w > v).collect();
            if counter.load(Ordering::Relaxed) <= budget {
                grow(g, r, &mut vec![v], &higher, &mut out, counter, budget);
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Simple r-cycles as sequences `c0 c1 ... c_{r-1}` with `c0` minimal and
/// `c1 < c_{r-1}`, so each cycle appears once.
fn cycles(g: &Graph, r: usize, counter: &AtomicUsize, budget: usize) -> Vec<Vec<usize>> {
    fn walk(
        g: &Graph,
        r: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        counter: &AtomicUsize,
        budget: usize,
    ) -> bool {
        let start = path[0];
        let last = *path.last().unwrap();
        if path.len() == r {
            if g.has_edge(last, start) && path[1] < last {
                out.push(path.clone());
                return bump(counter, budget);
            }
            return true;
        }
        for &w in g.neighbors(last) {
            if w > start && !path.contains(&w) {
                path.push(w);
                let go_on = walk(g, r, path, out, counter, budget);
                path.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let mut out = Vec::new();
            if counter.load(Ordering::Relaxed) <= budget {
                walk(g, r, &mut vec![v], &mut out, counter, budget);
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Subgraph copies of an arbitrary template, deduplicated by edge set.
fn embeddings(g: &Graph, tmpl: &Template, counter: &AtomicUsize, budget: usize) -> Vec<Vec<usize>> {
    let k = tmpl.vertices;
    let mut tadj = vec![Vec::new(); k];
    for &(a, b) in &tmpl.edges {
        tadj[a].push(b);
        tadj[b].push(a);
    }
    // placement order: BFS so each vertex after the first of its component
    // has a placed neighbour
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    for s in 0..k {
        if placed[s] {
            continue;
        }
        placed[s] = true;
        order.push(s);
        let mut i = order.len() - 1;
        while i < order.len() {
            let v = order[i];
            for &w in &tadj[v] {
                if !placed[w] {
                    placed[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    let pos: Vec<usize> = {
        let mut p = vec![0; k];
        for (i, &v) in order.iter().enumerate() {
            p[v] = i;
        }
        p
    };

    #[allow(clippy::too_many_arguments)]
    fn place(
        g: &Graph,
        tadj: &[Vec<usize>],
        order: &[usize],
        pos: &[usize],
        depth: usize,
        map: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        counter: &AtomicUsize,
        budget: usize,
    ) -> bool {
        if depth == order.len() {
            out.push(map.clone());
            return bump(counter, budget);
        }
        let t = order[depth];
        let anchor = tadj[t].iter().copied().find(|&s| pos[s] < depth);
        let cands: Vec<usize> = match anchor {
            Some(s) => g.neighbors(map[s]).to_vec(),
            None => (0..g.n()).collect(),
        };
        for x in cands {
            if order[..depth].iter().any(|&s| map[s] == x) {
                continue;
            }
            if tadj[t].iter().all(|&s| pos[s] >= depth || g.has_edge(map[s], x)) {
                map[t] = x;
                if !place(g, tadj, order, pos, depth + 1, map, out, counter, budget) {
                    return false;
                }
            }
        }
        true
    }

    let first = order[0];
    let raw: Vec<Vec<usize>> = (0..g.n())
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::new();
            let mut map = vec![usize::MAX; k];
            map[first] = x;
            if counter.load(Ordering::Relaxed) <= budget {
                place(g, &tadj, &order, &pos, 1, &mut map, &mut out, counter, budget);
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut seen = HashSet::new();
    let mut result = Vec::new();
    for vs in raw {
        let mut key: Vec<usize> =
            tmpl.edges.iter().map(|&(a, b)| g.edge_id(vs[a], vs[b]).unwrap()).collect();
        key.sort_unstable();
        if seen.insert(key) {
            result.push(vs);
        }
    }
    counter.store(result.len(), Ordering::Relaxed);
    result
}

impl ConstraintSet {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn family(&self) -> &ForbiddenFamily {
        &self.family
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn copies(&self) -> &[ConstraintCopy] {
        &self.copies
    }

    pub fn copy(&self, i: usize) -> &ConstraintCopy {
        &self.copies[i]
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    /// Copies containing host edge `e`.
    pub fn incident(&self, e: usize) -> &[u32] {
        &self.incidence[e]
    }

    #[inline]
    pub fn is_forbidden(&self, copy: &ConstraintCopy, local: u32) -> bool {
        self.templates[copy.template].forbidden.contains(local)
    }

    /// Edges in no copy; each contributes an independent factor 2.
    pub fn free_edges(&self) -> Vec<usize> {
        (0..self.graph.m()).filter(|&e| self.incidence[e].is_empty()).collect()
    }

    /// First copy realising a forbidden orientation under a total orientation.
    pub fn first_violation(&self, states: &[EdgeState]) -> Option<usize> {
        self.copies.iter().position(|c| {
            let (set, val) = c.local_state(states);
            set == self.templates[c.template].full_mask() && self.is_forbidden(c, val)
        })
    }

    /// Copies as `(sorted host edges, forbidden host patterns)`, where a
    /// pattern has bit `j` set when the `j`-th sorted edge is host-forward.
    /// Independent of enumeration order and template labelling.
    pub fn canonical(&self) -> BTreeSet<(Vec<usize>, BTreeSet<u32>)> {
        self.copies
            .iter()
            .map(|c| {
                let mut sorted: Vec<(usize, usize)> =
                    c.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
                sorted.sort_unstable();
                let forb = self.templates[c.template]
                    .forbidden
                    .masks()
                    .iter()
                    .map(|&local| {
                        sorted.iter().enumerate().fold(0u32, |acc, (j, &(_, i))| {
                            let fwd = (local >> i & 1) ^ (c.flips >> i & 1);
                            acc | fwd << j
                        })
                    })
                    .collect();
                (sorted.into_iter().map(|(e, _)| e).collect(), forb)
            })
            .collect()
    }
}
