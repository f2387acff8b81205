//! Ordered witnesses for lower bounds.
//!
//! Fix a vertex order and a cutoff `a`. Edges whose endpoints' ranks differ
//! by at least `a` (long edges) point forward. A copy is dangerous when some
//! orientation of its short edges, with its long edges forward, is
//! forbidden. Short edges in no dangerous copy can be oriented arbitrarily,
//! so `2^|free|` orientations avoid the family.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Digraph, Graph, VertexOrder};
use crate::orientation::EdgeState;
use crate::pattern::{
    compile_constraints_with_budget, strip_isolated, ConstraintCopy, ConstraintSet, ForbiddenFamily,
    DEFAULT_COPY_BUDGET,
};

/// `ln n`, the default slowly diverging factor.
pub fn default_omega(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

/// Ceiling that ignores relative float noise below `1e-12`.
pub(crate) fn ceil_guarded(x: f64) -> f64 {
    (x * (1.0 - 1e-12)).ceil()
}

fn clamp_cutoff(x: f64, n: usize) -> usize {
    let hi = n.saturating_sub(1).max(1) as f64;
    ceil_guarded(x).clamp(1.0, hi) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cutoff {
    pub a: usize,
    /// The unrounded formula value.
    pub formula: f64,
    /// Whether the density condition under which the construction is
    /// stated holds at these finite values.
    pub regime_holds: bool,
    pub regime: String,
}

/// Per-family cutoff. The transitive family uses its own formula and
/// ignores `omega`.
pub fn recommended_cutoff(family: &ForbiddenFamily, n: usize, p: f64, omega: f64) -> Result<Cutoff> {
    family.validate()?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let nf = n as f64;
    let (formula, lo, hi, regime) = match family {
        ForbiddenFamily::CyclicTriangle => {
            (2.0 * p.powi(-2) / omega, nf.powf(-0.5), 1.0, "p >= n^(-1/2)".to_string())
        }
        ForbiddenFamily::DirectedCycle(r) => {
            let r = *r as f64;
            (
                p.powf(-(r - 1.0) / (r - 2.0)) / omega,
                nf.powf(-(r - 2.0) / (r - 1.0)),
                1.0,
                format!("p >= n^(-{}/{})", r - 2.0, r - 1.0),
            )
        }
        ForbiddenFamily::StronglyConnectedClique(r) => {
            let r = *r as f64;
            (p.powf(-(r + 1.0) / 2.0) / omega, nf.powf(-2.0 / (r + 1.0)), 1.0, format!("p >= n^(-2/{})", r + 1.0))
        }
        ForbiddenFamily::NonTransitiveClique(r) => {
            let rf = *r as f64;
            let pairs = (r * (r - 1) / 2) as f64;
            (
                nf.powf(3.0 - rf) * p.powf(1.0 - pairs) / (4.0 * rf * rf),
                nf.powf(-2.0 / (rf + 1.0)),
                nf.powf(-2.0 / (rf + 2.0)),
                format!("n^(-2/{}) <= p <= n^(-2/{})", rf + 1.0, rf + 2.0),
            )
        }
        ForbiddenFamily::OrientedSubgraph(h) => {
            let g = general_lower_exponent(h, n, p, omega)?;
            return Ok(Cutoff {
                a: g.a,
                formula: g.a_formula,
                regime_holds: g.m2_condition,
                regime: format!("p >= n^(-1/{})", g.m2),
            });
        }
    };
    Ok(Cutoff { a: clamp_cutoff(formula, n), formula, regime_holds: p >= lo && p <= hi, regime })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedWitness {
    pub order: VertexOrder,
    pub a: usize,
    /// Free edge ids, sorted. All are a-short.
    pub free: Vec<usize>,
    pub family: ForbiddenFamily,
    /// Copies with a forbidden short-edge completion.
    pub dangerous_exact: usize,
    /// Copies flagged by the coarser counting rule: two short edges at a
    /// common vertex (triangle and transitive families) or rank span at
    /// most `(r-1)(a-1)` (the others).
    pub dangerous_surrogate: usize,
}

impl OrderedWitness {
    pub fn log2_lower(&self) -> f64 {
        self.free.len() as f64
    }

    /// Long edges forward, free edges as given by `bits` (bit `i` for the
    /// `i`-th free edge), every other short edge forward.
    pub fn orientation(&self, g: &Graph, bits: u64) -> Vec<EdgeState> {
        let mut states: Vec<EdgeState> =
            g.edges().iter().map(|&(u, v)| EdgeState::from_forward(self.order.is_forward(u, v))).collect();
        for (i, &e) in self.free.iter().enumerate() {
            if bits >> i & 1 == 0 {
                states[e] = states[e].flipped();
            }
        }
        states
    }

    pub fn to_json(&self, g: &Graph) -> WitnessJson {
        WitnessJson {
            order: self.order.permutation().to_vec(),
            a: self.a,
            free_edges: self.free.iter().map(|&e| g.edge(e)).collect(),
            family: self.family.to_string(),
            claimed_log2_lower: self.log2_lower(),
            dangerous_exact: Some(self.dangerous_exact),
            dangerous_surrogate: Some(self.dangerous_surrogate),
        }
    }

    pub fn from_json(g: &Graph, w: &WitnessJson) -> Result<Self> {
        let order = VertexOrder::from_permutation(w.order.clone())?;
        if order.len() != g.n() {
            return Err(Error::OrientationMismatch(format!(
                "order has {} vertices, graph has {}",
                order.len(),
                g.n()
            )));
        }
        let mut free = w
            .free_edges
            .iter()
            .map(|&(u, v)| {
                g.edge_id(u, v).ok_or_else(|| {
                    Error::OrientationMismatch(format!("free pair {u}-{v} is not an edge of the graph"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        free.sort_unstable();
        free.dedup();
        Ok(OrderedWitness {
            order,
            a: w.a,
            free,
            family: ForbiddenFamily::parse(&w.family)?,
            dangerous_exact: w.dangerous_exact.unwrap_or(0),
            dangerous_surrogate: w.dangerous_surrogate.unwrap_or(0),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub order: Vec<usize>,
    pub a: usize,
    pub free_edges: Vec<(usize, usize)>,
    pub family: String,
    pub claimed_log2_lower: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dangerous_exact: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dangerous_surrogate: Option<usize>,
}

/// Local bits of a copy under "everything forward in the order", and the
/// mask of its short template edges.
fn forward_view(g: &Graph, copy: &ConstraintCopy, order: &VertexOrder, a: usize) -> (u32, u32) {
    let mut val = 0u32;
    let mut short = 0u32;
    for (i, &e) in copy.edges.iter().enumerate() {
        let (u, v) = g.edge(e);
        let host_forward = order.is_forward(u, v);
        val |= ((host_forward as u32) ^ (copy.flips >> i & 1)) << i;
        if order.length(u, v) < a {
            short |= 1 << i;
        }
    }
    (val, short)
}

/// Whether some assignment of the bits in `vary` turns `val` forbidden.
fn some_forbidden(cs: &ConstraintSet, copy: &ConstraintCopy, val: u32, vary: u32) -> bool {
    let forb = &cs.templates()[copy.template].forbidden;
    if (1usize << vary.count_ones()) <= forb.len() {
        let fixed = val & !vary;
        let mut c = 0u32;
        loop {
            if forb.contains(fixed | c) {
                return true;
            }
            if c == vary {
                return false;
            }
            c = c.wrapping_sub(vary) & vary;
        }
    } else {
        forb.masks().iter().any(|&m| m & !vary == val & !vary)
    }
}

pub fn build_witness(g: &Graph, order: &VertexOrder, a: usize, family: &ForbiddenFamily) -> Result<OrderedWitness> {
    let cs = compile_constraints_with_budget(g, family, DEFAULT_COPY_BUDGET)?;
    build_witness_from(&cs, order, a)
}

pub fn build_witness_from(cs: &ConstraintSet, order: &VertexOrder, a: usize) -> Result<OrderedWitness> {
    let g = cs.graph();
    if order.len() != g.n() {
        return Err(Error::OrientationMismatch(format!("order has {} vertices, graph has {}", order.len(), g.n())));
    }
    if a == 0 {
        return Err(Error::InvalidParameter("cutoff a must be positive".into()));
    }
    let family = cs.family();
    let window = (family.pattern_vertices() - 1) * (a - 1);
    let flags: Vec<(bool, bool)> = cs
        .copies()
        .par_iter()
        .map(|copy| {
            let (val, short) = forward_view(g, copy, order, a);
            let exact = short != 0 && some_forbidden(cs, copy, val, short);
            let surrogate = match family {
                ForbiddenFamily::CyclicTriangle | ForbiddenFamily::NonTransitiveClique(_) => {
                    copy.template == 0 && two_short_at_a_vertex(g, copy, short)
                }
                _ => {
                    let ranks = copy.vertices.iter().map(|&v| order.rank(v));
                    let (lo, hi) = ranks.fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r), hi.max(r)));
                    hi - lo <= window
                }
            };
            (exact, surrogate)
        })
        .collect();
    let mut blocked = vec![false; g.m()];
    for (copy, &(exact, _)) in cs.copies().iter().zip(&flags) {
        if exact {
            for &e in &copy.edges {
                blocked[e] = true;
            }
        }
    }
    let free = (0..g.m())
        .filter(|&e| {
            let (u, v) = g.edge(e);
            order.length(u, v) < a && !blocked[e]
        })
        .collect();
    Ok(OrderedWitness {
        order: order.clone(),
        a,
        free,
        family: family.clone(),
        dangerous_exact: flags.iter().filter(|f| f.0).count(),
        dangerous_surrogate: flags.iter().filter(|f| f.1).count(),
    })
}

fn two_short_at_a_vertex(g: &Graph, copy: &ConstraintCopy, short: u32) -> bool {
    let mut seen: HashMap<usize, u32> = HashMap::new();
    for (i, &e) in copy.edges.iter().enumerate() {
        if short >> i & 1 == 1 {
            let (u, v) = g.edge(e);
            for x in [u, v] {
                let c = seen.entry(x).or_default();
                *c += 1;
                if *c >= 2 {
                    return true;
                }
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WitnessCheck {
    Valid,
    /// A free edge that is a-long.
    LongFreeEdge { edge: (usize, usize) },
    /// A copy and an orientation of it (as arcs) that the witness allows but
    /// the family forbids.
    Counterexample { copy: Vec<usize>, arcs: Vec<(usize, usize)> },
    /// The stored bound differs from the number of distinct free edges.
    ClaimMismatch { claimed: f64, actual: f64 },
}

impl WitnessCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, WitnessCheck::Valid)
    }
}

pub fn verify_witness(g: &Graph, w: &OrderedWitness) -> Result<WitnessCheck> {
    let cs = compile_constraints_with_budget(g, &w.family, DEFAULT_COPY_BUDGET)?;
    verify_witness_with(&cs, w)
}

/// Rebuilds a stored witness, checks its claimed bound, then verifies it.
pub fn verify_witness_json(g: &Graph, wj: &WitnessJson) -> Result<WitnessCheck> {
    let w = OrderedWitness::from_json(g, wj)?;
    if wj.claimed_log2_lower != w.log2_lower() {
        return Ok(WitnessCheck::ClaimMismatch { claimed: wj.claimed_log2_lower, actual: w.log2_lower() });
    }
    verify_witness(g, &w)
}

/// Checks the all-forward base orientation, then every copy touching a free
/// edge under every assignment of its free edges.
pub fn verify_witness_with(cs: &ConstraintSet, w: &OrderedWitness) -> Result<WitnessCheck> {
    let g = cs.graph();
    if w.order.len() != g.n() {
        return Err(Error::OrientationMismatch(format!("order has {} vertices, graph has {}", w.order.len(), g.n())));
    }
    let mut is_free = vec![false; g.m()];
    for &e in &w.free {
        let (u, v) = g.edge(e);
        if w.order.length(u, v) >= w.a {
            return Ok(WitnessCheck::LongFreeEdge { edge: (u, v) });
        }
        is_free[e] = true;
    }
    let bad = cs.copies().par_iter().find_map_first(|copy| {
        let (val, _) = forward_view(g, copy, &w.order, w.a);
        let vary = copy.edges.iter().enumerate().fold(0u32, |m, (i, &e)| m | (is_free[e] as u32) << i);
        let forb = &cs.templates()[copy.template].forbidden;
        let fixed = val & !vary;
        let mut c = 0u32;
        loop {
            if forb.contains(fixed | c) {
                return Some(counterexample(g, copy, fixed | c));
            }
            if c == vary {
                return None;
            }
            c = c.wrapping_sub(vary) & vary;
        }
    });
    Ok(bad.unwrap_or(WitnessCheck::Valid))
}

fn counterexample(g: &Graph, copy: &ConstraintCopy, local: u32) -> WitnessCheck {
    let arcs = copy
        .edges
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let (u, v) = g.edge(e);
            if copy.host_state(i, local >> i & 1 == 1) == EdgeState::Forward {
                (u, v)
            } else {
                (v, u)
            }
        })
        .collect();
    WitnessCheck::Counterexample { copy: copy.vertices.clone(), arcs }
}

/// The maximising sub-digraph and the resulting cutoff and exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralLower {
    pub best_vertices: Vec<usize>,
    pub best_arcs: Vec<(usize, usize)>,
    pub e: usize,
    pub v: usize,
    pub s: usize,
    /// `(pn/omega) * (p^(e-1) n^(s-1))^(-1/(v-s-1))`.
    pub exponent: f64,
    pub a_formula: f64,
    pub a: usize,
    pub m2: f64,
    /// `p >= n^(-1/m2)`.
    pub m2_condition: bool,
}

/// Natural log of one term of the maximum.
pub fn general_lower_log_term(e: usize, v: usize, s: usize, n: f64, p: f64, omega: f64) -> f64 {
    let inner = (e as f64 - 1.0) * p.ln() + (s as f64 - 1.0) * n.ln();
    (p * n / omega).ln() - inner / (v as f64 - s as f64 - 1.0)
}

pub fn general_lower_term(e: usize, v: usize, s: usize, n: f64, p: f64, omega: f64) -> f64 {
    general_lower_log_term(e, v, s, n, p, omega).exp()
}

/// Maximises over all sub-digraphs `F` of `h` (arc subsets with their
/// endpoints) having at least two more vertices than strong components.
pub fn general_lower_exponent(h: &Digraph, n: usize, p: f64, omega: f64) -> Result<GeneralLower> {
    ForbiddenFamily::OrientedSubgraph(h.clone()).validate()?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let (core, labels) = strip_isolated(h);
    let arcs = core.arcs();
    let nf = n as f64;
    let mut best: Option<(f64, u32, usize, usize, usize)> = None;
    for mask in 1u32..1 << arcs.len() {
        let (e, v, s) = sub_digraph_stats(core.n(), arcs, mask);
        if v < s + 2 {
            continue;
        }
        let t = general_lower_log_term(e, v, s, nf, p, omega);
        if best.map_or(true, |b| t > b.0) {
            best = Some((t, mask, e, v, s));
        }
    }
    let (log_t, mask, e, v, s) = best.expect("a digraph with a cycle has a qualifying sub-digraph");
    let chosen: Vec<(usize, usize)> = arcs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &(x, y))| (labels[x], labels[y]))
        .collect();
    let mut verts: Vec<usize> = chosen.iter().flat_map(|&(x, y)| [x, y]).collect();
    verts.sort_unstable();
    verts.dedup();
    let exponent = log_t.exp();
    let a_formula = exponent / (p * nf);
    let m2 = two_density(&core);
    Ok(GeneralLower {
        best_vertices: verts,
        best_arcs: chosen,
        e,
        v,
        s,
        exponent,
        a_formula,
        a: clamp_cutoff(a_formula, n),
        m2,
        m2_condition: p >= nf.powf(-1.0 / m2),
    })
}

/// (arcs, vertices, strong components) of the arc subset `mask`.
fn sub_digraph_stats(k: usize, arcs: &[(usize, usize)], mask: u32) -> (usize, usize, usize) {
    let mut out = [0u8; 8];
    let mut inn = [0u8; 8];
    let mut verts = 0u8;
    for (i, &(x, y)) in arcs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            out[x] |= 1 << y;
            inn[y] |= 1 << x;
            verts |= 1 << x | 1 << y;
        }
    }
    let reach = |start: usize, rows: &[u8; 8]| {
        let mut seen = 1u8 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = rows[v] & !seen;
            seen |= new;
            frontier |= new;
        }
        seen
    };
    let mut left = verts;
    let mut s = 0;
    while left != 0 {
        let v = left.trailing_zeros() as usize;
        left &= !(reach(v, &out) & reach(v, &inn));
        s += 1;
    }
    debug_assert!(k <= 8);
    (mask.count_ones() as usize, verts.count_ones() as usize, s)
}

/// `max (e(F)-1)/(v(F)-2)` over subgraphs with at least three vertices.
/// The maximum is attained on induced subgraphs.
fn two_density(h: &Digraph) -> f64 {
    let g = h.underlying().expect("validated");
    let k = g.n();
    let mut best = f64::NEG_INFINITY;
    for set in 0u32..1 << k {
        let v = set.count_ones() as usize;
        if v < 3 {
            continue;
        }
        let e = g.edges().iter().filter(|&&(x, y)| set >> x & 1 == 1 && set >> y & 1 == 1).count();
        best = best.max((e as f64 - 1.0) / (v as f64 - 2.0));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::count_extensions_with_budget;
    use crate::orientation::PartialOrientation;
    use crate::pattern::compile_constraints;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn strong_tournament(r: usize) -> Digraph {
        // transitive tournament with the Hamiltonian path closed backwards
        let mut arcs: Vec<(usize, usize)> =
            (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).filter(|&(i, j)| (i, j) != (0, r - 1)).collect();
        arcs.push((r - 1, 0));
        let d = Digraph::from_arcs(r, arcs).unwrap();
        assert_eq!(d.strongly_connected_components().len(), 1);
        d
    }

    #[test]
    fn stored_claim_must_match_free_edges() {
        let g = Graph::cycle(6);
        let w = build_witness(&g, &VertexOrder::identity(6), 2, &ForbiddenFamily::CyclicTriangle).unwrap();
        assert!(!w.free.is_empty());
        let mut wj = w.to_json(&g);
        assert!(verify_witness_json(&g, &wj).unwrap().is_valid());
        wj.claimed_log2_lower += 1.0;
        assert!(matches!(verify_witness_json(&g, &wj).unwrap(), WitnessCheck::ClaimMismatch { .. }));
        wj.claimed_log2_lower -= 1.0;
        wj.free_edges.push(wj.free_edges[0]);
        wj.claimed_log2_lower += 1.0;
        assert!(matches!(verify_witness_json(&g, &wj).unwrap(), WitnessCheck::ClaimMismatch { .. }));
    }

    #[test]
    fn cutoff_examples() {
        let c = recommended_cutoff(&ForbiddenFamily::CyclicTriangle, 1000, 0.2, 10.0).unwrap();
        assert_eq!(c.a, 5);
        assert!(c.regime_holds);
        let s = recommended_cutoff(&ForbiddenFamily::StronglyConnectedClique(3), 1000, 0.25, 8.0).unwrap();
        assert_eq!(s.a, 2);
        // r = 3 cycles: p^-2/omega, the triangle formula at half the omega
        for &(n, p, w) in &[(1000, 0.2, 10.0), (500, 0.05, 3.0), (90, 0.7, 1.5)] {
            let t = recommended_cutoff(&ForbiddenFamily::CyclicTriangle, n, p, w).unwrap();
            let cy = recommended_cutoff(&ForbiddenFamily::DirectedCycle(3), n, p, w / 2.0).unwrap();
            assert!((t.formula - cy.formula).abs() <= 1e-12 * t.formula);
            assert_eq!(t.a, cy.a);
        }
        let low = recommended_cutoff(&ForbiddenFamily::CyclicTriangle, 10_000, 0.001, 2.0).unwrap();
        assert!(!low.regime_holds);
        assert_eq!(low.a, 9999);
        assert!(recommended_cutoff(&ForbiddenFamily::CyclicTriangle, 10, 0.0, 1.0).is_err());
    }

    #[test]
    fn transitive_cutoff_ignores_omega() {
        let f = ForbiddenFamily::NonTransitiveClique(4);
        let a = recommended_cutoff(&f, 10_000, 0.05, 1.0).unwrap();
        let b = recommended_cutoff(&f, 10_000, 0.05, 100.0).unwrap();
        assert_eq!(a, b);
        let want = 10_000f64.powi(-1) * 0.05f64.powi(-5) / 64.0;
        assert!((a.formula - want).abs() < 1e-9 * want);
    }

    #[test]
    fn witness_examples() {
        let id = |n| VertexOrder::identity(n);
        let w = build_witness(&Graph::path(6), &id(6), 2, &ForbiddenFamily::CyclicTriangle).unwrap();
        assert_eq!(w.free.len(), 5);
        let k3 = Graph::complete(3);
        let w = build_witness(&k3, &id(3), 1, &ForbiddenFamily::CyclicTriangle).unwrap();
        assert!(w.free.is_empty());
        assert!(verify_witness(&k3, &w).unwrap().is_valid());
        let w = build_witness(&k3, &id(3), 3, &ForbiddenFamily::CyclicTriangle).unwrap();
        assert!(w.free.is_empty());
        assert_eq!(w.dangerous_exact, 1);
        assert_eq!(w.dangerous_surrogate, 1);
    }

    #[test]
    fn enlarged_free_set_is_caught() {
        let k4 = Graph::complete(4);
        let w = build_witness(&k4, &VertexOrder::identity(4), 3, &ForbiddenFamily::CyclicTriangle).unwrap();
        let mut bad = w.clone();
        bad.free = vec![k4.edge_id(0, 1).unwrap(), k4.edge_id(1, 2).unwrap()];
        assert!(matches!(verify_witness(&k4, &bad).unwrap(), WitnessCheck::Counterexample { .. }));
        let mut long = w;
        long.free = vec![k4.edge_id(0, 3).unwrap()];
        assert!(matches!(verify_witness(&k4, &long).unwrap(), WitnessCheck::LongFreeEdge { .. }));
    }

    fn random_family(r: &mut impl Rng) -> ForbiddenFamily {
        match r.gen_range(0..5) {
            0 => ForbiddenFamily::CyclicTriangle,
            1 => ForbiddenFamily::DirectedCycle(r.gen_range(3..=5)),
            2 => ForbiddenFamily::NonTransitiveClique(r.gen_range(3..=4)),
            3 => ForbiddenFamily::StronglyConnectedClique(r.gen_range(3..=4)),
            _ => ForbiddenFamily::OrientedSubgraph(strong_tournament(4)),
        }
    }

    fn random_order(n: usize, r: &mut impl Rng) -> VertexOrder {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(r);
        VertexOrder::from_permutation(perm).unwrap()
    }

    #[test]
    fn built_witnesses_verify_and_sit_below_exact() {
        let mut r = crate::rng::stream(61, &[]);
        for _ in 0..150 {
            let n = r.gen_range(3..=11);
            let g = Graph::gnp(n, r.gen_range(0.2..0.8), r.gen()).unwrap();
            let f = random_family(&mut r);
            let order = random_order(n, &mut r);
            let w = build_witness(&g, &order, r.gen_range(1..=n), &f).unwrap();
            assert!(verify_witness(&g, &w).unwrap().is_valid());
            let cs = compile_constraints(&g, &f).unwrap();
            let unset = PartialOrientation::unset(g.m());
            match count_extensions_with_budget(&unset, &cs, 50_000) {
                Ok(exact) => assert!(w.log2_lower() <= exact.log2() + 1e-12),
                Err(Error::Infeasible(_)) => {}
                Err(e) => panic!("{e}"),
            }
            if n <= 7 {
                for bits in 0u64..1 << w.free.len() {
                    assert!(cs.first_violation(&w.orientation(&g, bits)).is_none());
                }
            }
        }
    }

    #[test]
    fn danger_grows_with_the_cutoff() {
        let mut r = crate::rng::stream(62, &[]);
        for _ in 0..60 {
            let n = r.gen_range(4..=12);
            let g = Graph::gnp(n, 0.5, r.gen()).unwrap();
            let f = random_family(&mut r);
            let cs = compile_constraints(&g, &f).unwrap();
            let order = random_order(n, &mut r);
            let mut prev: Vec<bool> = vec![false; cs.len()];
            for a in 1..=n {
                let now: Vec<bool> = cs
                    .copies()
                    .iter()
                    .map(|c| {
                        let (val, short) = forward_view(&g, c, &order, a);
                        short != 0 && some_forbidden(&cs, c, val, short)
                    })
                    .collect();
                assert!(prev.iter().zip(&now).all(|(p, q)| !p || *q));
                prev = now;
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let g = Graph::gnp(9, 0.5, 3).unwrap();
        let w = build_witness(&g, &VertexOrder::identity(9), 3, &ForbiddenFamily::DirectedCycle(4)).unwrap();
        let text = serde_json::to_string(&w.to_json(&g)).unwrap();
        let back: WitnessJson = serde_json::from_str(&text).unwrap();
        assert_eq!(OrderedWitness::from_json(&g, &back).unwrap(), w);
    }

    fn rel_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * b.abs()
    }

    #[test]
    fn general_exponent_specialisations() {
        let (n, p, w) = (1e6, 0.3, 5.0);
        let g = general_lower_exponent(&Digraph::directed_cycle(3), 1_000_000, p, w).unwrap();
        assert!(rel_close(g.exponent, n / (w * p)));
        assert_eq!(g.best_vertices, vec![0, 1, 2]);
        for r in 4..=5 {
            let g = general_lower_exponent(&Digraph::directed_cycle(r), 1_000_000, p, w).unwrap();
            assert!(rel_close(g.exponent, n * p.powf(-1.0 / (r as f64 - 2.0)) / w));
            assert_eq!(g.e, r);
        }
        for r in 3..=6 {
            let pairs = r * (r - 1) / 2;
            let want = n * p.powf(-(r as f64 - 1.0) / 2.0) / w;
            assert!(rel_close(general_lower_term(pairs, r, 1, n, p, w), want));
        }
    }

    #[test]
    fn two_density_of_small_patterns() {
        assert!((two_density(&Digraph::directed_cycle(3)) - 2.0).abs() < 1e-12);
        assert!((two_density(&Digraph::directed_cycle(5)) - 4.0 / 3.0).abs() < 1e-12);
        assert!((two_density(&strong_tournament(4)) - 2.5).abs() < 1e-12);
    }
}
