//! Exact counting of family-avoiding orientations.
//!
//! All counts are exact big integers; logarithms are computed only when
//! reporting. The main counter factors out edges in no copy, splits the
//! remaining unset edges into independent components (edges linked by a
//! copy that still constrains them), and backtracks per component on the
//! edge in the most live copies, propagating after each assignment.

mod acyclic;
mod propagate;

use std::fmt;
use std::ops::Mul;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::orientation::{EdgeState, PartialOrientation};
use crate::pattern::{compile_constraints_with_budget, ConstraintSet, ForbiddenFamily, DEFAULT_COPY_BUDGET};

pub use acyclic::{count_acyclic, count_acyclic_with_budget, DEFAULT_ACYCLIC_BUDGET};
pub use propagate::{propagate, propagate_in_order, Propagation, Propagator};
pub(crate) use propagate::undo;

/// Largest edge count accepted by the enumeration oracle.
pub const ORACLE_EDGE_LIMIT: usize = 30;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Exact nonnegative integer count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn pow2(k: usize) -> Self {
        BigCount(BigUint::one() << k)
    }

    pub fn factorial(k: usize) -> Self {
        BigCount((1..=k as u64).fold(BigUint::one(), |acc, i| acc * i))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    pub fn parse_decimal(s: &str) -> Option<Self> {
        BigUint::parse_bytes(s.as_bytes(), 10).map(BigCount)
    }

    /// Base-2 logarithm; `-inf` for zero.
    pub fn log2(&self) -> f64 {
        let bits = self.0.bits();
        if bits == 0 {
            return f64::NEG_INFINITY;
        }
        if bits <= 64 {
            return (self.0.to_u64().expect("fits") as f64).log2();
        }
        let shift = bits - 64;
        let top = (&self.0 >> shift).to_u64().expect("fits") as f64;
        top.log2() + shift as f64
    }
}

impl From<u64> for BigCount {
    fn from(x: u64) -> Self {
        BigCount(BigUint::from(x))
    }
}

impl Mul for BigCount {
    type Output = BigCount;

    fn mul(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 * rhs.0)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Backtracking nodes across all components.
    pub nodes: u64,
    pub copies: usize,
    pub oracle_edges: usize,
    /// Memo entries for the acyclic counter.
    pub acyclic_states: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            nodes: DEFAULT_NODE_BUDGET,
            copies: DEFAULT_COPY_BUDGET,
            oracle_edges: ORACLE_EDGE_LIMIT,
            acyclic_states: DEFAULT_ACYCLIC_BUDGET,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub graph_hash: String,
    pub family: String,
    #[serde(rename = "count_decimal_string")]
    pub count: BigCount,
    pub log2_count: f64,
    pub method: String,
    pub elapsed_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Oracle,
    Restricted,
    Acyclic,
}

impl CountMethod {
    pub fn name(self) -> &'static str {
        match self {
            CountMethod::Oracle => "oracle",
            CountMethod::Restricted => "restricted",
            CountMethod::Acyclic => "acyclic",
        }
    }
}

/// Counts and wraps the result for JSON output. `family` is ignored for
/// [`CountMethod::Acyclic`].
pub fn count_report(
    g: &Graph,
    family: Option<&ForbiddenFamily>,
    method: CountMethod,
    budgets: &Budgets,
) -> Result<CountReport> {
    let start = Instant::now();
    let need = || {
        family.ok_or_else(|| Error::InvalidParameter(format!("method {} needs a family", method.name())))
    };
    let count = match method {
        CountMethod::Oracle => count_oracle_with_budget(g, need()?, budgets)?,
        CountMethod::Restricted => count_restricted_with_budget(g, need()?, budgets)?,
        CountMethod::Acyclic => count_acyclic_with_budget(g, budgets.acyclic_states)?,
    };
    Ok(CountReport {
        graph_hash: g.content_hash(),
        family: match method {
            CountMethod::Acyclic => "acyclic".into(),
            _ => need()?.to_string(),
        },
        log2_count: count.log2(),
        count,
        method: method.name().into(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn count_oracle(g: &Graph, family: &ForbiddenFamily) -> Result<BigCount> {
    count_oracle_with_budget(g, family, &Budgets::default())
}

/// Tries all `2^m` orientations against every compiled copy.
pub fn count_oracle_with_budget(g: &Graph, family: &ForbiddenFamily, budgets: &Budgets) -> Result<BigCount> {
    let limit = budgets.oracle_edges.min(ORACLE_EDGE_LIMIT);
    if g.m() > limit {
        return Err(Error::EdgeBudgetExceeded { m: g.m(), limit });
    }
    let cs = compile_constraints_with_budget(g, family, budgets.copies)?;
    let m = g.m();
    let copies: Vec<(Vec<usize>, u32, usize)> =
        cs.copies().iter().map(|c| (c.edges.clone(), c.flips, c.template)).collect();
    let high = m.saturating_sub(12);
    let low = m - high;
    let total: u64 = (0u64..1 << high)
        .into_par_iter()
        .map(|hi| {
            let mut ok = 0u64;
            for lo in 0u64..1 << low {
                let bits = hi << low | lo;
                let avoids = copies.iter().all(|(edges, flips, t)| {
                    let local = edges
                        .iter()
                        .enumerate()
                        .fold(0u32, |acc, (i, &e)| acc | ((bits >> e & 1) as u32) << i)
                        ^ flips;
                    !cs.templates()[*t].forbidden.contains(local)
                });
                ok += avoids as u64;
            }
            ok
        })
        .sum();
    Ok(BigCount::from(total))
}

pub fn count_restricted(g: &Graph, family: &ForbiddenFamily) -> Result<BigCount> {
    count_restricted_with_budget(g, family, &Budgets::default())
}

pub fn count_restricted_with_budget(
    g: &Graph,
    family: &ForbiddenFamily,
    budgets: &Budgets,
) -> Result<BigCount> {
    let cs = compile_constraints_with_budget(g, family, budgets.copies)?;
    count_extensions_with_budget(&PartialOrientation::unset(g.m()), &cs, budgets.nodes)
}

pub fn count_extensions(po: &PartialOrientation, cs: &ConstraintSet) -> Result<BigCount> {
    count_extensions_with_budget(po, cs, DEFAULT_NODE_BUDGET)
}

/// Number of total family-avoiding orientations extending `po`.
pub fn count_extensions_with_budget(
    po: &PartialOrientation,
    cs: &ConstraintSet,
    node_budget: u64,
) -> Result<BigCount> {
    if po.len() != cs.graph().m() {
        return Err(Error::OrientationMismatch(format!(
            "orientation has {} edges, graph has {}",
            po.len(),
            cs.graph().m()
        )));
    }
    let mut prop = Propagator::new(cs);
    let mut states = po.states().to_vec();
    let mut trail = Vec::new();
    if !prop.run(&mut states, 0..cs.len(), &mut trail) {
        return Ok(BigCount::zero());
    }
    let unset: Vec<usize> = (0..states.len()).filter(|&e| states[e] == EdgeState::Unset).collect();
    let (free, comps) = components(&mut prop, &states, &unset);
    let nodes = AtomicU64::new(0);
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
    let parts: Vec<Result<BigUint>> = comps
        .into_par_iter()
        .map(|comp| {
            let mut solver =
                Solver { prop: Propagator::new(cs), states: states.clone(), nodes: &nodes, budget: node_budget };
            solver.branch(comp)
        })
        .collect();
    let mut total = BigUint::one() << free;
    for p in parts {
        match p {
            Ok(c) => total *= c,
            Err(Error::Infeasible(_)) => {
                return Err(Error::Infeasible(format!(
                    "node budget {node_budget} exhausted after {} nodes; {} unset edges after propagation, largest component {largest} edges",
                    nodes.load(Ordering::Relaxed),
                    unset.len()
                )))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BigCount(total))
}

/// Shape of the search left after propagation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentProfile {
    pub contradiction: bool,
    pub unset: usize,
    /// Unset edges in no live copy.
    pub free: usize,
    /// Edge counts of the linked components, largest first.
    pub components: Vec<usize>,
}

impl ComponentProfile {
    pub fn largest(&self) -> usize {
        self.components.first().copied().unwrap_or(0)
    }
}

pub fn component_profile(po: &PartialOrientation, cs: &ConstraintSet) -> ComponentProfile {
    let mut prop = Propagator::new(cs);
    let mut states = po.states().to_vec();
    let mut trail = Vec::new();
    if !prop.run(&mut states, 0..cs.len(), &mut trail) {
        return ComponentProfile { contradiction: true, unset: 0, free: 0, components: Vec::new() };
    }
    let unset: Vec<usize> = (0..states.len()).filter(|&e| states[e] == EdgeState::Unset).collect();
    let (free, comps) = components(&mut prop, &states, &unset);
    let mut sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    ComponentProfile { contradiction: false, unset: unset.len(), free, components: sizes }
}

/// Splits unset edges into those in no live copy (counted by the first
/// return value) and connected groups linked by live copies.
fn components(prop: &mut Propagator<'_>, states: &[EdgeState], edges: &[usize]) -> (usize, Vec<Vec<usize>>) {
    let cs = prop.constraints();
    let mut index = std::collections::HashMap::with_capacity(edges.len());
    for (i, &e) in edges.iter().enumerate() {
        index.insert(e, i);
    }
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    let mut linked = vec![false; edges.len()];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut seen_copy = std::collections::HashSet::new();
    for &e in edges {
        for &c in cs.incident(e) {
            let c = c as usize;
            if !prop.copy_active(c) || !seen_copy.insert(c) {
                continue;
            }
            if prop.summary(c, states).all {
                continue;
            }
            let mut first = None;
            for &f in &cs.copy(c).edges {
                if let Some(&j) = index.get(&f) {
                    linked[j] = true;
                    match first {
                        None => first = Some(j),
                        Some(i) => {
                            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                            parent[a] = b;
                        }
                    }
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut free = 0;
    for (j, &e) in edges.iter().enumerate() {
        if linked[j] {
            let root = find(&mut parent, j);
            groups.entry(root).or_default().push(e);
        } else {
            free += 1;
        }
    }
    (free, groups.into_values().collect())
}

struct Solver<'a> {
    prop: Propagator<'a>,
    states: Vec<EdgeState>,
    nodes: &'a AtomicU64,
    budget: u64,
}

impl Solver<'_> {
    fn solve(&mut self, edges: Vec<usize>) -> Result<BigUint> {
        let (free, comps) = components(&mut self.prop, &self.states, &edges);
        let mut total = BigUint::one() << free;
        for comp in comps {
            let c = self.branch(comp)?;
            if c.is_zero() {
                return Ok(c);
            }
            total *= c;
        }
        Ok(total)
    }

    /// Counts one component; all its edges are unset on entry.
    fn branch(&mut self, comp: Vec<usize>) -> Result<BigUint> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::Infeasible(String::new()));
        }
        let cs = self.prop.constraints();
        let mut best = (0usize, comp[0]);
        for &e in &comp {
            let live = cs
                .incident(e)
                .iter()
                .filter(|&&c| self.prop.copy_active(c as usize) && !self.prop.summary(c as usize, &self.states).all)
                .count();
            if live > best.0 {
                best = (live, e);
            }
        }
        let e = best.1;
        let mut total = BigUint::zero();
        let mut trail = Vec::new();
        for s in [EdgeState::Forward, EdgeState::Backward] {
            if self.prop.assign(&mut self.states, e, s, &mut trail) {
                let rest: Vec<usize> =
                    comp.iter().copied().filter(|&f| self.states[f] == EdgeState::Unset).collect();
                let sub = self.solve(rest);
                if sub.is_err() {
                    undo(&mut self.states, &mut trail, 0);
                }
                total += sub?;
            }
            undo(&mut self.states, &mut trail, 0);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Digraph, VertexOrder};
    use crate::pattern::compile_constraints;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    fn triangle_pendant() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn bigcount_basics() {
        assert_eq!(BigCount::factorial(5).to_u64(), Some(120));
        assert_eq!(BigCount::pow2(100).log2(), 100.0);
        assert!((BigCount::from(6).log2() - 6f64.log2()).abs() < 1e-15);
        assert_eq!(BigCount::zero().log2(), f64::NEG_INFINITY);
        let big = BigCount::factorial(40);
        assert_eq!(BigCount::parse_decimal(&big.to_decimal()), Some(big.clone()));
        let exact: f64 = (1..=40).map(|i| (i as f64).log2()).sum();
        assert!((big.log2() - exact).abs() < 1e-9);
    }

    #[test]
    fn oracle_examples() {
        let c3 = ForbiddenFamily::CyclicTriangle;
        assert_eq!(count_oracle(&Graph::complete(3), &c3).unwrap().to_u64(), Some(6));
        assert_eq!(count_oracle(&Graph::complete(4), &c3).unwrap().to_u64(), Some(24));
        assert_eq!(
            count_oracle(&Graph::cycle(4), &ForbiddenFamily::DirectedCycle(4)).unwrap().to_u64(),
            Some(14)
        );
        assert!(matches!(
            count_oracle(&Graph::complete(9), &c3),
            Err(Error::EdgeBudgetExceeded { m: 36, limit: 30 })
        ));
    }

    #[test]
    fn restricted_examples() {
        let c3 = ForbiddenFamily::CyclicTriangle;
        assert_eq!(count_restricted(&two_triangles(), &c3).unwrap().to_u64(), Some(36));
        assert_eq!(count_oracle(&two_triangles(), &c3).unwrap().to_u64(), Some(36));
        assert_eq!(count_restricted(&triangle_pendant(), &c3).unwrap().to_u64(), Some(12));
        let s4 = ForbiddenFamily::StronglyConnectedClique(4);
        assert_eq!(count_restricted(&Graph::complete(4), &s4).unwrap().to_u64(), Some(40));
        assert_eq!(count_oracle(&Graph::complete(4), &s4).unwrap().to_u64(), Some(40));
        assert_eq!(count_restricted(&Graph::path(30), &c3).unwrap(), BigCount::pow2(29));
    }

    #[test]
    fn complete_graphs_give_factorials() {
        for n in 3..=8 {
            assert_eq!(
                count_restricted(&Graph::complete(n), &ForbiddenFamily::CyclicTriangle).unwrap(),
                BigCount::factorial(n)
            );
        }
    }

    #[test]
    fn node_budget_is_explicit() {
        let g = Graph::gnp(40, 0.4, 1).unwrap();
        let cs = compile_constraints(&g, &ForbiddenFamily::CyclicTriangle).unwrap();
        let r = count_extensions_with_budget(&PartialOrientation::unset(g.m()), &cs, 5);
        assert!(matches!(r, Err(Error::Infeasible(msg)) if msg.contains("largest component")));
    }

    fn random_family(r: &mut impl Rng) -> ForbiddenFamily {
        match r.gen_range(0..6) {
            0 => ForbiddenFamily::CyclicTriangle,
            1 => ForbiddenFamily::DirectedCycle(r.gen_range(3..=4)),
            2 => ForbiddenFamily::NonTransitiveClique(r.gen_range(3..=4)),
            3 => ForbiddenFamily::StronglyConnectedClique(r.gen_range(3..=4)),
            4 => ForbiddenFamily::OrientedSubgraph(Digraph::directed_cycle(r.gen_range(3..=4))),
            _ => {
                // directed triangle with a pendant out-arc
                let h = Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
                ForbiddenFamily::OrientedSubgraph(h)
            }
        }
    }

    fn random_small_graph(r: &mut impl Rng) -> Graph {
        loop {
            let n = r.gen_range(3..=8);
            let g = Graph::gnp(n, r.gen_range(0.2..0.9), r.gen()).unwrap();
            if g.m() <= 20 {
                return g;
            }
        }
    }

    #[test]
    fn restricted_matches_oracle() {
        let mut r = crate::rng::stream(41, &[]);
        for _ in 0..500 {
            let g = random_small_graph(&mut r);
            let f = random_family(&mut r);
            assert_eq!(count_restricted(&g, &f).unwrap(), count_oracle(&g, &f).unwrap(), "{f} on {g:?}");
        }
    }

    #[test]
    fn three_triangle_families_agree() {
        let mut r = crate::rng::stream(42, &[]);
        for _ in 0..100 {
            let g = random_small_graph(&mut r);
            let c = count_restricted(&g, &ForbiddenFamily::CyclicTriangle).unwrap();
            assert_eq!(count_restricted(&g, &ForbiddenFamily::NonTransitiveClique(3)).unwrap(), c);
            assert_eq!(count_restricted(&g, &ForbiddenFamily::StronglyConnectedClique(3)).unwrap(), c);
        }
    }

    #[test]
    fn propagation_examples() {
        let k3 = Graph::complete(3);
        let cs = compile_constraints(&k3, &ForbiddenFamily::CyclicTriangle).unwrap();
        let po = PartialOrientation::from_arcs(&k3, &[(0, 1), (1, 2)]).unwrap();
        let closed = propagate(&po, &cs);
        let expect = PartialOrientation::from_arcs(&k3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(closed, Propagation::Closure(expect));
        assert_eq!(count_extensions(&po, &cs).unwrap().to_u64(), Some(1));

        let po = PartialOrientation::from_arcs(&k3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(propagate(&po, &cs), Propagation::Closure(po.clone()));
        assert_eq!(count_extensions(&PartialOrientation::unset(3), &cs).unwrap().to_u64(), Some(6));

        let c4 = Graph::cycle(4);
        let cs = compile_constraints(&c4, &ForbiddenFamily::DirectedCycle(4)).unwrap();
        let po = PartialOrientation::from_arcs(&c4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let closed = propagate(&po, &cs);
        let expect = PartialOrientation::from_arcs(&c4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(closed, Propagation::Closure(expect));
    }

    #[test]
    fn contradiction_gives_zero() {
        let k3 = Graph::complete(3);
        let cs = compile_constraints(&k3, &ForbiddenFamily::CyclicTriangle).unwrap();
        let po = PartialOrientation::from_arcs(&k3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(propagate(&po, &cs).is_contradiction());
        assert!(count_extensions(&po, &cs).unwrap().is_zero());
    }

    fn random_partial(g: &Graph, r: &mut impl Rng, density: f64) -> PartialOrientation {
        let mut po = PartialOrientation::unset(g.m());
        for e in 0..g.m() {
            if r.gen_bool(density) {
                po.set(e, EdgeState::from_forward(r.gen()));
            }
        }
        po
    }

    #[test]
    fn forced_edges_are_sound() {
        let mut r = crate::rng::stream(43, &[]);
        for _ in 0..300 {
            let g = random_small_graph(&mut r);
            let f = random_family(&mut r);
            let cs = compile_constraints(&g, &f).unwrap();
            let po = random_partial(&g, &mut r, 0.3);
            let total = count_extensions(&po, &cs).unwrap();
            let Propagation::Closure(closed) = propagate(&po, &cs) else {
                assert!(total.is_zero());
                continue;
            };
            assert!(po.is_contained_in(&closed));
            assert_eq!(count_extensions(&closed, &cs).unwrap(), total);
            for e in 0..g.m() {
                if po.get(e) == EdgeState::Unset && closed.get(e) != EdgeState::Unset {
                    let mut other = po.clone();
                    other.set(e, closed.get(e).flipped());
                    assert!(count_extensions(&other, &cs).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn closure_is_order_independent() {
        let mut r = crate::rng::stream(44, &[]);
        for _ in 0..30 {
            let g = Graph::gnp(r.gen_range(5..=9), 0.6, r.gen()).unwrap();
            let f = random_family(&mut r);
            let cs = compile_constraints(&g, &f).unwrap();
            let po = random_partial(&g, &mut r, 0.35);
            let reference = propagate(&po, &cs);
            let mut order: Vec<usize> = (0..cs.len()).collect();
            for _ in 0..100 {
                order.shuffle(&mut r);
                assert_eq!(propagate_in_order(&po, &cs, &order), reference);
            }
        }
    }

    #[test]
    fn vertex_orders_are_always_valid() {
        let mut r = crate::rng::stream(45, &[]);
        for _ in 0..50 {
            let g = Graph::gnp(9, 0.7, r.gen()).unwrap();
            let mut perm: Vec<usize> = (0..9).collect();
            perm.shuffle(&mut r);
            let po = PartialOrientation::from_order(&g, &VertexOrder::from_permutation(perm).unwrap());
            let f = random_family(&mut r);
            let cs = compile_constraints(&g, &f).unwrap();
            assert!(cs.first_violation(po.states()).is_none());
            assert_eq!(count_extensions(&po, &cs).unwrap().to_u64(), Some(1));
        }
    }
}
