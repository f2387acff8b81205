//! Forcing-set certificates for upper bounds.
//!
//! Vertices are added in label order. When vertex `v` joins the prefix
//! `{0..v-1}`, the orientation of the prefix is already determined by the
//! set built so far, and a set `T_v` of edges at `v` is chosen so that
//! propagation over the copies inside `{0..v}` recovers every edge at `v`.
//! The certificate is the union of the `T_v`. Since the family-avoiding
//! orientations containing a given certificate number at most one, the
//! count is bounded by the number of oriented edge sets of that size.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bounds::thresholds;
use crate::count::{count_extensions_with_budget, propagate, undo, BigCount, Propagation, Propagator};
use crate::error::{Error, Result};
use crate::graph::{gallai_milgram_partition, independence_number, Digraph, Graph, IndependenceMode, EXACT_LIMIT};
use crate::orientation::{EdgeState, PartialOrientation};
use crate::pattern::{compile_constraints, ConstraintSet, ForbiddenFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Start from every edge at `v` and drop, in neighbour order, each edge
    /// that propagation deduces from the rest.
    GreedyMinimal,
    /// Cover `N+(v)` and `N-(v)` by directed paths and keep the first
    /// (resp. last) `r-2` vertices of each path.
    GallaiMilgram,
}

pub fn strategy_for(family: &ForbiddenFamily) -> Strategy {
    match family {
        ForbiddenFamily::DirectedCycle(_) => Strategy::GallaiMilgram,
        _ => Strategy::GreedyMinimal,
    }
}

/// What was kept at one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub vertex: usize,
    /// Earlier neighbours `w` with `v -> w` kept.
    pub t_plus: Vec<usize>,
    /// Earlier neighbours `w` with `w -> v` kept.
    pub t_minus: Vec<usize>,
    /// Path-cover data for the Gallai-Milgram strategy: path counts and
    /// independent end sets of the same sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<PathCover>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCover {
    pub plus_paths: usize,
    pub plus_ends: Vec<usize>,
    pub minus_paths: usize,
    pub minus_ends: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingCertificate {
    pub family: String,
    pub strategy: Strategy,
    #[serde(rename = "S")]
    pub s: Vec<(usize, usize)>,
    pub per_vertex_sizes: Vec<(usize, usize)>,
    pub per_vertex: Vec<VertexRecord>,
    /// Size bound fed into the count formula.
    #[serde(rename = "claimed_bound_B")]
    pub claimed_bound_b: Option<usize>,
    pub bound_kind: String,
    /// `Some` when `claimed_bound_b` uses an exact independence number.
    pub alpha: Option<usize>,
}

impl ForcingCertificate {
    pub fn size(&self) -> usize {
        self.s.len()
    }
}

/// `sum_{i <= B} C(m, i) 2^i`.
pub fn certificate_count_bound(m: usize, b: usize) -> BigCount {
    let mut total = BigUint::one();
    let mut term = BigUint::one();
    for i in 1..=b.min(m) {
        term = term * 2u32 * (m - i + 1) / i;
        total += &term;
    }
    BigCount(total)
}

pub fn build_forcing_certificate(
    g: &Graph,
    orientation: &PartialOrientation,
    family: &ForbiddenFamily,
) -> Result<ForcingCertificate> {
    let cs = compile_constraints(g, family)?;
    build_forcing_certificate_with(&cs, orientation)
}

pub fn build_forcing_certificate_with(cs: &ConstraintSet, orientation: &PartialOrientation) -> Result<ForcingCertificate> {
    let g = cs.graph();
    check_total(g, orientation)?;
    if let Some(c) = cs.first_violation(orientation.states()) {
        return Err(Error::OrientationViolatesFamily(format!(
            "copy on vertices {:?} is forbidden",
            cs.copy(c).vertices
        )));
    }
    let family = cs.family();
    let strategy = strategy_for(family);
    let truth = orientation.states();
    let mut prop = Propagator::new(cs);
    let mut states = vec![EdgeState::Unset; g.m()];
    let mut s = Vec::new();
    let mut per_vertex = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        prop.restrict_to_prefix(v);
        let at_v: Vec<usize> =
            g.neighbors(v).iter().filter(|&&w| w < v).map(|&w| g.edge_id(v, w).expect("edge")).collect();
        let (kept, paths) = match strategy {
            Strategy::GreedyMinimal => (greedy_minimal(&mut prop, &mut states, truth, &at_v), None),
            Strategy::GallaiMilgram => {
                let r = match family {
                    ForbiddenFamily::DirectedCycle(r) => *r,
                    _ => unreachable!("strategy chosen by family"),
                };
                let (kept, cover) = path_cover_choice(g, truth, v, r);
                (kept, Some(cover))
            }
        };
        // the prefix orientation plus the kept edges must determine every edge at v
        let mut trail = Vec::new();
        let mut ok = true;
        for &e in &kept {
            ok &= prop.assign(&mut states, e, truth[e], &mut trail);
        }
        if !ok || at_v.iter().any(|&e| states[e] != truth[e]) {
            return Err(Error::PropagationStuck { vertex: v });
        }
        // states now hold the prefix orientation through v
        let mut rec = VertexRecord { vertex: v, t_plus: Vec::new(), t_minus: Vec::new(), paths };
        for &e in &kept {
            let (x, y) = g.edge(e);
            let w = if x == v { y } else { x };
            let (tail, head) = arc_of(g, e, truth[e]);
            if tail == v {
                rec.t_plus.push(w);
            } else {
                rec.t_minus.push(w);
            }
            s.push((tail, head));
        }
        rec.t_plus.sort_unstable();
        rec.t_minus.sort_unstable();
        per_vertex.push(rec);
    }
    let bound = certificate_size_bound(g, family);
    Ok(ForcingCertificate {
        family: family.to_string(),
        strategy,
        per_vertex_sizes: per_vertex.iter().map(|r| (r.t_plus.len(), r.t_minus.len())).collect(),
        s,
        per_vertex,
        claimed_bound_b: bound.b,
        bound_kind: bound.kind,
        alpha: bound.alpha,
    })
}

fn check_total(g: &Graph, orientation: &PartialOrientation) -> Result<()> {
    if orientation.len() != g.m() || !orientation.is_total() {
        return Err(Error::OrientationMismatch(format!(
            "need a total orientation of {} edges, got {} of {} set",
            g.m(),
            orientation.set_count(),
            orientation.len()
        )));
    }
    Ok(())
}

fn arc_of(g: &Graph, e: usize, s: EdgeState) -> (usize, usize) {
    let (u, v) = g.edge(e);
    if s == EdgeState::Forward {
        (u, v)
    } else {
        (v, u)
    }
}

/// Edges at the new vertex that are not deducible from the others. On
/// entry the prefix before `v` is fully set in `states` and the edges at
/// `v` are unset; `states` is unchanged on return.
fn greedy_minimal(prop: &mut Propagator<'_>, states: &mut [EdgeState], truth: &[EdgeState], at_v: &[usize]) -> Vec<usize> {
    let mut kept: Vec<usize> = at_v.to_vec();
    let mut i = 0;
    while i < kept.len() {
        let e = kept[i];
        let mut trail = Vec::new();
        let mut ok = true;
        for &f in &kept {
            if f != e {
                ok &= prop.assign(states, f, truth[f], &mut trail);
            }
        }
        // a contradiction cannot arise from a subset of a valid orientation;
        // treat it as "not deducible" to stay conservative
        let removable = ok && states[e] == truth[e];
        undo(states, &mut trail, 0);
        if removable {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

/// The path-cover choice at `v` over the prefix orientation.
fn path_cover_choice(g: &Graph, truth: &[EdgeState], v: usize, r: usize) -> (Vec<usize>, PathCover) {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for &w in g.neighbors(v).iter().filter(|&&w| w < v) {
        let e = g.edge_id(v, w).expect("edge");
        if arc_of(g, e, truth[e]).0 == v {
            plus.push(w);
        } else {
            minus.push(w);
        }
    }
    let sub = |set: &[usize]| -> Digraph {
        let mut arcs = Vec::new();
        for (i, &a) in set.iter().enumerate() {
            for (j, &b) in set.iter().enumerate() {
                if let Some(e) = g.edge_id(a, b) {
                    if arc_of(g, e, truth[e]) == (a, b) {
                        arcs.push((i, j));
                    }
                }
            }
        }
        Digraph::from_arcs(set.len(), arcs).expect("oriented subgraph")
    };
    let keep = r - 2;
    let mut kept = Vec::new();
    let plus_part = gallai_milgram_partition(&sub(&plus));
    for path in &plus_part.paths {
        for &i in path.iter().take(keep) {
            kept.push(g.edge_id(v, plus[i]).expect("edge"));
        }
    }
    let minus_part = gallai_milgram_partition(&sub(&minus));
    for path in &minus_part.paths {
        for &i in path.iter().rev().take(keep) {
            kept.push(g.edge_id(v, minus[i]).expect("edge"));
        }
    }
    kept.sort_unstable();
    let cover = PathCover {
        plus_paths: plus_part.paths.len(),
        plus_ends: plus_part.independent_ends.iter().map(|&i| plus[i]).collect(),
        minus_paths: minus_part.paths.len(),
        minus_ends: minus_part.independent_ends.iter().map(|&i| minus[i]).collect(),
    };
    (kept, cover)
}

/// A bound `B` on certificate size for every valid orientation of `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeBound {
    pub b: Option<usize>,
    pub kind: String,
    /// Exact independence number, when the bound uses one.
    pub alpha: Option<usize>,
    /// Whether `b` holds for every certificate this module builds, as
    /// opposed to being a formula value reported for comparison.
    pub proven: bool,
}

/// `2 n alpha` for the triangle families and `2 n (r-2) alpha` for
/// cycles, with exact `alpha`; the clique-threshold formulas at the edge
/// density with `C = 1` for the larger clique families.
pub fn certificate_size_bound(g: &Graph, family: &ForbiddenFamily) -> SizeBound {
    let n = g.n();
    let exact_alpha = || {
        (n <= EXACT_LIMIT).then(|| independence_number(g, IndependenceMode::Exact).expect("within limit").alpha)
    };
    let density = if n < 2 { 0.0 } else { g.m() as f64 / (n * (n - 1) / 2) as f64 };
    let alpha_bound = |factor: usize, kind: String| match exact_alpha() {
        Some(a) => SizeBound { b: Some(2 * n * factor * a), kind, alpha: Some(a), proven: true },
        None => SizeBound { b: None, kind: format!("{kind} (alpha not computed)"), alpha: None, proven: false },
    };
    let formula = |kind: &str, value: Option<f64>| SizeBound {
        b: value.filter(|x| x.is_finite()).map(|x| (2.0 * n as f64 * x).ceil() as usize),
        kind: kind.into(),
        alpha: None,
        proven: false,
    };
    match family {
        ForbiddenFamily::CyclicTriangle
        | ForbiddenFamily::NonTransitiveClique(3)
        | ForbiddenFamily::StronglyConnectedClique(3) => alpha_bound(1, "2 n alpha".into()),
        ForbiddenFamily::DirectedCycle(r) => alpha_bound(r - 2, format!("2 n ({}) alpha", r - 2)),
        ForbiddenFamily::NonTransitiveClique(r) => formula(
            "2 n t_r at edge density, C = 1",
            thresholds(*r, n as f64, density, 1.0).ok().map(|t| t.t_r),
        ),
        ForbiddenFamily::StronglyConnectedClique(r) => formula(
            "2 n s_(r-1) at edge density, C = 1",
            thresholds(*r - 1, n as f64, density, 1.0).ok().map(|t| t.s_r),
        ),
        ForbiddenFamily::OrientedSubgraph(_) => formula("none", None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateCheck {
    Valid,
    /// An arc of S is not an arc of the orientation.
    Inconsistent { arc: (usize, usize) },
    Contradiction,
    /// Propagation from S leaves edges unset.
    Stuck { unset: usize, first: (usize, usize) },
    /// Propagation set an edge against the orientation.
    WrongOrientation { edge: (usize, usize) },
    StructureViolated { reason: String },
    /// More than one valid orientation contains S.
    NotUnique { extensions: String },
}

impl CertificateCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, CertificateCheck::Valid)
    }
}

pub fn verify_certificate(
    g: &Graph,
    cert: &ForcingCertificate,
    orientation: &PartialOrientation,
) -> Result<CertificateCheck> {
    let family = ForbiddenFamily::parse(&cert.family)?;
    let cs = compile_constraints(g, &family)?;
    verify_certificate_with(&cs, cert, orientation, None)
}

/// Checks consistency, recovery by propagation, and the recorded
/// structure. With `uniqueness_budget`, also counts extensions of S and
/// requires exactly one (skipped if the count exceeds the node budget).
pub fn verify_certificate_with(
    cs: &ConstraintSet,
    cert: &ForcingCertificate,
    orientation: &PartialOrientation,
    uniqueness_budget: Option<u64>,
) -> Result<CertificateCheck> {
    let g = cs.graph();
    check_total(g, orientation)?;
    let truth = orientation.states();
    let mut po = PartialOrientation::unset(g.m());
    for &(u, v) in &cert.s {
        let e = match g.edge_id(u, v) {
            Some(e) if arc_of(g, e, truth[e]) == (u, v) => e,
            _ => return Ok(CertificateCheck::Inconsistent { arc: (u, v) }),
        };
        po.set(e, truth[e]);
    }
    let closure = match propagate(&po, cs) {
        Propagation::Contradiction => return Ok(CertificateCheck::Contradiction),
        Propagation::Closure(c) => c,
    };
    for e in 0..g.m() {
        match closure.get(e) {
            EdgeState::Unset => {
                return Ok(CertificateCheck::Stuck { unset: g.m() - closure.set_count(), first: g.edge(e) })
            }
            s if s != truth[e] => return Ok(CertificateCheck::WrongOrientation { edge: g.edge(e) }),
            _ => {}
        }
    }
    if let Some(reason) = structure_violation(cs, cert, truth) {
        return Ok(CertificateCheck::StructureViolated { reason });
    }
    if let Some(budget) = uniqueness_budget {
        match count_extensions_with_budget(&po, cs, budget) {
            Ok(c) if c == BigCount::one() => {}
            Ok(c) => return Ok(CertificateCheck::NotUnique { extensions: c.to_decimal() }),
            Err(Error::Infeasible(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(CertificateCheck::Valid)
}

fn structure_violation(cs: &ConstraintSet, cert: &ForcingCertificate, truth: &[EdgeState]) -> Option<String> {
    let g = cs.graph();
    let n = g.n();
    // T_v read off S: arcs whose later endpoint is v
    let mut t_plus = vec![Vec::new(); n];
    let mut t_minus = vec![Vec::new(); n];
    for &(a, b) in &cert.s {
        if a > b {
            t_plus[a].push(b);
        } else {
            t_minus[b].push(a);
        }
    }
    let sizes: Vec<(usize, usize)> = (0..n).map(|v| (t_plus[v].len(), t_minus[v].len())).collect();
    if sizes != cert.per_vertex_sizes {
        return Some("per-vertex sizes do not match S".into());
    }
    if let (Some(b), Some(_)) = (cert.claimed_bound_b, cert.alpha) {
        if cert.s.len() > b {
            return Some(format!("|S| = {} exceeds the bound {b}", cert.s.len()));
        }
    }
    let family = cs.family();
    for v in 0..n {
        for (side, ends) in [("T+", &t_plus[v]), ("T-", &t_minus[v])] {
            let bad = match family {
                ForbiddenFamily::CyclicTriangle
                | ForbiddenFamily::NonTransitiveClique(3)
                | ForbiddenFamily::StronglyConnectedClique(3) => {
                    (!g.is_independent(ends)).then(|| "endpoints not independent".to_string())
                }
                ForbiddenFamily::NonTransitiveClique(r) => {
                    pair_in_clique_with(g, v, ends, *r).map(|(a, b)| format!("{a} and {b} share a K_{r} with {v}"))
                }
                ForbiddenFamily::StronglyConnectedClique(r) => {
                    g.has_clique_in(ends, r - 1).then(|| format!("endpoints contain a K_{}", r - 1))
                }
                ForbiddenFamily::DirectedCycle(r) => cycle_structure(g, cert, truth, v, *r, side, ends.len()),
                ForbiddenFamily::OrientedSubgraph(_) => None,
            };
            if let Some(reason) = bad {
                return Some(format!("vertex {v}, {side}: {reason}"));
            }
        }
    }
    None
}

fn cycle_structure(
    g: &Graph,
    cert: &ForcingCertificate,
    truth: &[EdgeState],
    v: usize,
    r: usize,
    side: &str,
    size: usize,
) -> Option<String> {
    let cover = cert.per_vertex.get(v).and_then(|rec| rec.paths.as_ref());
    let Some(cover) = cover else {
        return Some("missing path-cover record".into());
    };
    let (paths, ends, out) = if side == "T+" {
        (cover.plus_paths, &cover.plus_ends, true)
    } else {
        (cover.minus_paths, &cover.minus_ends, false)
    };
    if size > (r - 2) * paths {
        return Some(format!("{size} kept edges exceed (r-2) * {paths} paths"));
    }
    if ends.len() != paths || !g.is_independent(ends) {
        return Some("path count not witnessed by an independent end set".into());
    }
    let inside = ends.iter().all(|&w| {
        w < v && g.edge_id(v, w).is_some_and(|e| (arc_of(g, e, truth[e]).0 == v) == out)
    });
    (!inside).then(|| "end set is not inside the neighbourhood".into())
}

fn pair_in_clique_with(g: &Graph, v: usize, ends: &[usize], r: usize) -> Option<(usize, usize)> {
    for (i, &a) in ends.iter().enumerate() {
        for &b in &ends[i + 1..] {
            if !g.has_edge(a, b) {
                continue;
            }
            let common: Vec<usize> = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&x| x < v && x != a && x != b && g.has_edge(x, a) && g.has_edge(x, b))
                .collect();
            if g.has_clique_in(&common, r - 3) {
                return Some((a, b));
            }
        }
    }
    None
}
