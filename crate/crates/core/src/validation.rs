//! The acceptance suite. Each criterion returns a one-line summary or the
//! first failure found.
//!
//! Orientation checks go through [`direct_violates`], which tests the
//! family's defining predicate on a digraph without compiled copies.

use std::collections::HashSet;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{b_of_a, gkks_acyclic_lower, janson_exponent, mc_probability, JansonScenario, McEvent};
use crate::certify::{build_forcing_certificate_with, certificate_count_bound, verify_certificate_with};
use crate::count::{count_acyclic, count_oracle, count_restricted, BigCount};
use crate::experiment::{run_experiment, to_csv, ExperimentConfig, ExperimentMode};
use crate::graph::{
    gallai_milgram_partition, hamiltonian_path_tournament, independence_number, Digraph, Graph, IndependenceMode,
    VertexOrder,
};
use crate::orientation::PartialOrientation;
use crate::pattern::{compile_constraints, strip_isolated, ConstraintSet, ForbiddenFamily};
use crate::rng;
use crate::witness::{build_witness_from, general_lower_exponent, general_lower_term, verify_witness_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Reduced sample sizes; every criterion still runs.
    Quick,
    Full,
}

impl Level {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "oracle-equivalence"),
    (2, "transitive-tournament-identity"),
    (3, "triangle-family-coincidence"),
    (4, "acyclic-cross-check"),
    (5, "sandwich"),
    (6, "witness-soundness"),
    (7, "certificate-soundness"),
    (8, "gallai-milgram"),
    (9, "janson-numeric"),
    (10, "exponent-specialization"),
    (11, "determinism"),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<31} {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_ms / 1e3
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub level: Level,
    pub criteria: Vec<CriterionResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

type Outcome = std::result::Result<String, String>;

/// Runs every criterion in order, calling `on_result` as each finishes.
pub fn run_validation(level: Level, mut on_result: impl FnMut(&CriterionResult)) -> ValidationReport {
    let criteria = CRITERIA
        .iter()
        .map(|&(id, _)| {
            let r = run_criterion(id, level);
            on_result(&r);
            r
        })
        .collect();
    ValidationReport { level, criteria }
}

pub fn run_criterion(id: u8, level: Level) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => oracle_equivalence(level),
        2 => transitive_tournament_identity(),
        3 => triangle_family_coincidence(level),
        4 => acyclic_cross_check(level),
        5 => sandwich(level),
        6 => witness_soundness(level),
        7 => certificate_soundness(level),
        8 => gallai_milgram(level),
        9 => janson_numeric(level),
        10 => exponent_specialization(),
        11 => determinism(level),
        _ => Err(format!("no criterion {id}")),
    };
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, name, passed, detail, elapsed_ms: start.elapsed().as_secs_f64() * 1e3 }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

/// Whether `d`, an orientation of a graph, contains a member of `family`.
pub fn direct_violates(family: &ForbiddenFamily, d: &Digraph) -> bool {
    let n = d.n();
    let adjacent = |u: usize, v: usize| d.has_arc(u, v) || d.has_arc(v, u);
    let cliques = |r: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn grow(
            n: usize,
            r: usize,
            from: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
            adj: &dyn Fn(usize, usize) -> bool,
        ) {
            if cur.len() == r {
                out.push(cur.clone());
                return;
            }
            for v in from..n {
                if cur.iter().all(|&u| adj(u, v)) {
                    cur.push(v);
                    grow(n, r, v + 1, cur, out, adj);
                    cur.pop();
                }
            }
        }
        grow(n, r, 0, &mut cur, &mut out, &adjacent);
        out
    };
    match family {
        ForbiddenFamily::CyclicTriangle => cliques(3).iter().any(|c| d.induced(c).has_cycle()),
        ForbiddenFamily::NonTransitiveClique(r) => cliques(*r).iter().any(|c| d.induced(c).has_cycle()),
        ForbiddenFamily::StronglyConnectedClique(r) => {
            cliques(*r).iter().any(|c| d.induced(c).strongly_connected_components().len() == 1)
        }
        ForbiddenFamily::DirectedCycle(r) => (0..n).any(|s| directed_cycle_from(d, s, *r)),
        ForbiddenFamily::OrientedSubgraph(h) => {
            let (core, _) = strip_isolated(h);
            let mut map = vec![usize::MAX; core.n()];
            embeds(&core, d, 0, &mut map)
        }
    }
}

/// A directed cycle of exactly `r` vertices whose smallest vertex is `s`.
fn directed_cycle_from(d: &Digraph, s: usize, r: usize) -> bool {
    fn walk(d: &Digraph, s: usize, r: usize, path: &mut Vec<usize>) -> bool {
        let last = *path.last().expect("nonempty");
        if path.len() == r {
            return d.has_arc(last, s);
        }
        let next: Vec<usize> = d.out_neighbors(last).filter(|&w| w > s && !path.contains(&w)).collect();
        next.into_iter().any(|w| {
            path.push(w);
            let found = walk(d, s, r, path);
            path.pop();
            found
        })
    }
    walk(d, s, r, &mut vec![s])
}

fn embeds(h: &Digraph, d: &Digraph, i: usize, map: &mut Vec<usize>) -> bool {
    if i == h.n() {
        return true;
    }
    for v in 0..d.n() {
        if map.contains(&v) {
            continue;
        }
        // arcs among vertices placed so far, with i sent to v
        let image = |x: usize| if x == i { Some(v) } else if x < i { Some(map[x]) } else { None };
        let fits = h.arcs().iter().all(|&(x, y)| match (image(x), image(y)) {
            (Some(a), Some(b)) => d.has_arc(a, b),
            _ => true,
        });
        if fits {
            map[i] = v;
            if embeds(h, d, i + 1, map) {
                return true;
            }
            map[i] = usize::MAX;
        }
    }
    false
}

/// Counts family-avoiding orientations by testing the predicate on each.
pub fn direct_count(g: &Graph, family: &ForbiddenFamily) -> u64 {
    (0u64..1 << g.m())
        .into_par_iter()
        .filter(|&bits| !direct_violates(family, &PartialOrientation::from_forward_bits(g.m(), bits).to_digraph(g)))
        .count() as u64
}

fn random_graph(r: &mut impl Rng, n_range: std::ops::RangeInclusive<usize>, max_m: usize) -> Graph {
    loop {
        let g = Graph::gnp(r.gen_range(n_range.clone()), r.gen_range(0.15..0.95), r.gen()).expect("valid p");
        if g.m() <= max_m {
            return g;
        }
    }
}

fn five_families() -> Vec<ForbiddenFamily> {
    vec![
        ForbiddenFamily::CyclicTriangle,
        ForbiddenFamily::DirectedCycle(4),
        ForbiddenFamily::NonTransitiveClique(4),
        ForbiddenFamily::StronglyConnectedClique(4),
        ForbiddenFamily::OrientedSubgraph(Digraph::directed_cycle(3)),
    ]
}

fn oracle_equivalence(level: Level) -> Outcome {
    let total = level.pick(100, 500);
    let mut r = rng::stream(1001, &[]);
    let instances: Vec<(Graph, ForbiddenFamily)> =
        (0..total).map(|i| (random_graph(&mut r, 3..=8, 20), five_families()[i % 5].clone())).collect();
    let mut direct_checked = 0;
    for (i, (g, f)) in instances.iter().enumerate() {
        let restricted = count_restricted(g, f).map_err(err)?;
        let oracle = count_oracle(g, f).map_err(err)?;
        ensure(restricted == oracle, || format!("instance {i} ({f}, m = {}): {restricted} vs {oracle}", g.m()))?;
        if g.m() <= 12 {
            let direct = direct_count(g, f);
            ensure(oracle.to_u64() == Some(direct), || format!("instance {i} ({f}): oracle {oracle}, direct {direct}"))?;
            direct_checked += 1;
        }
    }
    Ok(format!("{total} instances agree; {direct_checked} also match the direct predicate"))
}

fn transitive_tournament_identity() -> Outcome {
    let mut out = Vec::new();
    for n in 3..=6 {
        let c = count_restricted(&Graph::complete(n), &ForbiddenFamily::CyclicTriangle).map_err(err)?;
        ensure(c == BigCount::factorial(n), || format!("K_{n}: {c}"))?;
        out.push(c.to_string());
    }
    Ok(format!("K_3..K_6 give {}", out.join(", ")))
}

fn triangle_family_coincidence(level: Level) -> Outcome {
    let total = level.pick(50, 200);
    let mut r = rng::stream(1003, &[]);
    for i in 0..total {
        let g = random_graph(&mut r, 3..=8, 28);
        let counts: Vec<BigCount> = [
            ForbiddenFamily::CyclicTriangle,
            ForbiddenFamily::NonTransitiveClique(3),
            ForbiddenFamily::StronglyConnectedClique(3),
        ]
        .iter()
        .map(|f| count_restricted(&g, f))
        .collect::<crate::Result<_>>()
        .map_err(err)?;
        ensure(counts[0] == counts[1] && counts[1] == counts[2], || format!("graph {i}: {counts:?}"))?;
    }
    Ok(format!("{total} graphs agree"))
}

fn acyclic_brute(g: &Graph) -> u64 {
    (0u64..1 << g.m())
        .into_par_iter()
        .filter(|&bits| !PartialOrientation::from_forward_bits(g.m(), bits).to_digraph(g).has_cycle())
        .count() as u64
}

fn acyclic_cross_check(level: Level) -> Outcome {
    let total = level.pick(30, 100);
    let mut r = rng::stream(1004, &[]);
    for i in 0..total {
        let g = random_graph(&mut r, 2..=9, 16);
        let c = count_acyclic(&g).map_err(err)?;
        let brute = acyclic_brute(&g);
        ensure(c.to_u64() == Some(brute), || format!("graph {i}: {c} vs brute force {brute}"))?;
        let lower = gkks_acyclic_lower(&g).exp();
        ensure(lower <= brute as f64 * (1.0 + 1e-12), || format!("graph {i}: bound {lower} above {brute}"))?;
    }
    let k3 = gkks_acyclic_lower(&Graph::complete(3)).exp();
    ensure((k3 - 6.0).abs() < 1e-9, || format!("K_3 bound {k3}"))?;
    ensure(count_acyclic(&Graph::complete(3)).map_err(err)?.to_u64() == Some(6), || "K_3 count".into())?;
    Ok(format!("{total} graphs match brute force; bound holds; K_3 tight at 6"))
}

fn sandwich(level: Level) -> Outcome {
    let samples = level.pick(10, 50);
    let mut rows = 0;
    for (n, p) in [(10, 0.4), (12, 0.3)] {
        let cfg = ExperimentConfig::new(ForbiddenFamily::CyclicTriangle, vec![n], vec![p], samples, 5005, ExperimentMode::Sandwich);
        let res = run_experiment(&cfg).map_err(err)?;
        for row in res.sandwich_rows() {
            let exact = row.exact.as_ref().ok_or_else(|| format!("n = {n}, sample {}: exact count infeasible", row.sample))?;
            let alpha = row.alpha.ok_or("alpha missing")?;
            let b = 2 * n * alpha;
            ensure(row.upper_b == b, || format!("upper uses B = {}, want {b}", row.upper_b))?;
            let lower = BigCount::pow2(row.log2_lower as usize);
            let upper = certificate_count_bound(row.m, b);
            ensure(lower.0 <= exact.0 && exact.0 <= upper.0, || {
                format!("n = {n}, sample {}: 2^{} / {exact} / {upper}", row.sample, row.log2_lower)
            })?;
            rows += 1;
        }
    }
    Ok(format!("{rows} samples, zero violations"))
}

fn witness_family(r: &mut impl Rng) -> ForbiddenFamily {
    match r.gen_range(0..6) {
        0 => ForbiddenFamily::CyclicTriangle,
        1 => ForbiddenFamily::DirectedCycle(r.gen_range(3..=5)),
        2 => ForbiddenFamily::NonTransitiveClique(r.gen_range(3..=4)),
        3 => ForbiddenFamily::StronglyConnectedClique(r.gen_range(3..=4)),
        4 => ForbiddenFamily::OrientedSubgraph(Digraph::directed_cycle(4)),
        _ => ForbiddenFamily::OrientedSubgraph(
            Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).expect("valid arcs"),
        ),
    }
}

fn witness_soundness(level: Level) -> Outcome {
    let total = level.pick(60, 300);
    let mut r = rng::stream(1006, &[]);
    let mut exhausted = 0;
    for i in 0..total {
        let g = random_graph(&mut r, 4..=12, 40);
        let f = witness_family(&mut r);
        let cs = compile_constraints(&g, &f).map_err(err)?;
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut r);
        let order = VertexOrder::from_permutation(perm).map_err(err)?;
        let a = r.gen_range(1..g.n());
        let w = build_witness_from(&cs, &order, a).map_err(err)?;
        let check = verify_witness_with(&cs, &w).map_err(err)?;
        ensure(check.is_valid(), || format!("instance {i} ({f}, a = {a}): {check:?}"))?;
        if g.n() <= 7 {
            let k = w.free.len();
            let bad = (0u64..1 << k)
                .into_par_iter()
                .find_any(|&bits| {
                    let mut po = PartialOrientation::unset(g.m());
                    for (e, s) in w.orientation(&g, bits).into_iter().enumerate() {
                        po.set(e, s);
                    }
                    direct_violates(&f, &po.to_digraph(&g))
                });
            ensure(bad.is_none(), || format!("instance {i} ({f}): free assignment {bad:?} is forbidden"))?;
            exhausted += 1;
        }
    }
    Ok(format!("{total} witnesses verify; {exhausted} exhausted over all free assignments"))
}

fn certificate_families() -> Vec<ForbiddenFamily> {
    vec![
        ForbiddenFamily::CyclicTriangle,
        ForbiddenFamily::DirectedCycle(4),
        ForbiddenFamily::DirectedCycle(5),
        ForbiddenFamily::NonTransitiveClique(4),
        ForbiddenFamily::StronglyConnectedClique(4),
        ForbiddenFamily::OrientedSubgraph(Digraph::directed_cycle(4)),
    ]
}

/// Size factor `k` in `|S| <= 2 n k alpha`, for the families with one.
fn size_factor(f: &ForbiddenFamily) -> Option<usize> {
    match f {
        ForbiddenFamily::CyclicTriangle => Some(1),
        ForbiddenFamily::DirectedCycle(r) => Some(r - 2),
        _ => None,
    }
}

fn check_certificate(cs: &ConstraintSet, po: &PartialOrientation, alpha: usize, uniqueness: bool) -> std::result::Result<Vec<(usize, usize)>, String> {
    let g = cs.graph();
    let f = cs.family();
    let cert = build_forcing_certificate_with(cs, po).map_err(err)?;
    let check = verify_certificate_with(cs, &cert, po, uniqueness.then_some(1_000_000)).map_err(err)?;
    ensure(check.is_valid(), || format!("{f} on {}: {check:?}", g.to_text().replace('\n', " ")))?;
    if let Some(k) = size_factor(f) {
        let b = 2 * g.n() * k * alpha;
        ensure(cert.size() <= b, || format!("{f}: |S| = {} above {b}", cert.size()))?;
    }
    let mut key = cert.s.clone();
    key.sort_unstable();
    Ok(key)
}

fn random_valid_orientation(cs: &ConstraintSet, r: &mut impl Rng) -> PartialOrientation {
    let g = cs.graph();
    let mut perm: Vec<usize> = (0..g.n()).collect();
    perm.shuffle(r);
    let mut po = PartialOrientation::from_order(g, &VertexOrder::from_permutation(perm).expect("permutation"));
    for _ in 0..3 * g.m() {
        let e = r.gen_range(0..g.m());
        let old = po.get(e);
        po.set(e, old.flipped());
        if cs.first_violation(po.states()).is_some() {
            po.set(e, old);
        }
    }
    po
}

fn certificate_soundness(level: Level) -> Outcome {
    let max_n = level.pick(4, 5);
    let mut graphs = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            graphs.push(Graph::from_edges(n, edges).expect("simple"));
        }
    }
    let families = certificate_families();
    let orientations: usize = graphs
        .par_iter()
        .map(|g| -> std::result::Result<usize, String> {
            let alpha = independence_number(g, IndependenceMode::Exact).map_err(err)?.alpha;
            let mut done = 0;
            for f in &families {
                let cs = compile_constraints(g, f).map_err(err)?;
                let mut seen = HashSet::new();
                for bits in 0u64..1 << g.m() {
                    let po = PartialOrientation::from_forward_bits(g.m(), bits);
                    if direct_violates(f, &po.to_digraph(g)) {
                        continue;
                    }
                    let key = check_certificate(&cs, &po, alpha, false)?;
                    ensure(seen.insert(key), || format!("{f}: two orientations share a certificate"))?;
                    done += 1;
                }
            }
            Ok(done)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let sampled = level.pick(40, 200);
    let mut r = rng::stream(1007, &[]);
    for i in 0..sampled {
        let g = random_graph(&mut r, 6..=12, 45);
        if g.m() == 0 {
            continue;
        }
        let f = &families[i % families.len()];
        let cs = compile_constraints(&g, f).map_err(err)?;
        let alpha = independence_number(&g, IndependenceMode::Exact).map_err(err)?.alpha;
        let po = random_valid_orientation(&cs, &mut r);
        check_certificate(&cs, &po, alpha, true).map_err(|e| format!("sample {i}: {e}"))?;
    }
    Ok(format!(
        "{orientations} orientations of {} graphs with n <= {max_n} plus {sampled} samples verify; injective",
        graphs.len()
    ))
}

fn random_oriented_graph(r: &mut impl Rng, n: usize, q: f64) -> Digraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(q) {
                arcs.push(if r.gen_bool(0.5) { (u, v) } else { (v, u) });
            }
        }
    }
    Digraph::from_arcs(n, arcs).expect("oriented")
}

fn check_hamiltonian(t: &Digraph) -> std::result::Result<(), String> {
    let path = hamiltonian_path_tournament(t).map_err(err)?;
    let mut sorted = path.clone();
    sorted.sort_unstable();
    ensure(sorted == (0..t.n()).collect::<Vec<_>>(), || format!("{path:?} is not a permutation"))?;
    ensure(path.windows(2).all(|w| t.has_arc(w[0], w[1])), || format!("{path:?} uses a missing arc"))
}

fn gallai_milgram(level: Level) -> Outcome {
    let total = level.pick(100, 500);
    let mut r = rng::stream(1008, &[]);
    for i in 0..total {
        let n = r.gen_range(1..=20);
        let q = r.gen_range(0.05..0.95);
        let d = random_oriented_graph(&mut r, n, q);
        let part = gallai_milgram_partition(&d);
        let mut covered: Vec<usize> = part.paths.iter().flatten().copied().collect();
        covered.sort_unstable();
        ensure(covered == (0..n).collect::<Vec<_>>(), || format!("digraph {i}: not a partition"))?;
        ensure(part.paths.iter().all(|p| p.windows(2).all(|w| d.has_arc(w[0], w[1]))), || {
            format!("digraph {i}: a path uses a missing arc")
        })?;
        let g = d.underlying().map_err(err)?;
        let alpha = independence_number(&g, IndependenceMode::Exact).map_err(err)?.alpha;
        ensure(part.paths.len() <= alpha, || format!("digraph {i}: {} paths, alpha {alpha}", part.paths.len()))?;
        ensure(part.independent_ends.len() == part.paths.len() && g.is_independent(&part.independent_ends), || {
            format!("digraph {i}: end witness")
        })?;
    }
    for bits in 0u32..64 {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let arcs = pairs.iter().enumerate().map(|(i, &(u, v))| if bits >> i & 1 == 1 { (u, v) } else { (v, u) });
        check_hamiltonian(&Digraph::from_arcs(4, arcs).map_err(err)?)?;
    }
    let tournaments = level.pick(200, 1000);
    for _ in 0..tournaments {
        let n = r.gen_range(5..=40);
        check_hamiltonian(&random_oriented_graph(&mut r, n, 1.0))?;
    }
    Ok(format!("{total} digraphs within alpha; 64 + {tournaments} tournaments have Hamiltonian paths"))
}

fn janson_numeric(level: Level) -> Outcome {
    let trials = level.pick(10_000, 100_000);
    let mut r = rng::stream(1009, &[]);
    let mut worst: f64 = f64::NEG_INFINITY;
    for i in 0..20u64 {
        let s = r.gen_range(4..=14);
        let k = r.gen_range(3..=4);
        let p = r.gen_range(0.2..=0.7);
        let est = mc_probability(&McEvent::KrFreeSubset { s, r: k, p }, trials, rng::derive(1009, &[i])).map_err(err)?;
        let bound = janson_exponent(&JansonScenario::KrInSet { s, r: k, p }).map_err(err)?.bound;
        let slack = est.estimate - (bound + 3.0 * est.half_width);
        ensure(slack <= 0.0, || format!("(s = {s}, r = {k}, p = {p:.3}): {} above {bound}", est.estimate))?;
        worst = worst.max(slack);
    }
    for (i, p) in [0.3, 0.5, 0.8].into_iter().enumerate() {
        let est = mc_probability(&McEvent::KrFreeSubset { s: 3, r: 3, p }, trials, rng::derive(1010, &[i as u64]))
            .map_err(err)?;
        let want = 1.0 - p * p * p;
        ensure(est.lower <= want && want <= est.upper, || format!("single triangle p = {p}: {est:?}, want {want}"))?;
    }
    Ok(format!("20 triples at {trials} trials within bound (max slack {worst:.4}); single triangle matches"))
}

fn exponent_specialization() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs();
    let mut checks = 0;
    for (n, p, w) in [(1e6, 0.3, 5.0), (1e5, 0.05, 11.5), (4e3, 0.6, 2.0)] {
        let nu = n as usize;
        let c3 = general_lower_exponent(&Digraph::directed_cycle(3), nu, p, w).map_err(err)?;
        ensure(close(c3.exponent, n / (w * p)), || format!("C_3: {} vs {}", c3.exponent, n / (w * p)))?;
        for r in 4..=5 {
            let c = general_lower_exponent(&Digraph::directed_cycle(r), nu, p, w).map_err(err)?;
            let want = n * p.powf(-1.0 / (r as f64 - 2.0)) / w;
            ensure(close(c.exponent, want), || format!("C_{r}: {} vs {want}", c.exponent))?;
        }
        for r in 3..=6 {
            let want = n * p.powf(-(r as f64 - 1.0) / 2.0) / w;
            let term = general_lower_term(r * (r - 1) / 2, r, 1, n, p, w);
            ensure(close(term, want), || format!("strong K_{r}: {term} vs {want}"))?;
            let full = general_lower_exponent(&strong_tournament(r), nu, p, w).map_err(err)?;
            ensure(full.exponent >= term * (1.0 - 1e-12), || format!("strong K_{r}: maximum below the full term"))?;
        }
        checks += 1;
    }
    for r in 3..=8i64 {
        let ru = r as usize;
        let pts = [
            (Ratio::new(2 * r, r + 1), Ratio::new(2 * r, r + 1)),
            (Ratio::new(2 * r + 2, r + 2), Ratio::new(r + 4, r + 2)),
            (Ratio::from_integer(2), Ratio::from_integer(1)),
        ];
        for (a, b) in pts {
            let got = b_of_a(ru, a).map_err(err)?;
            ensure(got == b, || format!("r = {r}: b({a}) = {got}, want {b}"))?;
        }
    }
    Ok(format!("{checks} parameter points to 1e-10; b(a) breakpoints exact for r = 3..8"))
}

/// Transitive tournament with its Hamiltonian path closed backwards.
pub fn strong_tournament(r: usize) -> Digraph {
    let arcs =
        (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).map(|(i, j)| if (i, j) == (0, r - 1) { (j, i) } else { (i, j) });
    Digraph::from_arcs(r, arcs).expect("tournament")
}

fn determinism(level: Level) -> Outcome {
    let cfg = ExperimentConfig::new(
        ForbiddenFamily::CyclicTriangle,
        level.pick(vec![8, 10], vec![8, 10, 12]),
        vec![0.3, 0.5],
        level.pick(2, 4),
        1111,
        ExperimentMode::Sandwich,
    );
    let run = |threads: usize| -> std::result::Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        pool.install(|| run_experiment(&cfg).map(|res| to_csv(&cfg, &res))).map_err(err)
    };
    let one = run(1)?;
    let eight = run(8)?;
    ensure(one == eight, || "CSV differs between 1 and 8 threads".into())?;
    Ok(format!("{} CSV bytes identical at 1 and 8 threads", one.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_predicate_matches_examples() {
        let tri = Digraph::directed_cycle(3);
        assert!(direct_violates(&ForbiddenFamily::CyclicTriangle, &tri));
        assert!(!direct_violates(&ForbiddenFamily::CyclicTriangle, &Digraph::transitive_tournament(5)));
        assert!(direct_violates(&ForbiddenFamily::DirectedCycle(4), &Digraph::directed_cycle(4)));
        assert!(!direct_violates(&ForbiddenFamily::DirectedCycle(3), &Digraph::directed_cycle(4)));
        assert!(direct_violates(&ForbiddenFamily::StronglyConnectedClique(4), &strong_tournament(4)));
        assert!(direct_violates(&ForbiddenFamily::NonTransitiveClique(4), &strong_tournament(4)));
        let h = ForbiddenFamily::OrientedSubgraph(Digraph::directed_cycle(3));
        assert!(direct_violates(&h, &strong_tournament(5)));
        assert!(!direct_violates(&h, &Digraph::transitive_tournament(5)));
    }

    #[test]
    fn direct_count_examples() {
        assert_eq!(direct_count(&Graph::complete(4), &ForbiddenFamily::CyclicTriangle), 24);
        assert_eq!(direct_count(&Graph::cycle(5), &ForbiddenFamily::DirectedCycle(5)), 30);
    }

    #[test]
    fn quick_criteria_pass() {
        for id in [2, 3, 10] {
            let r = run_criterion(id, Level::Quick);
            assert!(r.passed, "{}", r.line());
        }
    }
}
