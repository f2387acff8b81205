//! Grid experiments over `G(n, p)` samples and their CSV form.
//!
//! Every cell `(n, p, sample)` draws its graph from
//! `derive(seed, [n, p bits, sample])`, so a cell's row does not depend on
//! which other cells run or on the thread count. Rows are sorted by
//! `(n, p, sample)` before output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{gkks_acyclic_lower, janson_exponent, mc_probability, theoretic_exponent, JansonScenario, McEvent, Statement};
use crate::certify::{
    build_forcing_certificate_with, certificate_count_bound, certificate_size_bound, verify_certificate_with,
    ForcingCertificate,
};
use crate::count::{component_profile, count_acyclic_with_budget, count_extensions_with_budget, BigCount, DEFAULT_ACYCLIC_BUDGET, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexOrder};
use crate::orientation::PartialOrientation;
use crate::pattern::{compile_constraints_with_budget, ForbiddenFamily, DEFAULT_COPY_BUDGET};
use crate::rng;
use crate::witness::{
    build_witness_from, default_omega, general_lower_exponent, recommended_cutoff, verify_witness_with, OrderedWitness,
};

/// Bumped whenever columns change.
pub const CSV_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentMode {
    /// Witness lower bound, exact count and certificate upper bound.
    Sandwich,
    /// Witness size against the regime formula.
    Regime,
    /// Monte Carlo `K_r`-freeness of `G(n, p)` against the Janson bound.
    Janson,
    /// Acyclic orientation count against its degree-sequence lower bound.
    Acyclic,
}

impl ExperimentMode {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentMode::Sandwich => "sandwich",
            ExperimentMode::Regime => "regime",
            ExperimentMode::Janson => "janson",
            ExperimentMode::Acyclic => "acyclic",
        }
    }
}

impl FromStr for ExperimentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sandwich" => Ok(ExperimentMode::Sandwich),
            "regime" => Ok(ExperimentMode::Regime),
            "janson" => Ok(ExperimentMode::Janson),
            "acyclic" => Ok(ExperimentMode::Acyclic),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentBudgets {
    pub nodes: u64,
    pub copies: usize,
    /// Largest constraint component (in edges) the exact count attempts.
    pub component_edges: usize,
    pub acyclic_states: usize,
}

impl Default for ExperimentBudgets {
    fn default() -> Self {
        ExperimentBudgets {
            nodes: DEFAULT_NODE_BUDGET,
            copies: DEFAULT_COPY_BUDGET,
            component_edges: 200,
            acyclic_states: DEFAULT_ACYCLIC_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub family: ForbiddenFamily,
    pub ns: Vec<usize>,
    pub ps: Vec<f64>,
    /// Samples per cell; trials per cell in Janson mode (at least 100).
    pub samples: usize,
    pub seed: u64,
    pub mode: ExperimentMode,
    pub output: Option<PathBuf>,
    pub budgets: ExperimentBudgets,
    /// Defaults to `ln n` per cell.
    pub omega: Option<f64>,
    /// Valid orientations certified per cell in sandwich mode.
    pub certified_orientations: usize,
    /// Adds wall-clock columns, which makes the CSV machine dependent.
    pub timings: bool,
    /// Where a violation bundle is written; defaults next to `output`.
    pub diagnostics_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(family: ForbiddenFamily, ns: Vec<usize>, ps: Vec<f64>, samples: usize, seed: u64, mode: ExperimentMode) -> Self {
        ExperimentConfig {
            family,
            ns,
            ps,
            samples,
            seed,
            mode,
            output: None,
            budgets: ExperimentBudgets::default(),
            omega: None,
            certified_orientations: 3,
            timings: false,
            diagnostics_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.ns.is_empty() {
            return bad("n-list is empty");
        }
        if self.ps.is_empty() {
            return bad("p-list is empty");
        }
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        if let Some(p) = self.ps.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::InvalidProbability(*p));
        }
        let b = &self.budgets;
        if b.nodes == 0 || b.copies == 0 || b.component_edges == 0 || b.acyclic_states == 0 {
            return bad("budgets must be positive");
        }
        if self.omega.is_some_and(|w| !(w > 0.0)) {
            return bad("omega must be positive");
        }
        if self.mode == ExperimentMode::Janson && self.samples < 100 {
            return bad("janson mode needs at least 100 trials per cell");
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(usize, f64, usize)> {
        let mut ns = self.ns.clone();
        ns.sort_unstable();
        ns.dedup();
        let mut ps = self.ps.clone();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        let per_cell = if self.mode == ExperimentMode::Janson { 1 } else { self.samples };
        let mut cells = Vec::new();
        for &n in &ns {
            for &p in &ps {
                for s in 0..per_cell {
                    cells.push((n, p, s));
                }
            }
        }
        cells
    }
}

pub fn cell_seed(seed: u64, n: usize, p: f64, sample: usize) -> u64 {
    rng::derive(seed, &[n as u64, p.to_bits(), sample as u64])
}

/// `None` when the exact count was not attempted or ran out of budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichRow {
    pub n: usize,
    pub p: f64,
    pub sample: usize,
    pub m: usize,
    pub alpha: Option<usize>,
    pub witness_a: usize,
    pub log2_lower: f64,
    pub exact: Option<BigCount>,
    pub log2_exact: Option<f64>,
    pub log2_upper: f64,
    /// Size bound used for the upper bound; `m` when no proven bound exists.
    pub upper_b: usize,
    pub upper_kind: String,
    pub certificate_size: usize,
    pub largest_component: usize,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeRow {
    pub n: usize,
    pub p: f64,
    pub sample: usize,
    pub m: usize,
    pub witness_a: usize,
    pub cutoff_formula: f64,
    pub regime_holds: bool,
    pub log2_lower: f64,
    pub theory: f64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JansonRow {
    pub s: usize,
    pub r: usize,
    pub p: f64,
    pub trials: u64,
    pub estimate: f64,
    pub half_width: f64,
    pub mu: f64,
    pub delta: f64,
    pub bound: f64,
    pub consistent: bool,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcyclicRow {
    pub n: usize,
    pub p: f64,
    pub sample: usize,
    pub m: usize,
    pub log2_acyclic: Option<f64>,
    pub log2_gkks: f64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Row {
    Sandwich(SandwichRow),
    Regime(RegimeRow),
    Janson(JansonRow),
    Acyclic(AcyclicRow),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub mode: ExperimentMode,
    pub rows: Vec<Row>,
}

impl ExperimentResult {
    pub fn sandwich_rows(&self) -> impl Iterator<Item = &SandwichRow> {
        self.rows.iter().filter_map(|r| match r {
            Row::Sandwich(s) => Some(s),
            _ => None,
        })
    }
}

/// Runs every cell; writes the CSV to `cfg.output` when set. Budget
/// exhaustion is recorded in the row; a broken inequality or an invalid
/// witness or certificate writes a diagnostic bundle and fails.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let rows: Vec<Row> = cfg.cells().into_par_iter().map(|(n, p, s)| run_cell(cfg, n, p, s)).collect::<Result<_>>()?;
    let result = ExperimentResult { mode: cfg.mode, rows };
    if let Some(path) = &cfg.output {
        std::fs::write(path, to_csv(cfg, &result))?;
    }
    Ok(result)
}

fn run_cell(cfg: &ExperimentConfig, n: usize, p: f64, sample: usize) -> Result<Row> {
    let start = Instant::now();
    let seed = cell_seed(cfg.seed, n, p, sample);
    let ms = || start.elapsed().as_secs_f64() * 1e3;
    match cfg.mode {
        ExperimentMode::Sandwich => sandwich_cell(cfg, n, p, sample, seed).map(|mut r| {
            r.elapsed_ms = ms();
            Row::Sandwich(r)
        }),
        ExperimentMode::Regime => {
            let g = Graph::gnp(n, p, seed)?;
            let cs = compile_constraints_with_budget(&g, &cfg.family, cfg.budgets.copies)?;
            let omega = cfg.omega.unwrap_or_else(|| default_omega(n));
            let cut = recommended_cutoff(&cfg.family, n, p, omega)?;
            let w = build_witness_from(&cs, &VertexOrder::identity(n), cut.a)?;
            Ok(Row::Regime(RegimeRow {
                n,
                p,
                sample,
                m: g.m(),
                witness_a: cut.a,
                cutoff_formula: cut.formula,
                regime_holds: cut.regime_holds,
                log2_lower: w.log2_lower(),
                theory: theory_value(&cfg.family, n, p, omega)?,
                elapsed_ms: ms(),
            }))
        }
        ExperimentMode::Janson => {
            let r = cfg.family.pattern_vertices();
            let trials = cfg.samples as u64;
            let est = mc_probability(&McEvent::KrFreeSubset { s: n, r, p }, trials, seed)?;
            let rep = janson_exponent(&JansonScenario::KrInSet { s: n, r, p })?;
            Ok(Row::Janson(JansonRow {
                s: n,
                r,
                p,
                trials,
                estimate: est.estimate,
                half_width: est.half_width,
                mu: rep.value("mu").unwrap_or(0.0),
                delta: rep.value("delta").unwrap_or(0.0),
                bound: rep.bound,
                consistent: est.estimate <= rep.bound + 3.0 * est.half_width,
                elapsed_ms: ms(),
            }))
        }
        ExperimentMode::Acyclic => {
            let g = Graph::gnp(n, p, seed)?;
            let lower = gkks_acyclic_lower(&g) / std::f64::consts::LN_2;
            let exact = match count_acyclic_with_budget(&g, cfg.budgets.acyclic_states) {
                Ok(c) => Some(c),
                Err(Error::Infeasible(_)) | Err(Error::TooLargeForExact { .. }) => None,
                Err(e) => return Err(e),
            };
            if let Some(c) = &exact {
                if lower > c.log2() + 1e-9 {
                    let dir = write_bundle(cfg, n, p, sample, &g, None, None, "degree-sequence bound exceeds the acyclic count")?;
                    return Err(Error::SandwichViolation(format!("acyclic bound above count; bundle in {}", dir.display())));
                }
            }
            Ok(Row::Acyclic(AcyclicRow {
                n,
                p,
                sample,
                m: g.m(),
                log2_acyclic: exact.map(|c| c.log2()),
                log2_gkks: lower,
                elapsed_ms: ms(),
            }))
        }
    }
}

fn theory_value(family: &ForbiddenFamily, n: usize, p: f64, omega: f64) -> Result<f64> {
    let statement = match family {
        ForbiddenFamily::CyclicTriangle | ForbiddenFamily::DirectedCycle(3) => Statement::Triangles,
        ForbiddenFamily::NonTransitiveClique(r) => Statement::Transitive(*r),
        ForbiddenFamily::StronglyConnectedClique(r) => Statement::Strongly(*r),
        ForbiddenFamily::DirectedCycle(r) => Statement::CyclesConjectured(*r),
        ForbiddenFamily::OrientedSubgraph(h) => return Ok(general_lower_exponent(h, n, p, omega)?.exponent),
    };
    Ok(theoretic_exponent(statement, n as f64, p)?.value)
}

fn sandwich_cell(cfg: &ExperimentConfig, n: usize, p: f64, sample: usize, seed: u64) -> Result<SandwichRow> {
    let g = Graph::gnp(n, p, seed)?;
    let cs = compile_constraints_with_budget(&g, &cfg.family, cfg.budgets.copies)?;
    let omega = cfg.omega.unwrap_or_else(|| default_omega(n));
    let cut = recommended_cutoff(&cfg.family, n, p, omega)?;
    let w = build_witness_from(&cs, &VertexOrder::identity(n), cut.a)?;
    let fail = |what: String, cert: Option<&ForcingCertificate>| -> Error {
        match write_bundle(cfg, n, p, sample, &g, Some(&w), cert, &what) {
            Ok(dir) => Error::SandwichViolation(format!("{what}; bundle in {}", dir.display())),
            Err(e) => Error::SandwichViolation(format!("{what}; bundle not written: {e}")),
        }
    };
    let check = verify_witness_with(&cs, &w)?;
    if !check.is_valid() {
        return Err(fail(format!("witness invalid: {check:?}"), None));
    }

    let unset = PartialOrientation::unset(g.m());
    let profile = component_profile(&unset, &cs);
    let exact = if profile.largest() > cfg.budgets.component_edges {
        None
    } else {
        match count_extensions_with_budget(&unset, &cs, cfg.budgets.nodes) {
            Ok(c) => Some(c),
            Err(Error::Infeasible(_)) => None,
            Err(e) => return Err(e),
        }
    };

    let size = certificate_size_bound(&g, &cfg.family);
    let (upper_b, upper_kind) = match size.b {
        Some(b) if size.proven => (b, size.kind.clone()),
        _ => (g.m(), "trivial".to_string()),
    };
    let upper = certificate_count_bound(g.m(), upper_b);

    let mut certificate_size = 0;
    for k in 0..cfg.certified_orientations {
        let bits = rng::derive(seed, &[u64::MAX, k as u64]);
        let po = orientation_from(&w, &g, bits);
        let cert = build_forcing_certificate_with(&cs, &po)?;
        let check = verify_certificate_with(&cs, &cert, &po, None)?;
        if !check.is_valid() {
            return Err(fail(format!("certificate invalid: {check:?}"), Some(&cert)));
        }
        if size.proven && cert.size() > upper_b {
            return Err(fail(format!("certificate size {} exceeds {upper_b}", cert.size()), Some(&cert)));
        }
        certificate_size = certificate_size.max(cert.size());
    }

    let lower = BigCount::pow2(w.free.len());
    if let Some(c) = &exact {
        if lower.0 > c.0 || c.0 > upper.0 {
            return Err(fail(format!("sandwich broken: 2^{} vs {} vs bound with B = {upper_b}", w.free.len(), c), None));
        }
    }
    Ok(SandwichRow {
        n,
        p,
        sample,
        m: g.m(),
        alpha: size.alpha,
        witness_a: cut.a,
        log2_lower: w.log2_lower(),
        log2_exact: exact.as_ref().map(BigCount::log2),
        exact,
        log2_upper: upper.log2(),
        upper_b,
        upper_kind,
        certificate_size,
        largest_component: profile.largest(),
        elapsed_ms: 0.0,
    })
}

fn orientation_from(w: &OrderedWitness, g: &Graph, bits: u64) -> PartialOrientation {
    let mut po = PartialOrientation::unset(g.m());
    for (e, s) in w.orientation(g, bits).into_iter().enumerate() {
        po.set(e, s);
    }
    po
}

#[allow(clippy::too_many_arguments)]
fn write_bundle(
    cfg: &ExperimentConfig,
    n: usize,
    p: f64,
    sample: usize,
    g: &Graph,
    w: Option<&OrderedWitness>,
    cert: Option<&ForcingCertificate>,
    what: &str,
) -> Result<PathBuf> {
    let base = cfg.diagnostics_dir.clone().unwrap_or_else(|| {
        cfg.output.as_deref().and_then(Path::parent).map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
    });
    let dir = base.join(format!("diagnostic-n{n}-p{p}-s{sample}"));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("graph.txt"), g.to_text())?;
    if let Some(w) = w {
        std::fs::write(dir.join("witness.json"), serde_json::to_string_pretty(&w.to_json(g))?)?;
    }
    if let Some(c) = cert {
        std::fs::write(dir.join("certificate.json"), serde_json::to_string_pretty(c)?)?;
    }
    let report = serde_json::json!({
        "family": cfg.family.to_string(),
        "n": n,
        "p": p,
        "sample": sample,
        "seed": cfg.seed,
        "graph_seed": cell_seed(cfg.seed, n, p, sample),
        "violation": what,
    });
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(dir)
}

fn opt<T: std::fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "infeasible".to_string(), T::to_string)
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

/// Header comment, column line, then one line per row.
pub fn to_csv(cfg: &ExperimentConfig, result: &ExperimentResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# orientcount experiment csv v{CSV_VERSION} mode={} family={} seed={} samples={}",
        cfg.mode.name(),
        cfg.family,
        cfg.seed,
        cfg.samples
    );
    let mut cols: Vec<&str> = match cfg.mode {
        ExperimentMode::Sandwich => vec![
            "n", "p", "sample", "m", "alpha", "witness_a", "log2_lower", "log2_exact", "exact", "log2_upper", "upper_b",
            "upper_kind", "certificate_size", "largest_component",
        ],
        ExperimentMode::Regime => {
            vec!["n", "p", "sample", "m", "witness_a", "cutoff_formula", "regime_holds", "log2_lower", "theory"]
        }
        ExperimentMode::Janson => {
            vec!["s", "r", "p", "trials", "estimate", "half_width", "mu", "delta", "bound", "consistent"]
        }
        ExperimentMode::Acyclic => vec!["n", "p", "sample", "m", "log2_acyclic", "log2_gkks"],
    };
    if cfg.timings {
        cols.push("elapsed_ms");
    }
    let _ = writeln!(out, "{}", cols.join(","));
    for row in &result.rows {
        let (mut fields, ms) = match row {
            Row::Sandwich(r) => (
                vec![
                    r.n.to_string(),
                    r.p.to_string(),
                    r.sample.to_string(),
                    r.m.to_string(),
                    r.alpha.map_or_else(|| "none".into(), |a| a.to_string()),
                    r.witness_a.to_string(),
                    f6(r.log2_lower),
                    r.log2_exact.map_or_else(|| "infeasible".into(), f6),
                    opt(&r.exact),
                    f6(r.log2_upper),
                    r.upper_b.to_string(),
                    r.upper_kind.replace(',', ";"),
                    r.certificate_size.to_string(),
                    r.largest_component.to_string(),
                ],
                r.elapsed_ms,
            ),
            Row::Regime(r) => (
                vec![
                    r.n.to_string(),
                    r.p.to_string(),
                    r.sample.to_string(),
                    r.m.to_string(),
                    r.witness_a.to_string(),
                    f6(r.cutoff_formula),
                    r.regime_holds.to_string(),
                    f6(r.log2_lower),
                    f6(r.theory),
                ],
                r.elapsed_ms,
            ),
            Row::Janson(r) => (
                vec![
                    r.s.to_string(),
                    r.r.to_string(),
                    r.p.to_string(),
                    r.trials.to_string(),
                    f6(r.estimate),
                    f6(r.half_width),
                    f6(r.mu),
                    f6(r.delta),
                    f6(r.bound),
                    r.consistent.to_string(),
                ],
                r.elapsed_ms,
            ),
            Row::Acyclic(r) => (
                vec![
                    r.n.to_string(),
                    r.p.to_string(),
                    r.sample.to_string(),
                    r.m.to_string(),
                    r.log2_acyclic.map_or_else(|| "infeasible".into(), f6),
                    f6(r.log2_gkks),
                ],
                r.elapsed_ms,
            ),
        };
        if cfg.timings {
            fields.push(format!("{ms:.3}"));
        }
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}
