//! Closed-form quantities: clique thresholds, Janson parameters, the
//! acyclic-orientation lower bound, dangerous-copy expectations, the
//! regime exponents, and a seeded Monte Carlo estimator.
//!
//! `ln` is the natural logarithm throughout; exponents of counts are the
//! formula values without polylogarithmic factors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{compile_constraints, ForbiddenFamily};
use crate::rng;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758;

/// A named-intermediates record of one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: String,
    pub inputs: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, Vec<TableEntry>>,
    pub bound: f64,
    pub regime: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableEntry {
    pub index: Vec<usize>,
    pub value: f64,
}

impl BoundReport {
    fn new(kind: &str, inputs: &[(&str, f64)]) -> Self {
        BoundReport {
            kind: kind.into(),
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            values: BTreeMap::new(),
            tables: BTreeMap::new(),
            bound: 0.0,
            regime: String::new(),
        }
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    fn put(&mut self, name: &str, v: f64) {
        self.values.insert(name.into(), v);
    }
}

/// `C(n, k)` as a float; zero when `k < 0` or `k > n`.
pub fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn pairs(k: usize) -> i32 {
    (k * k.saturating_sub(1) / 2) as i32
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn check_r(r: usize) -> Result<()> {
    if r >= 3 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("r must be at least 3, got {r}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Sparse,
    Dense,
}

/// Both branches of `t_r` and `s_r`, and which one applies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub r: usize,
    pub n: f64,
    pub p: f64,
    pub c: f64,
    pub t_r: f64,
    pub t_r_sparse: f64,
    pub t_r_dense: f64,
    /// `n^(-2/(r+2))`; the sparse branch applies at or below it.
    pub t_cutoff: f64,
    pub t_branch: Branch,
    pub s_r: f64,
    pub s_r_sparse: f64,
    pub s_r_dense: f64,
    /// `(ln n)^(-2/(r-1))`; the sparse branch applies at or below it.
    pub s_cutoff: f64,
    pub s_branch: Branch,
}

/// `t_r = C p^(2 - C(r,2)) n^(3-r) ln n` for `p <= n^(-2/(r+2))`, else
/// `C ln n / p`; `s_r = C (ln n)^(1/(r-1)) / p^(r/2)` for
/// `p <= (ln n)^(-2/(r-1))`, else `C ln n / p`.
pub fn thresholds(r: usize, n: f64, p: f64, c: f64) -> Result<Thresholds> {
    check_r(r)?;
    check_p(p)?;
    if !(n >= 3.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("need n >= 3 and C > 0, got n = {n}, C = {c}")));
    }
    let ln = n.ln();
    let rf = r as f64;
    let t_r_sparse = c * p.powi(2 - pairs(r)) * n.powf(3.0 - rf) * ln;
    let t_r_dense = c * ln / p;
    let t_cutoff = n.powf(-2.0 / (rf + 2.0));
    let t_branch = if p <= t_cutoff { Branch::Sparse } else { Branch::Dense };
    let s_r_sparse = c * ln.powf(1.0 / (rf - 1.0)) / p.powf(rf / 2.0);
    let s_r_dense = c * ln / p;
    let s_cutoff = ln.powf(-2.0 / (rf - 1.0));
    let s_branch = if p <= s_cutoff { Branch::Sparse } else { Branch::Dense };
    Ok(Thresholds {
        r,
        n,
        p,
        c,
        t_r: if t_branch == Branch::Sparse { t_r_sparse } else { t_r_dense },
        t_r_sparse,
        t_r_dense,
        t_cutoff,
        t_branch,
        s_r: if s_branch == Branch::Sparse { s_r_sparse } else { s_r_dense },
        s_r_sparse,
        s_r_dense,
        s_cutoff,
        s_branch,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum JansonScenario {
    /// Copies of `K_r` inside `G(s, p)`.
    KrInSet { s: usize, r: usize, p: f64 },
    /// Copies of `K_r` through a fixed vertex `v` meeting a fixed
    /// `T ⊂ N(v)`, `|T| = t`, in exactly two vertices, in `G(n, p)`.
    KrThroughPair { n: usize, t: usize, r: usize, p: f64 },
}

/// `mu`, `Delta` and `exp(-min(mu/2, mu^2/(2 Delta)))`, the Janson bound on
/// the probability that no copy is present.
///
/// For `KrInSet`, `Delta` is the exact sum over ordered pairs,
/// `C(s,r) C(r,a) C(s-r,r-a) p^(2C(r,2)-C(a,2))` over shared sizes
/// `2 <= a <= r-1`; the union-count table `C(s,2r-a) p^(...)` is reported
/// alongside as `delta_displayed`. For `KrThroughPair`, `Delta` is the sum
/// of the upper bounds `D(b,c)` over `2 <= b <= 4`, `2 <= c <= r-1`,
/// excluding the empty classes `(2,2)` and `(3,2)`.
pub fn janson_exponent(scenario: &JansonScenario) -> Result<BoundReport> {
    match *scenario {
        JansonScenario::KrInSet { s, r, p } => {
            check_r(r)?;
            check_p(p)?;
            let mut rep = BoundReport::new("janson_kr_in_set", &[("s", s as f64), ("r", r as f64), ("p", p)]);
            let (s, ri) = (s as i64, r as i64);
            let e = pairs(r);
            let mu = binom(s, ri) * p.powi(e);
            let mut exact = Vec::new();
            let mut displayed = Vec::new();
            for a in 2..r {
                let ai = a as i64;
                let w = p.powi(2 * e - pairs(a));
                exact.push(TableEntry { index: vec![a], value: binom(s, ri) * binom(ri, ai) * binom(s - ri, ri - ai) * w });
                displayed.push(TableEntry { index: vec![a], value: binom(s, 2 * ri - ai) * w });
            }
            let delta: f64 = exact.iter().map(|t| t.value).sum();
            rep.put("delta_displayed", displayed.iter().map(|t| t.value).sum());
            rep.tables.insert("delta_exact".into(), exact);
            rep.tables.insert("delta_displayed".into(), displayed);
            finish_janson(&mut rep, mu, delta);
            Ok(rep)
        }
        JansonScenario::KrThroughPair { n, t, r, p } => {
            check_r(r)?;
            check_p(p)?;
            if t + 1 > n {
                return Err(Error::InvalidParameter(format!("|T| = {t} needs n > t, got n = {n}")));
            }
            let mut rep = BoundReport::new(
                "janson_kr_through_pair",
                &[("n", n as f64), ("t", t as f64), ("r", r as f64), ("p", p)],
            );
            let (n, t, ri) = (n as i64, t as i64, r as i64);
            let e = pairs(r);
            let mu = binom(n - 1 - t, ri - 3) * binom(t, 2) * p.powi(e - 2);
            let mut table = Vec::new();
            for b in 2..=4usize {
                for c in 2..r {
                    if c == 2 && b <= 3 {
                        continue;
                    }
                    let (bi, ci) = (b as i64, c as i64);
                    let value = binom(t, bi)
                        * binom(n - 1 - t, 2 * ri - ci - bi - 1)
                        * 3f64.powi(2 * r as i32)
                        * p.powi(2 * e - pairs(c) - b as i32);
                    table.push(TableEntry { index: vec![b, c], value });
                }
            }
            let delta = table.iter().map(|t| t.value).sum();
            rep.tables.insert("d_bc".into(), table);
            finish_janson(&mut rep, mu, delta);
            Ok(rep)
        }
    }
}

fn finish_janson(rep: &mut BoundReport, mu: f64, delta: f64) {
    let half = mu / 2.0;
    let ratio = if delta > 0.0 { mu * mu / (2.0 * delta) } else { f64::INFINITY };
    let exponent = half.min(ratio);
    rep.put("mu", mu);
    rep.put("delta", delta);
    rep.put("mu_over_2", half);
    rep.put("mu_sq_over_2delta", ratio);
    rep.put("exponent", exponent);
    rep.bound = (-exponent).exp();
    rep.regime = if half <= ratio { "mu_over_2".into() } else { "mu_sq_over_2delta".into() };
}

/// `sum_v ln((d(v)+1)!) / (d(v)+1)`, the log of the lower bound on the
/// number of acyclic orientations.
pub fn gkks_acyclic_lower(g: &Graph) -> f64 {
    (0..g.n())
        .map(|v| {
            let k = g.degree(v) + 1;
            let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
            ln_fact / k as f64
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedDangerous {
    /// `n C(2a,2) C(n-3,r-3) p^C(r,2)`.
    pub upper: f64,
    /// `n^(r-2) a^2 p^C(r,2) / r^r`.
    pub lower: f64,
    /// `p a n / (2 r^2)`.
    pub comparison: f64,
}

pub fn expected_dangerous(r: usize, n: usize, a: usize, p: f64) -> Result<ExpectedDangerous> {
    check_r(r)?;
    check_p(p)?;
    if a < 1 || a >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= a < n, got a = {a}, n = {n}")));
    }
    let (nf, af, rf) = (n as f64, a as f64, r as f64);
    let pe = p.powi(pairs(r));
    Ok(ExpectedDangerous {
        upper: nf * binom(2 * a as i64, 2) * binom(n as i64 - 3, r as i64 - 3) * pe,
        lower: nf.powi(r as i32 - 2) * af * af * pe / rf.powi(r as i32),
        comparison: p * af * nf / (2.0 * rf * rf),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    Triangles,
    Transitive(usize),
    Strongly(usize),
    CyclesConjectured(usize),
    StrongHConjectured(usize),
}

impl Statement {
    pub fn is_conjectural(self) -> bool {
        matches!(self, Statement::CyclesConjectured(_) | Statement::StrongHConjectured(_))
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Triangles => write!(f, "triangles"),
            Statement::Transitive(r) => write!(f, "transitive:{r}"),
            Statement::Strongly(r) => write!(f, "strongly:{r}"),
            Statement::CyclesConjectured(r) => write!(f, "cycles:{r}"),
            Statement::StrongHConjectured(r) => write!(f, "strong-h:{r}"),
        }
    }
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "triangles" {
            return Ok(Statement::Triangles);
        }
        let bad = || Error::InvalidParameter(format!("unknown statement {s:?}"));
        let (name, r) = s.split_once(':').ok_or_else(bad)?;
        let r: usize = r.parse().map_err(|_| bad())?;
        check_r(r)?;
        match name {
            "transitive" => Ok(Statement::Transitive(r)),
            "strongly" => Ok(Statement::Strongly(r)),
            "cycles" if r >= 4 => Ok(Statement::CyclesConjectured(r)),
            "strong-h" => Ok(Statement::StrongHConjectured(r)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoreticExponent {
    pub statement: String,
    pub n: f64,
    pub p: f64,
    pub regime: String,
    pub formula: String,
    pub value: f64,
    pub conjectural: bool,
}

/// The growth order of `log2` of the count in the regime selected by `p`.
pub fn theoretic_exponent(statement: Statement, n: f64, p: f64) -> Result<TheoreticExponent> {
    check_p(p)?;
    if !(n >= 2.0) {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let all_free = p * n * (n - 1.0) / 2.0;
    let sparse = |cut: f64, label: &str| (p < cut).then(|| (format!("p < {label}"), "p C(n,2)".to_string(), all_free));
    let (regime, formula, value) = match statement {
        Statement::Triangles => {
            sparse(n.powf(-0.5), "n^(-1/2)").unwrap_or(("p >= n^(-1/2)".into(), "n/p".into(), n / p))
        }
        Statement::Transitive(r) => {
            let rf = r as f64;
            let (lo, hi) = (n.powf(-2.0 / (rf + 1.0)), n.powf(-2.0 / (rf + 2.0)));
            sparse(lo, "n^(-2/(r+1))").unwrap_or_else(|| {
                if p <= hi {
                    (
                        "n^(-2/(r+1)) <= p <= n^(-2/(r+2))".into(),
                        "p^(2-C(r,2)) n^(4-r)".into(),
                        p.powi(2 - pairs(r)) * n.powf(4.0 - rf),
                    )
                } else {
                    ("p > n^(-2/(r+2))".into(), "n/p".into(), n / p)
                }
            })
        }
        Statement::Strongly(r) | Statement::StrongHConjectured(r) => {
            let rf = r as f64;
            sparse(n.powf(-2.0 / (rf + 1.0)), "n^(-2/(r+1))").unwrap_or((
                "p >= n^(-2/(r+1))".into(),
                "n/p^((r-1)/2)".into(),
                n / p.powf((rf - 1.0) / 2.0),
            ))
        }
        Statement::CyclesConjectured(r) => {
            let rf = r as f64;
            sparse(n.powf(-(rf - 2.0) / (rf - 1.0)), "n^(-(r-2)/(r-1))").unwrap_or((
                "p >= n^(-(r-2)/(r-1))".into(),
                "n/p^(1/(r-2))".into(),
                n / p.powf(1.0 / (rf - 2.0)),
            ))
        }
    };
    Ok(TheoreticExponent {
        statement: statement.to_string(),
        n,
        p,
        regime,
        formula,
        value,
        conjectural: statement.is_conjectural(),
    })
}

/// `b(a)` for the transitive-clique count, where `p C(n,2) = n^a` and the
/// count is `exp(n^(b+o(1)))`. Piecewise linear through
/// `(2r/(r+1), 2r/(r+1))`, `((2r+2)/(r+2), (r+4)/(r+2))` and `(2, 1)`.
pub fn b_of_a(r: usize, a: Ratio<i64>) -> Result<Ratio<i64>> {
    check_r(r)?;
    let ri = r as i64;
    let two = Ratio::from_integer(2);
    if a < Ratio::from_integer(0) || a > two {
        return Err(Error::InvalidParameter(format!("a must lie in [0, 2], got {a}")));
    }
    let first = Ratio::new(2 * ri, ri + 1);
    let second = Ratio::new(2 * ri + 2, ri + 2);
    Ok(if a <= first {
        a
    } else if a <= second {
        // exponent of p^(2-C(r,2)) n^(4-r) with p = n^(a-2)
        (a - two) * Ratio::from_integer(2 - ri * (ri - 1) / 2) + Ratio::from_integer(4 - ri)
    } else {
        Ratio::from_integer(3) - a
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum McEvent {
    /// `G(s, p)` contains no `K_r`.
    KrFreeSubset { s: usize, r: usize, p: f64 },
    /// `G(n, p)` contains a copy of the family's pattern.
    ContainsCopy { n: usize, p: f64, family: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Wilson 99% interval.
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
}

/// Seeded estimate; trial `i` draws its graph from `derive(seed, [i])`.
pub fn mc_probability(event: &McEvent, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 trials, got {trials}")));
    }
    let successes = match event {
        McEvent::KrFreeSubset { s, r, p } => {
            let (s, r, p) = (*s, *r, *p);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            (0..trials)
                .into_par_iter()
                .map(|i| Graph::gnp(s, p, rng::derive(seed, &[i])).map(|g| !g.has_clique(r)))
                .try_fold(|| 0u64, |acc, hit| hit.map(|h| acc + h as u64))
                .try_reduce(|| 0, |a, b| Ok(a + b))?
        }
        McEvent::ContainsCopy { n, p, family } => {
            let family = ForbiddenFamily::parse(family)?;
            let (n, p) = (*n, *p);
            (0..trials)
                .into_par_iter()
                .map(|i| {
                    let g = Graph::gnp(n, p, rng::derive(seed, &[i]))?;
                    Ok(compile_constraints(&g, &family)?.len() > 0)
                })
                .try_fold(|| 0u64, |acc, hit: Result<bool>| hit.map(|h| acc + h as u64))
                .try_reduce(|| 0, |a, b| Ok(a + b))?
        }
    };
    Ok(wilson(successes, trials))
}

pub fn wilson(successes: u64, trials: u64) -> McEstimate {
    let nf = trials as f64;
    let est = successes as f64 / nf;
    let z2 = Z_99 * Z_99;
    let denom = 1.0 + z2 / nf;
    let center = (est + z2 / (2.0 * nf)) / denom;
    let half = Z_99 / denom * (est * (1.0 - est) / nf + z2 / (4.0 * nf * nf)).sqrt();
    McEstimate {
        trials,
        successes,
        estimate: est,
        lower: (center - half).max(0.0),
        upper: (center + half).min(1.0),
        half_width: half,
    }
}

impl Thresholds {
    pub fn to_report(&self) -> BoundReport {
        let mut rep = BoundReport::new("thresholds", &[("r", self.r as f64), ("n", self.n), ("p", self.p), ("C", self.c)]);
        for (k, v) in [
            ("t_r", self.t_r),
            ("t_r_sparse", self.t_r_sparse),
            ("t_r_dense", self.t_r_dense),
            ("t_cutoff", self.t_cutoff),
            ("s_r", self.s_r),
            ("s_r_sparse", self.s_r_sparse),
            ("s_r_dense", self.s_r_dense),
            ("s_cutoff", self.s_cutoff),
        ] {
            rep.put(k, v);
        }
        rep.bound = self.t_r;
        let name = |b: Branch| if b == Branch::Sparse { "sparse" } else { "dense" };
        rep.regime = format!("t_r {}, s_r {}", name(self.t_branch), name(self.s_branch));
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::count_acyclic;
    use crate::graph::VertexOrder;
    use num_traits::Signed;
    use rand::Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn threshold_examples() {
        let n = 10f64.exp();
        let t = thresholds(4, n, 0.5, 1.0).unwrap();
        assert_eq!(t.t_branch, Branch::Dense);
        assert!(close(t.t_r, 20.0, 1e-12));
        let s = thresholds(3, 1000.0, 1.0, 1.0).unwrap();
        assert_eq!(s.s_branch, Branch::Dense);
        assert!(close(s.s_r, 1000f64.ln(), 1e-12));
        for r in 4..=6 {
            let n = 1e6f64;
            let p = n.powf(-2.0 / (r as f64 + 2.0));
            let t = thresholds(r, n, p, 1.0).unwrap();
            assert_eq!(t.t_branch, Branch::Sparse);
            assert!(close(t.t_r_sparse, t.t_r_dense, 1e-9), "{t:?}");
        }
        assert!(thresholds(2, 10.0, 0.5, 1.0).is_err());
        assert!(thresholds(3, 10.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn janson_examples() {
        let rep = janson_exponent(&JansonScenario::KrInSet { s: 3, r: 3, p: 1.0 }).unwrap();
        assert_eq!(rep.value("mu"), Some(1.0));
        assert_eq!(rep.value("delta"), Some(0.0));
        assert_eq!(rep.value("delta_displayed"), Some(0.0));
        assert!(close(rep.bound, (-0.5f64).exp(), 1e-15));
        let rep = janson_exponent(&JansonScenario::KrInSet { s: 5, r: 3, p: 0.5 }).unwrap();
        assert!(close(rep.value("mu").unwrap(), 1.25, 1e-15));
        let rep = janson_exponent(&JansonScenario::KrThroughPair { n: 50, t: 1, r: 4, p: 0.3 }).unwrap();
        assert_eq!(rep.value("mu"), Some(0.0));
        assert_eq!(rep.bound, 1.0);
        let idx: Vec<Vec<usize>> = rep.tables["d_bc"].iter().map(|e| e.index.clone()).collect();
        assert_eq!(idx, vec![vec![2, 3], vec![3, 3], vec![4, 2], vec![4, 3]]);
    }

    fn subsets(s: usize, r: usize) -> Vec<u32> {
        (0u32..1 << s).filter(|m| m.count_ones() as usize == r).collect()
    }

    #[test]
    fn kr_in_set_matches_enumeration() {
        for (s, r, p) in [(6, 3, 0.4f64), (7, 4, 0.6), (8, 3, 0.3), (8, 5, 0.7)] {
            let sets = subsets(s, r);
            let mu: f64 = sets.len() as f64 * p.powi(pairs(r));
            let mut delta = 0.0;
            for &a in &sets {
                for &b in &sets {
                    let shared = (a & b).count_ones() as usize;
                    if a != b && shared >= 2 {
                        delta += p.powi(2 * pairs(r) - pairs(shared));
                    }
                }
            }
            let rep = janson_exponent(&JansonScenario::KrInSet { s, r, p }).unwrap();
            assert!(close(rep.value("mu").unwrap(), mu, 1e-12));
            assert!(close(rep.value("delta").unwrap(), delta, 1e-12));
            assert!(rep.value("delta_displayed").unwrap() <= delta);
        }
    }

    #[test]
    fn through_pair_delta_dominates_enumeration() {
        // v = 0, T = {1..t}, others t+1..n-1
        for (n, t, r, p) in [(9, 3, 4, 0.5f64), (10, 4, 4, 0.3), (9, 3, 5, 0.6)] {
            let t_mask: u32 = ((1 << t) - 1) << 1;
            let fam: Vec<u32> = subsets(n, r).into_iter().filter(|m| m & 1 == 1 && (m & t_mask).count_ones() == 2).collect();
            // F(S) drops the edges from v to T
            let f = |m: u32| {
                let mut set = std::collections::BTreeSet::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if m >> i & 1 == 1 && m >> j & 1 == 1 && !(i == 0 && t_mask >> j & 1 == 1) {
                            set.insert((i, j));
                        }
                    }
                }
                set
            };
            let mu: f64 = fam.iter().map(|&m| p.powi(f(m).len() as i32)).sum();
            let mut delta = 0.0;
            for &a in &fam {
                for &b in &fam {
                    let (fa, fb) = (f(a), f(b));
                    if a != b && fa.intersection(&fb).next().is_some() {
                        delta += p.powi(fa.union(&fb).count() as i32);
                    }
                }
            }
            let rep = janson_exponent(&JansonScenario::KrThroughPair { n, t, r, p }).unwrap();
            assert!(close(rep.value("mu").unwrap(), mu, 1e-12));
            assert!(rep.value("delta").unwrap() >= delta);
        }
    }

    #[test]
    fn gkks_bounds_acyclic_count() {
        assert!(close(gkks_acyclic_lower(&Graph::complete(3)), 6f64.ln(), 1e-14));
        assert!(close(gkks_acyclic_lower(&Graph::path(2)), 2f64.ln(), 1e-14));
        let pet = Graph::petersen();
        assert!(gkks_acyclic_lower(&pet) <= count_acyclic(&pet).unwrap().log2() * 2f64.ln());
        let mut r = rng::stream(81, &[]);
        let mut checked = 0;
        while checked < 100 {
            let g = Graph::gnp(r.gen_range(2..=9), r.gen_range(0.2..0.9), r.gen()).unwrap();
            if g.m() > 20 {
                continue;
            }
            let exact = count_acyclic(&g).unwrap().to_u64().unwrap() as f64;
            assert!(gkks_acyclic_lower(&g).exp() <= exact * (1.0 + 1e-12));
            checked += 1;
        }
    }

    #[test]
    fn expected_dangerous_examples() {
        let e = expected_dangerous(3, 100, 5, 0.1).unwrap();
        assert!(close(e.upper, 4.5, 1e-12));
        assert!(expected_dangerous(3, 100, 0, 0.1).is_err());
        let mut r = rng::stream(82, &[]);
        for _ in 0..100 {
            let rr = r.gen_range(3..=7);
            let n = r.gen_range(rr.max(3)..400);
            let a = r.gen_range(1..n);
            let e = expected_dangerous(rr, n, a, r.gen_range(0.01..1.0)).unwrap();
            assert!(e.upper >= e.lower, "{rr} {n} {a} {e:?}");
        }
    }

    #[test]
    fn dangerous_triangles_stay_below_upper() {
        let (n, p, a) = (200, 0.1, 10);
        let order = VertexOrder::identity(n);
        let mut total = 0usize;
        for sample in 0..50 {
            let g = Graph::gnp(n, p, rng::derive(83, &[sample])).unwrap();
            let short = |u: usize, v: usize| order.length(u, v) < a;
            for u in 0..n {
                for &v in g.neighbors(u).iter().filter(|&&v| v > u) {
                    for &w in g.neighbors(v).iter().filter(|&&w| w > v && g.has_edge(u, w)) {
                        let k = [short(u, v), short(v, w), short(u, w)].iter().filter(|&&s| s).count();
                        total += (k >= 2) as usize;
                    }
                }
            }
        }
        let mean = total as f64 / 50.0;
        assert!(mean <= expected_dangerous(3, n, a, p).unwrap().upper);
    }

    #[test]
    fn b_of_areakpoints_are_exact() {
        for r in 3..=10i64 {
            let ru = r as usize;
            let x1 = Ratio::new(2 * r, r + 1);
            let x2 = Ratio::new(2 * r + 2, r + 2);
            assert_eq!(b_of_a(ru, x1).unwrap(), x1);
            assert_eq!(b_of_a(ru, x2).unwrap(), Ratio::new(r + 4, r + 2));
            assert_eq!(b_of_a(ru, Ratio::from_integer(2)).unwrap(), Ratio::from_integer(1));
            assert_eq!(b_of_a(ru, Ratio::from_integer(0)).unwrap(), Ratio::from_integer(0));
            // continuity from the right of each breakpoint
            let eps = Ratio::new(1, 1_000_000);
            for x in [x1, x2] {
                let jump = b_of_a(ru, x + eps).unwrap() - b_of_a(ru, x).unwrap();
                assert!(jump.abs() < Ratio::new(1, 1000), "r = {r}");
            }
        }
        assert!(b_of_a(4, Ratio::new(5, 2)).is_err());
    }

    #[test]
    fn regime_exponents() {
        let e = theoretic_exponent(Statement::Triangles, 1e6, 1e-2).unwrap();
        assert!(close(e.value, 1e8, 1e-12));
        assert_eq!(e.formula, "n/p");
        let sparse = theoretic_exponent(Statement::Triangles, 1e6, 1e-4).unwrap();
        assert_eq!(sparse.formula, "p C(n,2)");
        let mid = theoretic_exponent(Statement::Transitive(4), 1e6, 1e-2).unwrap();
        assert_eq!(mid.formula, "p^(2-C(r,2)) n^(4-r)");
        assert!(close(mid.value, 1e8, 1e-12));
        let c = theoretic_exponent("cycles:4".parse().unwrap(), 1e6, 1e-2).unwrap();
        assert!(c.conjectural);
        assert!(close(c.value, 1e7, 1e-12));
        assert!("cycles:3".parse::<Statement>().is_err());
    }

    #[test]
    fn monte_carlo_examples() {
        let all = mc_probability(&McEvent::KrFreeSubset { s: 3, r: 3, p: 1.0 }, 1000, 1).unwrap();
        assert_eq!(all.estimate, 0.0);
        let half = mc_probability(&McEvent::KrFreeSubset { s: 3, r: 3, p: 0.5 }, 20_000, 2).unwrap();
        assert!(half.lower <= 0.875 && 0.875 <= half.upper, "{half:?}");
        let m = mc_probability(&McEvent::KrFreeSubset { s: 12, r: 3, p: 0.4 }, 20_000, 3).unwrap();
        let bound = janson_exponent(&JansonScenario::KrInSet { s: 12, r: 3, p: 0.4 }).unwrap().bound;
        assert!(m.estimate <= bound + 3.0 * m.half_width);
        let c = McEvent::ContainsCopy { n: 6, p: 1.0, family: "c3".into() };
        assert_eq!(mc_probability(&c, 100, 4).unwrap().estimate, 1.0);
        assert!(mc_probability(&c, 99, 4).is_err());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let e = McEvent::KrFreeSubset { s: 8, r: 3, p: 0.3 };
        assert_eq!(mc_probability(&e, 500, 9).unwrap(), mc_probability(&e, 500, 9).unwrap());
    }
}
