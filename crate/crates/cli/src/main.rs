use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;

use orientcount::bounds::{
    expected_dangerous, b_of_a, gkks_acyclic_lower, janson_exponent, mc_probability, theoretic_exponent, thresholds,
    BoundReport, JansonScenario, McEvent, Statement,
};
use orientcount::certify::{build_forcing_certificate, verify_certificate_with, ForcingCertificate};
use orientcount::count::{count_report, Budgets, CountMethod};
use orientcount::experiment::{run_experiment, to_csv, ExperimentBudgets, ExperimentConfig, ExperimentMode};
use orientcount::graph::GraphKind;
use orientcount::validation::{run_validation, Level};
use orientcount::witness::{build_witness, default_omega, recommended_cutoff, verify_witness_json, WitnessJson};
use orientcount::{compile_constraints, Digraph, Error, ForbiddenFamily, Graph, PartialOrientation, VertexOrder};

/// Count, bound and certify orientations of graphs that avoid a forbidden
/// oriented pattern.
///
/// Families: c3, cycle:R, transitive:R, strong:R, oriented:FILE, or
/// oriented:@N:U>V,... for an inline digraph.
#[derive(Parser, Debug)]
#[command(name = "orientcount", version, about)]
struct Cli {
    /// Seed for every random choice; required by `gen` and `experiment`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ORIENTCOUNT_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(flatten)]
    budgets: BudgetArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Backtracking nodes for exact counts.
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Constraint copies compiled per graph.
    #[arg(long, global = true)]
    budget_copies: Option<usize>,
    /// Largest edge count the brute-force oracle accepts.
    #[arg(long, global = true)]
    budget_oracle_edges: Option<usize>,
    /// Memoised subgraphs for the acyclic counter.
    #[arg(long, global = true)]
    budget_acyclic: Option<usize>,
    /// Largest constraint component an experiment cell counts exactly.
    #[arg(long, global = true)]
    budget_component_edges: Option<usize>,
}

impl BudgetArgs {
    fn count(&self) -> Budgets {
        let d = Budgets::default();
        Budgets {
            nodes: self.budget_nodes.unwrap_or(d.nodes),
            copies: self.budget_copies.unwrap_or(d.copies),
            oracle_edges: self.budget_oracle_edges.unwrap_or(d.oracle_edges),
            acyclic_states: self.budget_acyclic.unwrap_or(d.acyclic_states),
        }
    }

    fn experiment(&self) -> ExperimentBudgets {
        let d = ExperimentBudgets::default();
        ExperimentBudgets {
            nodes: self.budget_nodes.unwrap_or(d.nodes),
            copies: self.budget_copies.unwrap_or(d.copies),
            component_edges: self.budget_component_edges.unwrap_or(d.component_edges),
            acyclic_states: self.budget_acyclic.unwrap_or(d.acyclic_states),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a graph in text format.
    Gen(GenArgs),
    /// Count family-avoiding orientations exactly.
    Count(CountArgs),
    /// Build or verify an ordered witness (lower bound).
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Build or verify a forcing-set certificate (upper bound).
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Evaluate closed-form bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Run a grid of G(n, p) samples and write CSV.
    Experiment(ExperimentArgs),
    /// Run the acceptance suite.
    Validate {
        /// Reduced sample sizes.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Gnp,
    Complete,
    Cycle,
    Path,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = Kind::Gnp)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Edge probability for `gnp`.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Restricted,
    Oracle,
    Acyclic,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Not needed for `--method acyclic`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Restricted)]
    method: Method,
}

#[derive(Subcommand, Debug)]
enum WitnessCommand {
    Build {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        family: String,
        /// Cutoff; defaults to the family's recommended value.
        #[arg(long)]
        a: Option<usize>,
        /// Density for the recommended cutoff; defaults to the edge density.
        #[arg(long)]
        p: Option<f64>,
        /// Defaults to ln n.
        #[arg(long)]
        omega: Option<f64>,
        /// File with a vertex permutation; defaults to 0..n.
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum CertifyCommand {
    Build {
        #[arg(long)]
        graph: PathBuf,
        /// Oriented graph in digraph text format.
        #[arg(long)]
        orientation: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        orientation: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        /// Also require exactly one extension, within this node budget.
        #[arg(long)]
        unique_budget: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scenario {
    KrInSet,
    KrThroughPair,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Event {
    KrFree,
    ContainsCopy,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Clique thresholds t_r and s_r.
    Thresholds {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Janson parameters and bound.
    Janson {
        #[arg(long, value_enum)]
        scenario: Scenario,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: f64,
        /// Set size for `kr-in-set`.
        #[arg(long)]
        s: Option<usize>,
        /// Vertex count for `kr-through-pair`.
        #[arg(long)]
        n: Option<usize>,
        /// |T| for `kr-through-pair`.
        #[arg(long)]
        t: Option<usize>,
    },
    /// Degree-sequence lower bound on acyclic orientations.
    Gkks {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Regime exponent of a statement, or b(a) with `--density-exponent`.
    Exponent {
        /// triangles, transitive:R, strongly:R, cycles:R or strong-h:R.
        #[arg(long)]
        statement: String,
        #[arg(long, required_unless_present = "density_exponent")]
        n: Option<f64>,
        #[arg(long, required_unless_present = "density_exponent")]
        p: Option<f64>,
        /// Exact rational `a` for b(a) of the transitive statement.
        #[arg(long)]
        density_exponent: Option<String>,
    },
    /// Expected dangerous-copy bounds.
    Dangerous {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        p: f64,
    },
    /// Monte Carlo probability with a 99% Wilson interval.
    Mc {
        #[arg(long, value_enum)]
        event: Event,
        /// Vertices of the sampled graph.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// Clique size for `kr-free`.
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Family for `contains-copy`.
        #[arg(long, default_value = "c3")]
        family: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    family: String,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Comma-separated edge probabilities.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    /// Samples per cell (trials per cell in janson mode).
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Sandwich)]
    mode: ModeArg,
    #[arg(long)]
    omega: Option<f64>,
    /// Valid orientations certified per cell.
    #[arg(long, default_value_t = 3)]
    certified_orientations: usize,
    /// Add wall-clock columns (output then depends on the machine).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    diagnostics_dir: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Sandwich,
    Regime,
    Janson,
    Acyclic,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let input_error = e.downcast_ref::<Error>().is_some_and(|e| {
                matches!(
                    e,
                    Error::InvalidVertex { .. }
                        | Error::SelfLoop(_)
                        | Error::DuplicateEdge(..)
                        | Error::InvalidProbability(_)
                        | Error::InvalidParameter(_)
                        | Error::Parse { .. }
                        | Error::UnsupportedFamily(_)
                        | Error::NotATournament(_)
                        | Error::OrientationMismatch(_)
                )
            });
            ExitCode::from(if input_error { 2 } else { 1 })
        }
    }
}

fn usage_error(kind: ErrorKind, msg: &str) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn required_seed(cli: &Cli, what: &str) -> u64 {
    cli.seed.unwrap_or_else(|| usage_error(ErrorKind::MissingRequiredArgument, &format!("`{what}` needs --seed")))
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    Ok(Graph::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?)
}

fn read_orientation(g: &Graph, path: &Path) -> anyhow::Result<PartialOrientation> {
    let d = Digraph::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(PartialOrientation::from_digraph(g, &d)?)
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match out.write_all(text.as_bytes()).and_then(|_| out.write_all(nl.as_bytes())) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn no_csv(cli: &Cli, what: &str) {
    if cli.format == Format::Csv {
        usage_error(ErrorKind::InvalidValue, &format!("--format csv is not available for `{what}`"));
    }
}

fn report_text(rep: &BoundReport) -> String {
    let mut lines = vec![format!("{} ({})", rep.kind, rep.regime)];
    lines.extend(rep.inputs.iter().map(|(k, v)| format!("  {k} = {v}")));
    lines.extend(rep.values.iter().map(|(k, v)| format!("{k} = {v}")));
    for (name, rows) in &rep.tables {
        for row in rows {
            let idx: Vec<String> = row.index.iter().map(usize::to_string).collect();
            lines.push(format!("{name}({}) = {}", idx.join(","), row.value));
        }
    }
    lines.push(format!("bound = {}", rep.bound));
    lines.join("\n")
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Gen(a) => {
            let seed = required_seed(cli, "gen");
            no_csv(cli, "gen");
            let kind = match a.kind {
                Kind::Gnp => GraphKind::Gnp { n: a.n, p: a.p, seed },
                Kind::Complete => GraphKind::Complete(a.n),
                Kind::Cycle => GraphKind::Cycle(a.n),
                Kind::Path => GraphKind::Path(a.n),
            };
            emit(a.output.as_deref(), &Graph::generate(&kind)?.to_text())?;
        }
        Command::Count(a) => {
            let g = read_graph(&a.graph)?;
            let family = a.family.as_deref().map(ForbiddenFamily::parse).transpose()?;
            let method = match a.method {
                Method::Restricted => CountMethod::Restricted,
                Method::Oracle => CountMethod::Oracle,
                Method::Acyclic => CountMethod::Acyclic,
            };
            let rep = count_report(&g, family.as_ref(), method, &cli.budgets.count())?;
            let text = match cli.format {
                Format::Text => rep.count.to_string(),
                Format::Json => json(&rep)?,
                Format::Csv => format!(
                    "graph_hash,family,count,log2_count,method\n{},{},{},{:.6},{}",
                    rep.graph_hash,
                    rep.family.replace(',', ";"),
                    rep.count,
                    rep.log2_count,
                    rep.method
                ),
            };
            emit(None, &text)?;
        }
        Command::Witness(WitnessCommand::Build { graph, family, a, p, omega, order, output }) => {
            no_csv(cli, "witness build");
            let g = read_graph(graph)?;
            let family = ForbiddenFamily::parse(family)?;
            let order = match order {
                Some(path) => {
                    let perm = read(path)?
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().with_context(|| format!("bad vertex {t:?} in order file")))
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    VertexOrder::from_permutation(perm)?
                }
                None => VertexOrder::identity(g.n()),
            };
            let a = match a {
                Some(a) => *a,
                None => {
                    let n = g.n();
                    let density = if n < 2 { 1.0 } else { g.m() as f64 / (n * (n - 1) / 2) as f64 };
                    let p = p.unwrap_or(density);
                    if p <= 0.0 {
                        bail!(Error::InvalidParameter("graph has no edges; pass --a".into()));
                    }
                    recommended_cutoff(&family, n, p, omega.unwrap_or_else(|| default_omega(n)))?.a
                }
            };
            let w = build_witness(&g, &order, a, &family)?;
            emit(output.as_deref(), &json(&w.to_json(&g))?)?;
        }
        Command::Witness(WitnessCommand::Verify { graph, witness }) => {
            no_csv(cli, "witness verify");
            let g = read_graph(graph)?;
            let wj: WitnessJson = serde_json::from_str(&read(witness)?).context("parsing witness")?;
            let check = verify_witness_json(&g, &wj)?;
            emit(None, &json(&check)?)?;
            if !check.is_valid() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Certify(CertifyCommand::Build { graph, orientation, family, output }) => {
            no_csv(cli, "certify build");
            let g = read_graph(graph)?;
            let po = read_orientation(&g, orientation)?;
            let cert = build_forcing_certificate(&g, &po, &ForbiddenFamily::parse(family)?)?;
            emit(output.as_deref(), &json(&cert)?)?;
        }
        Command::Certify(CertifyCommand::Verify { graph, orientation, certificate, unique_budget }) => {
            no_csv(cli, "certify verify");
            let g = read_graph(graph)?;
            let po = read_orientation(&g, orientation)?;
            let cert: ForcingCertificate = serde_json::from_str(&read(certificate)?).context("parsing certificate")?;
            let cs = compile_constraints(&g, &ForbiddenFamily::parse(&cert.family)?)?;
            let check = verify_certificate_with(&cs, &cert, &po, *unique_budget)?;
            emit(None, &json(&check)?)?;
            if !check.is_valid() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bounds(b) => {
            no_csv(cli, "bounds");
            bounds(cli, b)?;
        }
        Command::Experiment(a) => {
            let seed = required_seed(cli, "experiment");
            let mode = match a.mode {
                ModeArg::Sandwich => ExperimentMode::Sandwich,
                ModeArg::Regime => ExperimentMode::Regime,
                ModeArg::Janson => ExperimentMode::Janson,
                ModeArg::Acyclic => ExperimentMode::Acyclic,
            };
            let mut cfg = ExperimentConfig::new(ForbiddenFamily::parse(&a.family)?, a.n.clone(), a.p.clone(), a.samples, seed, mode);
            cfg.budgets = cli.budgets.experiment();
            cfg.omega = a.omega;
            cfg.certified_orientations = a.certified_orientations;
            cfg.timings = a.timings;
            cfg.diagnostics_dir = a.diagnostics_dir.clone();
            cfg.output = a.output.clone();
            let res = run_experiment(&cfg)?;
            match (cli.format, &a.output) {
                (Format::Json, _) => emit(None, &json(&res)?)?,
                (_, None) => emit(None, &to_csv(&cfg, &res))?,
                (_, Some(p)) => eprintln!("wrote {} rows to {}", res.rows.len(), p.display()),
            }
        }
        Command::Validate { quick } => {
            no_csv(cli, "validate");
            let level = if *quick { Level::Quick } else { Level::Full };
            let text = cli.format == Format::Text;
            let report = run_validation(level, |r| {
                if text {
                    println!("{}", r.line());
                }
            });
            if !text {
                emit(None, &json(&report)?)?;
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds(cli: &Cli, cmd: &BoundsCommand) -> anyhow::Result<()> {
    let as_json = cli.format == Format::Json;
    let text = match cmd {
        BoundsCommand::Thresholds { r, n, p, c } => {
            let t = thresholds(*r, *n, *p, *c)?;
            if as_json {
                json(&t)?
            } else {
                report_text(&t.to_report())
            }
        }
        BoundsCommand::Janson { scenario, r, p, s, n, t } => {
            let need = |v: Option<usize>, flag: &str| {
                v.unwrap_or_else(|| usage_error(ErrorKind::MissingRequiredArgument, &format!("this scenario needs {flag}")))
            };
            let sc = match scenario {
                Scenario::KrInSet => JansonScenario::KrInSet { s: need(*s, "--s"), r: *r, p: *p },
                Scenario::KrThroughPair => JansonScenario::KrThroughPair { n: need(*n, "--n"), t: need(*t, "--t"), r: *r, p: *p },
            };
            let rep = janson_exponent(&sc)?;
            if as_json {
                json(&rep)?
            } else {
                report_text(&rep)
            }
        }
        BoundsCommand::Gkks { graph } => {
            let g = read_graph(graph)?;
            let ln = gkks_acyclic_lower(&g);
            let v = serde_json::json!({ "ln_lower": ln, "log2_lower": ln / std::f64::consts::LN_2 });
            if as_json {
                json(&v)?
            } else {
                format!("ln_lower = {ln}\nlog2_lower = {}", ln / std::f64::consts::LN_2)
            }
        }
        BoundsCommand::Exponent { statement, n, p, density_exponent } => {
            let st: Statement = statement.parse()?;
            if let Some(a) = density_exponent {
                let r = match st {
                    Statement::Triangles => 3,
                    Statement::Transitive(r) => r,
                    _ => bail!(Error::InvalidParameter("--density-exponent applies to triangles or transitive:R".into())),
                };
                let a: Ratio<i64> = a.parse().map_err(|_| Error::InvalidParameter(format!("bad rational {a:?}")))?;
                let b = b_of_a(r, a)?;
                let v = serde_json::json!({ "r": r, "a": a.to_string(), "b": b.to_string() });
                if as_json {
                    json(&v)?
                } else {
                    format!("b({a}) = {b}")
                }
            } else {
                let (n, p) = (n.expect("required by clap"), p.expect("required by clap"));
                let e = theoretic_exponent(st, n, p)?;
                if as_json {
                    json(&e)?
                } else {
                    format!(
                        "{} = {}\nregime: {}{}",
                        e.formula,
                        e.value,
                        e.regime,
                        if e.conjectural { " (conjectural)" } else { "" }
                    )
                }
            }
        }
        BoundsCommand::Dangerous { r, n, a, p } => {
            let e = expected_dangerous(*r, *n, *a, *p)?;
            if as_json {
                json(&e)?
            } else {
                format!("upper = {}\nlower = {}\npan/2r^2 = {}", e.upper, e.lower, e.comparison)
            }
        }
        BoundsCommand::Mc { event, n, p, r, family, trials } => {
            let ev = match event {
                Event::KrFree => McEvent::KrFreeSubset { s: *n, r: *r, p: *p },
                Event::ContainsCopy => McEvent::ContainsCopy { n: *n, p: *p, family: family.clone() },
            };
            let est = mc_probability(&ev, *trials, cli.seed.unwrap_or(0))?;
            if as_json {
                json(&est)?
            } else {
                format!("estimate = {} +- {} (99% Wilson, {} trials)", est.estimate, est.half_width, est.trials)
            }
        }
    };
    emit(None, &text)
}
