use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use loclambda::catalog::{build_phase_space, CatalogName, PhaseSpaceCatalog};
use loclambda::io;
use loclambda::local::{classify, is_maximal};
use loclambda::lp::LpOptions;
use loclambda::mbpc::{born_oracle, magic_cluster, simulate, MagicClusterSpec, SimulationMode};
use loclambda::polytope::{
    enumerate_vertices, from_ns_table, full_lambda_facets, is_vertex, local_lambda_facets, membership, to_ns_table,
    DdOptions, FacetSystem,
};
use loclambda::robustness::robustness_report;
use loclambda::{Error, ExactOperator, FloatOperator, NumericMode, Rational};

mod repro;

#[derive(Parser)]
#[command(name = "loclambda", version, about = "Local Lambda polytopes, locally closed phase spaces and sampling simulation")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the facet system of the local (or full) Lambda polytope.
    Facets(PolytopeArgs),
    /// Enumerate polytope vertices exactly.
    Vertices(VertexArgs),
    /// Membership of an operator; exit 2 when outside.
    Member {
        #[arg(long)]
        op: PathBuf,
        /// Facet file; defaults to the local facets for the operator's n.
        #[arg(long)]
        facets: Option<PathBuf>,
    },
    /// Exact vertex test; exit 2 when not a vertex.
    VertexCheck {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        facets: Option<PathBuf>,
    },
    /// Validate and classify a local pair.
    Classify {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Convert between operators and non-signaling behaviour tables.
    Ns {
        #[command(subcommand)]
        command: NsCommand,
    },
    /// Build a phase-space catalog.
    PhaseSpace {
        #[arg(long, value_enum)]
        name: NameArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robustness of a state over a catalog; writes the quasi-distribution.
    Robustness {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        catalog: CatalogArgs,
        /// Largest accepted reconstruction residual.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prepare states.
    State {
        #[command(subcommand)]
        command: StateCommand,
    },
    /// Simulate an adaptive measurement schedule.
    Simulate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Sample)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        /// Required for sample and quasi modes.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact outcome distribution from dense matrices.
    Oracle {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute reference tables.
    Repro {
        #[command(subcommand)]
        command: ReproCommand,
    },
}

#[derive(Args)]
struct PolytopeArgs {
    #[arg(long)]
    n: usize,
    /// All stabilizer states instead of local ones.
    #[arg(long)]
    full_stab: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VertexArgs {
    #[command(flatten)]
    polytope: PolytopeArgs,
    /// Abort once the working ray list exceeds this size (exit 3).
    #[arg(long, default_value_t = DdOptions::default().max_rays)]
    max_rays: usize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CatalogArgs {
    /// Catalog file written by `phase-space`.
    #[arg(long)]
    phase_space: Option<PathBuf>,
    /// Build a named catalog for the state's qubit count.
    #[arg(long, value_enum)]
    name: Option<NameArg>,
}

#[derive(Subcommand)]
enum NsCommand {
    ToTable {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    ToOp {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StateCommand {
    /// `E(G) T^U |+>^n`.
    MagicCluster {
        #[arg(long)]
        graph: PathBuf,
        /// 1-based vertices carrying T, comma separated, or `all`.
        #[arg(long, default_value = "")]
        magic: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReproCommand {
    /// Robustness of the 3-qubit path and triangle magic cluster states.
    Table1,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "UPPER")]
enum NameArg {
    Det,
    Cnc,
    Lc1,
    Lc2,
    Maxw,
    Stab,
    Vert,
}

impl From<NameArg> for CatalogName {
    fn from(n: NameArg) -> Self {
        match n {
            NameArg::Det => CatalogName::Det,
            NameArg::Cnc => CatalogName::Cnc,
            NameArg::Lc1 => CatalogName::Lc1,
            NameArg::Lc2 => CatalogName::Lc2,
            NameArg::Maxw => CatalogName::Maxw,
            NameArg::Stab => CatalogName::Stab,
            NameArg::Vert => CatalogName::Vert,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sample,
    Exact,
    Quasi,
}

impl From<ModeArg> for SimulationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sample => SimulationMode::Sample,
            ModeArg::Exact => SimulationMode::Exact,
            ModeArg::Quasi => SimulationMode::Quasi,
        }
    }
}

/// What a command reports: a human summary, its JSON form, and whether the
/// result was negative (exit 2).
pub struct Report {
    pub text: String,
    pub json: Value,
    pub negative: bool,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Report { text: text.into(), json, negative: false }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible | Error::OutsidePolytope(_) | Error::Unbounded => 2,
        Error::ResourceGuard(_) | Error::TooManyQubits { .. } | Error::IterationCap(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(r) => {
            if cli.json {
                print!("{}", io::to_canonical_string(&r.json));
            } else {
                println!("{}", r.text);
            }
            ExitCode::from(if r.negative { 2 } else { 0 })
        }
        Err(e) => {
            if cli.json {
                print!("{}", io::to_canonical_string(&json!({ "error": e.to_string(), "exit": exit_code(&e) })));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn save(out: &Option<PathBuf>, v: &Value) -> loclambda::Result<String> {
    match out {
        Some(p) => {
            io::write_json(p, v)?;
            Ok(format!(" -> {}", p.display()))
        }
        None => Ok(String::new()),
    }
}

fn polytope(n: usize, full: bool) -> loclambda::Result<FacetSystem> {
    if full {
        full_lambda_facets(n)
    } else {
        local_lambda_facets(n)
    }
}

fn facets_for(path: &Option<PathBuf>, n: usize) -> loclambda::Result<FacetSystem> {
    match path {
        Some(p) => {
            let sys = io::facets_from_json(&io::read_json(p)?)?;
            if sys.n() != n {
                return Err(Error::DimensionMismatch(sys.n(), n));
            }
            Ok(sys)
        }
        None => local_lambda_facets(n),
    }
}

fn read_exact(path: &Path) -> loclambda::Result<ExactOperator> {
    io::operator_from_json(&io::read_json(path)?)
}

fn read_float(path: &Path) -> loclambda::Result<FloatOperator> {
    io::operator_from_json(&io::read_json(path)?)
}

fn load_catalog(args: &CatalogArgs, n: usize) -> loclambda::Result<PhaseSpaceCatalog> {
    match (&args.phase_space, args.name) {
        (Some(p), _) => io::catalog_from_json(&io::read_json(p)?),
        (None, Some(name)) => build_phase_space(name.into(), n),
        (None, None) => Err(Error::Invalid("give --phase-space or --name".into())),
    }
}

fn run(cmd: Command) -> loclambda::Result<Report> {
    match cmd {
        Command::Facets(a) => {
            let sys = polytope(a.n, a.full_stab)?;
            let v = io::facets_to_json(&sys);
            let dest = save(&a.out, &v)?;
            Ok(Report::ok(format!("{} facets for n = {}{dest}", sys.len(), a.n), v))
        }
        Command::Vertices(a) => {
            let sys = polytope(a.polytope.n, a.polytope.full_stab)?;
            let vs = enumerate_vertices(&sys, &DdOptions { max_rays: a.max_rays })?;
            let v = io::vertex_set_to_json(vs.n(), vs.vertices());
            let dest = save(&a.polytope.out, &v)?;
            let text = format!("{} vertices for n = {}{dest}", vs.len(), vs.n());
            Ok(Report { text, json: json!({ "n": vs.n(), "count": vs.len() }), negative: false })
        }
        Command::Member { op, facets } => {
            let doc = io::read_json(&op)?;
            let (status, min_slack, violated) = match io::operator_mode(&doc)? {
                NumericMode::Rational => {
                    let a: ExactOperator = io::operator_from_json(&doc)?;
                    let r = membership(&a, &facets_for(&facets, a.n())?)?;
                    (r.status, io::JsonScalar::to_json(&r.min_slack), r.violated)
                }
                NumericMode::Double => {
                    let a: FloatOperator = io::operator_from_json(&doc)?;
                    let r = membership(&a, &facets_for(&facets, a.n())?)?;
                    (r.status, Value::from(r.min_slack), r.violated)
                }
            };
            let text = format!("{} (min slack {min_slack}, {} violated)", status.as_str(), violated.len());
            let json = json!({ "status": status.as_str(), "min_slack": min_slack, "violated": violated });
            Ok(Report { text, json, negative: !status.is_member() })
        }
        Command::VertexCheck { op, facets } => {
            let a = read_exact(&op)?;
            let sys = facets_for(&facets, a.n())?;
            let inside = membership(&a, &sys)?.status.is_member();
            let vertex = inside && is_vertex(&a, &sys)?;
            let text = if vertex { "vertex" } else if inside { "not a vertex" } else { "outside" };
            Ok(Report { text: text.into(), json: json!({ "vertex": vertex, "member": inside }), negative: !vertex })
        }
        Command::Classify { pair } => {
            let p = io::standalone_pair_from_json(&io::read_json(&pair)?)?;
            let classes: Vec<&str> = p.classes().iter().map(|c| c.as_str()).collect();
            let maximal = is_maximal(&p)?;
            let vertex = is_vertex(&p.operator::<Rational>(), &local_lambda_facets(p.n())?)?;
            let text = format!(
                "class {} (tags {}), |omega| = {}, maximal {maximal}, vertex {vertex}",
                classify(&p).as_str(),
                classes.join(","),
                p.omega().len()
            );
            let json = json!({
                "class": classify(&p).as_str(),
                "classes": classes,
                "size": p.omega().len(),
                "maximal": maximal,
                "vertex": vertex,
            });
            Ok(Report::ok(text, json))
        }
        Command::Ns { command: NsCommand::ToTable { op, out } } => {
            let doc = io::read_json(&op)?;
            let v = match io::operator_mode(&doc)? {
                NumericMode::Rational => io::ns_table_to_json(&to_ns_table(&io::operator_from_json::<Rational>(&doc)?)?),
                NumericMode::Double => io::ns_table_to_json(&to_ns_table(&io::operator_from_json::<f64>(&doc)?)?),
            };
            let dest = save(&out, &v)?;
            Ok(Report::ok(format!("behaviour table with {} entries{dest}", v["entries"].as_array().map_or(0, Vec::len)), v))
        }
        Command::Ns { command: NsCommand::ToOp { table, out } } => {
            let doc = io::read_json(&table)?;
            let v = match io::operator_mode(&doc)? {
                NumericMode::Rational => {
                    let t = io::ns_table_from_json::<Rational>(&doc)?;
                    t.validate()?;
                    io::operator_to_json(&from_ns_table(&t)?)
                }
                NumericMode::Double => {
                    let t = io::ns_table_from_json::<f64>(&doc)?;
                    t.validate()?;
                    io::operator_to_json(&from_ns_table(&t)?)
                }
            };
            let dest = save(&out, &v)?;
            Ok(Report::ok(format!("operator on {} qubits{dest}", v["n"]), v))
        }
        Command::PhaseSpace { name, n, out } => {
            let c = build_phase_space(name.into(), n)?;
            let v = io::catalog_to_json(&c);
            let dest = save(&out, &v)?;
            let text = format!("{} with {} members for n = {n}{dest}", c.name(), c.len());
            Ok(Report::ok(text, json!({ "name": c.name().as_str(), "n": n, "members": c.len() })))
        }
        Command::Robustness { state, catalog, tol, out } => {
            let rho = read_float(&state)?;
            let c = load_catalog(&catalog, rho.n())?;
            let r = robustness_report(&rho, &c, &LpOptions::default())?;
            if r.residual > tol {
                return Err(Error::Invalid(format!("residual {:e} above --tol {tol:e}", r.residual)));
            }
            let v = io::robustness_to_json(&r);
            let dest = save(&out, &io::quasi_to_json(&r.quasi))?;
            let text = format!(
                "R_{}(state) = {} ({} terms, residual {:.1e}, duality gap {:.1e}){dest}",
                c.name(),
                io::format_float(r.value),
                r.quasi.terms.len(),
                r.residual,
                r.lp.duality_gap
            );
            Ok(Report::ok(text, v))
        }
        Command::State { command: StateCommand::MagicCluster { graph, magic, out } } => {
            let g = io::graph_from_json(&io::read_json(&graph)?)?;
            let magic: Vec<usize> = match magic.trim() {
                "all" => (0..g.n()).collect(),
                "" => Vec::new(),
                list => list
                    .split(',')
                    .map(|s| match s.trim().parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(Error::Invalid(format!("bad vertex {s:?} in --magic"))),
                    })
                    .collect::<loclambda::Result<_>>()?,
            };
            let op = magic_cluster(&MagicClusterSpec::new(g, magic)?)?;
            let v = io::operator_to_json(&op);
            let dest = save(&out, &v)?;
            Ok(Report::ok(format!("state on {} qubits{dest}", op.n()), v))
        }
        Command::Simulate { state, schedule, catalog, mode, shots, seed, out } => {
            let mode: SimulationMode = mode.into();
            let seed = match (seed, mode) {
                (Some(s), _) => s,
                (None, SimulationMode::Exact) => 0,
                (None, _) => return Err(Error::Invalid("--seed is required for sample and quasi modes".into())),
            };
            let rho = read_float(&state)?;
            let sched = io::schedule_from_json(&io::read_json(&schedule)?)?;
            let c = load_catalog(&catalog, rho.n())?;
            let r = simulate(&rho, &sched, &c, mode, shots, seed)?;
            let v = io::report_to_json(&r);
            let dest = save(&out, &v)?;
            let mut text = format!("{} over {} (one-norm {})", r.mode.as_str(), r.catalog, io::format_float(r.one_norm));
            for (s, p) in &r.distribution {
                let oracle = r.oracle.as_ref().map(|o| format!("  oracle {}", io::format_float(*o.get(s).unwrap_or(&0.0))));
                text.push_str(&format!("\n  {s}: {}{}", io::format_float(*p), oracle.unwrap_or_default()));
            }
            if let Some(tv) = r.tv_distance {
                text.push_str(&format!("\nTV distance {}", io::format_float(tv)));
            }
            text.push_str(&dest);
            Ok(Report::ok(text, v))
        }
        Command::Oracle { state, schedule, out } => {
            let rho = read_float(&state)?;
            let sched = io::schedule_from_json(&io::read_json(&schedule)?)?;
            let d = born_oracle(&rho, &sched)?;
            let v = io::distribution_to_json(&d);
            let dest = save(&out, &v)?;
            let lines: Vec<String> = d.iter().map(|(s, p)| format!("  {s}: {}", io::format_float(*p))).collect();
            Ok(Report::ok(format!("{}{dest}", lines.join("\n")), v))
        }
        Command::Repro { command: ReproCommand::Table1 } => repro::table1(),
    }
}
