use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qudit_clique::circuit::{Circuit, Control, Gate};
use qudit_clique::cost::{emit_comparisons, emit_table, grover_costs, toffoli_cost_reports, Comparison, CostReport, TableFormat};
use qudit_clique::decompose::{lower_circuit, Lowering};
use qudit_clique::graph::{named, Graph, GraphError};
use qudit_clique::grover::{grover_known_m, grover_unknown_m, max_clique, Diffuser, GroverConfig, GroverError, PrepChoice, SearchResult};
use qudit_clique::oracle::{build_oracle, OracleKind, OracleVariant};
use qudit_clique::prep::{PrepKind, PrepSpec};
use qudit_clique::sim::run_basis;
use qudit_clique::Error;

/// Grover search for cliques with intermediate-qudit Toffoli lowering.
#[derive(Parser, Debug)]
#[command(name = "qclique", version)]
struct Cli {
    /// Directory for output files. Without it only stdout is written.
    #[arg(long, global = true, env = "QCLIQUE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a clique of a given size.
    Kclique {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Planned iteration count: `auto` or a number.
        #[arg(long, default_value = "auto")]
        iterations: Iterations,
        /// Escalate iterations by 6x per round instead of planning from the clique count.
        #[arg(long)]
        unknown_count: bool,
    },
    /// Find a maximum clique by descending clique size.
    Maxclique {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Lower one multi-controlled Toffoli.
    Decompose {
        #[arg(long)]
        controls: usize,
        #[arg(long, value_enum, default_value_t = LoweringArg::Vchain)]
        lowering: LoweringArg,
        /// Print the gate listing.
        #[arg(long)]
        emit: bool,
    },
    /// Build a clique oracle and show its layout and Toffoli census.
    Oracle {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = OracleArg::Checking)]
        kind: OracleArg,
        #[arg(long, value_enum, default_value_t = PrepArg::Auto)]
        prep: PrepArg,
        /// Print the circuit.
        #[arg(long)]
        emit: bool,
        /// Lower multi-controlled Toffolis before printing.
        #[arg(long, value_enum)]
        lower: Option<LoweringArg>,
    },
    /// Build a state-preparation circuit.
    Prep {
        #[arg(long, value_enum)]
        kind: PrepKindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        /// Write `basis_state,amplitude_re,amplitude_im` rows.
        #[arg(long)]
        emit_amplitudes: bool,
    },
    /// Cost comparison tables.
    Report {
        /// Without a graph, reports single-Toffoli costs.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum)]
        prep: Option<PrepArg>,
        #[arg(long, value_enum)]
        oracle: Option<OracleArg>,
        #[arg(long)]
        iterations: Option<usize>,
        /// Attach the bundled published values beside the derived ones.
        #[arg(long, alias = "against-paper")]
        against_reference: bool,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
    },
}

#[derive(Args, Debug)]
struct GraphArg {
    /// DIMACS graph file, or `builtin:<name>`.
    #[arg(long = "graph")]
    path: String,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = PrepArg::Auto)]
    prep: PrepArg,
    #[arg(long, value_enum, default_value_t = OracleArg::Checking)]
    oracle: OracleArg,
    #[arg(long, value_enum, default_value_t = LoweringArg::Vchain)]
    lowering: LoweringArg,
    #[arg(long, value_enum)]
    diffuser: Option<DiffuserArg>,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    max_rounds: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrepArg {
    Auto,
    Hilbert,
    W,
    Dicke,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrepKindArg {
    Hilbert,
    W,
    Dicke,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleArg {
    Checking,
    Increment,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LoweringArg {
    Vchain,
    Tree,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DiffuserArg {
    Standard,
    PrepConjugated,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug)]
enum Iterations {
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Iterations {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Iterations::Auto);
        }
        s.parse().map(Iterations::Fixed).map_err(|_| format!("expected `auto` or a count, got `{s}`"))
    }
}

impl From<PrepArg> for PrepChoice {
    fn from(p: PrepArg) -> Self {
        match p {
            PrepArg::Auto => PrepChoice::Auto,
            PrepArg::Hilbert => PrepChoice::Hilbert,
            PrepArg::W => PrepChoice::W,
            PrepArg::Dicke => PrepChoice::Dicke,
        }
    }
}

impl From<OracleArg> for OracleVariant {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Checking => OracleVariant::Checking,
            OracleArg::Increment => OracleVariant::Increment,
        }
    }
}

impl From<LoweringArg> for Lowering {
    fn from(l: LoweringArg) -> Self {
        match l {
            LoweringArg::Vchain => Lowering::Vchain,
            LoweringArg::Tree => Lowering::Tree,
        }
    }
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Markdown => TableFormat::Markdown,
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Json => TableFormat::Json,
        }
    }
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TOO_LARGE: u8 = 3;
const EXIT_NOT_FOUND: u8 = 4;

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e: Error = e.into();
        let code = match &e {
            _ if e.is_too_large() => EXIT_TOO_LARGE,
            Error::Grover(GroverError::NoMarkedStates { .. }) => EXIT_NOT_FOUND,
            Error::Graph(_) | Error::Prep(_) => EXIT_USAGE,
            Error::Oracle(qudit_clique::oracle::OracleError::CliqueSizeOutOfRange { .. }) => EXIT_USAGE,
            Error::Grover(GroverError::Prep(_) | GroverError::NoShots) => EXIT_USAGE,
            Error::Grover(GroverError::Oracle(qudit_clique::oracle::OracleError::CliqueSizeOutOfRange { .. })) => {
                EXIT_USAGE
            }
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Stdout text plus files to place in the output directory.
#[derive(Default)]
struct Output {
    stdout: String,
    files: Vec<(String, String)>,
}

fn load_graph(spec: &str) -> Result<Graph, Failure> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return match name {
            "six_vertex" => Ok(named::six_vertex()),
            "one_triangle" => Ok(named::one_triangle()),
            "square_one_diagonal" => Ok(named::square_one_diagonal()),
            "complete4" => Ok(Graph::complete(4)),
            "star4" => Ok(named::star(4)),
            _ => Err(Failure::usage(format!("unknown builtin graph `{name}`"))),
        };
    }
    let text = fs::read_to_string(spec).map_err(|e| Failure::usage(format!("cannot read {spec}: {e}")))?;
    Graph::parse(&text).map_err(|e: GraphError| Failure::usage(format!("{spec}: {e}")))
}

fn config(search: &SearchArgs) -> Result<GroverConfig, Failure> {
    if search.shots == 0 {
        return Err(Failure::usage("--shots must be at least 1"));
    }
    Ok(GroverConfig {
        prep: search.prep.into(),
        oracle: search.oracle.into(),
        lowering: search.lowering.into(),
        diffuser: search.diffuser.map(|d| match d {
            DiffuserArg::Standard => Diffuser::Standard,
            DiffuserArg::PrepConjugated => Diffuser::PrepConjugated,
        }),
        shots: search.shots,
        seed: search.seed,
        max_boyer_rounds: search.max_rounds,
        iterations: None,
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn search_files(stem: &str, r: &SearchResult) -> Vec<(String, String)> {
    vec![(format!("{stem}.json"), to_json(r)), (format!("{stem}_histogram.csv"), r.histogram_csv())]
}

fn kclique(g: &Graph, k: usize, mut cfg: GroverConfig, iterations: Iterations, unknown: bool) -> Result<Output, Failure> {
    if k < 2 || k > g.n() {
        return Err(Failure::usage(format!("--k must lie in 2..={}", g.n())));
    }
    if let Iterations::Fixed(t) = iterations {
        if unknown {
            return Err(Failure::usage("--iterations cannot be combined with --unknown-count"));
        }
        cfg.iterations = Some(t);
    }
    let r = if unknown { grover_unknown_m(g, k, &cfg)? } else { grover_known_m(g, k, &cfg)? };
    if !r.found {
        return Err(Failure { code: EXIT_NOT_FOUND, message: format!("no {k}-clique found") });
    }
    Ok(Output { stdout: to_json(&r), files: search_files("kclique", &r) })
}

fn maxclique(g: &Graph, cfg: GroverConfig) -> Result<Output, Failure> {
    if g.n() < 2 {
        return Err(Failure::usage("maxclique needs at least two vertices"));
    }
    let r = max_clique(g, &cfg)?;
    if !r.found {
        return Err(Failure { code: EXIT_NOT_FOUND, message: "no clique above size 1".into() });
    }
    let witness = r.witness.as_ref().expect("found implies a witness");
    Ok(Output { stdout: format!("clique {witness} size {}\n", r.k), files: search_files("maxclique", &r) })
}

fn decompose(controls: usize, lowering: LoweringArg, emit: bool) -> Result<Output, Failure> {
    if controls == 0 {
        return Err(Failure::usage("--controls must be at least 1"));
    }
    let mut c = Circuit::qubits(controls + 1);
    c.push(Gate::mct((0..controls).map(Control::on).collect(), controls)).map_err(Error::from)?;
    let low = lower_circuit(&c, lowering.into())?;
    let name = format!("{lowering:?}").to_lowercase();
    let mut out = format!("controls {controls} lowering {name} size {} depth {}\n", low.size(), low.depth());
    let text = low.to_text();
    if emit {
        out.push_str(&text);
    }
    Ok(Output { stdout: out, files: vec![(format!("decompose_{name}_{controls}.txt"), text)] })
}

fn oracle(g: &Graph, k: usize, kind: OracleArg, prep: PrepArg, emit: bool, lower: Option<LoweringArg>) -> Result<Output, Failure> {
    let spec = PrepChoice::from(prep).spec(g.n(), k)?;
    let kind = OracleKind { variant: kind.into(), count_nodes: spec.kind == PrepKind::FullHilbert };
    let o = build_oracle(g, k, kind)?;
    let l = &o.layout;
    let mut out = String::new();
    out.push_str(&format!("wires {}\n", l.total_wires()));
    out.push_str(&format!("vertices {:?}\n", l.vertex_wires));
    out.push_str(&format!("edge_counter {:?}\n", l.edge_counter));
    out.push_str(&format!("edge_flag {}\n", l.edge_flag));
    if !l.node_counter.is_empty() {
        out.push_str(&format!("node_counter {:?}\n", l.node_counter));
    }
    if let Some(w) = l.node_flag {
        out.push_str(&format!("node_flag {w}\n"));
    }
    if let Some(w) = l.edge_exists {
        out.push_str(&format!("edge_exists {w}\n"));
    }
    out.push_str(&format!("target {}\n", l.target));
    let census = o.census();
    let census_line: Vec<String> = census.iter().map(|(a, c)| format!("{a}:{c}")).collect();
    out.push_str(&format!("toffoli_census {}\n", census_line.join(" ")));
    out.push_str(&format!("toffoli_total {}\n", o.toffoli_total()));
    if o.unsatisfiable {
        out.push_str("note: fewer edges than a clique of this size needs; nothing is marked\n");
    }
    let circuit = match lower {
        Some(lw) => o.lowered(lw.into())?,
        None => o.circuit.clone(),
    };
    let text = circuit.to_text();
    if emit {
        out.push_str(&text);
    }
    Ok(Output { stdout: out, files: vec![(format!("oracle_k{k}.txt"), text)] })
}

fn prep(kind: PrepKindArg, n: usize, k: Option<usize>, emit: bool) -> Result<Output, Failure> {
    let spec = match kind {
        PrepKindArg::Hilbert => PrepSpec::new(PrepKind::FullHilbert, n)?,
        PrepKindArg::W => PrepSpec::new(PrepKind::WState, n)?,
        PrepKindArg::Dicke => {
            let k = k.ok_or_else(|| Failure::usage("--k is required for dicke"))?;
            PrepSpec::new(PrepKind::Dicke { k }, n)?
        }
    };
    if n > 20 {
        return Err(Failure { code: EXIT_TOO_LARGE, message: format!("{n} wires exceed the preparation limit of 20") });
    }
    let c = spec.circuit();
    let state = run_basis(&c, 0)?;
    let mut csv = String::from("basis_state,amplitude_re,amplitude_im\n");
    for (idx, a) in state.entries() {
        if a.norm_sqr() > 1e-24 {
            csv.push_str(&format!("{idx:0n$b},{},{}\n", a.re, a.im));
        }
    }
    let mut out = format!(
        "wires {n} size {} depth {} support {}\n",
        c.size(),
        c.depth(),
        spec.search_space_size()
    );
    if emit {
        out.push_str(&csv);
    }
    Ok(Output { stdout: out, files: vec![("prep_amplitudes.csv".into(), csv)] })
}

#[allow(clippy::too_many_arguments)]
fn report(
    graph: Option<&str>,
    k: Option<usize>,
    prep: Option<PrepArg>,
    oracle: Option<OracleArg>,
    iterations: Option<usize>,
    against: bool,
    format: TableFormat,
) -> Result<Output, Failure> {
    let mut reports: Vec<CostReport> = Vec::new();
    let mut comparisons: Vec<Comparison> = Vec::new();
    match graph {
        None => {
            reports = toffoli_cost_reports(2..=6)?;
            for pair in reports.chunks(2) {
                comparisons.push(qudit_clique::cost::compare(&pair[0], &pair[1])?);
            }
        }
        Some(path) => {
            let g = load_graph(path)?;
            let k = k.ok_or_else(|| Failure::usage("--k is required with --graph"))?;
            if k < 2 || k > g.n() {
                return Err(Failure::usage(format!("--k must lie in 2..={}", g.n())));
            }
            let name = Path::new(path.strip_prefix("builtin:").unwrap_or(path))
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".into());
            let preps: Vec<PrepChoice> = match prep {
                Some(p) => vec![p.into()],
                None => {
                    let mut v = vec![PrepChoice::Hilbert];
                    if k + 1 == g.n() {
                        v.push(PrepChoice::W);
                    }
                    if k < g.n() {
                        v.push(PrepChoice::Dicke);
                    }
                    v
                }
            };
            let oracles: Vec<OracleVariant> = match oracle {
                Some(o) => vec![o.into()],
                None => vec![OracleVariant::Checking, OracleVariant::Increment],
            };
            for &p in &preps {
                for &o in &oracles {
                    let costs = grover_costs(&g, k, p, o, iterations, &name)?;
                    comparisons.extend(costs.comparisons()?);
                    reports.extend(costs.reports());
                }
            }
        }
    }
    if !against {
        for r in &mut reports {
            r.reference = None;
        }
        for c in &mut comparisons {
            c.reference_size_reduction_pct = None;
            c.reference_depth_reduction_pct = None;
        }
    }
    let text = match format {
        TableFormat::Json => to_json(&serde_json::json!({ "reports": reports, "comparisons": comparisons })),
        f => format!("{}\n{}", emit_table(&reports, f), emit_comparisons(&comparisons, f)),
    };
    let ext = match format {
        TableFormat::Markdown => "md",
        TableFormat::Csv => "csv",
        TableFormat::Json => "json",
    };
    Ok(Output { stdout: text.clone(), files: vec![(format!("report.{ext}"), text)] })
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Kclique { graph, k, search, iterations, unknown_count } => {
            kclique(&load_graph(&graph.path)?, *k, config(search)?, *iterations, *unknown_count)
        }
        Command::Maxclique { graph, search } => maxclique(&load_graph(&graph.path)?, config(search)?),
        Command::Decompose { controls, lowering, emit } => decompose(*controls, *lowering, *emit),
        Command::Oracle { graph, k, kind, prep: p, emit, lower } => {
            oracle(&load_graph(&graph.path)?, *k, *kind, *p, *emit, *lower)
        }
        Command::Prep { kind, n, k, emit_amplitudes } => prep(*kind, *n, *k, *emit_amplitudes),
        Command::Report { graph, k, prep: p, oracle: o, iterations, against_reference, format } => {
            report(graph.as_deref(), *k, *p, *o, *iterations, *against_reference, (*format).into())
        }
    }
}

/// Writes every file through a temporary sibling and a rename, after all
/// contents are ready.
fn write_outputs(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|out| {
        if let Some(dir) = &cli.out_dir {
            write_outputs(dir, &out.files)
                .map_err(|e| Failure { code: EXIT_FAILURE, message: format!("writing {}: {e}", dir.display()) })?;
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("qclique: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
