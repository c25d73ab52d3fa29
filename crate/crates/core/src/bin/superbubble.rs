use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use superbubble::bench::{bench_spec, doubling_ratios, BenchRecord};
use superbubble::detect;
use superbubble::detector::{trace_detect, Mutation};
use superbubble::dot::export_dot;
use superbubble::generate::{fuzz_spec, generate, GenSpec, PRNG_ID};
use superbubble::graph::{augment, load_edge_list, Graph, GraphError};
use superbubble::oracle::{OracleError, DEFAULT_CAP};
use superbubble::topo::TopoError;
use superbubble::verify::{campaign, compare, Comparison, VerifyError};

const EXIT_PARSE: u8 = 2;
const EXIT_CYCLE: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

#[derive(Parser)]
#[command(
    name = "superbubble",
    version,
    about = "Enumerate superbubbles of a DAG in linear time"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report all superbubbles of an edge-list graph.
    Detect {
        #[arg(long)]
        input: PathBuf,
        /// Emit annotated Graphviz instead of JSON.
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compare the detector with the brute-force oracle.
    Verify(VerifyArgs),
    /// Print a random DAG as an edge list.
    Generate(GenArgs),
    /// Time detection phases on generated graphs of increasing size.
    Bench(BenchArgs),
    /// Detect with a full event log of the scan.
    Trace {
        #[arg(long)]
        input: PathBuf,
    },
    /// Graphviz export annotated with the detected superbubbles.
    Dot {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    extra_edges: usize,
    #[arg(long, default_value_t = 0)]
    planted: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_outdeg: Option<usize>,
    /// Sources of the random part before augmentation.
    #[arg(long, default_value_t = 1)]
    roots: usize,
}

impl GenArgs {
    fn spec(&self, seed: u64) -> GenSpec {
        GenSpec {
            n: self.n,
            extra_edges: self.extra_edges,
            planted_bubbles: self.planted,
            seed,
            max_outdeg: self.max_outdeg,
            roots: self.roots,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    None,
    SkipAlternativeWrites,
    ReportUnvalidatedAlternative,
    SkipNested,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::None => Mutation::None,
            MutationArg::SkipAlternativeWrites => Mutation::SkipAlternativeWrites,
            MutationArg::ReportUnvalidatedAlternative => Mutation::ReportUnvalidatedAlternative,
            MutationArg::SkipNested => Mutation::SkipNested,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Verify this file instead of generated graphs.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    /// Number of consecutive seeds, starting at --seed.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Draw size, density, diamonds and sources per seed, with --n as the
    /// vertex bound and --max-edges as the edge bound.
    #[arg(long)]
    fuzz: bool,
    #[arg(long, default_value_t = 180)]
    max_edges: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    oracle_cap: usize,
    #[arg(long, value_enum, default_value = "none", hide = true)]
    mutation: MutationArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', default_values_t = [100_000usize, 200_000, 400_000])]
    sizes: Vec<usize>,
    /// Extra edges per vertex on top of the spanning forest (1.0 gives m ≈ 2n).
    #[arg(long, default_value_t = 1.0)]
    extra_per_vertex: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    max_outdeg: Option<usize>,
    #[arg(long, default_value_t = 0)]
    planted: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let code = match e {
            GraphError::NotDagShaped { .. } => EXIT_CYCLE,
            _ => EXIT_PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<TopoError> for Failure {
    fn from(e: TopoError) -> Self {
        Failure {
            code: EXIT_CYCLE,
            message: e.to_string(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Graph(g) => g.into(),
            VerifyError::Topo(t) => t.into(),
            VerifyError::Oracle(OracleError::Cyclic) => Failure {
                code: EXIT_CYCLE,
                message: e.to_string(),
            },
            VerifyError::Oracle(OracleError::TooLarge { .. }) => Failure {
                code: EXIT_CAP,
                message: e.to_string(),
            },
            VerifyError::Generate(_) => Failure {
                code: EXIT_PARSE,
                message: e.to_string(),
            },
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load(path: &PathBuf) -> Result<Graph, Failure> {
    let file = File::open(path).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let loaded = load_edge_list(BufReader::new(file))?;
    if loaded.duplicate_edges > 0 {
        eprintln!("warning: collapsed {} duplicate edge(s)", loaded.duplicate_edges);
    }
    Ok(loaded.graph)
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| fail(1, e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Detect { input, dot, .. } => {
            let g = load(&input)?;
            let report = detect(&augment(&g)?)?;
            if dot {
                print!("{}", export_dot(&g, Some(&report)));
            } else {
                print_json(&report.to_json(&g))?;
            }
        }
        Command::Dot { input } => {
            let g = load(&input)?;
            let report = detect(&augment(&g)?)?;
            print!("{}", export_dot(&g, Some(&report)));
        }
        Command::Trace { input } => {
            let g = load(&input)?;
            let aug = augment(&g)?;
            let (report, log) = trace_detect(&aug)?;
            print_json(&json!({
                "report": report.to_json(&g),
                "trace": log.to_json(aug.graph()),
            }))?;
        }
        Command::Generate(args) => {
            let spec = args.spec(args.seed);
            let g = generate(&spec).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
            let mut out = io::stdout().lock();
            writeln!(
                out,
                "# prng={PRNG_ID} seed={} n={} extra_edges={} planted={} roots={} max_outdeg={}",
                spec.seed,
                spec.n,
                spec.extra_edges,
                spec.planted_bubbles,
                spec.roots,
                spec.max_outdeg.map_or("none".to_string(), |d| d.to_string())
            )?;
            out.write_all(g.to_edge_list().as_bytes())?;
        }
        Command::Verify(args) => verify(args)?,
        Command::Bench(args) => bench(args)?,
    }
    Ok(())
}

fn print_mismatch(c: &Comparison, context: &str) {
    let missing: Vec<_> = c.expected.difference(&c.detected).collect();
    let spurious: Vec<_> = c.detected.difference(&c.expected).collect();
    eprintln!("mismatch ({context})");
    eprintln!("  detector: {:?}", c.detected);
    eprintln!("  oracle:   {:?}", c.expected);
    eprintln!("  missing: {missing:?} spurious: {spurious:?}");
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let mutation: Mutation = args.mutation.into();
    if let Some(path) = &args.input {
        let g = load(path)?;
        let c = compare(&g, args.oracle_cap, mutation)?;
        if !c.matches() {
            print_mismatch(&c, &path.display().to_string());
            return Err(fail(EXIT_MISMATCH, "detector and oracle disagree"));
        }
        return print_json(&json!({
            "input": path.display().to_string(),
            "superbubbles": c.detected.len(),
            "validateCalls": c.stats.validate_calls,
            "result": "match",
        }));
    }

    let start = args.gen.seed;
    let seeds = start..start.saturating_add(args.seeds);
    let (max_n, max_m, fuzz) = (args.gen.n, args.max_edges, args.fuzz);
    let gen = args.gen.clone();
    let results = campaign(
        seeds,
        |s| if fuzz { fuzz_spec(s, max_n, max_m) } else { gen.spec(s) },
        args.oracle_cap,
        mutation,
    );

    let mut bubbles = 0;
    let mut worst_ratio: f64 = 0.0;
    for r in &results {
        match &r.outcome {
            Ok(c) if c.matches() => {
                bubbles += c.detected.len();
                worst_ratio = worst_ratio.max(c.stats.validate_calls as f64 / c.size as f64);
            }
            Ok(c) => {
                print_mismatch(c, &format!("seed {} spec {:?}", r.seed, r.spec));
                return Err(fail(EXIT_MISMATCH, format!("mismatch at seed {}", r.seed)));
            }
            Err(e) => {
                let f = Failure::from(clone_verify_error(e));
                return Err(fail(f.code, format!("seed {}: {}", r.seed, f.message)));
            }
        }
    }
    print_json(&json!({
        "prng": PRNG_ID,
        "firstSeed": start,
        "seeds": results.len(),
        "superbubbles": bubbles,
        "maxValidatePerSize": worst_ratio,
        "result": "match",
    }))
}

// Errors are not Clone; rebuild the variant that decides the exit code.
fn clone_verify_error(e: &VerifyError) -> VerifyError {
    match e {
        VerifyError::Oracle(OracleError::TooLarge { n, cap }) => {
            VerifyError::Oracle(OracleError::TooLarge { n: *n, cap: *cap })
        }
        VerifyError::Oracle(OracleError::Cyclic) => VerifyError::Oracle(OracleError::Cyclic),
        VerifyError::Topo(TopoError::Cyclic { from, to }) => VerifyError::Topo(TopoError::Cyclic {
            from: from.clone(),
            to: to.clone(),
        }),
        other => VerifyError::Graph(GraphError::Io(other.to_string())),
    }
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let mut records: Vec<BenchRecord> = Vec::new();
    for &n in &args.sizes {
        let mut spec = GenSpec::new(n, (n as f64 * args.extra_per_vertex) as usize, args.seed).planted(args.planted);
        spec.max_outdeg = args.max_outdeg;
        let record = bench_spec(&spec, args.repeats).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
        records.push(record);
    }
    let ratios = doubling_ratios(&records);
    let mut out = io::stdout().lock();
    writeln!(out, "# prng={PRNG_ID} seed={} repeats={}", args.seed, args.repeats)?;
    writeln!(out, "{},ratio_vs_prev", BenchRecord::CSV_HEADER)?;
    for (i, r) in records.iter().enumerate() {
        let ratio = if i == 0 {
            String::new()
        } else {
            format!("{:.3}", ratios[i - 1])
        };
        writeln!(out, "{},{ratio}", r.csv_row())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
