use crate::Failure;
use clap::{Args, ValueEnum};
use hypercover::congest;
use hypercover::engine::{self, EngineError, RunOptions, RunResult};
use hypercover::gen::{self, GenKind, GenSpec};
use hypercover::hypergraph::{self, Hypergraph};
use hypercover::params::{AlphaMode, LocalBase, Params};
use hypercover::rat::{self, Rat};
use hypercover::record;
use hypercover::verify;
use serde::Serialize;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

fn parse_rat_arg(name: &str, s: &str) -> Result<Rat, Failure> {
    rat::parse(s).map_err(|e| Failure::Input(format!("--{name}: {e}")))
}

fn parse_alpha_mode(mode: &str, gamma: &Rat) -> Result<AlphaMode, Failure> {
    match mode {
        "global" => Ok(AlphaMode::Global),
        "refined" => Ok(AlphaMode::Refined { gamma: gamma.clone() }),
        "local" => Ok(AlphaMode::Local { base: LocalBase::Global }),
        "local-refined" => Ok(AlphaMode::Local { base: LocalBase::Refined { gamma: gamma.clone() } }),
        other => match other.strip_prefix("fixed:") {
            Some(v) => Ok(AlphaMode::Fixed(parse_rat_arg("alpha-mode fixed", v)?)),
            None => Err(Failure::Input(format!(
                "unknown alpha mode `{other}` (expected global|refined|local|local-refined|fixed:<p/q>)"
            ))),
        },
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(Failure::input)?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn load_hypergraph(path: &str, as_set_cover: bool) -> Result<Hypergraph, Failure> {
    let text = read_input(path)?;
    let h = if as_set_cover {
        let s = hypergraph::read_set_system(&text).map_err(Failure::input)?;
        hypergraph::from_set_cover(&s).map_err(Failure::input)?
    } else {
        hypergraph::read_hypergraph(&text).map_err(Failure::input)?
    };
    let report = h.validate();
    if !report.is_ok() {
        return Err(Failure::Input(format!("invalid instance: {report}")));
    }
    Ok(h)
}

fn write_output(target: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match target {
        Some(path) => fs::write(path, content).map_err(Failure::input),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- solve ---

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file in the hypergraph text format, or `-` for stdin.
    pub input: String,
    /// Approximation parameter in (0, 1], as `p/q` or an integer.
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    /// global | refined | local | local-refined | fixed:<p/q>
    #[arg(long = "alpha-mode", default_value = "global")]
    pub alpha_mode: String,
    /// Refinement exponent in (0, 1), used by the refined modes.
    #[arg(long, default_value = "1/2")]
    pub gamma: String,
    /// Iteration cap override (default: derived from the analytic bound).
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Include the per-iteration event trace in the record.
    #[arg(long)]
    pub trace: bool,
    /// Interpret the input as a set system and reduce it first.
    #[arg(long = "set-cover")]
    pub set_cover: bool,
    /// Write the record to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Error payload emitted when a run aborts, so the failure is machine-readable.
#[derive(Debug, Serialize)]
struct ErrorRecord {
    error: String,
    iterations: Option<u32>,
    trace: Option<Vec<engine::IterationEvents>>,
}

pub fn solve(args: SolveArgs) -> Result<(), Failure> {
    let h = load_hypergraph(&args.input, args.set_cover)?;
    let epsilon = parse_rat_arg("epsilon", &args.epsilon)?;
    let gamma = parse_rat_arg("gamma", &args.gamma)?;
    let mode = parse_alpha_mode(&args.alpha_mode, &gamma)?;
    let stats = h.degree_stats();
    let params = Params::new(epsilon, mode, stats.rank, &stats).map_err(Failure::input)?;
    let options = RunOptions { cap: args.cap, ..Default::default() };

    let result = match engine::run(&h, &params, &options) {
        Ok(r) => r,
        Err(EngineError::InvalidInstance(report)) => {
            return Err(Failure::Input(format!("invalid instance: {report}")));
        }
        Err(err) => {
            let (iterations, trace) = match &err {
                EngineError::CapExceeded { iterations, trace, .. } => {
                    (Some(*iterations), Some(trace.clone()))
                }
                EngineError::InvariantViolation { iteration, trace, .. } => {
                    (Some(*iteration), Some(trace.clone()))
                }
                _ => (None, None),
            };
            let payload = ErrorRecord { error: err.to_string(), iterations, trace };
            write_output(&args.output, &serde_json::to_string_pretty(&payload).unwrap())?;
            return Err(Failure::Violation(err.to_string()));
        }
    };

    let messages = congest::ledger_summary(&h, &result)
        .map_err(|e| Failure::Violation(e.to_string()))?;
    let optimum = if h.vertex_count() <= verify::ORACLE_VERTEX_LIMIT {
        verify::brute_force_opt(&h).ok()
    } else {
        None
    };
    let verification =
        verify::verify_run(&h, &params, &result, optimum.as_ref().map(|(w, _)| *w));
    let all_ok = verification.all_ok;
    let rec = record::build_run_record(&h, &params, &result, messages, verification, optimum, args.trace);

    let rendered = match args.format {
        OutputFormat::Json => serde_json::to_string_pretty(&rec).unwrap(),
        OutputFormat::Csv => solve_csv(&rec),
    };
    write_output(&args.output, &rendered)?;
    if all_ok {
        Ok(())
    } else {
        let failed: Vec<&str> = rec
            .verification
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        Err(Failure::Violation(format!("checks failed: {}", failed.join(", "))))
    }
}

fn solve_csv(rec: &record::RunRecord) -> String {
    let header = "n,m,rank,max_degree,max_weight,epsilon,alpha_mode,beta,alpha,iterations,rounds,cover_weight,dual_sum,ratio_certificate,optimum,total_messages,total_bits,max_message_bits,all_ok";
    let alpha = rec.params.alpha.value.clone().unwrap_or_else(|| "per-edge".into());
    let row = format!(
        "{},{},{},{},{},{},{:?},{},{},{},{},{},{},{},{},{},{},{},{}",
        rec.instance.n,
        rec.instance.m,
        rec.instance.rank,
        rec.instance.max_degree,
        rec.instance.max_weight,
        rec.params.epsilon,
        rec.params.alpha_mode,
        rec.params.beta,
        alpha,
        rec.results.iterations,
        rec.results.rounds,
        rec.results.cover_weight,
        rec.results.dual_sum,
        rec.results.ratio_certificate,
        rec.results.optimum.map_or(String::new(), |o| o.to_string()),
        rec.results.messages.total_messages,
        rec.results.messages.total_bits,
        rec.results.messages.max_message_bits,
        rec.verification.all_ok,
    );
    format!("{header}\n{row}")
}

// ------------------------------------------------------------------ gen ---

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Star,
    Cycle,
    Clique,
    Random,
    SetCoverRandom,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "star")]
    pub kind: KindArg,
    /// Vertices (cycle/clique/random) or subsets (set-cover-random).
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Edges (random) or elements (set-cover-random).
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Edge size (random) / max element frequency (set-cover-random).
    #[arg(long = "f", default_value_t = 2)]
    pub rank: usize,
    /// Star degree.
    #[arg(long, default_value_t = 8)]
    pub delta: usize,
    /// Weights are uniform in [1, max-weight]; star leaves use it directly.
    #[arg(long = "max-weight", default_value_t = 1)]
    pub max_weight: u64,
    /// Star center weight.
    #[arg(long = "center-weight", default_value_t = 1)]
    pub center_weight: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen(args: GenArgs) -> Result<(), Failure> {
    let kind = match args.kind {
        KindArg::Star => GenKind::Star,
        KindArg::Cycle => GenKind::Cycle,
        KindArg::Clique => GenKind::Clique,
        KindArg::Random => GenKind::RandomUniform,
        KindArg::SetCoverRandom => GenKind::SetCoverRandom,
    };
    let spec = GenSpec {
        kind,
        n: args.n,
        m: args.m,
        rank: args.rank,
        delta: args.delta,
        max_weight: args.max_weight,
        center_weight: args.center_weight,
        seed: args.seed,
    };
    let h = spec.generate().map_err(Failure::input)?;
    debug_assert!(h.validate().is_ok());
    let content = format!("{}\n{}", spec.header(), hypergraph::write_hypergraph(&h));
    match &args.out {
        Some(path) => fs::write(path, &content).map_err(Failure::input)?,
        None => print!("{content}"),
    }
    Ok(())
}

// --------------------------------------------------------------- verify ---

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Instance file, or a directory of instance files.
    pub path: Option<PathBuf>,
    /// Enumerate all simple weighted graphs on up to K vertices (K <= 4),
    /// weights in {1, 2, 3}.
    #[arg(long = "exhaustive-n")]
    pub exhaustive_n: Option<usize>,
    /// Number of seeded random hypergraphs to draw.
    #[arg(long)]
    pub random: Option<usize>,
    /// Rank of the random hypergraphs.
    #[arg(long = "f", default_value_t = 3)]
    pub rank: usize,
    /// Max vertices of the random hypergraphs.
    #[arg(long = "max-n", default_value_t = 10)]
    pub max_n: usize,
    /// Seed for the random mode (overridden by MWHVC_SEED, then by this flag).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Restrict the sweep to one epsilon instead of {1/10, 1/2, 1}.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Restrict the sweep to one alpha mode instead of {global, local}.
    #[arg(long = "alpha-mode")]
    pub alpha_mode: Option<String>,
    #[arg(long, default_value = "1/2")]
    pub gamma: String,
}

fn default_seed(flag: Option<u64>) -> u64 {
    if let Some(s) = flag {
        return s;
    }
    if let Ok(v) = std::env::var("MWHVC_SEED") {
        if let Ok(s) = v.trim().parse() {
            return s;
        }
    }
    0x48595045
}

/// Runs one instance end to end and reports the first failed check.
pub fn check_instance(h: &Hypergraph, epsilon: &Rat, mode: AlphaMode) -> Result<(), String> {
    let stats = h.degree_stats();
    let params = Params::new(epsilon.clone(), mode, stats.rank, &stats).map_err(|e| e.to_string())?;
    let result = engine::run(h, &params, &RunOptions::default()).map_err(|e| e.to_string())?;
    let messages = congest::ledger_summary(h, &result).map_err(|e| e.to_string())?;
    let expected_rounds = congest::total_rounds(result.iterations, h.edge_count());
    if messages.rounds != expected_rounds {
        return Err(format!("round layout mismatch: {} != {}", messages.rounds, expected_rounds));
    }
    let optimum = if h.vertex_count() <= verify::ORACLE_VERTEX_LIMIT {
        Some(verify::brute_force_opt(h).map_err(|e| e.to_string())?.0)
    } else {
        None
    };
    let report = verify::verify_run(h, &params, &result, optimum);
    if !report.all_ok {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {}", c.name, c.detail.clone().unwrap_or_default()))
            .collect();
        return Err(failed.join("; "));
    }
    Ok(())
}

pub fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut instances: Vec<(String, Hypergraph)> = Vec::new();

    if let Some(path) = &args.path {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)
                .map_err(Failure::input)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            for f in files {
                let name = f.display().to_string();
                instances.push((name.clone(), load_hypergraph(&name, false)?));
            }
        } else {
            let name = path.display().to_string();
            instances.push((name.clone(), load_hypergraph(&name, false)?));
        }
    }
    if let Some(k) = args.exhaustive_n {
        if k > 4 {
            return Err(Failure::Input("--exhaustive-n is limited to 4".into()));
        }
        for (i, h) in gen::exhaustive_weighted_graphs(k, &[1, 2, 3]).into_iter().enumerate() {
            instances.push((format!("exhaustive[{i}]"), h));
        }
    }
    if let Some(trials) = args.random {
        if args.max_n < args.rank.max(3) {
            return Err(Failure::Input("--max-n too small for the requested rank".into()));
        }
        let seed = default_seed(args.seed);
        for (i, h) in gen::random_suite(trials, args.rank, args.max_n, seed).into_iter().enumerate() {
            instances.push((format!("random[{i}]@{seed}"), h));
        }
    }
    if instances.is_empty() {
        return Err(Failure::Input(
            "nothing to verify: pass a path, --exhaustive-n, or --random".into(),
        ));
    }

    let epsilons: Vec<Rat> = match &args.epsilon {
        Some(e) => vec![parse_rat_arg("epsilon", e)?],
        None => vec![rat::frac(1, 10), rat::frac(1, 2), rat::int(1)],
    };
    let gamma = parse_rat_arg("gamma", &args.gamma)?;
    let modes: Vec<AlphaMode> = match &args.alpha_mode {
        Some(m) => vec![parse_alpha_mode(m, &gamma)?],
        None => vec![AlphaMode::Global, AlphaMode::Local { base: LocalBase::Global }],
    };

    let mut runs = 0usize;
    let mut failures = 0usize;
    for (name, h) in &instances {
        for epsilon in &epsilons {
            for mode in &modes {
                runs += 1;
                if let Err(detail) = check_instance(h, epsilon, mode.clone()) {
                    failures += 1;
                    eprintln!("FAIL {name} epsilon={} mode={mode:?}: {detail}", rat::fmt_frac(epsilon));
                    eprintln!("instance:\n{}", hypergraph::write_hypergraph(h));
                }
            }
        }
    }
    println!(
        "verified {} instances x {} epsilons x {} modes = {} runs: {}",
        instances.len(),
        epsilons.len(),
        modes.len(),
        runs,
        if failures == 0 { "all checks passed".to_string() } else { format!("{failures} FAILURES") }
    );
    if failures > 0 {
        return Err(Failure::Violation(format!("{failures} of {runs} runs failed verification")));
    }
    Ok(())
}

// ---------------------------------------------------------------- bench ---

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated list of star degrees.
    #[arg(long, value_delimiter = ',', required = true)]
    pub deltas: Vec<u64>,
    /// Edge size of the star instances.
    #[arg(long = "f", default_value_t = 2)]
    pub rank: usize,
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    #[arg(long, default_value = "1/2")]
    pub gamma: String,
    /// Repetitions per point; all must produce identical results.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Debug, Serialize)]
struct BenchRow {
    delta: u64,
    rank: usize,
    epsilon: String,
    mode: String,
    alpha: String,
    beta: String,
    iterations: u32,
    rounds: u64,
    analytic_bound: u64,
    cover_weight: u64,
    dual_sum: String,
    total_messages: u64,
    total_bits: u64,
    max_message_bits: u64,
}

pub fn bench(args: BenchArgs) -> Result<(), Failure> {
    let epsilon = parse_rat_arg("epsilon", &args.epsilon)?;
    let gamma = parse_rat_arg("gamma", &args.gamma)?;
    if args.rank < 2 {
        return Err(Failure::Input("--f must be at least 2 for star benches".into()));
    }
    let mut rows = Vec::new();
    for &delta in &args.deltas {
        if delta < 1 {
            return Err(Failure::Input("deltas must be at least 1".into()));
        }
        // Center-heavy star: center weight delta, unit leaves.
        let h = gen::gen_star_of_rank(delta as usize, args.rank, delta, 1).map_err(Failure::input)?;
        for (label, mode) in [
            ("global", AlphaMode::Global),
            ("refined", AlphaMode::Refined { gamma: gamma.clone() }),
        ] {
            let stats = h.degree_stats();
            let params = Params::new(epsilon.clone(), mode, stats.rank, &stats)
                .map_err(Failure::input)?;
            let result = run_repeatable(&h, &params, args.reps)?;
            let messages =
                congest::ledger_summary(&h, &result).map_err(|e| Failure::Violation(e.to_string()))?;
            let bound = engine::analytic_iteration_bound(&h, &params);
            if result.iterations as u64 > bound {
                return Err(Failure::Violation(format!(
                    "delta {delta} {label}: {} iterations exceed the bound {bound}",
                    result.iterations
                )));
            }
            rows.push(BenchRow {
                delta,
                rank: args.rank,
                epsilon: rat::fmt_frac(&epsilon),
                mode: label.into(),
                alpha: rat::fmt_frac(&params.alpha.max()),
                beta: rat::fmt_frac(&params.beta),
                iterations: result.iterations,
                rounds: messages.rounds,
                analytic_bound: bound,
                cover_weight: result.cover_weight,
                dual_sum: rat::fmt_frac(&result.dual_sum()),
                total_messages: messages.total_messages,
                total_bits: messages.total_bits,
                max_message_bits: messages.max_message_bits,
            });
        }
    }
    match args.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&rows).unwrap()),
        OutputFormat::Csv => {
            println!("delta,rank,epsilon,mode,alpha,beta,iterations,rounds,analytic_bound,cover_weight,dual_sum,total_messages,total_bits,max_message_bits");
            for r in rows {
                println!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.delta, r.rank, r.epsilon, r.mode, r.alpha, r.beta, r.iterations, r.rounds,
                    r.analytic_bound, r.cover_weight, r.dual_sum, r.total_messages, r.total_bits,
                    r.max_message_bits
                );
            }
        }
    }
    Ok(())
}

fn run_repeatable(h: &Hypergraph, params: &Params, reps: usize) -> Result<RunResult, Failure> {
    let options = RunOptions::default();
    let first = engine::run(h, params, &options).map_err(|e| Failure::Violation(e.to_string()))?;
    for _ in 1..reps.max(1) {
        let again = engine::run(h, params, &options).map_err(|e| Failure::Violation(e.to_string()))?;
        if again != first {
            return Err(Failure::Violation("nondeterministic rerun in bench sweep".into()));
        }
    }
    Ok(first)
}
