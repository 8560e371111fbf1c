//! Command-line front end: parses flags (plus an optional flat key/value
//! config file), dispatches to the library, and writes self-describing
//! JSON/CSV artifacts with the fully-resolved configuration echoed in the
//! header. Exit codes: 0 success, 1 certificate/verification failure, 2
//! usage or input error.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use supersat::family::{
    build_balanced_family, codegree_function, member_is_copy, parse_cutoff, replay_audit,
    verify_certificate, BetaMode, BuildOptions, CopyFamily,
};
use supersat::hypergraph::{EdgeSet, Hypergraph};
use supersat::pattern::{
    compute_densities, compute_exponents, parse_rational, BoundBranch, BoundVariant, Pattern,
};
use supersat::enumerate::enumerate_copies;
use supersat::turan::{
    ex_exact, random_turan_sweep, MeasureMode, MeasuredKind, SweepParams,
};

#[derive(Parser)]
#[command(
    name = "supersat",
    about = "Balanced supersaturation toolkit: density exponents, copy \
             enumeration, balanced families with codegree certificates, and \
             random Turan experiments",
    version
)]
struct Cli {
    /// Flat key/value config file (one `key = value` per line) supplying
    /// defaults; explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker-count cap for sweep cells (execution order and output are
    /// deterministic regardless).
    #[arg(long, global = true, default_value_t = default_workers())]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |p| p.get())
}

#[derive(Subcommand)]
enum Command {
    /// Density report and exponent set for a pattern
    Metrics(MetricsArgs),
    /// Stream copies of a pattern in a host as JSON lines
    Enumerate(EnumerateArgs),
    /// Build a balanced family and write its certificate bundle
    BuildFamily(BuildFamilyArgs),
    /// Re-verify a certificate bundle from scratch
    Verify(VerifyArgs),
    /// Exact extremal number with a witness
    ExExact(ExExactArgs),
    /// Random Turan sweep over (n, p, trial) cells
    RandomTuran(RandomTuranArgs),
    /// Codegree function delta(F, tau) of a bundle's family
    Codegree(CodegreeArgs),
    /// Sample G(n, p) to an edge-list file
    Sample(SampleArgs),
}

#[derive(Args)]
struct MetricsArgs {
    /// Pattern: a file path or a builtin descriptor such as
    /// builtin:cycle:4 or builtin:complete_bipartite:3:3
    #[arg(long)]
    pattern: String,
    /// Exponent alpha as an exact rational (3/2 or 1.5)
    #[arg(long)]
    alpha: String,
    /// Density k = e(G)/n^alpha of the prospective host
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Prospective host order
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Host graph edge-list file
    #[arg(long)]
    host: PathBuf,
    #[arg(long)]
    pattern: String,
    /// Keep at most this many copies (canonical order)
    #[arg(long)]
    limit: Option<usize>,
    /// File of forbidden edge-index sets, one per line
    #[arg(long)]
    forbidden: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildFamilyArgs {
    #[arg(long)]
    host: PathBuf,
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    alpha: String,
    /// thm1, thm2, or an explicit value like 0.25
    #[arg(long, default_value = "thm1")]
    beta_mode: String,
    #[arg(long)]
    n_target: Option<usize>,
    /// Certificate constant C
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Scale knob for the default family size target
    #[arg(long, default_value_t = 1.0)]
    delta_prime: f64,
    /// Subset-size cutoff for saturation bookkeeping: l or l-1
    #[arg(long, default_value = "l-1")]
    cutoff: String,
    /// Echoed for provenance; the build itself is deterministic
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate bundle produced by build-family
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExExactArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    pattern: String,
    /// Search-node budget; the solver refuses rather than guess when it
    /// runs out
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    General,
    EsGood,
}

#[derive(Args)]
struct RandomTuranArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    alpha: String,
    /// Comma-separated host orders
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Comma-separated edge probabilities
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bound formula to evaluate per cell
    #[arg(long, value_enum, default_value_t = VariantArg::General)]
    variant: VariantArg,
    /// Constant C in the bound formula
    #[arg(long, default_value_t = 1.0)]
    bound_c: f64,
    /// Copy-count budget per exact cell; refusals fall back to greedy and
    /// are recorded inline
    #[arg(long)]
    copy_budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CodegreeArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    /// Edge uniformity
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(args) => args,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Merges `--config <file>` defaults into the argument list. The file is a
/// flat `key = value` document mirroring the long flags; explicit flags win.
fn expand_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| anyhow!("--config requires a file path"))?
        .clone();
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key = value", lineno + 1))?;
        let flag = format!("--{}", key.trim());
        if !args.contains(&flag) {
            args.push(flag);
            args.push(value.trim().to_string());
        }
    }
    Ok(args)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if cli.workers == 0 {
        bail!("--workers must be positive");
    }
    match cli.command {
        Command::Metrics(a) => cmd_metrics(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::BuildFamily(a) => cmd_build_family(a),
        Command::Verify(a) => cmd_verify(a),
        Command::ExExact(a) => cmd_ex_exact(a),
        Command::RandomTuran(a) => cmd_random_turan(a),
        Command::Codegree(a) => cmd_codegree(a),
        Command::Sample(a) => cmd_sample(a),
    }
}

/// Resolves a pattern spec: `builtin:NAME[:ARGS]`, a bare builtin
/// descriptor like `cycle:4`, or an edge-list file path.
fn load_pattern(spec: &str) -> Result<Pattern> {
    let descriptor = spec.strip_prefix("builtin:").unwrap_or(spec);
    let parts: Vec<&str> = descriptor.split(':').collect();
    let arg = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .ok_or_else(|| anyhow!("builtin `{descriptor}` missing argument {i}"))?
            .parse::<usize>()
            .with_context(|| format!("builtin `{descriptor}`: bad argument"))
    };
    let graph = match parts[0] {
        "cycle" => Some(Hypergraph::cycle(arg(1)?)?),
        "path" => Some(Hypergraph::path(arg(1)?)?),
        "complete" => Some(Hypergraph::complete_graph(arg(1)?)?),
        "complete_bipartite" => Some(Hypergraph::complete_bipartite(arg(1)?, arg(2)?)?),
        "cube" => Some(Hypergraph::cube()?),
        _ => None,
    };
    let graph = match graph {
        Some(g) => g,
        None if spec.starts_with("builtin:") => {
            bail!("unknown builtin pattern `{descriptor}`")
        }
        None => {
            let text =
                fs::read_to_string(spec).with_context(|| format!("reading pattern {spec}"))?;
            Hypergraph::parse_text(&text)?
        }
    };
    Ok(Pattern::new(graph)?)
}

fn load_host(path: &PathBuf) -> Result<Hypergraph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading host {}", path.display()))?;
    Ok(Hypergraph::parse_text(&text)?)
}

fn write_artifact(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn json_artifact(out: &Option<PathBuf>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_artifact(out, &text)
}

fn cmd_metrics(a: MetricsArgs) -> Result<ExitCode> {
    let pattern = load_pattern(&a.pattern)?;
    let alpha = parse_rational(&a.alpha)?;
    let report = compute_densities(&pattern)?;
    let exponents = compute_exponents(&report, &pattern, &alpha, a.k, a.n)?;
    let bundle = json!({
        "config": {
            "subcommand": "metrics",
            "pattern": a.pattern,
            "alpha": a.alpha,
            "k": a.k,
            "n": a.n,
        },
        "pattern": {
            "h": pattern.h(),
            "l": pattern.ell(),
            "r": pattern.r(),
            "r_partite": pattern.is_r_partite(),
        },
        "density_report": report,
        "exponents": exponents,
    });
    json_artifact(&a.out, &bundle)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_forbidden(path: &PathBuf) -> Result<Vec<EdgeSet>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading forbidden sets {}", path.display()))?;
    let mut sets = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let indices: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("forbidden sets line {}", lineno + 1))?;
        sets.push(EdgeSet::new(indices));
    }
    Ok(sets)
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<ExitCode> {
    let host = load_host(&a.host)?;
    let pattern = load_pattern(&a.pattern)?;
    let forbidden = match &a.forbidden {
        Some(path) => parse_forbidden(path)?,
        None => vec![],
    };
    let copies = enumerate_copies(&host, &pattern, a.limit, &forbidden)?;
    let header = json!({
        "config": {
            "subcommand": "enumerate",
            "host": a.host.display().to_string(),
            "pattern": a.pattern,
            "limit": a.limit,
            "forbidden": a.forbidden.as_ref().map(|p| p.display().to_string()),
        },
        "copies": copies.len(),
    });
    let mut text = serde_json::to_string(&header)?;
    text.push('\n');
    for copy in &copies {
        text.push_str(&serde_json::to_string(copy.edge_set.indices())?);
        text.push('\n');
    }
    write_artifact(&a.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_beta_mode(s: &str) -> Result<BetaMode> {
    match s {
        "thm1" => Ok(BetaMode::Thm1),
        "thm2" => Ok(BetaMode::Thm2),
        other => {
            let v: f64 = other
                .parse()
                .map_err(|_| anyhow!("beta-mode must be thm1, thm2, or a number, got `{other}`"))?;
            if !(v > 0.0 && v <= 1.0) {
                bail!("explicit beta must lie in (0, 1], got {v}");
            }
            Ok(BetaMode::Explicit(v))
        }
    }
}

fn build_family_config(a: &BuildFamilyArgs) -> Value {
    json!({
        "subcommand": "build-family",
        "host": a.host.display().to_string(),
        "pattern": a.pattern,
        "alpha": a.alpha,
        "beta_mode": a.beta_mode,
        "n_target": a.n_target,
        "c": a.c,
        "delta_prime": a.delta_prime,
        "cutoff": a.cutoff,
        "seed": a.seed,
    })
}

fn cmd_build_family(a: BuildFamilyArgs) -> Result<ExitCode> {
    let host = load_host(&a.host)?;
    let pattern = load_pattern(&a.pattern)?;
    let alpha = parse_rational(&a.alpha)?;
    let options = BuildOptions {
        k_override: None,
        n_target: a.n_target,
        c: a.c,
        delta_prime: a.delta_prime,
        beta_mode: parse_beta_mode(&a.beta_mode)?,
        cutoff: parse_cutoff(&a.cutoff)?,
    };
    let (family, report) = build_balanced_family(&host, &pattern, &alpha, &options)?;
    let certificate = verify_certificate(&family);
    let satisfied = certificate.satisfied;
    let bundle = json!({
        "config": build_family_config(&a),
        "family": family,
        "report": report,
        "certificate": certificate,
    });
    json_artifact(&a.out, &bundle)?;
    Ok(if satisfied { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.bundle)
        .with_context(|| format!("reading bundle {}", a.bundle.display()))?;
    let bundle: Value = serde_json::from_str(&text)?;
    let family_value = bundle
        .get("family")
        .ok_or_else(|| anyhow!("bundle has no `family` field"))?;
    let mut family: CopyFamily = serde_json::from_value(family_value.clone())?;
    family.rebuild();
    let certificate = verify_certificate(&family);
    let audit = replay_audit(&family);
    let mut bad_members = Vec::new();
    for (i, member) in family.members.iter().enumerate() {
        if !member_is_copy(&family.host, &family.pattern, member)? {
            bad_members.push(i);
        }
    }
    let ok = certificate.satisfied && audit.sound && bad_members.is_empty();
    let out = json!({
        "config": {
            "subcommand": "verify",
            "bundle": a.bundle.display().to_string(),
        },
        "certificate": certificate,
        "replay_audit": audit,
        "members_not_copies": bad_members,
        "verified": ok,
    });
    json_artifact(&a.out, &out)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_ex_exact(a: ExExactArgs) -> Result<ExitCode> {
    let pattern = load_pattern(&a.pattern)?;
    let record = ex_exact(a.n, &pattern, a.budget)?;
    let out = json!({
        "config": {
            "subcommand": "ex-exact",
            "n": a.n,
            "pattern": a.pattern,
            "budget": a.budget,
        },
        "record": record,
    });
    json_artifact(&a.out, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_random_turan(a: RandomTuranArgs) -> Result<ExitCode> {
    let pattern = load_pattern(&a.pattern)?;
    let alpha = parse_rational(&a.alpha)?;
    let mode = match a.mode {
        ModeArg::Exact => MeasureMode::Exact,
        ModeArg::Greedy => MeasureMode::Greedy,
    };
    let variant = match a.variant {
        VariantArg::General => BoundVariant::General,
        VariantArg::EsGood => BoundVariant::EsGood,
    };
    let params = SweepParams {
        alpha,
        n_list: a.n_list.clone(),
        p_list: a.p_list.clone(),
        trials: a.trials,
        mode,
        seed: a.seed,
        variant,
        bound_c: a.bound_c,
        copy_budget: a.copy_budget,
    };
    let records = random_turan_sweep(&pattern, &params)?;

    let mut csv = String::new();
    let fmt_list = |xs: &[String]| xs.join(",");
    let config_lines = [
        ("subcommand", "random-turan".to_string()),
        ("pattern", a.pattern.clone()),
        ("alpha", a.alpha.clone()),
        ("n_list", fmt_list(&a.n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>())),
        ("p_list", fmt_list(&a.p_list.iter().map(|p| p.to_string()).collect::<Vec<_>>())),
        ("trials", a.trials.to_string()),
        (
            "mode",
            match a.mode {
                ModeArg::Exact => "exact".into(),
                ModeArg::Greedy => "greedy".into(),
            },
        ),
        ("seed", a.seed.to_string()),
        (
            "variant",
            match a.variant {
                VariantArg::General => "general".into(),
                VariantArg::EsGood => "es-good".into(),
            },
        ),
        ("bound_c", a.bound_c.to_string()),
        (
            "copy_budget",
            a.copy_budget.map_or("default".into(), |b| b.to_string()),
        ),
    ];
    for (key, value) in config_lines {
        csv.push_str(&format!("# {key} = {value}\n"));
    }
    csv.push_str("n,p,seed,trial,measured,measured_kind,bound_value,branch,runtime_ms\n");
    for rec in &records {
        if let Some(note) = &rec.note {
            csv.push_str(&format!(
                "# cell(n={}, p={}, trial={}): {}\n",
                rec.n, rec.p, rec.trial, note
            ));
        }
        let kind = match rec.measured_kind {
            MeasuredKind::Exact => "exact",
            MeasuredKind::GreedyLowerBound => "greedy_lower_bound",
        };
        let branch = match rec.branch {
            BoundBranch::Low => "low",
            BoundBranch::High => "high",
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            rec.n,
            rec.p,
            rec.seed,
            rec.trial,
            rec.measured,
            kind,
            rec.bound_value,
            branch,
            rec.runtime_ms
        ));
    }
    write_artifact(&a.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_codegree(a: CodegreeArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.bundle)
        .with_context(|| format!("reading bundle {}", a.bundle.display()))?;
    let bundle: Value = serde_json::from_str(&text)?;
    let family_value = bundle
        .get("family")
        .ok_or_else(|| anyhow!("bundle has no `family` field"))?;
    let mut family: CopyFamily = serde_json::from_value(family_value.clone())?;
    family.rebuild();
    let delta = codegree_function(&family.members, family.pattern.ell(), a.tau)?;
    let out = json!({
        "config": {
            "subcommand": "codegree",
            "bundle": a.bundle.display().to_string(),
            "tau": a.tau,
        },
        "members": family.members.len(),
        "l": family.pattern.ell(),
        "delta": delta,
    });
    json_artifact(&a.out, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(a: SampleArgs) -> Result<ExitCode> {
    let graph = Hypergraph::gnp_sample(a.n, a.p, a.r, a.seed)?;
    let mut text = format!(
        "# subcommand = sample\n# n = {}\n# p = {}\n# r = {}\n# seed = {}\n",
        a.n, a.p, a.r, a.seed
    );
    text.push_str(&graph.serialize_text());
    write_artifact(&a.out, &text)?;
    Ok(ExitCode::SUCCESS)
}
