use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bogomolov::catalog::{self, Verdict};
use bogomolov::collector::consistency::{check_consistency, ConsistencyOptions};
use bogomolov::collector::{structure, Collector, FastPathVerdict, DEFAULT_STEP_BUDGET};
use bogomolov::extension::{
    attach_tails_with_budget, commuting_pair_relations, overlap_relations, PairOptions, PairStrategy, TailMode,
    DEFAULT_ENUMERATION_LIMIT,
};
use bogomolov::multiplier::{
    compute, cp_extension_text, lemma24_property_check, schur_multiplier_with_budget, MultiplierOptions,
    MultiplierReport,
};
use bogomolov::presentation::{parse_presentation_at, Presentation, PresentationTemplate, PrimeSpec};
use bogomolov::Error;

#[derive(Parser)]
#[command(name = "bogomolov", version, about = "Schur and Bogomolov multipliers of p-groups from polycyclic presentations")]
struct Cli {
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, env = "BOGOMOLOV_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bogomolov multiplier, optionally with the Schur multiplier.
    Compute(ComputeArgs),
    /// Schur multiplier (all relations tailed, overlap relations only).
    Schur(InputArgs),
    /// Compare computed multipliers with the expected-results table.
    Verify(VerifyArgs),
    /// Overlap consistency check.
    Consistency(ConsistencyArgs),
    /// Class, lower central series, center and exponent.
    Structure(InputArgs),
    /// Random trials of the expansion of [x^n, y].
    Lemma24(LemmaArgs),
    /// Catalog queries.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Ids with a printed presentation.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Source text of one entry.
    Show { id: String },
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Catalog id such as G9.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    catalog: Option<String>,
    /// Presentation file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Prime; required unless the file fixes one.
    #[arg(long)]
    prime: Option<u64>,
    /// Parameter value, `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, i64)>,
    /// Rewrite-step budget per collected word.
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    step_budget: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Reduced,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Full,
    CenterReduced,
    Sampled,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "reduced")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "center-reduced")]
    strategy: StrategyArg,
    /// Also compute the Schur multiplier.
    #[arg(long)]
    schur: bool,
    /// Stop early when the class-3 triviality criterion applies.
    #[arg(long)]
    fast_path: bool,
    /// Largest group order the full pair strategy enumerates.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    enumeration_limit: u64,
    /// Include stage timings in the report.
    #[arg(long)]
    timings: bool,
    /// Print the commutativity-preserving extension.
    #[arg(long)]
    cp_extension: bool,
    /// Print the relation rows, `provenance: c1 ... cl`, and exit.
    #[arg(long)]
    dump_rows: bool,
    /// Seed and count for the sampled strategy (row dumps only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Set name from the catalog, or `all`.
    #[arg(long, default_value = "all")]
    set: String,
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConsistencyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also let the relators act on all normal words when p^n is at most this.
    #[arg(long, default_value_t = 0)]
    enumerate_up_to: u64,
}

#[derive(Args)]
struct LemmaArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("`{v}` is not an integer"))?;
    Ok((k.trim().to_string(), v))
}

enum Failure {
    Usage(String),
    Mismatch(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget_or_defect() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type CliResult = Result<(), Failure>;

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn load(input: &InputArgs) -> Result<(Presentation, BTreeMap<String, i64>), Failure> {
    let overrides: BTreeMap<String, i64> = input.params.iter().cloned().collect();
    if let Some(id) = &input.catalog {
        let prime = input.prime.ok_or_else(|| Failure::Usage("--prime is required with --catalog".into()))?;
        return Ok(catalog::load_entry_with_defaults(id, prime, &overrides)?);
    }
    let path = input.file.as_ref().expect("clap enforces an input");
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let template = PresentationTemplate::parse(&text).map_err(Error::from)?;
    let prime = match (input.prime, &template.prime) {
        (Some(p), _) => p,
        (None, PrimeSpec::Fixed(p)) => *p,
        (None, PrimeSpec::Symbolic(_)) => return Err(Failure::Usage("the file leaves the prime open; pass --prime".into())),
    };
    let pres = parse_presentation_at(&text, prime, &overrides)?;
    Ok((pres, overrides))
}

fn abelian_text(prime_powers: &[u64]) -> String {
    if prime_powers.is_empty() {
        "0".into()
    } else {
        prime_powers.iter().map(|d| format!("Z_{d}")).collect::<Vec<_>>().join(" x ")
    }
}

fn fast_path_text(v: &FastPathVerdict) -> String {
    match v {
        FastPathVerdict::Trivial => "applies (trivial)".into(),
        FastPathVerdict::NotApplicable(r) => format!("not applicable ({r})"),
    }
}

fn print_report(r: &MultiplierReport, surviving: &[(String, String, u64)]) {
    let mut header = format!("group {}  prime {}", r.group, r.prime);
    for (k, v) in &r.parameters {
        header.push_str(&format!("  {k}={v}"));
    }
    println!("{header}");
    println!("class {}; {} tails, {} mode; {} pairs", r.class, r.tails, r.mode, r.strategy);
    println!("relation rows: {} overlap, {} commuting-pair", r.overlap_rows, r.pair_rows);
    if let Some(m) = &r.schur {
        println!("M(G) = {}", abelian_text(m));
    }
    println!("B0(G) = {}", abelian_text(&r.bogomolov.invariants));
    for (tails, rel, order) in surviving {
        println!("  generator of order {order}: {tails} = {rel}");
    }
    match r.free_rank {
        Some(f) => println!("free rank {f}"),
        None => println!("free rank not computed"),
    }
    println!("fast path: {}{}", fast_path_text(&r.fast_path), if r.fast_path_taken { ", taken" } else { "" });
    if let Some(t) = &r.timings_ms {
        println!(
            "timings (ms): consistency {} structure {} overlaps {} pairs {} smith {} schur {} total {}",
            t.consistency, t.structure, t.overlaps, t.commuting_pairs, t.smith, t.schur, t.total
        );
    }
}

fn run_compute(a: &ComputeArgs) -> CliResult {
    let (pres, params) = load(&a.input)?;
    let mode = match a.mode {
        ModeArg::Reduced => TailMode::Reduced,
        ModeArg::Full => TailMode::Full,
    };
    let strategy = match a.strategy {
        StrategyArg::Full => PairStrategy::Full,
        StrategyArg::CenterReduced => PairStrategy::CenterReduced,
        StrategyArg::Sampled => PairStrategy::Sampled { seed: a.seed, count: a.samples },
    };
    if a.dump_rows {
        let ext = attach_tails_with_budget(&pres, mode, a.input.step_budget)?;
        let mut rows = overlap_relations(&ext)?;
        rows.append(commuting_pair_relations(&ext, strategy, PairOptions { enumeration_limit: a.enumeration_limit })?);
        print!("{}", rows.dump());
        return Ok(());
    }
    let opts = MultiplierOptions {
        mode,
        strategy,
        use_fast_path: a.fast_path,
        schur: a.schur,
        enumeration_limit: a.enumeration_limit,
        step_budget: a.input.step_budget,
        parameters: params.into_iter().collect(),
    };
    let mut comp = compute(&pres, &opts)?;
    if !a.timings {
        comp.report.timings_ms = None;
    }
    let cp = if a.cp_extension && !comp.report.fast_path_taken { Some(cp_extension_text(&comp)?) } else { None };
    if a.input.json {
        print_json(&comp.report);
    } else {
        let surviving: Vec<(String, String, u64)> =
            comp.report.surviving.iter().map(|g| (g.tails.clone(), g.relators.clone(), g.order)).collect();
        print_report(&comp.report, &surviving);
    }
    if let Some(text) = cp {
        if !a.input.json {
            println!();
        }
        print!("{text}");
    }
    Ok(())
}

#[derive(Serialize)]
struct SchurOut {
    group: String,
    prime: u32,
    invariants: Vec<u64>,
    free_rank: usize,
}

fn run_schur(a: &InputArgs) -> CliResult {
    let (pres, _) = load(a)?;
    let ty = schur_multiplier_with_budget(&pres, a.step_budget)?;
    let out = SchurOut { group: pres.name.clone(), prime: pres.prime, invariants: ty.torsion_u64()?, free_rank: ty.free_rank };
    if a.json {
        print_json(&out);
    } else {
        println!("M({}) = {}  (p = {}, free rank {})", out.group, abelian_text(&out.invariants), out.prime, out.free_rank);
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyLine {
    id: String,
    expected: String,
    computed: Option<Vec<u64>>,
    status: String,
    note: String,
}

fn run_verify(a: &VerifyArgs) -> CliResult {
    let ids = catalog::set(&a.set)?;
    let mut lines = Vec::new();
    let mut failed = 0usize;
    for id in ids {
        let expected = catalog::expected_result(id, a.prime as u32)?;
        let computed = catalog::load_entry_with_defaults(id, a.prime, &BTreeMap::new()).and_then(|(pres, params)| {
            let opts = MultiplierOptions { parameters: params.into_iter().collect(), ..Default::default() };
            bogomolov::multiplier::bogomolov_multiplier(&pres, &opts)
        });
        let expected_text = match expected.verdict {
            Verdict::Nontrivial if !expected.invariants.is_empty() => format!("nontrivial {:?}", expected.invariants),
            v => v.as_str().to_string(),
        };
        let (status, computed_inv, note) = match (&computed, expected.verdict) {
            (Err(e), Verdict::Unknown) => ("unknown".to_string(), None, e.to_string()),
            (Err(e), _) => ("error".to_string(), None, e.to_string()),
            (Ok(r), Verdict::Unknown) => ("unknown".to_string(), Some(r.bogomolov.invariants.clone()), String::new()),
            (Ok(r), v) => {
                let inv = r.bogomolov.invariants.clone();
                let ok = match v {
                    Verdict::Trivial => inv.is_empty(),
                    Verdict::Nontrivial => !inv.is_empty() && (expected.invariants.is_empty() || expected.invariants == inv),
                    Verdict::Unknown => true,
                };
                let fast_ok = !(r.fast_path == FastPathVerdict::Trivial && !inv.is_empty());
                let note = if fast_ok { String::new() } else { "fast path disagrees".to_string() };
                ((if ok && fast_ok { "ok" } else { "mismatch" }).to_string(), Some(inv), note)
            }
        };
        if status == "mismatch" || status == "error" {
            failed += 1;
        }
        lines.push(VerifyLine { id: id.to_string(), expected: expected_text, computed: computed_inv, status, note });
    }
    if a.json {
        print_json(&lines);
    } else {
        for l in &lines {
            let computed = l.computed.as_ref().map(|c| abelian_text(c)).unwrap_or_else(|| "-".into());
            let note = if l.note.is_empty() { String::new() } else { format!("  ({})", l.note) };
            println!("{:<6} {:<9} expected {:<14} computed {:<8}{}", l.id, l.status, l.expected, computed, note);
        }
        println!("{} entries, {} failed", lines.len(), failed);
    }
    if failed > 0 {
        Err(Failure::Mismatch(format!("{failed} entries did not match the expected table")))
    } else {
        Ok(())
    }
}

fn run_consistency(a: &ConsistencyArgs) -> CliResult {
    let (pres, _) = load(&a.input)?;
    let r = check_consistency(&pres, ConsistencyOptions { step_budget: a.input.step_budget, enumerate_up_to: a.enumerate_up_to })?;
    let verdict = || {
        if r.consistent {
            Ok(())
        } else {
            Err(Failure::Mismatch(format!("{} is inconsistent at p = {}", pres.name, pres.prime)))
        }
    };
    if a.input.json {
        print_json(&r);
        return verdict();
    }
    println!(
        "{} at p = {}: {} ({} overlaps checked, {} failed)",
        pres.name,
        pres.prime,
        if r.consistent { "consistent" } else { "inconsistent" },
        r.overlaps_checked,
        r.failures.len()
    );
    for f in &r.failures {
        let names: Vec<&str> = f.indices.iter().map(|&i| pres.generators[i].as_str()).collect();
        println!("  {} ({}): {:?} vs {:?}", f.family.tag(), names.join(","), f.left, f.right);
    }
    if let Some(e) = &r.enumeration {
        println!(
            "  relator action on {} normal words: {} failures; order {}",
            e.elements,
            e.relator_failures,
            if e.order_confirmed { "confirmed" } else { "not confirmed" }
        );
    }
    verdict()
}

fn run_structure(a: &InputArgs) -> CliResult {
    let (pres, _) = load(a)?;
    let col = Collector::with_budget(&pres, a.step_budget)?;
    let s = structure(&col);
    if a.json {
        print_json(&s);
        return Ok(());
    }
    let names = |idx: &[usize]| idx.iter().map(|&i| pres.generators[i].as_str()).collect::<Vec<_>>().join(" ");
    println!("{} at p = {}: order p^{}, class {}", pres.name, pres.prime, s.order_log, s.class);
    for (k, term) in s.lower_central_series.iter().enumerate() {
        println!("  gamma_{} = <{}>", k + 1, names(term));
    }
    println!("  center depths <{}>", names(&s.center));
    println!("  exponent {}: {} ({:?})", pres.prime, s.exponent_p, s.exponent_method);
    Ok(())
}

fn run_lemma(a: &LemmaArgs) -> CliResult {
    let (pres, _) = load(&a.input)?;
    let r = lemma24_property_check(&pres, a.seed, a.trials)?;
    if a.input.json {
        print_json(&r);
    } else {
        println!("{} at p = {}: {} trials, {} failures (seed {})", pres.name, pres.prime, r.trials, r.failures.len(), r.seed);
        for f in r.failures.iter().take(10) {
            println!("  x={:?} y={:?} n={}: {:?} vs {:?}", f.x, f.y, f.n, f.left, f.right);
        }
    }
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} failed trials", r.failures.len())))
    }
}

fn run_catalog(c: &CatalogCommand) -> CliResult {
    match c {
        CatalogCommand::List { json } => {
            let ids = catalog::list_entries();
            if *json {
                print_json(&ids);
            } else {
                for id in ids {
                    println!("{id}");
                }
            }
        }
        CatalogCommand::Show { id } => print!("{}", catalog::entry(id)?.source),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let result = match &cli.command {
        Command::Compute(a) => run_compute(a),
        Command::Schur(a) => run_schur(a),
        Command::Verify(a) => run_verify(a),
        Command::Consistency(a) => run_consistency(a),
        Command::Structure(a) => run_structure(a),
        Command::Lemma24(a) => run_lemma(a),
        Command::Catalog { command } => run_catalog(command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
