//! Command-line driver: algebra files in, text or JSON reports out.
//!
//! Exit codes: 0 when every check passes, 1 when a requested check fails or
//! a search finds a gap, 2 for input and usage errors, 3 when a budget runs
//! out.

pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::algebra::{AlgRef, Homomorphism, Subuniverse, Term};
use crate::commutator::{higgins, higgins3, huq, smith_normalised};
use crate::conditions::{
    check_uce_instance, commutator_law_report, condition_families, grun_check, is_central_extension,
    is_perfect, law_suite, Family, LawConfig,
};
use crate::congruence::{all_congruences, zero_class};
use crate::error::{Error, Result};
use crate::library::{library, malcev_for, paper_suite, variety};
use crate::report::{CheckResult, ConditionReport, Verdict};
use crate::search::{find_witness, GoalKind, SearchGoal};
use crate::Budget;

pub use format::{
    library_file, parse_algebra_file, serialize_algebra, serialize_file, AlgebraFile,
    AlgebraRecord, HomRecord, SubsetRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Triples sampled by `check --condition laws`.
const LAW_TRIPLES: usize = 25;

#[derive(Debug, Parser)]
#[command(name = "commcalc", version, about = "Commutators and commutator conditions on finite pointed algebras")]
struct Cli {
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled law instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the model search.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Node limit for `search`; closure-size limit for other commands.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, validate and print an algebra file (or `builtin:<name>`).
    Show { file: String },
    /// Compute one commutator of named subsets.
    Commutator {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        third: Option<String>,
    },
    /// Run a condition suite on one algebra.
    Check {
        #[arg(long, value_enum)]
        condition: Condition,
        #[arg(long)]
        algebra: String,
        /// Homomorphism for `central` (a library name, or one from the file).
        #[arg(long)]
        hom: Option<String>,
    },
    /// Test whether composing two central extensions through a perfect
    /// middle stays central.
    Uce {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// File defining the homomorphisms; library names otherwise.
        #[arg(long)]
        file: Option<String>,
    },
    /// Replay the worked example on the algebra C and the Pixley errata.
    PaperSuite,
    /// Bounded search for a model exhibiting a gap.
    Search {
        #[arg(long)]
        goal: GoalKind,
        #[arg(long)]
        variety: String,
        #[arg(long)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        min_size: usize,
    },
    /// List the congruence lattice.
    Congruences {
        #[arg(long)]
        algebra: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Higgins,
    Higgins3,
    Huq,
    Smith,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Condition {
    Sh,
    Nh,
    Wnh,
    Pa,
    Laws,
    Grun,
    Central,
    Perfect,
}

impl Condition {
    fn family(self) -> Option<Family> {
        match self {
            Condition::Sh => Some(Family::Sh),
            Condition::Nh => Some(Family::Nh),
            Condition::Wnh => Some(Family::Wnh),
            Condition::Pa => Some(Family::Pa),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct BudgetUsage {
    used: u64,
    limit: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    #[serde(rename = "tool-version")]
    tool_version: &'static str,
    command: &'a str,
    algebra: Option<&'a str>,
    results: &'a [CheckResult],
    budget: BudgetUsage,
}

/// What a command produced before formatting.
struct Outcome {
    algebra: Option<String>,
    results: Vec<CheckResult>,
    text: String,
    exit: i32,
    used: u64,
    limit: u64,
    /// Prefix verdict lines with `#` so the text stays a parseable file.
    as_file: bool,
}

impl Outcome {
    fn new(algebra: Option<String>) -> Self {
        Outcome {
            algebra,
            results: Vec::new(),
            text: String::new(),
            as_file: false,
            exit: EXIT_OK,
            used: 0,
            limit: 0,
        }
    }

    fn extend(&mut self, report: ConditionReport) {
        self.results.extend(report.results);
    }

    /// Exit 1 if any result failed, unless a stronger code is already set.
    fn settle(mut self) -> Self {
        if self.exit == EXIT_OK && self.results.iter().any(|r| r.verdict == Verdict::Fail) {
            self.exit = EXIT_CHECK_FAILED;
        }
        self
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Validation(_) | Error::NotMalcev { .. } => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Runs the CLI with process stdout and stderr.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams; returns the exit code.
pub fn run_with<I, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = OsString>,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    let name = command_name(&cli.command);
    let mut budget = Budget::default();
    if let (Some(b), false) = (cli.budget, matches!(cli.command, Command::Search { .. })) {
        budget.max_closure = b as usize;
    }
    let outcome = dispatch(&cli, &budget).map(Outcome::settle);
    match outcome {
        Ok(o) => {
            if cli.json {
                let report = Report {
                    tool_version: env!("CARGO_PKG_VERSION"),
                    command: name,
                    algebra: o.algebra.as_deref(),
                    results: &o.results,
                    budget: BudgetUsage { used: o.used, limit: o.limit },
                };
                let text = serde_json::to_string_pretty(&report).expect("reports serialize");
                let _ = writeln!(out, "{text}");
            } else {
                let _ = write!(out, "{}", o.text);
                let lead = if o.as_file { "# " } else { "" };
                for r in &o.results {
                    let _ = writeln!(out, "{lead}{:<7} {}  ({})", verdict_word(r.verdict), r.id, r.reference);
                }
            }
            o.exit
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let failure = CheckResult::new("error", name, Verdict::Fail).with_witness(json!({ "message": e.to_string(), "exit": code }));
                let report = Report {
                    tool_version: env!("CARGO_PKG_VERSION"),
                    command: name,
                    algebra: None,
                    results: std::slice::from_ref(&failure),
                    budget: BudgetUsage { used: budget.peak(), limit: budget.max_closure as u64 },
                };
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Skipped => "SKIPPED",
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Show { .. } => "show",
        Command::Commutator { .. } => "commutator",
        Command::Check { .. } => "check",
        Command::Uce { .. } => "uce",
        Command::PaperSuite => "paper-suite",
        Command::Search { .. } => "search",
        Command::Congruences { .. } => "congruences",
    }
}

/// An algebra from `builtin:<name>`, `<path>` (first algebra) or
/// `<path>#<name>`, with the file it came from.
fn load_algebra(spec: &str) -> Result<(AlgebraRecord, AlgebraFile)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let entry = library().get(name).ok_or_else(|| {
            Error::Usage(format!("no builtin algebra `{name}`; known: {}", library().names().join(", ")))
        })?;
        let file = library_file(entry);
        let rec = file.algebras[0].clone();
        return Ok((rec, file));
    }
    let (path, pick) = match spec.rsplit_once('#') {
        Some((p, n)) if !Path::new(spec).exists() => (p, Some(n)),
        _ => (spec, None),
    };
    let file = load_file(path)?;
    let rec = match pick {
        Some(n) => file.algebra(n).ok_or_else(|| Error::Usage(format!("`{path}` defines no algebra `{n}`")))?,
        None => file.algebras.first().ok_or_else(|| Error::Usage(format!("`{path}` defines no algebras")))?,
    };
    Ok((rec.clone(), file))
}

fn load_file(path: &str) -> Result<AlgebraFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read `{path}`: {e}")))?;
    parse_algebra_file(&text).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Usage(format!("{path}:{line}:{column}: {message}")),
        other => other,
    })
}

fn malcev(rec: &AlgebraRecord, budget: &Budget) -> Result<Term> {
    if let Some(t) = rec.variety.as_deref().and_then(variety).and_then(|v| v.malcev) {
        return Ok(t);
    }
    malcev_for(&rec.algebra, budget).ok_or_else(|| {
        Error::Usage(format!(
            "no known Mal'cev term for `{}`; declare a `variety` in the file",
            rec.algebra.name()
        ))
    })
}

/// `all`, `zero`, a subset name, or a comma-separated element list.
fn subset(rec: &AlgebraRecord, spec: &str) -> Result<Subuniverse> {
    let x = &rec.algebra;
    match spec {
        "all" => return Ok(Subuniverse::full(x)),
        "zero" => return Ok(Subuniverse::zero(x)),
        _ => {}
    }
    if let Some(s) = rec.subset(spec) {
        if !s.closed {
            return Err(Error::NotSubuniverse(format!("subset `{spec}` is not closed")));
        }
        return Subuniverse::from_members(x, &s.members);
    }
    let members = spec
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Usage(format!("unknown subset `{spec}`")))?;
    Subuniverse::from_members(x, &members)
}

fn set_text(s: &Subuniverse) -> String {
    let parts: Vec<String> = s.members().iter().map(|m| m.to_string()).collect();
    format!("{{{}}}", parts.join(" "))
}

fn finish_budget(mut o: Outcome, budget: &Budget) -> Outcome {
    o.used = budget.peak();
    o.limit = budget.max_closure as u64;
    o
}

fn dispatch(cli: &Cli, budget: &Budget) -> Result<Outcome> {
    match &cli.command {
        Command::Show { file } => show(file, budget),
        Command::Commutator { kind, algebra, left, right, third } => {
            commutator(*kind, algebra, left, right, third.as_deref(), budget)
        }
        Command::Check { condition, algebra, hom } => check(*condition, algebra, hom.as_deref(), cli.seed, budget),
        Command::Uce { f, g, file } => uce(f, g, file.as_deref(), budget),
        Command::PaperSuite => {
            let mut o = Outcome::new(Some("paperC".into()));
            o.extend(paper_suite(budget)?);
            Ok(finish_budget(o, budget))
        }
        Command::Search { goal, variety: v, max_size, min_size } => search(*goal, v, *min_size, *max_size, cli, budget),
        Command::Congruences { algebra } => congruences(algebra, budget),
    }
}

fn show(spec: &str, budget: &Budget) -> Result<Outcome> {
    let file = if spec.starts_with("builtin:") {
        load_algebra(spec)?.1
    } else {
        load_file(spec)?
    };
    let mut o = Outcome::new(file.algebras.first().map(|a| a.algebra.name().to_string()));
    o.text = serialize_file(&file);
    for a in &file.algebras {
        let x = &a.algebra;
        o.results.push(
            CheckResult::new(format!("valid:{}", x.name()), "tables, subsets and homomorphisms validate", Verdict::Pass)
                .with_witness(json!({
                    "size": x.size(),
                    "operations": x.signature().ops().iter().map(|op| format!("{}/{}", op.name, op.arity)).collect::<Vec<_>>(),
                    "is_group": x.is_group(),
                })),
        );
        for s in &a.subsets {
            o.results.push(
                CheckResult::new(format!("subset:{}:{}", x.name(), s.name), "named subset is a subuniverse", Verdict::from_bool(s.closed))
                    .with_witness(json!({ "members": s.members })),
            );
        }
        if let Some(w) = a.witness() {
            let check = crate::search::validate_witness(&w, budget);
            o.results.push(
                CheckResult::new(format!("replay:{}", x.name()), "witness replay including slow oracles", Verdict::from_bool(check.valid))
                    .with_witness(json!({ "details": check.details })),
            );
        }
    }
    for h in &file.homs {
        o.results.push(CheckResult::new(
            format!("hom:{}", h.name),
            "map preserves every operation",
            Verdict::Pass,
        ));
    }
    Ok(finish_budget(o, budget))
}

fn commutator(kind: Kind, spec: &str, left: &str, right: &str, third: Option<&str>, budget: &Budget) -> Result<Outcome> {
    let (rec, _) = load_algebra(spec)?;
    let x = &rec.algebra;
    let (k, l) = (subset(&rec, left)?, subset(&rec, right)?);
    let (label, value) = match kind {
        Kind::Higgins => (format!("higgins({left},{right})"), higgins(x, &k, &l, budget)?),
        Kind::Huq => (format!("huq({left},{right})"), huq(x, &k, &l, budget)?),
        Kind::Smith => (
            format!("smith({left},{right})"),
            smith_normalised(x, &k, &l, &malcev(&rec, budget)?, budget)?,
        ),
        Kind::Higgins3 => {
            let third = third.ok_or_else(|| Error::Usage("`higgins3` needs `--third`".into()))?;
            let m = subset(&rec, third)?;
            (format!("higgins3({left},{right},{third})"), higgins3(x, &k, &l, &m, budget)?)
        }
    };
    let mut o = Outcome::new(Some(x.name().to_string()));
    o.text = format!("{label} = {} ({} elements)\n", set_text(&value), value.len());
    o.results.push(
        CheckResult::new(label, "commutator value", Verdict::Pass)
            .with_witness(json!({ "members": value.members(), "size": value.len() })),
    );
    Ok(finish_budget(o, budget))
}

/// A homomorphism from the file (when given) or the library.
fn find_hom(name: &str, file: Option<&AlgebraFile>) -> Result<Homomorphism> {
    let bare = name.strip_prefix("builtin:");
    if let (Some(f), None) = (file, bare) {
        if let Some(h) = f.hom(name) {
            return Ok(h.hom.clone());
        }
    }
    library()
        .hom(bare.unwrap_or(name))
        .cloned()
        .ok_or_else(|| Error::Usage(format!("unknown homomorphism `{name}`")))
}

fn hom_malcev(h: &Homomorphism, budget: &Budget) -> Result<Term> {
    malcev_for(h.source(), budget)
        .ok_or_else(|| Error::Usage(format!("no known Mal'cev term for `{}`", h.source().name())))
}

fn check(condition: Condition, spec: &str, hom: Option<&str>, seed: u64, budget: &Budget) -> Result<Outcome> {
    let (rec, file) = load_algebra(spec)?;
    let x: &AlgRef = &rec.algebra;
    let mut o = Outcome::new(Some(x.name().to_string()));
    match condition {
        Condition::Sh | Condition::Nh | Condition::Wnh | Condition::Pa => {
            let family = condition.family().expect("a condition family");
            o.extend(condition_families(x, &malcev(&rec, budget)?, &[family], budget)?);
        }
        Condition::Laws => {
            let p = malcev(&rec, budget)?;
            let config = LawConfig { seed, ..LawConfig::default() };
            o.extend(law_suite(x, &p, &config, budget)?);
            o.extend(commutator_law_report(x, seed, LAW_TRIPLES, budget)?);
        }
        Condition::Grun => o.results.push(grun_check(x, &malcev(&rec, budget)?, budget)?),
        Condition::Perfect => {
            let ok = is_perfect(x, budget)?;
            o.results.push(CheckResult::new(format!("perfect:{}", x.name()), "[X,X] = X", Verdict::from_bool(ok)));
        }
        Condition::Central => {
            let name = hom.ok_or_else(|| Error::Usage("`central` needs `--hom <name>`".into()))?;
            let h = find_hom(name, Some(&file))?;
            if !crate::algebra::Homomorphism::source(&h).as_ref().eq(x.as_ref()) {
                return Err(Error::Usage(format!("`{name}` does not start at `{}`", x.name())));
            }
            let central = is_central_extension(&h, &malcev(&rec, budget)?, budget)?;
            o.results.push(
                CheckResult::new(format!("central:{name}"), "kernel pair centralizes the largest congruence", Verdict::from_bool(central))
                    .with_witness(json!({ "kernel": h.kernel().members() })),
            );
        }
    }
    Ok(finish_budget(o, budget))
}

fn uce(f: &str, g: &str, file: Option<&str>, budget: &Budget) -> Result<Outcome> {
    let file = file.map(load_file).transpose()?;
    let (f, g) = (find_hom(f, file.as_ref())?, find_hom(g, file.as_ref())?);
    let p = hom_malcev(&f, budget)?;
    let record = check_uce_instance(&f, &g, &p, budget)?;
    let mut o = Outcome::new(Some(f.source().name().to_string()));
    o.results.push(record.to_result("uce"));
    Ok(finish_budget(o, budget))
}

fn search(goal: GoalKind, v: &str, min_size: usize, max_size: usize, cli: &Cli, budget: &Budget) -> Result<Outcome> {
    let spec = variety(v).ok_or_else(|| Error::Usage(format!("unknown variety `{v}`")))?;
    let mut g = SearchGoal::new(goal, spec, max_size);
    g.min_size = min_size;
    if let Some(b) = cli.budget {
        g.max_nodes = b;
    }
    let outcome = find_witness(&g, cli.jobs, budget)?;
    let mut o = Outcome::new(Some(v.to_string()));
    o.used = outcome.nodes;
    o.limit = g.max_nodes;
    let sizes = serde_json::to_value(&outcome.sizes).expect("summaries serialize");
    match &outcome.witness {
        Some(w) => {
            let rec = format::witness_record(w)?;
            o.text = serialize_algebra(&rec);
            o.as_file = true;
            o.results.push(
                CheckResult::new(format!("{goal}:{v}"), "gap witness, validated by replay", Verdict::Fail)
                    .with_witness(json!({ "size": w.size, "tables": w.tables, "replay": w.replay, "sizes": sizes })),
            );
        }
        None if outcome.exhausted => {
            o.text = format!("budget exhausted before size {max_size}; no witness among the models visited\n");
            o.results.push(
                CheckResult::new(format!("{goal}:{v}"), "no gap up to the bound", Verdict::Skipped)
                    .with_witness(json!({ "sizes": sizes, "exhausted": true })),
            );
            o.exit = EXIT_BUDGET;
        }
        None => {
            o.text = format!("none up to size {max_size}\n");
            o.results.push(
                CheckResult::new(format!("{goal}:{v}"), "no gap up to the bound", Verdict::Pass)
                    .with_witness(json!({ "sizes": sizes, "exhausted": false })),
            );
        }
    }
    Ok(o)
}

fn congruences(spec: &str, budget: &Budget) -> Result<Outcome> {
    let (rec, _) = load_algebra(spec)?;
    let x = &rec.algebra;
    let lattice = all_congruences(x, budget)?;
    let mut o = Outcome::new(Some(x.name().to_string()));
    let mut text = String::new();
    for (i, c) in lattice.iter().enumerate() {
        let classes: Vec<String> = c
            .classes()
            .iter()
            .map(|cl| cl.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        text.push_str(&format!("C{i}: {} classes | {}\n", c.num_classes(), classes.join(" | ")));
        o.results.push(
            CheckResult::new(format!("congruence:C{i}"), "congruence of the algebra", Verdict::Pass).with_witness(json!({
                "blocks": c.blocks(),
                "classes": c.num_classes(),
                "ideal": zero_class(c).members(),
            })),
        );
    }
    o.text = text;
    Ok(finish_budget(o, budget))
}
