use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use algpos::ap::{is_ap, Agreement, ApVerdict, Tolerances, DEFAULT_BORDERLINE};
use algpos::atlas::{build_atlas, check_condition, write_reports, AtlasConfig};
use algpos::classify3::{classify, verify_witnesses, ClassifyConfig, Table, DEFAULT_SAMPLES, DEFAULT_SEED};
use algpos::digraph::{digraph_of, strongly_connected};
use algpos::mat::{RealMatrix, DEFAULT_TOL};
use algpos::signpat::{b_matrix, row_col_necessary, subclass_check, SignPattern, SubclassVerdict};
use algpos::Error;

const EXIT_AP: u8 = 0;
const EXIT_NOT_AP: u8 = 1;
const EXIT_BORDERLINE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

const AFTER_HELP: &str = "\
Matrices are rows separated by ';' with entries separated by spaces or commas:
  algpos check '1 1; 1 1'
  algpos check '0 1; -1 0'
Sign patterns are rows separated by '/' with cells from + - 0:
  algpos classify '++0/-0+/+00'
  algpos subclass '0+/+0' '-+/+-'

Exit codes: 0 AP (or success), 1 not AP, 2 borderline, 64 bad input,
70 internal error, 74 I/O error.";

/// Algebraic positivity of real matrices and the 3x3 sign pattern classification.
#[derive(Debug, Parser)]
#[command(name = "algpos", version, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Realness and positivity threshold of the spectral oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Margins below this are reported as borderline.
    #[arg(long, global = true, default_value_t = DEFAULT_BORDERLINE)]
    borderline: f64,
    /// Samples per pattern.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Degree of the certificate polynomial (default n - 1).
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Md)]
    format: OutFormat,
    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Md,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a matrix is algebraically positive.
    Check {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Print a polynomial p with p(A) > 0, when one exists.
    Certificate {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Classify a sign pattern as RAP, AAP or DNA.
    Classify {
        #[arg(allow_hyphen_values = true)]
        pattern: String,
    },
    /// Classify every irreducible 3x3 class and write atlas.json, atlas.md, discrepancies.json.
    Atlas,
    /// Test every witness matrix of the table and every printed condition.
    VerifyPaper,
    /// Decide whether pattern B shifts into the class of pattern A.
    Subclass {
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Other(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::NotSquare { .. } | Error::NonFinite { .. } | Error::DimensionMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Other(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (code, msg) = match e {
                CliError::Usage(m) => (EXIT_USAGE, m),
                CliError::Io(m) => (EXIT_IO, m),
                CliError::Other(m) => (EXIT_SOFTWARE, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, CliError> {
    if !(cli.tol > 0.0) || !(cli.borderline > 0.0) {
        return Err(CliError::Usage("--tol and --borderline must be positive".into()));
    }
    if cli.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    if cli.max_degree == Some(0) {
        return Err(CliError::Usage("--max-degree must be at least 1".into()));
    }
    Ok(Tolerances {
        tol: cli.tol,
        borderline: cli.borderline,
        max_degree: cli.max_degree,
        ..Tolerances::default()
    })
}

fn classify_config(cli: &Cli) -> Result<ClassifyConfig, CliError> {
    Ok(ClassifyConfig {
        seed: cli.seed,
        samples: cli.samples,
        tol: tolerances(cli)?,
        ..ClassifyConfig::default()
    })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Check { matrix } => cmd_check(cli, matrix),
        Command::Certificate { matrix } => cmd_certificate(cli, matrix),
        Command::Classify { pattern } => cmd_classify(cli, pattern),
        Command::Atlas => cmd_atlas(cli),
        Command::VerifyPaper => cmd_verify_paper(cli),
        Command::Subclass { b, a } => cmd_subclass(cli, b, a),
    }
}

fn verdict_code(v: &ApVerdict) -> u8 {
    if v.agreement == Agreement::Borderline {
        EXIT_BORDERLINE
    } else if v.is_ap {
        EXIT_AP
    } else {
        EXIT_NOT_AP
    }
}

fn verdict_word(v: &ApVerdict) -> &'static str {
    match (v.agreement, v.is_ap) {
        (Agreement::Borderline, _) => "borderline",
        (_, true) => "AP",
        (_, false) => "not AP",
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Other(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn cmd_check(cli: &Cli, text: &str) -> Result<u8, CliError> {
    let a: RealMatrix = text.parse()?;
    let v = is_ap(&a, &tolerances(cli)?)?;
    if cli.format == OutFormat::Json {
        print_json(&json!({ "verdict": verdict_word(&v), "result": v }))?;
        return Ok(verdict_code(&v));
    }
    println!("verdict: {}", verdict_word(&v));
    println!("oracles: {:?}", v.agreement);
    match &v.eigen {
        Some(c) => println!(
            "eigen certificate: lambda = {}, right = {:?}, left = {:?}, min entry {:e}",
            c.pair.value, c.pair.right, c.pair.left, c.min_entry
        ),
        None => println!("eigen certificate: none"),
    }
    match &v.poly {
        Some(c) => println!("polynomial certificate: p(x) = {}, min entry of p(A) {:e}", c.polynomial(), c.margin),
        None => println!("polynomial certificate: none"),
    }
    let m = &v.margins;
    println!(
        "margins: eigenvector min {}, relative gap {}, lp optimum {:e}",
        m.eigen_min_entry.map_or("-".into(), |x| format!("{x:e}")),
        m.eigen_gap.map_or("-".into(), |x| format!("{x:e}")),
        m.lp_t
    );
    Ok(verdict_code(&v))
}

fn cmd_certificate(cli: &Cli, text: &str) -> Result<u8, CliError> {
    let a: RealMatrix = text.parse()?;
    let v = is_ap(&a, &tolerances(cli)?)?;
    if cli.format == OutFormat::Json {
        print_json(&json!({ "verdict": verdict_word(&v), "poly": v.poly, "eigen": v.eigen }))?;
    } else {
        match &v.poly {
            Some(c) => {
                println!("p(x) = {}", c.polynomial());
                println!("min entry of p(A): {:e}", c.margin);
            }
            None => println!("no polynomial certificate ({})", verdict_word(&v)),
        }
    }
    Ok(verdict_code(&v))
}

fn cmd_classify(cli: &Cli, text: &str) -> Result<u8, CliError> {
    let s: SignPattern = text.parse()?;
    let cfg = classify_config(cli)?;
    let c = classify(&s, &cfg)?;
    if cli.format == OutFormat::Json {
        print_json(&c)?;
        return Ok(0);
    }
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    println!("pattern: {s}");
    println!("strongly connected: {}", yes_no(strongly_connected(&digraph_of(&s))));
    println!("row/column sign rule: {}", if row_col_necessary(&s) { "pass" } else { "fail" });
    let b = b_matrix(&s);
    println!("B-matrix: {b} ({})", if b.is_irreducible() { "irreducible" } else { "reducible" });
    if let (Some(id), Some(l)) = (&c.entry, c.printed_label) {
        println!("table entry: {id} (printed {l})");
    }
    if let Some(sm) = c.sampling {
        println!(
            "sampling: {} members ({} from the row's witnesses), {} AP, {} not AP, {} borderline",
            sm.samples, sm.witnesses, sm.ap, sm.not_ap, sm.borderline
        );
    }
    println!("evidence: {}{}", c.evidence, if c.evidence.is_proof() { "" } else { " (not a proof)" });
    if c.uncorroborated {
        println!("note: sampling found members of one kind only");
    }
    println!("verdict: {}", c.verdict);
    Ok(0)
}

fn atlas_config(cli: &Cli) -> Result<AtlasConfig, CliError> {
    Ok(AtlasConfig {
        classify: classify_config(cli)?,
        ..AtlasConfig::default()
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn cmd_atlas(cli: &Cli) -> Result<u8, CliError> {
    let start = Instant::now();
    let r = build_atlas(&atlas_config(cli)?)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = write_reports(&r, &dir).map_err(io_err(&dir))?;
    let t = &r.totals;
    match cli.format {
        OutFormat::Json => print_json(&json!({
            "totals": t,
            "witness_summary": r.witness_summary,
            "soundness": r.soundness,
            "discrepancies": r.discrepancies.len(),
            "files": files,
        }))?,
        OutFormat::Md => {
            println!(
                "{} classes ({} RAP, {} AAP, {} DNA) in {} digraph groups; {} differ from the printed label",
                t.classes,
                t.rap,
                t.aap,
                t.dna,
                r.groups.len(),
                t.label_diffs
            );
            for s in &r.soundness {
                println!("soundness {}: {} violations in {} samples", s.stage, s.violations, s.samples);
            }
            println!("{} discrepancies", r.discrepancies.len());
            for f in &files {
                println!("wrote {}", f.display());
            }
        }
    }
    eprintln!("elapsed {:.2?}", start.elapsed());
    Ok(if r.passed() { 0 } else { 1 })
}

fn cmd_verify_paper(cli: &Cli) -> Result<u8, CliError> {
    let cfg = atlas_config(cli)?;
    let table = Table::builtin();
    let mut checks = Vec::new();
    for e in table.entries() {
        checks.extend(verify_witnesses(e, &cfg.classify.tol)?);
    }
    let conditions = table
        .entries()
        .iter()
        .filter(|e| e.condition.is_some())
        .map(|e| check_condition(e, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let matches = checks.iter().filter(|c| c.matches).count();
    let rate = matches as f64 / checks.len().max(1) as f64;
    let suspects: Vec<_> = table
        .entries()
        .iter()
        .filter(|e| e.is_suspect())
        .map(|e| json!({ "entry": e.id, "parts": e.suspect, "note": e.note }))
        .collect();
    let summary = json!({
        "witnesses": checks.len(),
        "matches": matches,
        "match_rate": rate,
        "mismatches": checks.iter().filter(|c| !c.matches).collect::<Vec<_>>(),
        "condition_mismatches": conditions.iter().filter(|c| c.disagree > 0).collect::<Vec<_>>(),
        "suspect_rows": suspects,
    });
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join("verify.json");
        let text = serde_json::to_string_pretty(&json!({ "summary": summary, "witnesses": checks, "conditions": conditions }))
            .map_err(|e| CliError::Other(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(io_err(&path))?;
    }
    if cli.format == OutFormat::Json {
        print_json(&summary)?;
        return Ok(0);
    }
    println!(
        "witness matrices: {}, matching the printed verdict: {matches} ({:.1}%)",
        checks.len(),
        100.0 * rate
    );
    for c in checks.iter().filter(|c| !c.matches) {
        println!(
            "  mismatch {} [{}] = [{}]: printed {}, eigen {}, lp {}, margins {} / {:e}{}",
            c.entry,
            c.assign,
            c.matrix,
            if c.expected_ap { "AP" } else { "not AP" },
            if c.eigen_ap { "AP" } else { "not AP" },
            if c.lp_ap { "AP" } else { "not AP" },
            c.eigen_margin.map_or("-".into(), |m| format!("{m:e}")),
            c.lp_margin,
            if c.suspect { " (suspect row)" } else { "" }
        );
    }
    let bad: Vec<_> = conditions.iter().filter(|c| c.disagree > 0).collect();
    println!("printed conditions: {}, disagreeing with the oracle on some member: {}", conditions.len(), bad.len());
    for c in bad {
        println!(
            "  {}: {} of {} members{}",
            c.entry,
            c.disagree,
            c.samples,
            if c.suspect { " (suspect row)" } else { "" }
        );
    }
    println!("rows marked suspect:");
    for e in table.entries().iter().filter(|e| e.is_suspect()) {
        println!("  {}: {}", e.id, e.note.as_deref().unwrap_or(""));
    }
    Ok(0)
}

fn cmd_subclass(cli: &Cli, b: &str, a: &str) -> Result<u8, CliError> {
    let (b, a): (SignPattern, SignPattern) = (b.parse()?, a.parse()?);
    tolerances(cli)?;
    let v = subclass_check(&b, &a, cli.samples, cli.seed)?;
    if cli.format == OutFormat::Json {
        print_json(&v)?;
    } else {
        match &v {
            SubclassVerdict::Holds(rule) => println!("holds: {b} shifts into the class of {a} ({rule:?})"),
            SubclassVerdict::Fails(x) => println!("fails: no shift of [{x}] has a pattern equivalent to {a}"),
            SubclassVerdict::Unknown => println!("unknown: no counterexample in {} samples", cli.samples),
        }
    }
    Ok(match v {
        SubclassVerdict::Holds(_) => 0,
        SubclassVerdict::Fails(_) => 1,
        SubclassVerdict::Unknown => 2,
    })
}
