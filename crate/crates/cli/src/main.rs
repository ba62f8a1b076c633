//! `idealfree`: inductive freeness of ideal arrangements from the command line.

mod config;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use idealfree_core::charpoly::{char_poly, integer_root_multiset};
use idealfree_core::induction::{db_meta, BatchReport, Engine, Strategy};
use idealfree_core::memodb::MemoDb;
use idealfree_core::restrict::{all_restrictions, RestrictionTree, TreeOptions};
use idealfree_core::rootsys::{
    enumerate_ideals, height, is_ideal, upward_closure, Ideal, PositiveRootSystem,
};
use idealfree_core::{build_positive_roots, CartanType, LabelSet};

use config::{parse_rank_window, RunConfig};

#[derive(Parser)]
#[command(name = "idealfree", version, about = "Inductive freeness of ideal subarrangements of Weyl arrangements")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the positive roots with labels and heights.
    Roots { type_tag: CartanType },
    /// Count the ideals of the root poset.
    Ideals {
        type_tag: CartanType,
        /// Also list every ideal.
        #[arg(long)]
        list: bool,
    },
    /// Decide inductive freeness of one ideal arrangement or of all of them.
    Check(CheckArgs),
    /// Census of canonical restriction objects.
    Restrictions {
        type_tag: CartanType,
        /// Tree cache file; read if present, written otherwise.
        #[arg(long, value_name = "FILE")]
        cache: Option<PathBuf>,
    },
    /// Characteristic polynomial of integer normal vectors, one per line
    /// (`-` reads stdin).
    Charpoly {
        file: PathBuf,
        /// Ambient dimension; required for an empty list.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Inspect or merge verdict databases.
    #[command(subcommand)]
    Db(DbCommand),
}

#[derive(Args)]
struct CheckArgs {
    type_tag: CartanType,

    /// `empty`, `full`, `labels=0,3,5` (the ideal's roots) or `gen=4,5`
    /// (generators whose upward closure is the ideal).
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    ideal: Option<String>,

    /// Check every ideal.
    #[arg(long)]
    all: bool,

    #[arg(long, env = "IDEALFREE_WORKERS", value_name = "N")]
    workers: Option<usize>,

    /// Verdict database; loaded if it exists and saved after the run.
    #[arg(long, env = "IDEALFREE_DB", value_name = "FILE")]
    db: Option<PathBuf>,

    /// Write induction certificates to this file.
    #[arg(long, env = "IDEALFREE_CERTIFICATES", value_name = "FILE")]
    certificates: Option<PathBuf>,

    /// Write the JSON report to this file.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,

    #[arg(long, env = "IDEALFREE_STRATEGY", default_value = "backtrack")]
    strategy: Strategy,

    /// Largest rank at which characteristic polynomials prune; 0 disables.
    #[arg(long, env = "IDEALFREE_CHARPOLY_RANK", default_value_t = 5)]
    charpoly_rank: usize,

    /// Ranks with conjugacy lookup, e.g. `4..7`, or `none`.
    #[arg(long, env = "IDEALFREE_CONJUGACY_RANKS", default_value = "4..7")]
    conjugacy_ranks: String,

    /// Disable the verdict database (also disables conjugacy lookup).
    #[arg(long)]
    no_memo: bool,
}

#[derive(Subcommand)]
enum DbCommand {
    /// Summarize a database file.
    Inspect { file: PathBuf },
    /// Merge two databases built against the same tree.
    Merge {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Failure classes, mapped to exit codes 2 and 3.
enum Failure {
    Usage(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        use idealfree_core::Error as E;
        match e.downcast_ref::<E>() {
            Some(E::Internal(_) | E::Validation(_) | E::Resource(_)) => Failure::Internal(e),
            _ => Failure::Usage(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<ExitCode, Failure> {
    match &cli.command {
        Command::Roots { type_tag } => cmd_roots(*type_tag, cli.json)?,
        Command::Ideals { type_tag, list } => cmd_ideals(*type_tag, *list, cli.json)?,
        Command::Check(args) => return cmd_check(args, cli.json),
        Command::Restrictions { type_tag, cache } => cmd_restrictions(*type_tag, cache.as_deref(), cli.json)?,
        Command::Charpoly { file, rank } => cmd_charpoly(file, *rank, cli.json)?,
        Command::Db(DbCommand::Inspect { file }) => cmd_db_inspect(file, cli.json)?,
        Command::Db(DbCommand::Merge { first, second, output }) => cmd_db_merge(first, second, output)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn cmd_roots(ty: CartanType, as_json: bool) -> Result<()> {
    let system = build_positive_roots(ty)?;
    if as_json {
        return print_json(&system);
    }
    println!("{ty}: {} positive roots", system.len());
    for (label, root) in system.roots().iter().enumerate() {
        println!("{label:>4}  height {:>2}  {:?}", height(root), root.coords());
    }
    Ok(())
}

fn cmd_ideals(ty: CartanType, list: bool, as_json: bool) -> Result<()> {
    let system = build_positive_roots(ty)?;
    let ideals = enumerate_ideals(&system);
    let nonempty = ideals.iter().filter(|i| i.members.len() < system.len()).count();
    if as_json {
        let mut v = json!({
            "type": ty.to_string(),
            "ideals": ideals.len(),
            "nonempty_arrangements": nonempty,
        });
        if list {
            v["list"] = json!(ideals.iter().map(|i| i.members.to_vec()).collect::<Vec<_>>());
        }
        return print_json(&v);
    }
    println!("{ty}: {} ideals ({nonempty} with a nonempty arrangement)", ideals.len());
    if list {
        for (k, i) in ideals.iter().enumerate() {
            println!("{k:>6}  {:?}", i.members.to_vec());
        }
    }
    Ok(())
}

fn parse_labels(s: &str) -> Result<LabelSet> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(l) if l < idealfree_core::labels::MAX_LABELS => Ok(l),
            _ => bail!("bad label {t:?}"),
        })
        .collect()
}

fn parse_ideal(spec: &str, system: &PositiveRootSystem) -> Result<Ideal> {
    let all = system.all_labels();
    let members = match spec.trim() {
        "empty" => LabelSet::EMPTY,
        "full" => all,
        s => {
            if let Some(rest) = s.strip_prefix("labels=") {
                parse_labels(rest)?
            } else if let Some(rest) = s.strip_prefix("gen=") {
                let gens = parse_labels(rest)?;
                if !gens.is_subset(all) {
                    bail!("generator labels must be below {}", system.len());
                }
                upward_closure(gens, system)
            } else {
                bail!("ideal spec must be empty, full, labels=... or gen=..., got {s:?}");
            }
        }
    };
    if !members.is_subset(all) {
        bail!("labels must be below {}", system.len());
    }
    if !is_ideal(members, system) {
        bail!("{:?} is not an ideal", members.to_vec());
    }
    Ok(Ideal { members })
}

fn cmd_check(args: &CheckArgs, as_json: bool) -> std::result::Result<ExitCode, Failure> {
    let rc = RunConfig {
        type_tag: args.type_tag.to_string(),
        ordering_policy: RunConfig::ordering_policy(),
        conjugacy_ranks: parse_rank_window(&args.conjugacy_ranks)?,
        charpoly_max_rank: args.charpoly_rank,
        memo: !args.no_memo,
        strategy: args.strategy,
        workers: args
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        database: args.db.clone(),
        certificates: args.certificates.clone(),
        report: args.report.clone(),
    };
    let search = rc.search_config();
    search.validate().map_err(anyhow::Error::from)?;

    let system = build_positive_roots(args.type_tag).map_err(anyhow::Error::from)?;
    let ideals = match &args.ideal {
        Some(spec) => vec![parse_ideal(spec, &system)?],
        None => enumerate_ideals(&system),
    };
    let tree = Arc::new(all_restrictions(&system, TreeOptions::default()).map_err(anyhow::Error::from)?);
    let meta = db_meta(&tree);
    let db = match &args.db {
        Some(path) if path.exists() => MemoDb::load(path, &meta)
            .with_context(|| format!("loading {}", path.display()))?,
        _ => MemoDb::new(meta),
    };
    let engine = Engine::new(tree.clone(), Arc::new(db), search).map_err(anyhow::Error::from)?;
    let report = engine.check_ideals(&ideals).map_err(anyhow::Error::from)?;

    if let Some(path) = &args.db {
        engine.db().save(path).map_err(anyhow::Error::from)?;
    }
    if let Some(path) = &args.certificates {
        let certs: Vec<_> = report
            .records
            .iter()
            .map(|r| json!({ "ideal": r.ideal, "arrangement_size": r.arrangement_size, "certificate": r.certificate }))
            .collect();
        std::fs::write(path, serde_json::to_vec_pretty(&certs).map_err(anyhow::Error::from)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let doc = json!({
        "tool": { "name": "idealfree", "version": env!("CARGO_PKG_VERSION") },
        "census_checksum": tree.checksum(),
        "config": rc,
        "report": report,
    });
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_vec_pretty(&doc).map_err(anyhow::Error::from)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if as_json {
        print_json(&doc)?;
    } else {
        print_report(&report, &system);
    }

    if report.errors > 0 {
        let first = report.records.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(Failure::Internal(anyhow::anyhow!("{} ideal(s) failed: {first}", report.errors)));
    }
    Ok(if report.not_free_count > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn print_report(report: &BatchReport, system: &PositiveRootSystem) {
    let single = report.records.len() == 1;
    for r in &report.records {
        let verdict = match (&r.verdict, &r.error) {
            (Some(v), _) => v.to_string(),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "no verdict".into(),
        };
        let mark = if r.verdict.is_some() && !r.matches_prediction {
            format!(" (predicted {})", r.predicted)
        } else {
            String::new()
        };
        if single {
            println!("ideal {:?}", r.ideal);
            println!("arrangement: {} of {} hyperplanes", r.arrangement_size, system.len());
            println!("{verdict}{mark}");
        } else {
            println!("{:>6}  |A| = {:>3}  {verdict}{mark}", r.index, r.arrangement_size);
        }
    }
    if !single {
        println!(
            "{} ideals: {} inductively free, {} not, {} off prediction, {} errors",
            report.ideal_count, report.free_count, report.not_free_count, report.prediction_mismatches, report.errors
        );
        println!(
            "memo: {} exact hits, {} conjugate hits, {} records written",
            report.memo.exact_hits, report.memo.conjugate_hits, report.memo.inserts
        );
    }
}

fn cmd_restrictions(ty: CartanType, cache: Option<&Path>, as_json: bool) -> Result<()> {
    let tree = match cache {
        Some(path) if path.exists() => RestrictionTree::load(path, Some(ty), TreeOptions::default())
            .with_context(|| format!("loading {}", path.display()))?,
        _ => {
            let tree = all_restrictions(&build_positive_roots(ty)?, TreeOptions::default())?;
            if let Some(path) = cache {
                tree.save(path)?;
            }
            tree
        }
    };
    let census = tree.census();
    if as_json {
        return print_json(&json!({
            "type": ty.to_string(),
            "census": census,
            "checksum": tree.checksum(),
        }));
    }
    if census.is_empty() {
        println!("{ty}: no restrictions (empty census)");
    } else {
        println!("{ty}:");
        print!("{census}");
    }
    Ok(())
}

fn read_vectors(file: &Path) -> Result<Vec<Vec<i64>>> {
    let mut text = String::new();
    if file == Path::new("-") {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    }
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace() || c == '[' || c == ']' || c == '(' || c == ')')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<i64>().with_context(|| format!("bad integer {t:?}")))
                .collect()
        })
        .collect()
}

fn cmd_charpoly(file: &Path, rank: Option<usize>, as_json: bool) -> Result<()> {
    let vectors = read_vectors(file)?;
    let rank = match (rank, vectors.first()) {
        (Some(r), _) => r,
        (None, Some(v)) => v.len(),
        (None, None) => bail!("empty vector list needs --rank"),
    };
    let chi = char_poly(rank, &vectors)?;
    let roots = integer_root_multiset(&chi);
    if as_json {
        return print_json(&json!({
            "rank": rank,
            "coefficients": chi.coeffs(),
            "polynomial": chi.to_string(),
            "integer_roots": roots,
        }));
    }
    println!("{chi}");
    match roots {
        Some(r) => println!("splits over the integers with roots {r}"),
        None => println!("does not split over the integers"),
    }
    Ok(())
}

fn cmd_db_inspect(file: &Path, as_json: bool) -> Result<()> {
    let db = MemoDb::load_any(file).with_context(|| format!("loading {}", file.display()))?;
    let summary = db.summary();
    if as_json {
        let rows: Vec<_> = summary
            .iter()
            .map(|(&(rank, object), &(free, not))| json!({ "rank": rank, "object": object, "free": free, "not_free": not }))
            .collect();
        return print_json(&json!({ "meta": db.meta(), "records": db.len(), "objects": rows }));
    }
    println!("ordering policy: {}", db.meta().ordering_policy);
    println!("census checksum: {}", db.meta().census_checksum);
    println!("records: {}", db.len());
    for ((rank, object), (free, not)) in summary {
        println!("  rank {rank} object {object:>3}: {free} free, {not} not free");
    }
    Ok(())
}

fn cmd_db_merge(first: &Path, second: &Path, output: &Path) -> Result<()> {
    let a = MemoDb::load_any(first).with_context(|| format!("loading {}", first.display()))?;
    let b = MemoDb::load_any(second).with_context(|| format!("loading {}", second.display()))?;
    let merged = a.merge(&b)?;
    merged.save(output)?;
    println!("{} records written to {}", merged.len(), output.display());
    Ok(())
}
