use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use irrep_cli::analyze::{analyze_spec, Analysis, AnalyzeError, AnalyzeOptions};
use irrep_cli::catalog::{build_catalog, parse_catalog, CatalogEntry};
use irrep_cli::report::{build_document, emit};
use irrep_core::socle::FootKind;

#[derive(Parser)]
#[command(
    name = "irrep",
    version,
    about = "Decides whether a finite group has a faithful irreducible unitary representation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one group, given as a spec string or a path to a spec file.
    Analyze {
        /// Group spec (e.g. "symmetric 4") or a file containing one.
        spec: String,
        /// File with an `autos:` block; adjoins the listed automorphisms and
        /// runs the action variant.
        #[arg(long, value_name = "FILE")]
        g_autos: Option<PathBuf>,
        /// Construct and verify explicit unitary matrices for the faithful row.
        #[arg(long)]
        construct_rep: bool,
        /// Write the JSON report to this path.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        /// Refuse to enumerate groups above this order.
        #[arg(long, default_value_t = irrep_core::group::DEFAULT_MAX_ORDER)]
        max_order: usize,
        /// Numeric tolerance for the oracle and kernel checks.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Analyze a catalog of groups and compare verdicts against expectations.
    Batch {
        /// Catalog file (`name := spec [expect true|false]` per line);
        /// defaults to the built-in corpus.
        #[arg(long, value_name = "FILE")]
        catalog: Option<PathBuf>,
        /// Write one JSON report per entry into this directory.
        #[arg(long, value_name = "DIR")]
        json_dir: Option<PathBuf>,
        /// Worker threads; defaults to one per core.
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Analyze { spec, g_autos, construct_rep, json, max_order, tolerance } => {
            run_analyze(&spec, g_autos.as_deref(), construct_rep, json.as_deref(), max_order, tolerance)
        }
        Command::Batch { catalog, json_dir, parallel } => {
            run_batch(catalog.as_deref(), json_dir.as_deref(), parallel)
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn run_analyze(
    spec_arg: &str,
    g_autos: Option<&Path>,
    construct_rep: bool,
    json: Option<&Path>,
    max_order: usize,
    tolerance: f64,
) -> ExitCode {
    let path = Path::new(spec_arg);
    let spec_text = if path.is_file() {
        match fs::read_to_string(path) {
            Ok(text) => text.trim().to_string(),
            Err(e) => return input_error(format_args!("{}: {e}", path.display())),
        }
    } else {
        spec_arg.to_string()
    };
    let autos_text = match g_autos {
        Some(p) => match fs::read_to_string(p) {
            Ok(text) => Some(text),
            Err(e) => return input_error(format_args!("{}: {e}", p.display())),
        },
        None => None,
    };
    let opts = AnalyzeOptions { autos_text, construct_rep, max_order, tolerance };
    let analysis = match analyze_spec(None, &spec_text, &opts) {
        Ok(a) => a,
        Err(e) => return input_error(e),
    };
    print_analysis(&analysis);
    if let Some(out) = json {
        if let Err(e) = fs::write(out, emit(&build_document(&analysis))) {
            return input_error(format_args!("{}: {e}", out.display()));
        }
    }
    if analysis.agreement {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: verdict disagreement between the criterion and the oracle");
        ExitCode::from(2)
    }
}

fn foot_line(kind: &FootKind, order: usize) -> String {
    match kind {
        FootKind::Abelian { p, rank, .. } => format!("abelian p={p} rank {rank} (order {order})"),
        FootKind::Nonabelian { simple_feet } => format!(
            "nonabelian, {} simple component(s) of order {} (order {order})",
            simple_feet.len(),
            simple_feet.first().map_or(0, |s| s.order()),
        ),
    }
}

fn print_analysis(a: &Analysis) {
    println!(
        "group:     {} — order {}, {} classes{}",
        a.spec_text,
        a.group.order(),
        a.table.num_classes(),
        if a.group.is_abelian() { ", abelian" } else { "" },
    );
    if a.deco.feet.is_empty() {
        println!("socle:     trivial");
    } else {
        for f in &a.deco.feet {
            println!("socle:     foot {}", foot_line(&f.kind, f.carrier.order()));
        }
        println!(
            "socle:     |MA| = {}, |MH| = {}, |MS| = {}",
            a.deco.ma.order(),
            a.deco.mh.order(),
            a.deco.ms.order(),
        );
    }
    println!(
        "criterion: verdict {} (ma trivial {}, class witness {}, ms witness {}, sampled {})",
        a.criterion.verdict,
        a.criterion.ma_trivial,
        opt(a.criterion.ma_class_witness),
        opt(a.criterion.ms_class_witness),
        a.criterion.sampled,
    );
    println!(
        "oracle:    degrees {:?}, faithful row {}",
        a.table.degrees,
        opt(a.oracle_row),
    );
    if let Some(g) = &a.g {
        println!(
            "action:    {} automorphisms; verdict {} (witness {}, oracle row {}, |MA| = {}, |MS| = {})",
            g.auto_order,
            g.verdict,
            opt(g.ma_g_class_witness),
            opt(g.oracle_row),
            g.g_deco.ma.order(),
            g.g_deco.ms.order(),
        );
    }
    if let Some(rep) = &a.rep {
        println!(
            "matrices:  degree {}, commutant dim {}, unitary defect {:.2e}, multiplicative defect {:.2e}, min pairwise distance {:.2e}",
            rep.degree,
            rep.commutant_dim,
            rep.unitary_defect,
            rep.multiplicative_defect,
            rep.min_pairwise_distance,
        );
    }
    for note in &a.notes {
        println!("note:      {note}");
    }
    let t = &a.timings;
    println!(
        "timings:   build {:.1} ms, socle {:.1} ms, criterion {:.1} ms, oracle {:.1} ms{}{}",
        t.build_ms,
        t.socle_ms,
        t.criterion_ms,
        t.oracle_ms,
        t.g_ms.map_or(String::new(), |v| format!(", action {v:.1} ms")),
        t.rep_ms.map_or(String::new(), |v| format!(", matrices {v:.1} ms")),
    );
    println!("agreement: {}", a.agreement);
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

struct EntryOutcome {
    name: String,
    result: Result<Analysis, AnalyzeError>,
    expected: Option<bool>,
    elapsed_ms: f64,
}

fn run_batch(
    catalog: Option<&Path>,
    json_dir: Option<&Path>,
    parallel: Option<usize>,
) -> ExitCode {
    let entries: Vec<CatalogEntry> = match catalog {
        Some(p) => {
            let text = match fs::read_to_string(p) {
                Ok(t) => t,
                Err(e) => return input_error(format_args!("{}: {e}", p.display())),
            };
            match parse_catalog(&text) {
                Ok(list) => list,
                Err(e) => return input_error(format_args!("{}: {e}", p.display())),
            }
        }
        None => build_catalog(),
    };
    if let Some(dir) = json_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            return input_error(format_args!("{}: {e}", dir.display()));
        }
    }

    let started = Instant::now();
    let run = || -> Vec<EntryOutcome> {
        entries
            .par_iter()
            .map(|e| {
                let t = Instant::now();
                let result = analyze_spec(Some(&e.name), &e.spec_text, &AnalyzeOptions::default());
                EntryOutcome {
                    name: e.name.clone(),
                    result,
                    expected: e.expected,
                    elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
                }
            })
            .collect()
    };
    let mut outcomes = match parallel {
        Some(n) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
                Ok(p) => p,
                Err(e) => return input_error(e),
            };
            pool.install(run)
        }
        None => run(),
    };
    outcomes.sort_by(|a, b| a.name.cmp(&b.name));

    let mut errors = 0usize;
    let mut failures = 0usize;
    println!(
        "{:<10} {:>6} {:>4} {:>4} {:>7} {:>7} {:>6} {:>9} {:>9}",
        "name", "order", "|MA|", "|MS|", "verdict", "oracle", "agree", "expected", "ms"
    );
    for o in &outcomes {
        match &o.result {
            Ok(a) => {
                let expected_ok = o.expected.map_or(true, |want| want == a.criterion.verdict);
                let ok = a.agreement && expected_ok;
                if !ok {
                    failures += 1;
                }
                println!(
                    "{:<10} {:>6} {:>4} {:>4} {:>7} {:>7} {:>6} {:>9} {:>9.1}",
                    o.name,
                    a.group.order(),
                    a.deco.ma.order(),
                    a.deco.ms.order(),
                    a.criterion.verdict,
                    a.oracle_row.is_some(),
                    if a.agreement { "yes" } else { "NO" },
                    o.expected.map_or("-".to_string(), |w| {
                        if expected_ok { format!("{w} ok") } else { format!("{w} MISS") }
                    }),
                    o.elapsed_ms,
                );
                if let Some(dir) = json_dir {
                    let doc = build_document(a);
                    let path = dir.join(format!("{}.json", o.name));
                    if let Err(e) = fs::write(&path, emit(&doc)) {
                        eprintln!("error: {}: {e}", path.display());
                        errors += 1;
                    }
                }
            }
            Err(e) => {
                errors += 1;
                println!("{:<10} failed: {e}", o.name);
            }
        }
    }
    println!(
        "{} entries, {} ok, {} failed, {} errored in {:.1} s",
        outcomes.len(),
        outcomes.len() - failures - errors,
        failures,
        errors,
        started.elapsed().as_secs_f64(),
    );
    if errors > 0 {
        ExitCode::from(1)
    } else if failures > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
