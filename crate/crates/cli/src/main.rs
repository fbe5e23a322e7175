mod suites;

use std::collections::BTreeMap;
use std::process::ExitCode;

use abott::arith::Rat;
use abott::classes::{parse_expression, ClassExpression};
use abott::engine::{atiyah_bott, verify, ComputationSpec, RunResult};
use abott::graphs::{prufer_encode, trees_up_to_iso};
use clap::{Parser, ValueEnum};
use serde_json::json;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Exact,
    Decimal,
    Json,
}

/// Exact genus-0 Gromov-Witten invariants of P^n by torus localization.
#[derive(Parser, Debug)]
#[command(name = "abott", version)]
struct Args {
    /// Dimension of the target projective space.
    #[arg(long)]
    n: Option<u32>,
    /// Curve degree.
    #[arg(long)]
    d: Option<u32>,
    /// Number of marked points.
    #[arg(long)]
    m: Option<usize>,
    /// Class expression to integrate; repeat to evaluate several in one pass.
    #[arg(long = "class", value_name = "EXPR")]
    classes: Vec<String>,
    /// Seed for the torus-weight sample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "ABOTT_THREADS", default_value_t = 0)]
    threads: usize,
    /// Recompute with a second independent sample and require agreement.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Exact)]
    format: Format,
    /// Run an embedded regression suite (see --list-suites).
    #[arg(long, value_name = "SUITE", conflicts_with_all = ["n", "d", "m", "classes"])]
    regress: Option<String>,
    /// Highest degree to run in a regression suite.
    #[arg(long, requires = "regress")]
    max_d: Option<u32>,
    /// List the embedded regression suites.
    #[arg(long)]
    list_suites: bool,
    /// Print every tree on K vertices (edge list and Prüfer sequence).
    #[arg(long, value_name = "K")]
    trees: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = if args.list_suites {
        list_suites();
        Ok(())
    } else if let Some(k) = args.trees {
        print_trees(k);
        Ok(())
    } else if let Some(name) = &args.regress {
        regress(name, &args)
    } else {
        compute(&args)
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn list_suites() {
    for s in suites::SUITES {
        println!("{:<12} {} (default --max-d {})", s.name, s.about, s.default_max_d);
    }
}

fn print_trees(k: usize) {
    for t in trees_up_to_iso(k) {
        let edges: Vec<String> = t.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let seq: Vec<String> = prufer_encode(&t).0.iter().map(|x| x.to_string()).collect();
        println!("edges [{}]  prufer [{}]", edges.join(" "), seq.join(" "));
    }
}

fn run(spec: &ComputationSpec, check: bool) -> Result<RunResult, String> {
    let result = if check { verify(spec) } else { atiyah_bott(spec) };
    result.map_err(|e| e.to_string())
}

fn compute(args: &Args) -> Result<(), String> {
    let (Some(n), Some(d), Some(m)) = (args.n, args.d, args.m) else {
        return Err("--n, --d and --m are required (or use --regress)".into());
    };
    if args.classes.is_empty() {
        return Err("at least one --class is required".into());
    }
    let classes = args
        .classes
        .iter()
        .map(|text| parse_expression(text, n, d, m).map_err(|e| format!("{text}: {e}")))
        .collect::<Result<Vec<ClassExpression>, String>>()?;
    let spec = ComputationSpec::new(n, d, m, classes)
        .with_seed(args.seed)
        .with_workers(args.threads);
    eprintln!(
        "abott: n={n} d={d} m={m}, {} class(es), seed {}{}",
        spec.classes.len(),
        args.seed,
        if args.verify { ", verifying" } else { "" }
    );
    let result = run(&spec, args.verify)?;
    eprintln!(
        "abott: {} decorated graphs in {:.3} s",
        result.graphs_processed,
        result.wall_time.as_secs_f64()
    );
    match args.format {
        Format::Exact => {
            for v in &result.values {
                println!("{v}");
            }
        }
        Format::Decimal => {
            for v in &result.values {
                println!("approx {}", v.to_decimal(15));
            }
        }
        Format::Json => {
            let results: Vec<_> = args
                .classes
                .iter()
                .zip(&result.values)
                .map(|(text, v)| {
                    json!({
                        "expression": text,
                        "numerator": v.numer().to_string(),
                        "denominator": v.denom().to_string(),
                    })
                })
                .collect();
            let doc = json!({
                "n": n,
                "d": d,
                "m": m,
                "results": results,
                "seed": args.seed,
                "graphs": result.graphs_processed,
                "seconds": result.wall_time.as_secs_f64(),
            });
            println!("{doc}");
        }
    }
    Ok(())
}

fn regress(name: &str, args: &Args) -> Result<(), String> {
    let suite = suites::find(name).ok_or_else(|| {
        let names: Vec<&str> = suites::SUITES.iter().map(|s| s.name).collect();
        format!("unknown suite '{name}' (available: {})", names.join(", "))
    })?;
    let max_d = args.max_d.unwrap_or(suite.default_max_d);

    // One engine pass per moduli space.
    let mut groups: BTreeMap<(u32, u32, usize), Vec<suites::Case>> = BTreeMap::new();
    for c in suite.cases().into_iter().filter(|c| c.d <= max_d) {
        groups.entry((c.d, c.n, c.m)).or_default().push(c);
    }
    if groups.is_empty() {
        return Err(format!("suite '{name}' has no cases with d <= {max_d}"));
    }
    let mut failures = 0;
    let mut total = 0;
    for ((d, n, m), cases) in groups {
        let classes = cases
            .iter()
            .map(|c| parse_expression(&c.expression, n, d, m).map_err(|e| format!("{}: {e}", c.expression)))
            .collect::<Result<Vec<_>, String>>()?;
        let spec = ComputationSpec::new(n, d, m, classes)
            .with_seed(args.seed)
            .with_workers(args.threads);
        eprintln!("abott: {name}: n={n} d={d} m={m}, {} class(es)", cases.len());
        let result = run(&spec, true)?;
        for (c, got) in cases.iter().zip(&result.values) {
            total += 1;
            let expected: Rat = c.expected.parse().map_err(|e| format!("bad table entry: {e}"))?;
            if *got == expected {
                println!("ok    {name} {}  {got}", c.label);
            } else {
                failures += 1;
                println!("FAIL  {name} {}  expected {expected}, got {got}", c.label);
            }
        }
    }
    if failures > 0 {
        Err(format!("{failures} of {total} cases failed"))
    } else {
        eprintln!("abott: {name}: all {total} cases agree");
        Ok(())
    }
}
