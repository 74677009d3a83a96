//! `cantor`: command-line access to the bounded-window constructions.
//!
//! Every subcommand prints JSON on stdout. Exit status is 0 when the
//! computation or check succeeds, 1 when it fails, and 2 on malformed input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cantor_core::e0::{check_uniform, min_drop, min_drop_counterexample, CantorMap, Counterexample, Verdict};
use cantor_core::forcing::{
    compute_g_traced, BuiltinOracle, ForcingInstance, GComputation, PartialOracleFunctional, Traced, TtOracle,
};
use cantor_core::perm::{recover_inverse, PermutationJson};
use cantor_core::pipeline::{demo_theorem_homeo, demo_theorem_lax_traced, run_indproc, DemoReport};
use cantor_core::reconstruct::reconstruct_tables;
use cantor_core::tt::{tt_compose, Rule};
use cantor_core::{BitString, FinSupPermutation, OutputTable, TruthTableFunctional, Window};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cantor", version, about = "Bounded-window checks for permutation- and homeomorphism-induced maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover θ⁻¹ on [0, m) from the table of θ⁻¹∘S∘θ and the seed θ⁻¹(0).
    RecoverPerm {
        /// JSON array of naturals, inline or as a file path.
        #[arg(long)]
        k: String,
        #[arg(long)]
        seed: usize,
        /// Defaults to the length of the table.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Compute g(n) by candidate elimination.
    ComputeG {
        /// `bit-of-g:[..]`, `never`, `constant:0|1`, or a truth-table
        /// functional as JSON (inline or file).
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "")]
        sigma: String,
        #[arg(long)]
        n: usize,
        /// Known values below |σ| as a JSON object, e.g. `{"7": 2}`.
        #[arg(long)]
        db: Option<String>,
        #[arg(long, default_value_t = 1 << 16)]
        search_limit: u64,
        /// Write the oracle query log here, one line per query.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Compose two functionals: outer ∘ inner.
    ComposeTt {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
        /// Outputs to compute; defaults to the outer table count.
        #[arg(long)]
        upto: Option<usize>,
    },
    /// Rebuild the tables of Θ from Φ = Θ⁻¹∘S★∘Θ and table 0.
    Reconstruct {
        /// A rule name (`pair-and`, `shift`, `identity`) or functional JSON.
        #[arg(long)]
        phi: String,
        /// One table as JSON, e.g. `{"use":[2,3],"table":[1,0,1,1]}`.
        #[arg(long)]
        table0: String,
        #[arg(long)]
        upto: usize,
    },
    /// Test X =*_a Y ⇒ F(X) =*_b F(Y) on a window universe.
    CheckUniform {
        /// `identity`, `min-drop`, `shift`, or `perm:<json>`.
        #[arg(long)]
        map: String,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        window: usize,
    },
    /// Print and verify the pair refuting modulus b for min-drop at a = 1.
    CounterexampleMindrop {
        #[arg(long)]
        b: usize,
    },
    /// End-to-end demos with JSON reports.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Subcommand)]
enum Demo {
    /// Recover θ⁻¹ from the successor conjugate computed by elimination.
    Lax {
        /// Permutation JSON, e.g. `{"pairs":[[0,5],[5,0]]}`.
        #[arg(long, default_value = r#"{"pairs":[]}"#)]
        perm: String,
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long, default_value_t = 1 << 16)]
        search_limit: u64,
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Conjugacy, bi-uniformity and table reconstruction for Θ = Π_θ.
    Homeo {
        #[arg(long, default_value = r#"{"pairs":[]}"#)]
        perm: String,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// The pair-and reconstruction with tables checked bit for bit.
    Indproc,
}

/// Reads JSON given inline (starting with `{` or `[`) or from a file.
fn json_arg<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {what} from {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what}"))
}

fn permutation_arg(arg: &str) -> Result<FinSupPermutation> {
    let json: PermutationJson = json_arg(arg, "permutation")?;
    Ok(FinSupPermutation::try_from(json)?)
}

fn functional_arg(arg: &str) -> Result<TruthTableFunctional> {
    if let Ok(rule) = Rule::from_name(arg) {
        return Ok(TruthTableFunctional::from_rule(rule));
    }
    json_arg(arg, "functional")
}

fn oracle_arg(arg: &str) -> Result<Box<dyn PartialOracleFunctional>> {
    match arg.parse::<BuiltinOracle>() {
        Ok(o) => Ok(Box::new(o)),
        Err(builtin) => {
            let tt: TruthTableFunctional =
                functional_arg(arg).with_context(|| format!("not a built-in oracle ({builtin}) or a functional"))?;
            Ok(Box::new(TtOracle(tt)))
        }
    }
}

fn print(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("plain data"));
}

fn table_view(t: &OutputTable) -> Value {
    json!({ "use": t.uses(), "table": t.table().iter().map(|&b| u8::from(b)).collect::<Vec<_>>(), "expr": t.render() })
}

fn recover_perm(k: &str, seed: usize, m: Option<usize>) -> Result<bool> {
    let k: Vec<usize> = json_arg(k, "conjugate table")?;
    let m = m.unwrap_or(k.len());
    Ok(match recover_inverse(&k, seed, m) {
        Ok(t) => {
            print(&json!({ "theta_inverse": t }));
            true
        }
        Err(e) => {
            print(&json!({ "error": e.to_string() }));
            false
        }
    })
}

fn compute_g(
    phi: &str,
    sigma: &str,
    n: usize,
    db: Option<&str>,
    search_limit: u64,
    transcript: Option<&Path>,
) -> Result<bool> {
    let sigma: BitString = sigma.parse().context("parsing sigma")?;
    let database: BTreeMap<usize, usize> = match db {
        Some(db) => json_arg(db, "database")?,
        None => BTreeMap::new(),
    };
    let inst = ForcingInstance::new(Traced::new(oracle_arg(phi)?), sigma, database)?;
    let result = compute_g_traced(&inst, n, search_limit);
    if let Some(path) = transcript {
        let mut text = inst.phi().transcript().join("\n");
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing transcript to {}", path.display()))?;
    }
    let (ok, out) = match result {
        Ok(GComputation::Database { n, value }) => (true, json!({ "n": n, "g": value, "source": "database" })),
        Ok(GComputation::Eliminated { n, value, rho0, interval, steps }) => {
            let steps: Vec<Value> = steps
                .iter()
                .map(|s| json!({ "a": s.a, "b": s.b, "eliminated": s.eliminated }))
                .collect();
            (
                true,
                json!({
                    "n": n,
                    "g": value,
                    "source": "elimination",
                    "rho0": rho0.to_string(),
                    "interval": [interval.0, interval.1],
                    "eliminations": steps,
                }),
            )
        }
        Err(e) => (false, json!({ "n": n, "error": e.to_string() })),
    };
    print(&out);
    Ok(ok)
}

fn compose_tt(outer: &str, inner: &str, upto: Option<usize>) -> Result<bool> {
    let outer = functional_arg(outer)?;
    let inner = functional_arg(inner)?;
    let upto = match upto {
        Some(u) => u,
        None if outer.arity() > 0 => outer.arity(),
        None => bail!("--upto is required when the outer functional has no explicit tables"),
    };
    Ok(match tt_compose(&outer, &inner, upto) {
        Ok(f) => {
            print(&f);
            true
        }
        Err(e) => {
            print(&json!({ "error": e.to_string() }));
            false
        }
    })
}

fn reconstruct(phi: &str, table0: &str, upto: usize) -> Result<bool> {
    let phi = functional_arg(phi)?;
    let table0: OutputTable = json_arg(table0, "table 0")?;
    Ok(match reconstruct_tables(&phi, table0, upto) {
        Ok(tables) => {
            let views: Vec<Value> = tables.iter().map(table_view).collect();
            print(&json!({ "outputs": views }));
            true
        }
        Err(e) => {
            print(&json!({ "error": e.to_string() }));
            false
        }
    })
}

fn uniform(map: &str, a: usize, b: usize, window: usize) -> Result<bool> {
    let f = CantorMap::by_name(map)?;
    let w = Window::new(window)?;
    let verdict = check_uniform(&f, a, b, w)?;
    let mut out = json!({ "map": f.label(), "a": a, "b": b, "window": window, "holds": verdict.holds() });
    if let Verdict::Refuted(c) = &verdict {
        out["counterexample"] = serde_json::to_value(c)?;
    }
    print(&out);
    Ok(verdict.holds())
}

fn counterexample_mindrop(b: usize) -> Result<bool> {
    let (x, y) = min_drop_counterexample(b);
    let related = cantor_core::bits::eq_star_n(&x, &y, 1);
    let separated = !cantor_core::bits::eq_star_n(&min_drop(&x), &min_drop(&y), b);
    print(&Counterexample { x, y, a: 1, b });
    Ok(related && separated)
}

fn demo(which: Demo) -> Result<bool> {
    let report: DemoReport = match which {
        Demo::Lax { perm, window, search_limit, transcript } => {
            let theta = permutation_arg(&perm)?;
            let (mut report, log) = demo_theorem_lax_traced(&theta, window, search_limit)?;
            if let Some(path) = transcript {
                let mut text = log.join("\n");
                text.push('\n');
                fs::write(&path, text).with_context(|| format!("writing transcript to {}", path.display()))?;
                report.transcript = Some(path.display().to_string());
            }
            report
        }
        Demo::Homeo { perm, window } => demo_theorem_homeo(&permutation_arg(&perm)?, window)?,
        Demo::Indproc => run_indproc(),
    };
    println!("{}", report.to_json());
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::RecoverPerm { k, seed, m } => recover_perm(&k, seed, m),
        Command::ComputeG { phi, sigma, n, db, search_limit, transcript } => {
            compute_g(&phi, &sigma, n, db.as_deref(), search_limit, transcript.as_deref())
        }
        Command::ComposeTt { outer, inner, upto } => compose_tt(&outer, &inner, upto),
        Command::Reconstruct { phi, table0, upto } => reconstruct(&phi, &table0, upto),
        Command::CheckUniform { map, a, b, window } => uniform(&map, a, b, window),
        Command::CounterexampleMindrop { b } => counterexample_mindrop(b),
        Command::Demo(which) => demo(which),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
