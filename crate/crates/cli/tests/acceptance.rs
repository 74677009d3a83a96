//! Acceptance checks, one line per criterion, each under a wall-clock bound.
//!
//! Expected values come from oracles written here: preimage search for
//! inverses, position scans for tail relations and distances, and tables
//! tabulated straight from their Boolean formulas.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cantor_core::bits::{eq_star_n, EventuallyPeriodic};
use cantor_core::e0::{
    check_hamming_bound, check_uniform, min_drop, min_drop_counterexample, perm_modulus, universe_pairs, CantorMap,
};
use cantor_core::forcing::{check_use_bound, compute_g, BitOfG, ForcingInstance, SampleParams};
use cantor_core::perm::{conjugate_successor, induced_map, recover_inverse};
use cantor_core::pipeline::run_indproc;
use cantor_core::reconstruct::{conjugate_shift, reconstruct_tables, ConjugateDirection};
use cantor_core::{BitString, FinSupPermutation, HomeoPair, OutputTable, Window};

type Check = fn() -> Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    check: Check,
}

fn family() -> Vec<FinSupPermutation> {
    FinSupPermutation::all_with_support_below(5)
}

fn preimage(theta: &FinSupPermutation, m: usize) -> usize {
    (0..).find(|&i| theta.apply(i) == m).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(∧ first half) → (∧ second half)` evaluated on every row of `uses`.
fn implication_rows(uses: &[usize]) -> Vec<bool> {
    let half = uses.len() / 2;
    (0..1usize << uses.len())
        .map(|row| {
            let bit = |i: usize| row >> i & 1 == 1;
            !(0..half).all(bit) || (half..uses.len()).all(bit)
        })
        .collect()
}

/// The expected rendering, with a LaTeX arrow.
fn printed(lo: usize, width: usize) -> String {
    let conj = |r: std::ops::Range<usize>| r.map(|p| format!("A({p})")).collect::<String>();
    format!("{}\\to {}", conj(lo..lo + width), conj(lo + width..lo + 2 * width))
}

fn indproc() -> Result<String, String> {
    let report = run_indproc();
    ensure(report.passed, || report.to_json())?;
    let phi = cantor_core::TruthTableFunctional::pair_and();
    let table0 = OutputTable::new(vec![2, 3], implication_rows(&[2, 3])).unwrap();
    let tables = reconstruct_tables(&phi, table0, 3).map_err(|e| e.to_string())?;
    let expected_text = [
        (1, 4, 2, "A(4)A(5)\\to A(6)A(7)"),
        (2, 8, 4, "A(8)A(9)A(10)A(11)\\to A(12)A(13)A(14)A(15)"),
    ];
    for (n, lo, width, text) in expected_text {
        let uses: Vec<usize> = (lo..lo + 2 * width).collect();
        let t = &tables[n];
        ensure(t.uses() == uses.as_slice(), || format!("table {n} use {:?}", t.uses()))?;
        ensure(t.table() == implication_rows(&uses).as_slice(), || format!("table {n} rows differ"))?;
        ensure(printed(lo, width) == text, || format!("table {n} printed form"))?;
        let rendered = t.render().unwrap_or_default().replace(" -> ", "\\to ");
        ensure(rendered == text, || format!("table {n} renders as {rendered}"))?;
        let step = report.step_named(&format!("table-{n}")).ok_or("missing step")?;
        ensure(step.detail["use"] == serde_json::json!(uses), || format!("report use for table {n}"))?;
    }
    Ok("tables 1 and 2 bit-exact".into())
}

fn recursion() -> Result<String, String> {
    let mut count = 0;
    for theta in family() {
        let k = conjugate_successor(&theta, 10);
        let got = recover_inverse(&k, preimage(&theta, 0), 10).map_err(|e| e.to_string())?;
        let want: Vec<usize> = (0..10).map(|m| preimage(&theta, m)).collect();
        ensure(got == want, || format!("{theta:?}: {got:?} != {want:?}"))?;
        count += 1;
    }
    Ok(format!("{count} permutations on [0,10)"))
}

fn elimination() -> Result<String, String> {
    let (mut perms, mut samples) = (0, 0);
    for theta in family() {
        let g: Vec<usize> = (0..12).map(|n| preimage(&theta, theta.apply(n) + 1)).collect();
        let inst = ForcingInstance::unconditioned(BitOfG::new(g.clone()));
        for (n, &want) in g.iter().enumerate() {
            let got = compute_g(&inst, n, 1 << 16).map_err(|e| format!("{theta:?} n={n}: {e}"))?;
            ensure(got == want, || format!("{theta:?} n={n}: {got} != {want}"))?;
        }
        let check = check_use_bound(&inst, &g, 10_000, SampleParams::default());
        ensure(check.holds(), || format!("{theta:?}: use bound violated at {:?}", check.violation))?;
        ensure(check.sampled >= 10_000, || "too few samples".into())?;
        samples += check.sampled;
        perms += 1;
    }
    Ok(format!("{perms} permutations, n < 12, {samples} sampled (rho, n)"))
}

fn modulus() -> Result<String, String> {
    let w = Window::new(12).unwrap();
    let mut checks = 0;
    for theta in family() {
        let f = CantorMap::induced(theta.clone());
        for a in 0..=4 {
            let b = perm_modulus(&theta, a);
            let want = (0..a).map(|m| preimage(&theta, m) + 1).max().unwrap_or(0);
            ensure(b == want, || format!("{theta:?} a={a}: modulus {b} != {want}"))?;
            let verdict = check_uniform(&f, a, b, w).map_err(|e| e.to_string())?;
            ensure(verdict.holds(), || format!("{theta:?} a={a} b={b}: {verdict:?}"))?;
            checks += 1;
        }
    }
    let swap = CantorMap::induced(FinSupPermutation::swap(0, 5));
    ensure(perm_modulus(&FinSupPermutation::swap(0, 5), 1) == 6, || "swap(0,5) modulus".into())?;
    let tight = check_uniform(&swap, 1, 5, w).map_err(|e| e.to_string())?;
    ensure(!tight.holds(), || "swap(0,5) passed with b = 5".into())?;
    Ok(format!("{checks} (theta, a) pairs hold; swap(0,5) fails at b = 5"))
}

/// `d_H` over positions below `span`, by scanning.
fn distance(x: &EventuallyPeriodic, y: &EventuallyPeriodic, span: usize) -> usize {
    (0..span).filter(|&i| x.at(i) != y.at(i)).count()
}

/// Clears the least 1-bit by scanning, independently of the library.
fn drop_least(x: &EventuallyPeriodic, span: usize) -> EventuallyPeriodic {
    match (0..span).find(|&i| x.at(i)) {
        Some(m) => x.with_bit(m, false),
        None => x.clone(),
    }
}

fn min_drop_example() -> Result<String, String> {
    for b in 0..=8 {
        let (x, y) = min_drop_counterexample(b);
        let related = (1..32).all(|i| x.at(i) == y.at(i));
        let (fx, fy) = (drop_least(&x, 32), drop_least(&y, 32));
        let separated = (b..32).any(|i| fx.at(i) != fy.at(i));
        ensure(related && separated, || format!("b={b}: {x} / {y}"))?;
        ensure(eq_star_n(&x, &y, 1) && !eq_star_n(&min_drop(&x), &min_drop(&y), b), || format!("library disagrees at b={b}"))?;
    }
    let w = Window::new(10).unwrap();
    let mut pairs = 0;
    for a in 0..=4 {
        for (x, y) in universe_pairs(a, w).map_err(|e| e.to_string())? {
            ensure(check_hamming_bound(&x, &y, a, w).map_err(|e| e.to_string())?, || format!("a={a}: {x} / {y}"))?;
            // heads are 10 long and tails constant, so 12 positions see everything
            let d = distance(&drop_least(&x, 12), &drop_least(&y, 12), 12);
            ensure(d <= a + 2, || format!("a={a}: distance {d} for {x} / {y}"))?;
            pairs += 1;
        }
    }
    Ok(format!("b <= 8 refuted; {pairs} pairs within a + 2"))
}

fn round_trip() -> Result<String, String> {
    let w = Window::new(12).unwrap();
    let mut count = 0;
    for theta in family() {
        let pair = HomeoPair::from_permutation(&theta, w).map_err(|e| e.to_string())?;
        let phi = conjugate_shift(&pair, 12, ConjugateDirection::InverseShiftForward).map_err(|e| e.to_string())?;
        let table0 = OutputTable::identity_at(theta.apply(0));
        let tables = reconstruct_tables(&phi, table0, 8).map_err(|e| e.to_string())?;
        for (n, t) in tables.iter().enumerate() {
            // output n of X ↦ X∘θ reads X(θ(n))
            let want = OutputTable::identity_at(theta.apply(n));
            ensure(t == &want, || format!("{theta:?} table {n}: {t:?}"))?;
        }
        count += 1;
    }
    Ok(format!("{count} permutations, tables 0..7 exact"))
}

fn induced_inverse() -> Result<String, String> {
    let width = 12;
    let mut count = 0;
    for theta in family() {
        let inv = theta.inverse();
        for word in 0..1u64 << (width + 1) {
            let x = EventuallyPeriodic::with_tail(BitString::from_word(word, width), word >> width & 1 == 1);
            let there = induced_map(&theta, &induced_map(&inv, &x));
            let back = induced_map(&inv, &induced_map(&theta, &x));
            ensure(there == x && back == x, || format!("{theta:?} on {x}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} (theta, X) checks"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cantor"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} exited with {}", out.status))?;
    Ok(out.stdout)
}

fn determinism() -> Result<String, String> {
    let dir = std::env::temp_dir().join(format!("cantor-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let transcript: PathBuf = dir.join("lax.log");
    let t = transcript.to_str().ok_or("non-UTF-8 temp path")?;
    let swap = r#"{"pairs":[[0,5],[5,0]]}"#;
    let runs: [&[&str]; 4] = [
        &["demo", "lax", "--perm", swap, "--window", "10", "--transcript", t],
        &["demo", "homeo", "--perm", swap, "--window", "8"],
        &["demo", "indproc"],
        &["demo", "lax", "--perm", r#"{"pairs":[[0,1],[1,0]]}"#, "--window", "8"],
    ];
    for args in runs {
        let first = run_cli(args)?;
        let log = std::fs::read(&transcript).unwrap_or_default();
        let second = run_cli(args)?;
        ensure(first == second, || format!("{args:?} differs between runs"))?;
        let log_again = std::fs::read(&transcript).unwrap_or_default();
        ensure(log == log_again, || "transcript differs between runs".into())?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok("lax, homeo, indproc reports byte-identical".into())
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "indproc tables bit-exact", limit: Duration::from_secs(1), check: indproc },
        Criterion { name: "inverse recovered by recursion", limit: Duration::from_secs(5), check: recursion },
        Criterion { name: "successor conjugate by elimination", limit: Duration::from_secs(30), check: elimination },
        Criterion { name: "permutation modulus on window 12", limit: Duration::from_secs(60), check: modulus },
        Criterion { name: "min-drop counterexample and distance bound", limit: Duration::from_secs(60), check: min_drop_example },
        Criterion { name: "table round trip 0..7", limit: Duration::from_secs(30), check: round_trip },
        Criterion { name: "induced maps invert on window 12", limit: Duration::from_secs(60), check: induced_inverse },
        Criterion { name: "demo reports deterministic", limit: Duration::from_secs(60), check: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        match result {
            Ok(detail) if elapsed <= c.limit => {
                println!("PASS  {:<44} {:>8.3}s  {detail}", c.name, elapsed.as_secs_f64());
            }
            Ok(_) => {
                failed += 1;
                println!("FAIL  {:<44} {:>8.3}s  over the {:?} bound", c.name, elapsed.as_secs_f64(), c.limit);
            }
            Err(why) => {
                failed += 1;
                println!("FAIL  {:<44} {:>8.3}s  {why}", c.name, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
