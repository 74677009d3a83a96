//! Partial oracle functionals and the candidate-elimination procedure that
//! computes an injective `g` from a functional `Φ` satisfying, above a
//! forcing condition `σ`,
//!
//! ```text
//! (∀n)(∀τ ⪰ σ)(∃ρ ⪰ τ)  Φ^ρ(n)↓ and ρ(g(n)) = Φ^ρ(n)
//! ```
//!
//! Searches are deterministic: extensions are enumerated length-first then
//! lexicographically (leftmost bit most significant, `0 < 1`), with the step
//! budget doubling from stage to stage. Stage `s` runs budget `2^s` over all
//! extensions of length `0..=s`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::tt::TruthTableFunctional;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcingError {
    #[error("no converging extension found for output {n} within search limit {search_limit}")]
    BudgetExhausted { n: usize, search_limit: u64 },
    #[error("inconsistent instance at output {n}: probes on candidates {a} and {b} eliminate both")]
    InconsistentPair { n: usize, a: usize, b: usize },
    #[error("inconsistent instance at output {n}: candidate interval is empty")]
    EmptyInterval { n: usize },
    #[error("inconsistent instance at output {n}: every candidate was eliminated")]
    NoCandidateLeft { n: usize },
    #[error("candidates must satisfy |σ| = {sigma_len} <= a < b, got a = {a}, b = {b}")]
    InvalidPair { a: usize, b: usize, sigma_len: usize },
    #[error("database entry g({k}) = {value} is not below |σ| = {sigma_len}")]
    DatabaseOutOfRange { k: usize, value: usize, sigma_len: usize },
    #[error("malformed oracle description: {0}")]
    BadOracle(String),
}

/// `Φ^ρ(n)` run for at most `budget` steps: `Some(bit)` on convergence,
/// `None` if it has not converged yet.
///
/// Implementations must be monotone: once `(ρ, n, b)` converges, every
/// `(ρ', n, b')` with `ρ ⪯ ρ'` and `b ≤ b'` converges to the same bit.
pub trait PartialOracleFunctional {
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool>;
}

impl<T: PartialOracleFunctional + ?Sized> PartialOracleFunctional for &T {
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool> {
        (**self).query(rho, n, budget)
    }
}

impl<T: PartialOracleFunctional + ?Sized> PartialOracleFunctional for Box<T> {
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool> {
        (**self).query(rho, n, budget)
    }
}

/// `Φ^ρ(n) = ρ(g(n))`, undefined while `g(n) ≥ |ρ|` or the budget is below
/// `delay`. With `negate` set it outputs `1 − ρ(g(n))` instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitOfG {
    g: Vec<usize>,
    delay: u64,
    negate: bool,
}

impl BitOfG {
    pub fn new(g: Vec<usize>) -> Self {
        Self { g, delay: 1, negate: false }
    }

    pub fn with_delay(mut self, delay: u64) -> Self {
        self.delay = delay;
        self
    }

    pub fn negated(mut self) -> Self {
        self.negate = !self.negate;
        self
    }

    pub fn g(&self) -> &[usize] {
        &self.g
    }
}

impl PartialOracleFunctional for BitOfG {
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool> {
        if budget < self.delay {
            return None;
        }
        let bit = rho.get(*self.g.get(n)?)?;
        Some(bit ^ self.negate)
    }
}

/// Never converges.
#[derive(Debug, Clone, Copy, Default)]
pub struct Never;

impl PartialOracleFunctional for Never {
    fn query(&self, _: &BitString, _: usize, _: u64) -> Option<bool> {
        None
    }
}

/// Converges immediately to a fixed bit without reading the oracle.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub bool);

impl PartialOracleFunctional for Constant {
    fn query(&self, _: &BitString, _: usize, _: u64) -> Option<bool> {
        Some(self.0)
    }
}

/// A truth-table functional viewed as a partial functional: output `n`
/// converges once `ρ` covers its whole use.
#[derive(Debug, Clone)]
pub struct TtOracle(pub TruthTableFunctional);

impl PartialOracleFunctional for TtOracle {
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool> {
        if budget == 0 {
            return None;
        }
        let table = self.0.table(n).ok()?;
        if table.uses().last().is_some_and(|&p| p >= rho.len()) {
            return None;
        }
        Some(table.eval(|p| rho.get(p).unwrap_or(false)))
    }
}

/// Wraps a closure as a partial functional.
pub struct OracleFn<F>(pub F);

impl<F> PartialOracleFunctional for OracleFn<F>
where
    F: Fn(&BitString, usize, u64) -> Option<bool>,
{
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool> {
        (self.0)(rho, n, budget)
    }
}

/// The oracle constructors reachable from the command line.
///
/// Text forms: `bit-of-g:[2,0,3,4]`, `never`, `constant:0`, `constant:1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinOracle {
    BitOfG(BitOfG),
    Never,
    Constant(bool),
}

impl PartialOracleFunctional for BuiltinOracle {
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool> {
        match self {
            BuiltinOracle::BitOfG(o) => o.query(rho, n, budget),
            BuiltinOracle::Never => None,
            BuiltinOracle::Constant(b) => Some(*b),
        }
    }
}

impl FromStr for BuiltinOracle {
    type Err = ForcingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        match (name, arg) {
            ("never", None) => Ok(BuiltinOracle::Never),
            ("constant", Some("0")) => Ok(BuiltinOracle::Constant(false)),
            ("constant", Some("1")) => Ok(BuiltinOracle::Constant(true)),
            ("bit-of-g", Some(table)) => serde_json::from_str::<Vec<usize>>(table)
                .map(|g| BuiltinOracle::BitOfG(BitOfG::new(g)))
                .map_err(|e| ForcingError::BadOracle(format!("g table: {e}"))),
            _ => Err(ForcingError::BadOracle(s.to_string())),
        }
    }
}

/// Records every query as a line `(rho, n, budget) -> result`.
pub struct Traced<O> {
    inner: O,
    log: RefCell<Vec<String>>,
}

impl<O> Traced<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, log: RefCell::new(Vec::new()) }
    }

    pub fn transcript(&self) -> Vec<String> {
        self.log.borrow().clone()
    }

    pub fn query_count(&self) -> usize {
        self.log.borrow().len()
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: PartialOracleFunctional> PartialOracleFunctional for Traced<O> {
    fn query(&self, rho: &BitString, n: usize, budget: u64) -> Option<bool> {
        let result = self.inner.query(rho, n, budget);
        let shown = match result {
            Some(true) => "1",
            Some(false) => "0",
            None => "diverge",
        };
        self.log.borrow_mut().push(format!("({rho}, {n}, {budget}) -> {shown}"));
        result
    }
}

/// `Φ` together with a forcing condition `σ` and the finite database of the
/// values `g(k) < |σ|`.
pub struct ForcingInstance<O> {
    phi: O,
    sigma: BitString,
    database: BTreeMap<usize, usize>,
}

impl<O: PartialOracleFunctional> ForcingInstance<O> {
    pub fn new(phi: O, sigma: BitString, database: BTreeMap<usize, usize>) -> Result<Self, ForcingError> {
        if let Some((&k, &value)) = database.iter().find(|(_, &v)| v >= sigma.len()) {
            return Err(ForcingError::DatabaseOutOfRange { k, value, sigma_len: sigma.len() });
        }
        Ok(Self { phi, sigma, database })
    }

    /// Instance with `σ = ε` and an empty database.
    pub fn unconditioned(phi: O) -> Self {
        Self { phi, sigma: BitString::empty(), database: BTreeMap::new() }
    }

    pub fn phi(&self) -> &O {
        &self.phi
    }

    pub fn sigma(&self) -> &BitString {
        &self.sigma
    }

    pub fn database(&self) -> &BTreeMap<usize, usize> {
        &self.database
    }
}

/// A converging computation found by the search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergence {
    pub rho: BitString,
    pub value: bool,
    pub budget: u64,
}

/// Writes the `len`-bit string with index `word` (lexicographic order,
/// leftmost bit most significant) after `base_len` in `buf`.
fn write_extension(buf: &mut BitString, base_len: usize, word: u64, len: usize) {
    buf.truncate(base_len);
    for i in (0..len).rev() {
        buf.push((word >> i) & 1 == 1);
    }
}

/// Dovetails over extensions of `tau` and step budgets until `Φ^ρ(n)`
/// converges. `search_limit` caps the budget, and with it the stage count.
pub fn find_halting_extension<O>(phi: &O, tau: &BitString, n: usize, search_limit: u64) -> Result<Convergence, ForcingError>
where
    O: PartialOracleFunctional + ?Sized,
{
    let mut rho = tau.clone();
    let mut budget: u64 = 1;
    let mut stage = 0usize;
    while budget <= search_limit && stage < 63 {
        for len in 0..=stage {
            for word in 0..1u64 << len {
                write_extension(&mut rho, tau.len(), word, len);
                if let Some(value) = phi.query(&rho, n, budget) {
                    return Ok(Convergence { rho, value, budget });
                }
            }
        }
        stage += 1;
        budget = budget.saturating_mul(2);
    }
    Err(ForcingError::BudgetExhausted { n, search_limit })
}

/// Runs one elimination probe: `τ ⪰ σ` of length `b+1`, zero except
/// `τ(a) = first`, `τ(b) = ¬first`. Returns the candidate whose bit in the
/// converged `ρ` disagrees with `Φ^ρ(n)`.
fn probe<O: PartialOracleFunctional>(
    inst: &ForcingInstance<O>,
    n: usize,
    a: usize,
    b: usize,
    first: bool,
    search_limit: u64,
) -> Result<usize, ForcingError> {
    let mut tau = inst.sigma.clone();
    tau.set(b, !first);
    tau.set(a, first);
    let conv = find_halting_extension(&inst.phi, &tau, n, search_limit)?;
    // ρ(a) ≠ ρ(b), so exactly one of them disagrees with the output.
    Ok(if conv.rho.get(a) != Some(conv.value) { a } else { b })
}

/// Which of the candidates `a < b` the two probes refute.
///
/// The primary probe uses `τ(a) = 0, τ(b) = 1`, the second one flips the
/// polarity. Each converging extension disagrees with exactly one candidate.
/// When the probes disagree, both candidates are refuted, so `g(n)` lies
/// outside the pair.
pub fn refute_pair<O: PartialOracleFunctional>(
    inst: &ForcingInstance<O>,
    n: usize,
    a: usize,
    b: usize,
    search_limit: u64,
) -> Result<Refuted, ForcingError> {
    if a < inst.sigma.len() || a >= b {
        return Err(ForcingError::InvalidPair { a, b, sigma_len: inst.sigma.len() });
    }
    let primary = probe(inst, n, a, b, false, search_limit)?;
    let flipped = probe(inst, n, a, b, true, search_limit)?;
    Ok(if primary == flipped { Refuted::One(primary) } else { Refuted::Both })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refuted {
    One(usize),
    Both,
}

/// Eliminates one of the candidates `a < b` for `g(n)`, assuming one of
/// them is the true value. Fails with [`ForcingError::InconsistentPair`]
/// when both are refuted.
pub fn eliminate_pair<O: PartialOracleFunctional>(
    inst: &ForcingInstance<O>,
    n: usize,
    a: usize,
    b: usize,
    search_limit: u64,
) -> Result<usize, ForcingError> {
    match refute_pair(inst, n, a, b, search_limit)? {
        Refuted::One(c) => Ok(c),
        Refuted::Both => Err(ForcingError::InconsistentPair { n, a, b }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub a: usize,
    pub b: usize,
    /// One candidate, or both when the probes disagreed.
    pub eliminated: Vec<usize>,
}

/// How a value of `g` was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GComputation {
    Database { n: usize, value: usize },
    Eliminated {
        n: usize,
        value: usize,
        /// The first converging extension `ρ₀ ⪰ σ`.
        rho0: BitString,
        /// Candidate interval `[|σ|, |ρ₀| − 1]`, as a half-open range.
        interval: (usize, usize),
        steps: Vec<Elimination>,
    },
}

impl GComputation {
    pub fn value(&self) -> usize {
        match self {
            GComputation::Database { value, .. } | GComputation::Eliminated { value, .. } => *value,
        }
    }
}

/// Computes `g(n)`, recording the search.
pub fn compute_g_traced<O: PartialOracleFunctional>(
    inst: &ForcingInstance<O>,
    n: usize,
    search_limit: u64,
) -> Result<GComputation, ForcingError> {
    if let Some(&value) = inst.database.get(&n) {
        return Ok(GComputation::Database { n, value });
    }
    let rho0 = find_halting_extension(&inst.phi, &inst.sigma, n, search_limit)?.rho;
    let interval = (inst.sigma.len(), rho0.len());
    if interval.0 >= interval.1 {
        return Err(ForcingError::EmptyInterval { n });
    }
    let mut candidates: Vec<usize> = (interval.0..interval.1).collect();
    let mut steps = Vec::with_capacity(candidates.len().saturating_sub(1));
    while candidates.len() > 1 {
        let (a, b) = (candidates[0], candidates[1]);
        let eliminated = match refute_pair(inst, n, a, b, search_limit)? {
            Refuted::One(c) => vec![c],
            Refuted::Both => vec![a, b],
        };
        candidates.retain(|c| !eliminated.contains(c));
        steps.push(Elimination { a, b, eliminated });
    }
    if candidates.is_empty() {
        return Err(ForcingError::NoCandidateLeft { n });
    }
    Ok(GComputation::Eliminated { n, value: candidates[0], rho0, interval, steps })
}

pub fn compute_g<O: PartialOracleFunctional>(inst: &ForcingInstance<O>, n: usize, search_limit: u64) -> Result<usize, ForcingError> {
    compute_g_traced(inst, n, search_limit).map(|c| c.value())
}

/// Parameters for sampling `(ρ ⪰ σ, n)` pairs.
#[derive(Debug, Clone, Copy)]
pub struct SampleParams {
    /// Extensions of `σ` are drawn with length `0..=max_extension`.
    pub max_extension: usize,
    pub budget: u64,
    pub seed: u64,
}

impl Default for SampleParams {
    fn default() -> Self {
        Self { max_extension: 16, budget: 1 << 10, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UseBoundCheck {
    pub sampled: usize,
    pub converged: usize,
    /// A converging `(ρ, n)` with `g(n) ≥ |ρ|`.
    pub violation: Option<(BitString, usize)>,
}

impl UseBoundCheck {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Samples `(ρ ⪰ σ, n < |g|)` and checks that convergence of `Φ^ρ(n)`
/// implies `g(n) < |ρ|`. Stops at the first violation.
pub fn check_use_bound<O: PartialOracleFunctional>(
    inst: &ForcingInstance<O>,
    g: &[usize],
    trials: usize,
    params: SampleParams,
) -> UseBoundCheck {
    let mut out = UseBoundCheck { sampled: 0, converged: 0, violation: None };
    if g.is_empty() {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut rho = inst.sigma.clone();
    for _ in 0..trials {
        let n = rng.gen_range(0..g.len());
        let len = rng.gen_range(0..=params.max_extension);
        rho.truncate(inst.sigma.len());
        for _ in 0..len {
            rho.push(rng.gen());
        }
        out.sampled += 1;
        if inst.phi.query(&rho, n, params.budget).is_some() {
            out.converged += 1;
            if g[n] >= rho.len() {
                out.violation = Some((rho.clone(), n));
                break;
            }
        }
    }
    out
}

/// Bounds for the finite check of the forcing hypothesis.
#[derive(Debug, Clone, Copy)]
pub struct HypothesisBounds {
    pub n_bound: usize,
    /// Largest `|τ|` tried.
    pub tau_bound: usize,
    /// Largest `|ρ|` tried.
    pub ext_bound: usize,
    pub budget: u64,
}

/// The `(n, τ)` for which no `ρ ⪰ τ` within bounds converges correctly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisFailure {
    pub n: usize,
    pub tau: BitString,
}

impl fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no correct converging extension of {:?} for output {}", self.tau.to_string(), self.n)
    }
}

/// For all `n < n_bound` and `τ ⪰ σ` with `|τ| ≤ tau_bound`, looks for
/// `ρ ⪰ τ`, `|ρ| ≤ ext_bound`, with `Φ^ρ(n)↓ = ρ(g(n))`.
pub fn check_forcing_hypothesis<O: PartialOracleFunctional>(
    inst: &ForcingInstance<O>,
    g: &[usize],
    bounds: HypothesisBounds,
) -> Result<(), HypothesisFailure> {
    let base = inst.sigma.len();
    let mut tau = inst.sigma.clone();
    let mut rho = BitString::empty();
    for n in 0..bounds.n_bound {
        for tau_len in base..=bounds.tau_bound.max(base) {
            let extra = tau_len - base;
            for word in 0..1u64 << extra {
                write_extension(&mut tau, base, word, extra);
                let found = (tau_len..=bounds.ext_bound).any(|rho_len| {
                    let more = rho_len - tau_len;
                    (0..1u64 << more).any(|w| {
                        rho.clone_from(&tau);
                        write_extension(&mut rho, tau_len, w, more);
                        match (inst.phi.query(&rho, n, bounds.budget), g.get(n).and_then(|&p| rho.get(p))) {
                            (Some(v), Some(bit)) => v == bit,
                            _ => false,
                        }
                    })
                });
                if !found {
                    return Err(HypothesisFailure { n, tau: tau.clone() });
                }
            }
        }
    }
    Ok(())
}
