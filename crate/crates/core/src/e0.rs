//! Uniform `E₀`-invariance.
//!
//! A map `F` is uniformly `E₀`-invariant when for each `a` there is a `b`
//! with `X =*_a Y ⇒ F(X) =*_b F(Y)` for all `X`, `Y`. This module computes
//! such moduli for permutation-induced maps, refutes or confirms a candidate
//! modulus on a finite universe of reals, and rebuilds truth tables of a map
//! from a functional that agrees with it above a forcing condition.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bits::{eq_star, eq_star_n, hamming_window, splice, BitString, EventuallyPeriodic, Window};
use crate::forcing::{ForcingError, PartialOracleFunctional};
use crate::perm::{induced_map, FinSupPermutation, PermutationJson};
use crate::tt::{OutputTable, TruthTableFunctional, TtError, DEFAULT_MAX_USE};

/// Exhaustive checks enumerate `2^(limit+1)` reals; this caps `limit`.
pub const MAX_UNIVERSE_WINDOW: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum E0Error {
    #[error("inputs do not satisfy X =*_{a} Y")]
    PreconditionViolated { a: usize },
    #[error("inputs are not E0-equivalent, Hamming distance is infinite")]
    InfiniteDistance,
    #[error("modulus table has no entry for {0}")]
    RangeExceeded(usize),
    #[error("window {0} is too large for exhaustive enumeration (max {MAX_UNIVERSE_WINDOW})")]
    WindowTooLarge(usize),
    #[error("no database table for output {0}")]
    MissingDatabase(usize),
    #[error("unknown map {0:?}")]
    UnknownMap(String),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error(transparent)]
    Forcing(#[from] ForcingError),
    #[error(transparent)]
    Tt(#[from] TtError),
}

/// Table `a ↦ b` on `0..len`, normalized to be nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformModulus {
    table: Vec<usize>,
}

impl UniformModulus {
    /// Takes running maxima, so a larger `a` never gets a smaller `b`.
    pub fn new(raw: Vec<usize>) -> Self {
        let table = raw
            .into_iter()
            .scan(0, |m, b| {
                *m = (*m).max(b);
                Some(*m)
            })
            .collect();
        Self { table }
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> usize) -> Self {
        Self::new((0..len).map(f).collect())
    }

    pub fn identity(len: usize) -> Self {
        Self::from_fn(len, |a| a)
    }

    /// Modulus of `S★`: agreement from `a` becomes agreement from `a − 1`.
    pub fn shift(len: usize) -> Self {
        Self::from_fn(len, |a| a.saturating_sub(1))
    }

    pub fn for_permutation(theta: &FinSupPermutation, len: usize) -> Self {
        Self::from_fn(len, |a| perm_modulus(theta, a))
    }

    pub fn get(&self, a: usize) -> Result<usize, E0Error> {
        self.table.get(a).copied().ok_or(E0Error::RangeExceeded(a))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

/// Modulus of `outer ∘ inner`: `a ↦ outer(inner(a))`.
pub fn modulus_compose(outer: &UniformModulus, inner: &UniformModulus) -> Result<UniformModulus, E0Error> {
    let raw = inner
        .table
        .iter()
        .map(|&b| outer.get(b))
        .collect::<Result<_, _>>()?;
    Ok(UniformModulus::new(raw))
}

type Evaluator = dyn Fn(&EventuallyPeriodic) -> EventuallyPeriodic + Send + Sync;

/// A total map on eventually periodic reals, with a label for reports.
#[derive(Clone)]
pub struct CantorMap {
    label: String,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for CantorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("CantorMap").field(&self.label).finish()
    }
}

impl CantorMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&EventuallyPeriodic) -> EventuallyPeriodic + Send + Sync + 'static,
    {
        Self { label: label.into(), eval: Arc::new(f) }
    }

    pub fn identity() -> Self {
        Self::new("identity", EventuallyPeriodic::clone)
    }

    pub fn min_drop() -> Self {
        Self::new("min-drop", min_drop)
    }

    /// `S★`, dropping position 0.
    pub fn shift() -> Self {
        Self::new("shift", |x| {
            let start = x.preperiod().saturating_sub(1);
            EventuallyPeriodic::tabulate(start, x.period().len(), |n| x.at(n + 1))
        })
    }

    /// `X ↦ X∘θ`.
    pub fn induced(theta: FinSupPermutation) -> Self {
        let label = format!("perm:{}", serde_json::to_string(&theta.to_json()).unwrap_or_default());
        Self::new(label, move |x| induced_map(&theta, x))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &CantorMap) -> Self {
        let (outer, inner_eval) = (Arc::clone(&self.eval), Arc::clone(&inner.eval));
        Self {
            label: format!("{}∘{}", self.label, inner.label),
            eval: Arc::new(move |x| outer(&inner_eval(x))),
        }
    }

    /// Registry: `identity`, `min-drop`, `shift`, `perm:<json>`.
    pub fn by_name(name: &str) -> Result<Self, E0Error> {
        match name {
            "identity" => Ok(Self::identity()),
            "min-drop" => Ok(Self::min_drop()),
            "shift" => Ok(Self::shift()),
            _ => {
                let json = name
                    .strip_prefix("perm:")
                    .ok_or_else(|| E0Error::UnknownMap(name.to_string()))?;
                let parsed: PermutationJson =
                    serde_json::from_str(json).map_err(|e| E0Error::BadPermutation(e.to_string()))?;
                let theta = FinSupPermutation::try_from(parsed).map_err(|e| E0Error::BadPermutation(e.to_string()))?;
                Ok(Self::induced(theta))
            }
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, x: &EventuallyPeriodic) -> EventuallyPeriodic {
        (self.eval)(x)
    }
}

/// `b = 1 + max{θ⁻¹(m) : m < a}`, and `0` for `a = 0`.
pub fn perm_modulus(theta: &FinSupPermutation, a: usize) -> usize {
    (0..a).map(|m| theta.apply_inverse(m) + 1).max().unwrap_or(0)
}

/// A pair refuting a candidate modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub x: EventuallyPeriodic,
    pub y: EventuallyPeriodic,
    pub a: usize,
    pub b: usize,
}

impl Serialize for Counterexample {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Counterexample", 4)?;
        st.serialize_field("X", &self.x.to_string())?;
        st.serialize_field("Y", &self.y.to_string())?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Refuted(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// The finite test universe: every head of length `w` followed by `0^ω` or
/// `1^ω`. Index `i` has head bits `i & (2^w − 1)` (position 0 in the low
/// bit) and tail bit `i >> w`.
fn universe_member(index: u64, w: usize) -> EventuallyPeriodic {
    EventuallyPeriodic::with_tail(BitString::from_word(index, w), (index >> w) & 1 == 1)
}

/// Calls `visit(i, j)` for every universe pair with `X_i =*_a X_j` and
/// `j ≤ i`, in increasing `(i, j)` order, stopping when it returns `false`.
fn for_each_pair(w: usize, a: usize, mut visit: impl FnMut(u64, u64) -> bool) {
    let free = a.min(w);
    let mask = (1u64 << free) - 1;
    for i in 0..1u64 << (w + 1) {
        let base = i & !mask;
        for low in 0..=(i & mask) {
            if !visit(i, base | low) {
                return;
            }
        }
    }
}

/// Tests `X =*_a Y ⇒ F(X) =*_b F(Y)` on every pair from the window
/// universe. The witness reported is the least pair `(X, Y)` in universe
/// order with `Y ≤ X`.
pub fn check_uniform(f: &CantorMap, a: usize, b: usize, w: Window) -> Result<Verdict, E0Error> {
    let limit = w.limit();
    if limit > MAX_UNIVERSE_WINDOW {
        return Err(E0Error::WindowTooLarge(limit));
    }
    let images: Vec<EventuallyPeriodic> = (0..1u64 << (limit + 1)).map(|i| f.apply(&universe_member(i, limit))).collect();
    let mut witness = None;
    for_each_pair(limit, a, |i, j| {
        if eq_star_n(&images[i as usize], &images[j as usize], b) {
            return true;
        }
        witness = Some((i, j));
        false
    });
    Ok(match witness {
        None => Verdict::Holds,
        Some((i, j)) => Verdict::Refuted(Counterexample {
            x: universe_member(i, limit),
            y: universe_member(j, limit),
            a,
            b,
        }),
    })
}

/// All pairs `(X, Y)` of the window universe with `X =*_a Y` and `Y ≤ X`.
pub fn universe_pairs(a: usize, w: Window) -> Result<Vec<(EventuallyPeriodic, EventuallyPeriodic)>, E0Error> {
    let limit = w.limit();
    if limit > MAX_UNIVERSE_WINDOW {
        return Err(E0Error::WindowTooLarge(limit));
    }
    let mut out = Vec::new();
    for_each_pair(limit, a, |i, j| {
        out.push((universe_member(i, limit), universe_member(j, limit)));
        true
    });
    Ok(out)
}

/// Clears the least 1-bit; leaves `0^ω` alone.
pub fn min_drop(x: &EventuallyPeriodic) -> EventuallyPeriodic {
    match x.first_one() {
        Some(m) => x.with_bit(m, false),
        None => x.clone(),
    }
}

/// `Y = {max(b,1)}`, `X = Y ∪ {0}`: `X =*_1 Y` but the min-drop images
/// differ at `max(b,1) ≥ b`.
pub fn min_drop_counterexample(b: usize) -> (EventuallyPeriodic, EventuallyPeriodic) {
    let m = b.max(1);
    (
        EventuallyPeriodic::from_finite_set(&[0, m]),
        EventuallyPeriodic::from_finite_set(&[m]),
    )
}

/// Checks `d_H(F(X), F(Y)) ≤ a + 2` for the min-drop map `F`, given
/// `X =*_a Y`. Distances are taken over `w` widened to cover every
/// disagreement of the three pairs in the triangle inequality.
pub fn check_hamming_bound(x: &EventuallyPeriodic, y: &EventuallyPeriodic, a: usize, w: Window) -> Result<bool, E0Error> {
    if !eq_star_n(x, y, a) {
        return Err(E0Error::PreconditionViolated { a });
    }
    let (fx, fy) = (min_drop(x), min_drop(y));
    let reach = [(&fx, &fy), (&fx, x), (x, y), (y, &fy)]
        .into_iter()
        .map(|(p, q)| eq_star(p, q).ok_or(E0Error::InfiniteDistance))
        .collect::<Result<Vec<_>, _>>()?;
    let span = Window::new(reach.into_iter().fold(w.limit(), usize::max)).expect("nonzero");
    let d = |p: &EventuallyPeriodic, q: &EventuallyPeriodic| hamming_window(p, q, span);
    let direct = d(&fx, &fy);
    debug_assert!(direct <= d(&fx, x) + d(x, y) + d(y, &fy));
    Ok(direct <= a + 2)
}

/// Limits for [`extract_tt_from_forcing`].
#[derive(Debug, Clone, Copy)]
pub struct ExtractParams {
    /// Positions at or past this bound are never probed.
    pub probe_bound: usize,
    pub budget: u64,
}

impl Default for ExtractParams {
    fn default() -> Self {
        Self { probe_bound: DEFAULT_MAX_USE, budget: 1 << 10 }
    }
}

/// Rebuilds the truth tables of `F` on outputs `0..upto` from a functional
/// `Φ` with `F(X) = Φ^X` forced above `σ`, where `b` is the uniformity
/// modulus at `a = |σ|`.
///
/// Outputs below `b` come from `db`. For `n ≥ b`, `F^X(n) = Φ^{σ↘X}(n)`:
/// the table is read off `Φ` on `σ·w` for the shortest length at which
/// every such string converges, and positions the output does not depend on
/// are then dropped.
pub fn extract_tt_from_forcing<O: PartialOracleFunctional>(
    phi: &O,
    sigma: &BitString,
    modulus_b: usize,
    db: &BTreeMap<usize, OutputTable>,
    upto: usize,
    params: ExtractParams,
) -> Result<TruthTableFunctional, E0Error> {
    let mut outputs = Vec::with_capacity(upto);
    for n in 0..upto {
        if n < modulus_b {
            outputs.push(db.get(&n).cloned().ok_or(E0Error::MissingDatabase(n))?);
            continue;
        }
        outputs.push(read_table(phi, sigma, n, params)?);
    }
    Ok(TruthTableFunctional::from_tables(outputs))
}

fn read_table<O: PartialOracleFunctional>(phi: &O, sigma: &BitString, n: usize, params: ExtractParams) -> Result<OutputTable, E0Error> {
    let base = sigma.len();
    let mut rho = sigma.clone();
    for len in base..=params.probe_bound.max(base) {
        let free = len - base;
        if free > DEFAULT_MAX_USE {
            return Err(TtError::UseTooLarge { size: free, max: DEFAULT_MAX_USE }.into());
        }
        let mut table = Vec::with_capacity(1 << free);
        for row in 0..1u64 << free {
            rho.truncate(base);
            // row bit i is the value at position base + i
            rho.extend_from_slice(BitString::from_word(row, free).bits());
            match phi.query(&rho, n, params.budget) {
                Some(v) => table.push(v),
                None => break,
            }
        }
        if table.len() == 1 << free {
            return Ok(OutputTable::new((base..len).collect(), table)?.pruned());
        }
    }
    Err(ForcingError::BudgetExhausted { n, search_limit: params.budget }.into())
}

/// `σ↘X` for every `X`, as a map.
pub fn splice_map(sigma: BitString) -> CantorMap {
    CantorMap::new(format!("splice:{sigma}"), move |x| splice(&sigma, x))
}
