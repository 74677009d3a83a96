//! Truth-table functionals on Cantor space.
//!
//! Output `n` of a functional is an [`OutputTable`]: a strictly increasing
//! list of input positions (the *use*) and a Boolean table with one row per
//! assignment to those positions. Row index for an input `A` is
//! `Σ_i A(use[i]) · 2^i`, so `use[0]` is the least-significant selector bit.
//!
//! A functional stores finitely many tables and may carry a [`Rule`] that
//! generates the rest on demand.

use std::borrow::Cow;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{EventuallyPeriodic, Window};
use crate::perm::FinSupPermutation;

/// Largest use set a composed table may have; tables are built by full
/// enumeration of `2^|use|` rows.
pub const DEFAULT_MAX_USE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TtError {
    #[error("no truth table for output {0}")]
    MissingTable(usize),
    #[error("use set of size {size} exceeds the cap of {max} positions")]
    UseTooLarge { size: usize, max: usize },
    #[error("use list must be strictly increasing")]
    UsesNotIncreasing,
    #[error("table for a use of size {uses} must have {expected} rows, got {got}")]
    BadTableLength { uses: usize, expected: usize, got: usize },
    #[error("table entries must be 0 or 1, got {0}")]
    BadBit(u8),
    #[error("unknown generator rule {0:?}")]
    UnknownRule(String),
    #[error("forward and backward maps are not mutually inverse below {0}")]
    NotInverse(usize),
}

/// One output bit as a Boolean function of finitely many input positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OutputTableJson", into = "OutputTableJson")]
pub struct OutputTable {
    uses: Vec<usize>,
    table: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct OutputTableJson {
    #[serde(rename = "use")]
    uses: Vec<usize>,
    table: Vec<u8>,
}

impl TryFrom<OutputTableJson> for OutputTable {
    type Error = TtError;

    fn try_from(json: OutputTableJson) -> Result<Self, TtError> {
        let table = json
            .table
            .into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(TtError::BadBit(other)),
            })
            .collect::<Result<_, _>>()?;
        OutputTable::new(json.uses, table)
    }
}

impl From<OutputTable> for OutputTableJson {
    fn from(t: OutputTable) -> Self {
        Self {
            uses: t.uses,
            table: t.table.into_iter().map(u8::from).collect(),
        }
    }
}

impl OutputTable {
    pub fn new(uses: Vec<usize>, table: Vec<bool>) -> Result<Self, TtError> {
        if uses.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TtError::UsesNotIncreasing);
        }
        if uses.len() > DEFAULT_MAX_USE {
            return Err(TtError::UseTooLarge { size: uses.len(), max: DEFAULT_MAX_USE });
        }
        let expected = 1usize << uses.len();
        if table.len() != expected {
            return Err(TtError::BadTableLength { uses: uses.len(), expected, got: table.len() });
        }
        Ok(Self { uses, table })
    }

    /// Reads a single position and passes it through.
    pub fn identity_at(position: usize) -> Self {
        Self { uses: vec![position], table: vec![false, true] }
    }

    pub fn constant(bit: bool) -> Self {
        Self { uses: Vec::new(), table: vec![bit] }
    }

    /// Tabulates `f` over all assignments to `uses`; `f` sees the assignment
    /// in `uses` order.
    pub fn from_fn(uses: Vec<usize>, f: impl Fn(&[bool]) -> bool) -> Result<Self, TtError> {
        if uses.len() > DEFAULT_MAX_USE {
            return Err(TtError::UseTooLarge { size: uses.len(), max: DEFAULT_MAX_USE });
        }
        let k = uses.len();
        let mut assignment = vec![false; k];
        let table = (0..1usize << k)
            .map(|row| {
                for (i, slot) in assignment.iter_mut().enumerate() {
                    *slot = (row >> i) & 1 == 1;
                }
                f(&assignment)
            })
            .collect();
        Self::new(uses, table)
    }

    pub fn uses(&self) -> &[usize] {
        &self.uses
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn row_index(&self, input: impl Fn(usize) -> bool) -> usize {
        self.uses
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (usize::from(input(p)) << i))
    }

    #[inline]
    pub fn eval(&self, input: impl Fn(usize) -> bool) -> bool {
        self.table[self.row_index(input)]
    }

    /// Replaces every input position `p` by the table `inner(p)`, giving the
    /// table of `A ↦ self(inner(A))`. The composite use is the sorted union
    /// of the inner uses.
    pub fn substitute<'a, F>(&self, inner: F, max_use: usize) -> Result<OutputTable, TtError>
    where
        F: FnMut(usize) -> Result<Cow<'a, OutputTable>, TtError>,
    {
        let inners = self.uses.iter().copied().map(inner).collect::<Result<Vec<_>, _>>()?;
        let mut uses: Vec<usize> = inners.iter().flat_map(|t| t.uses.iter().copied()).collect();
        uses.sort_unstable();
        uses.dedup();
        if uses.len() > max_use {
            return Err(TtError::UseTooLarge { size: uses.len(), max: max_use });
        }
        // For each inner table, the slots of its uses inside the composite use.
        let slots: Vec<Vec<usize>> = inners
            .iter()
            .map(|t| t.uses.iter().map(|p| uses.binary_search(p).unwrap()).collect())
            .collect();
        let table = (0..1usize << uses.len())
            .map(|row| {
                let outer_row = inners.iter().zip(&slots).enumerate().fold(0, |acc, (i, (t, s))| {
                    let inner_row = s
                        .iter()
                        .enumerate()
                        .fold(0, |r, (j, &slot)| r | (((row >> slot) & 1) << j));
                    acc | (usize::from(t.table[inner_row]) << i)
                });
                self.table[outer_row]
            })
            .collect();
        Ok(OutputTable { uses, table })
    }

    /// Extensional equality: same value on every assignment to the union of
    /// both use sets.
    pub fn equivalent(&self, other: &OutputTable) -> bool {
        let mut uses: Vec<usize> = self.uses.iter().chain(&other.uses).copied().collect();
        uses.sort_unstable();
        uses.dedup();
        (0..1usize << uses.len()).all(|row| {
            let input = |p: usize| (row >> uses.binary_search(&p).unwrap()) & 1 == 1;
            self.eval(input) == other.eval(input)
        })
    }

    /// Whether flipping `uses[i]` changes the output on some row.
    pub fn depends_on_slot(&self, i: usize) -> bool {
        let bit = 1usize << i;
        (0..self.table.len()).any(|row| self.table[row] != self.table[row ^ bit])
    }

    /// Drops the positions the table does not depend on.
    pub fn pruned(&self) -> OutputTable {
        let keep: Vec<usize> = (0..self.uses.len()).filter(|&i| self.depends_on_slot(i)).collect();
        if keep.len() == self.uses.len() {
            return self.clone();
        }
        let uses = keep.iter().map(|&i| self.uses[i]).collect();
        let table = (0..1usize << keep.len())
            .map(|row| {
                let full = keep.iter().enumerate().fold(0, |acc, (j, &i)| acc | (((row >> j) & 1) << i));
                self.table[full]
            })
            .collect();
        OutputTable { uses, table }
    }

    /// Human-readable form for the recognised shapes: constants, a
    /// conjunction of all used positions (`A(4)A(5)`), or an implication
    /// between the conjunctions of a lower and an upper block of the use
    /// (`A(4)A(5) -> A(6)A(7)`).
    pub fn render(&self) -> Option<String> {
        let conj = |ps: &[usize]| {
            let mut s = String::new();
            for p in ps {
                let _ = write!(s, "A({p})");
            }
            s
        };
        let all = |row: usize, lo: usize, hi: usize| (lo..hi).all(|i| (row >> i) & 1 == 1);
        let k = self.uses.len();
        if self.table.iter().all(|&b| !b) {
            return Some("0".into());
        }
        if self.table.iter().all(|&b| b) {
            return Some("1".into());
        }
        if (0..self.table.len()).all(|row| self.table[row] == all(row, 0, k)) {
            return Some(conj(&self.uses));
        }
        (1..k)
            .find(|&split| {
                (0..self.table.len()).all(|row| self.table[row] == (!all(row, 0, split) || all(row, split, k)))
            })
            .map(|split| format!("{} -> {}", conj(&self.uses[..split]), conj(&self.uses[split..])))
    }
}

/// Generators for tables past the materialized prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Output `n` reads position `n`.
    Identity,
    /// Output `n` reads position `n + k`; `Shift(1)` is `S★`.
    Shift(usize),
    /// `Φ^A(n) = A(2n)·A(2n+1)`.
    PairAnd,
    /// Output `n` reads position `θ(n)`.
    Permute(FinSupPermutation),
}

impl Rule {
    pub fn table(&self, n: usize) -> OutputTable {
        match self {
            Rule::Identity => OutputTable::identity_at(n),
            Rule::Shift(k) => OutputTable::identity_at(n + k),
            Rule::PairAnd => OutputTable {
                uses: vec![2 * n, 2 * n + 1],
                table: vec![false, false, false, true],
            },
            Rule::Permute(theta) => OutputTable::identity_at(theta.apply(n)),
        }
    }

    /// Name used in the JSON form; permutation rules have none.
    pub fn name(&self) -> Option<&'static str> {
        match self {
            Rule::Identity => Some("identity"),
            Rule::Shift(1) => Some("shift"),
            Rule::PairAnd => Some("pair-and"),
            Rule::Shift(_) | Rule::Permute(_) => None,
        }
    }

    pub fn from_name(name: &str) -> Result<Self, TtError> {
        match name {
            "identity" => Ok(Rule::Identity),
            "shift" => Ok(Rule::Shift(1)),
            "pair-and" => Ok(Rule::PairAnd),
            other => Err(TtError::UnknownRule(other.to_string())),
        }
    }
}

/// A total continuous map `2^ω → 2^ω` with finite use at every output.
///
/// JSON form: `{"outputs":[{"use":[2,3],"table":[1,1,0,1]}], "rule":"pair-and"}`,
/// where `rule` is optional. Permutation rules are not representable in JSON
/// and are dropped on serialization, keeping only the materialized tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FunctionalJson", into = "FunctionalJson")]
pub struct TruthTableFunctional {
    outputs: Vec<OutputTable>,
    rule: Option<Rule>,
}

#[derive(Serialize, Deserialize)]
struct FunctionalJson {
    #[serde(default)]
    outputs: Vec<OutputTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
}

impl TryFrom<FunctionalJson> for TruthTableFunctional {
    type Error = TtError;

    fn try_from(json: FunctionalJson) -> Result<Self, TtError> {
        let rule = json.rule.as_deref().map(Rule::from_name).transpose()?;
        Ok(Self { outputs: json.outputs, rule })
    }
}

impl From<TruthTableFunctional> for FunctionalJson {
    fn from(f: TruthTableFunctional) -> Self {
        Self {
            rule: f.rule.as_ref().and_then(Rule::name).map(str::to_string),
            outputs: f.outputs,
        }
    }
}

impl TruthTableFunctional {
    pub fn new(outputs: Vec<OutputTable>, rule: Option<Rule>) -> Self {
        Self { outputs, rule }
    }

    pub fn from_tables(outputs: Vec<OutputTable>) -> Self {
        Self { outputs, rule: None }
    }

    pub fn from_rule(rule: Rule) -> Self {
        Self { outputs: Vec::new(), rule: Some(rule) }
    }

    pub fn identity() -> Self {
        Self::from_rule(Rule::Identity)
    }

    /// `S★`: `A ↦ (n ↦ A(n+1))`.
    pub fn shift() -> Self {
        Self::from_rule(Rule::Shift(1))
    }

    pub fn pair_and() -> Self {
        Self::from_rule(Rule::PairAnd)
    }

    /// The materialized tables alone, with any generator rule dropped.
    pub fn without_rule(&self) -> Self {
        Self { outputs: self.outputs.clone(), rule: None }
    }

    /// Number of materialized tables.
    pub fn arity(&self) -> usize {
        self.outputs.len()
    }

    pub fn rule(&self) -> Option<&Rule> {
        self.rule.as_ref()
    }

    pub fn outputs(&self) -> &[OutputTable] {
        &self.outputs
    }

    pub fn table(&self, n: usize) -> Result<Cow<'_, OutputTable>, TtError> {
        if let Some(t) = self.outputs.get(n) {
            return Ok(Cow::Borrowed(t));
        }
        self.rule
            .as_ref()
            .map(|r| Cow::Owned(r.table(n)))
            .ok_or(TtError::MissingTable(n))
    }

    /// Copy with tables `0..upto` stored explicitly.
    pub fn materialize(&self, upto: usize) -> Result<Self, TtError> {
        let mut outputs = self.outputs.clone();
        for n in outputs.len()..upto {
            outputs.push(self.table(n)?.into_owned());
        }
        Ok(Self { outputs, rule: self.rule.clone() })
    }

    pub fn apply_with(&self, n: usize, input: impl Fn(usize) -> bool) -> Result<bool, TtError> {
        Ok(self.table(n)?.eval(input))
    }

    /// `f^X(n)`.
    pub fn apply(&self, x: &EventuallyPeriodic, n: usize) -> Result<bool, TtError> {
        self.apply_with(n, |p| x.at(p))
    }

    /// Output `n` of `self ∘ inner`.
    pub fn compose_at(&self, inner: &TruthTableFunctional, n: usize, max_use: usize) -> Result<OutputTable, TtError> {
        self.table(n)?.substitute(|p| inner.table(p), max_use)
    }
}

pub fn tt_apply(f: &TruthTableFunctional, x: &EventuallyPeriodic, n: usize) -> Result<bool, TtError> {
    f.apply(x, n)
}

/// `g ∘ f` on outputs `0..upto`, by substitution.
pub fn tt_compose(g: &TruthTableFunctional, f: &TruthTableFunctional, upto: usize) -> Result<TruthTableFunctional, TtError> {
    let outputs = (0..upto)
        .map(|n| g.compose_at(f, n, DEFAULT_MAX_USE))
        .collect::<Result<_, _>>()?;
    Ok(TruthTableFunctional::from_tables(outputs))
}

/// `f★(A)(n) = A(f(n))` on outputs `0..upto`.
pub fn star_of_function(f: impl Fn(usize) -> usize, upto: usize) -> TruthTableFunctional {
    TruthTableFunctional::from_tables((0..upto).map(|n| OutputTable::identity_at(f(n))).collect())
}

/// `Π_θ(A) = A∘θ`, materialized below `upto` and rule-generated beyond.
pub fn from_permutation(theta: &FinSupPermutation, upto: usize) -> TruthTableFunctional {
    let rule = Rule::Permute(theta.clone());
    let outputs = (0..upto).map(|n| rule.table(n)).collect();
    TruthTableFunctional::new(outputs, Some(rule))
}

/// Whether both `bwd∘fwd` and `fwd∘bwd` read back output `n` unchanged for
/// every `n` below the window.
pub fn verify_homeo_pair(fwd: &TruthTableFunctional, bwd: &TruthTableFunctional, w: Window) -> Result<bool, TtError> {
    for n in 0..w.limit() {
        let id = OutputTable::identity_at(n);
        for (outer, inner) in [(bwd, fwd), (fwd, bwd)] {
            if !outer.compose_at(inner, n, DEFAULT_MAX_USE)?.equivalent(&id) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A homeomorphism `Θ` with its inverse, checked on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomeoPair {
    forward: TruthTableFunctional,
    backward: TruthTableFunctional,
    verified_window: Window,
}

impl HomeoPair {
    pub fn new(forward: TruthTableFunctional, backward: TruthTableFunctional, w: Window) -> Result<Self, TtError> {
        if !verify_homeo_pair(&forward, &backward, w)? {
            return Err(TtError::NotInverse(w.limit()));
        }
        Ok(Self { forward, backward, verified_window: w })
    }

    pub fn from_permutation(theta: &FinSupPermutation, w: Window) -> Result<Self, TtError> {
        Self::new(
            from_permutation(theta, w.limit()),
            from_permutation(&theta.inverse(), w.limit()),
            w,
        )
    }

    pub fn identity(w: Window) -> Self {
        Self {
            forward: TruthTableFunctional::identity(),
            backward: TruthTableFunctional::identity(),
            verified_window: w,
        }
    }

    pub fn forward(&self) -> &TruthTableFunctional {
        &self.forward
    }

    pub fn backward(&self) -> &TruthTableFunctional {
        &self.backward
    }

    pub fn verified_window(&self) -> Window {
        self.verified_window
    }

    pub fn inverse(&self) -> Self {
        Self {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            verified_window: self.verified_window,
        }
    }
}
