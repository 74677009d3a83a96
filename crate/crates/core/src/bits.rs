//! Finite binary strings, eventually periodic reals, and the tail relations
//! `=*_n` / `=*` on them.
//!
//! Positions are indexed from 0. In textual form the leftmost character is
//! position 0; an eventually periodic real is written `head|period`, so
//! `100|0` is the sequence `1 0 0 0 0 ...`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    BadChar(char),
    #[error("expected `head|period`, got {0:?}")]
    MissingSeparator(String),
    #[error("period of an eventually periodic real must be nonempty")]
    EmptyPeriod,
    #[error("window limit must be at least 1")]
    EmptyWindow,
}

/// A finite binary string `σ ∈ 2^{<ω}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The `len` low bits of `word`, least-significant bit at position 0.
    pub fn from_word(word: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        Self((0..len).map(|i| (word >> i) & 1 == 1).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    /// Sets position `i`, padding with zeros if `i` is past the end.
    pub fn set(&mut self, i: usize, bit: bool) {
        if i >= self.0.len() {
            self.0.resize(i + 1, false);
        }
        self.0[i] = bit;
    }

    pub fn extend_from_slice(&mut self, bits: &[bool]) {
        self.0.extend_from_slice(bits);
    }

    /// `self ⪯ other`.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len() <= other.len() && other.0[..self.len()] == self.0[..]
    }
}

pub fn is_prefix(sigma: &BitString, tau: &BitString) -> bool {
    sigma.is_prefix_of(tau)
}

impl FromStr for BitString {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseError::BadChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Bound for exhaustive checks: everything quantifies over positions or
/// strings below `limit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window(usize);

impl Window {
    pub fn new(limit: usize) -> Result<Self, ParseError> {
        if limit == 0 {
            return Err(ParseError::EmptyWindow);
        }
        Ok(Self(limit))
    }

    #[inline]
    pub fn limit(self) -> usize {
        self.0
    }
}

/// An element of Cantor space of the form `head · period^ω`.
///
/// Equality is extensional: `0|0` and `00|00` are the same real.
#[derive(Debug, Clone)]
pub struct EventuallyPeriodic {
    head: BitString,
    period: BitString,
}

impl EventuallyPeriodic {
    pub fn new(head: BitString, period: BitString) -> Result<Self, ParseError> {
        if period.is_empty() {
            return Err(ParseError::EmptyPeriod);
        }
        Ok(Self { head, period })
    }

    pub fn constant(bit: bool) -> Self {
        Self {
            head: BitString::empty(),
            period: BitString::from_bits(vec![bit]),
        }
    }

    pub fn zeros() -> Self {
        Self::constant(false)
    }

    pub fn ones() -> Self {
        Self::constant(true)
    }

    /// Characteristic function of a finite set of naturals.
    pub fn from_finite_set(members: &[usize]) -> Self {
        let mut head = BitString::empty();
        for &m in members {
            head.set(m, true);
        }
        Self {
            head,
            period: BitString::from_bits(vec![false]),
        }
    }

    /// Builds the real whose values at positions `0..len` are produced by
    /// `prefix` and which continues with `tail^ω` afterwards.
    pub fn with_tail(prefix: BitString, tail: bool) -> Self {
        Self {
            head: prefix,
            period: BitString::from_bits(vec![tail]),
        }
    }

    pub fn head(&self) -> &BitString {
        &self.head
    }

    pub fn period(&self) -> &BitString {
        &self.period
    }

    #[inline]
    pub fn at(&self, n: usize) -> bool {
        let h = self.head.len();
        if n < h {
            self.head.0[n]
        } else {
            self.period.0[(n - h) % self.period.len()]
        }
    }

    /// Position past which the sequence is purely periodic.
    pub fn preperiod(&self) -> usize {
        self.head.len()
    }

    pub fn prefix(&self, len: usize) -> BitString {
        BitString((0..len).map(|i| self.at(i)).collect())
    }

    /// Rebuilds a real from a pointwise rule, given that the rule is
    /// periodic with period `period_len` from position `start` on.
    pub fn tabulate(start: usize, period_len: usize, f: impl Fn(usize) -> bool) -> Self {
        debug_assert!(period_len > 0);
        Self {
            head: BitString((0..start).map(&f).collect()),
            period: BitString((start..start + period_len).map(&f).collect()),
        }
    }

    /// Copy of `self` with position `n` set to `bit`.
    pub fn with_bit(&self, n: usize, bit: bool) -> Self {
        let start = self.preperiod().max(n + 1);
        Self::tabulate(start, self.period.len(), |i| if i == n { bit } else { self.at(i) })
    }

    /// Least position holding a 1, if any.
    pub fn first_one(&self) -> Option<usize> {
        let span = self.head.len() + self.period.len();
        (0..span).find(|&i| self.at(i))
    }

    /// Least `n` such that everything from `n` on lies in one joint period
    /// of `self` and `other`, and the joint period length.
    fn joint_bound(&self, other: &Self) -> (usize, usize) {
        (
            self.preperiod().max(other.preperiod()),
            self.period.len().lcm(&other.period.len()),
        )
    }

    /// The canonical representation: shortest period, then shortest head.
    pub fn canonical(&self) -> Self {
        let p = self.period.len();
        let min_p = (1..=p)
            .filter(|&d| p.is_multiple_of(d))
            .find(|&d| (0..p).all(|i| self.period.0[i] == self.period.0[(i + d) % p]))
            .unwrap_or(p);
        let mut start = self.head.len();
        while start > 0 && self.at(start - 1) == self.at(start - 1 + min_p) {
            start -= 1;
        }
        Self::tabulate(start, min_p, |i| self.at(i))
    }
}

impl PartialEq for EventuallyPeriodic {
    /// Agreement on the first `|head₁| + |head₂| + lcm(|period₁|, |period₂|)`
    /// positions decides extensional equality.
    fn eq(&self, other: &Self) -> bool {
        let bound = self.head.len()
            + other.head.len()
            + self.period.len().lcm(&other.period.len());
        (0..bound).all(|i| self.at(i) == other.at(i))
    }
}

impl Eq for EventuallyPeriodic {}

impl FromStr for EventuallyPeriodic {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, period) = s
            .split_once('|')
            .ok_or_else(|| ParseError::MissingSeparator(s.to_string()))?;
        Self::new(head.parse()?, period.parse()?)
    }
}

impl fmt::Display for EventuallyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.head, self.period)
    }
}

/// `σ↘X`: `σ` on its domain, `X` beyond it.
pub fn splice(sigma: &BitString, x: &EventuallyPeriodic) -> EventuallyPeriodic {
    let start = sigma.len().max(x.preperiod());
    EventuallyPeriodic::tabulate(start, x.period.len(), |i| match sigma.get(i) {
        Some(b) => b,
        None => x.at(i),
    })
}

/// Number of positions below `w` where `x` and `y` disagree.
pub fn hamming_window(x: &EventuallyPeriodic, y: &EventuallyPeriodic, w: Window) -> usize {
    (0..w.limit()).filter(|&i| x.at(i) != y.at(i)).count()
}

/// `x =*_n y`: agreement on `[n, ∞)`.
pub fn eq_star_n(x: &EventuallyPeriodic, y: &EventuallyPeriodic, n: usize) -> bool {
    let (start, period) = x.joint_bound(y);
    (n..n.max(start) + period).all(|i| x.at(i) == y.at(i))
}

/// Least `n` with `x =*_n y`, or `None` when the tails never agree.
pub fn eq_star(x: &EventuallyPeriodic, y: &EventuallyPeriodic) -> Option<usize> {
    let (start, period) = x.joint_bound(y);
    if (start..start + period).any(|i| x.at(i) != y.at(i)) {
        return None;
    }
    Some((0..start).rev().find(|&i| x.at(i) != y.at(i)).map_or(0, |i| i + 1))
}
