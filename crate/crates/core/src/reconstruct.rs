//! Recovering all truth tables of a homeomorphism `Θ` from its first table
//! and the conjugate `Φ = Θ⁻¹∘S★∘Θ`.
//!
//! From `Θ∘Φ = S★∘Θ` we get `(π_n★∘Θ)∘Φ = π_{n+1}★∘Θ`: output `n+1` of `Θ`
//! is output `n` with `Φ` substituted into its inputs.

use crate::bits::Window;
use crate::tt::{HomeoPair, OutputTable, TruthTableFunctional, TtError, DEFAULT_MAX_USE};

/// Which conjugate of `S★` to build from a homeomorphism pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugateDirection {
    /// `Θ⁻¹∘S★∘Θ`, the input to [`reconstruct_tables`].
    InverseShiftForward,
    /// `Θ∘S★∘Θ⁻¹`.
    ForwardShiftInverse,
}

/// Tables of `Θ` produced one output at a time.
#[derive(Debug, Clone)]
pub struct ReconstructionState<'a> {
    phi: &'a TruthTableFunctional,
    tables: Vec<OutputTable>,
    max_use: usize,
}

impl<'a> ReconstructionState<'a> {
    pub fn new(phi: &'a TruthTableFunctional, table0: OutputTable) -> Self {
        Self { phi, tables: vec![table0], max_use: DEFAULT_MAX_USE }
    }

    pub fn with_max_use(mut self, max_use: usize) -> Self {
        self.max_use = max_use;
        self
    }

    /// Appends the next table.
    pub fn step(&mut self) -> Result<&OutputTable, TtError> {
        let last = self.tables.last().expect("state always holds table 0");
        let next = last.substitute(|p| self.phi.table(p), self.max_use)?;
        self.tables.push(next);
        Ok(self.tables.last().unwrap())
    }

    pub fn tables(&self) -> &[OutputTable] {
        &self.tables
    }

    pub fn into_tables(self) -> Vec<OutputTable> {
        self.tables
    }
}

/// Tables `0..upto` of `Θ`, given `Φ = Θ⁻¹∘S★∘Θ` and table 0.
pub fn reconstruct_tables(phi: &TruthTableFunctional, table0: OutputTable, upto: usize) -> Result<Vec<OutputTable>, TtError> {
    let mut state = ReconstructionState::new(phi, table0);
    while state.tables().len() < upto {
        state.step()?;
    }
    let mut tables = state.into_tables();
    tables.truncate(upto);
    Ok(tables)
}

/// Whether `Θ(Φ(X))` and `S★(Θ(X))` agree below the window for every `X`.
pub fn verify_conjugacy(theta: &HomeoPair, phi: &TruthTableFunctional, w: Window) -> Result<bool, TtError> {
    let forward = theta.forward();
    for n in 0..w.limit() {
        let lhs = forward.compose_at(phi, n, DEFAULT_MAX_USE)?;
        let rhs = forward.table(n + 1)?;
        if !lhs.equivalent(&rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The conjugate of `S★` by `Θ` in the requested direction, materialized on
/// outputs `0..upto`.
pub fn conjugate_shift(theta: &HomeoPair, upto: usize, direction: ConjugateDirection) -> Result<TruthTableFunctional, TtError> {
    let (outer, inner) = match direction {
        ConjugateDirection::InverseShiftForward => (theta.backward(), theta.forward()),
        ConjugateDirection::ForwardShiftInverse => (theta.forward(), theta.backward()),
    };
    // (S★∘inner) output p is inner's output p + 1.
    let outputs = (0..upto)
        .map(|n| {
            outer
                .table(n)?
                .substitute(|p| inner.table(p + 1), DEFAULT_MAX_USE)
        })
        .collect::<Result<_, _>>()?;
    Ok(TruthTableFunctional::from_tables(outputs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{conjugate_successor, FinSupPermutation};

    fn w(n: usize) -> Window {
        Window::new(n).unwrap()
    }

    fn implication(a: usize, b: usize) -> OutputTable {
        OutputTable::new(vec![a, b], vec![true, false, true, true]).unwrap()
    }

    #[test]
    fn identity_recursion_is_constant() {
        let id = TruthTableFunctional::identity();
        let tables = reconstruct_tables(&id, OutputTable::identity_at(0), 5).unwrap();
        assert!(tables.iter().all(|t| t == &OutputTable::identity_at(0)));
    }

    #[test]
    fn pair_and_example_tables() {
        let phi = TruthTableFunctional::pair_and();
        let tables = reconstruct_tables(&phi, implication(2, 3), 3).unwrap();
        assert_eq!(tables[1].uses(), &[4, 5, 6, 7]);
        assert_eq!(tables[1].render().as_deref(), Some("A(4)A(5) -> A(6)A(7)"));
        assert_eq!(tables[2].uses(), &(8..16).collect::<Vec<_>>()[..]);
        assert_eq!(
            tables[2].render().as_deref(),
            Some("A(8)A(9)A(10)A(11) -> A(12)A(13)A(14)A(15)")
        );
    }

    #[test]
    fn missing_table_propagates() {
        let phi = TruthTableFunctional::from_tables(vec![OutputTable::identity_at(1)]);
        assert_eq!(
            reconstruct_tables(&phi, OutputTable::identity_at(0), 3),
            Err(TtError::MissingTable(1))
        );
    }

    #[test]
    fn use_growth_is_capped() {
        let phi = TruthTableFunctional::pair_and();
        let mut state = ReconstructionState::new(&phi, implication(2, 3)).with_max_use(8);
        state.step().unwrap();
        state.step().unwrap();
        assert_eq!(state.step(), Err(TtError::UseTooLarge { size: 16, max: 8 }));
    }

    #[test]
    fn conjugate_shift_examples() {
        let id = HomeoPair::identity(w(4));
        let phi = conjugate_shift(&id, 4, ConjugateDirection::InverseShiftForward).unwrap();
        assert_eq!(phi, TruthTableFunctional::shift().materialize(4).unwrap().without_rule());

        let s05 = FinSupPermutation::swap(0, 5);
        let pair = HomeoPair::from_permutation(&s05, w(8)).unwrap();
        let phi = conjugate_shift(&pair, 8, ConjugateDirection::InverseShiftForward).unwrap();
        assert_eq!(phi.table(4).unwrap().uses(), &[0]);
        // Θ = Π_θ, so Θ⁻¹∘S★∘Θ = (θ∘S∘θ⁻¹)★, the successor conjugate of θ⁻¹.
        let k = conjugate_successor(&s05.inverse(), 8);
        for (n, &reads) in k.iter().enumerate() {
            assert_eq!(phi.table(n).unwrap().uses(), &[reads]);
        }

        let s01 = HomeoPair::from_permutation(&FinSupPermutation::swap(0, 1), w(4)).unwrap();
        let phi = conjugate_shift(&s01, 4, ConjugateDirection::InverseShiftForward).unwrap();
        assert_eq!(phi.table(1).unwrap().uses(), &[0]);
    }

    #[test]
    fn conjugacy_checks() {
        let id = HomeoPair::identity(w(4));
        assert!(verify_conjugacy(&id, &TruthTableFunctional::shift(), w(4)).unwrap());
        assert!(!verify_conjugacy(&id, &TruthTableFunctional::identity(), w(2)).unwrap());
        let pair = HomeoPair::from_permutation(&FinSupPermutation::swap(0, 5), w(8)).unwrap();
        let phi = conjugate_shift(&pair, 8, ConjugateDirection::InverseShiftForward).unwrap();
        assert!(verify_conjugacy(&pair, &phi, w(8)).unwrap());
    }

    #[test]
    fn round_trip_from_permutation() {
        let theta = FinSupPermutation::from_images(&[3, 0, 4, 1, 2]).unwrap();
        let pair = HomeoPair::from_permutation(&theta, w(10)).unwrap();
        let phi = conjugate_shift(&pair, 10, ConjugateDirection::InverseShiftForward).unwrap();
        let tables = reconstruct_tables(&phi, pair.forward().table(0).unwrap().into_owned(), 8).unwrap();
        for (n, t) in tables.iter().enumerate() {
            assert_eq!(t, pair.forward().table(n).unwrap().as_ref());
        }
    }
}
