//! Executable versions of the constructions around Turing-degree
//! automorphisms induced by permutations of ω and by Cantor-space
//! homeomorphisms, checked exhaustively on bounded windows.
//!
//! * [`bits`]: finite strings, eventually periodic reals, splicing and the
//!   tail relations `=*_n`, `=*`.
//! * [`tt`]: truth-table functionals, composition by substitution, `f★`.
//! * [`perm`]: finite-support permutations and recovery of `θ⁻¹` from the
//!   successor conjugate `θ⁻¹∘S∘θ`.
//! * [`forcing`]: partial oracle functionals and candidate elimination.
//! * [`e0`]: uniform `E₀`-invariance, moduli, the min-drop map, and truth
//!   table extraction above a forcing condition.
//! * [`reconstruct`]: all tables of `Θ` from `Θ⁻¹∘S★∘Θ` and table 0.
//! * [`pipeline`]: end-to-end demos with JSON reports.

pub mod bits;
pub mod e0;
pub mod forcing;
pub mod perm;
pub mod pipeline;
pub mod reconstruct;
pub mod tt;

pub use bits::{BitString, EventuallyPeriodic, Window};
pub use perm::FinSupPermutation;
pub use tt::{HomeoPair, OutputTable, TruthTableFunctional};
