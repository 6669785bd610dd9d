//! Proof kernel, finite Kripke semantics and analyticity audit for hybrid
//! modal logic in natural deduction with a perspective-shifting term rule.

pub mod audit;
pub mod gen;
pub mod kernel;
pub mod semantics;
pub mod syntax;
pub mod theory;

pub use syntax::{Formula, Ident, Signature};
pub use theory::Theory;
