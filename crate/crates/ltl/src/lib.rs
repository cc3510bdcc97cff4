//! Future-time linear temporal logic: formulas, an exact evaluator over
//! lasso-shaped words, a tableau translation to Büchi automata, and
//! implication/equivalence checks built on nested-DFS emptiness.

pub mod buchi;
pub mod check;
pub mod emptiness;
pub mod enumerate;
pub mod formula;
pub mod lasso;
pub mod nnf;
pub mod parse;

pub use buchi::{ltl_to_buchi, BuchiAutomaton, Edge, Guard};
pub use check::{check_equivalence, find_model, implies, CheckError, Implication, Verdict, VerdictKind};
pub use emptiness::{is_empty, Emptiness};
pub use enumerate::all_formulas;
pub use formula::Formula;
pub use lasso::{enumerate_lassos, eval_on_lasso, LassoError, LassoIter, LassoTrace, Letter};
pub use nnf::{is_nnf, to_core, to_nnf};
pub use parse::FormulaParseError;
