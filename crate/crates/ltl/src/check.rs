//! Implication and equivalence between formulas.
//!
//! `f` implies `g` iff `f & !g` has no model. The negation is built
//! syntactically and the conjunction goes through a single tableau, so no
//! automaton complementation is needed. Every counterexample is re-checked
//! with [`eval_on_lasso`] before it is returned.

use serde::Serialize;
use thiserror::Error;

use crate::buchi::ltl_to_buchi;
use crate::emptiness::{is_empty, Emptiness};
use crate::formula::Formula;
use crate::lasso::{eval_on_lasso, LassoTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("engine produced witness {witness} that does not satisfy {formula}")]
    InvalidWitness { formula: String, witness: String },
}

/// Satisfiability with a validated model.
pub fn find_model(f: &Formula) -> Result<Option<LassoTrace>, CheckError> {
    match is_empty(&ltl_to_buchi(f)) {
        Emptiness::Empty => Ok(None),
        Emptiness::NonEmpty(trace) => {
            if eval_on_lasso(f, &trace) {
                Ok(Some(trace))
            } else {
                Err(CheckError::InvalidWitness {
                    formula: f.to_string(),
                    witness: trace.to_string(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Implication {
    pub holds: bool,
    /// A word satisfying `f & !g` when the implication fails.
    pub witness: Option<LassoTrace>,
}

pub fn implies(f: &Formula, g: &Formula) -> Result<Implication, CheckError> {
    let difference = Formula::and(f.clone(), Formula::not(g.clone()));
    let witness = find_model(&difference)?;
    Ok(Implication {
        holds: witness.is_none(),
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VerdictKind {
    Equivalent,
    RefactoredImpliesOriginal,
    OriginalImpliesRefactored,
    Incomparable,
}

impl VerdictKind {
    /// Whether this verdict is at least as strong as `expected`: an
    /// `Equivalent` verdict satisfies any implication expectation.
    pub fn meets(self, expected: VerdictKind) -> bool {
        match expected {
            VerdictKind::Equivalent => self == VerdictKind::Equivalent,
            VerdictKind::Incomparable => true,
            other => self == other || self == VerdictKind::Equivalent,
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VerdictKind::Equivalent => "Equivalent",
            VerdictKind::RefactoredImpliesOriginal => "RefactoredImpliesOriginal",
            VerdictKind::OriginalImpliesRefactored => "OriginalImpliesRefactored",
            VerdictKind::Incomparable => "Incomparable",
        };
        f.write_str(s)
    }
}

/// Outcome of comparing a refactored formula with its original.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Satisfies `refactored & !original` (refactored does not imply original).
    pub refactored_only: Option<LassoTrace>,
    /// Satisfies `original & !refactored`.
    pub original_only: Option<LassoTrace>,
}

/// Runs both implication queries independently and names the result from
/// the refactoring's point of view.
pub fn check_equivalence(refactored: &Formula, original: &Formula) -> Result<Verdict, CheckError> {
    let forward = implies(refactored, original)?;
    let backward = implies(original, refactored)?;
    let kind = match (forward.holds, backward.holds) {
        (true, true) => VerdictKind::Equivalent,
        (true, false) => VerdictKind::RefactoredImpliesOriginal,
        (false, true) => VerdictKind::OriginalImpliesRefactored,
        (false, false) => VerdictKind::Incomparable,
    };
    Ok(Verdict {
        kind,
        refactored_only: forward.witness,
        original_only: backward.witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn stronger_response_implies_weaker() {
        let strong = parse("G (q -> a & b & c)");
        let weak = parse("G (q -> a)");
        assert!(implies(&strong, &weak).unwrap().holds);
        let back = implies(&weak, &strong).unwrap();
        assert!(!back.holds);
        let w = back.witness.unwrap();
        let bad = w
            .prefix()
            .iter()
            .chain(w.cycle())
            .any(|l| l.contains("q") && l.contains("a") && (!l.contains("b") || !l.contains("c")));
        assert!(bad, "{w}");
    }

    #[test]
    fn verdict_kinds() {
        let f = parse("G (c -> r)");
        assert_eq!(check_equivalence(&f, &f).unwrap().kind, VerdictKind::Equivalent);
        let v = check_equivalence(&parse("G p"), &parse("G q")).unwrap();
        assert_eq!(v.kind, VerdictKind::Incomparable);
        assert!(v.refactored_only.is_some() && v.original_only.is_some());
        let v = check_equivalence(&parse("G (c -> r & s)"), &parse("G (c -> r)")).unwrap();
        assert_eq!(v.kind, VerdictKind::RefactoredImpliesOriginal);
        assert!(v.refactored_only.is_none());
        let v = check_equivalence(&parse("G (c -> r)"), &parse("G (c -> r & s)")).unwrap();
        assert_eq!(v.kind, VerdictKind::OriginalImpliesRefactored);
    }

    #[test]
    fn meets_ordering() {
        use VerdictKind::*;
        assert!(Equivalent.meets(RefactoredImpliesOriginal));
        assert!(RefactoredImpliesOriginal.meets(RefactoredImpliesOriginal));
        assert!(!RefactoredImpliesOriginal.meets(Equivalent));
        assert!(!Incomparable.meets(RefactoredImpliesOriginal));
        assert!(!OriginalImpliesRefactored.meets(RefactoredImpliesOriginal));
    }
}
