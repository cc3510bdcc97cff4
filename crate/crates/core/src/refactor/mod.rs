//! Behaviour-checked refactorings over requirement sets.
//!
//! Every operation takes a set by reference and returns a new, validated
//! set, so a failure leaves the input untouched. Operations that can change
//! meaning also return [`Obligation`]s: pairs of LTL formulas (original and
//! refactored, with fragments inlined) plus the verdict they must reach.

mod catalog;
mod dedupe;
mod extract;
mod inline;
mod pullup;
mod rename;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use retune_ltl::{check_equivalence, CheckError, Formula, Verdict, VerdictKind};

use crate::abstraction::AtomMap;
use crate::fretish::{render_requirement, BoolExpr, Field, Requirement};
use crate::store::{RequirementSet, StoreError};
use crate::translate::{translate_pair, FragmentEnv, FragmentResolution, TranslateError};

pub use catalog::{apply_catalog, definition_sites, CatalogOptions, CatalogOutcome, CatalogStep};
pub use dedupe::{remove_redundant_children, Removal};
pub use extract::{extract_requirement, merge_part_definitions, ExtractOptions};
pub use inline::inline_requirement;
pub use pullup::pull_up_definition;
pub use rename::rename_requirement;

#[derive(Debug, Error)]
pub enum RefactorError {
    #[error("unknown requirement {0}")]
    UnknownRequirement(String),
    #[error("id {0} is already in use")]
    IdCollision(String),
    #[error("{0} is not a valid reference name (all caps, digits, underscores)")]
    InvalidReferenceId(String),
    #[error("selection {0} does not resolve to a subexpression")]
    InvalidSelection(Selection),
    #[error("no selections given")]
    NoSelections,
    #[error("selections overlap: {0} and {1}")]
    OverlappingSelections(Selection, Selection),
    #[error("selected subexpressions differ: {0} vs {1}")]
    SelectionsDiffer(String, String),
    #[error("an until stop condition and a condition must be extracted separately")]
    MixedTimingAndCondition,
    #[error("merging needs at least two distinct parts, found {0}")]
    TooFewParts(usize),
    #[error("flag {0} is already used outside the new fragment")]
    FlagInUse(String),
    #[error("{dest} is not a parent of {child}")]
    NotAParent { child: String, dest: String },
    #[error("source and destination are the same requirement")]
    SameRequirement,
    #[error("selection {0} is not a conjunct of its field")]
    NotAConjunct(Selection),
    #[error("cannot move a {field} subexpression into {dest}: {reason}")]
    FieldMismatch {
        field: Field,
        dest: String,
        reason: &'static str,
    },
    #[error("post-check failed: {0}")]
    PostCheck(String),
    #[error("{0} is not fragment-shaped (condition, single flag response, no timing)")]
    NotFragmentShaped(String),
    #[error("component of {requirement} is {found}, fragment {fragment} has {expected}")]
    ComponentMismatch {
        requirement: String,
        fragment: String,
        expected: String,
        found: String,
    },
    #[error("timing of {requirement} does not match fragment {fragment}")]
    TimingMismatch { requirement: String, fragment: String },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

/// A subexpression of one field of one requirement. The path picks child 0
/// (left or only operand) or 1 (right) at each step from the field root.
///
/// Text form: `ID:field[:path]`, e.g. `UC5_R_1.1:if:0.1`, with field one of
/// `when`, `if`, `until`, `response`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Selection {
    pub requirement: String,
    pub field: Field,
    pub path: Vec<usize>,
}

impl Selection {
    pub fn new(requirement: impl Into<String>, field: Field, path: Vec<usize>) -> Self {
        Selection {
            requirement: requirement.into(),
            field,
            path,
        }
    }

    /// The whole field.
    pub fn field(requirement: impl Into<String>, field: Field) -> Self {
        Selection::new(requirement, field, Vec::new())
    }

    pub fn resolve<'a>(&self, set: &'a RequirementSet) -> Result<&'a BoolExpr, RefactorError> {
        let req = set
            .get(&self.requirement)
            .ok_or_else(|| RefactorError::UnknownRequirement(self.requirement.clone()))?;
        req.field(self.field)
            .and_then(|e| e.at(&self.path))
            .ok_or_else(|| RefactorError::InvalidSelection(self.clone()))
    }

    /// Same field, and one path is a prefix of the other.
    fn overlaps(&self, other: &Selection) -> bool {
        self.requirement == other.requirement
            && self.field == other.field
            && (self.path.starts_with(&other.path) || other.path.starts_with(&self.path))
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.requirement, self.field)?;
        if !self.path.is_empty() {
            let p: Vec<String> = self.path.iter().map(|s| s.to_string()).collect();
            write!(f, ":{}", p.join("."))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad selection '{0}': expected ID:field[:path] with field when|if|until|response and path like 0.1")]
pub struct SelectionParseError(String);

impl FromStr for Selection {
    type Err = SelectionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SelectionParseError(s.to_string());
        let mut parts = s.split(':');
        let id = parts.next().filter(|p| !p.is_empty()).ok_or_else(err)?;
        let field = parts.next().and_then(Field::from_name).ok_or_else(err)?;
        let path = match parts.next() {
            None | Some("") => Vec::new(),
            Some(p) => p
                .split('.')
                .map(|step| match step {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    _ => Err(err()),
                })
                .collect::<Result<_, _>>()?,
        };
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(Selection::new(id, field, path))
    }
}

fn display_formula<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

/// A behaviour check attached to one refactored requirement.
#[derive(Debug, Clone, Serialize)]
pub struct Obligation {
    pub refactoring: String,
    pub original_id: String,
    pub refactored_id: String,
    #[serde(serialize_with = "display_formula")]
    pub original: Formula,
    #[serde(serialize_with = "display_formula")]
    pub refactored: Formula,
    pub expected: VerdictKind,
    pub atoms: AtomMap,
}

/// An obligation with its verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CheckedObligation {
    #[serde(flatten)]
    pub obligation: Obligation,
    pub verdict: Verdict,
    pub passed: bool,
}

/// How references are treated when building an obligation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resolution {
    /// Substitute fragment definitions (the behavioural check).
    #[default]
    Inline,
    /// Keep references as opaque propositions.
    AsAtom,
}

impl Obligation {
    /// Translates both requirements with fragments inlined from `env`.
    pub fn build(
        refactoring: &str,
        original: &Requirement,
        refactored: &Requirement,
        env: &FragmentEnv,
        expected: VerdictKind,
    ) -> Result<Self, TranslateError> {
        Self::build_with(refactoring, original, refactored, env, expected, Resolution::Inline)
    }

    pub fn build_with(
        refactoring: &str,
        original: &Requirement,
        refactored: &Requirement,
        env: &FragmentEnv,
        expected: VerdictKind,
        resolution: Resolution,
    ) -> Result<Self, TranslateError> {
        let res = match resolution {
            Resolution::Inline => FragmentResolution::Inline(env),
            Resolution::AsAtom => FragmentResolution::AsAtom(env),
        };
        let (atoms, f, g) = translate_pair(original, refactored, res)?;
        Ok(Obligation {
            refactoring: refactoring.to_string(),
            original_id: original.id.clone(),
            refactored_id: refactored.id.clone(),
            original: f,
            refactored: g,
            expected,
            atoms,
        })
    }

    pub fn check(&self) -> Result<CheckedObligation, CheckError> {
        let verdict = check_equivalence(&self.refactored, &self.original)?;
        Ok(CheckedObligation {
            passed: verdict.kind.meets(self.expected),
            verdict,
            obligation: self.clone(),
        })
    }
}

/// One obligation per requirement id present in both sets, sorted by id.
/// Fragments are looked up in `refactored` first, then in `original`.
pub fn compare_sets(
    original: &RequirementSet,
    refactored: &RequirementSet,
    expected: VerdictKind,
    resolution: Resolution,
) -> Result<Vec<Obligation>, TranslateError> {
    let env = FragmentEnv::layered(refactored, original);
    let mut ids: Vec<&str> = original.ids().filter(|id| refactored.contains(id)).collect();
    ids.sort_unstable();
    ids.into_iter()
        .map(|id| {
            Obligation::build_with(
                "compare",
                original.get(id).expect("listed"),
                refactored.get(id).expect("listed"),
                &env,
                expected,
                resolution,
            )
        })
        .collect()
}

/// Appends a change-log line to a requirement's rationale.
pub(crate) fn log_change(req: &mut Requirement, refactoring: &str, before: &str) {
    let after = render_requirement(req);
    let line = format!("[{refactoring}] before: {before} | after: {after}");
    if req.rationale.is_empty() {
        req.rationale = line;
    } else {
        req.rationale.push('\n');
        req.rationale.push_str(&line);
    }
}

pub(crate) fn add_dependency(req: &mut Requirement, id: &str) {
    if !req.depends.iter().any(|d| d == id) {
        req.depends.push(id.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_text_round_trip() {
        for s in ["UC5_R_1.1:if:0.1", "R1:response", "X:until:1", "A:when"] {
            let sel: Selection = s.parse().unwrap();
            assert_eq!(sel.to_string(), s);
        }
        assert_eq!(
            "UC5_R_1.1:if:0.1".parse::<Selection>().unwrap(),
            Selection::new("UC5_R_1.1", Field::IfClause, vec![0, 1])
        );
        for bad in ["", "R1", "R1:cond", "R1:if:2", "R1:if:0:1"] {
            assert!(bad.parse::<Selection>().is_err(), "{bad}");
        }
    }
}
