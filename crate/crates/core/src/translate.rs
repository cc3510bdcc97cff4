//! Requirement → future-time LTL.
//!
//! With `C` the conjunction of the present condition clauses, `R` the
//! response and `S` the `until` stop condition:
//!
//! | shape              | formula          |
//! |--------------------|------------------|
//! | `C shall R`        | `G (C -> R)`     |
//! | `C shall until S R`| `G (C -> R W S)` |
//! | no condition       | `G R`, `G (R W S)` |
//!
//! Weak until keeps the obligation alive forever if the stop condition never
//! arrives. The trigger is every state satisfying `C`, not its rising edge.

use std::collections::HashMap;

use indexmap::IndexMap;
use thiserror::Error;

use retune_ltl::Formula;

use crate::abstraction::{AbstractionError, AtomMap};
use crate::fretish::{Atom, BoolExpr, Requirement};
use crate::store::RequirementSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("reference to unknown requirement {0}")]
    UnresolvedReference(String),
    #[error("referenced requirement {0} is not fragment-shaped (condition, single flag response, no timing)")]
    NotFragmentShaped(String),
    #[error("reference cycle through {}", .0.join(" -> "))]
    ReferenceCycle(Vec<String>),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
}

/// How a Reference atom is interpreted.
#[derive(Debug, Clone, Copy)]
pub enum FragmentResolution<'a> {
    /// A Reference is an opaque proposition named by its id. Placeholder
    /// flags of known fragments map to the same proposition.
    AsAtom(&'a FragmentEnv),
    /// A Reference stands for the fragment's condition, substituted
    /// recursively. Placeholder flags are substituted the same way.
    Inline(&'a FragmentEnv),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct FragmentEntry {
    condition: BoolExpr,
    flag: String,
}

/// The fragment requirements visible to translation: every requirement
/// that is referenced or named in the catalog and has fragment shape.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FragmentEnv {
    fragments: IndexMap<String, FragmentEntry>,
    flags: HashMap<String, String>,
    misshapen: Vec<String>,
    known: Vec<String>,
}

/// Condition, a single boolean-variable response, and no timing.
pub fn is_fragment_shaped(req: &Requirement) -> bool {
    !req.condition.is_empty()
        && req.timing.is_none()
        && matches!(req.response, BoolExpr::Atom(Atom::BooleanVar(_)))
}

impl FragmentEnv {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_set(set: &RequirementSet) -> Self {
        let mut env = FragmentEnv::default();
        env.add_set(set);
        env
    }

    /// Fragments of `primary`, then any further ones found only in
    /// `fallback` (typically the set before a refactoring).
    pub fn layered(primary: &RequirementSet, fallback: &RequirementSet) -> Self {
        let mut env = FragmentEnv::default();
        env.add_set(primary);
        env.add_set(fallback);
        env
    }

    fn add_set(&mut self, set: &RequirementSet) {
        let mut candidates: Vec<&str> = Vec::new();
        for r in set.iter() {
            for id in r.references() {
                if let Some(t) = set.get(&id) {
                    if !candidates.contains(&t.id.as_str()) {
                        candidates.push(t.id.as_str());
                    }
                }
            }
        }
        for f in set.catalog() {
            if let Some(t) = set.get(&f.id) {
                if !candidates.contains(&t.id.as_str()) {
                    candidates.push(t.id.as_str());
                }
            }
        }
        for id in set.ids() {
            if !self.known.iter().any(|k| k == id) {
                self.known.push(id.to_string());
            }
        }
        for id in candidates {
            if self.fragments.contains_key(id) || self.misshapen.iter().any(|m| m == id) {
                continue;
            }
            let req = set.get(id).expect("candidate exists");
            if !is_fragment_shaped(req) {
                self.misshapen.push(id.to_string());
                continue;
            }
            let BoolExpr::Atom(Atom::BooleanVar(flag)) = &req.response else {
                unreachable!("fragment shape checked")
            };
            self.flags.entry(flag.clone()).or_insert_with(|| id.to_string());
            self.fragments.insert(
                id.to_string(),
                FragmentEntry {
                    condition: req.condition.conjoined().expect("fragment has a condition"),
                    flag: flag.clone(),
                },
            );
        }
    }

    pub fn fragment_ids(&self) -> impl Iterator<Item = &str> {
        self.fragments.keys().map(String::as_str)
    }

    pub fn condition(&self, id: &str) -> Option<&BoolExpr> {
        self.fragments.get(id).map(|f| &f.condition)
    }

    /// The fragment whose response flag is `var`, if any.
    pub fn fragment_for_flag(&self, var: &str) -> Option<&str> {
        self.flags.get(var).map(String::as_str)
    }

    fn lookup(&self, id: &str) -> Result<&BoolExpr, TranslateError> {
        if let Some(f) = self.fragments.get(id) {
            return Ok(&f.condition);
        }
        if self.misshapen.iter().any(|m| m == id) || self.known.iter().any(|k| k == id) {
            return Err(TranslateError::NotFragmentShaped(id.to_string()));
        }
        Err(TranslateError::UnresolvedReference(id.to_string()))
    }
}

/// Replaces every Reference (and fragment flag) by the fragment's
/// condition until the expression is reference-free.
pub fn substitute_references(expr: &BoolExpr, env: &FragmentEnv) -> Result<BoolExpr, TranslateError> {
    fn go(e: &BoolExpr, env: &FragmentEnv, stack: &mut Vec<String>) -> Result<BoolExpr, TranslateError> {
        e.map_atoms(&mut |a| {
            let id = match a {
                Atom::Reference(id) => id.as_str(),
                Atom::BooleanVar(v) => match env.fragment_for_flag(v) {
                    Some(id) => id,
                    None => return Ok(BoolExpr::Atom(a.clone())),
                },
                Atom::Comparison { .. } => return Ok(BoolExpr::Atom(a.clone())),
            };
            if stack.iter().any(|s| s == id) {
                let mut cycle = stack.clone();
                cycle.push(id.to_string());
                return Err(TranslateError::ReferenceCycle(cycle));
            }
            let cond = env.lookup(id)?;
            stack.push(id.to_string());
            let out = go(cond, env, stack);
            stack.pop();
            out
        })
    }
    go(expr, env, &mut Vec::new())
}

fn resolve(e: &BoolExpr, res: FragmentResolution<'_>) -> Result<BoolExpr, TranslateError> {
    match res {
        FragmentResolution::Inline(env) => substitute_references(e, env),
        FragmentResolution::AsAtom(env) => e.map_atoms(&mut |a| {
            Ok(match a {
                Atom::BooleanVar(v) => match env.fragment_for_flag(v) {
                    Some(id) => BoolExpr::reference(id),
                    None => BoolExpr::Atom(a.clone()),
                },
                _ => BoolExpr::Atom(a.clone()),
            })
        }),
    }
}

/// Translates one requirement, abstracting atoms through `atoms`.
pub fn translate(
    req: &Requirement,
    res: FragmentResolution<'_>,
    atoms: &mut AtomMap,
) -> Result<Formula, TranslateError> {
    let condition = req
        .condition
        .conjoined()
        .map(|c| resolve(&c, res))
        .transpose()?;
    let response = resolve(&req.response, res)?;
    let stop = req
        .timing
        .as_ref()
        .map(|t| resolve(t.stop(), res))
        .transpose()?;

    let c = condition.map(|c| atoms.formula(&c)).transpose()?;
    let r = atoms.formula(&response)?;
    let body = match stop {
        Some(s) => Formula::weak_until(r, atoms.formula(&s)?),
        None => r,
    };
    Ok(Formula::globally(match c {
        Some(c) => Formula::implies(c, body),
        None => body,
    }))
}

/// Translates an original/refactored pair with one shared atom map; the
/// original's atoms are named first.
pub fn translate_pair(
    original: &Requirement,
    refactored: &Requirement,
    res: FragmentResolution<'_>,
) -> Result<(AtomMap, Formula, Formula), TranslateError> {
    let mut atoms = AtomMap::new();
    let f = translate(original, res, &mut atoms)?;
    let g = translate(refactored, res, &mut atoms)?;
    atoms.freeze();
    Ok((atoms, f, g))
}
