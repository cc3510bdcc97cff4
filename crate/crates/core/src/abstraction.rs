//! Propositional abstraction of expression atoms.
//!
//! Atoms are identified by their canonical rendering, so `x>5` and `x > 5`
//! share a proposition while `x > 5` and `x >= 6` do not: there is no
//! arithmetic reasoning. Boolean variables and comparisons become `a1`,
//! `a2`, … in first-occurrence order; references keep their requirement id.

use indexmap::IndexMap;
use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use retune_ltl::Formula;

use crate::fretish::{render_atom, Atom, BoolExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error("atom map is frozen and has no entry for {0}")]
    UnseenAtom(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomMap {
    /// canonical atom text -> proposition
    entries: IndexMap<String, String>,
    frozen: bool,
    fresh: usize,
}

impl AtomMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// After freezing, unseen atoms are an error instead of a new entry.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(proposition, canonical atom)` pairs in assignment order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(atom, prop)| (prop.as_str(), atom.as_str()))
    }

    pub fn atom_of(&self, prop: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(_, p)| p.as_str() == prop)
            .map(|(a, _)| a.as_str())
    }

    pub fn prop_for(&mut self, atom: &Atom) -> Result<String, AbstractionError> {
        let key = render_atom(atom);
        if let Some(p) = self.entries.get(&key) {
            return Ok(p.clone());
        }
        if self.frozen {
            return Err(AbstractionError::UnseenAtom(key));
        }
        let prop = match atom {
            Atom::Reference(id) => id.clone(),
            _ => {
                self.fresh += 1;
                format!("a{}", self.fresh)
            }
        };
        self.entries.insert(key, prop.clone());
        Ok(prop)
    }

    pub fn formula(&mut self, e: &BoolExpr) -> Result<Formula, AbstractionError> {
        Ok(match e {
            BoolExpr::Atom(a) => Formula::prop(self.prop_for(a)?),
            BoolExpr::Not(a) => Formula::not(self.formula(a)?),
            BoolExpr::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            BoolExpr::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
        })
    }
}

/// Serialized as `{"a1": "x > 5", ...}` for audit trails.
impl Serialize for AtomMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.entries.len()))?;
        for (prop, atom) in self.entries() {
            m.serialize_entry(prop, atom)?;
        }
        m.end()
    }
}

/// Abstracts a family of expressions with one shared map.
pub fn propositionalize(exprs: &[BoolExpr]) -> (AtomMap, Vec<Formula>) {
    let mut map = AtomMap::new();
    let formulas = exprs
        .iter()
        .map(|e| map.formula(e).expect("unfrozen map accepts every atom"))
        .collect();
    (map, formulas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fretish::parse_expr;

    fn exprs(src: &[&str]) -> Vec<BoolExpr> {
        src.iter().map(|s| parse_expr(s).unwrap()).collect()
    }

    #[test]
    fn syntactic_identity() {
        let (map, fs) = propositionalize(&exprs(&["x>5 & x > 5"]));
        assert_eq!(map.len(), 1);
        assert_eq!(fs[0].to_string(), "a1 & a1");
    }

    #[test]
    fn no_arithmetic_reasoning() {
        let (map, fs) = propositionalize(&exprs(&["x>5", "x>=6"]));
        assert_eq!(map.len(), 2);
        assert_ne!(fs[0], fs[1]);
    }

    #[test]
    fn shared_across_inputs_and_references_keep_ids() {
        let (map, fs) = propositionalize(&exprs(&[
            "((sensorValue(S) > nominalValue+R) | (sensorValue(S) < nominalValue-R) | (sensorValue(S)=null)) & tpc",
            "(sensorValue(S)>nominalValue + R) | (sensorValue(S) < nominalValue - R) | (sensorValue(S) = null)",
            "SENSOR_FAULTS",
        ]));
        assert_eq!(fs[1].props().len(), 3);
        assert!(fs[1].props().is_subset(&fs[0].props()));
        assert_eq!(fs[2], Formula::prop("SENSOR_FAULTS"));
        assert_eq!(map.atom_of("a4"), Some("tpc"));
    }

    #[test]
    fn frozen_map_rejects_new_atoms() {
        let (mut map, _) = propositionalize(&exprs(&["a"]));
        map.freeze();
        assert!(map.formula(&parse_expr("a").unwrap()).is_ok());
        assert_eq!(
            map.formula(&parse_expr("b").unwrap()),
            Err(AbstractionError::UnseenAtom("b".into()))
        );
    }

    #[test]
    fn deterministic() {
        let input = exprs(&["p & (q | x > 1)", "r | p"]);
        assert_eq!(propositionalize(&input), propositionalize(&input));
    }
}
