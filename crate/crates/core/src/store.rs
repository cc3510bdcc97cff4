//! Validated requirement sets and their JSON file format.
//!
//! ```json
//! {"requirements": [{"id": "...", "parents": [], "depends": [], "text": "...", "rationale": "..."}],
//!  "fragments": [{"id": "SENSOR_FAULTS", "label": "F1", "name": "Sensor Faults",
//!                 "placeholder": "sensorFaults", "definition": ["..."]}]}
//! ```
//!
//! `text` is the canonical FRETISH rendering; the AST is rebuilt on load.
//! The optional fragment catalog names the repeated concepts of a set. A
//! `depends` entry may name a requirement or a catalog fragment, so a set can
//! declare its dependencies before the fragments are extracted.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fretish::{
    is_reference_name, parse_expr, parse_requirement, render_expr, render_requirement, BoolExpr,
    ParseError, Requirement,
};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("requirement {id}: {source}")]
    Parse {
        id: String,
        #[source]
        source: ParseError,
    },
    #[error("fragment {id}: bad definition: {source}")]
    BadFragment {
        id: String,
        #[source]
        source: ParseError,
    },
    #[error("fragment {0} has an empty definition")]
    EmptyFragment(String),
    #[error("fragment id {0} is not an all-caps reference name")]
    BadFragmentId(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("requirement {id} names unknown parent {parent}")]
    UnresolvedParent { id: String, parent: String },
    #[error("requirement {id} depends on unknown {target}")]
    UnresolvedDependency { id: String, target: String },
    #[error("requirement {id} references unknown requirement {target}")]
    UnresolvedReference { id: String, target: String },
    #[error("requirement {id} references {target} but does not list it in depends")]
    UndeclaredReference { id: String, target: String },
    #[error("requirement {0} lists itself as a parent or dependency")]
    SelfLink(String),
    #[error("requirement {0} has an empty component")]
    EmptyComponent(String),
    #[error("reference cycle: {}", .0.join(" -> "))]
    ReferenceCycle(Vec<String>),
    #[error("unknown requirement {0}")]
    UnknownRequirement(String),
}

/// A catalog entry: a repeated concept and the expression(s) defining it.
/// Several parts mean the definition is spread over requirements and is
/// their conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub id: String,
    pub label: String,
    pub name: String,
    /// Boolean variable standing for the fragment in abstract requirements.
    pub placeholder: Option<String>,
    pub parts: Vec<BoolExpr>,
}

impl Fragment {
    pub fn definition(&self) -> BoolExpr {
        BoolExpr::and_all(self.parts.iter().cloned()).expect("validated non-empty")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RequirementSet {
    requirements: IndexMap<String, Requirement>,
    catalog: Vec<Fragment>,
}

#[derive(Serialize, Deserialize)]
struct FileSet {
    requirements: Vec<FileRequirement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    fragments: Vec<FileFragment>,
}

#[derive(Serialize, Deserialize)]
struct FileRequirement {
    id: String,
    #[serde(default)]
    parents: Vec<String>,
    #[serde(default)]
    depends: Vec<String>,
    text: String,
    #[serde(default)]
    rationale: String,
}

#[derive(Serialize, Deserialize)]
struct FileFragment {
    id: String,
    #[serde(default)]
    label: String,
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    placeholder: Option<String>,
    definition: Vec<String>,
}

impl RequirementSet {
    /// Builds and validates a set.
    pub fn new(
        requirements: impl IntoIterator<Item = Requirement>,
        catalog: Vec<Fragment>,
    ) -> Result<Self, StoreError> {
        let mut map = IndexMap::new();
        for r in requirements {
            if map.contains_key(&r.id) {
                return Err(StoreError::DuplicateId(r.id));
            }
            map.insert(r.id.clone(), r);
        }
        let set = RequirementSet {
            requirements: map,
            catalog,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn from_json(text: &str) -> Result<Self, StoreError> {
        let file: FileSet = serde_json::from_str(text)?;
        let mut reqs = Vec::with_capacity(file.requirements.len());
        for fr in file.requirements {
            let mut r = parse_requirement(&fr.text).map_err(|source| StoreError::Parse {
                id: fr.id.clone(),
                source,
            })?;
            r.id = fr.id;
            r.parents = fr.parents;
            r.depends = fr.depends;
            r.rationale = fr.rationale;
            reqs.push(r);
        }
        let mut catalog = Vec::with_capacity(file.fragments.len());
        for ff in file.fragments {
            let parts = ff
                .definition
                .iter()
                .map(|d| parse_expr(d))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| StoreError::BadFragment {
                    id: ff.id.clone(),
                    source,
                })?;
            catalog.push(Fragment {
                id: ff.id,
                label: ff.label,
                name: ff.name,
                placeholder: ff.placeholder,
                parts,
            });
        }
        RequirementSet::new(reqs, catalog)
    }

    /// Pretty JSON with stable key order.
    pub fn to_json(&self) -> String {
        let file = FileSet {
            requirements: self
                .requirements
                .values()
                .map(|r| FileRequirement {
                    id: r.id.clone(),
                    parents: r.parents.clone(),
                    depends: r.depends.clone(),
                    text: render_requirement(r),
                    rationale: r.rationale.clone(),
                })
                .collect(),
            fragments: self
                .catalog
                .iter()
                .map(|f| FileFragment {
                    id: f.id.clone(),
                    label: f.label.clone(),
                    name: f.name.clone(),
                    placeholder: f.placeholder.clone(),
                    definition: f.parts.iter().map(render_expr).collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Requirement> {
        self.requirements.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.requirements.contains_key(id)
    }

    /// Requirements in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Requirement> {
        self.requirements.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.requirements.keys().map(String::as_str)
    }

    pub fn catalog(&self) -> &[Fragment] {
        &self.catalog
    }

    pub fn catalog_entry(&self, id: &str) -> Option<&Fragment> {
        self.catalog.iter().find(|f| f.id == id)
    }

    /// Requirements listing `id` as a parent, in insertion order.
    pub fn children_of(&self, id: &str) -> Result<Vec<&Requirement>, StoreError> {
        if !self.contains(id) {
            return Err(StoreError::UnknownRequirement(id.to_string()));
        }
        Ok(self
            .iter()
            .filter(|r| r.parents.iter().any(|p| p == id))
            .collect())
    }

    /// Requirements whose body references `id`.
    pub fn referencing(&self, id: &str) -> Vec<&Requirement> {
        self.iter()
            .filter(|r| r.references().iter().any(|x| x == id))
            .collect()
    }

    pub(crate) fn get_mut(&mut self, id: &str) -> Option<&mut Requirement> {
        self.requirements.get_mut(id)
    }

    pub(crate) fn iter_mut(&mut self) -> impl Iterator<Item = &mut Requirement> {
        self.requirements.values_mut()
    }

    pub(crate) fn push(&mut self, req: Requirement) -> Result<(), StoreError> {
        if self.requirements.contains_key(&req.id) {
            return Err(StoreError::DuplicateId(req.id));
        }
        self.requirements.insert(req.id.clone(), req);
        Ok(())
    }

    pub(crate) fn remove(&mut self, id: &str) -> Option<Requirement> {
        self.requirements.shift_remove(id)
    }

    pub(crate) fn catalog_mut(&mut self) -> &mut Vec<Fragment> {
        &mut self.catalog
    }

    /// Re-keys a requirement in place, keeping its position.
    pub(crate) fn rekey(&mut self, old: &str, new: &str) {
        if let Some(idx) = self.requirements.get_index_of(old) {
            let (_, mut req) = self.requirements.shift_remove_index(idx).expect("index exists");
            req.id = new.to_string();
            self.requirements.shift_insert(idx, new.to_string(), req);
        }
    }

    /// Checks every set invariant.
    pub fn validate(&self) -> Result<(), StoreError> {
        let mut catalog_ids = HashSet::new();
        for f in &self.catalog {
            if !is_reference_name(&f.id) {
                return Err(StoreError::BadFragmentId(f.id.clone()));
            }
            if f.parts.is_empty() {
                return Err(StoreError::EmptyFragment(f.id.clone()));
            }
            if !catalog_ids.insert(f.id.as_str()) {
                return Err(StoreError::DuplicateId(f.id.clone()));
            }
        }
        for r in self.iter() {
            if r.component.trim().is_empty() {
                return Err(StoreError::EmptyComponent(r.id.clone()));
            }
            for p in &r.parents {
                if *p == r.id {
                    return Err(StoreError::SelfLink(r.id.clone()));
                }
                if !self.contains(p) {
                    return Err(StoreError::UnresolvedParent {
                        id: r.id.clone(),
                        parent: p.clone(),
                    });
                }
            }
            for d in &r.depends {
                if *d == r.id {
                    return Err(StoreError::SelfLink(r.id.clone()));
                }
                if !self.contains(d) && !catalog_ids.contains(d.as_str()) {
                    return Err(StoreError::UnresolvedDependency {
                        id: r.id.clone(),
                        target: d.clone(),
                    });
                }
            }
            for target in r.references() {
                if !self.contains(&target) {
                    return Err(StoreError::UnresolvedReference {
                        id: r.id.clone(),
                        target,
                    });
                }
                if !r.depends.contains(&target) {
                    return Err(StoreError::UndeclaredReference {
                        id: r.id.clone(),
                        target,
                    });
                }
            }
        }
        if let Some(cycle) = self.reference_cycle() {
            return Err(StoreError::ReferenceCycle(cycle));
        }
        Ok(())
    }

    fn reference_cycle(&self) -> Option<Vec<String>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        fn visit(
            set: &RequirementSet,
            id: &str,
            marks: &mut HashMap<String, Mark>,
            stack: &mut Vec<String>,
        ) -> Option<Vec<String>> {
            match marks.get(id) {
                Some(Mark::Done) => return None,
                Some(Mark::Open) => {
                    let start = stack.iter().position(|s| s == id).unwrap_or(0);
                    let mut cycle = stack[start..].to_vec();
                    cycle.push(id.to_string());
                    return Some(cycle);
                }
                None => {}
            }
            marks.insert(id.to_string(), Mark::Open);
            stack.push(id.to_string());
            if let Some(r) = set.get(id) {
                for t in r.references() {
                    if let Some(c) = visit(set, &t, marks, stack) {
                        return Some(c);
                    }
                }
            }
            stack.pop();
            marks.insert(id.to_string(), Mark::Done);
            None
        }
        let mut marks = HashMap::new();
        for id in self.ids() {
            if let Some(c) = visit(self, id, &mut marks, &mut Vec::new()) {
                return Some(c);
            }
        }
        None
    }
}

pub fn load_set(path: impl AsRef<Path>) -> Result<RequirementSet, StoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RequirementSet::from_json(&text)
}

pub fn save_set(set: &RequirementSet, path: impl AsRef<Path>) -> Result<(), StoreError> {
    let path = path.as_ref();
    fs::write(path, set.to_json()).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(json: &str) -> Result<RequirementSet, StoreError> {
        RequirementSet::from_json(json)
    }

    #[test]
    fn round_trip() {
        let s = set(r#"{"requirements": [
            {"id": "P", "text": "if (a) C shall (b)", "rationale": "top"},
            {"id": "P.1", "parents": ["P"], "depends": ["FRAG"], "text": "if (FRAG & x>1) C shall (b)"},
            {"id": "FRAG", "text": "if (q | r) C shall (frag)"}
        ]}"#)
        .unwrap();
        let again = set(&s.to_json()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.to_json(), again.to_json());
        assert_eq!(s.children_of("P").unwrap().len(), 1);
        assert!(s.children_of("P.1").unwrap().is_empty());
        assert!(matches!(s.children_of("nope"), Err(StoreError::UnknownRequirement(_))));
    }

    #[test]
    fn unresolved_parent() {
        let e = set(r#"{"requirements": [{"id": "UC5_R_9.1", "parents": ["UC5_R_9"], "text": "C shall (x)"}]}"#)
            .unwrap_err();
        assert!(matches!(e, StoreError::UnresolvedParent { .. }), "{e}");
    }

    #[test]
    fn reference_cycle() {
        let e = set(r#"{"requirements": [
            {"id": "A", "depends": ["B"], "text": "if (B) C shall (a)"},
            {"id": "B", "depends": ["A"], "text": "if (A) C shall (b)"}
        ]}"#)
        .unwrap_err();
        assert!(matches!(e, StoreError::ReferenceCycle(_)), "{e}");
    }

    #[test]
    fn other_errors() {
        assert!(matches!(
            set(r#"{"requirements": [{"id": "A", "text": "C shall (x)"}, {"id": "A", "text": "C shall (y)"}]}"#),
            Err(StoreError::DuplicateId(_))
        ));
        assert!(matches!(
            set(r#"{"requirements": [{"id": "A", "text": "if (B) C shall (x)"}, {"id": "B", "text": "if (z) C shall (y)"}]}"#),
            Err(StoreError::UndeclaredReference { .. })
        ));
        assert!(matches!(set("{"), Err(StoreError::Json(_))));
        assert!(matches!(
            set(r#"{"requirements": [{"id": "A", "text": "C shall"}]}"#),
            Err(StoreError::Parse { .. })
        ));
    }

    #[test]
    fn catalog_dependencies() {
        let s = set(r#"{"requirements": [{"id": "A", "depends": ["F"], "text": "if (f) C shall (x)"}],
                      "fragments": [{"id": "F", "label": "F1", "name": "Eff", "placeholder": "f", "definition": ["p | q"]}]}"#)
        .unwrap();
        assert_eq!(s.catalog()[0].definition(), parse_expr("p | q").unwrap());
        assert_eq!(set(&s.to_json()).unwrap(), s);
    }
}
