use std::collections::HashMap;

use serde::Serialize;

use crate::fretish::render_requirement;
use crate::store::RequirementSet;

/// Children removed as duplicates of a surviving sibling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Removal {
    pub kept: String,
    pub removed: Vec<String>,
}

/// Collapses children that share an identical parent set and identical
/// canonical text onto the first of them in insertion order. Identical
/// bodies under different parents are kept for traceability. Children that
/// are themselves parents or are depended on are never removed.
pub fn remove_redundant_children(set: &RequirementSet) -> (RequirementSet, Vec<Removal>) {
    let pinned: Vec<&str> = set
        .iter()
        .flat_map(|r| r.parents.iter().chain(&r.depends))
        .map(String::as_str)
        .collect();
    let mut groups: HashMap<(Vec<String>, String), usize> = HashMap::new();
    let mut removals: Vec<Removal> = Vec::new();
    for r in set.iter().filter(|r| !r.parents.is_empty()) {
        let mut parents = r.parents.clone();
        parents.sort();
        let key = (parents, render_requirement(r));
        match groups.get(&key) {
            Some(&i) if !pinned.contains(&r.id.as_str()) => removals[i].removed.push(r.id.clone()),
            Some(_) => {}
            None => {
                groups.insert(key, removals.len());
                removals.push(Removal {
                    kept: r.id.clone(),
                    removed: Vec::new(),
                });
            }
        }
    }
    removals.retain(|r| !r.removed.is_empty());

    let mut out = set.clone();
    for rm in &removals {
        for id in &rm.removed {
            out.remove(id);
        }
        let kept = out.get_mut(&rm.kept).expect("survivor stays");
        let line = format!("[dedupe] removed identical children: {}", rm.removed.join(", "));
        if kept.rationale.is_empty() {
            kept.rationale = line;
        } else {
            kept.rationale.push('\n');
            kept.rationale.push_str(&line);
        }
    }
    debug_assert!(out.validate().is_ok());
    (out, removals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapses_only_within_the_same_parents() {
        let s = RequirementSet::from_json(
            r#"{"requirements": [
            {"id": "P", "text": "C shall (p)"},
            {"id": "Q", "text": "C shall (q)"},
            {"id": "P.1", "parents": ["P"], "text": "if (a) C shall (x)"},
            {"id": "P.2", "parents": ["P"], "text": "when (a) C shall (x)"},
            {"id": "P.3", "parents": ["P"], "text": "if (a) C shall (y)"},
            {"id": "Q.1", "parents": ["Q"], "text": "if (a) C shall (x)"}
        ]}"#,
        )
        .unwrap();
        let (out, removed) = remove_redundant_children(&s);
        assert_eq!(
            removed,
            [Removal {
                kept: "P.1".into(),
                removed: vec!["P.2".into()]
            }]
        );
        assert_eq!(out.ids().collect::<Vec<_>>(), ["P", "Q", "P.1", "P.3", "Q.1"]);
        assert!(out.get("P.1").unwrap().rationale.contains("P.2"));
    }

    #[test]
    fn nothing_to_do() {
        let s = RequirementSet::from_json(
            r#"{"requirements": [{"id": "P", "text": "C shall (p)"}, {"id": "P.1", "parents": ["P"], "text": "C shall (x)"}]}"#,
        )
        .unwrap();
        let (out, removed) = remove_redundant_children(&s);
        assert!(removed.is_empty());
        assert_eq!(out, s);
    }
}
