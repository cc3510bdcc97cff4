use serde::Serialize;

use super::extract::merge_into;
use super::{
    extract_requirement, remove_redundant_children, ExtractOptions, Obligation, RefactorError,
    Removal, Selection,
};
use crate::fretish::BoolExpr;
use crate::store::{Fragment, RequirementSet};

/// Which parts of the catalog pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogOptions {
    /// Merge multi-part fragments. When off they are left in place.
    pub merge_parts: bool,
    /// Collapse children made identical by merging.
    pub dedupe: bool,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions {
            merge_parts: true,
            dedupe: true,
        }
    }
}

/// One fragment moved out of the set.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogStep {
    pub fragment: String,
    pub refactoring: &'static str,
    pub sites: Vec<Selection>,
    #[serde(skip)]
    pub obligations: Vec<Obligation>,
}

#[derive(Debug, Clone)]
pub struct CatalogOutcome {
    pub set: RequirementSet,
    pub steps: Vec<CatalogStep>,
    pub removed: Vec<Removal>,
}

impl CatalogOutcome {
    pub fn obligations(&self) -> impl Iterator<Item = &Obligation> {
        self.steps.iter().flat_map(|s| s.obligations.iter())
    }
}

/// Subexpressions of non-catalog requirements that spell out `fragment`:
/// nodes equal to the full definition or, for multi-part fragments, to one
/// of the parts. Matching is top-down and does not look inside a match.
pub fn definition_sites(set: &RequirementSet, fragment: &Fragment) -> Vec<Selection> {
    let definition = fragment.definition();
    let matches = |e: &BoolExpr| *e == definition || (fragment.parts.len() > 1 && fragment.parts.contains(e));
    let mut sites = Vec::new();
    for req in set.iter() {
        if set.catalog_entry(&req.id).is_some() {
            continue;
        }
        for (field, root) in req.fields() {
            let mut stack: Vec<(Vec<usize>, &BoolExpr)> = vec![(Vec::new(), root)];
            while let Some((path, e)) = stack.pop() {
                if matches(e) {
                    sites.push(Selection::new(req.id.clone(), field, path));
                    continue;
                }
                let kids: Vec<&BoolExpr> = match e {
                    BoolExpr::Atom(_) => vec![],
                    BoolExpr::Not(a) => vec![a],
                    BoolExpr::And(a, b) | BoolExpr::Or(a, b) => vec![a, b],
                };
                for (i, k) in kids.into_iter().enumerate().rev() {
                    let mut p = path.clone();
                    p.push(i);
                    stack.push((p, k));
                }
            }
        }
    }
    sites
}

/// Moves every catalog fragment that is not yet a requirement into its own
/// fragment requirement, in catalog order. Single-part fragments are
/// extracted, multi-part ones merged; placeholders in abstract requirements
/// become references. Identical siblings left behind are then collapsed.
pub fn apply_catalog(set: &RequirementSet, opts: CatalogOptions) -> Result<CatalogOutcome, RefactorError> {
    let mut current = set.clone();
    let mut steps = Vec::new();
    for fragment in set.catalog() {
        if current.contains(&fragment.id) {
            continue;
        }
        let multi = fragment.parts.len() > 1;
        if multi && !opts.merge_parts {
            continue;
        }
        let sites = definition_sites(&current, fragment);
        let Some(first) = sites.first() else { continue };
        let component = current.get(&first.requirement).expect("site exists").component.clone();
        let xopts = ExtractOptions {
            placeholder: fragment.placeholder.clone(),
            flag: None,
        };
        let (next, obligations) = if multi {
            merge_into(&current, &sites, &fragment.id, &component, &xopts, &fragment.parts)?
        } else {
            extract_requirement(&current, &sites, &fragment.id, &component, &xopts)?
        };
        current = next;
        steps.push(CatalogStep {
            fragment: fragment.id.clone(),
            refactoring: if multi { "merge" } else { "extract" },
            sites,
            obligations,
        });
    }
    let removed = if opts.dedupe {
        let (deduped, removed) = remove_redundant_children(&current);
        current = deduped;
        removed
    } else {
        Vec::new()
    };
    Ok(CatalogOutcome {
        set: current,
        steps,
        removed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fretish::render_requirement;
    use retune_ltl::VerdictKind;

    fn fixture() -> RequirementSet {
        RequirementSet::from_json(
            r#"{
            "requirements": [
                {"id": "P", "depends": ["FAULT", "GOALS"], "text": "if (fault) C shall (goals)"},
                {"id": "P.1", "parents": ["P"], "text": "if (a | b) C shall ((x > 0) & (y > 0))"},
                {"id": "P.2", "parents": ["P"], "text": "if (a | b) C shall (z = 1)"}
            ],
            "fragments": [
                {"id": "FAULT", "placeholder": "fault", "definition": ["a | b"]},
                {"id": "GOALS", "placeholder": "goals", "definition": ["(x > 0) & (y > 0)", "z = 1"]}
            ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn sites_do_not_nest() {
        let s = fixture();
        let goals = s.catalog_entry("GOALS").unwrap();
        let sites: Vec<String> = definition_sites(&s, goals).iter().map(|s| s.to_string()).collect();
        assert_eq!(sites, ["P.1:response", "P.2:response"]);
    }

    #[test]
    fn pipeline() {
        let out = apply_catalog(&fixture(), CatalogOptions::default()).unwrap();
        assert_eq!(out.steps.len(), 2);
        assert_eq!(
            out.removed,
            [Removal {
                kept: "P.1".into(),
                removed: vec!["P.2".into()]
            }]
        );
        let s = &out.set;
        assert_eq!(s.ids().collect::<Vec<_>>(), ["P", "P.1", "FAULT", "GOALS"]);
        assert_eq!(render_requirement(s.get("P").unwrap()), "if (FAULT) C shall (GOALS)");
        assert_eq!(render_requirement(s.get("P.1").unwrap()), "if (FAULT) C shall (GOALS)");
        assert_eq!(
            render_requirement(s.get("GOALS").unwrap()),
            "if ((x > 0) & (y > 0) & (z = 1)) C shall (goals)"
        );
        for o in out.obligations() {
            let c = o.check().unwrap();
            assert!(c.passed, "{} {}", o.refactored_id, c.verdict.kind);
        }
        let merged: Vec<VerdictKind> = out.steps[1]
            .obligations
            .iter()
            .map(|o| o.check().unwrap().verdict.kind)
            .collect();
        assert_eq!(
            merged,
            [
                VerdictKind::RefactoredImpliesOriginal,
                VerdictKind::RefactoredImpliesOriginal,
                VerdictKind::Equivalent
            ]
        );
    }

    #[test]
    fn extraction_only() {
        let opts = CatalogOptions {
            merge_parts: false,
            dedupe: false,
        };
        let out = apply_catalog(&fixture(), opts).unwrap();
        assert_eq!(out.set.len(), 4);
        assert!(out.set.get("GOALS").is_none());
    }
}
