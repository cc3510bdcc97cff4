//! Dependency and duplication metrics over requirement sets, and a helper
//! for spotting fragment candidates.
//!
//! All reports are deterministic: ordering follows insertion order of the
//! set or catalog, so identical inputs produce identical bytes.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::fretish::{render_expr, Atom, BoolExpr};
use crate::refactor::Selection;
use crate::store::{Fragment, RequirementSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DependencyEdge {
    pub from: String,
    pub to: String,
}

/// One edge per requirement and distinct dependency (declared or
/// referenced). A child's edge to a fragment is left out when one of its
/// ancestors already depends on that fragment: the dependency is inherited
/// through the hierarchy rather than being a new one.
pub fn dependency_graph(set: &RequirementSet) -> Vec<DependencyEdge> {
    let mut edges = Vec::new();
    for req in set.iter() {
        let inherited = ancestor_dependencies(set, &req.id);
        let mut targets: Vec<String> = req.depends.clone();
        for r in req.references() {
            if !targets.contains(&r) {
                targets.push(r);
            }
        }
        for t in targets {
            if !inherited.contains(&t) {
                edges.push(DependencyEdge {
                    from: req.id.clone(),
                    to: t,
                });
            }
        }
    }
    edges
}

fn ancestor_dependencies(set: &RequirementSet, id: &str) -> HashSet<String> {
    let mut deps = HashSet::new();
    let mut seen = HashSet::new();
    let mut stack: Vec<&str> = set.get(id).map(|r| r.parents.iter().map(String::as_str).collect()).unwrap_or_default();
    while let Some(p) = stack.pop() {
        if !seen.insert(p) {
            continue;
        }
        if let Some(parent) = set.get(p) {
            deps.extend(parent.depends.iter().cloned());
            deps.extend(parent.references());
            stack.extend(parent.parents.iter().map(String::as_str));
        }
    }
    deps
}

/// How many times `fragment`'s definition is spelled out in `set`. A node
/// equal to the full definition counts once and is not searched further;
/// for multi-part fragments a node equal to any single part also counts.
pub fn definition_occurrences(set: &RequirementSet, fragment: &Fragment) -> usize {
    let definition = fragment.definition();
    let multi = fragment.parts.len() > 1;
    let mut count = 0;
    for req in set.iter() {
        for (_, root) in req.fields() {
            count += count_in(root, &definition, multi.then_some(fragment.parts.as_slice()));
        }
    }
    count
}

fn count_in(e: &BoolExpr, definition: &BoolExpr, parts: Option<&[BoolExpr]>) -> usize {
    if e == definition || parts.is_some_and(|p| p.contains(e)) {
        return 1;
    }
    match e {
        BoolExpr::Atom(_) => 0,
        BoolExpr::Not(a) => count_in(a, definition, parts),
        BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
            count_in(a, definition, parts) + count_in(b, definition, parts)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicationRow {
    pub label: String,
    pub id: String,
    pub name: String,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicationReport {
    pub rows: Vec<DuplicationRow>,
    pub total_before: usize,
    pub total_after: usize,
}

impl DuplicationReport {
    pub fn reduction(&self) -> usize {
        self.total_before.saturating_sub(self.total_after)
    }
}

pub fn duplication_report(
    before: &RequirementSet,
    after: &RequirementSet,
    fragments: &[Fragment],
) -> DuplicationReport {
    let rows: Vec<DuplicationRow> = fragments
        .iter()
        .map(|f| DuplicationRow {
            label: f.label.clone(),
            id: f.id.clone(),
            name: f.name.clone(),
            before: definition_occurrences(before, f),
            after: definition_occurrences(after, f),
        })
        .collect();
    DuplicationReport {
        total_before: rows.iter().map(|r| r.before).sum(),
        total_after: rows.iter().map(|r| r.after).sum(),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParentSummary {
    pub id: String,
    pub dependencies: usize,
    pub children: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetSummary {
    /// Requirements that have no parent and are not fragments.
    pub parents: Vec<ParentSummary>,
    pub total_children: usize,
    pub fragments: usize,
    pub total_requirements: usize,
    pub dependency_edges: usize,
}

/// Requirements are split into top-level requirements, children (those with
/// a parent) and fragments (catalog ids or referenced fragment requirements).
pub fn summary(set: &RequirementSet) -> SetSummary {
    let edges = dependency_graph(set);
    let fragment_ids = fragment_requirements(set);
    let parents = set
        .iter()
        .filter(|r| r.parents.is_empty() && !fragment_ids.contains(r.id.as_str()))
        .map(|r| ParentSummary {
            id: r.id.clone(),
            dependencies: edges.iter().filter(|e| e.from == r.id).count(),
            children: set.iter().filter(|c| c.parents.contains(&r.id)).count(),
        })
        .collect();
    SetSummary {
        parents,
        total_children: set.iter().filter(|r| !r.parents.is_empty()).count(),
        fragments: fragment_ids.len(),
        total_requirements: set.len(),
        dependency_edges: edges.len(),
    }
}

fn fragment_requirements(set: &RequirementSet) -> HashSet<&str> {
    let mut ids: HashSet<&str> = set
        .catalog()
        .iter()
        .filter(|f| set.contains(&f.id))
        .map(|f| f.id.as_str())
        .collect();
    for r in set.iter() {
        for id in r.references() {
            if let Some(t) = set.get(&id) {
                ids.insert(t.id.as_str());
            }
        }
    }
    ids
}

/// A subexpression repeated across the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepeatedSubexpression {
    pub expression: String,
    pub size: usize,
    pub sites: Vec<Selection>,
}

/// Maximal repeated subexpressions, largest first. Once a subexpression is
/// reported, its sites are claimed: smaller repeats only count sites that lie
/// outside every claimed one. Bare variables and references (and their
/// negations) are never reported.
pub fn find_repeated_subexpressions(set: &RequirementSet, min_sites: usize) -> Vec<RepeatedSubexpression> {
    let min_sites = min_sites.max(2);
    let mut groups: BTreeMap<String, (usize, Vec<Selection>)> = BTreeMap::new();
    for req in set.iter() {
        for (field, root) in req.fields() {
            root.walk(&mut |path, e| {
                if is_trivial(e) {
                    return;
                }
                let entry = groups.entry(render_expr(e)).or_insert_with(|| (e.size(), Vec::new()));
                entry.1.push(Selection::new(req.id.clone(), field, path.to_vec()));
            });
        }
    }
    let mut candidates: Vec<(String, usize, Vec<Selection>)> = groups
        .into_iter()
        .filter(|(_, (_, sites))| sites.len() >= min_sites)
        .map(|(text, (size, sites))| (text, size, sites))
        .collect();
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut claimed: Vec<Selection> = Vec::new();
    let mut out = Vec::new();
    for (expression, size, sites) in candidates {
        let free: Vec<Selection> = sites
            .into_iter()
            .filter(|s| !claimed.iter().any(|c| inside(s, c)))
            .collect();
        if free.len() >= min_sites {
            claimed.extend(free.iter().cloned());
            out.push(RepeatedSubexpression {
                expression,
                size,
                sites: free,
            });
        }
    }
    out
}

fn is_trivial(e: &BoolExpr) -> bool {
    match e {
        BoolExpr::Atom(Atom::BooleanVar(_) | Atom::Reference(_)) => true,
        BoolExpr::Not(a) => is_trivial(a),
        _ => false,
    }
}

fn inside(s: &Selection, outer: &Selection) -> bool {
    s.requirement == outer.requirement && s.field == outer.field && s.path.starts_with(&outer.path)
}

/// Per-parent dependency and child counts before and after, as a Markdown
/// table.
pub fn summary_markdown(before: &SetSummary, after: &SetSummary) -> String {
    let mut s = String::new();
    s.push_str("| Requirement | Dependencies | Children (before) | Children (after) |\n");
    s.push_str("|---|---:|---:|---:|\n");
    for p in &before.parents {
        let a = after.parents.iter().find(|q| q.id == p.id);
        let after_children = a.map_or("-".to_string(), |q| q.children.to_string());
        let _ = writeln!(s, "| {} | {} | {} | {} |", p.id, p.dependencies, p.children, after_children);
    }
    let _ = writeln!(
        s,
        "| **Total** | {} | {} | {} |",
        before.dependency_edges, before.total_children, after.total_children
    );
    let _ = writeln!(
        s,
        "\nRequirements: {} before, {} after ({} fragments). Dependency edges: {} before, {} after.",
        before.total_requirements, after.total_requirements, after.fragments, before.dependency_edges, after.dependency_edges
    );
    s
}

pub fn duplication_markdown(report: &DuplicationReport) -> String {
    let mut s = String::new();
    s.push_str("| Fragment | Name | Before | After |\n");
    s.push_str("|---|---|---:|---:|\n");
    for r in &report.rows {
        let _ = writeln!(s, "| {} | {} | {} | {} |", r.label, r.name, r.before, r.after);
    }
    let _ = writeln!(
        s,
        "| **Total (re)definitions** | | {} | {} |",
        report.total_before, report.total_after
    );
    let _ = writeln!(s, "\nReduction: {} definitions.", report.reduction());
    s
}

pub fn duplication_csv(report: &DuplicationReport) -> String {
    let mut s = String::from("label,id,name,before,after\n");
    for r in &report.rows {
        let _ = writeln!(s, "{},{},{},{},{}", csv_field(&r.label), r.id, csv_field(&r.name), r.before, r.after);
    }
    let _ = writeln!(s, "total,,,{},{}", report.total_before, report.total_after);
    s
}

pub fn summary_csv(before: &SetSummary, after: &SetSummary) -> String {
    let mut s = String::from("requirement,dependencies,children_before,children_after\n");
    for p in &before.parents {
        let a = after.parents.iter().find(|q| q.id == p.id).map_or(String::new(), |q| q.children.to_string());
        let _ = writeln!(s, "{},{},{},{}", p.id, p.dependencies, p.children, a);
    }
    let _ = writeln!(s, "total,{},{},{}", before.dependency_edges, before.total_children, after.total_children);
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(json: &str) -> RequirementSet {
        RequirementSet::from_json(json).unwrap()
    }

    #[test]
    fn empty_set() {
        let s = RequirementSet::default();
        assert!(dependency_graph(&s).is_empty());
        let sum = summary(&s);
        assert_eq!((sum.total_children, sum.total_requirements, sum.dependency_edges), (0, 0, 0));
        assert!(find_repeated_subexpressions(&s, 2).is_empty());
    }

    #[test]
    fn edges_per_fragment() {
        let s = set(
            r#"{"requirements": [
            {"id": "UC5_R_1", "depends": ["F1", "F2", "F3"], "text": "if (a & b) C shall (c)"},
            {"id": "UC5_R_1.1", "parents": ["UC5_R_1"], "depends": ["F1", "F4"], "text": "if (x) C shall (y)"}
        ],
        "fragments": [
            {"id": "F1", "definition": ["p"]}, {"id": "F2", "definition": ["q"]},
            {"id": "F3", "definition": ["r"]}, {"id": "F4", "definition": ["s"]}
        ]}"#,
        );
        let edges: Vec<(String, String)> = dependency_graph(&s).into_iter().map(|e| (e.from, e.to)).collect();
        let pairs: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        // the child's F1 edge is inherited from its parent
        assert_eq!(
            pairs,
            [("UC5_R_1", "F1"), ("UC5_R_1", "F2"), ("UC5_R_1", "F3"), ("UC5_R_1.1", "F4")]
        );
    }

    #[test]
    fn occurrences_do_not_double_count() {
        let s = set(
            r#"{"requirements": [
            {"id": "A", "text": "if ((x > 1) & (y > 1)) C shall ((x > 1) & (z = 2))"}
        ],
        "fragments": [
            {"id": "X", "definition": ["x > 1"]},
            {"id": "G", "definition": ["(x > 1) & (y > 1)", "z = 2"]}
        ]}"#,
        );
        assert_eq!(definition_occurrences(&s, &s.catalog()[0]), 2);
        // the if clause matches one part, the response conjunct the other
        assert_eq!(definition_occurrences(&s, &s.catalog()[1]), 2);
        let r = duplication_report(&s, &s, s.catalog());
        assert_eq!((r.total_before, r.total_after, r.reduction()), (4, 4, 0));
        let md = duplication_markdown(&r);
        assert!(md.contains("| **Total (re)definitions** | | 4 | 4 |"), "{md}");
    }

    #[test]
    fn maximal_repeats_absorb_their_parts() {
        // (p > 1) & (q > 1) twice, (p > 1) once more on its own
        let s = set(
            r#"{"requirements": [
            {"id": "A", "text": "if ((p > 1) & (q > 1)) C shall (r)"},
            {"id": "B", "text": "if ((p > 1) & (q > 1) & s) C shall (r)"},
            {"id": "D", "text": "if ((p > 1) | t) C shall (u)"}
        ]}"#,
        );
        let found = find_repeated_subexpressions(&s, 2);
        let texts: Vec<(&str, usize)> = found.iter().map(|r| (r.expression.as_str(), r.sites.len())).collect();
        assert_eq!(texts, [("(p > 1) & (q > 1)", 2)]);
        let found = find_repeated_subexpressions(&s, 1);
        assert_eq!(found[0].sites.len(), 2);

        // brute force: every occurrence of p > 1 outside a reported site
        let s = set(
            r#"{"requirements": [
            {"id": "A", "text": "if ((p > 1) & (q > 1)) C shall (p > 1)"},
            {"id": "B", "text": "if ((p > 1) & (q > 1)) C shall (r)"},
            {"id": "D", "text": "if ((p > 1) | t) C shall (u)"}
        ]}"#,
        );
        let found = find_repeated_subexpressions(&s, 2);
        let sites: Vec<Vec<String>> = found
            .iter()
            .map(|r| r.sites.iter().map(|s| s.to_string()).collect())
            .collect();
        assert_eq!(found[0].expression, "(p > 1) & (q > 1)");
        assert_eq!(sites[0], ["A:if", "B:if"]);
        assert_eq!(found[1].expression, "p > 1");
        assert_eq!(sites[1], ["A:response", "D:if:0"]);
        assert_eq!(found.len(), 2);
    }

    #[test]
    fn no_repeats() {
        let s = set(r#"{"requirements": [{"id": "A", "text": "if (x > 1) C shall (y)"}]}"#);
        assert!(find_repeated_subexpressions(&s, 2).is_empty());
    }
}
