use retune_ltl::VerdictKind;

use super::{add_dependency, log_change, Obligation, RefactorError, Selection};
use crate::fretish::{is_reference_name, render_expr, render_requirement, Atom, BoolExpr, Requirement};
use crate::store::RequirementSet;
use crate::translate::FragmentEnv;

/// Knobs shared by extract and merge.
#[derive(Debug, Clone, Default)]
pub struct ExtractOptions {
    /// Boolean variable that stood for the fragment in abstract
    /// requirements; every occurrence is replaced by the new reference.
    pub placeholder: Option<String>,
    /// Response flag of the new fragment. Defaults to the placeholder, or
    /// the lowercased id.
    pub flag: Option<String>,
}

/// Moves one repeated definition into a new fragment requirement
/// `if (D) component shall (flag)` and replaces every selected site with a
/// reference to it. Each touched requirement gets an obligation expecting
/// equivalence.
pub fn extract_requirement(
    set: &RequirementSet,
    sources: &[Selection],
    new_id: &str,
    component: &str,
    opts: &ExtractOptions,
) -> Result<(RequirementSet, Vec<Obligation>), RefactorError> {
    let sites = check_sources(set, sources, new_id)?;
    let first = render_expr(sites[0].1);
    for (_, e) in &sites[1..] {
        let other = render_expr(e);
        if other != first {
            return Err(RefactorError::SelectionsDiffer(first, other));
        }
    }
    let definition = sites[0].1.clone();
    let sources: Vec<Selection> = sites.into_iter().map(|(s, _)| s).collect();
    apply(
        set,
        &sources,
        new_id,
        component,
        opts,
        definition,
        "extract",
        VerdictKind::Equivalent,
    )
}

/// Combines differing part-definitions into one fragment whose condition is
/// their conjunction. Sites now reference the whole definition, so the
/// refactored requirements are expected to imply the originals.
pub fn merge_part_definitions(
    set: &RequirementSet,
    sources: &[Selection],
    new_id: &str,
    component: &str,
    opts: &ExtractOptions,
) -> Result<(RequirementSet, Vec<Obligation>), RefactorError> {
    let sites = check_sources(set, sources, new_id)?;
    let mut parts: Vec<BoolExpr> = Vec::new();
    for (_, e) in &sites {
        if !parts.contains(e) {
            parts.push((*e).clone());
        }
    }
    if sites.len() < 2 || parts.len() < 2 {
        return Err(RefactorError::TooFewParts(parts.len().min(sites.len())));
    }
    let definition = BoolExpr::and_all(parts).expect("at least two parts");
    let sources: Vec<Selection> = sites.into_iter().map(|(s, _)| s).collect();
    apply(
        set,
        &sources,
        new_id,
        component,
        opts,
        definition,
        "merge",
        VerdictKind::RefactoredImpliesOriginal,
    )
}

/// Merge against a known definition: every site must be one of `parts` or
/// their full conjunction.
pub(crate) fn merge_into(
    set: &RequirementSet,
    sources: &[Selection],
    new_id: &str,
    component: &str,
    opts: &ExtractOptions,
    parts: &[BoolExpr],
) -> Result<(RequirementSet, Vec<Obligation>), RefactorError> {
    let sites = check_sources(set, sources, new_id)?;
    let definition = BoolExpr::and_all(parts.iter().cloned()).ok_or(RefactorError::TooFewParts(0))?;
    for (_, e) in &sites {
        if !parts.contains(e) && **e != definition {
            return Err(RefactorError::SelectionsDiffer(render_expr(&definition), render_expr(e)));
        }
    }
    let sources: Vec<Selection> = sites.into_iter().map(|(s, _)| s).collect();
    apply(
        set,
        &sources,
        new_id,
        component,
        opts,
        definition,
        "merge",
        VerdictKind::RefactoredImpliesOriginal,
    )
}

/// Resolves, deduplicates and sanity-checks the selections.
fn check_sources<'a>(
    set: &'a RequirementSet,
    sources: &[Selection],
    new_id: &str,
) -> Result<Vec<(Selection, &'a BoolExpr)>, RefactorError> {
    if !is_reference_name(new_id) {
        return Err(RefactorError::InvalidReferenceId(new_id.to_string()));
    }
    if set.contains(new_id) {
        return Err(RefactorError::IdCollision(new_id.to_string()));
    }
    if sources.is_empty() {
        return Err(RefactorError::NoSelections);
    }
    let mut unique: Vec<Selection> = Vec::new();
    for s in sources {
        if !unique.contains(s) {
            unique.push(s.clone());
        }
    }
    for (i, a) in unique.iter().enumerate() {
        for b in &unique[i + 1..] {
            if a.overlaps(b) {
                return Err(RefactorError::OverlappingSelections(a.clone(), b.clone()));
            }
        }
    }
    let timing = unique.iter().any(|s| s.field == crate::fretish::Field::Timing);
    let condition = unique.iter().any(|s| s.field.is_condition());
    if timing && condition {
        return Err(RefactorError::MixedTimingAndCondition);
    }
    unique
        .into_iter()
        .map(|s| {
            let e = s.resolve(set)?;
            Ok((s, e))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn apply(
    set: &RequirementSet,
    sources: &[Selection],
    new_id: &str,
    component: &str,
    opts: &ExtractOptions,
    definition: BoolExpr,
    refactoring: &str,
    expected: VerdictKind,
) -> Result<(RequirementSet, Vec<Obligation>), RefactorError> {
    let flag = opts
        .flag
        .clone()
        .or_else(|| opts.placeholder.clone())
        .unwrap_or_else(|| new_id.to_lowercase());
    let mut out = set.clone();
    let mut touched: Vec<String> = Vec::new();
    let mut before_text = std::collections::HashMap::new();
    let mut touch = |id: &str, req: &Requirement, touched: &mut Vec<String>| {
        if !touched.iter().any(|t| t == id) {
            touched.push(id.to_string());
            before_text.insert(id.to_string(), render_requirement(req));
        }
    };

    for s in sources {
        let req = out.get_mut(&s.requirement).expect("resolved above");
        touch(&s.requirement, &set.get(&s.requirement).expect("exists").clone(), &mut touched);
        let site = req
            .field_mut(s.field)
            .and_then(|e| e.at_mut(&s.path))
            .ok_or_else(|| RefactorError::InvalidSelection(s.clone()))?;
        *site = BoolExpr::reference(new_id);
    }
    if let Some(ph) = &opts.placeholder {
        for req in out.iter_mut() {
            let mut changed = false;
            for (_, e) in req.fields_mut() {
                let replaced = e
                    .map_atoms::<std::convert::Infallible>(&mut |a| {
                        Ok(match a {
                            Atom::BooleanVar(v) if v == ph => {
                                changed = true;
                                BoolExpr::reference(new_id)
                            }
                            _ => BoolExpr::Atom(a.clone()),
                        })
                    })
                    .unwrap_or_else(|never| match never {});
                *e = replaced;
            }
            if changed {
                let original = set.get(&req.id).expect("same ids");
                touch(&req.id.clone(), original, &mut touched);
            }
        }
    }

    for req in out.iter() {
        if req.fields().any(|(_, e)| uses_var(e, &flag)) {
            return Err(RefactorError::FlagInUse(flag));
        }
    }

    for id in &touched {
        let req = out.get_mut(id).expect("touched ids exist");
        add_dependency(req, new_id);
        log_change(req, refactoring, &before_text[id]);
    }

    let mut fragment = Requirement::new(new_id, component, BoolExpr::var(flag));
    for r in definition.references() {
        add_dependency(&mut fragment, r);
    }
    fragment.condition.if_clause = Some(definition);
    let origins: Vec<&str> = sources.iter().map(|s| s.requirement.as_str()).collect();
    fragment.rationale = format!("[{refactoring}] definition taken from {}", dedup(&origins).join(", "));
    out.push(fragment)?;
    out.validate()?;

    let env = FragmentEnv::layered(&out, set);
    let obligations = touched
        .iter()
        .map(|id| {
            Obligation::build(
                refactoring,
                set.get(id).expect("touched ids existed before"),
                out.get(id).expect("touched ids exist after"),
                &env,
                expected,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((out, obligations))
}

fn uses_var(e: &BoolExpr, name: &str) -> bool {
    let mut found = false;
    e.walk(&mut |_, sub| {
        if matches!(sub, BoolExpr::Atom(Atom::BooleanVar(v)) if v == name) {
            found = true;
        }
    });
    found
}

fn dedup<'a>(xs: &[&'a str]) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for x in xs {
        if !out.contains(x) {
            out.push(x);
        }
    }
    out
}
