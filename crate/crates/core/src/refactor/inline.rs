use retune_ltl::VerdictKind;

use super::{add_dependency, log_change, Obligation, RefactorError};
use crate::fretish::{render_requirement, Atom, BoolExpr};
use crate::store::RequirementSet;
use crate::translate::{is_fragment_shaped, FragmentEnv};

/// Substitutes a fragment's condition for every reference to it and
/// deletes the fragment. Referencing requirements must share the
/// fragment's component (unless `allow_component_mismatch`) and timing.
pub fn inline_requirement(
    set: &RequirementSet,
    fragment_id: &str,
    allow_component_mismatch: bool,
) -> Result<(RequirementSet, Vec<Obligation>), RefactorError> {
    let fragment = set
        .get(fragment_id)
        .ok_or_else(|| RefactorError::UnknownRequirement(fragment_id.to_string()))?;
    if !is_fragment_shaped(fragment) {
        return Err(RefactorError::NotFragmentShaped(fragment_id.to_string()));
    }
    let definition = fragment.condition.conjoined().expect("fragment has a condition");
    let users: Vec<String> = set.referencing(fragment_id).iter().map(|r| r.id.clone()).collect();
    for id in &users {
        let r = set.get(id).expect("exists");
        if r.component != fragment.component && !allow_component_mismatch {
            return Err(RefactorError::ComponentMismatch {
                requirement: id.clone(),
                fragment: fragment_id.to_string(),
                expected: fragment.component.clone(),
                found: r.component.clone(),
            });
        }
        if r.timing != fragment.timing {
            return Err(RefactorError::TimingMismatch {
                requirement: id.clone(),
                fragment: fragment_id.to_string(),
            });
        }
    }

    let mut out = set.clone();
    for id in &users {
        let req = out.get_mut(id).expect("exists");
        let before = render_requirement(req);
        for (_, e) in req.fields_mut() {
            *e = e
                .map_atoms::<std::convert::Infallible>(&mut |a| {
                    Ok(match a {
                        Atom::Reference(r) if r == fragment_id => definition.clone(),
                        _ => BoolExpr::Atom(a.clone()),
                    })
                })
                .unwrap_or_else(|never| match never {});
        }
        for r in definition.references() {
            add_dependency(req, r);
        }
        if req.references().iter().any(|r| r == fragment_id) {
            return Err(RefactorError::PostCheck(format!("{id} still references {fragment_id}")));
        }
        log_change(req, "inline", &before);
    }
    out.remove(fragment_id);
    let keep_declared = out.catalog_entry(fragment_id).is_some();
    for req in out.iter_mut() {
        if !keep_declared || users.contains(&req.id) {
            req.depends.retain(|d| d != fragment_id);
        }
    }
    out.validate()?;

    let env = FragmentEnv::layered(&out, set);
    let obligations = users
        .iter()
        .map(|id| {
            Obligation::build(
                "inline",
                set.get(id).expect("exists before"),
                out.get(id).expect("exists after"),
                &env,
                VerdictKind::Equivalent,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((out, obligations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unreferenced_fragment_is_deleted() {
        let s = RequirementSet::from_json(
            r#"{"requirements": [{"id": "F", "text": "if (p) C shall (f)"}, {"id": "A", "text": "C shall (r)"}]}"#,
        )
        .unwrap();
        let (out, obs) = inline_requirement(&s, "F", false).unwrap();
        assert!(obs.is_empty());
        assert_eq!(out.ids().collect::<Vec<_>>(), ["A"]);
    }

    #[test]
    fn mismatches() {
        let s = RequirementSet::from_json(
            r#"{"requirements": [
            {"id": "A", "depends": ["F"], "text": "if (F) Other shall (r)"},
            {"id": "B", "depends": ["F"], "text": "if (F) C shall until (s) (r)"},
            {"id": "F", "text": "if (p) C shall (f)"},
            {"id": "G", "text": "C shall (g)"}
        ]}"#,
        )
        .unwrap();
        assert!(matches!(
            inline_requirement(&s, "F", false),
            Err(RefactorError::ComponentMismatch { .. })
        ));
        assert!(matches!(
            inline_requirement(&s, "F", true),
            Err(RefactorError::TimingMismatch { .. })
        ));
        assert!(matches!(
            inline_requirement(&s, "G", false),
            Err(RefactorError::NotFragmentShaped(_))
        ));
    }
}
