use super::{log_change, RefactorError};
use crate::fretish::{is_reference_name, render_requirement, Atom, BoolExpr};
use crate::store::RequirementSet;

/// Renames a requirement and every parent link, dependency and Reference
/// naming it, so nothing is left dangling.
pub fn rename_requirement(
    set: &RequirementSet,
    old_id: &str,
    new_id: &str,
) -> Result<RequirementSet, RefactorError> {
    if !set.contains(old_id) {
        return Err(RefactorError::UnknownRequirement(old_id.to_string()));
    }
    let catalog_clash = set.catalog_entry(new_id).is_some() && old_id != new_id;
    if set.contains(new_id) || catalog_clash {
        return Err(RefactorError::IdCollision(new_id.to_string()));
    }
    let referenced = !set.referencing(old_id).is_empty();
    let in_catalog = set.catalog_entry(old_id).is_some();
    if (referenced || in_catalog) && !is_reference_name(new_id) {
        return Err(RefactorError::InvalidReferenceId(new_id.to_string()));
    }
    if new_id.is_empty() || new_id.chars().any(char::is_whitespace) {
        return Err(RefactorError::InvalidReferenceId(new_id.to_string()));
    }

    let mut out = set.clone();
    out.rekey(old_id, new_id);
    for req in out.iter_mut() {
        let before = render_requirement(req);
        for p in req.parents.iter_mut().chain(req.depends.iter_mut()) {
            if p == old_id {
                *p = new_id.to_string();
            }
        }
        for (_, e) in req.fields_mut() {
            *e = e
                .map_atoms::<std::convert::Infallible>(&mut |a| {
                    Ok(match a {
                        Atom::Reference(id) if id == old_id => BoolExpr::reference(new_id),
                        _ => BoolExpr::Atom(a.clone()),
                    })
                })
                .unwrap_or_else(|never| match never {});
        }
        if render_requirement(req) != before {
            log_change(req, "rename", &before);
        }
    }
    for f in out.catalog_mut() {
        if f.id == old_id {
            f.id = new_id.to_string();
        }
    }
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> RequirementSet {
        RequirementSet::from_json(
            r#"{"requirements": [
            {"id": "P", "depends": ["SENSOR_FAULTS"], "text": "if (SENSOR_FAULTS & x) C shall (r)"},
            {"id": "P.1", "parents": ["P"], "depends": ["SENSOR_FAULTS"], "text": "if (SENSOR_FAULTS) C shall (s)"},
            {"id": "SENSOR_FAULTS", "text": "if (a | b) C shall (sensorFaults)"},
            {"id": "LEAF", "text": "C shall (q)"}
        ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn updates_references_and_links() {
        let out = rename_requirement(&set(), "SENSOR_FAULTS", "SENSOR_FAULT_DETECTED").unwrap();
        assert!(out.get("SENSOR_FAULTS").is_none());
        assert_eq!(
            render_requirement(out.get("P").unwrap()),
            "if (SENSOR_FAULT_DETECTED & x) C shall (r)"
        );
        assert_eq!(out.get("P.1").unwrap().depends, ["SENSOR_FAULT_DETECTED"]);
        // position is kept
        assert_eq!(out.ids().nth(2), Some("SENSOR_FAULT_DETECTED"));

        let out = rename_requirement(&set(), "P", "Q").unwrap();
        assert_eq!(out.get("P.1").unwrap().parents, ["Q"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            rename_requirement(&set(), "P", "P.1"),
            Err(RefactorError::IdCollision(_))
        ));
        assert!(matches!(
            rename_requirement(&set(), "P", "P"),
            Err(RefactorError::IdCollision(_))
        ));
        assert!(matches!(
            rename_requirement(&set(), "NOPE", "X"),
            Err(RefactorError::UnknownRequirement(_))
        ));
        assert!(matches!(
            rename_requirement(&set(), "SENSOR_FAULTS", "sensorFaults2"),
            Err(RefactorError::InvalidReferenceId(_))
        ));
    }

    #[test]
    fn unreferenced_leaf_only_changes_its_id() {
        let before = set();
        let out = rename_requirement(&before, "LEAF", "leaf_2").unwrap();
        let mut renamed = out.get("leaf_2").unwrap().clone();
        renamed.id = "LEAF".into();
        assert_eq!(&renamed, before.get("LEAF").unwrap());
        for id in ["P", "P.1", "SENSOR_FAULTS"] {
            assert_eq!(out.get(id), before.get(id));
        }
    }
}
