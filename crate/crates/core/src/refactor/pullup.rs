use retune_ltl::VerdictKind;

use super::{log_change, Obligation, RefactorError, Selection};
use crate::fretish::{render_requirement, BoolExpr, Field, Timing};
use crate::store::RequirementSet;
use crate::translate::FragmentEnv;

/// Moves a conjunct from a child's field into the same field of one of its
/// parents. The parent gains the conjunct only if it does not already have
/// it, so pulling the same definition from several children is idempotent.
///
/// The obligation asks the refactored parent to imply the original child.
pub fn pull_up_definition(
    set: &RequirementSet,
    source: &Selection,
    dest_parent: &str,
) -> Result<(RequirementSet, Obligation), RefactorError> {
    let child = set
        .get(&source.requirement)
        .ok_or_else(|| RefactorError::UnknownRequirement(source.requirement.clone()))?;
    if source.requirement == dest_parent {
        return Err(RefactorError::SameRequirement);
    }
    let parent = set
        .get(dest_parent)
        .ok_or_else(|| RefactorError::UnknownRequirement(dest_parent.to_string()))?;
    if !child.parents.iter().any(|p| p == dest_parent) {
        return Err(RefactorError::NotAParent {
            child: child.id.clone(),
            dest: dest_parent.to_string(),
        });
    }
    let moved = source.resolve(set)?.clone();
    let field_root = child.field(source.field).expect("resolved");
    // every ancestor of the selection must be a conjunction
    for depth in 0..source.path.len() {
        if !matches!(field_root.at(&source.path[..depth]), Some(BoolExpr::And(..))) {
            return Err(RefactorError::NotAConjunct(source.clone()));
        }
    }
    if source.path.is_empty() && matches!(source.field, Field::Response | Field::Timing) {
        return Err(RefactorError::FieldMismatch {
            field: source.field,
            dest: dest_parent.to_string(),
            reason: "moving the whole field would leave the child without it",
        });
    }
    if source.field == Field::Timing && parent.timing.is_none() {
        return Err(RefactorError::FieldMismatch {
            field: source.field,
            dest: dest_parent.to_string(),
            reason: "the parent has no timing",
        });
    }

    let mut out = set.clone();
    let child_before = render_requirement(child);
    let parent_before = render_requirement(parent);

    let new_child = out.get_mut(&source.requirement).expect("exists");
    if source.path.is_empty() {
        match source.field {
            Field::WhenClause => new_child.condition.when_clause = None,
            Field::IfClause => new_child.condition.if_clause = None,
            _ => unreachable!("rejected above"),
        }
    } else {
        let (last, up) = source.path.split_last().expect("non-empty");
        let root = new_child.field_mut(source.field).expect("resolved");
        let node = root.at_mut(up).expect("ancestor exists");
        let BoolExpr::And(a, b) = node else {
            unreachable!("ancestors are conjunctions")
        };
        let sibling = if *last == 0 { (**b).clone() } else { (**a).clone() };
        *node = sibling;
    }
    let still_there = new_child
        .field(source.field)
        .is_some_and(|e| contains(e, &moved));
    if still_there {
        return Err(RefactorError::PostCheck(format!(
            "{} still contains {moved}",
            source.requirement
        )));
    }
    log_change(new_child, "pullup", &child_before);

    let new_parent = out.get_mut(dest_parent).expect("exists");
    let slot: &mut Option<BoolExpr> = match source.field {
        Field::WhenClause => &mut new_parent.condition.when_clause,
        Field::IfClause => &mut new_parent.condition.if_clause,
        Field::Response => {
            if !new_parent.response.conjuncts().contains(&&moved) {
                new_parent.response = BoolExpr::and(new_parent.response.clone(), moved.clone());
            }
            &mut None
        }
        Field::Timing => {
            let Some(Timing::Until(stop)) = new_parent.timing.as_mut() else {
                unreachable!("checked above")
            };
            if !stop.conjuncts().contains(&&moved) {
                *stop = BoolExpr::and(stop.clone(), moved.clone());
            }
            &mut None
        }
    };
    if source.field.is_condition() {
        *slot = Some(match slot.take() {
            None => moved.clone(),
            Some(e) if e.conjuncts().contains(&&moved) => e,
            Some(e) => BoolExpr::and(e, moved.clone()),
        });
    }
    let present = new_parent
        .field(source.field)
        .is_some_and(|e| e.conjuncts().contains(&&moved));
    if !present {
        return Err(RefactorError::PostCheck(format!("{dest_parent} does not contain {moved}")));
    }
    if render_requirement(new_parent) != parent_before {
        log_change(new_parent, "pullup", &parent_before);
    }
    out.validate()?;

    let env = FragmentEnv::layered(&out, set);
    let obligation = Obligation::build(
        "pullup",
        child,
        out.get(dest_parent).expect("exists"),
        &env,
        VerdictKind::RefactoredImpliesOriginal,
    )?;
    Ok((out, obligation))
}

fn contains(haystack: &BoolExpr, needle: &BoolExpr) -> bool {
    let mut found = false;
    haystack.walk(&mut |_, e| found |= e == needle);
    found
}
