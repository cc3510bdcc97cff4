use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use retune_core::fretish::{BoolExpr, Field};
use retune_core::refactor::{
    extract_requirement, inline_requirement, merge_part_definitions, ExtractOptions, Obligation, Selection,
};
use retune_core::store::RequirementSet;
use retune_core::translate::{translate_pair, FragmentEnv, FragmentResolution};
use retune_ltl::{check_equivalence, VerdictKind};

/// Non-leaf subexpression paths of one field, optionally only those not
/// under a negation.
fn paths(e: &BoolExpr, positive_only: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut under_not: Vec<Vec<usize>> = Vec::new();
    e.walk(&mut |path, sub| {
        if under_not.iter().any(|p| path.starts_with(p)) {
            return;
        }
        if let BoolExpr::Not(_) = sub {
            if positive_only {
                under_not.push(path.to_vec());
                return;
            }
        }
        out.push(path.to_vec());
    });
    out
}

fn candidates(set: &RequirementSet) -> Vec<String> {
    let env = FragmentEnv::from_set(set);
    let frags: Vec<&str> = env.fragment_ids().collect();
    set.iter()
        .filter(|r| r.timing.is_none() && !frags.contains(&r.id.as_str()))
        .map(|r| r.id.clone())
        .collect()
}

#[test]
fn extract_then_inline_is_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 60 {
        let set = retune_testkit::requirement_set(&mut rng, 8, 2);
        let Some(id) = candidates(&set).choose(&mut rng).cloned() else { continue };
        let req = set.get(&id).unwrap();
        let field = *[Field::IfClause, Field::Response].choose(&mut rng).unwrap();
        let Some(root) = req.field(field) else { continue };
        let path = paths(root, false).choose(&mut rng).unwrap().clone();
        let sel = Selection::new(id.clone(), field, path);
        let comp = req.component.clone();
        let (mid, obligations) =
            extract_requirement(&set, &[sel.clone()], "EXTRACTED", &comp, &ExtractOptions::default())
                .unwrap_or_else(|e| panic!("{sel}: {e}"));
        for o in &obligations {
            assert_eq!(o.check().unwrap().verdict.kind, VerdictKind::Equivalent, "{sel}");
        }
        let (back, _) = inline_requirement(&mid, "EXTRACTED", false).unwrap();
        assert_eq!(back.len(), set.len());
        let env = FragmentEnv::from_set(&set);
        for r in set.iter() {
            let after = back.get(&r.id).unwrap();
            let (_, f, g) = translate_pair(r, after, FragmentResolution::Inline(&env)).unwrap();
            assert_eq!(check_equivalence(&g, &f).unwrap().kind, VerdictKind::Equivalent, "{}", r.id);
        }
        checked += 1;
    }
}

#[test]
fn merged_response_parts_strengthen() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 40 {
        let set = retune_testkit::requirement_set(&mut rng, 8, 0);
        let mut sites: Vec<Selection> = Vec::new();
        for id in candidates(&set) {
            let req = set.get(&id).unwrap();
            if let Some(p) = paths(&req.response, true).choose(&mut rng) {
                sites.push(Selection::new(id, Field::Response, p.clone()));
            }
        }
        sites.truncate(rng.gen_range(2..=3));
        if sites.len() < 2 {
            continue;
        }
        let comp = set.get(&sites[0].requirement).unwrap().component.clone();
        let Ok((_, obligations)) = merge_part_definitions(&set, &sites, "MERGED", &comp, &ExtractOptions::default())
        else {
            continue;
        };
        for o in obligations {
            let kind = o.check().unwrap().verdict.kind;
            assert!(
                matches!(kind, VerdictKind::Equivalent | VerdictKind::RefactoredImpliesOriginal),
                "{}: {kind}",
                o.refactored_id
            );
        }
        checked += 1;
    }
}

#[test]
fn conjoining_to_the_response_never_weakens() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let set = retune_testkit::requirement_set(&mut rng, 4, 0);
        let original = set.iter().next().unwrap();
        let mut stronger = original.clone();
        let extra = retune_core::fretish::parse_expr(&retune_testkit::bool_text(&mut rng, 2, false)).unwrap();
        stronger.response = BoolExpr::and(stronger.response.clone(), extra);
        let o = Obligation::build("strengthen", original, &stronger, &FragmentEnv::empty(), VerdictKind::RefactoredImpliesOriginal)
            .unwrap();
        assert!(o.check().unwrap().passed);
    }
}
