use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use retune_core::abstraction::AtomMap;
use retune_core::fretish::is_reference_name;
use retune_core::refactor::rename_requirement;
use retune_core::store::RequirementSet;
use retune_core::translate::{translate, FragmentEnv, FragmentResolution};

fn translations(set: &RequirementSet) -> Vec<(String, retune_ltl::Formula)> {
    let env = FragmentEnv::from_set(set);
    set.iter()
        .map(|r| {
            let f = translate(r, FragmentResolution::AsAtom(&env), &mut AtomMap::new()).unwrap();
            (r.id.clone(), f)
        })
        .collect()
}

/// Renames a random requirement in each of 200 random sets and checks that
/// nothing dangles and every translation changes only by the renaming.
#[test]
fn random_renames_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for round in 0..200 {
        let set = retune_testkit::requirement_set(&mut rng, 20, 3);
        let ids: Vec<String> = set.ids().map(String::from).collect();
        let old = ids[rng.gen_range(0..ids.len())].clone();
        let needs_caps = !set.referencing(&old).is_empty();
        let new = if needs_caps || rng.gen_bool(0.5) {
            format!("RENAMED_{round}")
        } else {
            format!("renamed{round}")
        };
        let out = rename_requirement(&set, &old, &new).unwrap_or_else(|e| panic!("round {round}: {e}"));
        out.validate().unwrap();
        assert_eq!(out.len(), set.len());
        for r in out.iter() {
            assert!(r.parents.iter().all(|p| p != &old && out.contains(p)));
            assert!(r.depends.iter().all(|d| d != &old && out.contains(d)));
            assert!(r.references().iter().all(|x| x != &old && out.contains(x)));
        }
        let before = translations(&set);
        let after = translations(&out);
        for ((id_b, f_b), (id_a, f_a)) in before.iter().zip(&after) {
            let expected_id = if *id_b == old { &new } else { id_b };
            assert_eq!(id_a, expected_id);
            let renamed = f_b.rename_props(&|p: &str| if p == old { new.clone() } else { p.to_string() });
            assert_eq!(&renamed, f_a, "round {round}, {id_b}");
        }
        if needs_caps {
            assert!(is_reference_name(&new));
        }
    }
}
