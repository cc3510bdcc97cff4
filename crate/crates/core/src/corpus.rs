//! The shipped case-study corpus: a reconstruction of an aero-engine
//! controller requirement set (14 parents, 28 children, 9 catalogued
//! fragments). The original set is not public; this one was rebuilt to match
//! its published texts, per-parent structure and fragment counts.

use crate::store::RequirementSet;

pub const UC5_BEFORE_JSON: &str = include_str!("../corpus/uc5_before.json");

pub fn uc5_before() -> RequirementSet {
    RequirementSet::from_json(UC5_BEFORE_JSON).expect("shipped corpus is valid")
}
