//! The sensor-bounds extraction from the case study introduction.

use retune_core::fretish::{parse_requirement, render_requirement, Field};
use retune_core::refactor::{extract_requirement, inline_requirement, ExtractOptions, RefactorError, Selection};
use retune_core::store::RequirementSet;
use retune_ltl::VerdictKind;

const R1: &str = "if (sensorA > sensorA_Max + R) | (sensorA < sensorA_Min - R) SensorSubSystem shall !sensorA_valid";
const FRAGMENT: &str =
    "if (sensorA > sensorA_Max + R) | (sensorA < sensorA_Min - R) SensorA shall SensorA_OutOfBounds";
const R1_AFTER: &str = "if SENSOR_A_OUT_OF_BOUNDS SensorSubSystem shall !sensorA_valid";

fn canonical(text: &str) -> String {
    render_requirement(&parse_requirement(text).unwrap())
}

fn before() -> RequirementSet {
    RequirementSet::from_json(&format!(r#"{{"requirements": [{{"id": "R1", "text": "{R1}"}}]}}"#)).unwrap()
}

fn extracted() -> (RequirementSet, Vec<retune_core::refactor::Obligation>) {
    let opts = ExtractOptions {
        placeholder: None,
        flag: Some("SensorA_OutOfBounds".into()),
    };
    extract_requirement(
        &before(),
        &[Selection::field("R1", Field::IfClause)],
        "SENSOR_A_OUT_OF_BOUNDS",
        "SensorA",
        &opts,
    )
    .unwrap()
}

#[test]
fn extract_matches_published_texts() {
    let (after, obligations) = extracted();
    assert_eq!(render_requirement(after.get("R1").unwrap()), canonical(R1_AFTER));
    assert_eq!(
        render_requirement(after.get("SENSOR_A_OUT_OF_BOUNDS").unwrap()),
        canonical(FRAGMENT)
    );
    assert_eq!(after.get("R1").unwrap().depends, ["SENSOR_A_OUT_OF_BOUNDS"]);
    assert!(after.get("R1").unwrap().rationale.starts_with("[extract] before: "));
    assert_eq!(obligations.len(), 1);
    let checked = obligations[0].check().unwrap();
    assert_eq!(checked.verdict.kind, VerdictKind::Equivalent);
    assert!(checked.passed);
}

#[test]
fn inline_restores_the_original() {
    let (after, _) = extracted();
    assert!(matches!(
        inline_requirement(&after, "SENSOR_A_OUT_OF_BOUNDS", false),
        Err(RefactorError::ComponentMismatch { .. })
    ));
    let (restored, obligations) = inline_requirement(&after, "SENSOR_A_OUT_OF_BOUNDS", true).unwrap();
    assert_eq!(restored.len(), 1);
    let r1 = restored.get("R1").unwrap();
    assert_eq!(render_requirement(r1), canonical(R1));
    assert!(r1.depends.is_empty());
    assert_eq!(obligations[0].check().unwrap().verdict.kind, VerdictKind::Equivalent);
}
