//! Seeded random generators for LTL formulas, FRETISH requirement texts and
//! requirement sets. Shared by the integration and acceptance tests.

use rand::seq::SliceRandom;
use rand::Rng;

use retune_core::store::RequirementSet;
use retune_ltl::Formula;

/// A random formula over `props` with exactly `size` syntax-tree nodes.
pub fn formula_of_size<R: Rng>(rng: &mut R, props: &[&str], size: usize) -> Formula {
    assert!(size >= 1);
    if size == 1 {
        return match rng.gen_range(0..props.len() + 2) {
            0 => Formula::True,
            1 => Formula::False,
            i => Formula::prop(props[i - 2]),
        };
    }
    let unary = size == 2 || rng.gen_bool(0.4);
    if unary {
        let a = formula_of_size(rng, props, size - 1);
        return match rng.gen_range(0..4) {
            0 => Formula::not(a),
            1 => Formula::next(a),
            2 => Formula::globally(a),
            _ => Formula::finally(a),
        };
    }
    let left = rng.gen_range(1..size - 1);
    let a = formula_of_size(rng, props, left);
    let b = formula_of_size(rng, props, size - 1 - left);
    match rng.gen_range(0..6) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        3 => Formula::until(a, b),
        4 => Formula::weak_until(a, b),
        _ => Formula::release(a, b),
    }
}

/// A random formula with between 1 and `max_size` nodes.
pub fn formula<R: Rng>(rng: &mut R, props: &[&str], max_size: usize) -> Formula {
    let size = rng.gen_range(1..=max_size);
    formula_of_size(rng, props, size)
}

const VARS: &[&str] = &[
    "x", "y", "sensorA", "sensorA_valid", "speed_1", "pilotInput", "observedThrust", "mode2",
];
const REFS: &[&str] = &["SENSOR_FAULTS", "ACTIVE", "FRAG_2", "NOT_ACTIVE"];
const COMPONENTS: &[&str] = &["Controller", "SensorSubSystem", "comp_1", "FSM"];
const CMP: &[&str] = &["<", "<=", ">", ">=", "=", "==", "!="];

fn ws<R: Rng>(rng: &mut R) -> &'static str {
    ["", " ", "  "][rng.gen_range(0..3)]
}

fn number<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..4) {
        0 => format!("{}.{}", rng.gen_range(0..100), rng.gen_range(0..10)),
        1 => format!("-{}", rng.gen_range(1..50)),
        _ => rng.gen_range(0..1000).to_string(),
    }
}

fn arith<R: Rng>(rng: &mut R, depth: u32) -> String {
    let pick = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..6) };
    match pick {
        0 => number(rng),
        1 | 2 => VARS.choose(rng).unwrap().to_string(),
        3 => {
            let n = rng.gen_range(1..=2);
            let args: Vec<String> = (0..n).map(|_| arith(rng, depth - 1)).collect();
            format!("f{}({})", rng.gen_range(0..3), args.join(", "))
        }
        4 => {
            let op = if rng.gen_bool(0.5) { "+" } else { "-" };
            format!("{}{}{op}{}{}", arith(rng, depth - 1), ws(rng), ws(rng), arith(rng, depth - 1))
        }
        _ => format!("({})", arith(rng, depth - 1)),
    }
}

fn comparison<R: Rng>(rng: &mut R) -> String {
    let op = CMP.choose(rng).unwrap();
    let rhs = match rng.gen_range(0..8) {
        0 => "null".to_string(),
        1 => "true".to_string(),
        2 => "false".to_string(),
        _ => arith(rng, 2),
    };
    format!("{}{}{op}{}{rhs}", arith(rng, 2), ws(rng), ws(rng))
}

/// Random boolean expression text using every surface form the parser
/// accepts: `&`/`&&`, `|`/`||`, `=>`, `!`, comparisons and references.
pub fn bool_text<R: Rng>(rng: &mut R, depth: u32, refs: bool) -> String {
    let leaves = if refs { 4 } else { 3 };
    let pick = if depth == 0 { rng.gen_range(0..leaves) } else { rng.gen_range(0..leaves + 5) };
    match (pick, refs) {
        (0, _) | (1, _) => VARS.choose(rng).unwrap().to_string(),
        (2, _) => format!("({})", comparison(rng)),
        (3, true) => REFS.choose(rng).unwrap().to_string(),
        _ => {
            let sub = |rng: &mut R| bool_text(rng, depth - 1, refs);
            match rng.gen_range(0..6) {
                0 => format!("!{}", paren_unless_leaf(rng, sub)),
                1 => format!("({})", sub(rng)),
                2 => format!("{} {} {}", sub(rng), ["&", "&&"][rng.gen_range(0..2)], sub(rng)),
                3 => format!("{} {} {}", sub(rng), ["|", "||"][rng.gen_range(0..2)], sub(rng)),
                4 => format!("({} => {})", sub(rng), sub(rng)),
                _ => format!("({}) & ({})", sub(rng), sub(rng)),
            }
        }
    }
}

fn paren_unless_leaf<R: Rng>(rng: &mut R, sub: impl Fn(&mut R) -> String) -> String {
    let s = sub(rng);
    if s.chars().all(|c| c.is_alphanumeric() || c == '_') {
        s
    } else {
        format!("({s})")
    }
}

/// Random requirement text `[when (E)] [if (E)] C shall [until (E)] (R)`.
pub fn requirement_text<R: Rng>(rng: &mut R) -> String {
    let mut parts: Vec<String> = Vec::new();
    let clauses = rng.gen_range(0..=2);
    for i in 0..clauses {
        let kw = if clauses == 2 && i == 0 { "when" } else { ["if", "when"][rng.gen_range(0..2)] };
        parts.push(format!("{kw} ({})", bool_text(rng, 3, true)));
    }
    parts.push(COMPONENTS.choose(rng).unwrap().to_string());
    parts.push("shall".into());
    if rng.gen_bool(0.4) {
        parts.push(format!("until ({})", bool_text(rng, 2, true)));
    }
    parts.push(format!("({})", bool_text(rng, 3, true)));
    parts.join(" ")
}

const FRAGMENT_IDS: &[&str] = &["FRAG_A", "SENSOR_OK", "LIMITS_2"];

/// A valid random set with up to `max_reqs` requirements of which up to
/// `max_frags` are fragments referenced by the others.
pub fn requirement_set<R: Rng>(rng: &mut R, max_reqs: usize, max_frags: usize) -> RequirementSet {
    let frags = rng.gen_range(0..=max_frags.min(max_reqs.saturating_sub(1)).min(FRAGMENT_IDS.len()));
    let others = rng.gen_range(1..=max_reqs - frags);
    let mut entries: Vec<String> = Vec::new();
    for (i, id) in FRAGMENT_IDS[..frags].iter().enumerate() {
        entries.push(format!(
            r#"{{"id": "{id}", "text": "if ({}) FragComp shall (flag_{i})"}}"#,
            bool_text(rng, 2, false)
        ));
    }
    let mut ids: Vec<String> = Vec::new();
    for i in 0..others {
        let id = match rng.gen_range(0..3) {
            0 => format!("R_{i}"),
            1 => format!("Req{i}"),
            _ => format!("UC5_R_{i}.{}", rng.gen_range(1..4)),
        };
        let mut parents: Vec<String> = Vec::new();
        if !ids.is_empty() && rng.gen_bool(0.5) {
            parents.push(ids.choose(rng).unwrap().clone());
        }
        let mut depends: Vec<String> = Vec::new();
        let slot = |rng: &mut R, depends: &mut Vec<String>| -> String {
            let e = bool_text(rng, 2, false);
            if frags > 0 && rng.gen_bool(0.5) {
                let f = FRAGMENT_IDS[rng.gen_range(0..frags)].to_string();
                if !depends.contains(&f) {
                    depends.push(f.clone());
                }
                format!("{f} & ({e})")
            } else {
                e
            }
        };
        let cond = slot(rng, &mut depends);
        let resp = slot(rng, &mut depends);
        let until = if rng.gen_bool(0.3) {
            format!(" until ({})", slot(rng, &mut depends))
        } else {
            String::new()
        };
        if !ids.is_empty() && rng.gen_bool(0.3) {
            let d = ids.choose(rng).unwrap().clone();
            if !parents.contains(&d) {
                depends.push(d);
            }
        }
        let quote = |v: &[String]| v.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(", ");
        entries.push(format!(
            r#"{{"id": "{id}", "parents": [{}], "depends": [{}], "text": "if ({cond}) {} shall{until} ({resp})"}}"#,
            quote(&parents),
            quote(&depends),
            COMPONENTS.choose(rng).unwrap(),
        ));
        ids.push(id);
    }
    entries.shuffle(rng);
    let json = format!(r#"{{"requirements": [{}]}}"#, entries.join(",\n"));
    RequirementSet::from_json(&json).unwrap_or_else(|e| panic!("generated set invalid: {e}\n{json}"))
}
