//! Canonical text form.
//!
//! Clauses are always parenthesised, operators are surrounded by single
//! spaces, and nested binary operators get explicit parentheses except for
//! left-nested chains of the same operator, which the parser rebuilds
//! identically. Comparisons inside a binary operator are parenthesised, so
//! `(x > 1) | (x < 0)` keeps the look of the source texts.

use std::fmt;

use super::ast::*;

pub fn render_requirement(req: &Requirement) -> String {
    let mut out = String::new();
    if let Some(w) = &req.condition.when_clause {
        out.push_str(&format!("when ({}) ", render_expr(w)));
    }
    if let Some(i) = &req.condition.if_clause {
        out.push_str(&format!("if ({}) ", render_expr(i)));
    }
    out.push_str(&req.component);
    out.push_str(" shall ");
    if let Some(t) = &req.timing {
        out.push_str(&format!("until ({}) ", render_expr(t.stop())));
    }
    out.push_str(&format!("({})", render_expr(&req.response)));
    out
}

pub fn render_expr(e: &BoolExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

pub fn render_atom(a: &Atom) -> String {
    match a {
        Atom::BooleanVar(n) | Atom::Reference(n) => n.clone(),
        Atom::Comparison { lhs, op, rhs } => {
            format!("{} {} {}", render_arith(lhs), op.symbol(), render_arith(rhs))
        }
    }
}

pub fn render_arith(e: &ArithExpr) -> String {
    match e {
        ArithExpr::Num(n) => n.clone(),
        ArithExpr::Null => "null".into(),
        ArithExpr::Bool(b) => b.to_string(),
        ArithExpr::Var(v) => v.clone(),
        ArithExpr::Call(f, args) => {
            let args: Vec<String> = args.iter().map(render_arith).collect();
            format!("{f}({})", args.join(", "))
        }
        ArithExpr::Bin(op, a, b) => {
            let sym = match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
            };
            let rhs = match **b {
                ArithExpr::Bin(..) => format!("({})", render_arith(b)),
                _ => render_arith(b),
            };
            format!("{} {sym} {rhs}", render_arith(a))
        }
    }
}

fn write_expr(out: &mut String, e: &BoolExpr) {
    match e {
        BoolExpr::Atom(a) => out.push_str(&render_atom(a)),
        BoolExpr::Not(a) => {
            out.push('!');
            match **a {
                BoolExpr::Atom(Atom::BooleanVar(_) | Atom::Reference(_)) | BoolExpr::Not(_) => {
                    write_expr(out, a)
                }
                _ => paren(out, a),
            }
        }
        BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
            let is_and = matches!(e, BoolExpr::And(..));
            let same = |x: &BoolExpr| matches!((x, is_and), (BoolExpr::And(..), true) | (BoolExpr::Or(..), false));
            if same(a) {
                write_expr(out, a);
            } else {
                operand(out, a);
            }
            out.push_str(if is_and { " & " } else { " | " });
            operand(out, b);
        }
    }
}

/// Operand of a binary operator: plain names and negations stand alone.
fn operand(out: &mut String, e: &BoolExpr) {
    match e {
        BoolExpr::Atom(Atom::BooleanVar(_) | Atom::Reference(_)) | BoolExpr::Not(_) => {
            write_expr(out, e)
        }
        _ => paren(out, e),
    }
}

fn paren(out: &mut String, e: &BoolExpr) {
    out.push('(');
    write_expr(out, e);
    out.push(')');
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_atom(self))
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_requirement(self))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_expr, parse_requirement};
    use super::*;

    fn canon(s: &str) -> String {
        render_requirement(&parse_requirement(s).unwrap())
    }

    #[test]
    fn sensor_bounds_form() {
        let s = "if (sensorFaults & trackingPilotCommands) Controller shall (controlObjectives)";
        assert_eq!(canon(s), s);
        assert_eq!(
            canon("if SENSOR_A_OUT_OF_BOUNDS SensorSubSystem shall !sensorA_valid"),
            "if (SENSOR_A_OUT_OF_BOUNDS) SensorSubSystem shall (!sensorA_valid)"
        );
    }

    #[test]
    fn until_precedes_response() {
        let s = canon("when ACTIVE if (a) Controller shall until NOT_ACTIVE CONTROL_OBJECTIVES & observedThrust=V2");
        assert_eq!(
            s,
            "when (ACTIVE) if (a) Controller shall until (NOT_ACTIVE) (CONTROL_OBJECTIVES & (observedThrust = V2))"
        );
    }

    #[test]
    fn chains_and_nesting() {
        let r = |s: &str| render_expr(&parse_expr(s).unwrap());
        assert_eq!(r("a & b & c"), "a & b & c");
        assert_eq!(r("a & (b & c)"), "a & (b & c)");
        assert_eq!(r("a | b & c"), "a | (b & c)");
        assert_eq!(r("(x>1)|(x<0)"), "(x > 1) | (x < 0)");
        assert_eq!(r("!(a | b) & !!c"), "!(a | b) & !!c");
        assert_eq!(r("x - (y + 1) > f(a,b)"), "x - (y + 1) > f(a, b)");
        assert_eq!(r("a => b"), "!a | b");
        assert_eq!(r("!(x > 1)"), "!(x > 1)");
    }

    #[test]
    fn render_reparses() {
        for s in [
            "a | b & c",
            "(a | b) & c",
            "!(a & (b | !c))",
            "x - y - z > 0 & (p => q)",
            "(sensorValue(S) > nominalValue + R) | (sensorValue(S) < nominalValue - R) | (sensorValue(S) = null)",
        ] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&render_expr(&e)).unwrap(), e, "{s}");
        }
    }
}
