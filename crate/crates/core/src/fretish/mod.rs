//! The FRETISH subset: `[when (E)] [if (E)] COMPONENT shall [until (E)] RESPONSE`.
//!
//! See `docs/grammar.md` for the EBNF.

mod ast;
mod lexer;
mod parser;
mod render;

pub use ast::*;
pub use parser::{parse_expr, parse_requirement, ParseError};
pub use render::{render_arith, render_atom, render_expr, render_requirement};

/// Distinct atoms of `expr`, left to right. Comparisons are identified by
/// their canonical rendering.
pub fn collect_atoms(expr: &BoolExpr) -> Vec<Atom> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    expr.walk(&mut |_, e| {
        if let BoolExpr::Atom(a) = e {
            if seen.insert(render_atom(a)) {
                out.push(a.clone());
            }
        }
    });
    out
}
