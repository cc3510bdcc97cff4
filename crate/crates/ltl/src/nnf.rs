//! Negation normal form.

use crate::formula::Formula;

/// Pushes negations down to propositions and eliminates `->`.
///
/// `W`, `G` and `F` are kept so the result still reads like its input.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false, false)
}

/// Negation normal form over the `X`/`U`/`R` core: `G a` becomes
/// `false R a`, `F a` becomes `true U a`, and `a W b` becomes `b R (a | b)`.
pub fn to_core(f: &Formula) -> Formula {
    nnf(f, false, true)
}

/// True when negation only applies to propositions and no `->` remains.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) => true,
        Formula::Not(a) => matches!(**a, Formula::Prop(_)),
        Formula::Implies(..) => false,
        Formula::Next(a) | Formula::Globally(a) | Formula::Finally(a) => is_nnf(a),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Until(a, b)
        | Formula::WeakUntil(a, b)
        | Formula::Release(a, b) => is_nnf(a) && is_nnf(b),
    }
}

fn nnf(f: &Formula, negate: bool, core: bool) -> Formula {
    let pos = |g: &Formula| nnf(g, false, core);
    let neg = |g: &Formula| nnf(g, true, core);
    match (f, negate) {
        (Formula::True, false) | (Formula::False, true) => Formula::True,
        (Formula::True, true) | (Formula::False, false) => Formula::False,
        (Formula::Prop(_), false) => f.clone(),
        (Formula::Prop(_), true) => Formula::not(f.clone()),
        (Formula::Not(a), _) => nnf(a, !negate, core),
        (Formula::And(a, b), false) => Formula::and(pos(a), pos(b)),
        (Formula::And(a, b), true) => Formula::or(neg(a), neg(b)),
        (Formula::Or(a, b), false) => Formula::or(pos(a), pos(b)),
        (Formula::Or(a, b), true) => Formula::and(neg(a), neg(b)),
        (Formula::Implies(a, b), false) => Formula::or(neg(a), pos(b)),
        (Formula::Implies(a, b), true) => Formula::and(pos(a), neg(b)),
        (Formula::Next(a), _) => Formula::next(nnf(a, negate, core)),
        (Formula::Until(a, b), false) => Formula::until(pos(a), pos(b)),
        (Formula::Until(a, b), true) => Formula::release(neg(a), neg(b)),
        (Formula::Release(a, b), false) => Formula::release(pos(a), pos(b)),
        (Formula::Release(a, b), true) => Formula::until(neg(a), neg(b)),
        (Formula::WeakUntil(a, b), false) => {
            if core {
                Formula::release(pos(b), Formula::or(pos(a), pos(b)))
            } else {
                Formula::weak_until(pos(a), pos(b))
            }
        }
        // !(a W b) == !b U (!a & !b)
        (Formula::WeakUntil(a, b), true) => {
            Formula::until(neg(b), Formula::and(neg(a), neg(b)))
        }
        (Formula::Globally(a), false) => globally(pos(a), core),
        (Formula::Globally(a), true) => finally(neg(a), core),
        (Formula::Finally(a), false) => finally(pos(a), core),
        (Formula::Finally(a), true) => globally(neg(a), core),
    }
}

fn globally(a: Formula, core: bool) -> Formula {
    if core {
        Formula::release(Formula::False, a)
    } else {
        Formula::globally(a)
    }
}

fn finally(a: Formula, core: bool) -> Formula {
    if core {
        Formula::until(Formula::True, a)
    } else {
        Formula::finally(a)
    }
}
