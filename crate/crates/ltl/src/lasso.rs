//! Ultimately periodic words and an exact evaluator for them.
//!
//! The evaluator is deliberately independent of the automaton code: it works
//! on the finite position graph of `prefix · loop^ω` and computes `U`/`R` as
//! least/greatest fixpoints. It is the reference the tableau is checked
//! against.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;

/// The set of propositions that hold at one position.
pub type Letter = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("lasso loop must contain at least one letter")]
    EmptyLoop,
    #[error("loop length bound must be at least 1")]
    ZeroLoopBound,
    #[error("too many propositions to enumerate ({0})")]
    TooManyProps(usize),
}

/// The infinite word `prefix · loop^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoTrace {
    prefix: Vec<Letter>,
    #[serde(rename = "loop")]
    cycle: Vec<Letter>,
}

impl LassoTrace {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(LassoTrace { prefix, cycle })
    }

    /// Builds a trace from proposition names, for tests and fixtures.
    pub fn from_names(prefix: &[&[&str]], cycle: &[&[&str]]) -> Result<Self, LassoError> {
        let conv = |ls: &[&[&str]]| -> Vec<Letter> {
            ls.iter()
                .map(|l| l.iter().map(|s| s.to_string()).collect())
                .collect()
        };
        LassoTrace::new(conv(prefix), conv(cycle))
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of distinct positions (`|prefix| + |loop|`).
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn letter(&self, pos: usize) -> &Letter {
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.cycle[pos - self.prefix.len()]
        }
    }

    pub fn successor(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = |f: &mut fmt::Formatter<'_>, l: &Letter| -> fmt::Result {
            let names: Vec<&str> = l.iter().map(String::as_str).collect();
            write!(f, "{{{}}}", names.join(","))
        };
        for l in &self.prefix {
            letter(f, l)?;
            f.write_str(" ")?;
        }
        f.write_str("(")?;
        for (i, l) in self.cycle.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            letter(f, l)?;
        }
        f.write_str(")^w")
    }
}

/// Decides `trace ⊨ f` under standard infinite-word semantics.
pub fn eval_on_lasso(f: &Formula, trace: &LassoTrace) -> bool {
    truth_values(f, trace)[0]
}

/// Truth value of `f` at every position of the trace.
fn truth_values(f: &Formula, t: &LassoTrace) -> Vec<bool> {
    let n = t.positions();
    let succ: Vec<usize> = (0..n).map(|i| t.successor(i)).collect();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Prop(p) => (0..n).map(|i| t.letter(i).contains(p)).collect(),
        Formula::Not(a) => truth_values(a, t).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip(truth_values(a, t), truth_values(b, t), |x, y| x && y),
        Formula::Or(a, b) => zip(truth_values(a, t), truth_values(b, t), |x, y| x || y),
        Formula::Implies(a, b) => zip(truth_values(a, t), truth_values(b, t), |x, y| !x || y),
        Formula::Next(a) => {
            let va = truth_values(a, t);
            succ.iter().map(|&s| va[s]).collect()
        }
        Formula::Until(a, b) => {
            let (va, vb) = (truth_values(a, t), truth_values(b, t));
            fixpoint(false, &succ, |i, next| vb[i] || (va[i] && next))
        }
        Formula::WeakUntil(a, b) => {
            let (va, vb) = (truth_values(a, t), truth_values(b, t));
            fixpoint(true, &succ, |i, next| vb[i] || (va[i] && next))
        }
        Formula::Release(a, b) => {
            let (va, vb) = (truth_values(a, t), truth_values(b, t));
            fixpoint(true, &succ, |i, next| vb[i] && (va[i] || next))
        }
        Formula::Globally(a) => {
            let va = truth_values(a, t);
            fixpoint(true, &succ, |i, next| va[i] && next)
        }
        Formula::Finally(a) => {
            let va = truth_values(a, t);
            fixpoint(false, &succ, |i, next| va[i] || next)
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Iterates `v[i] = step(i, v[succ(i)])` from `start` until stable: least
/// fixpoint when starting from `false`, greatest when starting from `true`.
fn fixpoint(start: bool, succ: &[usize], step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let mut v = vec![start; succ.len()];
    loop {
        let mut changed = false;
        for i in (0..succ.len()).rev() {
            let nv = step(i, v[succ[i]]);
            if nv != v[i] {
                v[i] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Every lasso with `|prefix| <= max_prefix` and `1 <= |loop| <= max_loop`
/// over `props`, in a fixed order: by prefix length, then loop length, then
/// letters counted in binary.
pub fn enumerate_lassos<I, S>(
    props: I,
    max_prefix: usize,
    max_loop: usize,
) -> Result<LassoIter, LassoError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    if max_loop == 0 {
        return Err(LassoError::ZeroLoopBound);
    }
    let props: Vec<String> = props
        .into_iter()
        .map(Into::into)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if props.len() > 16 {
        return Err(LassoError::TooManyProps(props.len()));
    }
    Ok(LassoIter {
        letters: 1 << props.len(),
        props,
        max_prefix,
        max_loop,
        prefix_len: 0,
        loop_len: 1,
        digits: vec![0; 1],
        done: false,
    })
}

/// Iterator returned by [`enumerate_lassos`].
#[derive(Debug, Clone)]
pub struct LassoIter {
    props: Vec<String>,
    letters: usize,
    max_prefix: usize,
    max_loop: usize,
    prefix_len: usize,
    loop_len: usize,
    digits: Vec<usize>,
    done: bool,
}

impl LassoIter {
    fn letter(&self, code: usize) -> Letter {
        self.props
            .iter()
            .enumerate()
            .filter(|(i, _)| code & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect()
    }

    fn advance(&mut self) {
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < self.letters {
                return;
            }
            *d = 0;
        }
        // odometer wrapped: move to the next shape
        if self.loop_len < self.max_loop {
            self.loop_len += 1;
        } else if self.prefix_len < self.max_prefix {
            self.prefix_len += 1;
            self.loop_len = 1;
        } else {
            self.done = true;
        }
        self.digits = vec![0; self.prefix_len + self.loop_len];
    }
}

impl Iterator for LassoIter {
    type Item = LassoTrace;

    fn next(&mut self) -> Option<LassoTrace> {
        if self.done {
            return None;
        }
        let letters: Vec<Letter> = self.digits.iter().map(|&d| self.letter(d)).collect();
        let (prefix, cycle) = letters.split_at(self.prefix_len);
        let trace = LassoTrace {
            prefix: prefix.to_vec(),
            cycle: cycle.to_vec(),
        };
        self.advance();
        Some(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn globally_on_constant_loop() {
        let t = LassoTrace::from_names(&[], &[&["p"]]).unwrap();
        assert!(eval_on_lasso(&parse("G p"), &t));
    }

    #[test]
    fn finally_never_reached() {
        let t = LassoTrace::from_names(&[&[]], &[&[]]).unwrap();
        assert!(!eval_on_lasso(&parse("F p"), &t));
    }

    #[test]
    fn until_through_prefix() {
        let t = LassoTrace::from_names(&[&["p"], &["p"]], &[&["q"]]).unwrap();
        assert!(eval_on_lasso(&parse("p U q"), &t));
        let t = LassoTrace::from_names(&[], &[&["p"]]).unwrap();
        assert!(!eval_on_lasso(&parse("p U q"), &t));
        assert!(eval_on_lasso(&parse("p W q"), &t));
    }

    #[test]
    fn loop_wraps_to_its_start() {
        // X-chains must wrap to the first loop position, not position 0.
        let t = LassoTrace::from_names(&[&["a"]], &[&["b"], &["c"]]).unwrap();
        assert!(eval_on_lasso(&parse("a & X b & X X c & X X X b"), &t));
        assert!(eval_on_lasso(&parse("G F c & F G !a"), &t));
    }

    #[test]
    fn empty_loop_is_rejected() {
        assert_eq!(LassoTrace::new(vec![], vec![]), Err(LassoError::EmptyLoop));
    }

    #[test]
    fn enumeration_counts() {
        let all: Vec<_> = enumerate_lassos(["p"], 0, 1).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|t| t.prefix().is_empty()));
        assert_eq!(enumerate_lassos(Vec::<String>::new(), 1, 1).unwrap().count(), 2);
        assert_eq!(enumerate_lassos(["p", "q"], 0, 1).unwrap().count(), 4);
        assert!(matches!(
            enumerate_lassos(["p"], 1, 0),
            Err(LassoError::ZeroLoopBound)
        ));
    }

    #[test]
    fn enumeration_is_exhaustive_and_distinct() {
        // sum over prefix 0..=2, loop 1..=2 of 2^(p+l) with one prop
        let expected: usize = (0..=2)
            .flat_map(|p| (1..=2).map(move |l| 1usize << (p + l)))
            .sum();
        let all: BTreeSet<String> = enumerate_lassos(["p"], 2, 2)
            .unwrap()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(all.len(), expected);
    }
}
