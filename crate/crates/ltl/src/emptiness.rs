//! Nested depth-first search for accepting lassos.

use crate::buchi::BuchiAutomaton;
use crate::lasso::LassoTrace;

/// Explicit successor graph with tagged edges. Tags let callers map a path
/// back to the edge (and guard) that produced each step.
pub(crate) struct Graph {
    pub initial: Vec<usize>,
    pub succ: Vec<Vec<(usize, usize)>>,
    pub accepting: Vec<bool>,
}

/// One step of a path: the source state and the index of the edge taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Step {
    pub from: usize,
    pub edge: usize,
}

pub(crate) struct Run {
    pub stem: Vec<Step>,
    pub cycle: Vec<Step>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Color {
    White,
    Cyan,
    Blue,
}

/// Courcoubetis–Vardi–Wolper–Yannakakis nested DFS, iterative, with the
/// usual early exit when the red search touches the blue stack.
pub(crate) fn find_accepting_lasso(g: &Graph) -> Option<Run> {
    let n = g.succ.len();
    let mut color = vec![Color::White; n];
    let mut red = vec![false; n];

    for &root in &g.initial {
        if color[root] != Color::White {
            continue;
        }
        // blue stack: (state, next edge index); `via[i]` is the edge used to
        // reach blue[i + 1]
        let mut blue: Vec<(usize, usize)> = vec![(root, 0)];
        let mut via: Vec<Step> = Vec::new();
        color[root] = Color::Cyan;
        while let Some(&mut (s, ref mut next)) = blue.last_mut() {
            if let Some(&(t, tag)) = g.succ[s].get(*next) {
                *next += 1;
                match color[t] {
                    Color::White => {
                        color[t] = Color::Cyan;
                        via.push(Step { from: s, edge: tag });
                        blue.push((t, 0));
                    }
                    Color::Cyan if g.accepting[s] || g.accepting[t] => {
                        let k = blue.iter().position(|&(b, _)| b == t).unwrap();
                        let mut cycle = via[k..].to_vec();
                        cycle.push(Step { from: s, edge: tag });
                        return Some(Run {
                            stem: via[..k].to_vec(),
                            cycle,
                        });
                    }
                    _ => {}
                }
                continue;
            }
            if g.accepting[s] {
                if let Some((path, t)) = red_search(g, s, &color, &mut red) {
                    let k = blue.iter().position(|&(b, _)| b == t).unwrap();
                    let mut cycle = via[k..].to_vec();
                    cycle.extend(path);
                    return Some(Run {
                        stem: via[..k].to_vec(),
                        cycle,
                    });
                }
            }
            color[s] = Color::Blue;
            blue.pop();
            via.pop();
        }
    }
    None
}

/// Searches from `seed` for a state on the blue stack; returns the path and
/// the cyan state it closes on.
fn red_search(
    g: &Graph,
    seed: usize,
    color: &[Color],
    red: &mut [bool],
) -> Option<(Vec<Step>, usize)> {
    let mut stack: Vec<(usize, usize)> = vec![(seed, 0)];
    let mut path: Vec<Step> = Vec::new();
    red[seed] = true;
    while let Some(&mut (s, ref mut next)) = stack.last_mut() {
        if let Some(&(t, tag)) = g.succ[s].get(*next) {
            *next += 1;
            if color[t] == Color::Cyan {
                path.push(Step { from: s, edge: tag });
                return Some((path, t));
            }
            if !red[t] {
                red[t] = true;
                path.push(Step { from: s, edge: tag });
                stack.push((t, 0));
            }
            continue;
        }
        stack.pop();
        path.pop();
    }
    None
}

/// Outcome of an emptiness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// The language is non-empty; the trace is an accepted word.
    NonEmpty(LassoTrace),
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(&self) -> Option<&LassoTrace> {
        match self {
            Emptiness::Empty => None,
            Emptiness::NonEmpty(t) => Some(t),
        }
    }
}

/// Decides language emptiness; generalized automata are degeneralized first.
pub fn is_empty(aut: &BuchiAutomaton) -> Emptiness {
    let owned;
    let aut = if aut.is_degeneralized() {
        aut
    } else {
        owned = aut.degeneralize();
        &owned
    };
    let graph = Graph {
        initial: aut.initial().to_vec(),
        succ: (0..aut.num_states())
            .map(|q| {
                aut.edges(q)
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e.target, i))
                    .collect()
            })
            .collect(),
        accepting: (0..aut.num_states()).map(|q| aut.is_accepting(q)).collect(),
    };
    match find_accepting_lasso(&graph) {
        None => Emptiness::Empty,
        Some(run) => {
            let letter = |s: &Step| aut.edges(s.from)[s.edge].guard.minimal_letter(aut.props());
            let prefix = run.stem.iter().map(letter).collect();
            let cycle = run.cycle.iter().map(letter).collect();
            match LassoTrace::new(prefix, cycle) {
                Ok(t) => Emptiness::NonEmpty(t),
                Err(_) => unreachable!("accepting cycles have at least one edge"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buchi::ltl_to_buchi;
    use crate::formula::Formula;
    use crate::lasso::eval_on_lasso;

    fn check(s: &str) -> Emptiness {
        is_empty(&ltl_to_buchi(&s.parse::<Formula>().unwrap()))
    }

    #[test]
    fn false_is_empty() {
        assert!(check("false").is_empty());
    }

    #[test]
    fn contradiction_is_empty() {
        assert!(check("G p & G !p").is_empty());
        assert!(check("F p & G !p").is_empty());
        assert!(check("G F p & F G !p").is_empty());
        assert!(check("G (c -> (r W s)) & F (c & !r & !s)").is_empty());
    }

    #[test]
    fn finally_has_a_p_witness() {
        let result = check("F p");
        let w = result.witness().expect("non-empty");
        assert!(w.prefix().iter().chain(w.cycle()).any(|l| l.contains("p")));
        assert!(eval_on_lasso(&"F p".parse().unwrap(), w));
    }

    #[test]
    fn witnesses_satisfy_their_formula() {
        for s in [
            "G F p & G F !p",
            "p U (q & X !p)",
            "(a W b) & F !a",
            "X X X p & G (p -> X !p)",
            "G (c -> (r W s)) & F (c & !s)",
        ] {
            let f: Formula = s.parse().unwrap();
            let result = check(s);
            let w = result.witness().unwrap_or_else(|| panic!("{s} should be satisfiable"));
            assert!(eval_on_lasso(&f, w), "{s}: {w}");
        }
    }
}
