//! Büchi automata and the GPVW tableau translation.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::emptiness::{find_accepting_lasso, Graph};
use crate::formula::Formula;
use crate::lasso::{LassoTrace, Letter};
use crate::nnf::to_core;

/// A conjunction of proposition literals, indices into the automaton's
/// proposition list. Guards built by the tableau are always satisfiable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub pos: BTreeSet<usize>,
    pub neg: BTreeSet<usize>,
}

impl Guard {
    pub fn is_satisfiable(&self) -> bool {
        self.pos.is_disjoint(&self.neg)
    }

    pub fn matches(&self, props: &[String], letter: &Letter) -> bool {
        self.pos.iter().all(|&p| letter.contains(&props[p]))
            && self.neg.iter().all(|&p| !letter.contains(&props[p]))
    }

    /// The smallest letter satisfying the guard.
    pub fn minimal_letter(&self, props: &[String]) -> Letter {
        self.pos.iter().map(|&p| props[p].clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub guard: Guard,
    pub target: usize,
}

/// A (generalized) Büchi automaton with literal-conjunction edge guards.
///
/// A run is accepting when it visits every acceptance set infinitely often.
/// With no acceptance sets every infinite run accepts.
#[derive(Debug, Clone)]
pub struct BuchiAutomaton {
    props: Vec<String>,
    initial: Vec<usize>,
    edges: Vec<Vec<Edge>>,
    acceptance: Vec<BTreeSet<usize>>,
}

impl BuchiAutomaton {
    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn edges(&self, state: usize) -> &[Edge] {
        &self.edges[state]
    }

    pub fn acceptance_sets(&self) -> &[BTreeSet<usize>] {
        &self.acceptance
    }

    pub fn is_degeneralized(&self) -> bool {
        self.acceptance.len() == 1
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.acceptance.iter().all(|set| set.contains(&state))
    }

    /// Counting construction: one copy of the state space per acceptance
    /// set, advancing the counter when the current set is visited. Only the
    /// reachable part is built.
    pub fn degeneralize(&self) -> BuchiAutomaton {
        if self.acceptance.len() == 1 {
            return self.clone();
        }
        if self.acceptance.is_empty() {
            let mut out = self.clone();
            out.acceptance = vec![(0..self.num_states()).collect()];
            return out;
        }
        let k = self.acceptance.len();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue: VecDeque<(usize, usize, usize)> = VecDeque::new();
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        let mut intern = |key: (usize, usize), edges: &mut Vec<Vec<Edge>>, queue: &mut VecDeque<_>| {
            *index.entry(key).or_insert_with(|| {
                edges.push(Vec::new());
                queue.push_back((key.0, key.1, edges.len() - 1));
                edges.len() - 1
            })
        };
        let initial: Vec<usize> = self
            .initial
            .iter()
            .map(|&q| intern((q, 0), &mut edges, &mut queue))
            .collect();
        let mut accepting = BTreeSet::new();
        while let Some((q, level, id)) = queue.pop_front() {
            if level == 0 && self.acceptance[0].contains(&q) {
                accepting.insert(id);
            }
            let next_level = if self.acceptance[level].contains(&q) {
                (level + 1) % k
            } else {
                level
            };
            let out = self.edges[q]
                .iter()
                .map(|e| Edge {
                    guard: e.guard.clone(),
                    target: intern((e.target, next_level), &mut edges, &mut queue),
                })
                .collect();
            edges[id] = out;
        }
        BuchiAutomaton {
            props: self.props.clone(),
            initial,
            edges,
            acceptance: vec![accepting],
        }
    }

    /// Whether the automaton accepts `prefix · loop^ω`, decided on the
    /// product with the trace's position graph.
    pub fn accepts(&self, trace: &LassoTrace) -> bool {
        let aut = self.degeneralize();
        let n = trace.positions();
        let id = |q: usize, pos: usize| q * n + pos;
        let mut succ = vec![Vec::new(); aut.num_states() * n];
        let mut accepting = vec![false; aut.num_states() * n];
        for q in 0..aut.num_states() {
            for pos in 0..n {
                accepting[id(q, pos)] = aut.is_accepting(q);
                let letter = trace.letter(pos);
                for (ei, e) in aut.edges[q].iter().enumerate() {
                    if e.guard.matches(&aut.props, letter) {
                        succ[id(q, pos)].push((id(e.target, trace.successor(pos)), ei));
                    }
                }
            }
        }
        let graph = Graph {
            initial: aut.initial.iter().map(|&q| id(q, 0)).collect(),
            succ,
            accepting,
        };
        find_accepting_lasso(&graph).is_some()
    }
}

/// Hash-consed subformula of the core NNF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    props: Vec<String>,
    prop_index: HashMap<String, usize>,
}

impl Arena {
    fn intern(&mut self, node: Node) -> usize {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        self.nodes.push(node);
        self.index.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn prop(&mut self, name: &str) -> usize {
        if let Some(&i) = self.prop_index.get(name) {
            return i;
        }
        self.props.push(name.to_string());
        self.prop_index.insert(name.to_string(), self.props.len() - 1);
        self.props.len() - 1
    }

    fn build(&mut self, f: &Formula) -> usize {
        let node = match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Prop(p) => Node::Lit(self.prop(p), true),
            Formula::Not(a) => match &**a {
                Formula::Prop(p) => Node::Lit(self.prop(p), false),
                _ => unreachable!("core NNF negates only propositions"),
            },
            Formula::And(a, b) => Node::And(self.build(a), self.build(b)),
            Formula::Or(a, b) => Node::Or(self.build(a), self.build(b)),
            Formula::Next(a) => Node::Next(self.build(a)),
            Formula::Until(a, b) => Node::Until(self.build(a), self.build(b)),
            Formula::Release(a, b) => Node::Release(self.build(a), self.build(b)),
            Formula::Implies(..)
            | Formula::WeakUntil(..)
            | Formula::Globally(_)
            | Formula::Finally(_) => unreachable!("eliminated by to_core"),
        };
        self.intern(node)
    }
}

/// A tableau node under construction.
#[derive(Clone)]
struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<usize>,
    old: BTreeSet<usize>,
    next: BTreeSet<usize>,
}

struct Finished {
    incoming: BTreeSet<usize>,
    old: BTreeSet<usize>,
}

/// Translates `f` into a generalized Büchi automaton accepting exactly its
/// models (Gerth–Peled–Vardi–Wolper tableau).
///
/// State 0 is a synthetic initial state; every other state is a tableau node
/// and every edge into it is guarded by the node's literals. There is one
/// acceptance set per `U` subformula.
pub fn ltl_to_buchi(f: &Formula) -> BuchiAutomaton {
    let core = to_core(f);
    let mut arena = Arena::default();
    // Propositions are registered in sorted order so prop indices are stable.
    for p in core.props() {
        arena.prop(&p);
    }
    let root = arena.build(&core);

    const INIT: usize = 0;
    let mut finished: Vec<Finished> = vec![Finished {
        incoming: BTreeSet::new(),
        old: BTreeSet::new(),
    }];
    let mut lookup: HashMap<(BTreeSet<usize>, BTreeSet<usize>), usize> = HashMap::new();
    let mut work = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];

    'work: while let Some(mut node) = work.pop() {
        loop {
            let Some(eta) = node.new.pop_first() else {
                let key = (node.old.clone(), node.next.clone());
                if let Some(&existing) = lookup.get(&key) {
                    finished[existing].incoming.extend(node.incoming);
                } else {
                    let id = finished.len();
                    finished.push(Finished {
                        incoming: node.incoming,
                        old: node.old,
                    });
                    lookup.insert(key, id);
                    work.push(Pending {
                        incoming: BTreeSet::from([id]),
                        new: node.next,
                        old: BTreeSet::new(),
                        next: BTreeSet::new(),
                    });
                }
                continue 'work;
            };
            if node.old.contains(&eta) {
                continue;
            }
            let add_new = |n: &mut Pending, ids: &[usize]| {
                for &id in ids {
                    if !n.old.contains(&id) {
                        n.new.insert(id);
                    }
                }
            };
            match arena.nodes[eta] {
                Node::False => continue 'work,
                Node::True => {
                    node.old.insert(eta);
                }
                Node::Lit(p, polarity) => {
                    let contradicts = arena
                        .index
                        .get(&Node::Lit(p, !polarity))
                        .is_some_and(|neg| node.old.contains(neg));
                    if contradicts {
                        continue 'work;
                    }
                    node.old.insert(eta);
                }
                Node::And(a, b) => {
                    node.old.insert(eta);
                    add_new(&mut node, &[a, b]);
                }
                Node::Next(a) => {
                    node.old.insert(eta);
                    node.next.insert(a);
                }
                Node::Or(a, b) | Node::Until(a, b) | Node::Release(a, b) => {
                    node.old.insert(eta);
                    let mut second = node.clone();
                    match arena.nodes[eta] {
                        Node::Or(..) => {
                            add_new(&mut node, &[a]);
                            add_new(&mut second, &[b]);
                        }
                        Node::Until(..) => {
                            add_new(&mut node, &[a]);
                            node.next.insert(eta);
                            add_new(&mut second, &[b]);
                        }
                        _ => {
                            add_new(&mut node, &[b]);
                            node.next.insert(eta);
                            add_new(&mut second, &[a, b]);
                        }
                    }
                    work.push(second);
                }
            }
        }
    }

    let label = |old: &BTreeSet<usize>| {
        let mut g = Guard::default();
        for &id in old {
            if let Node::Lit(p, polarity) = arena.nodes[id] {
                if polarity {
                    g.pos.insert(p);
                } else {
                    g.neg.insert(p);
                }
            }
        }
        g
    };

    let mut edges = vec![Vec::new(); finished.len()];
    for (target, node) in finished.iter().enumerate().skip(1) {
        let guard = label(&node.old);
        for &source in &node.incoming {
            edges[source].push(Edge {
                guard: guard.clone(),
                target,
            });
        }
    }
    for list in &mut edges {
        list.sort_by(|a, b| a.target.cmp(&b.target));
    }

    let acceptance = arena
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(id, n)| match *n {
            Node::Until(_, b) => Some(
                finished
                    .iter()
                    .enumerate()
                    .filter(|(i, s)| *i == INIT || !s.old.contains(&id) || s.old.contains(&b))
                    .map(|(i, _)| i)
                    .collect(),
            ),
            _ => None,
        })
        .collect();

    BuchiAutomaton {
        props: arena.props,
        initial: vec![INIT],
        edges,
        acceptance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aut(s: &str) -> BuchiAutomaton {
        ltl_to_buchi(&s.parse().unwrap())
    }

    fn lasso(prefix: &[&[&str]], cycle: &[&[&str]]) -> LassoTrace {
        LassoTrace::from_names(prefix, cycle).unwrap()
    }

    #[test]
    fn globally_p() {
        let a = aut("G p");
        assert!(a.accepts(&lasso(&[], &[&["p"]])));
        assert!(!a.accepts(&lasso(&[], &[&[]])));
        assert!(!a.accepts(&lasso(&[&["p"]], &[&["p"], &[]])));
        // one live tableau node besides the synthetic initial state
        assert_eq!(a.num_states(), 2);
    }

    #[test]
    fn finally_p() {
        let a = aut("F p");
        assert!(a.accepts(&lasso(&[&["p"]], &[&[]])));
        assert!(!a.accepts(&lasso(&[], &[&[]])));
    }

    #[test]
    fn p_until_q() {
        let a = aut("p U q");
        assert!(a.accepts(&lasso(&[&["p"]], &[&["q"]])));
        assert!(!a.accepts(&lasso(&[], &[&["p"]])));
    }

    #[test]
    fn guards_are_satisfiable() {
        for s in ["G (p -> X !p)", "p U (q & !p)", "(a W b) & !b R !a", "G F p & F G !p"] {
            let a = aut(s);
            for q in 0..a.num_states() {
                assert!(a.edges(q).iter().all(|e| e.guard.is_satisfiable()), "{s}");
            }
        }
    }

    #[test]
    fn degeneralized_language_matches() {
        let a = aut("G F p & G F q");
        assert_eq!(a.acceptance_sets().len(), 2);
        let d = a.degeneralize();
        assert!(d.is_degeneralized());
        for t in [
            lasso(&[], &[&["p"], &["q"]]),
            lasso(&[], &[&["p", "q"]]),
            lasso(&[&["q"]], &[&["p"]]),
            lasso(&[], &[&[]]),
        ] {
            assert_eq!(a.accepts(&t), d.accepts(&t), "{t}");
        }
        assert!(d.accepts(&lasso(&[], &[&["p"], &["q"]])));
        assert!(!d.accepts(&lasso(&[&["q"]], &[&["p"]])));
    }
}
