//! Path expression → minimal DFA over directed predicate labels.
//!
//! Thompson construction, subset construction, then Moore partition
//! refinement. States that cannot reach acceptance are dropped, so a
//! traversal never expands edges toward a dead end. For `p*` the result is
//! a single accepting state looping on `p`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::path::{Direction, PathExpr, PathPattern};
use crate::term::TermId;

pub type Label = (TermId, Direction);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaState {
    pub accepting: bool,
    /// Sorted by label; at most one target per label.
    pub transitions: Vec<(Label, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    states: Vec<DfaState>,
    start: Option<usize>,
}

impl Dfa {
    pub fn forward(pattern: &PathPattern) -> Self {
        Self::build(&pattern.directed())
    }

    /// Automaton for the reversed language, for traversals that start at
    /// the path's end.
    pub fn backward(pattern: &PathPattern) -> Self {
        Self::build(&pattern.reversed())
    }

    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn state(&self, i: usize) -> &DfaState {
        &self.states[i]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_none()
    }

    pub fn accepts_empty(&self) -> bool {
        self.start.is_some_and(|s| self.states[s].accepting)
    }

    fn build(expr: &PathExpr<(Option<TermId>, Direction)>) -> Self {
        let mut nfa = Nfa::default();
        let (start, accept) = nfa.fragment(expr);
        let dfa = subset_construction(&nfa, start, accept);
        minimize(dfa)
    }
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(Label, usize)>>,
}

impl Nfa {
    fn new_state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    fn fragment(&mut self, e: &PathExpr<(Option<TermId>, Direction)>) -> (usize, usize) {
        match e {
            PathExpr::Link((pred, dir)) => {
                let (s, t) = (self.new_state(), self.new_state());
                // an unresolved predicate leaves the fragment without a path
                if let Some(p) = pred {
                    self.edges[s].push(((*p, *dir), t));
                }
                (s, t)
            }
            PathExpr::Inverse(_) => unreachable!("inverse is pushed down before construction"),
            PathExpr::Sequence(a, b) => {
                let (a0, a1) = self.fragment(a);
                let (b0, b1) = self.fragment(b);
                self.eps[a1].push(b0);
                (a0, b1)
            }
            PathExpr::Alternation(a, b) => {
                let (s, t) = (self.new_state(), self.new_state());
                let (a0, a1) = self.fragment(a);
                let (b0, b1) = self.fragment(b);
                self.eps[s].extend([a0, b0]);
                self.eps[a1].push(t);
                self.eps[b1].push(t);
                (s, t)
            }
            PathExpr::ZeroOrMore(inner) | PathExpr::OneOrMore(inner) | PathExpr::ZeroOrOne(inner) => {
                let (s, t) = (self.new_state(), self.new_state());
                let (i0, i1) = self.fragment(inner);
                self.eps[s].push(i0);
                self.eps[i1].push(t);
                if !matches!(e, PathExpr::OneOrMore(_)) {
                    self.eps[s].push(t);
                }
                if !matches!(e, PathExpr::ZeroOrOne(_)) {
                    self.eps[i1].push(i0);
                }
                (s, t)
            }
        }
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if set.insert(s) {
                stack.extend(self.eps[s].iter().copied());
            }
        }
        set
    }
}

fn subset_construction(nfa: &Nfa, start: usize, accept: usize) -> Dfa {
    let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut states = Vec::new();
    let first = nfa.closure([start]);
    ids.insert(first.clone(), 0);
    sets.push(first);
    let mut i = 0;
    while i < sets.len() {
        let mut moves: BTreeMap<Label, BTreeSet<usize>> = BTreeMap::new();
        for &s in &sets[i] {
            for (label, t) in &nfa.edges[s] {
                moves.entry(*label).or_default().insert(*t);
            }
        }
        let mut transitions = Vec::with_capacity(moves.len());
        for (label, targets) in moves {
            let set = nfa.closure(targets);
            let next = *ids.entry(set.clone()).or_insert_with(|| {
                sets.push(set);
                sets.len() - 1
            });
            transitions.push((label, next));
        }
        states.push(DfaState {
            accepting: sets[i].contains(&accept),
            transitions,
        });
        i += 1;
    }
    Dfa {
        states,
        start: Some(0),
    }
}

/// Moore refinement followed by dead-state removal.
fn minimize(dfa: Dfa) -> Dfa {
    let n = dfa.states.len();
    let mut class: Vec<usize> = dfa.states.iter().map(|s| usize::from(s.accepting)).collect();
    loop {
        let mut signatures: HashMap<(usize, Vec<(Label, usize)>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for (i, st) in dfa.states.iter().enumerate() {
            let sig = (
                class[i],
                st.transitions.iter().map(|(l, t)| (*l, class[*t])).collect::<Vec<_>>(),
            );
            let len = signatures.len();
            next[i] = *signatures.entry(sig).or_insert(len);
        }
        let stable = signatures.len() == class.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if stable {
            break;
        }
    }

    // one representative per class, renumbered from the start state outward
    let Some(old_start) = dfa.start else {
        return dfa;
    };
    let n_classes = class.iter().max().map_or(0, |m| m + 1);
    let mut rep = vec![usize::MAX; n_classes];
    for (i, &c) in class.iter().enumerate() {
        if rep[c] == usize::MAX {
            rep[c] = i;
        }
    }
    let merged: Vec<DfaState> = rep
        .iter()
        .map(|&r| DfaState {
            accepting: dfa.states[r].accepting,
            transitions: dfa.states[r].transitions.iter().map(|(l, t)| (*l, class[*t])).collect(),
        })
        .collect();

    // live = can reach an accepting state
    let mut live: Vec<bool> = merged.iter().map(|s| s.accepting).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for (i, st) in merged.iter().enumerate() {
            if !live[i] && st.transitions.iter().any(|(_, t)| live[*t]) {
                live[i] = true;
                changed = true;
            }
        }
    }
    let start = class[old_start];
    if !live[start] {
        return Dfa {
            states: Vec::new(),
            start: None,
        };
    }

    let mut order = vec![start];
    let mut new_id = vec![usize::MAX; merged.len()];
    new_id[start] = 0;
    let mut k = 0;
    while k < order.len() {
        for (_, t) in &merged[order[k]].transitions {
            if live[*t] && new_id[*t] == usize::MAX {
                new_id[*t] = order.len();
                order.push(*t);
            }
        }
        k += 1;
    }
    let states = order
        .iter()
        .map(|&old| DfaState {
            accepting: merged[old].accepting,
            transitions: merged[old]
                .transitions
                .iter()
                .filter(|(_, t)| live[*t])
                .map(|(l, t)| (*l, new_id[*t]))
                .collect(),
        })
        .collect();
    Dfa {
        states,
        start: Some(0),
    }
}
