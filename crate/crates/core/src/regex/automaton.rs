//! Position (Glushkov) automata for content models.
//!
//! State 0 is the initial state and state `i + 1` is position `i` of the
//! hash-free expression. There are no ε-transitions and every state is both
//! reachable and co-reachable, because the expression language has no
//! empty-set constant.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use super::{ContentModel, Word};
use crate::label::Label;

pub type StateSet = BTreeSet<usize>;

/// A total insertion cost and each letter with the skeleton index it
/// matches, if any.
pub type Supersequence = (u64, Vec<(Label, Option<usize>)>);

#[derive(Debug, Clone)]
pub struct Nfa {
    labels: Vec<Label>,
    nullable: bool,
    first: StateSet,
    last: StateSet,
    follow: Vec<StateSet>,
}

struct Info {
    nullable: bool,
    first: StateSet,
    last: StateSet,
}

impl Nfa {
    pub fn glushkov(e: &ContentModel) -> Nfa {
        let e = e.expand_hash();
        let mut nfa = Nfa {
            labels: Vec::new(),
            nullable: false,
            first: StateSet::new(),
            last: StateSet::new(),
            follow: Vec::new(),
        };
        let info = nfa.build(&e);
        nfa.nullable = info.nullable;
        nfa.first = info.first;
        nfa.last = info.last;
        nfa
    }

    fn build(&mut self, e: &ContentModel) -> Info {
        match e {
            ContentModel::Epsilon => Info { nullable: true, first: StateSet::new(), last: StateSet::new() },
            ContentModel::Symbol(l) => {
                let p = self.labels.len();
                self.labels.push(l.clone());
                self.follow.push(StateSet::new());
                Info { nullable: false, first: [p].into(), last: [p].into() }
            }
            ContentModel::Concat(es) => {
                let mut acc = Info { nullable: true, first: StateSet::new(), last: StateSet::new() };
                for f in es {
                    let i = self.build(f);
                    for &p in &acc.last {
                        self.follow[p].extend(i.first.iter().copied());
                    }
                    if acc.nullable {
                        acc.first.extend(i.first.iter().copied());
                    }
                    if i.nullable {
                        acc.last.extend(i.last);
                    } else {
                        acc.last = i.last;
                    }
                    acc.nullable &= i.nullable;
                }
                acc
            }
            ContentModel::Disj(es) => {
                let mut acc = Info { nullable: false, first: StateSet::new(), last: StateSet::new() };
                for f in es {
                    let i = self.build(f);
                    acc.nullable |= i.nullable;
                    acc.first.extend(i.first);
                    acc.last.extend(i.last);
                }
                acc
            }
            ContentModel::Star(inner) | ContentModel::Plus(inner) => {
                let mut i = self.build(inner);
                for &p in &i.last {
                    self.follow[p].extend(i.first.iter().copied());
                }
                if matches!(e, ContentModel::Star(_)) {
                    i.nullable = true;
                }
                i
            }
            ContentModel::Opt(inner) => {
                let mut i = self.build(inner);
                i.nullable = true;
                i
            }
            ContentModel::Hash(..) => unreachable!("hash is expanded before construction"),
        }
    }

    pub fn num_states(&self) -> usize {
        self.labels.len() + 1
    }

    pub fn start(&self) -> StateSet {
        [0].into()
    }

    fn successors(&self, q: usize) -> &StateSet {
        if q == 0 {
            &self.first
        } else {
            &self.follow[q - 1]
        }
    }

    fn label_of(&self, q: usize) -> &Label {
        &self.labels[q - 1]
    }

    fn is_final(&self, q: usize) -> bool {
        if q == 0 {
            self.nullable
        } else {
            self.last.contains(&(q - 1))
        }
    }

    pub fn step(&self, states: &StateSet, l: &Label) -> StateSet {
        let mut out = StateSet::new();
        for &q in states {
            for &p in self.successors(q) {
                if &self.labels[p] == l {
                    out.insert(p + 1);
                }
            }
        }
        out
    }

    pub fn is_accepting(&self, states: &StateSet) -> bool {
        states.iter().any(|&q| self.is_final(q))
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let mut s = self.start();
        for l in w.labels() {
            s = self.step(&s, l);
            if s.is_empty() {
                return false;
            }
        }
        self.is_accepting(&s)
    }

    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.labels.iter().cloned().collect()
    }

    /// Shortest distance (in letters) from each state to a final state.
    fn distance_to_final(&self) -> Vec<usize> {
        let n = self.num_states();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            for &p in self.successors(q) {
                preds[p + 1].push(q);
            }
        }
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for (q, d) in dist.iter_mut().enumerate() {
            if self.is_final(q) {
                *d = 0;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if dist[p] == usize::MAX {
                    dist[p] = dist[q] + 1;
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    /// All accepted words of length at most `max_len`.
    pub fn words_up_to(&self, max_len: usize) -> BTreeSet<Word> {
        let dist = self.distance_to_final();
        let alphabet: Vec<Label> = self.alphabet().into_iter().collect();
        let mut out = BTreeSet::new();
        let mut stack: Vec<(Vec<Label>, StateSet)> = vec![(Vec::new(), self.start())];
        while let Some((w, s)) = stack.pop() {
            if self.is_accepting(&s) {
                out.insert(Word(w.clone()));
            }
            if w.len() == max_len {
                continue;
            }
            for l in &alphabet {
                let next = self.step(&s, l);
                let remaining = max_len - w.len() - 1;
                if next.iter().any(|&q| dist[q] <= remaining) {
                    let mut w2 = w.clone();
                    w2.push(l.clone());
                    stack.push((w2, next));
                }
            }
        }
        out
    }

    /// True if `w` is a subsequence of some accepted word.
    pub fn accepts_subsequence(&self, w: &Word) -> bool {
        let mut current = self.start();
        for l in w.labels() {
            // States reachable by at least one transition, then filtered by label.
            let mut seen = HashSet::new();
            let mut queue: VecDeque<usize> = current.iter().copied().collect();
            let mut next = StateSet::new();
            while let Some(q) = queue.pop_front() {
                for &p in self.successors(q) {
                    if seen.insert(p + 1) {
                        if &self.labels[p] == l {
                            next.insert(p + 1);
                        }
                        queue.push_back(p + 1);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        true
    }

    /// Cheapest accepted word that contains `skeleton` as a subsequence.
    /// Letters matched against the skeleton are free; every other letter
    /// costs `weight(label)`, and labels with no weight may not be inserted.
    /// Each letter of the result is paired with the skeleton index it matches,
    /// if any.
    pub fn cheapest_supersequence(
        &self,
        skeleton: &[Label],
        weight: impl Fn(&Label) -> Option<u64>,
    ) -> Option<Supersequence> {
        type Node = (usize, usize);
        let mut best: HashMap<Node, u64> = HashMap::new();
        let mut back: HashMap<Node, (Node, Option<usize>)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        best.insert((0, 0), 0);
        heap.push(Reverse((0u64, 0usize, 0usize)));
        while let Some(Reverse((cost, q, i))) = heap.pop() {
            if best.get(&(q, i)).is_some_and(|&c| c < cost) {
                continue;
            }
            if i == skeleton.len() && self.is_final(q) {
                let mut letters = Vec::new();
                let mut node = (q, i);
                while let Some(&(prev, matched)) = back.get(&node) {
                    letters.push((self.label_of(node.0).clone(), matched));
                    node = prev;
                }
                letters.reverse();
                return Some((cost, letters));
            }
            for &p in self.successors(q) {
                let lp = &self.labels[p];
                let mut relax = |next: Node, c: u64, matched: Option<usize>| {
                    if best.get(&next).is_none_or(|&old| c < old) {
                        best.insert(next, c);
                        back.insert(next, ((q, i), matched));
                        heap.push(Reverse((c, next.0, next.1)));
                    }
                };
                if i < skeleton.len() && &skeleton[i] == lp {
                    relax((p + 1, i + 1), cost, Some(i));
                }
                if let Some(wt) = weight(lp) {
                    relax((p + 1, i), cost + wt, None);
                }
            }
        }
        None
    }
}

/// Language equivalence of two automata, by breadth-first search over pairs
/// of subset states.
pub fn equivalent(a: &Nfa, b: &Nfa) -> bool {
    let alphabet: BTreeSet<Label> = a.alphabet().union(&b.alphabet()).cloned().collect();
    let mut seen: BTreeMap<(StateSet, StateSet), ()> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let init = (a.start(), b.start());
    seen.insert(init.clone(), ());
    queue.push_back(init);
    while let Some((sa, sb)) = queue.pop_front() {
        if a.is_accepting(&sa) != b.is_accepting(&sb) {
            return false;
        }
        for l in &alphabet {
            let next = (a.step(&sa, l), b.step(&sb, l));
            if next.0.is_empty() && next.1.is_empty() {
                continue;
            }
            if seen.insert(next.clone(), ()).is_none() {
                queue.push_back(next);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nfa(s: &str) -> Nfa {
        ContentModel::parse_compact(s).unwrap().to_nfa()
    }

    fn lab(s: &str) -> Vec<Label> {
        Word::from_chars(s).0
    }

    #[test]
    fn glushkov_sizes() {
        assert_eq!(nfa("a*(b|c)a*").num_states(), 5);
        assert_eq!(nfa("eps").num_states(), 1);
    }

    #[test]
    fn subsequence_closure() {
        let n = nfa("a*bcda*");
        assert!(n.accepts_subsequence(&Word::from_chars("ad")));
        assert!(n.accepts_subsequence(&Word::from_chars("aaba")));
        assert!(!n.accepts_subsequence(&Word::from_chars("db")));
        assert!(n.accepts_subsequence(&Word::default()));
    }

    #[test]
    fn cheapest_supersequence_inserts_required_letters() {
        let n = nfa("a*bcda*");
        let (cost, letters) = n.cheapest_supersequence(&lab("d"), |_| Some(1)).unwrap();
        assert_eq!(cost, 2);
        let w: String = letters.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(w, "bcd");
        assert_eq!(letters[2].1, Some(0));
        assert!(n.cheapest_supersequence(&lab("db"), |_| Some(1)).is_none());
        // `b` may not be inserted, so no completion exists.
        let no_b = |l: &Label| (l.as_str() != "b").then_some(1);
        assert!(n.cheapest_supersequence(&lab("c"), no_b).is_none());
    }

    #[test]
    fn equivalence_is_symmetric_on_examples() {
        assert!(equivalent(&nfa("(a|b)*"), &nfa("(a*b*)*")));
        assert!(!equivalent(&nfa("(a|b)*"), &nfa("a*b*")));
    }
}
