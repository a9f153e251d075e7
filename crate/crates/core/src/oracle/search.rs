//! Query-directed witness search.
//!
//! A witness needs only the nodes the query visits and their ancestors;
//! every other node can be filled in afterwards. The search grows such a
//! skeleton while evaluating the query, choosing at each step between an
//! existing node and a new one at any admissible position. A skeleton is
//! kept only while each node's children are a subsequence of some word of
//! its content model. Completion then inserts smallest subtrees around the
//! skeleton. Adding nodes never removes a match of a query without
//! negation, so the completed document still matches; it is re-verified
//! anyway before being returned.

use super::semantics::satisfies;
use super::{Bounds, DocTree, MinSizes, Oracle, OracleVerdict};
use crate::label::Label;
use crate::regex::Word;
use crate::xpath::{Axis, Qualifier, XPath};

type Cont<'k> = &'k mut dyn FnMut(DocTree, usize) -> bool;
type QCont<'k> = &'k mut dyn FnMut(DocTree) -> bool;

struct Search<'o, 'd> {
    oracle: &'o Oracle<'d>,
    sizes: MinSizes,
    bounds: Bounds,
}

pub(super) fn run(oracle: &Oracle<'_>, p: &XPath, bounds: Bounds) -> OracleVerdict {
    let s = Search { oracle, sizes: oracle.min_sizes(bounds.depth), bounds };
    let root = oracle.dtd().root().clone();
    if s.sizes.get(bounds.depth, &root).is_none() {
        return OracleVerdict::Unknown;
    }
    let mut found = None;
    s.path(p, DocTree::leaf(root), DocTree::ROOT, &mut |t, _| {
        let Some(full) = s.complete(&t) else { return false };
        debug_assert!(oracle.conforms(&full), "completion of {t} does not conform: {full}");
        debug_assert!(satisfies(&full, p), "completion of {t} lost the match: {full}");
        if oracle.conforms(&full) && satisfies(&full, p) {
            found = Some(full);
            true
        } else {
            false
        }
    });
    found.map_or(OracleVerdict::Unknown, OracleVerdict::Sat)
}

impl Search<'_, '_> {
    fn path(&self, p: &XPath, t: DocTree, n: usize, k: Cont<'_>) -> bool {
        match p {
            XPath::Step(axis, l) => self.step(*axis, l, t, n, k),
            XPath::Seq(a, b) => self.path(a, t, n, &mut |t2, m| self.path(b, t2, m, &mut *k)),
            XPath::Union(a, b) => self.path(a, t.clone(), n, &mut *k) || self.path(b, t, n, k),
            XPath::Qual(a, q) => self.path(a, t, n, &mut |t2, m| self.qual(q, t2, m, &mut |t3| k(t3, m))),
        }
    }

    fn qual(&self, q: &Qualifier, t: DocTree, n: usize, k: QCont<'_>) -> bool {
        match q {
            Qualifier::Path(p) => self.path(p, t, n, &mut |t2, _| k(t2)),
            Qualifier::And(a, b) => self.qual(a, t, n, &mut |t2| self.qual(b, t2, n, &mut *k)),
            Qualifier::Or(a, b) => self.qual(a, t.clone(), n, &mut *k) || self.qual(b, t, n, k),
        }
    }

    fn step(&self, axis: Axis, l: &Label, t: DocTree, n: usize, k: Cont<'_>) -> bool {
        match axis {
            Axis::Child => {
                for &c in t.children(n) {
                    if t.label(c) == l && k(t.clone(), c) {
                        return true;
                    }
                }
                let len = t.children(n).len();
                self.insert_each(&t, n, l, 0..=len, k)
            }
            Axis::Parent => match t.parent(n) {
                Some(p) if t.label(p) == l => k(t, p),
                _ => false,
            },
            Axis::AncOrSelf => {
                let mut m = Some(n);
                while let Some(x) = m {
                    if t.label(x) == l && k(t.clone(), x) {
                        return true;
                    }
                    m = t.parent(x);
                }
                false
            }
            Axis::DescOrSelf => self.descend(l, t, n, k),
            Axis::FollSibling | Axis::PrecSibling => {
                let Some(p) = t.parent(n) else { return false };
                let i = t.children(p).iter().position(|&c| c == n).expect("node is its parent's child");
                let len = t.children(p).len();
                let (existing, slots) =
                    if axis == Axis::FollSibling { (i + 1..len, i + 1..=len) } else { (0..i, 0..=i) };
                for j in existing {
                    let c = t.children(p)[j];
                    if t.label(c) == l && k(t.clone(), c) {
                        return true;
                    }
                }
                self.insert_each(&t, p, l, slots, k)
            }
        }
    }

    /// `n` itself, or any existing or new descendant, labelled `l`.
    fn descend(&self, l: &Label, t: DocTree, n: usize, k: Cont<'_>) -> bool {
        if t.label(n) == l && k(t.clone(), n) {
            return true;
        }
        for &c in t.children(n) {
            if self.descend(l, t.clone(), c, &mut *k) {
                return true;
            }
        }
        let Some(nfa) = self.oracle.nfa(t.label(n)) else { return false };
        let len = t.children(n).len();
        for m in nfa.alphabet() {
            let found = self.insert_each(&t, n, &m, 0..=len, &mut |t2, c| self.descend(l, t2, c, &mut *k));
            if found {
                return true;
            }
        }
        false
    }

    /// Tries a new `l`-child of `parent` at each index in `slots`.
    fn insert_each(
        &self,
        t: &DocTree,
        parent: usize,
        l: &Label,
        slots: impl IntoIterator<Item = usize>,
        k: Cont<'_>,
    ) -> bool {
        let depth = t.depth_of(parent) + 1;
        if depth > self.bounds.depth || self.sizes.get(self.bounds.depth - depth, l).is_none() {
            return false;
        }
        let same = t.children(parent).iter().filter(|&&c| t.label(c) == l).count();
        if same >= self.bounds.rep {
            return false;
        }
        let Some(nfa) = self.oracle.nfa(t.label(parent)) else { return false };
        for i in slots {
            let mut t2 = t.clone();
            let c = t2.insert_child(parent, i, l.clone());
            if nfa.accepts_subsequence(&Word(t2.child_labels(parent))) && k(t2, c) {
                return true;
            }
        }
        false
    }

    /// Fills in the skeleton `t` to a conforming document within the depth
    /// bound, or `None` if some node cannot be completed.
    fn complete(&self, t: &DocTree) -> Option<DocTree> {
        let mut out = DocTree::leaf(t.label(DocTree::ROOT).clone());
        self.complete_node(t, DocTree::ROOT, &mut out, DocTree::ROOT, 0)?;
        Some(out)
    }

    fn complete_node(&self, t: &DocTree, n: usize, out: &mut DocTree, m: usize, depth: usize) -> Option<()> {
        let nfa = self.oracle.nfa(t.label(n))?;
        let room = self.bounds.depth.checked_sub(depth + 1);
        let (_, word) = nfa.cheapest_supersequence(&t.child_labels(n), |c| room.and_then(|h| self.sizes.get(h, c)))?;
        for (c, matched) in word {
            match matched {
                Some(i) => {
                    let id = out.push_child(m, c);
                    self.complete_node(t, t.children(n)[i], out, id, depth + 1)?;
                }
                None => self.sizes.grow(self.oracle, out, m, &c, room.expect("insertions need room")),
            }
        }
        Some(())
    }
}
