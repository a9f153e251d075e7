//! Ground truth by search over documents.
//!
//! Nothing here uses schema graphs or constraint maps to decide anything:
//! documents are checked against content models with automata and queries
//! are evaluated by their direct semantics. The SG-mapping helpers exist to
//! test the constraint-map machinery against concrete documents.

mod enumerate;
mod search;
mod semantics;
mod sg_mapping;
mod tree;

use std::collections::HashMap;

use crate::dtd::Dtd;
use crate::label::Label;
use crate::regex::{Nfa, Word};
use crate::xpath::XPath;

pub use enumerate::enumerate_trees;
pub use semantics::{eval_xpath_full, holds, satisfies, select};
pub use sg_mapping::{beta_satisfied, compute_sg_mapping, SgMapping};
pub use tree::{DocTree, TreeParseError};

/// Search limits. `depth` bounds the number of edges on any root-to-leaf
/// path; `rep` bounds star iterations when enumerating, and the number of
/// same-labelled siblings the query-directed search introduces under one
/// node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub depth: usize,
    pub rep: usize,
}

impl Bounds {
    pub const DEFAULT_DEPTH: usize = 4;

    /// Depth 4 and `rep = max(2, |p|)`: every step of `p` introduces at
    /// most one new sibling, so this many suffice for the query's own nodes.
    pub fn for_query(p: &XPath) -> Self {
        Bounds { depth: Self::DEFAULT_DEPTH, rep: p.size().max(2) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    /// A conforming document on which the query selects a node.
    Sat(DocTree),
    /// No witness within the bounds. This is not a proof of
    /// unsatisfiability unless the bounds cover every relevant document.
    Unknown,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat(_))
    }

    pub fn witness(&self) -> Option<&DocTree> {
        match self {
            OracleVerdict::Sat(t) => Some(t),
            OracleVerdict::Unknown => None,
        }
    }
}

/// A DTD with its content-model automata, shared by the search procedures.
#[derive(Debug, Clone)]
pub struct Oracle<'d> {
    dtd: &'d Dtd,
    nfas: HashMap<Label, Nfa>,
}

impl<'d> Oracle<'d> {
    pub fn new(dtd: &'d Dtd) -> Self {
        let nfas = dtd.rules().map(|(l, e)| (l.clone(), e.to_nfa())).collect();
        Oracle { dtd, nfas }
    }

    pub fn dtd(&self) -> &'d Dtd {
        self.dtd
    }

    fn nfa(&self, l: &Label) -> Option<&Nfa> {
        self.nfas.get(l)
    }

    /// The root is labelled by the DTD's root and every node's children
    /// spell a word of its content model.
    pub fn conforms(&self, t: &DocTree) -> bool {
        t.label(DocTree::ROOT) == self.dtd.root()
            && (0..t.len()).all(|n| self.nfa(t.label(n)).is_some_and(|a| a.accepts(&Word(t.child_labels(n)))))
    }

    /// Smallest subtree sizes per label for heights `0..=depth`.
    fn min_sizes(&self, depth: usize) -> MinSizes {
        let mut by_height: Vec<HashMap<Label, u64>> = Vec::with_capacity(depth + 1);
        for h in 0..=depth {
            let below = h.checked_sub(1).map(|b| &by_height[b]);
            let row: HashMap<Label, u64> = self
                .nfas
                .iter()
                .filter_map(|(l, a)| {
                    let (cost, _) = a.cheapest_supersequence(&[], |c| below.and_then(|m| m.get(c).copied()))?;
                    Some((l.clone(), cost + 1))
                })
                .collect();
            by_height.push(row);
        }
        MinSizes { by_height }
    }

    /// The first witness found by query-directed search within `bounds`.
    pub fn satisfiable(&self, p: &XPath, bounds: Bounds) -> OracleVerdict {
        search::run(self, p, bounds)
    }
}

/// `by_height[h][l]`: nodes in a smallest conforming `l`-subtree of height
/// at most `h`. Absent when there is none.
#[derive(Debug, Clone)]
struct MinSizes {
    by_height: Vec<HashMap<Label, u64>>,
}

impl MinSizes {
    fn get(&self, height: usize, l: &Label) -> Option<u64> {
        self.by_height.get(height)?.get(l).copied()
    }

    /// Appends a smallest `l`-subtree of height at most `height` under
    /// `parent`.
    fn grow(&self, o: &Oracle<'_>, out: &mut DocTree, parent: usize, l: &Label, height: usize) {
        let id = out.push_child(parent, l.clone());
        self.fill(o, out, id, height);
    }

    /// Gives the childless node `n` a cheapest children word and subtrees.
    fn fill(&self, o: &Oracle<'_>, out: &mut DocTree, n: usize, height: usize) {
        let l = out.label(n).clone();
        let nfa = o.nfa(&l).expect("labels in documents are declared");
        let (_, word) = nfa
            .cheapest_supersequence(&[], |c| height.checked_sub(1).and_then(|h| self.get(h, c)))
            .expect("only labels with a finite subtree are grown");
        for (c, _) in word {
            self.grow(o, out, n, &c, height - 1);
        }
    }
}

/// Whether `t` conforms to `d`.
pub fn conforms(t: &DocTree, d: &Dtd) -> bool {
    Oracle::new(d).conforms(t)
}

/// Searches for a conforming document on which `p` selects a node.
pub fn oracle_satisfiable(p: &XPath, d: &Dtd, bounds: Bounds) -> OracleVerdict {
    Oracle::new(d).satisfiable(p, bounds)
}

/// The first conforming document within `bounds`, in enumeration order, on
/// which `p` selects a node. Exhaustive and slow; for cross-checking.
pub fn enumeration_satisfiable(p: &XPath, d: &Dtd, bounds: Bounds) -> OracleVerdict {
    enumerate_trees(d, bounds.depth, bounds.rep)
        .into_iter()
        .find(|t| satisfies(t, p))
        .map_or(OracleVerdict::Unknown, OracleVerdict::Sat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Dtd {
        Dtd::from_compact(&[("r", "r*(a*b|c)r*"), ("a", "eps"), ("b", "a"), ("c", "eps")]).unwrap()
    }

    #[test]
    fn conformance() {
        let d = example();
        assert!(conforms(&DocTree::parse("r(r(c),a,a,b(a))").unwrap(), &d));
        assert!(!conforms(&DocTree::parse("r(b,c)").unwrap(), &d));
        assert!(!conforms(&DocTree::parse("r").unwrap(), &d));
        assert!(!conforms(&DocTree::parse("a").unwrap(), &d));
        let eps = Dtd::from_compact(&[("r", "eps")]).unwrap();
        assert!(conforms(&DocTree::leaf("r"), &eps));
    }

    #[test]
    fn minimal_subtrees() {
        let d = example();
        let o = Oracle::new(&d);
        let m = o.min_sizes(3);
        assert_eq!(m.get(0, &Label::new("a")), Some(1));
        assert_eq!(m.get(0, &Label::new("b")), None);
        assert_eq!(m.get(1, &Label::new("b")), Some(2));
        assert_eq!(m.get(1, &Label::new("r")), Some(2));
        let mut t = DocTree::leaf("r");
        m.fill(&o, &mut t, DocTree::ROOT, 3);
        assert_eq!(t.to_string(), "r(c)");
    }

    #[test]
    fn oracle_examples() {
        let d = example();
        let q = |s: &str| XPath::parse(s).unwrap();
        let bounds = Bounds { depth: 3, rep: 2 };
        let v = oracle_satisfiable(&q("↓::r/→⁺::b[↓::a]"), &d, bounds);
        let w = v.witness().expect("satisfiable");
        assert!(conforms(w, &d) && satisfies(w, &q("↓::r/→⁺::b[↓::a]")));
        assert_eq!(oracle_satisfiable(&q("↓::r/→⁺::b[↓::a]/→⁺::c"), &d, bounds), OracleVerdict::Unknown);
        let eps = Dtd::from_compact(&[("r", "eps")]).unwrap();
        assert_eq!(oracle_satisfiable(&q("↓::a"), &eps, Bounds { depth: 2, rep: 1 }), OracleVerdict::Unknown);
    }

    #[test]
    fn default_bounds() {
        assert_eq!(Bounds::for_query(&XPath::parse("↓::a").unwrap()), Bounds { depth: 4, rep: 2 });
        assert_eq!(Bounds::for_query(&XPath::parse("↓::a/→⁺::a/→⁺::a").unwrap()).rep, 3);
    }
}
