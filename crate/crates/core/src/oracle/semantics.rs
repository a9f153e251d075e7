//! Direct evaluation of expressions on a document, one clause per operator.

use std::collections::BTreeSet;

use super::tree::DocTree;
use crate::label::Label;
use crate::xpath::{Axis, Qualifier, XPath};

/// Nodes reachable from `n` along `axis` (before the label test).
fn axis_nodes(t: &DocTree, axis: Axis, n: usize, out: &mut Vec<usize>) {
    match axis {
        Axis::Child => out.extend_from_slice(t.children(n)),
        Axis::Parent => out.extend(t.parent(n)),
        Axis::DescOrSelf => {
            let mut stack = vec![n];
            while let Some(m) = stack.pop() {
                out.push(m);
                stack.extend_from_slice(t.children(m));
            }
        }
        Axis::AncOrSelf => {
            let mut m = Some(n);
            while let Some(x) = m {
                out.push(x);
                m = t.parent(x);
            }
        }
        Axis::FollSibling | Axis::PrecSibling => {
            let Some(p) = t.parent(n) else { return };
            let sibs = t.children(p);
            let i = sibs.iter().position(|&s| s == n).expect("a node is among its parent's children");
            if axis == Axis::FollSibling {
                out.extend_from_slice(&sibs[i + 1..]);
            } else {
                out.extend_from_slice(&sibs[..i]);
            }
        }
    }
}

fn step(t: &DocTree, axis: Axis, l: &Label, from: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut buf = Vec::new();
    for &n in from {
        axis_nodes(t, axis, n, &mut buf);
    }
    buf.into_iter().filter(|&m| t.label(m) == l).collect()
}

/// The nodes `p` selects from any node of `from`.
pub fn select(t: &DocTree, p: &XPath, from: &BTreeSet<usize>) -> BTreeSet<usize> {
    match p {
        XPath::Step(axis, l) => step(t, *axis, l, from),
        XPath::Seq(a, b) => select(t, b, &select(t, a, from)),
        XPath::Union(a, b) => {
            let mut s = select(t, a, from);
            s.extend(select(t, b, from));
            s
        }
        XPath::Qual(a, q) => select(t, a, from).into_iter().filter(|&n| holds(t, q, n)).collect(),
    }
}

/// Whether qualifier `q` is true at node `n`.
pub fn holds(t: &DocTree, q: &Qualifier, n: usize) -> bool {
    match q {
        Qualifier::Path(p) => !select(t, p, &BTreeSet::from([n])).is_empty(),
        Qualifier::And(a, b) => holds(t, a, n) && holds(t, b, n),
        Qualifier::Or(a, b) => holds(t, a, n) || holds(t, b, n),
    }
}

/// The nodes `p` selects from the root.
pub fn eval_xpath_full(t: &DocTree, p: &XPath) -> BTreeSet<usize> {
    select(t, p, &BTreeSet::from([DocTree::ROOT]))
}

/// Whether `p` selects some node from the root of `t`.
pub fn satisfies(t: &DocTree, p: &XPath) -> bool {
    !eval_xpath_full(t, p).is_empty()
}
