//! Bottom-up evaluation for downward and sibling steps with conjunctive
//! qualifiers.
//!
//! Each subexpression evaluates to a set of tuples relating a start node and
//! the constraint map it needs among its siblings to an end node and the map
//! the whole match needs. Keys of a tuple's maps are relative to the start
//! node's parent, whose label path is `x` for the end node's parent.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::constraints::{psi, LabelPath, SibMap};
use crate::label::Label;
use crate::schema_graph::{NodeId, SchemaGraph};
use crate::xpath::{Axis, Qualifier, XPath};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    pub start: NodeId,
    /// Required of the start node's siblings.
    pub pre: SibMap,
    pub end: NodeId,
    pub post: SibMap,
    /// Label path from the start node's parent to the end node's parent.
    pub x: LabelPath,
    /// Every node on `x` is DFS.
    pub x_dfs: bool,
    /// The expression's first step is a child step.
    pub descends: bool,
}

impl fmt::Display for Tuple {
    /// `((u0,β⊥),(u1,{r↦∅}),r)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),({},{}),{})", self.start, self.pre, self.end, self.post, self.x)
    }
}

/// A deduplicated tuple set in a deterministic order.
#[derive(Debug, Clone, Default)]
pub struct TupleSet(Vec<Tuple>);

impl TupleSet {
    fn from_iter_dedup(it: impl IntoIterator<Item = Tuple>) -> TupleSet {
        let mut seen = HashSet::new();
        let mut v: Vec<Tuple> = it.into_iter().filter(|t| seen.insert(t.clone())).collect();
        v.sort_by_cached_key(|t| (t.start, t.end, t.x.clone(), t.pre.to_string(), t.post.to_string()));
        TupleSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.0.iter()
    }

    fn by_start(&self) -> HashMap<NodeId, Vec<&Tuple>> {
        let mut m: HashMap<NodeId, Vec<&Tuple>> = HashMap::new();
        for t in &self.0 {
            m.entry(t.start).or_default().push(t);
        }
        m
    }
}

impl fmt::Display for TupleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

/// Result of evaluating an expression, with the size of every intermediate
/// set in evaluation order.
#[derive(Debug, Clone)]
pub struct Eval2Run {
    pub tuples: TupleSet,
    pub sizes: Vec<(String, usize)>,
    /// `subexpression = tuple set` lines, when tracing.
    pub trace: Vec<String>,
}

impl Eval2Run {
    /// Tuples witnessing satisfiability: they start at the root sentinel
    /// and require nothing of its (nonexistent) siblings.
    pub fn accepting(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter().filter(|t| t.start == SchemaGraph::ROOT && t.pre.is_trivial())
    }

    pub fn max_size(&self) -> usize {
        self.sizes.iter().map(|(_, n)| *n).max().unwrap_or(0)
    }
}

/// Evaluates `p`, which must use only child and sibling steps and
/// qualifiers made of `∧`. Disjunctions and unions must be removed by the
/// caller.
pub fn eval2(p: &XPath, g: &SchemaGraph, trace: bool) -> Eval2Run {
    let mut ev = Evaluator { g, sizes: Vec::new(), trace: trace.then(Vec::new) };
    let tuples = ev.path(p);
    Eval2Run { tuples, sizes: ev.sizes, trace: ev.trace.unwrap_or_default() }
}

struct Evaluator<'g> {
    g: &'g SchemaGraph,
    sizes: Vec<(String, usize)>,
    trace: Option<Vec<String>>,
}

impl Evaluator<'_> {
    fn record(&mut self, p: &dyn fmt::Display, set: &TupleSet) {
        self.sizes.push((p.to_string(), set.len()));
        if let Some(t) = &mut self.trace {
            t.push(format!("{p} = {set}"));
        }
    }

    fn path(&mut self, p: &XPath) -> TupleSet {
        let set = match p {
            XPath::Step(axis, l) => self.step(*axis, l),
            XPath::Seq(a, b) => {
                let (t1, t2) = (self.path(a), self.path(b));
                self.compose(&t1, &t2)
            }
            XPath::Qual(a, q) => {
                let t1 = self.path(a);
                self.qualify(t1, q)
            }
            XPath::Union(..) => unreachable!("unions are routed away from this procedure"),
        };
        self.record(&Arrow(p), &set);
        set
    }

    fn qualify(&mut self, t1: TupleSet, q: &Qualifier) -> TupleSet {
        match q {
            Qualifier::Path(p2) => {
                let t2 = self.path(p2);
                self.filter(&t1, &t2)
            }
            Qualifier::And(a, b) => {
                let t = self.qualify(t1, a);
                self.qualify(t, b)
            }
            Qualifier::Or(..) => unreachable!("qualifier disjunctions are routed away from this procedure"),
        }
    }

    fn step(&self, axis: Axis, l: &Label) -> TupleSet {
        let g = self.g;
        let mut out = Vec::new();
        match axis {
            Axis::Child => {
                for (u, n) in g.nodes() {
                    for &v in g.children_with_label(&n.label, l) {
                        let x = LabelPath(vec![n.label.clone()]);
                        out.push(Tuple {
                            start: u,
                            pre: SibMap::new(),
                            end: v,
                            post: SibMap::singleton(x.clone(), psi(g.node(v)), n.dfs),
                            x,
                            x_dfs: n.dfs,
                            descends: true,
                        });
                    }
                }
            }
            Axis::FollSibling | Axis::PrecSibling => {
                for (u, n) in g.nodes() {
                    let Some(parent) = &n.parent else { continue };
                    for &v in g.children_with_label(parent, l) {
                        let ok = match axis {
                            Axis::FollSibling => g.may_follow(u, v),
                            _ => g.may_follow(v, u),
                        };
                        if !ok {
                            continue;
                        }
                        let before = psi(n);
                        let mut both = before.clone();
                        both.extend(psi(g.node(v)));
                        out.push(Tuple {
                            start: u,
                            pre: SibMap::singleton(LabelPath::empty(), before, true),
                            end: v,
                            post: SibMap::singleton(LabelPath::empty(), both, true),
                            x: LabelPath::empty(),
                            x_dfs: true,
                            descends: false,
                        });
                    }
                }
            }
            Axis::Parent | Axis::DescOrSelf | Axis::AncOrSelf => {
                unreachable!("upward and transitive axes are routed away from this procedure")
            }
        }
        TupleSet::from_iter_dedup(out)
    }

    /// `p1/p2`: glue a `p1` tuple ending at `u` to a `p2` tuple starting at
    /// `u`. When `p2` moves sideways first, the siblings of `u` it sees are
    /// different nodes from the children seen so far, so non-DFS entries for
    /// `u`'s children are dropped.
    fn compose(&self, t1: &TupleSet, t2: &TupleSet) -> TupleSet {
        let dtd = self.g.dtd();
        let index = t2.by_start();
        let mut out = Vec::new();
        for a in t1.iter() {
            let Some(bs) = index.get(&a.end) else { continue };
            let here = a.x.child(self.g.label(a.end));
            let restricted = a.post.restrict_dfs(&here);
            for b in bs {
                let base = if b.descends { &a.post } else { &restricted };
                let post = base.join(&b.post.shift(&a.x, a.x_dfs));
                if !post.consistent(dtd) {
                    continue;
                }
                out.push(Tuple {
                    start: a.start,
                    pre: a.pre.clone(),
                    end: b.end,
                    post,
                    x: a.x.concat(&b.x),
                    x_dfs: a.x_dfs && b.x_dfs,
                    descends: a.descends,
                });
            }
        }
        TupleSet::from_iter_dedup(out)
    }

    /// `p1[p2]`: keep the `p1` tuples whose end node starts some `p2`
    /// tuple, adding what that match requires on the current path and at
    /// DFS keys.
    fn filter(&self, t1: &TupleSet, t2: &TupleSet) -> TupleSet {
        let dtd = self.g.dtd();
        let index = t2.by_start();
        let mut out = Vec::new();
        for a in t1.iter() {
            let Some(bs) = index.get(&a.end) else { continue };
            let own = LabelPath(vec![self.g.label(a.end).clone()]);
            let here = a.x.child(self.g.label(a.end));
            for b in bs {
                let q = b.post.retain(|k, e| e.dfs || k.is_empty() || (b.descends && k == &own));
                let post = a.post.join(&q.shift(&a.x, a.x_dfs)).restrict_to_path(&here);
                if !post.consistent(dtd) {
                    continue;
                }
                out.push(Tuple { post, ..a.clone() });
            }
        }
        TupleSet::from_iter_dedup(out)
    }
}

struct Arrow<'a>(&'a XPath);

impl fmt::Display for Arrow<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_arrow_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtd::Dtd;

    fn graph() -> SchemaGraph {
        let d = Dtd::from_compact(&[("r", "r*(a*b|c)r*"), ("a", "eps"), ("b", "a"), ("c", "eps")]).unwrap();
        SchemaGraph::build(&d).unwrap()
    }

    fn eval(q: &str) -> Eval2Run {
        eval2(&XPath::parse(q).unwrap(), &graph(), false)
    }

    #[test]
    fn running_example_cardinalities() {
        assert_eq!(eval("↓::r").tuples.len(), 6);
        assert_eq!(eval("→⁺::b").tuples.len(), 2);
        assert_eq!(eval("↓::a").tuples.len(), 4);
        assert_eq!(eval("→⁺::b[↓::a]").tuples.len(), 2);
        assert_eq!(eval("↓::r/→⁺::b[↓::a]").tuples.len(), 3);
        assert_eq!(eval("→⁺::c").tuples.len(), 3);
        assert!(eval("↓::r/→⁺::b[↓::a]/→⁺::c").tuples.is_empty());
    }

    #[test]
    fn running_example_tuples() {
        let r = eval("↓::r");
        let first = r.tuples.iter().next().unwrap().to_string();
        assert_eq!(first, "((u0,β⊥),(u1,{r↦∅}),r)");
        let r = eval("↓::r/→⁺::b[↓::a]");
        assert_eq!(r.accepting().count(), 1);
        assert_eq!(r.tuples.iter().next().unwrap().to_string(), "((u0,β⊥),(u3,{r↦{b}, rb↦{a}}),r)");
        assert_eq!(
            eval("→⁺::b[↓::a]").tuples.to_string(),
            "{((u1,{ε↦∅}),(u3,{ε↦{b}, b↦{a}}),ε), ((u2,{ε↦{a}}),(u3,{ε↦{a,b}, b↦{a}}),ε)}"
        );
        assert_eq!(
            eval("↓::a").tuples.to_string(),
            "{((u0,β⊥),(u2,{r↦{a}}),r), ((u1,β⊥),(u2,{r↦{a}}),r), ((u3,β⊥),(u6,{b↦{a}}),b), ((u5,β⊥),(u2,{r↦{a}}),r)}"
        );
    }

    #[test]
    fn qualifier_info_on_a_starred_node_is_kept_while_there() {
        let d = Dtd::from_compact(&[("r", "x*"), ("x", "b|c"), ("b", "eps"), ("c", "eps")]).unwrap();
        let g = SchemaGraph::build(&d).unwrap();
        let sat = |q: &str| eval2(&XPath::parse(q).unwrap(), &g, false).accepting().count() > 0;
        assert!(!sat("↓::x[↓::b]/↓::c"));
        assert!(sat("↓::x[↓::b]/→⁺::x/↓::c"));
        assert!(sat("↓::x[↓::b][→⁺::x[↓::c]]"));
    }
}
