//! Assignments of document nodes to schema-graph nodes, and the direct
//! definition of a document satisfying a constraint map.

use std::collections::{BTreeSet, HashMap};

use super::tree::DocTree;
use crate::constraints::SibMap;
use crate::label::Label;
use crate::regex::{Nfa, Word};
use crate::schema_graph::{dc_convert, NodeId, Omega, SchemaGraph};

/// `θ`, indexed by document node id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SgMapping(pub Vec<NodeId>);

impl SgMapping {
    pub fn get(&self, n: usize) -> NodeId {
        self.0[n]
    }
}

struct Factor {
    pos: usize,
    omega: Omega,
    nfa: Nfa,
}

/// Every way to split `word` into blocks with weakly increasing factor
/// positions, each block a word of its factor's language. Factors may be
/// skipped.
fn assignments(word: &[Label], factors: &[Factor], candidates: &dyn Fn(&Label) -> Vec<usize>) -> Vec<Vec<usize>> {
    fn go(
        j: usize,
        word: &[Label],
        candidates: &dyn Fn(&Label) -> Vec<usize>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if j == word.len() {
            out.push(cur.clone());
            return;
        }
        for f in candidates(&word[j]) {
            if cur.last().is_none_or(|&prev| prev <= f) {
                cur.push(f);
                go(j + 1, word, candidates, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(0, word, candidates, &mut Vec::new(), &mut out);
    out.retain(|a| {
        let mut start = 0;
        (1..=a.len()).all(|end| {
            if end < a.len() && a[end] == a[start] {
                return true;
            }
            let factor = factors.iter().find(|x| x.pos == a[start]).expect("candidate positions are factors");
            let block = Word(word[start..end].to_vec());
            start = end;
            (factor.omega == Omega::Star || block.len() == 1) && factor.nfa.accepts(&block)
        })
    });
    out
}

/// All SG mappings of `t` into `g`: the root goes to the sentinel and each
/// node's children are split over the factors of its parent's converted
/// content model, in order. `t` may lack subtrees a conforming document
/// would need; missing factors are allowed.
pub fn compute_sg_mapping(t: &DocTree, g: &SchemaGraph) -> Vec<SgMapping> {
    if t.label(DocTree::ROOT) != g.label(SchemaGraph::ROOT) {
        return Vec::new();
    }
    let mut factor_cache: HashMap<Label, Vec<Factor>> = HashMap::new();
    // Per document node, the possible images of its children.
    let mut per_node: Vec<(usize, Vec<Vec<NodeId>>)> = Vec::new();
    for n in t.preorder() {
        let children = t.children(n);
        if children.is_empty() {
            continue;
        }
        let parent = t.label(n).clone();
        let factors = factor_cache.entry(parent.clone()).or_insert_with(|| {
            g.dtd()
                .model(&parent)
                .and_then(dc_convert)
                .unwrap_or_default()
                .into_iter()
                .map(|f| Factor { pos: f.position, omega: f.omega, nfa: Nfa::glushkov(&f.body) })
                .collect()
        });
        let word = t.child_labels(n);
        let candidates =
            |l: &Label| -> Vec<usize> { g.children_with_label(&parent, l).iter().map(|&u| g.node(u).pos).collect() };
        let options: Vec<Vec<NodeId>> = assignments(&word, factors, &candidates)
            .into_iter()
            .map(|a| {
                a.iter()
                    .zip(&word)
                    .map(|(&pos, l)| {
                        *g.children_with_label(&parent, l)
                            .iter()
                            .find(|&&u| g.node(u).pos == pos)
                            .expect("candidate positions come from these nodes")
                    })
                    .collect()
            })
            .collect();
        if options.is_empty() {
            return Vec::new();
        }
        per_node.push((n, options));
    }
    let mut out = vec![vec![SchemaGraph::ROOT; t.len()]];
    for (n, options) in &per_node {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for theta in &out {
            for opt in options {
                let mut th = theta.clone();
                for (&c, &u) in t.children(*n).iter().zip(opt) {
                    th[c] = u;
                }
                next.push(th);
            }
        }
        out = next;
    }
    let mut out: Vec<SgMapping> = out.into_iter().map(SgMapping).collect();
    out.sort();
    out
}

/// Whether `(t, θ)` satisfies `b`: for every key there is a node whose
/// root path spells the key and whose DF children (under `θ`) include the
/// key's labels. `ε` keys impose nothing.
pub fn beta_satisfied(t: &DocTree, theta: &SgMapping, b: &SibMap, g: &SchemaGraph) -> bool {
    b.entries().all(|(key, entry)| {
        key.is_empty()
            || (0..t.len()).any(|w| {
                t.label_path(w) == key.labels() && {
                    let df: BTreeSet<&Label> =
                        t.children(w).iter().filter(|&&c| g.node(theta.get(c)).df).map(|&c| t.label(c)).collect();
                    entry.labels.iter().all(|l| df.contains(l))
                }
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::LabelPath;
    use crate::dtd::Dtd;

    fn graph() -> SchemaGraph {
        let d = Dtd::from_compact(&[("r", "r*(a*b|c)r*"), ("a", "eps"), ("b", "a"), ("c", "eps")]).unwrap();
        SchemaGraph::build(&d).unwrap()
    }

    fn map(entries: &[(&str, &[&str])]) -> SibMap {
        let mut m = SibMap::new();
        for (k, ls) in entries {
            m.add(LabelPath::from_chars(k), ls.iter().map(|l| Label::new(*l)).collect(), false);
        }
        m
    }

    #[test]
    fn running_example_mapping_is_unique() {
        let t = DocTree::parse("r(r(c),a,a,b(a))").unwrap();
        let thetas = compute_sg_mapping(&t, &graph());
        assert_eq!(thetas.len(), 1);
        let shown: Vec<String> = thetas[0].0.iter().map(NodeId::to_string).collect();
        // Preorder ids: r, r, c, a, a, b, a.
        assert_eq!(shown, ["u0", "u1", "u4", "u2", "u2", "u3", "u6"]);
    }

    #[test]
    fn deleted_subtrees_leave_several_mappings() {
        let t = DocTree::parse("r(r,r)").unwrap();
        let thetas = compute_sg_mapping(&t, &graph());
        let pairs: Vec<(usize, usize)> = thetas.iter().map(|th| (th.get(1).0, th.get(2).0)).collect();
        assert_eq!(pairs, [(1, 1), (1, 5), (5, 5)]);
        assert_eq!(compute_sg_mapping(&DocTree::leaf("r"), &graph()), [SgMapping(vec![NodeId(0)])]);
        assert!(compute_sg_mapping(&DocTree::parse("r(b,a)").unwrap(), &graph()).is_empty());
        assert!(compute_sg_mapping(&DocTree::parse("r(b,b)").unwrap(), &graph()).is_empty());
    }

    #[test]
    fn satisfaction() {
        let g = graph();
        let t = DocTree::parse("r(r(c),a,a,b(a))").unwrap();
        let th = &compute_sg_mapping(&t, &g)[0];
        assert!(beta_satisfied(&t, th, &map(&[("r", &["b"]), ("rr", &["c"]), ("rb", &["a"])]), &g));
        assert!(!beta_satisfied(&t, th, &map(&[("r", &["b", "c"])]), &g));
        assert!(beta_satisfied(&t, th, &SibMap::new(), &g));
        assert!(beta_satisfied(&t, th, &map(&[("r", &["a", "b"]), ("rr", &["c"]), ("rb", &["a"])]), &g));
        assert!(!beta_satisfied(&t, th, &map(&[("r", &["a", "b", "c"])]), &g));
        // `r` occurs twice in its parent's model, so it is never a DF child.
        assert!(!beta_satisfied(&t, th, &map(&[("r", &["r"])]), &g));
    }
}
