use std::collections::HashMap;
use std::rc::Rc;

use super::tree::DocTree;
use crate::dtd::Dtd;
use crate::label::Label;
use crate::regex::Word;

/// A subtree shared between the enumerated trees that contain it.
#[derive(Debug)]
struct Shape {
    label: Label,
    children: Vec<Rc<Shape>>,
}

impl Shape {
    fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    fn write_into(&self, t: &mut DocTree, n: usize) {
        for c in &self.children {
            let id = t.push_child(n, c.label.clone());
            c.write_into(t, id);
        }
    }
}

struct Enumerator<'d> {
    dtd: &'d Dtd,
    rep: usize,
    words: HashMap<Label, Vec<Word>>,
    memo: HashMap<(Label, usize), Rc<Vec<Rc<Shape>>>>,
}

impl Enumerator<'_> {
    /// Every `l`-subtree of height at most `h` whose children words iterate
    /// each star at most `rep` times. Words using a label with no subtree
    /// in the remaining height are skipped.
    fn shapes(&mut self, l: &Label, h: usize) -> Rc<Vec<Rc<Shape>>> {
        if let Some(s) = self.memo.get(&(l.clone(), h)) {
            return s.clone();
        }
        let words = match self.words.get(l) {
            Some(w) => w.clone(),
            None => {
                let w: Vec<Word> =
                    self.dtd.model(l).map_or_else(Vec::new, |e| e.capped_words(self.rep).into_iter().collect());
                self.words.insert(l.clone(), w.clone());
                w
            }
        };
        let mut out = Vec::new();
        for w in words {
            if w.is_empty() {
                out.push(Rc::new(Shape { label: l.clone(), children: Vec::new() }));
                continue;
            }
            let Some(below) = h.checked_sub(1) else { continue };
            let options: Vec<Rc<Vec<Rc<Shape>>>> = w.labels().iter().map(|c| self.shapes(c, below)).collect();
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            let mut index = vec![0; options.len()];
            loop {
                let children = index.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
                out.push(Rc::new(Shape { label: l.clone(), children }));
                let Some(pos) = (0..index.len()).rev().find(|&j| index[j] + 1 < options[j].len()) else { break };
                index[pos] += 1;
                index[pos + 1..].iter_mut().for_each(|x| *x = 0);
            }
        }
        let out = Rc::new(out);
        self.memo.insert((l.clone(), h), out.clone());
        out
    }
}

/// All conforming documents of height at most `depth` in which every star
/// and plus of every content model is iterated at most `rep` times, ordered
/// by size and then by term. The count grows very quickly with the bounds.
pub fn enumerate_trees(d: &Dtd, depth: usize, rep: usize) -> Vec<DocTree> {
    let mut e = Enumerator { dtd: d, rep, words: HashMap::new(), memo: HashMap::new() };
    let shapes = e.shapes(d.root(), depth);
    let mut trees: Vec<(usize, String, DocTree)> = shapes
        .iter()
        .map(|s| {
            let mut t = DocTree::leaf(s.label.clone());
            s.write_into(&mut t, DocTree::ROOT);
            (s.size(), t.to_string(), t)
        })
        .collect();
    trees.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    trees.dedup_by(|a, b| a.1 == b.1);
    trees.into_iter().map(|(_, _, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::conforms;

    #[test]
    fn trivial_dtd_has_one_tree() {
        let d = Dtd::from_compact(&[("r", "eps")]).unwrap();
        assert_eq!(enumerate_trees(&d, 3, 2).len(), 1);
    }

    #[test]
    fn running_example_shallow_trees() {
        let d = Dtd::from_compact(&[("r", "r*(a*b|c)r*"), ("a", "eps"), ("b", "a"), ("c", "eps")]).unwrap();
        let trees = enumerate_trees(&d, 2, 1);
        let terms: Vec<String> = trees.iter().map(DocTree::to_string).collect();
        assert!(terms.contains(&"r(b(a))".to_string()));
        assert!(terms.contains(&"r(c)".to_string()));
        assert_eq!(terms[0], "r(c)");
        assert!(trees.iter().all(|t| conforms(t, &d) && t.height() <= 2));
        let mut sorted = terms.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), terms.len());
    }

    #[test]
    fn recursion_is_cut_at_the_depth_bound() {
        let d = Dtd::from_compact(&[("r", "a"), ("a", "r")]).unwrap();
        assert!(enumerate_trees(&d, 1, 1).is_empty());
        let d = Dtd::from_compact(&[("r", "r|a"), ("a", "eps")]).unwrap();
        let terms: Vec<String> = enumerate_trees(&d, 2, 1).iter().map(DocTree::to_string).collect();
        assert_eq!(terms, ["r(a)", "r(r(a))"]);
    }
}
