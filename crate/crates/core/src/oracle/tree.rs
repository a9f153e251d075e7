use std::fmt;

use thiserror::Error;

use crate::label::Label;

/// An ordered labelled tree stored as an arena; node 0 is the root. Node ids
/// are stable under insertion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DocTree {
    nodes: Vec<DocNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct DocNode {
    label: Label,
    parent: Option<usize>,
    children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tree syntax error at offset {pos}: {msg}")]
pub struct TreeParseError {
    pub pos: usize,
    pub msg: String,
}

impl DocTree {
    pub const ROOT: usize = 0;

    pub fn leaf(label: impl Into<Label>) -> Self {
        DocTree { nodes: vec![DocNode { label: label.into(), parent: None, children: Vec::new() }] }
    }

    /// Parses term syntax such as `r(r(c),a,a,b(a))`. Commas between
    /// siblings are optional and `a()` is the same as `a`.
    pub fn parse(text: &str) -> Result<Self, TreeParseError> {
        let mut p = TermParser { text, pos: 0 };
        let label = p.label()?;
        let mut t = DocTree::leaf(label);
        p.children(&mut t, Self::ROOT)?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, n: usize) -> &Label {
        &self.nodes[n].label
    }

    pub fn parent(&self, n: usize) -> Option<usize> {
        self.nodes[n].parent
    }

    pub fn children(&self, n: usize) -> &[usize] {
        &self.nodes[n].children
    }

    pub fn child_labels(&self, n: usize) -> Vec<Label> {
        self.nodes[n].children.iter().map(|&c| self.nodes[c].label.clone()).collect()
    }

    /// Number of edges from the root to `n`.
    pub fn depth_of(&self, mut n: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[n].parent {
            n = p;
            d += 1;
        }
        d
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        (0..self.len()).map(|n| self.depth_of(n)).max().unwrap_or(0)
    }

    /// Labels from the root down to `n`, inclusive.
    pub fn label_path(&self, mut n: usize) -> Vec<Label> {
        let mut out = vec![self.nodes[n].label.clone()];
        while let Some(p) = self.nodes[n].parent {
            out.push(self.nodes[p].label.clone());
            n = p;
        }
        out.reverse();
        out
    }

    /// Inserts a new leaf as the `index`-th child of `parent`.
    pub fn insert_child(&mut self, parent: usize, index: usize, label: Label) -> usize {
        let id = self.nodes.len();
        self.nodes.push(DocNode { label, parent: Some(parent), children: Vec::new() });
        self.nodes[parent].children.insert(index, id);
        id
    }

    pub fn push_child(&mut self, parent: usize, label: Label) -> usize {
        let index = self.nodes[parent].children.len();
        self.insert_child(parent, index, label)
    }

    /// Appends a copy of `sub` as the last child of `parent`.
    pub fn graft(&mut self, parent: usize, sub: &DocTree) {
        fn go(t: &mut DocTree, parent: usize, sub: &DocTree, n: usize) {
            let id = t.push_child(parent, sub.label(n).clone());
            for &c in sub.children(n) {
                go(t, id, sub, c);
            }
        }
        go(self, parent, sub, Self::ROOT);
    }

    /// Nodes in document order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![Self::ROOT];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    fn write_node(&self, f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
        f.write_str(self.nodes[n].label.as_str())?;
        let children = &self.nodes[n].children;
        if !children.is_empty() {
            f.write_str("(")?;
            for (i, &c) in children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                self.write_node(f, c)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for DocTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(f, Self::ROOT)
    }
}

struct TermParser<'a> {
    text: &'a str,
    pos: usize,
}

impl TermParser<'_> {
    fn error(&self, msg: &str) -> TreeParseError {
        TreeParseError { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn label(&mut self) -> Result<Label, TreeParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.error("expected a label"));
        }
        self.pos += len;
        Ok(Label::new(&rest[..len]))
    }

    fn children(&mut self, t: &mut DocTree, parent: usize) -> Result<(), TreeParseError> {
        if self.peek() != Some('(') {
            return Ok(());
        }
        self.pos += 1;
        loop {
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(',') if !t.children(parent).is_empty() => self.pos += 1,
                None => return Err(self.error("unclosed `(`")),
                _ => {
                    let l = self.label()?;
                    let id = t.push_child(parent, l);
                    self.children(t, id)?;
                }
            }
        }
    }
}
