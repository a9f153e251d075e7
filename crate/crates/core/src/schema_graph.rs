//! Schema graphs of MDF/DC DTDs.
//!
//! A node `(λ_par, pos, ω, λ)` stands for label `λ` occurring in factor `pos`
//! of the content model of `λ_par`, after every disjunction outside a star
//! has been replaced by concatenation and the result flattened. There is an
//! edge `u → u'` exactly when `λ(u) = λ_par(u')`, so edges are not stored;
//! children are looked up by label.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dtd::{is_mdf_dc, Dtd};
use crate::label::Label;
use crate::regex::ContentModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("content model of `{0}` is not MDF/DC")]
    NotMdfDc(Label),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Omega {
    /// The factor is a single symbol.
    #[serde(rename = "-")]
    Single,
    /// The factor is a starred expression.
    #[serde(rename = "*")]
    Star,
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Omega::Single => "-",
            Omega::Star => "*",
        })
    }
}

/// One factor of a flattened DC content model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcFactor {
    /// 1-based.
    pub position: usize,
    pub body: ContentModel,
    pub omega: Omega,
    pub labels: Vec<Label>,
    pub df_labels: Vec<Label>,
    pub dfs_labels: Vec<Label>,
}

fn collect_factors(e: &ContentModel, out: &mut Vec<ContentModel>) -> Result<(), ()> {
    match e {
        ContentModel::Epsilon => Ok(()),
        ContentModel::Symbol(_) | ContentModel::Star(_) => {
            out.push(e.clone());
            Ok(())
        }
        ContentModel::Concat(es) | ContentModel::Disj(es) => es.iter().try_for_each(|f| collect_factors(f, out)),
        ContentModel::Opt(_) | ContentModel::Plus(_) | ContentModel::Hash(..) => Err(()),
    }
}

/// Replaces disjunctions outside stars by concatenation and flattens. A
/// label is DF when it occurs exactly once in `e`, and DFS when it is DF and
/// not under a star.
pub fn dc_convert(e: &ContentModel) -> Option<Vec<DcFactor>> {
    if !is_mdf_dc(e) {
        return None;
    }
    let mut bodies = Vec::new();
    collect_factors(e, &mut bodies).ok()?;
    Some(
        bodies
            .into_iter()
            .enumerate()
            .map(|(i, body)| {
                let omega = if matches!(body, ContentModel::Symbol(_)) { Omega::Single } else { Omega::Star };
                let labels: Vec<Label> = body.symbols().into_iter().collect();
                let df_labels: Vec<Label> = labels.iter().filter(|l| e.occurrences(l) == 1).cloned().collect();
                let dfs_labels = if omega == Omega::Single { df_labels.clone() } else { Vec::new() };
                DcFactor { position: i + 1, body, omega, labels, df_labels, dfs_labels }
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SgNode {
    /// `None` is `⊥`, the parent of the root sentinel.
    pub parent: Option<Label>,
    pub pos: usize,
    pub omega: Omega,
    pub label: Label,
    pub df: bool,
    pub dfs: bool,
}

impl fmt::Display for SgNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.parent {
            Some(p) => write!(f, "({},{},{},{})", p, self.pos, self.omega, self.label),
            None => write!(f, "(⊥,{},{},{})", self.pos, self.omega, self.label),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemaGraph {
    dtd: Dtd,
    nodes: Vec<SgNode>,
    children: HashMap<Label, Vec<NodeId>>,
    by_label: HashMap<(Label, Label), Vec<NodeId>>,
    factor_counts: HashMap<Label, usize>,
}

impl SchemaGraph {
    /// The sentinel `(⊥,1,-,r)`.
    pub const ROOT: NodeId = NodeId(0);

    /// Builds the graph. Nodes are numbered with the sentinel first, then by
    /// rule declaration order, factor position and label.
    pub fn build(dtd: &Dtd) -> Result<Self, GraphError> {
        let mut nodes =
            vec![SgNode { parent: None, pos: 1, omega: Omega::Single, label: dtd.root().clone(), df: true, dfs: true }];
        let mut factor_counts = HashMap::new();
        for (parent, e) in dtd.rules() {
            let factors = dc_convert(e).ok_or_else(|| GraphError::NotMdfDc(parent.clone()))?;
            factor_counts.insert(parent.clone(), factors.len());
            for f in factors {
                for l in &f.labels {
                    nodes.push(SgNode {
                        parent: Some(parent.clone()),
                        pos: f.position,
                        omega: f.omega,
                        label: l.clone(),
                        df: f.df_labels.contains(l),
                        dfs: f.dfs_labels.contains(l),
                    });
                }
            }
        }
        let mut children: HashMap<Label, Vec<NodeId>> = HashMap::new();
        let mut by_label: HashMap<(Label, Label), Vec<NodeId>> = HashMap::new();
        for (i, n) in nodes.iter().enumerate().skip(1) {
            let p = n.parent.clone().expect("only the sentinel lacks a parent");
            children.entry(p.clone()).or_default().push(NodeId(i));
            by_label.entry((p, n.label.clone())).or_default().push(NodeId(i));
        }
        Ok(SchemaGraph { dtd: dtd.clone(), nodes, children, by_label, factor_counts })
    }

    /// The MDF/DC DTD the graph was built from.
    pub fn dtd(&self) -> &Dtd {
        &self.dtd
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &SgNode {
        &self.nodes[id.0]
    }

    pub fn label(&self, id: NodeId) -> &Label {
        &self.nodes[id.0].label
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &SgNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    /// Nodes whose parent label is `parent`, ordered by position and label.
    pub fn children(&self, parent: &Label) -> &[NodeId] {
        self.children.get(parent).map_or(&[], Vec::as_slice)
    }

    /// Children of `parent` with label `l`.
    pub fn children_with_label(&self, parent: &Label, l: &Label) -> &[NodeId] {
        self.by_label.get(&(parent.clone(), l.clone())).map_or(&[], Vec::as_slice)
    }

    /// Number of factors of the converted content model of `l`.
    pub fn factor_count(&self, l: &Label) -> usize {
        self.factor_counts.get(l).copied().unwrap_or(0)
    }

    /// Whether a `u'` may be a following sibling of a `u` (same parent
    /// label): strictly later position after a single-symbol factor, the
    /// same or a later one after a starred factor.
    pub fn may_follow(&self, u: NodeId, u2: NodeId) -> bool {
        let (a, b) = (self.node(u), self.node(u2));
        a.parent.is_some()
            && a.parent == b.parent
            && match a.omega {
                Omega::Single => a.pos < b.pos,
                Omega::Star => a.pos <= b.pos,
            }
    }

    /// The line-based export, one `node <λ_par> <pos> <ω> <λ> df=<0|1>
    /// dfs=<0|1>` line per node in numbering order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let parent = n.parent.as_ref().map_or("⊥", Label::as_str);
            out.push_str(&format!(
                "node {} {} {} {} df={} dfs={}\n",
                parent,
                n.pos,
                n.omega,
                n.label,
                u8::from(n.df),
                u8::from(n.dfs)
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<_> = self
            .nodes()
            .map(|(id, n)| {
                serde_json::json!({
                    "id": id.to_string(),
                    "parent": n.parent,
                    "pos": n.pos,
                    "omega": n.omega,
                    "label": n.label,
                    "df": n.df,
                    "dfs": n.dfs,
                })
            })
            .collect();
        let edges: Vec<_> = self
            .node_ids()
            .flat_map(|u| self.children(self.label(u)).iter().map(move |&v| [u.to_string(), v.to_string()]))
            .collect();
        serde_json::json!({ "root": self.dtd.root(), "nodes": nodes, "edges": edges })
    }
}
