//! Seeded generators for randomized tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xpathsat::constraints::{LabelPath, SibMap};
use xpathsat::dtd::{is_mdf_dc, is_mrw, Dtd};
use xpathsat::label::Label;
use xpathsat::regex::ContentModel;
use xpathsat::schema_graph::SchemaGraph;
use xpathsat::xpath::{Axis, Qualifier, XPath};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(names: &[&str]) -> Vec<Label> {
    names.iter().map(|n| Label::new(*n)).collect()
}

fn sym(l: &Label) -> ContentModel {
    ContentModel::Symbol(l.clone())
}

/// A factor over labels that occur nowhere else in the model.
fn unique_factor(rng: &mut ChaCha8Rng, ls: &[Label], extended: bool) -> ContentModel {
    match (ls.len(), extended && rng.gen_bool(0.5)) {
        (1, false) => sym(&ls[0]),
        (1, true) => {
            if rng.gen_bool(0.5) {
                ContentModel::opt(sym(&ls[0]))
            } else {
                ContentModel::plus(sym(&ls[0]))
            }
        }
        (2, false) => {
            if rng.gen_bool(0.5) {
                ContentModel::disj(vec![sym(&ls[0]), sym(&ls[1])])
            } else {
                ContentModel::disj(vec![ContentModel::star(sym(&ls[0])), sym(&ls[1])])
            }
        }
        (2, true) => match rng.gen_range(0..3) {
            0 => ContentModel::hash(vec![sym(&ls[0])], vec![sym(&ls[1])]),
            1 => ContentModel::opt(ContentModel::disj(vec![sym(&ls[0]), sym(&ls[1])])),
            _ => ContentModel::disj(vec![ContentModel::plus(sym(&ls[0])), sym(&ls[1])]),
        },
        (_, false) => ContentModel::disj(vec![
            ContentModel::concat(vec![ContentModel::star(sym(&ls[0])), sym(&ls[1])]),
            sym(&ls[2]),
        ]),
        (_, true) => {
            if rng.gen_bool(0.5) {
                ContentModel::hash(vec![sym(&ls[0])], vec![sym(&ls[1]), ContentModel::opt(sym(&ls[2]))])
            } else {
                ContentModel::disj(vec![
                    ContentModel::concat(vec![ContentModel::opt(sym(&ls[0])), sym(&ls[1])]),
                    sym(&ls[2]),
                ])
            }
        }
    }
}

/// A starred factor over labels that may repeat across starred factors.
fn star_factor(rng: &mut ChaCha8Rng, pool: &[Label], extended: bool) -> ContentModel {
    let a = pool.choose(rng).expect("non-empty pool");
    let b = pool.choose(rng).expect("non-empty pool");
    let body = match rng.gen_range(0..3) {
        0 => sym(a),
        1 if a != b => ContentModel::disj(vec![sym(a), sym(b)]),
        _ => ContentModel::concat(vec![sym(a), sym(b)]),
    };
    if extended && rng.gen_bool(0.3) {
        ContentModel::plus(body)
    } else {
        ContentModel::star(body)
    }
}

fn random_model(rng: &mut ChaCha8Rng, alphabet: &[Label], extended: bool, max_size: usize) -> ContentModel {
    if alphabet.is_empty() {
        return ContentModel::Epsilon;
    }
    let accept = |e: &ContentModel| if extended { is_mrw(e) } else { is_mdf_dc(e) };
    for _ in 0..100 {
        let mut ls = alphabet.to_vec();
        ls.shuffle(rng);
        let split = rng.gen_range(0..=ls.len());
        let (mut unique, repeat) = (ls[..split].to_vec(), ls[split..].to_vec());
        let mut factors = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            if !unique.is_empty() && (repeat.is_empty() || rng.gen_bool(0.5)) {
                let n = rng.gen_range(1..=unique.len().min(3));
                let used: Vec<Label> = unique.drain(..n).collect();
                factors.push(unique_factor(rng, &used, extended));
            } else if !repeat.is_empty() {
                factors.push(star_factor(rng, &repeat, extended));
            }
        }
        let e = ContentModel::concat(factors);
        if e.size() <= max_size && accept(&e) {
            return e;
        }
    }
    ContentModel::Epsilon
}

/// A random MDF/DC model: unique-symbol factors and starred factors.
pub fn mdf_dc_model(rng: &mut ChaCha8Rng, alphabet: &[Label], max_size: usize) -> ContentModel {
    random_model(rng, alphabet, false, max_size)
}

/// A random MRW model, also using `?`, `+` and `#`.
pub fn mrw_model(rng: &mut ChaCha8Rng, alphabet: &[Label], max_size: usize) -> ContentModel {
    random_model(rng, alphabet, true, max_size)
}

/// A random non-recursive DTD over `r` and up to three more labels; each
/// rule only mentions labels after its own, so every document has height
/// at most three.
pub fn non_recursive_dtd(rng: &mut ChaCha8Rng, extended: bool, max_size: usize) -> Dtd {
    let all = labels(&["r", "a", "b", "c"]);
    let n = rng.gen_range(2..=all.len());
    let rules = (0..n)
        .map(|i| {
            let later = &all[i + 1..n];
            let e = if later.is_empty() || (i > 0 && rng.gen_bool(0.15)) {
                ContentModel::Epsilon
            } else {
                random_model(rng, later, extended, max_size)
            };
            (all[i].clone(), e)
        })
        .collect();
    Dtd::new("r", rules).expect("generated rules only use declared labels")
}

fn child_labels(d: &Dtd, l: &Label) -> Vec<Label> {
    d.model(l).map(|e| e.symbols().into_iter().collect()).unwrap_or_default()
}

/// Mostly a label the DTD allows at this point, sometimes any label.
fn plausible(rng: &mut ChaCha8Rng, d: &Dtd, options: Vec<Label>) -> Label {
    if options.is_empty() || rng.gen_bool(0.15) {
        let all: Vec<Label> = d.alphabet().into_iter().collect();
        all.choose(rng).expect("non-empty alphabet").clone()
    } else {
        options.choose(rng).expect("non-empty").clone()
    }
}

/// A step from the node whose ancestor labels (root first) are `stack`.
/// `axes` lists weights and must start with `↓`.
fn random_step(rng: &mut ChaCha8Rng, d: &Dtd, stack: &mut Vec<Label>, axes: &[(Axis, u32)]) -> (Axis, Label) {
    // Steps away from the root other than `↓` select nothing.
    let axes = if stack.len() == 1 { &axes[..1] } else { axes };
    let total: u32 = axes.iter().map(|(_, w)| w).sum();
    let mut pick = rng.gen_range(0..total);
    let axis = axes
        .iter()
        .find(|(_, w)| {
            let hit = pick < *w;
            pick = pick.saturating_sub(*w);
            hit
        })
        .expect("weights cover the range")
        .0;
    let top = stack.last().expect("non-empty stack").clone();
    let parent = stack.len().checked_sub(2).map(|i| stack[i].clone());
    let label = match axis {
        Axis::Child => plausible(rng, d, child_labels(d, &top)),
        Axis::Parent => plausible(rng, d, parent.iter().cloned().collect()),
        _ => plausible(rng, d, parent.map(|p| child_labels(d, &p)).unwrap_or_default()),
    };
    match axis {
        Axis::Child => stack.push(label.clone()),
        Axis::Parent => {
            if stack.len() > 1 {
                stack.pop();
            }
        }
        _ => *stack.last_mut().expect("non-empty") = label.clone(),
    }
    (axis, label)
}

fn chain(steps: Vec<(Axis, Label)>) -> XPath {
    steps.into_iter().map(|(a, l)| XPath::Step(a, l)).reduce(XPath::seq).expect("at least one step")
}

/// A random step-only expression over `↓`, `↑`, `→⁺`, `←⁺`.
pub fn eval1_query(rng: &mut ChaCha8Rng, d: &Dtd, max_steps: usize) -> XPath {
    let axes = [(Axis::Child, 4), (Axis::Parent, 2), (Axis::FollSibling, 2), (Axis::PrecSibling, 2)];
    let mut stack = vec![d.root().clone()];
    let n = rng.gen_range(1..=max_steps);
    chain((0..n).map(|_| random_step(rng, d, &mut stack, &axes)).collect())
}

/// A random step-only expression over `↓`, `→⁺`, `←⁺`, which both
/// procedures decide.
pub fn sibling_query(rng: &mut ChaCha8Rng, d: &Dtd, max_steps: usize) -> XPath {
    let mut stack = vec![d.root().clone()];
    let n = rng.gen_range(1..=max_steps);
    chain((0..n).map(|_| random_step(rng, d, &mut stack, &EVAL2_AXES)).collect())
}

/// A random expression over `↓`, `→⁺`, `←⁺` with conjunctive qualifiers,
/// at most `max_steps` steps in total.
pub fn eval2_query(rng: &mut ChaCha8Rng, d: &Dtd, max_steps: usize) -> XPath {
    let mut budget = max_steps;
    let mut stack = vec![d.root().clone()];
    eval2_path(rng, d, &mut stack, &mut budget, 0)
}

const EVAL2_AXES: [(Axis, u32); 3] = [(Axis::Child, 2), (Axis::FollSibling, 1), (Axis::PrecSibling, 1)];

fn eval2_path(rng: &mut ChaCha8Rng, d: &Dtd, stack: &mut Vec<Label>, budget: &mut usize, nesting: usize) -> XPath {
    let n = rng.gen_range(1..=(*budget).clamp(1, 3));
    let mut out: Option<XPath> = None;
    for _ in 0..n {
        if *budget == 0 {
            break;
        }
        *budget -= 1;
        let (a, l) = random_step(rng, d, stack, &EVAL2_AXES);
        let mut step = XPath::Step(a, l);
        if nesting < 2 && *budget > 0 && rng.gen_bool(0.4) {
            let mut q = eval2_qualifier(rng, d, stack, budget, nesting);
            if *budget > 0 && rng.gen_bool(0.3) {
                q = Qualifier::and(q, eval2_qualifier(rng, d, stack, budget, nesting));
            }
            step = XPath::qual(step, q);
        }
        out = Some(match out {
            None => step,
            Some(p) => XPath::seq(p, step),
        });
    }
    out.expect("at least one step")
}

fn eval2_qualifier(rng: &mut ChaCha8Rng, d: &Dtd, stack: &[Label], budget: &mut usize, nesting: usize) -> Qualifier {
    let mut inner = stack.to_vec();
    Qualifier::path(eval2_path(rng, d, &mut inner, budget, nesting + 1))
}

/// Whether every step from the root along `path` lands on a DFS node.
fn path_dfs(g: &SchemaGraph, path: &[Label]) -> bool {
    path.windows(2).all(|w| match g.children_with_label(&w[0], &w[1]) {
        [u] => g.node(*u).dfs,
        _ => false,
    })
}

fn df_children(d: &Dtd, l: &Label) -> Vec<Label> {
    let Some(e) = d.model(l) else { return Vec::new() };
    e.symbols().into_iter().filter(|c| e.occurrences(c) == 1).collect()
}

/// A random constraint map keyed by root label paths of `g`'s DTD. Each
/// key holds a random subset of its last label's DF children and, like
/// maps built by evaluation, the next label of any longer key when that
/// label is DF.
pub fn closed_sibmap(rng: &mut ChaCha8Rng, g: &SchemaGraph, max_paths: usize) -> SibMap {
    let d = g.dtd();
    let mut keys: BTreeSet<Vec<Label>> = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=max_paths) {
        let mut path = vec![d.root().clone()];
        keys.insert(path.clone());
        for _ in 0..rng.gen_range(0..=2) {
            let options = child_labels(d, path.last().expect("non-empty"));
            let Some(next) = options.choose(rng) else { break };
            path.push(next.clone());
            keys.insert(path.clone());
        }
    }
    let mut m = SibMap::new();
    for key in &keys {
        let last = key.last().expect("non-empty");
        let df = df_children(d, last);
        let mut ls: BTreeSet<Label> = df.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        for other in &keys {
            if other.len() == key.len() + 1 && other.starts_with(key) && df.contains(&other[key.len()]) {
                ls.insert(other[key.len()].clone());
            }
        }
        m.add(LabelPath(key.clone()), ls, path_dfs(g, key));
    }
    m
}
