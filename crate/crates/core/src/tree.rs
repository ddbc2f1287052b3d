//! Binary regression/classification trees with axis-aligned splits.
//!
//! Splits minimise the summed squared error of the children. For 0/1 targets
//! that is exactly the weighted Gini impurity (Gini = 2 p (1 - p) = 2 var),
//! so the same builder serves the classification forest and the boosting
//! regressor. Leaves store the mean target of their training rows.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        value: f64,
        n: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    /// Columns tried per node; `None` tries them all.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Row indices of a dataset sorted by each column (ties by row index).
/// Computed once and shared by every tree grown on the dataset.
#[derive(Debug, Clone)]
pub struct Presorted {
    order: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new(ds: &Dataset) -> Presorted {
        let order = (0..ds.n_cols())
            .map(|j| {
                let col = ds.column(j);
                let mut idx: Vec<u32> = (0..ds.n_rows() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Presorted { order }
    }
}

/// Per-column lists of sample positions, each column's list in ascending
/// value order, plus one list in sample order. A node owns the same
/// `[lo, hi)` range of every list.
struct Lists {
    n: usize,
    p: usize,
    pos: Vec<u32>,
    goes_left: Vec<bool>,
    buf: Vec<u32>,
}

impl Lists {
    fn new(pre: &Presorted, n_rows: usize, rows: &[usize]) -> Lists {
        let n = rows.len();
        let p = pre.order.len();
        let mut start = vec![0u32; n_rows + 1];
        for &r in rows {
            start[r + 1] += 1;
        }
        for i in 0..n_rows {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut by_row = vec![0u32; n];
        for (k, &r) in rows.iter().enumerate() {
            by_row[fill[r] as usize] = k as u32;
            fill[r] += 1;
        }
        let mut pos = Vec::with_capacity((p + 1) * n);
        for order in &pre.order {
            for &r in order {
                let r = r as usize;
                pos.extend_from_slice(&by_row[start[r] as usize..start[r + 1] as usize]);
            }
        }
        pos.extend(0..n as u32);
        Lists {
            n,
            p,
            pos,
            goes_left: vec![false; n],
            buf: Vec::with_capacity(n),
        }
    }

    fn column(&self, j: usize, lo: usize, hi: usize) -> &[u32] {
        &self.pos[j * self.n + lo..j * self.n + hi]
    }

    fn natural(&self, lo: usize, hi: usize) -> &[u32] {
        self.column(self.p, lo, hi)
    }

    /// Stable partition of every list's `[lo, hi)` by `goes_left`; returns
    /// the split point.
    fn partition(&mut self, lo: usize, hi: usize) -> usize {
        let mut mid = lo;
        for l in 0..=self.p {
            let seg = &mut self.pos[l * self.n + lo..l * self.n + hi];
            self.buf.clear();
            let mut w = 0;
            for k in 0..seg.len() {
                let v = seg[k];
                if self.goes_left[v as usize] {
                    seg[w] = v;
                    w += 1;
                } else {
                    self.buf.push(v);
                }
            }
            seg[w..].copy_from_slice(&self.buf);
            mid = lo + w;
        }
        mid
    }
}

struct Grower<'a, R> {
    ds: &'a Dataset,
    target: &'a [f64],
    rows: &'a [usize],
    params: &'a TreeParams,
    rng: &'a mut R,
    lists: Lists,
    scratch: Vec<u32>,
}

/// Below this many samples a node sorts its own columns instead of
/// partitioning the shared lists.
const SMALL_NODE: usize = 64;

/// The samples of a node: a range of the shared lists, or an owned list in
/// sample order.
enum Span {
    Shared { lo: usize, hi: usize },
    Own(Vec<u32>),
}

impl Span {
    fn natural<'a>(&'a self, lists: &'a Lists) -> &'a [u32] {
        match self {
            Span::Shared { lo, hi } => lists.natural(*lo, *hi),
            Span::Own(v) => v,
        }
    }
}

impl Tree {
    /// Grows a tree on `rows` (indices into `ds`, repeats allowed).
    pub fn fit<R: Rng>(ds: &Dataset, target: &[f64], rows: Vec<usize>, params: &TreeParams, rng: &mut R) -> Tree {
        Self::fit_presorted(ds, &Presorted::new(ds), target, &rows, params, rng)
    }

    /// As [`Tree::fit`], reusing column orders computed by [`Presorted::new`]
    /// on the same dataset.
    pub fn fit_presorted<R: Rng>(
        ds: &Dataset,
        pre: &Presorted,
        target: &[f64],
        rows: &[usize],
        params: &TreeParams,
        rng: &mut R,
    ) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        let mut g = Grower {
            ds,
            target,
            rows,
            params,
            rng,
            lists: Lists::new(pre, ds.n_rows(), rows),
            scratch: Vec::new(),
        };
        tree.grow(&mut g, Span::Shared { lo: 0, hi: rows.len() }, 0);
        tree
    }

    fn grow<R: Rng>(&mut self, g: &mut Grower<'_, R>, span: Span, depth: usize) -> usize {
        let span = match span {
            Span::Shared { lo, hi } if hi - lo <= SMALL_NODE => Span::Own(g.lists.natural(lo, hi).to_vec()),
            other => other,
        };
        let id = self.nodes.len();
        let (target, rows) = (g.target, g.rows);
        let natural = span.natural(&g.lists);
        let n = natural.len();
        let sum: f64 = natural.iter().map(|&k| target[rows[k as usize]]).sum();
        let mean = if n > 0 { sum / n as f64 } else { 0.0 };
        self.nodes.push(Node::Leaf { value: mean, n });

        let depth_ok = g.params.max_depth.is_none_or(|d| depth < d);
        let first = natural.first().map(|&k| target[rows[k as usize]]);
        let pure = natural.iter().all(|&k| Some(target[rows[k as usize]]) == first);
        if !depth_ok || pure || n < 2 * g.params.min_leaf {
            return id;
        }
        let Some(best) = best_split(g, &span) else {
            return id;
        };
        let col = g.ds.column(best.feature);
        let goes_left = |k: u32| col[rows[k as usize]] <= best.threshold;
        let (left, right) = match span {
            Span::Shared { lo, hi } => {
                let base = g.lists.p * g.lists.n;
                for idx in lo..hi {
                    let k = g.lists.pos[base + idx];
                    g.lists.goes_left[k as usize] = goes_left(k);
                }
                let mid = g.lists.partition(lo, hi);
                (Span::Shared { lo, hi: mid }, Span::Shared { lo: mid, hi })
            }
            Span::Own(v) => {
                let (l, r): (Vec<u32>, Vec<u32>) = v.into_iter().partition(|&k| goes_left(k));
                (Span::Own(l), Span::Own(r))
            }
        };
        let left = self.grow(g, left, depth + 1);
        let right = self.grow(g, right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    /// Leaf value reached by a row whose column `j` is `value(j)`.
    pub fn predict_with(&self, mut value: impl FnMut(usize) -> f64) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => idx = if value(*feature) <= *threshold { *left } else { *right },
            }
        }
    }

    /// Prediction for `row`, calling `seen` with each column tested on the way.
    pub fn predict_tracing(&self, row: &[f64], mut seen: impl FnMut(usize)) -> f64 {
        self.predict_with(|j| {
            seen(j);
            row[j]
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.predict_with(|j| row[j])
    }

    pub fn predict_ds(&self, ds: &Dataset, i: usize) -> f64 {
        self.predict_with(|j| ds.get(i, j))
    }

    pub fn uses_feature(&self, feature: usize) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n, Node::Split { feature: f, .. } if *f == feature))
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn leaves(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { value, n } => Some((*value, *n)),
            _ => None,
        })
    }

    pub fn is_leaf_only(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Overwrites leaf values, e.g. after refitting on residuals.
    pub fn map_leaves(&mut self, mut f: impl FnMut(f64, usize) -> f64) {
        for node in &mut self.nodes {
            if let Node::Leaf { value, n } = node {
                *value = f(*value, *n);
            }
        }
    }
}

/// Best split over the sampled columns. Columns are scanned in ascending
/// index order and thresholds in ascending order; only a strictly larger gain
/// replaces the incumbent, so ties go to the lowest column then threshold.
fn best_split<R: Rng>(g: &mut Grower<'_, R>, span: &Span) -> Option<Candidate> {
    let p = g.ds.n_cols();
    let mut cols: Vec<usize> = match g.params.mtry {
        Some(m) if m < p => sample(g.rng, p, m).into_vec(),
        _ => (0..p).collect(),
    };
    cols.sort_unstable();

    let (target, rows) = (g.target, g.rows);
    let natural = span.natural(&g.lists);
    let n = natural.len();
    let total: f64 = natural.iter().map(|&k| target[rows[k as usize]]).sum();
    let total_sq: f64 = natural.iter().map(|&k| target[rows[k as usize]].powi(2)).sum();
    let parent_sse = total_sq - total * total / n as f64;
    let min_leaf = g.params.min_leaf.max(1);

    let mut best: Option<Candidate> = None;
    for &j in &cols {
        let col = g.ds.column(j);
        let seg: &[u32] = match span {
            Span::Shared { lo, hi } => g.lists.column(j, *lo, *hi),
            Span::Own(v) => {
                // same order as the shared lists: value, then row, then sample
                g.scratch.clear();
                g.scratch.extend_from_slice(v);
                g.scratch.sort_unstable_by(|&a, &b| {
                    let (ra, rb) = (rows[a as usize], rows[b as usize]);
                    col[ra].total_cmp(&col[rb]).then(ra.cmp(&rb)).then(a.cmp(&b))
                });
                &g.scratch
            }
        };
        let at = |k: usize| {
            let r = rows[seg[k] as usize];
            (col[r], target[r])
        };
        if at(0).0 == at(n - 1).0 {
            continue;
        }
        let (mut ls, mut lsq) = (0.0, 0.0);
        let mut cur = at(0);
        for k in 0..n - 1 {
            let (x, y) = cur;
            ls += y;
            lsq += y * y;
            let nl = k + 1;
            let nr = n - nl;
            cur = at(k + 1);
            if nl < min_leaf {
                continue;
            }
            if nr < min_leaf {
                break;
            }
            let next = cur.0;
            if next == x {
                continue;
            }
            let rs = total - ls;
            let rsq = total_sq - lsq;
            let sse = (lsq - ls * ls / nl as f64) + (rsq - rs * rs / nr as f64);
            let gain = parent_sse - sse;
            if gain > 1e-12 && best.as_ref().is_none_or(|b| gain > b.gain) {
                let mut threshold = x + (next - x) / 2.0;
                if threshold >= next {
                    threshold = x;
                }
                best = Some(Candidate {
                    feature: j,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}
