use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{BoostedEnsemble, FeatureMatrix, TrainOptions};

/// Rows with `x[feature] < threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: f64,
    },
}

/// A regression tree stored as a flat node array rooted at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { weight } => return *weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] < *threshold { *left } else { *right },
            }
        }
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }

    pub(crate) fn check(&self, n_features: usize) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("no nodes".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Leaf { weight } if !weight.is_finite() => return Err(format!("node {i}: non-finite leaf")),
                Node::Leaf { .. } => {}
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if *feature >= n_features {
                        return Err(format!("node {i}: feature {feature} out of range"));
                    }
                    if !threshold.is_finite() {
                        return Err(format!("node {i}: non-finite threshold"));
                    }
                    // Children always follow their parent, which also rules out cycles.
                    for child in [left, right] {
                        if *child <= i || *child >= self.nodes.len() {
                            return Err(format!("node {i}: bad child index {child}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Exact greedy tree builder over presorted per-feature row orders.
///
/// `order[f][lo..hi]` holds the rows of the current node sorted by feature
/// `f`; `rows[lo..hi]` holds the same rows in ascending index order. Both are
/// stably partitioned on every split.
struct Grower<'a> {
    cols: &'a [Vec<f64>],
    opts: &'a TrainOptions,
    order: Vec<Vec<u32>>,
    rows: Vec<u32>,
    scratch: Vec<u32>,
    goes_left: Vec<bool>,
    nodes: Vec<Node>,
    leaves: Vec<(usize, usize, f64)>,
}

impl Grower<'_> {
    fn build(&mut self, resid: &[f64], lo: usize, hi: usize, depth: usize) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf { weight: 0.0 });
        let n = hi - lo;
        let lambda = self.opts.l2_leaf_reg();
        let (g, sse) = self.rows[lo..hi].iter().fold((0.0, 0.0), |(g, s), &r| {
            let v = resid[r as usize];
            (g + v, s + v * v)
        });

        let min_leaf = self.opts.min_samples_leaf();
        let best = if depth < self.opts.max_depth() && n >= 2 * min_leaf && sse > 0.0 {
            self.best_split(resid, lo, hi, g)
                .filter(|b| b.gain > 1e-12 * sse)
        } else {
            None
        };

        match best {
            None => {
                let w = g / (n as f64 + lambda);
                self.nodes[idx] = Node::Leaf { weight: w };
                self.leaves.push((lo, hi, w));
            }
            Some(b) => {
                let col = &self.cols[b.feature];
                for &r in &self.rows[lo..hi] {
                    self.goes_left[r as usize] = col[r as usize] < b.threshold;
                }
                let n_left = stable_partition(&mut self.rows[lo..hi], &mut self.scratch, &self.goes_left);
                for f in 0..self.order.len() {
                    stable_partition(&mut self.order[f][lo..hi], &mut self.scratch, &self.goes_left);
                }
                let left = self.build(resid, lo, lo + n_left, depth + 1);
                let right = self.build(resid, lo + n_left, hi, depth + 1);
                self.nodes[idx] = Node::Split {
                    feature: b.feature,
                    threshold: b.threshold,
                    left,
                    right,
                };
            }
        }
        idx
    }

    fn best_split(&self, resid: &[f64], lo: usize, hi: usize, g: f64) -> Option<Best> {
        let n = hi - lo;
        let lambda = self.opts.l2_leaf_reg();
        let min_leaf = self.opts.min_samples_leaf();
        let parent = g * g / (n as f64 + lambda);
        let mut best: Option<Best> = None;
        for (f, order) in self.order.iter().enumerate() {
            let col = &self.cols[f];
            let order = &order[lo..hi];
            let mut gl = 0.0;
            for k in 0..n - 1 {
                let r = order[k] as usize;
                gl += resid[r];
                let v = col[r];
                let next = col[order[k + 1] as usize];
                if v == next {
                    continue;
                }
                let nl = k + 1;
                let nr = n - nl;
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let gr = g - gl;
                let gain = gl * gl / (nl as f64 + lambda) + gr * gr / (nr as f64 + lambda) - parent;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Best {
                        gain,
                        feature: f,
                        threshold: midpoint(v, next),
                    });
                }
            }
        }
        best
    }
}

/// A threshold `t` with `lo < t <= hi`, so `lo` goes left and `hi` right.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

fn stable_partition(slice: &mut [u32], scratch: &mut Vec<u32>, goes_left: &[bool]) -> usize {
    scratch.clear();
    let mut w = 0;
    for i in 0..slice.len() {
        let r = slice[i];
        if goes_left[r as usize] {
            slice[w] = r;
            w += 1;
        } else {
            scratch.push(r);
        }
    }
    slice[w..].copy_from_slice(scratch);
    w
}

fn cmp_rows(x: &FeatureMatrix, y: &[f64], a: usize, b: usize) -> Ordering {
    x.row(a)
        .iter()
        .zip(x.row(b))
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then_with(|| y[a].total_cmp(&y[b]))
}

pub(super) fn boost(x: &FeatureMatrix, y: &[f64], opts: &TrainOptions) -> BoostedEnsemble {
    let n = x.n_rows();
    // Canonical row order makes the fit independent of input order,
    // including floating-point summation order.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| cmp_rows(x, y, a, b));
    let cols: Vec<Vec<f64>> = (0..x.n_cols())
        .map(|j| perm.iter().map(|&i| x.get(i, j)).collect())
        .collect();
    let labels: Vec<f64> = perm.iter().map(|&i| y[i]).collect();

    let base = labels.iter().sum::<f64>() / n as f64;
    let mut resid: Vec<f64> = labels.iter().map(|v| v - base).collect();

    let presorted: Vec<Vec<u32>> = cols
        .iter()
        .map(|col| {
            let mut o: Vec<u32> = (0..n as u32).collect();
            o.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
            o
        })
        .collect();

    let lr = opts.learning_rate();
    let mut grower = Grower {
        cols: &cols,
        opts,
        order: presorted.clone(),
        rows: (0..n as u32).collect(),
        scratch: Vec::with_capacity(n),
        goes_left: vec![false; n],
        nodes: Vec::new(),
        leaves: Vec::new(),
    };
    let mut trees = Vec::with_capacity(opts.n_trees());
    for _ in 0..opts.n_trees() {
        for (dst, src) in grower.order.iter_mut().zip(&presorted) {
            dst.copy_from_slice(src);
        }
        for (i, r) in grower.rows.iter_mut().enumerate() {
            *r = i as u32;
        }
        grower.nodes.clear();
        grower.leaves.clear();
        grower.build(&resid, 0, n, 0);
        for &(lo, hi, w) in &grower.leaves {
            for &r in &grower.rows[lo..hi] {
                resid[r as usize] -= lr * w;
            }
        }
        trees.push(Tree {
            nodes: std::mem::take(&mut grower.nodes),
        });
    }

    BoostedEnsemble {
        base_score: base,
        learning_rate: lr,
        trees,
        feature_names: x.names().to_vec(),
    }
}
