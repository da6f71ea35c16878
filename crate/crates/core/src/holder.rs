//! Maximum Hölder quotient `|f(p) - f(q)| / |p - q|^alpha` over a finite
//! point set, by branch and bound over a pair of kd-trees.
//!
//! Node pairs are visited in decreasing order of an upper bound on the
//! quotient; the search stops once no pending pair can beat the best value.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport {
    pub max_ratio: f64,
    /// Indices into the input slices of a maximizing pair.
    pub argmax: Option<(usize, usize)>,
    pub leaf_pairs: u64,
}

#[derive(Clone, Debug)]
struct Node {
    start: usize,
    end: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    vmin: f64,
    vmax: f64,
    children: Option<(usize, usize)>,
}

struct Tree {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl Tree {
    fn build(points: &[(f64, f64)], values: &[f64]) -> Tree {
        let mut tree = Tree { nodes: Vec::new(), order: (0..points.len()).collect() };
        if !points.is_empty() {
            tree.split(points, values, 0, points.len());
        }
        tree
    }

    fn split(&mut self, points: &[(f64, f64)], values: &[f64], start: usize, end: usize) -> usize {
        let idx = &self.order[start..end];
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut vmin = f64::INFINITY;
        let mut vmax = f64::NEG_INFINITY;
        for &i in idx {
            let p = [points[i].0, points[i].1];
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
            vmin = vmin.min(values[i]);
            vmax = vmax.max(values[i]);
        }
        let id = self.nodes.len();
        self.nodes.push(Node { start, end, lo, hi, vmin, vmax, children: None });
        if end - start > LEAF_SIZE {
            let axis = if hi[0] - lo[0] >= hi[1] - lo[1] { 0 } else { 1 };
            let key = |i: &usize| if axis == 0 { points[*i].0 } else { points[*i].1 };
            let mid = (start + end) / 2;
            self.order[start..end]
                .select_nth_unstable_by(mid - start, |a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
            let l = self.split(points, values, start, mid);
            let r = self.split(points, values, mid, end);
            self.nodes[id].children = Some((l, r));
        }
        id
    }
}

fn min_dist(a: &Node, b: &Node) -> f64 {
    let mut s = 0.0;
    for k in 0..2 {
        let gap = (b.lo[k] - a.hi[k]).max(a.lo[k] - b.hi[k]).max(0.0);
        s += gap * gap;
    }
    s.sqrt()
}

fn bound(a: &Node, b: &Node, alpha: f64) -> f64 {
    let spread = (a.vmax - b.vmin).max(b.vmax - a.vmin).max(0.0);
    if spread == 0.0 {
        return 0.0;
    }
    let d = min_dist(a, b);
    if d == 0.0 {
        f64::INFINITY
    } else {
        spread / d.powf(alpha)
    }
}

#[derive(PartialEq)]
struct Pending(f64, usize, usize);

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| other.1.cmp(&self.1))
            .then_with(|| other.2.cmp(&self.2))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn pair_ratio(points: &[(f64, f64)], values: &[f64], i: usize, j: usize, alpha: f64) -> f64 {
    let dv = (values[i] - values[j]).abs();
    if dv == 0.0 {
        return 0.0;
    }
    let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
    let d = (dx * dx + dy * dy).sqrt();
    if d == 0.0 {
        f64::INFINITY
    } else {
        dv / d.powf(alpha)
    }
}

/// Exact maximum quotient over all pairs (up to floating evaluation of each
/// quotient). `stop_above` ends the search early once a pair exceeds it.
pub fn max_holder_ratio_with_cutoff(
    points: &[(f64, f64)],
    values: &[f64],
    alpha: f64,
    stop_above: f64,
) -> HolderReport {
    assert_eq!(points.len(), values.len());
    let mut report = HolderReport { max_ratio: 0.0, argmax: None, leaf_pairs: 0 };
    if points.len() < 2 {
        return report;
    }
    let tree = Tree::build(points, values);
    let mut heap = BinaryHeap::new();
    heap.push(Pending(f64::INFINITY, 0, 0));
    while let Some(Pending(b, x, y)) = heap.pop() {
        if b <= report.max_ratio || report.max_ratio > stop_above {
            break;
        }
        let (nx, ny) = (&tree.nodes[x], &tree.nodes[y]);
        match (nx.children, ny.children) {
            (None, None) => {
                report.leaf_pairs += 1;
                for (pi, &i) in tree.order[nx.start..nx.end].iter().enumerate() {
                    let inner = if x == y { &tree.order[nx.start + pi + 1..nx.end] } else { &tree.order[ny.start..ny.end] };
                    for &j in inner {
                        let r = pair_ratio(points, values, i, j, alpha);
                        if r > report.max_ratio {
                            report.max_ratio = r;
                            report.argmax = Some((i.min(j), i.max(j)));
                        }
                    }
                }
            }
            _ => {
                let mut push = |a: usize, c: usize| {
                    let bb = bound(&tree.nodes[a], &tree.nodes[c], alpha);
                    if bb > report.max_ratio {
                        heap.push(Pending(bb, a.min(c), a.max(c)));
                    }
                };
                if x == y {
                    let (l, r) = nx.children.unwrap();
                    push(l, l);
                    push(l, r);
                    push(r, r);
                } else {
                    let split_x = match (nx.children, ny.children) {
                        (Some(_), None) => true,
                        (None, Some(_)) => false,
                        _ => (nx.end - nx.start) >= (ny.end - ny.start),
                    };
                    if split_x {
                        let (l, r) = nx.children.unwrap();
                        push(l, y);
                        push(r, y);
                    } else {
                        let (l, r) = ny.children.unwrap();
                        push(x, l);
                        push(x, r);
                    }
                }
            }
        }
    }
    report
}

pub fn max_holder_ratio(points: &[(f64, f64)], values: &[f64], alpha: f64) -> HolderReport {
    max_holder_ratio_with_cutoff(points, values, alpha, f64::INFINITY)
}

/// Brute-force maximum over all pairs; the reference for tests.
pub fn max_holder_ratio_naive(points: &[(f64, f64)], values: &[f64], alpha: f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(pair_ratio(points, values, i, j, alpha));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let n = 2 + trial * 7;
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let vals: Vec<f64> = pts.iter().map(|p| (p.0 * 3.0).sin() + rng.gen::<f64>() * 0.1).collect();
            for alpha in [0.3, 0.5, 1.0] {
                let fast = max_holder_ratio(&pts, &vals, alpha);
                let slow = max_holder_ratio_naive(&pts, &vals, alpha);
                assert_eq!(fast.max_ratio, slow, "trial {trial} alpha {alpha}");
            }
        }
    }

    #[test]
    fn affine_function_has_its_slope() {
        let pts: Vec<(f64, f64)> = (0..200).map(|i| ((i % 20) as f64 / 19.0, (i / 20) as f64 / 9.0)).collect();
        let vals: Vec<f64> = pts.iter().map(|p| 2.0 * p.0).collect();
        let r = max_holder_ratio(&pts, &vals, 1.0);
        assert!((r.max_ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(max_holder_ratio(&[], &[], 0.5).max_ratio, 0.0);
        assert_eq!(max_holder_ratio(&[(0.0, 0.0)], &[1.0], 0.5).max_ratio, 0.0);
        let dup = max_holder_ratio(&[(0.0, 0.0), (0.0, 0.0)], &[1.0, 2.0], 0.5);
        assert!(dup.max_ratio.is_infinite());
    }
}
