//! Exact K-nearest-neighbour search in a metric space.
//!
//! Candidates are totally ordered by `(distance, priority, index)` where the
//! priority is a seeded hash of `(seed, center, candidate)`. Equidistant
//! candidates are therefore ranked in a uniformly random but reproducible
//! order, and removing one candidate never reorders the others. The
//! vantage-point tree and the brute-force scan share this order, so their
//! answers agree element by element.

use crate::error::{Error, Result};
use crate::kernels::Metric;
use crate::rng::{rng_from_seed, stream_seed};
use crate::sample::{PointRef, Points};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tie-break priority of `candidate` when ranking neighbours of `center`.
#[inline]
pub fn tie_priority(seed: u64, center: usize, candidate: usize) -> u64 {
    stream_seed(stream_seed(seed, center as u64), candidate as u64)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    dist: f64,
    priority: u64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.priority.cmp(&other.priority))
            .then(self.index.cmp(&other.index))
    }
}

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    radius: f64,
    inside: Option<usize>,
    outside: Option<usize>,
}

/// Vantage-point tree over a borrowed point set.
///
/// Each node holds one point; its `inside` subtree contains points within
/// `radius` of it and its `outside` subtree points at distance `≥ radius`.
#[derive(Debug, Clone)]
pub struct VpTree<'a> {
    points: &'a Points,
    metric: Metric,
    nodes: Vec<Node>,
    root: usize,
}

/// Builds a vantage-point tree. Vantage points are drawn with a generator
/// seeded from `seed`, so construction is deterministic.
pub fn build_vp_tree(points: &Points, metric: Metric, seed: u64) -> Result<VpTree<'_>> {
    metric.check_points(points)?;
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut builder = Builder {
        points,
        metric,
        nodes: Vec::with_capacity(n),
        rng: rng_from_seed(seed),
        scratch: Vec::with_capacity(n),
    };
    let mut idx: Vec<usize> = (0..n).collect();
    let root = builder.build(&mut idx).expect("non-empty");
    Ok(VpTree {
        points,
        metric,
        nodes: builder.nodes,
        root,
    })
}

struct Builder<'a> {
    points: &'a Points,
    metric: Metric,
    nodes: Vec<Node>,
    rng: crate::rng::Rng,
    scratch: Vec<(f64, usize)>,
}

impl Builder<'_> {
    fn build(&mut self, idx: &mut [usize]) -> Option<usize> {
        if idx.is_empty() {
            return None;
        }
        let pick = self.rng.random_range(0..idx.len());
        idx.swap(0, pick);
        let vp = idx[0];
        let node_id = self.nodes.len();
        self.nodes.push(Node {
            point: vp,
            radius: 0.0,
            inside: None,
            outside: None,
        });
        let rest = &mut idx[1..];
        if rest.is_empty() {
            return Some(node_id);
        }
        let vpp = self.points.get(vp);
        self.scratch.clear();
        for &i in rest.iter() {
            let d = self.metric.distance(vpp, self.points.get(i));
            self.scratch.push((d, i));
        }
        let mid = rest.len() / 2;
        self.scratch
            .select_nth_unstable_by(mid, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let radius = self.scratch[mid].0;
        for (slot, &(_, i)) in rest.iter_mut().zip(self.scratch.iter()) {
            *slot = i;
        }
        let (inside, outside) = rest.split_at_mut(mid + 1);
        let inside = self.build(inside);
        let outside = self.build(outside);
        let node = &mut self.nodes[node_id];
        node.radius = radius;
        node.inside = inside;
        node.outside = outside;
        Some(node_id)
    }
}

impl<'a> VpTree<'a> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points(&self) -> &'a Points {
        self.points
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// Point index stored at every node, in node order.
    pub fn node_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().map(|n| n.point)
    }

    /// The `k` nearest neighbours of point `center` among all points other
    /// than `center` and those in `exclude`, sorted by `(distance, priority)`.
    pub fn k_nearest_excluding(
        &self,
        center: usize,
        exclude: &[usize],
        k: usize,
        tie_seed: u64,
    ) -> Result<Vec<usize>> {
        let n = self.points.len();
        if center >= n {
            return Err(Error::InvalidParameter(format!(
                "center {center} out of range for {n} points"
            )));
        }
        let available = available_candidates(n, center, exclude);
        if available < k {
            return Err(Error::InsufficientPoints {
                needed: k,
                available,
            });
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        let query = Query {
            point: self.points.get(center),
            center,
            exclude,
            k,
            seed: tie_seed,
        };
        self.search(self.root, &query, &mut heap);
        Ok(heap.into_sorted_vec().into_iter().map(|c| c.index).collect())
    }

    fn search(&self, node_id: usize, q: &Query<'_, '_>, heap: &mut BinaryHeap<Candidate>) {
        let node = &self.nodes[node_id];
        let d = self.metric.distance(q.point, self.points.get(node.point));
        if node.point != q.center && !q.exclude.contains(&node.point) {
            heap.push(Candidate {
                dist: d,
                priority: tie_priority(q.seed, q.center, node.point),
                index: node.point,
            });
            if heap.len() > q.k {
                heap.pop();
            }
        }
        let children = if d <= node.radius {
            [(node.inside, d - node.radius), (node.outside, node.radius - d)]
        } else {
            [(node.outside, node.radius - d), (node.inside, d - node.radius)]
        };
        for (child, lower_bound) in children {
            let Some(child) = child else { continue };
            let tau = if heap.len() < q.k {
                f64::INFINITY
            } else {
                heap.peek().map_or(f64::INFINITY, |c| c.dist)
            };
            // Equal distances must still be visited: a farther subtree may
            // hold a tied point with a smaller priority.
            if lower_bound > tau + 1e-12 * (1.0 + tau) {
                continue;
            }
            self.search(child, q, heap);
        }
    }
}

struct Query<'p, 'e> {
    point: PointRef<'p>,
    center: usize,
    exclude: &'e [usize],
    k: usize,
    seed: u64,
}

fn available_candidates(n: usize, center: usize, exclude: &[usize]) -> usize {
    let mut excluded: Vec<usize> = exclude.iter().copied().filter(|&e| e < n && e != center).collect();
    excluded.sort_unstable();
    excluded.dedup();
    n - 1 - excluded.len()
}

/// `k` nearest neighbours by a full distance sort. Same contract as
/// [`VpTree::k_nearest_excluding`].
pub fn brute_force_k_nearest(
    points: &Points,
    metric: Metric,
    center: usize,
    exclude: &[usize],
    k: usize,
    tie_seed: u64,
) -> Result<Vec<usize>> {
    metric.check_points(points)?;
    let n = points.len();
    let available = available_candidates(n, center, exclude);
    if available < k {
        return Err(Error::InsufficientPoints {
            needed: k,
            available,
        });
    }
    let q = points.get(center);
    let mut all: Vec<Candidate> = (0..n)
        .filter(|&l| l != center && !exclude.contains(&l))
        .map(|l| Candidate {
            dist: metric.distance(q, points.get(l)),
            priority: tie_priority(tie_seed, center, l),
            index: l,
        })
        .collect();
    all.sort_unstable();
    Ok(all.into_iter().take(k).map(|c| c.index).collect())
}

/// For every center `j`, its `k` nearest neighbours among `{X_l : l ≠ j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourTable {
    pub k: usize,
    pub tie_seed: u64,
    lists: Vec<Vec<usize>>,
}

impl NeighbourTable {
    pub fn build(tree: &VpTree<'_>, k: usize, tie_seed: u64) -> Result<Self> {
        let n = tree.points().len();
        let lists = (0..n)
            .into_par_iter()
            .map(|j| tree.k_nearest_excluding(j, &[], k, tie_seed))
            .collect::<Result<Vec<_>>>()?;
        Ok(NeighbourTable { k, tie_seed, lists })
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn neighbours(&self, center: usize) -> &[usize] {
        &self.lists[center]
    }

    /// The first `k` entries of `center`'s list with `skip` removed. When the
    /// table was built with `k + 1` neighbours this is exactly the `k`-NN set
    /// of `center` among points other than `center` and `skip`.
    pub fn neighbours_without(&self, center: usize, skip: usize, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.lists[center].iter().copied().filter(move |&l| l != skip).take(k)
    }
}

/// In-degrees `δ_ℓ = |{j : ℓ ∈ N_j}|`.
pub fn knn_in_degrees(table: &NeighbourTable, n: usize) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    for list in &table.lists {
        for &l in list {
            deg[l] += 1;
        }
    }
    deg
}

/// Summary of the in-degree distribution of a K-NN graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InDegreeDiagnostic {
    pub k: usize,
    pub max_in_degree: usize,
    /// `max δ / K`
    pub ratio: f64,
    /// Set when `max δ > 10 K`.
    pub warn: bool,
}

impl InDegreeDiagnostic {
    pub fn from_degrees(degrees: &[usize], k: usize) -> Self {
        let max_in_degree = degrees.iter().copied().max().unwrap_or(0);
        InDegreeDiagnostic {
            k,
            max_in_degree,
            ratio: max_in_degree as f64 / k.max(1) as f64,
            warn: max_in_degree > 10 * k,
        }
    }
}
