//! Visibility graphs of the rectangle families along a merge sequence.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::merge::{require_standard_labels, MergeStep};
use crate::perm::Permutation;

/// Rank-space bounding box, `[x range, y range]`.
pub type RankBox = [(usize, usize); 2];

fn overlaps(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Two boxes view each other along some axis.
pub fn boxes_view(a: &RankBox, b: &RankBox) -> bool {
    overlaps(a[0], b[0]) || overlaps(a[1], b[1])
}

/// The visibility graph of the live rectangles, updated merge by merge. Vertices are
/// rectangle indices; two are adjacent when their projections intersect on some axis.
#[derive(Debug, Clone)]
pub struct VisibilityGraph {
    adjacency: Vec<Vec<usize>>,
    alive: Vec<bool>,
    boxes: Vec<RankBox>,
    // Per axis, every live rectangle endpoint (rank) with its owner.
    endpoints: [BTreeMap<usize, usize>; 2],
}

impl VisibilityGraph {
    /// The edgeless graph on the points of `pi`. Labels must be `1..=n`.
    pub fn new(pi: &Permutation) -> Result<Self> {
        require_standard_labels(pi)?;
        let n = pi.len();
        let (xr, yr) = pi.ranks();
        let mut boxes = Vec::with_capacity(2 * n);
        boxes.push([(0, 0); 2]);
        let mut endpoints = [BTreeMap::new(), BTreeMap::new()];
        for i in 0..n {
            boxes.push([(xr[i], xr[i]), (yr[i], yr[i])]);
            endpoints[0].insert(xr[i], i + 1);
            endpoints[1].insert(yr[i], i + 1);
        }
        let mut alive = vec![true; n + 1];
        alive[0] = false;
        Ok(VisibilityGraph {
            adjacency: vec![Vec::new(); n + 1],
            alive,
            boxes,
            endpoints,
        })
    }

    /// Replaces `step.i` and `step.j` by their bounding box `step.k`. The new vertex's
    /// neighbours are those of the merged pair plus the owners of endpoints inside its
    /// projections; a rectangle straddling a projection already viewed one of the pair.
    pub fn apply(&mut self, step: MergeStep) {
        let MergeStep { i: a, j: b, k } = step;
        debug_assert!(self.alive[a] && self.alive[b] && k == self.boxes.len());
        let (ba, bb) = (self.boxes[a], self.boxes[b]);
        let merged = [
            (ba[0].0.min(bb[0].0), ba[0].1.max(bb[0].1)),
            (ba[1].0.min(bb[1].0), ba[1].1.max(bb[1].1)),
        ];
        let mut nbrs: BTreeSet<usize> = self.adjacency[a].iter().chain(&self.adjacency[b]).copied().collect();
        for (axis, map) in self.endpoints.iter().enumerate() {
            nbrs.extend(map.range(merged[axis].0..=merged[axis].1).map(|(_, &o)| o));
        }
        nbrs.remove(&a);
        nbrs.remove(&b);
        for &u in &nbrs {
            let list = &mut self.adjacency[u];
            list.retain(|&w| w != a && w != b);
            list.push(k);
        }
        for (axis, map) in self.endpoints.iter_mut().enumerate() {
            for old in [ba[axis], bb[axis]] {
                map.remove(&old.0);
                map.remove(&old.1);
            }
            map.insert(merged[axis].0, k);
            map.insert(merged[axis].1, k);
        }
        self.adjacency[a] = Vec::new();
        self.adjacency[b] = Vec::new();
        self.alive[a] = false;
        self.alive[b] = false;
        self.adjacency.push(nbrs.into_iter().collect());
        self.alive.push(true);
        self.boxes.push(merged);
    }

    /// Sorted neighbours of a live vertex.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_live(&self, v: usize) -> bool {
        self.alive.get(v).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(|&v| self.alive[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Rank-space box of any rectangle index created so far.
    pub fn bounds(&self, v: usize) -> RankBox {
        self.boxes[v]
    }

    pub fn boxes(&self) -> &[RankBox] {
        &self.boxes
    }
}

/// All vertex sets containing `v` with at most `max_size` elements that induce a connected
/// subgraph, ordered by size and then lexicographically. Sets are grown one neighbour at a
/// time, which reaches every connected set because each has a spanning tree.
pub fn connected_sets(g: &VisibilityGraph, v: usize, max_size: usize) -> Vec<Vec<usize>> {
    if max_size == 0 {
        return Vec::new();
    }
    let mut out = vec![vec![v]];
    let mut level: BTreeSet<Vec<usize>> = BTreeSet::from([vec![v]]);
    for _ in 1..max_size {
        let mut next = BTreeSet::new();
        for set in &level {
            for &m in set {
                for &u in g.neighbors(m) {
                    if let Err(pos) = set.binary_search(&u) {
                        let mut grown = set.clone();
                        grown.insert(pos, u);
                        next.insert(grown);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}
