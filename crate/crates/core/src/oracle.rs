//! Brute-force reference implementations used as ground truth for the fast algorithms.

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::geometry::{Point, Rectangle};
use crate::grid::{slab_of, GridWitness};
use crate::merge::{require_standard_labels, MergeSequence, MergeStep};
use crate::perm::{parse_permutation, Label, Permutation};

/// Largest permutation accepted by [`exact_width`] ((2n-3)!! merge trees).
pub const EXACT_WIDTH_CAP: usize = 9;
/// Largest permutation accepted by [`check_tree_characterization`] (2^n subsets).
pub const TREE_CHARACTERIZATION_CAP: usize = 12;
/// Largest point set accepted by [`brute_force_grid`] (C(n-1, r-1)² cut placements); covers
/// every subset of a 5 × 5 matrix.
pub const BRUTE_FORCE_GRID_CAP: usize = 25;

/// Lexicographically least embedding of `sigma` into `pi` (images compared by x-coordinate,
/// pattern elements taken in label order), by backtracking with order-consistency pruning.
pub fn brute_force_match(sigma: &Permutation, pi: &Permutation) -> Option<Embedding> {
    let targets = pi.by_x();
    let pattern: Vec<(Label, Point)> = sigma.iter().collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(pattern.len());
    if !extend_match(&pattern, &targets, &mut chosen) {
        return None;
    }
    let pairs = pattern
        .iter()
        .zip(&chosen)
        .map(|(&(s, _), &t)| (s, targets[t].0))
        .collect();
    Some(Embedding::new(pairs).expect("pattern labels are distinct"))
}

fn extend_match(pattern: &[(Label, Point)], targets: &[(Label, Point)], chosen: &mut Vec<usize>) -> bool {
    let depth = chosen.len();
    if depth == pattern.len() {
        return true;
    }
    let sp = pattern[depth].1;
    // Open bounds on the image coordinates implied by the elements placed so far.
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (0usize, usize::MAX, 0usize, usize::MAX);
    for (a, &t) in chosen.iter().enumerate() {
        let (ap, tp) = (pattern[a].1, targets[t].1);
        if ap.x < sp.x {
            xlo = xlo.max(tp.x);
        } else {
            xhi = xhi.min(tp.x);
        }
        if ap.y < sp.y {
            ylo = ylo.max(tp.y);
        } else {
            yhi = yhi.min(tp.y);
        }
    }
    let start = targets.partition_point(|&(_, p)| p.x <= xlo);
    for t in start..targets.len() {
        let tp = targets[t].1;
        if tp.x >= xhi {
            break;
        }
        if tp.y <= ylo || tp.y >= yhi {
            continue;
        }
        chosen.push(t);
        if extend_match(pattern, targets, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A binary merge tree over leaves `1..=n`; internal node `u` (numbered `n+1..`) has
/// children `children[u - n - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTree {
    n: usize,
    children: Vec<(usize, usize)>,
    root: usize,
}

impl MergeTree {
    pub fn leaves(&self) -> usize {
        self.n
    }

    /// The bottom-up sequence that numbers internal nodes in post-order.
    pub fn postorder_sequence(&self) -> MergeSequence {
        let mut seq = MergeSequence::default();
        if self.n <= 1 {
            return seq;
        }
        let root = self.root;
        let mut renumber = vec![0usize; self.n + self.children.len() + 1];
        (1..=self.n).for_each(|l| renumber[l] = l);
        let mut next = self.n;
        let mut stack = vec![(root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if u <= self.n {
                continue;
            }
            let (a, b) = self.children[u - self.n - 1];
            if expanded {
                next += 1;
                renumber[u] = next;
                seq.push(MergeStep::new(renumber[a], renumber[b], next));
            } else {
                stack.push((u, true));
                stack.push((b, false));
                stack.push((a, false));
            }
        }
        seq
    }

    /// Every merge sequence whose merge tree is this tree (all bottom-up numberings).
    pub fn sequences(&self) -> Vec<MergeSequence> {
        let m = self.children.len();
        let mut out = Vec::new();
        let mut assigned = vec![0usize; self.n + m + 1];
        (1..=self.n).for_each(|l| assigned[l] = l);
        let mut steps = Vec::with_capacity(m);
        self.extensions(&mut assigned, &mut steps, &mut out);
        out
    }

    fn extensions(&self, assigned: &mut [usize], steps: &mut Vec<MergeStep>, out: &mut Vec<MergeSequence>) {
        if steps.len() == self.children.len() {
            out.push(MergeSequence::new(steps.clone()));
            return;
        }
        for (idx, &(a, b)) in self.children.iter().enumerate() {
            let u = self.n + idx + 1;
            if assigned[u] != 0 || assigned[a] == 0 || assigned[b] == 0 {
                continue;
            }
            let k = self.n + steps.len() + 1;
            assigned[u] = k;
            steps.push(MergeStep::new(assigned[a], assigned[b], k));
            self.extensions(assigned, steps, out);
            steps.pop();
            assigned[u] = 0;
        }
    }
}

/// Mutable tree used while enumerating shapes by leaf insertion.
struct ShapeBuilder {
    // Nodes 0..n are leaves 1..=n; internal nodes are appended after them.
    children: Vec<[usize; 2]>,
    parent: Vec<usize>,
    root: usize,
    n: usize,
}

const NONE: usize = usize::MAX;

impl ShapeBuilder {
    fn new(n: usize) -> Self {
        ShapeBuilder {
            children: vec![[NONE; 2]; 2 * n],
            parent: vec![NONE; 2 * n],
            root: 0,
            n,
        }
    }

    /// Inserts leaf `leaf` on the edge above node `v` using internal node `u`.
    fn insert(&mut self, leaf: usize, v: usize, u: usize) {
        let p = self.parent[v];
        self.children[u] = [v, leaf];
        self.parent[u] = p;
        self.parent[v] = u;
        self.parent[leaf] = u;
        if p == NONE {
            self.root = u;
        } else {
            let slot = if self.children[p][0] == v { 0 } else { 1 };
            self.children[p][slot] = u;
        }
    }

    fn remove(&mut self, leaf: usize, v: usize, u: usize) {
        let p = self.parent[u];
        self.parent[v] = p;
        self.parent[leaf] = NONE;
        self.parent[u] = NONE;
        self.children[u] = [NONE; 2];
        if p == NONE {
            self.root = v;
        } else {
            let slot = if self.children[p][0] == u { 0 } else { 1 };
            self.children[p][slot] = v;
        }
    }

    fn to_tree(&self) -> MergeTree {
        // Builder node v becomes tree node v + 1: leaves 1..=n, internal nodes after them.
        let n = self.n;
        let children = (n..2 * n - 1)
            .map(|u| (self.children[u][0] + 1, self.children[u][1] + 1))
            .collect();
        MergeTree {
            n,
            children,
            root: self.root + 1,
        }
    }

    /// Internal nodes in post-order.
    fn postorder(&self, out: &mut Vec<usize>) {
        out.clear();
        let mut stack = vec![(self.root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if u < self.n {
                continue;
            }
            if expanded {
                out.push(u);
            } else {
                stack.push((u, true));
                stack.push((self.children[u][1], false));
                stack.push((self.children[u][0], false));
            }
        }
    }
}

/// Calls `visit` once for every unordered binary merge tree with leaves `1..=n`
/// ((2n-3)!! trees for n ≥ 2).
pub fn for_each_tree_shape(n: usize, mut visit: impl FnMut(&MergeTree)) {
    if n == 0 {
        return;
    }
    for_each_shape_until(n, &mut |b: &ShapeBuilder| {
        visit(&b.to_tree());
        true
    });
}

/// Enumerates tree shapes with a callback that may stop the enumeration by returning `false`.
fn for_each_shape_until(n: usize, visit: &mut dyn FnMut(&ShapeBuilder) -> bool) {
    let mut b = ShapeBuilder::new(n);
    let mut stop = false;
    shapes_until_rec(&mut b, 1, visit, &mut stop);
}

fn shapes_until_rec(
    b: &mut ShapeBuilder,
    placed: usize,
    visit: &mut dyn FnMut(&ShapeBuilder) -> bool,
    stop: &mut bool,
) {
    if *stop {
        return;
    }
    if placed == b.n {
        if !visit(b) {
            *stop = true;
        }
        return;
    }
    let leaf = placed;
    let u = b.n + placed - 1;
    let existing: Vec<usize> = (0..placed).chain(b.n..b.n + placed - 1).collect();
    for v in existing {
        b.insert(leaf, v, u);
        shapes_until_rec(b, placed + 1, visit, stop);
        b.remove(leaf, v, u);
        if *stop {
            return;
        }
    }
}

/// Exact width `w(π)`: the minimum over all merge trees of one plus the largest view count of a
/// newly created rectangle. Permutations of length at most 1 have width 1.
pub fn exact_width(pi: &Permutation) -> Result<usize> {
    exact_width_capped(pi, EXACT_WIDTH_CAP).map(|(w, _)| w)
}

/// [`exact_width`] with an explicit size cap, also returning a sequence (over the reduced
/// permutation) that attains the width.
pub fn exact_width_capped(pi: &Permutation, cap: usize) -> Result<(usize, MergeSequence)> {
    let n = pi.len();
    if n > cap {
        return Err(Error::SizeCap {
            what: "exact width input",
            size: n,
            cap,
        });
    }
    if n <= 1 {
        return Ok((1, MergeSequence::default()));
    }
    let (reduced, _) = pi.standardize();
    let mut boxes = vec![Rectangle::from_point(Point::new(0, 0)); 2 * n];
    for (l, p) in reduced.iter() {
        boxes[l - 1] = Rectangle::from_point(p);
    }
    let mut best = usize::MAX;
    let mut best_tree: Option<MergeTree> = None;
    let mut order = Vec::with_capacity(n);
    let mut live = vec![false; 2 * n];
    for_each_shape_until(n, &mut |b: &ShapeBuilder| {
        b.postorder(&mut order);
        live.iter_mut().enumerate().for_each(|(i, v)| *v = i < n);
        let mut width = 1;
        for &u in &order {
            let [a, c] = b.children[u];
            boxes[u] = boxes[a].bounding_box(&boxes[c]);
            live[a] = false;
            live[c] = false;
            let (mut vx, mut vy) = (0, 0);
            for (o, &alive) in live.iter().enumerate() {
                if alive {
                    vx += usize::from(boxes[o].ix.intersects(&boxes[u].ix));
                    vy += usize::from(boxes[o].iy.intersects(&boxes[u].iy));
                }
            }
            live[u] = true;
            width = width.max(vx.max(vy) + 1);
            if width >= best {
                return true;
            }
        }
        best = width;
        best_tree = Some(b.to_tree());
        // Width is never below 1.
        best > 1
    });
    let tree = best_tree.ok_or_else(|| Error::Internal("no merge tree evaluated".to_string()))?;
    Ok((best, tree.postorder_sequence()))
}

/// First pair (in label order) with fewer than `d` other points strictly between them along
/// each axis.
pub fn find_close_pair(pi: &Permutation, d: usize) -> Option<(Label, Label)> {
    let (xr, yr) = pi.ranks();
    let labels = pi.labels();
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            let between_x = xr[a].abs_diff(xr[b]) - 1;
            let between_y = yr[a].abs_diff(yr[b]) - 1;
            if between_x < d && between_y < d {
                return Some((labels[a], labels[b]));
            }
        }
    }
    None
}

/// Checks the subset characterization of d-wide decompositions: for every `X ⊆ S(π)` with
/// `|X| ≥ 2`, the two leaves of the minimum-index internal node of the merge tree restricted
/// to `X` form a d-close pair of `π|X`.
pub fn check_tree_characterization(pi: &Permutation, seq: &MergeSequence, d: usize) -> Result<bool> {
    let n = pi.len();
    if n > TREE_CHARACTERIZATION_CAP {
        return Err(Error::SizeCap {
            what: "tree characterization input",
            size: n,
            cap: TREE_CHARACTERIZATION_CAP,
        });
    }
    require_standard_labels(pi)?;
    seq.validate(n)?;
    let mut mask = vec![0u32; 2 * n + 1];
    for (l, m) in mask.iter_mut().enumerate().take(n + 1).skip(1) {
        *m = 1 << (l - 1);
    }
    let mut kids = Vec::with_capacity(seq.len());
    for st in seq.steps() {
        mask[st.k] = mask[st.i] | mask[st.j];
        kids.push((mask[st.i], mask[st.j]));
    }
    let (xr, yr) = pi.ranks();
    let mut between_x = vec![0u32; n * n];
    let mut between_y = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let strictly = |r: &[usize]| r[a].min(r[b]) < r[c] && r[c] < r[a].max(r[b]);
                if strictly(&xr) {
                    between_x[a * n + b] |= 1 << c;
                }
                if strictly(&yr) {
                    between_y[a * n + b] |= 1 << c;
                }
            }
        }
    }
    for subset in 1u32..(1u32 << n) {
        if subset.count_ones() < 2 {
            continue;
        }
        let (left, right) = kids
            .iter()
            .map(|&(l, r)| (l & subset, r & subset))
            .find(|&(l, r)| l != 0 && r != 0)
            .ok_or_else(|| Error::Internal("restricted tree has no internal node".to_string()))?;
        if left.count_ones() != 1 || right.count_ones() != 1 {
            return Err(Error::Internal(
                "minimum internal node of a restricted tree has a non-leaf child".to_string(),
            ));
        }
        let (a, b) = (left.trailing_zeros() as usize, right.trailing_zeros() as usize);
        let bx = (between_x[a * n + b] & subset).count_ones() as usize;
        let by = (between_y[a * n + b] & subset).count_ones() as usize;
        if bx >= d || by >= d {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First `r × r` grid witness in lexicographic cut order, searching all cut placements.
pub fn brute_force_grid(pi: &Permutation, r: usize) -> Result<Option<GridWitness>> {
    brute_force_grid_points(pi.points(), r)
}

/// [`brute_force_grid`] over an arbitrary point set (coordinates may repeat).
pub fn brute_force_grid_points(points: &[Point], r: usize) -> Result<Option<GridWitness>> {
    if r == 0 {
        return Err(Error::Domain("grid size must be positive".to_string()));
    }
    if points.len() > BRUTE_FORCE_GRID_CAP {
        return Err(Error::SizeCap {
            what: "grid search input",
            size: points.len(),
            cap: BRUTE_FORCE_GRID_CAP,
        });
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let candidates = |coord: fn(&Point) -> usize| {
        let mut v: Vec<usize> = sorted.iter().map(coord).collect();
        v.sort_unstable();
        v.dedup();
        v.pop();
        v
    };
    let xc = candidates(|p| p.x);
    let yc = candidates(|p| p.y);
    if sorted.is_empty() || xc.len() + 1 < r || yc.len() + 1 < r {
        return Ok(None);
    }
    let col_choices = combinations(&xc, r - 1);
    let row_choices = combinations(&yc, r - 1);
    for cols in &col_choices {
        let col_of: Vec<usize> = sorted.iter().map(|p| slab_of(cols, p.x)).collect();
        for rows in &row_choices {
            let mut cells: Vec<Option<Point>> = vec![None; r * r];
            for (p, &c) in sorted.iter().zip(&col_of) {
                let cell = &mut cells[(slab_of(rows, p.y) - 1) * r + (c - 1)];
                if cell.is_none() {
                    *cell = Some(*p);
                }
            }
            if cells.iter().all(Option::is_some) {
                return Ok(Some(GridWitness {
                    col_cuts: cols.clone(),
                    row_cuts: rows.clone(),
                    witnesses: cells.into_iter().flatten().collect(),
                }));
            }
        }
    }
    Ok(None)
}

/// All `k`-element subsequences of `items`, in lexicographic order.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, i + 1, k, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, k, &mut cur, &mut out);
    out
}

/// Separable permutations are those avoiding both 2413 and 3142.
pub fn is_separable(pi: &Permutation) -> bool {
    ["2 4 1 3", "3 1 4 2"].iter().all(|p| {
        let pattern = parse_permutation(p).expect("fixed pattern");
        brute_force_match(&pattern, pi).is_none()
    })
}
