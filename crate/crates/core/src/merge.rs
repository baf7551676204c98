//! Merge steps, merge sequences and their replay.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::geometry::{Point, Rectangle};
use crate::perm::{Label, Permutation};

/// One merge: rectangles `i` and `j` are replaced by their bounding box, indexed `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MergeStep {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl MergeStep {
    pub const fn new(i: usize, j: usize, k: usize) -> Self {
        MergeStep { i, j, k }
    }
}

/// The log of merges of a decomposition. Step `s` (1-based) of a sequence over a
/// length-`n` permutation creates index `n + s`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MergeSequence {
    steps: Vec<MergeStep>,
}

impl MergeSequence {
    pub fn new(steps: Vec<MergeStep>) -> Self {
        MergeSequence { steps }
    }

    pub fn from_triples(triples: &[(usize, usize, usize)]) -> Self {
        MergeSequence {
            steps: triples.iter().map(|&(i, j, k)| MergeStep::new(i, j, k)).collect(),
        }
    }

    pub fn steps(&self) -> &[MergeStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: MergeStep) {
        self.steps.push(step);
    }

    /// Checks that every step merges two distinct live indices over initial labels `1..=n`
    /// and creates index `n + s`. The sequence may stop before a single rectangle remains.
    pub fn validate_prefix(&self, n: usize) -> Result<()> {
        if self.steps.len() + 1 > n.max(1) {
            return Err(Error::InvalidStep {
                step: n.max(1),
                reason: format!("{} steps for {n} initial rectangles", self.steps.len()),
            });
        }
        let mut alive = vec![true; n + self.steps.len() + 1];
        alive[0] = false;
        for (s, st) in self.steps.iter().enumerate() {
            let step = s + 1;
            let bad = |reason: String| Error::InvalidStep { step, reason };
            if st.k != n + step {
                return Err(bad(format!("creates index {} instead of {}", st.k, n + step)));
            }
            if st.i == st.j {
                return Err(bad(format!("merges index {} with itself", st.i)));
            }
            for idx in [st.i, st.j] {
                if idx >= st.k || !alive[idx] {
                    return Err(bad(format!("index {idx} is not a live rectangle")));
                }
            }
            alive[st.i] = false;
            alive[st.j] = false;
        }
        Ok(())
    }

    /// [`MergeSequence::validate_prefix`] plus completeness: exactly `n - 1` steps.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.validate_prefix(n)?;
        if self.steps.len() + 1 != n.max(1) {
            return Err(Error::InvalidStep {
                step: self.steps.len() + 1,
                reason: format!(
                    "sequence ends with {} rectangles left",
                    n - self.steps.len()
                ),
            });
        }
        Ok(())
    }

    /// Parses lines "i j k"; blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(parse_err(line, "expected three indices \"i j k\""));
            }
            let mut v = [0usize; 3];
            for (slot, tok) in v.iter_mut().zip(&toks) {
                *slot = tok.parse().map_err(|_| parse_err(*tok, "not an index"))?;
            }
            steps.push(MergeStep::new(v[0], v[1], v[2]));
        }
        Ok(MergeSequence { steps })
    }
}

impl fmt::Display for MergeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for st in &self.steps {
            writeln!(f, "{} {} {}", st.i, st.j, st.k)?;
        }
        Ok(())
    }
}

/// `L(k)` for every index ever alive: the original labels below each rectangle.
pub fn leaf_sets(seq: &MergeSequence, n: usize) -> Result<BTreeMap<usize, Vec<Label>>> {
    seq.validate_prefix(n)?;
    let mut leaves: BTreeMap<usize, Vec<Label>> = (1..=n).map(|l| (l, vec![l])).collect();
    for st in seq.steps() {
        let mut merged = leaves[&st.i].clone();
        merged.extend_from_slice(&leaves[&st.j]);
        merged.sort_unstable();
        leaves.insert(st.k, merged);
    }
    Ok(leaves)
}

pub(crate) fn require_standard_labels(pi: &Permutation) -> Result<()> {
    if pi.has_standard_labels() {
        Ok(())
    } else {
        Err(Error::Domain(
            "merge sequences require a permutation labelled 1..n".to_string(),
        ))
    }
}

/// Bounding boxes of every index created by replaying `seq` on `pi`, indexed directly
/// (`boxes[idx]`, index 0 unused).
pub fn replay_boxes(pi: &Permutation, seq: &MergeSequence) -> Result<Vec<Rectangle>> {
    require_standard_labels(pi)?;
    seq.validate_prefix(pi.len())?;
    let mut boxes = Vec::with_capacity(pi.len() + seq.len() + 1);
    boxes.push(Rectangle::from_point(Point::new(0, 0)));
    boxes.extend(pi.points().iter().map(|&p| Rectangle::from_point(p)));
    for st in seq.steps() {
        let b = boxes[st.i].bounding_box(&boxes[st.j]);
        boxes.push(b);
    }
    Ok(boxes)
}

/// Fenwick tree over positions `1..=n` counting inserted values.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    fn add(&mut self, pos: usize, delta: i64) {
        let mut i = pos;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `1..=pos`.
    fn prefix(&self, pos: usize) -> i64 {
        let mut i = pos.min(self.tree.len() - 1);
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Counts, for a query interval, how many live intervals intersect it, in `O(log n)`.
#[derive(Debug, Clone)]
struct IntervalCounter {
    by_lo: Fenwick,
    by_hi: Fenwick,
    live: i64,
}

impl IntervalCounter {
    fn new(n: usize) -> Self {
        IntervalCounter {
            by_lo: Fenwick::new(n),
            by_hi: Fenwick::new(n),
            live: 0,
        }
    }

    fn update(&mut self, lo: usize, hi: usize, delta: i64) {
        self.by_lo.add(lo, delta);
        self.by_hi.add(hi, delta);
        self.live += delta;
    }

    fn intersecting(&self, lo: usize, hi: usize) -> usize {
        let ends_before = self.by_hi.prefix(lo - 1);
        let starts_after = self.live - self.by_lo.prefix(hi);
        (self.live - ends_before - starts_after) as usize
    }
}

/// View count of the new rectangle after each step of `seq` (rank space, `O(n log n)` total).
pub fn new_rectangle_views(pi: &Permutation, seq: &MergeSequence) -> Result<Vec<usize>> {
    require_standard_labels(pi)?;
    seq.validate(pi.len())?;
    let n = pi.len();
    let (xr, yr) = pi.ranks();
    let mut boxes: Vec<[(usize, usize); 2]> = Vec::with_capacity(n + seq.len() + 1);
    boxes.push([(0, 0); 2]);
    let mut counters = [IntervalCounter::new(n), IntervalCounter::new(n)];
    for idx in 0..n {
        boxes.push([(xr[idx], xr[idx]), (yr[idx], yr[idx])]);
        for (axis, counter) in counters.iter_mut().enumerate() {
            let (lo, hi) = boxes[idx + 1][axis];
            counter.update(lo, hi, 1);
        }
    }
    let mut views = Vec::with_capacity(seq.len());
    for st in seq.steps() {
        let (a, b) = (boxes[st.i], boxes[st.j]);
        let merged = [
            (a[0].0.min(b[0].0), a[0].1.max(b[0].1)),
            (a[1].0.min(b[1].0), a[1].1.max(b[1].1)),
        ];
        let mut view = 0;
        for (axis, counter) in counters.iter_mut().enumerate() {
            counter.update(a[axis].0, a[axis].1, -1);
            counter.update(b[axis].0, b[axis].1, -1);
            view = view.max(counter.intersecting(merged[axis].0, merged[axis].1));
            counter.update(merged[axis].0, merged[axis].1, 1);
        }
        boxes.push(merged);
        views.push(view);
    }
    Ok(views)
}
