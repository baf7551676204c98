//! Pattern matching by dynamic programming along a merge sequence.
//!
//! After each merge the table holds, for every connected set `K` of at most `ℓ` live
//! rectangles in the visibility graph, the distributions of pattern labels into `K` that
//! can be realized by points of the matching rectangles. Only sets containing the new
//! rectangle need recomputation: the pattern labels sent to it are split between its two
//! parts, the resulting set falls apart into connected components in the previous graph,
//! and the split is realizable when every component is and the components' relative
//! positions agree with the pattern. Singletons of original points are implicit: one label
//! each.

mod table;
mod visibility;

pub use table::{Distribution, SubproblemTable, MAX_PATTERN_LEN};
pub use visibility::{boxes_view, connected_sets, RankBox, VisibilityGraph};

use std::collections::BTreeSet;

use crate::decompose::{build_decomposition, DecompositionResult};
use crate::embedding::{verify_embedding, Embedding};
use crate::error::{Error, Result};
use crate::grid::GridWitness;
use crate::merge::{require_standard_labels, MergeSequence, MergeStep};
use crate::par::Execution;
use crate::perm::{Label, Permutation};

/// Counters collected while running the dynamic program.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchStats {
    /// Largest vertex degree seen in any visibility graph.
    pub max_degree: usize,
    /// Largest number of connected components a split set fell into.
    pub max_components: usize,
    /// Largest number of live table keys after a step.
    pub max_live_keys: usize,
}

// Per-label ranks of the pattern, with range bounds of every label mask precomputed.
#[derive(Debug, Clone)]
struct Pattern {
    len: usize,
    // For each mask: [min x-rank, max x-rank, min y-rank, max y-rank].
    bounds: Vec<[u8; 4]>,
}

impl Pattern {
    fn new(sigma: &Permutation) -> Pattern {
        let len = sigma.len();
        let (xr, yr) = sigma.ranks();
        let mut bounds = vec![[u8::MAX, 0, u8::MAX, 0]; 1 << len];
        for mask in 1usize..1 << len {
            let low = mask.trailing_zeros() as usize;
            let mut b = bounds[mask & (mask - 1)];
            let (x, y) = (xr[low] as u8, yr[low] as u8);
            b = [b[0].min(x), b[1].max(x), b[2].min(y), b[3].max(y)];
            bounds[mask] = b;
        }
        Pattern { len, bounds }
    }

    fn full(&self) -> u32 {
        ((1u64 << self.len) - 1) as u32
    }

    // Labels in `a` all precede labels in `b` along the axis (0 = x, 1 = y).
    fn precedes(&self, a: u32, b: u32, axis: usize) -> bool {
        self.bounds[a as usize][2 * axis + 1] < self.bounds[b as usize][2 * axis]
    }
}

// Two rectangles in different components do not view each other, so along each axis one
// lies entirely before the other, and the pattern labels they hold must follow suit.
fn compatible(pat: &Pattern, boxes: &[RankBox], r1: usize, m1: u32, r2: usize, m2: u32) -> bool {
    (0..2).all(|axis| {
        if boxes[r1][axis].1 < boxes[r2][axis].0 {
            pat.precedes(m1, m2, axis)
        } else {
            pat.precedes(m2, m1, axis)
        }
    })
}

// Connected components of `set` in the visibility graph of the given boxes.
fn components(boxes: &[RankBox], set: &[usize]) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; set.len()];
    let mut count = 0;
    for start in 0..set.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = count;
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for b in 0..set.len() {
                if comp[b] == usize::MAX && boxes_view(&boxes[set[a]], &boxes[set[b]]) {
                    comp[b] = count;
                    stack.push(b);
                }
            }
        }
        count += 1;
    }
    let mut out = vec![Vec::new(); count];
    for (p, &c) in comp.iter().enumerate() {
        out[c].push(set[p]);
    }
    out
}

// The merged set for one of the three split cases: both parts, only the first, only the
// second. Returns `None` when the case cannot fit in `limit` rectangles.
fn split_set(rest: &[usize], parts: &[usize], limit: usize) -> Option<Vec<usize>> {
    if rest.len() + parts.len() > limit {
        return None;
    }
    let mut set: Vec<usize> = rest.iter().chain(parts).copied().collect();
    set.sort_unstable();
    Some(set)
}

// Receives the (rectangle, mask) pairs of one full choice.
type Emit<'e> = dyn FnMut(&[(usize, u32)]) + 'e;

/// Frozen state that the per-set computations of one step read.
struct StepView<'a> {
    pat: &'a Pattern,
    table: &'a SubproblemTable,
    boxes: &'a [RankBox],
    n: usize,
    step: MergeStep,
}

impl StepView<'_> {
    // Satisfiable distributions of a component at the previous step, as part masks.
    fn candidates(&self, comp: &[usize]) -> Vec<Vec<u32>> {
        if comp.len() == 1 && comp[0] <= self.n {
            return (0..self.pat.len).map(|s| vec![1u32 << s]).collect();
        }
        self.table
            .get(comp)
            .map(|codes| {
                codes
                    .iter()
                    .map(|&c| table::decode(c, comp.len(), self.pat.len))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Satisfiable distribution codes of the connected set `key`, which contains the new
    /// rectangle, together with the largest component count met.
    fn solve(&self, key: &[usize]) -> (Vec<u64>, usize) {
        let MergeStep { i: j1, j: j2, k: j } = self.step;
        let rest: Vec<usize> = key.iter().copied().filter(|&r| r != j).collect();
        let mut found = BTreeSet::new();
        let mut max_components = 0;
        for parts in [&[j1, j2][..], &[j1][..], &[j2][..]] {
            let Some(set) = split_set(&rest, parts, self.pat.len) else {
                continue;
            };
            let comps = components(self.boxes, &set);
            max_components = max_components.max(comps.len());
            let mut options: Vec<(Vec<usize>, Vec<Vec<u32>>)> =
                comps.into_iter().map(|c| { let cand = self.candidates(&c); (c, cand) }).collect();
            if options.iter().any(|(_, cand)| cand.is_empty()) {
                continue;
            }
            options.sort_by_key(|(_, cand)| cand.len());
            let mut chosen: Vec<(usize, u32)> = Vec::with_capacity(set.len());
            self.combine(&options, 0, 0, &mut chosen, &mut |assignment| {
                let masks: Vec<u32> = key
                    .iter()
                    .map(|&r| {
                        assignment
                            .iter()
                            .filter(|&&(q, _)| q == r || (r == j && (q == j1 || q == j2)))
                            .fold(0, |acc, &(_, m)| acc | m)
                    })
                    .collect();
                found.insert(table::encode(&masks, self.pat.len));
            });
        }
        (found.into_iter().collect(), max_components)
    }

    // Chooses one candidate per component with disjoint labels and pairwise compatible
    // positions, calling `emit` with the (rectangle, mask) pairs of every full choice.
    fn combine(
        &self,
        options: &[(Vec<usize>, Vec<Vec<u32>>)],
        depth: usize,
        used: u32,
        chosen: &mut Vec<(usize, u32)>,
        emit: &mut Emit<'_>,
    ) {
        let Some((comp, cands)) = options.get(depth) else {
            emit(chosen);
            return;
        };
        'cand: for masks in cands {
            let union = masks.iter().fold(0, |acc, m| acc | m);
            if union & used != 0 {
                continue;
            }
            for (&r, &m) in comp.iter().zip(masks) {
                for &(q, qm) in chosen.iter() {
                    if !compatible(self.pat, self.boxes, r, m, q, qm) {
                        continue 'cand;
                    }
                }
            }
            let before = chosen.len();
            chosen.extend(comp.iter().copied().zip(masks.iter().copied()));
            self.combine(options, depth + 1, used | union, chosen, emit);
            chosen.truncate(before);
        }
    }
}

/// The dynamic program run step by step over a merge sequence.
#[derive(Debug, Clone)]
pub struct PatternDp {
    sigma: Permutation,
    pat: Pattern,
    n: usize,
    seq: MergeSequence,
    graph: VisibilityGraph,
    table: SubproblemTable,
    done: usize,
    execution: Execution,
    stats: MatchStats,
    // First satisfiable distribution that uses every pattern label.
    complete: Option<Distribution>,
}

impl PatternDp {
    /// Sets up the step-0 state. `pi` must have labels `1..=n` and `seq` must be a complete
    /// merge sequence for it; `sigma` must have labels `1..=ℓ` with `1 ≤ ℓ ≤ 15`.
    pub fn new(sigma: &Permutation, pi: &Permutation, seq: &MergeSequence, execution: Execution) -> Result<Self> {
        require_standard_labels(pi)?;
        require_standard_labels(sigma)?;
        seq.validate(pi.len())?;
        if sigma.is_empty() {
            return Err(Error::Domain("pattern must be nonempty".into()));
        }
        if sigma.len() > MAX_PATTERN_LEN {
            return Err(Error::SizeCap { what: "pattern", size: sigma.len(), cap: MAX_PATTERN_LEN });
        }
        Ok(PatternDp {
            sigma: sigma.clone(),
            pat: Pattern::new(sigma),
            n: pi.len(),
            seq: seq.clone(),
            graph: VisibilityGraph::new(pi)?,
            table: SubproblemTable::default(),
            done: 0,
            execution,
            stats: MatchStats::default(),
            complete: None,
        })
    }

    /// Processes the next merge; returns `false` once every step is done.
    pub fn advance(&mut self) -> bool {
        let Some(&step) = self.seq.steps().get(self.done) else {
            return false;
        };
        self.graph.apply(step);
        let sets = connected_sets(&self.graph, step.k, self.pat.len);
        // Boxes never change once created, so the current list also describes step i.
        let view = StepView { pat: &self.pat, table: &self.table, boxes: self.graph.boxes(), n: self.n, step };
        let solved = self.execution.map(&sets, |key| view.solve(key));
        let full = self.pat.full();
        for (key, (codes, comps)) in sets.into_iter().zip(solved) {
            self.stats.max_components = self.stats.max_components.max(comps);
            if self.complete.is_none() {
                self.complete = codes
                    .iter()
                    .map(|&c| Distribution::decode(key.clone(), c, self.pat.len))
                    .find(|d| d.range() == full);
            }
            self.table.insert(key, codes);
        }
        self.table.invalidate(&[step.i, step.j]);
        let touched = std::iter::once(step.k).chain(self.graph.neighbors(step.k).iter().copied());
        let degree = touched.map(|v| self.graph.degree(v)).max().unwrap_or(0);
        self.stats.max_degree = self.stats.max_degree.max(degree);
        self.stats.max_live_keys = self.stats.max_live_keys.max(self.table.live_len());
        self.done += 1;
        true
    }

    /// A satisfiable distribution of every pattern label, once one has appeared. Its
    /// existence already proves containment, so later steps cannot change the answer.
    pub fn complete(&self) -> Option<&Distribution> {
        self.complete.as_ref()
    }

    /// Merges processed so far.
    pub fn steps_done(&self) -> usize {
        self.done
    }

    pub fn table(&self) -> &SubproblemTable {
        &self.table
    }

    pub fn graph(&self) -> &VisibilityGraph {
        &self.graph
    }

    pub fn stats(&self) -> MatchStats {
        self.stats
    }

    /// Whether the distribution is satisfiable at the current step. Original-point
    /// singletons are satisfiable with exactly one label.
    pub fn is_satisfiable(&self, dist: &Distribution) -> bool {
        if dist.key.len() == 1 && dist.key[0] <= self.n {
            return dist.masks[0].count_ones() == 1;
        }
        self.table.get(&dist.key).is_some_and(|c| c.binary_search(&dist.code(self.pat.len)).is_ok())
    }

    /// Runs steps until some distribution uses every pattern label or the sequence ends,
    /// reconstructing and verifying an embedding when one exists.
    pub fn finish(mut self, pi: &Permutation) -> Result<Option<Embedding>> {
        while self.complete.is_none() && self.advance() {}
        let top = match self.complete.take() {
            Some(d) => d,
            None => {
                // Only a single point has no merges; every other text ends in its root.
                let root = if self.n == 1 { 1 } else { self.n + self.seq.len() };
                let full = Distribution { key: vec![root], masks: vec![self.pat.full()] };
                if !self.is_satisfiable(&full) {
                    return Ok(None);
                }
                full
            }
        };
        let pairs = self.reconstruct(top)?;
        let phi = Embedding::new(pairs)?;
        if !verify_embedding(&self.sigma, pi, &phi)? {
            return Err(Error::Internal("reconstructed embedding does not verify".into()));
        }
        Ok(Some(phi))
    }

    fn satisfiable_ever(&self, comp: &[usize], masks: &[u32]) -> bool {
        if comp.len() == 1 && comp[0] <= self.n {
            return masks[0].count_ones() == 1;
        }
        self.table.is_satisfiable(comp, table::encode(masks, self.pat.len))
    }

    // Descends from a satisfiable distribution to original points, re-deriving at each
    // rectangle the first split (by increasing code of the first part) that works.
    fn reconstruct(&self, top: Distribution) -> Result<Vec<(Label, Label)>> {
        let boxes = self.graph.boxes();
        let mut pairs = Vec::with_capacity(self.pat.len);
        let mut work = vec![top];
        while let Some(Distribution { key, masks }) = work.pop() {
            if key.len() == 1 && key[0] <= self.n {
                pairs.push((masks[0].trailing_zeros() as usize + 1, key[0]));
                continue;
            }
            let j = *key.last().expect("keys are nonempty");
            let step = self.seq.steps()[j - self.n - 1];
            let pj = key.len() - 1;
            let x = masks[pj];
            let mut resolved = false;
            let mut first: u32 = 0;
            loop {
                let second = x & !first;
                if let Some(parts) = self.try_split(&key, &masks, step, first, second, boxes) {
                    work.extend(parts);
                    resolved = true;
                    break;
                }
                if first == x {
                    break;
                }
                // Next subset of `x` in increasing numeric order.
                first = (first.wrapping_sub(x)) & x;
            }
            if !resolved {
                return Err(Error::Internal(format!("no split of rectangle {j} is satisfiable")));
            }
        }
        pairs.sort_unstable();
        Ok(pairs)
    }

    fn try_split(
        &self,
        key: &[usize],
        masks: &[u32],
        step: MergeStep,
        first: u32,
        second: u32,
        boxes: &[RankBox],
    ) -> Option<Vec<Distribution>> {
        let mut members: Vec<(usize, u32)> = key[..key.len() - 1].iter().copied().zip(masks.iter().copied()).collect();
        if first != 0 {
            members.push((step.i, first));
        }
        if second != 0 {
            members.push((step.j, second));
        }
        if members.len() > self.pat.len {
            return None;
        }
        members.sort_unstable();
        let set: Vec<usize> = members.iter().map(|&(r, _)| r).collect();
        let mask_of = |r: usize| members.iter().find(|&&(q, _)| q == r).map(|&(_, m)| m).unwrap_or(0);
        let comps: Vec<Distribution> = components(boxes, &set)
            .into_iter()
            .map(|c| {
                let m = c.iter().map(|&r| mask_of(r)).collect();
                Distribution { key: c, masks: m }
            })
            .collect();
        if !comps.iter().all(|d| self.satisfiable_ever(&d.key, &d.masks)) {
            return None;
        }
        for (a, da) in comps.iter().enumerate() {
            for db in &comps[a + 1..] {
                for (&r1, &m1) in da.key.iter().zip(&da.masks) {
                    for (&r2, &m2) in db.key.iter().zip(&db.masks) {
                        if !compatible(&self.pat, boxes, r1, m1, r2, m2) {
                            return None;
                        }
                    }
                }
            }
        }
        Some(comps)
    }
}

// Pattern reduced to labels 1..ℓ in x order, with the original label of each.
fn standard_pattern(sigma: &Permutation) -> (Permutation, Vec<Label>) {
    sigma.standardize()
}

fn relabel(phi: Embedding, sigma_origin: &[Label], pi_origin: Option<&[Label]>) -> Result<Embedding> {
    Embedding::new(
        phi.pairs()
            .iter()
            .map(|&(s, p)| (sigma_origin[s - 1], pi_origin.map_or(p, |o| o[p - 1])))
            .collect(),
    )
}

/// Decides whether `sigma` occurs in `pi` given a complete merge sequence of `pi` (labels
/// `1..=n`), returning a verified embedding when it does.
pub fn find_pattern(sigma: &Permutation, pi: &Permutation, seq: &MergeSequence) -> Result<Option<Embedding>> {
    find_pattern_with(sigma, pi, seq, Execution::default()).map(|(phi, _)| phi)
}

/// [`find_pattern`] with an explicit execution mode, also returning run statistics.
pub fn find_pattern_with(
    sigma: &Permutation,
    pi: &Permutation,
    seq: &MergeSequence,
    execution: Execution,
) -> Result<(Option<Embedding>, MatchStats)> {
    require_standard_labels(pi)?;
    seq.validate(pi.len())?;
    if sigma.len() > pi.len() {
        return Ok((None, MatchStats::default()));
    }
    let (reduced, origin) = standard_pattern(sigma);
    let mut dp = PatternDp::new(&reduced, pi, seq, execution)?;
    while dp.complete().is_none() && dp.advance() {}
    let stats = dp.stats();
    match dp.finish(pi)? {
        Some(phi) => {
            let phi = relabel(phi, &origin, None)?;
            debug_assert!(verify_embedding(sigma, pi, &phi).unwrap_or(false));
            Ok((Some(phi), stats))
        }
        None => Ok((None, stats)),
    }
}

/// Embedding of a standard pattern into a permutation through an `ℓ × ℓ` grid: the pattern
/// point in column `i` with y-rank `v` goes to the witness of cell `(i, v)`.
pub fn embed_via_grid(sigma: &Permutation, pi: &Permutation, w: &GridWitness) -> Result<Embedding> {
    let l = sigma.len();
    w.check_shape(l)?;
    let (xr, yr) = sigma.ranks();
    let mut pairs = Vec::with_capacity(l);
    for (idx, &label) in sigma.labels().iter().enumerate() {
        let target = w.witness(xr[idx], yr[idx]);
        let image = pi
            .iter()
            .find(|&(_, p)| p == target)
            .map(|(lab, _)| lab)
            .ok_or_else(|| Error::Domain(format!("grid witness ({target}) is not a point of the text")))?;
        pairs.push((label, image));
    }
    Embedding::new(pairs)
}

/// Decides whether `sigma` occurs in `pi`. Builds a decomposition of `pi` for grid size
/// `ℓ = |sigma|`; a grid contains every pattern of length `ℓ`, otherwise the dynamic program
/// runs on the returned merge sequence.
pub fn match_auto(sigma: &Permutation, pi: &Permutation) -> Result<Option<Embedding>> {
    match_auto_with(sigma, pi, Execution::default())
}

/// [`match_auto`] with an explicit execution mode.
pub fn match_auto_with(sigma: &Permutation, pi: &Permutation, execution: Execution) -> Result<Option<Embedding>> {
    let l = sigma.len();
    if l == 0 {
        return Err(Error::Domain("pattern must be nonempty".into()));
    }
    if l > pi.len() {
        return Ok(None);
    }
    if l == 1 {
        return Ok(Some(Embedding::new(vec![(sigma.labels()[0], pi.labels()[0])])?));
    }
    let (text, text_origin) = pi.standardize();
    let (pattern, pattern_origin) = standard_pattern(sigma);
    let phi = match build_decomposition(&text, l)? {
        DecompositionResult::Grid(w) => embed_via_grid(&pattern, &text, &w)?,
        DecompositionResult::Sequence { seq, .. } => match find_pattern_with(&pattern, &text, &seq, execution)?.0 {
            Some(phi) => phi,
            None => return Ok(None),
        },
    };
    let phi = relabel(phi, &pattern_origin, Some(&text_origin))?;
    if !verify_embedding(sigma, pi, &phi)? {
        return Err(Error::Internal("embedding does not verify".into()));
    }
    Ok(Some(phi))
}
