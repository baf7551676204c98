//! Decomposition builder and decomposition verification.
//!
//! [`build_decomposition`] keeps a coarse gridding of the rectangle family. While some cell
//! holds two rectangles it merges them and coarsens the affected row and column; when every
//! cell holds a single rectangle the nonempty cells are dense enough to contain an `r × r`
//! grid, which is extracted and mapped back to the permutation.

mod gridding;

pub use gridding::{DenseCells, Gridding, StepOutcome};

use crate::error::{Error, Result};
use crate::grid::{verify_grid, GridWitness};
use crate::griddetect::{f_bound, find_grid};
use crate::merge::{new_rectangle_views, require_standard_labels, MergeSequence, MergeStep};
use crate::perm::{canonical_grid_label, Permutation};

// Replaying every invariant is quadratic, so debug builds only do it on small inputs.
const INVARIANT_CHECK_LIMIT: usize = 256;

/// Either an `r × r` grid of the permutation or a merge sequence of bounded width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionResult {
    Grid(GridWitness),
    /// A merge sequence that is `width_bound`-wide.
    Sequence { seq: MergeSequence, width_bound: usize },
}

/// Outcome of the builder loop for a caller-chosen budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BudgetOutcome {
    /// A `d`-wide merge sequence.
    Sequence(MergeSequence),
    /// Every nonempty cell holds one rectangle and at least two remain.
    Dense(DenseCells),
}

/// Width budget used for grid size `r`: four times the grid-density bound.
pub fn budget_for(r: usize) -> Result<usize> {
    f_bound(r)?
        .checked_mul(4)
        .and_then(|d| usize::try_from(d).ok())
        .ok_or(Error::Overflow { r })
}

/// Runs the builder loop with budget `d`. Labels must be `1..=n`.
pub fn build_decomposition_budget(pi: &Permutation, d: usize) -> Result<BudgetOutcome> {
    require_standard_labels(pi)?;
    if d == 0 {
        return Err(Error::Domain("width budget must be positive".into()));
    }
    if pi.is_empty() {
        return Ok(BudgetOutcome::Sequence(MergeSequence::default()));
    }
    let mut g = Gridding::new(pi, d);
    let check = cfg!(debug_assertions) && pi.len() <= INVARIANT_CHECK_LIMIT;
    loop {
        if check {
            if let Err(e) = g.check_invariants() {
                return Err(Error::Internal(format!("gridding invariant: {e}")));
            }
        }
        match g.step() {
            StepOutcome::Merged(_) => {}
            StepOutcome::Finished => {
                debug_assert!(g.coarsenings() <= g.initial_line_count());
                return Ok(BudgetOutcome::Sequence(g.into_sequence()));
            }
            StepOutcome::Dense => return Ok(BudgetOutcome::Dense(g.dense_cells())),
        }
    }
}

/// Either finds an `r × r` grid in `pi` or returns a `4 f(r)`-wide merge sequence.
/// Requires `r ≥ 2`, a nonempty permutation and labels `1..=n`.
pub fn build_decomposition(pi: &Permutation, r: usize) -> Result<DecompositionResult> {
    if r < 2 {
        return Err(Error::Domain(format!("grid size must be at least 2, got {r}")));
    }
    if pi.is_empty() {
        return Err(Error::Domain("cannot decompose the empty permutation".into()));
    }
    let d = budget_for(r)?;
    match build_decomposition_budget(pi, d)? {
        BudgetOutcome::Sequence(seq) => Ok(DecompositionResult::Sequence { seq, width_bound: d }),
        BudgetOutcome::Dense(cells) => {
            let w = find_grid(&cells.cells, r)?;
            let lifted = cells.lift_grid(pi, &w);
            if !verify_grid(pi, &lifted, r)? {
                return Err(Error::Internal("lifted grid does not verify".into()));
            }
            Ok(DecompositionResult::Grid(lifted))
        }
    }
}

/// First step whose new rectangle views at least `d` others, with that view count. Step 0
/// stands for the initial family, which is d-wide exactly when `d ≥ 1`.
pub fn first_violation(pi: &Permutation, seq: &MergeSequence, d: usize) -> Result<Option<(usize, usize)>> {
    let views = new_rectangle_views(pi, seq)?;
    if d == 0 {
        return Ok(Some((0, 0)));
    }
    Ok(views.iter().position(|&v| v >= d).map(|s| (s + 1, views[s])))
}

/// Whether every rectangle family along `seq` is `d`-wide.
pub fn verify_wide(pi: &Permutation, seq: &MergeSequence, d: usize) -> Result<bool> {
    Ok(first_violation(pi, seq, d)?.is_none())
}

/// The least `d` for which `seq` is `d`-wide.
pub fn width_of_decomposition(pi: &Permutation, seq: &MergeSequence) -> Result<usize> {
    let views = new_rectangle_views(pi, seq)?;
    Ok(1 + views.into_iter().max().unwrap_or(0))
}

/// Row-sweep decomposition of the `r × r` canonical grid: each column's running rectangle
/// absorbs the next row's point, bottom to top, then the `r` column rectangles are merged
/// left to right. Its width is `r`.
pub fn canonical_grid_decomposition(r: usize) -> Result<MergeSequence> {
    if r == 0 {
        return Err(Error::Domain("grid size must be positive".into()));
    }
    let n = r * r;
    let mut seq = MergeSequence::default();
    let mut next = n + 1;
    let mut column_rect: Vec<usize> = (1..=r).map(|col| canonical_grid_label(r, r, 1, col)).collect();
    for row in 2..=r {
        for col in 1..=r {
            let rect = &mut column_rect[col - 1];
            seq.push(MergeStep::new(*rect, canonical_grid_label(r, r, row, col), next));
            *rect = next;
            next += 1;
        }
    }
    let mut acc = column_rect[0];
    for &rect in &column_rect[1..] {
        seq.push(MergeStep::new(acc, rect, next));
        acc = next;
        next += 1;
    }
    Ok(seq)
}
