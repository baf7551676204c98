//! Grid extraction from dense point sets by block coarsening.
//!
//! A point set `M ⊆ [p] × [q]` with more than `f(r)(p + q - 2)` points contains an `r × r`
//! grid. [`find_grid`] finds one in time linear in `|M|` by cutting the plane into blocks of
//! side `r²`, looking for `r` blocks in one block-column that occupy the same `r` original
//! columns, and otherwise recursing on the set of nonempty blocks.

use std::collections::HashMap;
use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::geometry::Point;
use crate::grid::{parse_point, verify_grid_points, GridWitness};

/// A set of distinct points inside `[p] × [q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub p: usize,
    pub q: usize,
    points: Vec<Point>,
}

impl PointSet {
    /// Rejects points outside the bounds and repeated points.
    pub fn new(p: usize, q: usize, points: Vec<Point>) -> Result<Self> {
        if let Some(pt) = points
            .iter()
            .find(|pt| pt.x == 0 || pt.y == 0 || pt.x > p || pt.y > q)
        {
            return Err(Error::Domain(format!(
                "point ({},{}) outside [{p}]x[{q}]",
                pt.x, pt.y
            )));
        }
        if let Some(pt) = first_repeat(p, q, &points) {
            return Err(Error::Domain(format!("point ({},{}) appears twice", pt.x, pt.y)));
        }
        Ok(PointSet { p, q, points })
    }

    /// For sets that are distinct and in bounds by construction; checked in debug builds.
    pub(crate) fn from_distinct(p: usize, q: usize, points: Vec<Point>) -> Self {
        debug_assert!(PointSet::new(p, q, points.clone()).is_ok());
        PointSet { p, q, points }
    }

    /// Every point of `[p] × [q]`.
    pub fn full(p: usize, q: usize) -> Self {
        let points = (1..=p)
            .flat_map(|x| (1..=q).map(move |y| Point::new(x, y)))
            .collect();
        PointSet { p, q, points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn transpose(&self) -> PointSet {
        PointSet {
            p: self.q,
            q: self.p,
            points: self.points.iter().map(Point::transpose).collect(),
        }
    }

    /// Parses "p q" followed by one "x y" line per point.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| parse_err("", "missing \"p q\" line"))?;
        let bounds = parse_point(header)?;
        let points = lines.map(parse_point).collect::<Result<Vec<_>>>()?;
        PointSet::new(bounds.x, bounds.y, points)
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.p, self.q)?;
        for pt in &self.points {
            writeln!(f, "{pt}")?;
        }
        Ok(())
    }
}

// A point occurring twice, found in O(|points| + p + q) by bucketing on x and stamping y.
fn first_repeat(p: usize, q: usize, points: &[Point]) -> Option<Point> {
    let mut start = vec![0usize; p + 2];
    for pt in points {
        start[pt.x + 1] += 1;
    }
    for x in 1..start.len() {
        start[x] += start[x - 1];
    }
    let mut fill = start.clone();
    let mut ys = vec![0usize; points.len()];
    for pt in points {
        ys[fill[pt.x]] = pt.y;
        fill[pt.x] += 1;
    }
    let mut stamp = vec![0usize; q + 1];
    for x in 1..=p {
        for &y in &ys[start[x]..start[x + 1]] {
            if stamp[y] == x {
                return Some(Point::new(x, y));
            }
            stamp[y] = x;
        }
    }
    None
}

/// The nonempty blocks `B_{x,y}` of side `r²`, ordered by block column and then by the
/// first occupied column. Per-block data lives in shared arrays.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Blocks {
    cells: Vec<Point>,
    // Block `b` owns entries `offsets[b]..offsets[b + 1]` of `cols` and `samples`.
    offsets: Vec<usize>,
    // Occupied columns of each block, ascending.
    cols: Vec<usize>,
    // Lowest point of each occupied column inside its block.
    samples: Vec<Point>,
}

impl Blocks {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Block coordinates of block `b`.
    pub fn cell(&self, b: usize) -> Point {
        self.cells[b]
    }

    /// Number of occupied original columns of block `b`.
    pub fn width(&self, b: usize) -> usize {
        self.offsets[b + 1] - self.offsets[b]
    }

    /// Lowest point of every occupied column of block `b`, by ascending column.
    pub fn samples(&self, b: usize) -> &[Point] {
        &self.samples[self.offsets[b]..self.offsets[b + 1]]
    }

    /// Occupied original columns of block `b`, ascending.
    pub fn cols(&self, b: usize) -> &[usize] {
        &self.cols[self.offsets[b]..self.offsets[b + 1]]
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c.checked_mul(n - k + i)? / i;
    }
    Some(c)
}

/// `f(r) = r⁴ · C(r², r)` in checked 64-bit arithmetic.
pub fn f_bound(r: usize) -> Result<u64> {
    if r == 0 {
        return Err(Error::Domain("f(r) requires r >= 1".to_string()));
    }
    let r128 = r as u128;
    r128.checked_mul(r128)
        .and_then(|sq| binomial(sq, r128))
        .and_then(|c| c.checked_mul(r128.checked_pow(4)?))
        .and_then(|v| u64::try_from(v).ok())
        .ok_or(Error::Overflow { r })
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Collects the nonempty blocks of side `r²`, with the occupied columns of each, in `O(|M| + p)`.
pub fn find_blocks(m: &PointSet, r: usize) -> Result<Blocks> {
    if r < 2 {
        return Err(Error::Domain("block search requires r >= 2".to_string()));
    }
    let side = r * r;
    // Bucket points by column.
    let mut start = vec![0usize; m.p + 2];
    for pt in m.points() {
        start[pt.x + 1] += 1;
    }
    for x in 1..start.len() {
        start[x] += start[x - 1];
    }
    let mut fill = start.clone();
    let mut by_col = vec![0usize; m.len()];
    for pt in m.points() {
        by_col[fill[pt.x]] = pt.y;
        fill[pt.x] += 1;
    }

    // First pass: block of every point and occupied-column count of every block.
    let mut cells: Vec<Point> = Vec::new();
    let mut widths: Vec<usize> = Vec::new();
    let mut last_col: Vec<usize> = Vec::new();
    let mut block_of = vec![0usize; m.len()];
    let mut last_in_row = vec![usize::MAX; ceil_div(m.q, side) + 1];
    for x in 1..=m.p {
        let bx = (x - 1) / side + 1;
        for pos in start[x]..start[x + 1] {
            let by = (by_col[pos] - 1) / side + 1;
            let b = match last_in_row[by] {
                b if b != usize::MAX && cells[b].x == bx => b,
                _ => {
                    cells.push(Point::new(bx, by));
                    widths.push(0);
                    last_col.push(0);
                    last_in_row[by] = cells.len() - 1;
                    cells.len() - 1
                }
            };
            if last_col[b] != x {
                last_col[b] = x;
                widths[b] += 1;
            }
            block_of[pos] = b;
        }
    }
    // Second pass: lowest point of each occupied column, written into the block's range.
    let mut offsets = Vec::with_capacity(cells.len() + 1);
    offsets.push(0);
    for w in &widths {
        offsets.push(offsets.last().copied().unwrap_or(0) + w);
    }
    let mut next = offsets.clone();
    let mut samples = vec![Point::new(0, 0); offsets[cells.len()]];
    for x in 1..=m.p {
        for pos in start[x]..start[x + 1] {
            let (b, y) = (block_of[pos], by_col[pos]);
            if next[b] > offsets[b] && samples[next[b] - 1].x == x {
                let s = &mut samples[next[b] - 1];
                s.y = s.y.min(y);
            } else {
                samples[next[b]] = Point::new(x, y);
                next[b] += 1;
            }
        }
    }
    let cols = samples.iter().map(|p| p.x).collect();
    Ok(Blocks { cells, offsets, cols, samples })
}

/// The coarsened point set of nonempty blocks, with one original point per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub coarse: PointSet,
    /// Lowest point of the leftmost occupied column of each block, aligned with
    /// `coarse.points()`.
    pub representatives: Vec<Point>,
}

/// Outcome of one coarsening round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridOrReduce {
    Grid(GridWitness),
    Reduced(Reduction),
}

/// Looks for `r` blocks in one block-column whose first `r` occupied columns coincide; if they
/// exist, assembles an `r × r` grid of `M` from them, otherwise returns the set of nonempty
/// blocks.
pub fn find_grid_or_reduce(m: &PointSet, r: usize) -> Result<GridOrReduce> {
    let blocks = find_blocks(m, r)?;
    let side = r * r;
    // Blocks of one block-column are created consecutively.
    let mut run_start = 0;
    while run_start < blocks.len() {
        let bx = blocks.cell(run_start).x;
        let mut run_end = run_start;
        while run_end < blocks.len() && blocks.cell(run_end).x == bx {
            run_end += 1;
        }
        let mut by_subset: HashMap<&[usize], Vec<usize>> = HashMap::new();
        for idx in run_start..run_end {
            if blocks.width(idx) < r {
                continue;
            }
            let entry = by_subset.entry(&blocks.cols(idx)[..r]).or_default();
            entry.push(idx);
            if entry.len() == r {
                let mut chosen = entry.clone();
                chosen.sort_unstable_by_key(|&i| blocks.cell(i).y);
                return Ok(GridOrReduce::Grid(assemble_grid(&blocks, &chosen, r, side)));
            }
        }
        debug_assert!({
            let wide = (run_start..run_end)
                .filter(|&i| blocks.width(i) >= r)
                .count() as u128;
            binomial((r * r) as u128, r as u128).is_none_or(|c| wide < r as u128 * c)
        });
        run_start = run_end;
    }
    let points: Vec<Point> = blocks.cells.clone();
    let representatives = (0..blocks.len()).map(|b| blocks.samples(b)[0]).collect();
    let coarse = PointSet::from_distinct(ceil_div(m.p, side), ceil_div(m.q, side), points);
    Ok(GridOrReduce::Reduced(Reduction {
        coarse,
        representatives,
    }))
}

/// Grid from `r` blocks of one block-column sharing their first `r` columns `x_1 < … < x_r`:
/// column `i` spans `[x_i, x_{i+1} - 1]` and row `j` spans the block rows from `y_j` up to
/// `y_{j+1} - 1`, both extended to the borders.
fn assemble_grid(blocks: &Blocks, chosen: &[usize], r: usize, side: usize) -> GridWitness {
    let col_cuts = blocks.samples(chosen[0])[1..r].iter().map(|p| p.x - 1).collect();
    let row_cuts = chosen[1..]
        .iter()
        .map(|&b| (blocks.cell(b).y - 1) * side)
        .collect();
    let mut witnesses = Vec::with_capacity(r * r);
    for &b in chosen {
        witnesses.extend_from_slice(&blocks.samples(b)[..r]);
    }
    GridWitness {
        col_cuts,
        row_cuts,
        witnesses,
    }
}

/// Finds an `r × r` grid in a point set with `|M| > f(r)(p + q - 2)`.
pub fn find_grid(m: &PointSet, r: usize) -> Result<GridWitness> {
    if r < 2 {
        return Err(Error::Domain("grid search requires r >= 2".to_string()));
    }
    let f = u128::from(f_bound(r)?);
    let bound = |s: &PointSet| f * (s.p + s.q).saturating_sub(2) as u128;
    if m.p + m.q <= 2 || m.len() as u128 <= bound(m) {
        return Err(Error::Density {
            points: m.len(),
            bound: bound(m),
        });
    }
    let side = r * r;
    let mut levels: Vec<(Vec<Point>, Vec<Point>)> = Vec::new();
    let mut current = m.clone();
    let found = loop {
        if current.p + current.q <= 2 || current.len() as u128 <= bound(&current) {
            return Err(Error::Internal(format!(
                "coarsened set of {} points in [{}]x[{}] lost the density bound",
                current.len(),
                current.p,
                current.q
            )));
        }
        if let GridOrReduce::Grid(w) = find_grid_or_reduce(&current.transpose(), r)? {
            break w.transpose();
        }
        match find_grid_or_reduce(&current, r)? {
            GridOrReduce::Grid(w) => break w,
            GridOrReduce::Reduced(red) => {
                let mut pairs: Vec<(Point, Point)> =
                    red.coarse.points().iter().copied().zip(red.representatives).collect();
                let b = bound(&red.coarse);
                let keep = (b + b / 10).min(pairs.len() as u128) as usize;
                pairs.truncate(keep);
                let (pts, reps): (Vec<Point>, Vec<Point>) = pairs.into_iter().unzip();
                current = PointSet::from_distinct(red.coarse.p, red.coarse.q, pts.clone());
                levels.push((pts, reps));
            }
        }
    };
    let mut w = found;
    for (cells, reps) in levels.iter().rev() {
        w.col_cuts.iter_mut().for_each(|c| *c *= side);
        w.row_cuts.iter_mut().for_each(|c| *c *= side);
        // Only the witness blocks need their representative, so scan the level once.
        let mut lifted: HashMap<Point, Option<Point>> = w.witnesses.iter().map(|&p| (p, None)).collect();
        for (cell, rep) in cells.iter().zip(reps) {
            if let Some(slot) = lifted.get_mut(cell) {
                *slot = Some(*rep);
            }
        }
        for pt in w.witnesses.iter_mut() {
            *pt = lifted[pt].ok_or_else(|| Error::Internal("witness block without representative".to_string()))?;
        }
    }
    if !verify_grid_points(m.points(), &w, r)? {
        return Err(Error::Internal("assembled grid failed verification".to_string()));
    }
    Ok(w)
}
