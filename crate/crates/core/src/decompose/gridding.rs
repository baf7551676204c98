//! The gridding maintained by the decomposition builder.
//!
//! Columns and rows are doubly linked lists of lines, each holding the cells it crosses in
//! order along the other axis. Every cell holds the rectangles it contains as a linked list
//! threaded through a per-rectangle successor array.
//! Merging two adjacent lines walks both cell lists once, so its cost is proportional to the
//! number of cells involved. Cells absorbed during a merge are marked dead and dropped lazily
//! from the crossing lines the next time those lines are merged.

use std::collections::{HashMap, VecDeque};

use crate::geometry::{Axis, Point};
use crate::griddetect::PointSet;
use crate::grid::GridWitness;
use crate::merge::{MergeSequence, MergeStep};
use crate::perm::{Label, Permutation};

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Line {
    // Rank range covered by the line.
    lo: usize,
    hi: usize,
    size: usize,
    cells: Vec<usize>,
    prev: usize,
    next: usize,
}

#[derive(Debug, Clone)]
struct Cell {
    col: usize,
    row: usize,
    // First and last rectangle of the cell's list, and its length.
    head: usize,
    tail: usize,
    len: usize,
    alive: bool,
    queued: bool,
}

/// Result of one iteration of the builder loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    /// Two rectangles of a large cell were merged.
    Merged(MergeStep),
    /// A single rectangle remains.
    Finished,
    /// No cell holds two rectangles but several rectangles remain.
    Dense,
}

/// The nonempty cells of a gridding in which every cell holds exactly one rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseCells {
    /// Cell coordinates after renumbering columns and rows consecutively.
    pub cells: PointSet,
    /// For each cell (aligned with `cells.points()`), an original label inside its rectangle.
    pub representatives: Vec<Label>,
    // Largest x (resp. y) coordinate of the permutation inside each column (resp. row).
    col_max_x: Vec<usize>,
    row_max_y: Vec<usize>,
}

impl DenseCells {
    /// Translates a grid of the cell set into a grid of the permutation: cuts move to the
    /// last coordinate of their column or row, and every witness cell is replaced by the
    /// representative point of its rectangle.
    pub fn lift_grid(&self, pi: &Permutation, w: &GridWitness) -> GridWitness {
        // Only the witness cells need a representative, so scan instead of indexing all cells.
        let mut rep_of: HashMap<Point, Label> = w.witnesses.iter().map(|&p| (p, 0)).collect();
        for (p, &l) in self.cells.points().iter().zip(&self.representatives) {
            if let Some(slot) = rep_of.get_mut(p) {
                *slot = l;
            }
        }
        GridWitness {
            col_cuts: w.col_cuts.iter().map(|&c| self.col_max_x[c - 1]).collect(),
            row_cuts: w.row_cuts.iter().map(|&c| self.row_max_y[c - 1]).collect(),
            witnesses: w
                .witnesses
                .iter()
                .map(|p| pi.point(rep_of[p]).expect("representatives are labels of π"))
                .collect(),
        }
    }
}

/// Gridding of a permutation's rectangle family with width budget `d`.
#[derive(Debug, Clone)]
pub struct Gridding {
    d: usize,
    n: usize,
    cols: Vec<Line>,
    rows: Vec<Line>,
    col_head: usize,
    row_head: usize,
    cells: Vec<Cell>,
    // Successor of every rectangle in its cell's list.
    next_rect: Vec<usize>,
    large: VecDeque<usize>,
    live_rects: usize,
    seq: MergeSequence,
    // A leaf label of every rectangle index.
    representative: Vec<Label>,
    // Rank-space bounding boxes of every rectangle index, [x range, y range].
    boxes: Vec<[(usize, usize); 2]>,
    x_by_rank: Vec<usize>,
    y_by_rank: Vec<usize>,
    initial_lines: usize,
    coarsenings: usize,
}

fn initial_lines(n: usize, d: usize) -> Vec<Line> {
    let count = n.div_ceil(d);
    (0..count)
        .map(|c| Line {
            lo: c * d + 1,
            hi: ((c + 1) * d).min(n),
            size: ((c + 1) * d).min(n) - c * d,
            cells: Vec::new(),
            prev: if c == 0 { NIL } else { c - 1 },
            next: if c + 1 == count { NIL } else { c + 1 },
        })
        .collect()
}

impl Gridding {
    /// Initial gridding: the point of x-rank `a` and y-rank `b` goes to column `⌈a/d⌉` and
    /// row `⌈b/d⌉`. Requires labels `1..=n` and `d ≥ 1`.
    pub fn new(pi: &Permutation, d: usize) -> Self {
        assert!(d >= 1, "budget must be positive");
        assert!(pi.has_standard_labels(), "labels must be 1..n");
        let n = pi.len();
        let (xr, yr) = pi.ranks();
        let mut x_by_rank = vec![0; n];
        let mut y_by_rank = vec![0; n];
        for (idx, p) in pi.points().iter().enumerate() {
            x_by_rank[xr[idx] - 1] = p.x;
            y_by_rank[yr[idx] - 1] = p.y;
        }
        let mut cols = initial_lines(n, d);
        let mut rows = initial_lines(n, d);
        let mut label_by_xrank = vec![0; n];
        for (idx, &r) in xr.iter().enumerate() {
            label_by_xrank[r - 1] = idx + 1;
        }
        let mut cells: Vec<Cell> = Vec::with_capacity(n);
        let mut next_rect = vec![NIL; 2 * n];
        let mut last_in_row = vec![NIL; rows.len()];
        for &label in &label_by_xrank {
            let col = (xr[label - 1] - 1) / d;
            let row = (yr[label - 1] - 1) / d;
            let c = match last_in_row[row] {
                c if c != NIL && cells[c].col == col => c,
                _ => {
                    cells.push(Cell {
                        col,
                        row,
                        head: NIL,
                        tail: NIL,
                        len: 0,
                        alive: true,
                        queued: false,
                    });
                    rows[row].cells.push(cells.len() - 1);
                    last_in_row[row] = cells.len() - 1;
                    cells.len() - 1
                }
            };
            let cell = &mut cells[c];
            if cell.tail == NIL {
                cell.head = label;
            } else {
                next_rect[cell.tail] = label;
            }
            cell.tail = label;
            cell.len += 1;
        }
        // Row lists were filled in column order; fill column lists in row order.
        for row in &rows {
            for &c in &row.cells {
                cols[cells[c].col].cells.push(c);
            }
        }
        let mut large = VecDeque::new();
        for (c, cell) in cells.iter_mut().enumerate() {
            if cell.len >= 2 {
                cell.queued = true;
                large.push_back(c);
            }
        }
        let mut boxes = Vec::with_capacity(2 * n);
        boxes.push([(0, 0); 2]);
        boxes.extend((0..n).map(|i| [(xr[i], xr[i]), (yr[i], yr[i])]));
        let initial_lines = cols.len() + rows.len();
        let mut representative = Vec::with_capacity(2 * n);
        representative.extend(0..=n);
        Gridding {
            d,
            n,
            col_head: if cols.is_empty() { NIL } else { 0 },
            row_head: if rows.is_empty() { NIL } else { 0 },
            cols,
            rows,
            cells,
            next_rect,
            large,
            live_rects: n,
            seq: MergeSequence::new(Vec::with_capacity(n.saturating_sub(1))),
            representative,
            boxes,
            x_by_rank,
            y_by_rank,
            initial_lines,
            coarsenings: 0,
        }
    }

    pub fn budget(&self) -> usize {
        self.d
    }

    /// Merges recorded so far.
    pub fn sequence(&self) -> &MergeSequence {
        &self.seq
    }

    pub fn into_sequence(self) -> MergeSequence {
        self.seq
    }

    /// Number of rows and columns in the initial gridding.
    pub fn initial_line_count(&self) -> usize {
        self.initial_lines
    }

    /// Number of row and column merges performed so far.
    pub fn coarsenings(&self) -> usize {
        self.coarsenings
    }

    fn lines_mut(&mut self, axis: Axis) -> &mut Vec<Line> {
        match axis {
            Axis::X => &mut self.cols,
            Axis::Y => &mut self.rows,
        }
    }

    fn lines(&self, axis: Axis) -> &[Line] {
        match axis {
            Axis::X => &self.cols,
            Axis::Y => &self.rows,
        }
    }

    fn line_of(cell: &Cell, axis: Axis) -> usize {
        match axis {
            Axis::X => cell.col,
            Axis::Y => cell.row,
        }
    }

    fn set_line(cell: &mut Cell, axis: Axis, line: usize) {
        match axis {
            Axis::X => cell.col = line,
            Axis::Y => cell.row = line,
        }
    }

    fn enqueue_if_large(&mut self, c: usize) {
        let cell = &mut self.cells[c];
        if cell.len >= 2 && !cell.queued {
            cell.queued = true;
            self.large.push_back(c);
        }
    }

    /// Head of the large-cell list, discarding stale entries.
    fn first_large_cell(&mut self) -> Option<usize> {
        while let Some(&c) = self.large.front() {
            if self.cells[c].alive && self.cells[c].len >= 2 {
                return Some(c);
            }
            self.cells[c].queued = false;
            self.large.pop_front();
        }
        None
    }

    /// One iteration of the builder loop.
    pub fn step(&mut self) -> StepOutcome {
        if self.live_rects <= 1 {
            return StepOutcome::Finished;
        }
        let Some(c) = self.first_large_cell() else {
            return StepOutcome::Dense;
        };
        let k = self.n + self.seq.len() + 1;
        let cell = &mut self.cells[c];
        // Replace the first two rectangles of the list by k.
        let i = cell.head;
        let j = self.next_rect[i];
        self.next_rect[k] = self.next_rect[j];
        if cell.tail == j {
            cell.tail = k;
        }
        cell.head = k;
        cell.len -= 1;
        let (col, row) = (cell.col, cell.row);
        let step = MergeStep::new(i, j, k);
        self.seq.push(step);
        self.representative.push(self.representative[i]);
        let (a, b) = (self.boxes[i], self.boxes[j]);
        self.boxes.push([
            (a[0].0.min(b[0].0), a[0].1.max(b[0].1)),
            (a[1].0.min(b[1].0), a[1].1.max(b[1].1)),
        ]);
        self.live_rects -= 1;
        self.cols[col].size -= 1;
        self.rows[row].size -= 1;
        self.coarsen_around(Axis::X, col);
        self.coarsen_around(Axis::Y, row);
        StepOutcome::Merged(step)
    }

    /// Merges `line` with its predecessor, or failing that its successor, when the combined
    /// size fits the budget.
    fn coarsen_around(&mut self, axis: Axis, line: usize) {
        let d = self.d;
        let lines = self.lines(axis);
        let size = lines[line].size;
        let prev = lines[line].prev;
        let next = lines[line].next;
        if prev != NIL && lines[prev].size + size <= d {
            self.merge_lines(axis, prev, line);
        } else if next != NIL && size + lines[next].size <= d {
            self.merge_lines(axis, line, next);
        }
    }

    /// Merges adjacent lines `a` (first) and `b` (its successor) into `a`.
    fn merge_lines(&mut self, axis: Axis, a: usize, b: usize) {
        let cross = match axis {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        };
        let list_a = std::mem::take(&mut self.lines_mut(axis)[a].cells);
        let list_b = std::mem::take(&mut self.lines_mut(axis)[b].cells);
        let key = |g: &Gridding, c: usize| g.lines(cross)[Gridding::line_of(&g.cells[c], cross)].lo;
        let alive_a: Vec<usize> = list_a.into_iter().filter(|&c| self.cells[c].alive).collect();
        let alive_b: Vec<usize> = list_b.into_iter().filter(|&c| self.cells[c].alive).collect();
        let mut merged = Vec::with_capacity(alive_a.len() + alive_b.len());
        let (mut ia, mut ib) = (0, 0);
        while ia < alive_a.len() || ib < alive_b.len() {
            let ka = alive_a.get(ia).map(|&c| key(self, c));
            let kb = alive_b.get(ib).map(|&c| key(self, c));
            match (ka, kb) {
                (Some(x), Some(y)) if x == y => {
                    let (ca, cb) = (alive_a[ia], alive_b[ib]);
                    let (head_b, tail_b, len_b) = (self.cells[cb].head, self.cells[cb].tail, self.cells[cb].len);
                    self.next_rect[self.cells[ca].tail] = head_b;
                    let cell_a = &mut self.cells[ca];
                    cell_a.tail = tail_b;
                    cell_a.len += len_b;
                    self.cells[cb].alive = false;
                    self.enqueue_if_large(ca);
                    merged.push(ca);
                    ia += 1;
                    ib += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    merged.push(alive_a[ia]);
                    ia += 1;
                }
                (Some(_), None) => {
                    merged.push(alive_a[ia]);
                    ia += 1;
                }
                _ => {
                    let cb = alive_b[ib];
                    Gridding::set_line(&mut self.cells[cb], axis, a);
                    merged.push(cb);
                    ib += 1;
                }
            }
        }
        let lines = self.lines_mut(axis);
        let (b_hi, b_size, b_next) = (lines[b].hi, lines[b].size, lines[b].next);
        let la = &mut lines[a];
        la.cells = merged;
        la.hi = b_hi;
        la.size += b_size;
        la.next = b_next;
        if b_next != NIL {
            lines[b_next].prev = a;
        }
        lines[b].size = 0;
        lines[b].prev = NIL;
        lines[b].next = NIL;
        self.coarsenings += 1;
    }

    fn rects_of<'a>(&'a self, cell: &Cell) -> impl Iterator<Item = usize> + 'a {
        let (head, tail) = (cell.head, cell.tail);
        let mut cur = head;
        let mut done = head == NIL;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let r = cur;
            done = r == tail;
            cur = self.next_rect[r];
            Some(r)
        })
    }

    fn line_order(&self, axis: Axis) -> Vec<usize> {
        let lines = self.lines(axis);
        let mut out = Vec::new();
        let mut cur = match axis {
            Axis::X => self.col_head,
            Axis::Y => self.row_head,
        };
        while cur != NIL {
            out.push(cur);
            cur = lines[cur].next;
        }
        out
    }

    /// The cell point set, with columns and rows renumbered consecutively.
    pub fn dense_cells(&self) -> DenseCells {
        let number = |axis: Axis| {
            let order = self.line_order(axis);
            let mut num = vec![0; self.lines(axis).len()];
            let by_rank = match axis {
                Axis::X => &self.x_by_rank,
                Axis::Y => &self.y_by_rank,
            };
            let mut max_coord = Vec::with_capacity(order.len());
            for (pos, &l) in order.iter().enumerate() {
                num[l] = pos + 1;
                max_coord.push(by_rank[self.lines(axis)[l].hi - 1]);
            }
            (num, max_coord)
        };
        let (col_num, col_max_x) = number(Axis::X);
        let (row_num, row_max_y) = number(Axis::Y);
        let mut points = Vec::new();
        let mut representatives = Vec::new();
        for cell in self.cells.iter().filter(|c| c.alive) {
            points.push(Point::new(col_num[cell.col], row_num[cell.row]));
            representatives.push(self.representative[cell.head]);
        }
        DenseCells {
            cells: PointSet::from_distinct(col_max_x.len(), row_max_y.len(), points),
            representatives,
            col_max_x,
            row_max_y,
        }
    }

    /// Checks the loop invariants: rectangles lie inside their cells (C1), line sizes are
    /// consistent and at most `d` (C2), consecutive lines exceed `d` together (C3, C4), the
    /// family is d-wide (C5), and the large-cell list covers every cell with two rectangles.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut counted = 0;
        for axis in Axis::BOTH {
            let order = self.line_order(axis);
            let lines = self.lines(axis);
            let mut expected_lo = 1;
            for (pos, &l) in order.iter().enumerate() {
                let line = &lines[l];
                if line.lo != expected_lo {
                    return Err(format!("{axis:?} line {l} starts at rank {} not {expected_lo}", line.lo));
                }
                expected_lo = line.hi + 1;
                let total: usize = line
                    .cells
                    .iter()
                    .filter(|&&c| self.cells[c].alive)
                    .map(|&c| self.cells[c].len)
                    .sum();
                if total != line.size {
                    return Err(format!("{axis:?} line {l} caches size {} but holds {total}", line.size));
                }
                if line.size > self.d {
                    return Err(format!("{axis:?} line {l} holds {} > d rectangles", line.size));
                }
                if pos + 1 < order.len() && line.size + lines[order[pos + 1]].size <= self.d {
                    return Err(format!("{axis:?} lines {l} and {} fit together", order[pos + 1]));
                }
            }
            if expected_lo != self.n + 1 {
                return Err(format!("{axis:?} lines do not cover all ranks"));
            }
        }
        let mut live = Vec::new();
        for (c, cell) in self.cells.iter().enumerate().filter(|(_, c)| c.alive) {
            let (col, row) = (&self.cols[cell.col], &self.rows[cell.row]);
            for r in self.rects_of(cell) {
                let b = self.boxes[r];
                if b[0].0 < col.lo || b[0].1 > col.hi || b[1].0 < row.lo || b[1].1 > row.hi {
                    return Err(format!("rectangle {r} leaves cell {c}"));
                }
                live.push(r);
            }
            counted += cell.len;
            if self.rects_of(cell).count() != cell.len {
                return Err(format!("cell {c} list length differs from its count"));
            }
            if cell.len >= 2 && !(cell.queued && self.large.contains(&c)) {
                return Err(format!("large cell {c} missing from the list"));
            }
        }
        if counted != self.live_rects {
            return Err(format!("cells hold {counted} rectangles, expected {}", self.live_rects));
        }
        for &r in &live {
            for axis in 0..2 {
                let (lo, hi) = self.boxes[r][axis];
                let views = live
                    .iter()
                    .filter(|&&o| o != r && self.boxes[o][axis].0 <= hi && lo <= self.boxes[o][axis].1)
                    .count();
                if views >= self.d {
                    return Err(format!("rectangle {r} views {views} others"));
                }
            }
        }
        Ok(())
    }
}
