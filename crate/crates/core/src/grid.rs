//! Grid witnesses: an `r × r` gridding together with one occupied point per cell.

use std::collections::HashSet;
use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::geometry::Point;
use crate::perm::Permutation;

/// An `r × r` gridding given by `r - 1` column cuts and `r - 1` row cuts, with a witness
/// point for every cell.
///
/// Column `c` (1-based) holds the x-coordinates in `(col_cuts[c-2], col_cuts[c-1]]`, with the
/// first column unbounded below and the last unbounded above; rows likewise. Witnesses are
/// stored row-major, row 1 at the bottom and column 1 on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWitness {
    pub col_cuts: Vec<usize>,
    pub row_cuts: Vec<usize>,
    pub witnesses: Vec<Point>,
}

impl GridWitness {
    /// Side length `r`.
    pub fn size(&self) -> usize {
        self.col_cuts.len() + 1
    }

    /// Witness of the cell in column `col` and row `row` (both 1-based).
    pub fn witness(&self, col: usize, row: usize) -> Point {
        self.witnesses[(row - 1) * self.size() + (col - 1)]
    }

    pub fn check_shape(&self, r: usize) -> Result<()> {
        let bad = |reason: String| Error::Malformed {
            what: "grid witness",
            reason,
        };
        if r == 0 {
            return Err(bad("grid size must be positive".to_string()));
        }
        if self.col_cuts.len() + 1 != r || self.row_cuts.len() + 1 != r {
            return Err(bad(format!(
                "expected {} cuts per axis for r = {r}, found {} column and {} row cuts",
                r - 1,
                self.col_cuts.len(),
                self.row_cuts.len()
            )));
        }
        if self.witnesses.len() != r * r {
            return Err(bad(format!(
                "expected {} witness points, found {}",
                r * r,
                self.witnesses.len()
            )));
        }
        Ok(())
    }

    /// Exchanges the roles of the two axes.
    pub fn transpose(&self) -> GridWitness {
        let r = self.size();
        let mut witnesses = Vec::with_capacity(r * r);
        for row in 1..=r {
            for col in 1..=r {
                witnesses.push(self.witness(row, col).transpose());
            }
        }
        GridWitness {
            col_cuts: self.row_cuts.clone(),
            row_cuts: self.col_cuts.clone(),
            witnesses,
        }
    }

    /// Parses "cols: c1 ...", "rows: d1 ...", then `r²` lines "x y".
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut cuts = |prefix: &str| -> Result<Vec<usize>> {
            let line = lines
                .next()
                .ok_or_else(|| parse_err("", format!("missing \"{prefix}\" line")))?;
            let rest = line
                .strip_prefix(prefix)
                .ok_or_else(|| parse_err(line, format!("expected \"{prefix}\"")))?;
            rest.split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(t, "not a coordinate")))
                .collect()
        };
        let col_cuts = cuts("cols:")?;
        let row_cuts = cuts("rows:")?;
        let mut witnesses = Vec::new();
        for line in lines {
            witnesses.push(parse_point(line)?);
        }
        let w = GridWitness {
            col_cuts,
            row_cuts,
            witnesses,
        };
        w.check_shape(w.size())?;
        Ok(w)
    }
}

pub(crate) fn parse_point(line: &str) -> Result<Point> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(line, "expected \"x y\""));
    }
    let x = toks[0].parse().map_err(|_| parse_err(toks[0], "not a coordinate"))?;
    let y = toks[1].parse().map_err(|_| parse_err(toks[1], "not a coordinate"))?;
    Ok(Point::new(x, y))
}

impl fmt::Display for GridWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|c| format!(" {c}"))
                .collect::<String>()
        };
        writeln!(f, "cols:{}", join(&self.col_cuts))?;
        writeln!(f, "rows:{}", join(&self.row_cuts))?;
        for p in &self.witnesses {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// 1-based index of the slab that `v` falls into for increasing `cuts`.
pub(crate) fn slab_of(cuts: &[usize], v: usize) -> usize {
    cuts.partition_point(|&c| c < v) + 1
}

/// Checks a grid witness against an arbitrary point set.
pub fn verify_grid_points(points: &[Point], w: &GridWitness, r: usize) -> Result<bool> {
    w.check_shape(r)?;
    let increasing = |c: &[usize]| c.windows(2).all(|p| p[0] < p[1]);
    if !increasing(&w.col_cuts) || !increasing(&w.row_cuts) {
        return Ok(false);
    }
    for row in 1..=r {
        for col in 1..=r {
            let p = w.witness(col, row);
            if slab_of(&w.col_cuts, p.x) != col || slab_of(&w.row_cuts, p.y) != row {
                return Ok(false);
            }
        }
    }
    // One pass over the points marks the witnesses that occur.
    let mut missing: HashSet<Point> = w.witnesses.iter().copied().collect();
    for p in points {
        if missing.is_empty() {
            break;
        }
        missing.remove(p);
    }
    Ok(missing.is_empty())
}

/// `verify_grid(π, w, r)`: cuts increase, every witness is a point of `π` lying in its cell.
pub fn verify_grid(pi: &Permutation, w: &GridWitness, r: usize) -> Result<bool> {
    verify_grid_points(pi.points(), w, r)
}
