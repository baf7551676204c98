//! Points, discrete intervals, axis-parallel rectangles and indexed rectangle families.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A point with positive integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: usize,
    pub y: usize,
}

impl Point {
    pub const fn new(x: usize, y: usize) -> Self {
        Point { x, y }
    }

    /// Coordinate along axis `alpha` (1 = horizontal, 2 = vertical).
    pub fn coord(&self, alpha: Axis) -> usize {
        match alpha {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }

    pub fn transpose(&self) -> Point {
        Point::new(self.y, self.x)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

/// One of the two coordinate axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];
}

/// Discrete closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("interval [{lo},{hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub const fn point(v: usize) -> Self {
        Interval { lo: v, hi: v }
    }

    /// `self < other`: every element of `self` is below every element of `other`.
    pub fn precedes(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_value(&self, v: usize) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// Axis-parallel rectangle `ix × iy`; degenerate rectangles represent points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rectangle {
    pub ix: Interval,
    pub iy: Interval,
}

impl Rectangle {
    pub const fn from_point(p: Point) -> Self {
        Rectangle {
            ix: Interval::point(p.x),
            iy: Interval::point(p.y),
        }
    }

    pub fn interval(&self, alpha: Axis) -> Interval {
        match alpha {
            Axis::X => self.ix,
            Axis::Y => self.iy,
        }
    }

    /// Smallest rectangle enclosing both.
    pub fn bounding_box(&self, other: &Rectangle) -> Rectangle {
        Rectangle {
            ix: self.ix.hull(&other.ix),
            iy: self.iy.hull(&other.iy),
        }
    }

    /// The two rectangles α-view each other: their `alpha` projections intersect.
    pub fn views_along(&self, other: &Rectangle, alpha: Axis) -> bool {
        self.interval(alpha).intersects(&other.interval(alpha))
    }

    /// The two rectangles α-view each other for some axis.
    pub fn views(&self, other: &Rectangle) -> bool {
        self.ix.intersects(&other.ix) || self.iy.intersects(&other.iy)
    }

    pub fn contains_point(&self, p: Point) -> bool {
        self.ix.contains_value(p.x) && self.iy.contains_value(p.y)
    }
}

/// Indexed set of rectangles.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RectangleFamily {
    entries: BTreeMap<usize, Rectangle>,
}

impl RectangleFamily {
    pub fn new() -> Self {
        Self::default()
    }

    /// The family of degenerate rectangles of a permutation, indexed by label.
    pub fn from_permutation(pi: &crate::Permutation) -> Self {
        RectangleFamily {
            entries: pi
                .iter()
                .map(|(label, p)| (label, Rectangle::from_point(p)))
                .collect(),
        }
    }

    pub fn insert(&mut self, index: usize, rect: Rectangle) -> Result<()> {
        if self.entries.contains_key(&index) {
            return Err(Error::Domain(format!("index {index} already present")));
        }
        self.entries.insert(index, rect);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Rectangle> {
        self.entries.get(&index)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.entries.contains_key(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rectangle)> + '_ {
        self.entries.iter().map(|(&i, r)| (i, r))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// Number of other rectangles that α-view rectangle `index` along `alpha`.
    pub fn view_along(&self, index: usize, alpha: Axis) -> Option<usize> {
        let r = self.entries.get(&index)?;
        Some(
            self.entries
                .iter()
                .filter(|(&i, o)| i != index && r.views_along(o, alpha))
                .count(),
        )
    }

    /// `view(R, i)`: the larger of the two per-axis view counts.
    pub fn view(&self, index: usize) -> Option<usize> {
        Some(self.view_along(index, Axis::X)?.max(self.view_along(index, Axis::Y)?))
    }

    /// Every rectangle has view count below `d`.
    pub fn is_wide(&self, d: usize) -> bool {
        self.entries
            .keys()
            .all(|&i| self.view(i).is_some_and(|v| v < d))
    }

    /// `R[i, j -> k]`: replaces `i` and `j` by their bounding box under index `k`.
    pub fn merge(&self, i: usize, j: usize, k: usize) -> Result<RectangleFamily> {
        let mut next = self.clone();
        next.merge_in_place(i, j, k)?;
        Ok(next)
    }

    pub fn merge_in_place(&mut self, i: usize, j: usize, k: usize) -> Result<()> {
        if i == j {
            return Err(Error::Domain(format!("cannot merge index {i} with itself")));
        }
        if self.entries.contains_key(&k) {
            return Err(Error::Domain(format!("new index {k} already present")));
        }
        let ri = *self
            .entries
            .get(&i)
            .ok_or_else(|| Error::Domain(format!("index {i} not in family")))?;
        let rj = *self
            .entries
            .get(&j)
            .ok_or_else(|| Error::Domain(format!("index {j} not in family")))?;
        self.entries.remove(&i);
        self.entries.remove(&j);
        self.entries.insert(k, ri.bounding_box(&rj));
        Ok(())
    }
}

/// `merge_family(R, i, j, k)`.
pub fn merge_family(family: &RectangleFamily, i: usize, j: usize, k: usize) -> Result<RectangleFamily> {
    family.merge(i, j, k)
}
