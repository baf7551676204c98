//! Permutations as labelled point sets in general position, and constructions on them.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::geometry::Point;

/// Element label of a permutation.
pub type Label = usize;

/// A permutation `(S, P)`: a finite set of positive labels placed injectively in general position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Permutation {
    // Sorted ascending; points[i] is the placement of labels[i].
    labels: Vec<Label>,
    points: Vec<Point>,
}

impl Permutation {
    /// Builds a permutation from `(label, point)` pairs, rejecting repeated labels,
    /// zero labels or coordinates, and repeated x or y coordinates.
    pub fn new(mut entries: Vec<(Label, Point)>) -> Result<Self> {
        entries.sort_unstable_by_key(|&(l, _)| l);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Domain(format!("label {} appears twice", w[0].0)));
            }
        }
        if let Some(&(l, p)) = entries.iter().find(|(l, p)| *l == 0 || p.x == 0 || p.y == 0) {
            return Err(Error::Domain(format!(
                "label {l} at ({},{}) is not positive",
                p.x, p.y
            )));
        }
        check_general_position(entries.iter().map(|&(_, p)| p))?;
        let (labels, points) = entries.into_iter().unzip();
        Ok(Permutation { labels, points })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The reduced permutation with one-line notation `values`, i.e. placement(i) = (i, values[i-1]).
    pub fn from_one_line(values: &[usize]) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in values {
            if v == 0 || v > n {
                return Err(Error::Domain(format!("value {v} outside 1..{n}")));
            }
            if seen[v] {
                return Err(Error::Domain(format!("value {v} appears twice")));
            }
            seen[v] = true;
        }
        Ok(Permutation {
            labels: (1..=n).collect(),
            points: values
                .iter()
                .enumerate()
                .map(|(i, &v)| Point::new(i + 1, v))
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels in ascending order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Placements aligned with [`Permutation::labels`].
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, Point)> + '_ {
        self.labels.iter().copied().zip(self.points.iter().copied())
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.index_of(label).is_some()
    }

    pub fn point(&self, label: Label) -> Option<Point> {
        self.index_of(label).map(|i| self.points[i])
    }

    pub fn max_label(&self) -> Label {
        self.labels.last().copied().unwrap_or(0)
    }

    /// Labels are exactly `1..=n`.
    pub fn has_standard_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l == i + 1)
    }

    /// Labels are `1..=n` and every coordinate lies in `1..=n`.
    pub fn is_reduced(&self) -> bool {
        let n = self.len();
        self.has_standard_labels() && self.points.iter().all(|p| p.x <= n && p.y <= n)
    }

    /// Entries sorted by x-coordinate.
    pub fn by_x(&self) -> Vec<(Label, Point)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by_key(|&(_, p)| p.x);
        v
    }

    /// 1-based x-ranks and y-ranks aligned with [`Permutation::labels`].
    pub fn ranks(&self) -> (Vec<usize>, Vec<usize>) {
        (
            ranks_of(self.points.iter().map(|p| p.x)),
            ranks_of(self.points.iter().map(|p| p.y)),
        )
    }

    /// One-line notation of the reduced pattern: y-ranks listed in x order.
    pub fn one_line(&self) -> Vec<usize> {
        let (xr, yr) = self.ranks();
        let mut out = vec![0; self.len()];
        for (i, &x) in xr.iter().enumerate() {
            out[x - 1] = yr[i];
        }
        out
    }

    /// The reduced permutation that is pattern-equivalent to `self`, together with
    /// the original label of every reduced label (`origin[l - 1]`).
    pub fn standardize(&self) -> (Permutation, Vec<Label>) {
        let by_x = self.by_x();
        let reduced = Permutation::from_one_line(&self.one_line()).expect("ranks form a bijection");
        (reduced, by_x.into_iter().map(|(l, _)| l).collect())
    }

    /// Pattern equality: same one-line notation after reduction.
    pub fn same_pattern(&self, other: &Permutation) -> bool {
        self.one_line() == other.one_line()
    }

    /// The permutation obtained by exchanging the two coordinates of every point.
    pub fn transpose(&self) -> Permutation {
        Permutation {
            labels: self.labels.clone(),
            points: self.points.iter().map(Point::transpose).collect(),
        }
    }
}

impl fmt::Display for Permutation {
    /// One-line notation of the reduced pattern.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = self.one_line();
        for (i, v) in line.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn ranks_of(values: impl Iterator<Item = usize>) -> Vec<usize> {
    let values: Vec<usize> = values.collect();
    // Distinct values inside 1..=n are their own ranks.
    if values.iter().all(|&v| (1..=values.len()).contains(&v)) {
        return values;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&i| values[i]);
    let mut ranks = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

fn check_general_position(points: impl Iterator<Item = Point>) -> Result<()> {
    let mut xs = HashSet::new();
    let mut ys = HashSet::new();
    for p in points {
        if !xs.insert(p.x) {
            return Err(Error::GeneralPosition(format!("x-coordinate {} repeated", p.x)));
        }
        if !ys.insert(p.y) {
            return Err(Error::GeneralPosition(format!("y-coordinate {} repeated", p.y)));
        }
    }
    Ok(())
}

/// Parses one-line notation: whitespace-separated values forming a bijection on `1..=n`, `n >= 1`.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(parse_err("", "empty permutation"));
    }
    let n = tokens.len();
    let mut seen = vec![false; n + 1];
    let mut values = Vec::with_capacity(n);
    for tok in &tokens {
        let v: usize = tok
            .parse()
            .map_err(|_| parse_err(*tok, "not a positive integer"))?;
        if v == 0 || v > n {
            return Err(parse_err(*tok, format!("value outside 1..{n}")));
        }
        if seen[v] {
            return Err(parse_err(*tok, "duplicate value"));
        }
        seen[v] = true;
        values.push(v);
    }
    Permutation::from_one_line(&values)
}

/// Coordinate-compresses points in general position to a reduced permutation (labels by x-rank).
pub fn reduce(points: &[Point]) -> Result<Permutation> {
    check_general_position(points.iter().copied())?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by_key(|&i| points[i].x);
    let yr = ranks_of(points.iter().map(|p| p.y));
    let values: Vec<usize> = order.iter().map(|&i| yr[i]).collect();
    Permutation::from_one_line(&values)
}

/// `π | S'`, keeping original labels and coordinates.
pub fn restrict(pi: &Permutation, subset: &[Label]) -> Result<Permutation> {
    let mut entries = Vec::with_capacity(subset.len());
    for &l in subset {
        let p = pi
            .point(l)
            .ok_or_else(|| Error::Domain(format!("label {l} not in permutation")))?;
        entries.push((l, p));
    }
    Permutation::new(entries)
}

/// Label of the grid element `p_{i,j}` (row `i` in `1..=s`, column `j` in `1..=r`) of
/// [`canonical_grid`]`(r, s)`.
pub fn canonical_grid_label(r: usize, s: usize, i: usize, j: usize) -> Label {
    debug_assert!((1..=s).contains(&i) && (1..=r).contains(&j));
    (j - 1) * s + (s - i + 1)
}

/// The canonical `r × s` grid permutation on points `((j-1)s + (s-i+1), (i-1)r + j)`.
pub fn canonical_grid(r: usize, s: usize) -> Result<Permutation> {
    if r == 0 || s == 0 {
        return Err(Error::Domain(format!("grid dimensions {r}x{s} must be positive")));
    }
    let mut values = vec![0; r * s];
    for i in 1..=s {
        for j in 1..=r {
            values[canonical_grid_label(r, s, i, j) - 1] = (i - 1) * r + j;
        }
    }
    Permutation::from_one_line(&values)
}

/// `π[x ← π']`: replaces element `x` by a copy of `π'`.
///
/// Labels of `π` other than `x` are kept; the elements of `π'` receive fresh labels
/// `max(S(π)) + rank`, where `rank` is their position in ascending label order of `π'`.
/// Coordinates of the result are reduced.
pub fn substitute(pi: &Permutation, x: Label, inner: &Permutation) -> Result<Permutation> {
    if !pi.contains(x) {
        return Err(Error::Domain(format!("label {x} not in permutation")));
    }
    let fresh_base = pi.max_label();
    let fresh = |idx: usize| fresh_base + idx + 1;
    let xp = pi.point(x).expect("checked above");

    let mut entries: Vec<(Label, Point)> = Vec::with_capacity(pi.len() + inner.len());
    // Order along one axis: outer elements by their coordinate, with the inner block
    // spliced in at x's position and ordered internally by the inner coordinate.
    let axis_order = |outer: fn(&Point) -> usize| -> Vec<Label> {
        let mut outer_items: Vec<(usize, Label)> = pi
            .iter()
            .filter(|&(l, _)| l != x)
            .map(|(l, p)| (outer(&p), l))
            .collect();
        outer_items.sort_unstable();
        let mut inner_items: Vec<(usize, Label)> = inner
            .iter()
            .enumerate()
            .map(|(idx, (_, p))| (outer(&p), fresh(idx)))
            .collect();
        inner_items.sort_unstable();
        let split = outer_items.partition_point(|&(c, _)| c < outer(&xp));
        let mut order: Vec<Label> = outer_items[..split].iter().map(|&(_, l)| l).collect();
        order.extend(inner_items.iter().map(|&(_, l)| l));
        order.extend(outer_items[split..].iter().map(|&(_, l)| l));
        order
    };
    let xs = axis_order(|p| p.x);
    let ys = axis_order(|p| p.y);
    let mut coords = std::collections::HashMap::new();
    for (rank, &l) in xs.iter().enumerate() {
        coords.insert(l, Point::new(rank + 1, 0));
    }
    for (rank, &l) in ys.iter().enumerate() {
        coords.get_mut(&l).expect("same label sets").y = rank + 1;
    }
    entries.extend(coords);
    Permutation::new(entries)
}

/// Uniformly random reduced permutation of length `n` (seeded Fisher–Yates).
pub fn random_permutation(n: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<usize> = (1..=n).collect();
    values.shuffle(&mut rng);
    Permutation::from_one_line(&values).expect("shuffle of 1..=n")
}

/// Random separable permutation of length `n`: a monotone permutation of random length
/// whose elements are inflated by recursively generated separable blocks. Directions
/// alternate between levels so that nested blocks never collapse into their parent.
pub fn random_separable(n: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n);
    let increasing = rng.gen_bool(0.5);
    separable_values(n, 0, increasing, &mut rng, &mut values);
    Permutation::from_one_line(&values).expect("blocks tile 1..=n")
}

fn separable_values(n: usize, offset: usize, increasing: bool, rng: &mut ChaCha8Rng, out: &mut Vec<usize>) {
    if n <= 1 {
        if n == 1 {
            out.push(offset + 1);
        }
        return;
    }
    let parts = rng.gen_range(2..=n.min(4));
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        sizes.push(c - prev);
        prev = c;
    }
    let mut below = if increasing { 0 } else { n };
    for size in sizes {
        let block_offset = if increasing {
            below += size;
            below - size
        } else {
            below -= size;
            below
        };
        separable_values(size, offset + block_offset, !increasing, rng, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Permutation {
        parse_permutation(s).unwrap()
    }

    #[test]
    fn parse_reads_one_line_notation() {
        let p = perm("3 2 7 8 4 6 1 5");
        assert_eq!(p.len(), 8);
        assert_eq!(p.point(1), Some(Point::new(1, 3)));
        assert!(p.is_reduced());
        assert_eq!(perm("1").len(), 1);
    }

    #[test]
    fn parse_errors_name_the_token() {
        match parse_permutation("2 2") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "2"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_permutation("1 x") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "x"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_permutation("1 5") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "5"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_permutation("  "), Err(Error::Parse { .. })));
    }

    #[test]
    fn reduce_compresses_coordinates() {
        let p = reduce(&[Point::new(10, 5), Point::new(20, 90)]).unwrap();
        assert_eq!(p.to_string(), "1 2");
        let grid = [Point::new(2, 1), Point::new(4, 2), Point::new(1, 3), Point::new(3, 4)];
        assert_eq!(reduce(&grid).unwrap().to_string(), "3 1 4 2");
        assert_eq!(reduce(&[Point::new(7, 7)]).unwrap().to_string(), "1");
        assert!(matches!(
            reduce(&[Point::new(1, 1), Point::new(1, 2)]),
            Err(Error::GeneralPosition(_))
        ));
    }

    #[test]
    fn restrict_keeps_labels_and_pattern() {
        let p = perm("3 2 1 5 6 7 4");
        let r = restrict(&p, &[3, 4, 7]).unwrap();
        assert_eq!(r.labels(), &[3, 4, 7]);
        assert_eq!(r.to_string(), "1 3 2");
        assert_eq!(restrict(&p, p.labels()).unwrap(), p);
        assert!(restrict(&p, &[]).unwrap().is_empty());
        assert!(restrict(&p, &[9]).is_err());
    }

    #[test]
    fn canonical_grid_matches_formula() {
        assert_eq!(canonical_grid(1, 1).unwrap().to_string(), "1");
        assert_eq!(canonical_grid(2, 2).unwrap().to_string(), "3 1 4 2");
        let g = canonical_grid(5, 5).unwrap();
        assert_eq!(g.len(), 25);
        // p_{i,j} sits at ((j-1)s + (s-i+1), (i-1)r + j).
        for i in 1..=5 {
            for j in 1..=5 {
                let label = canonical_grid_label(5, 5, i, j);
                assert_eq!(g.point(label), Some(Point::new((j - 1) * 5 + 6 - i, (i - 1) * 5 + j)));
            }
        }
        assert!(canonical_grid(0, 3).is_err());
    }

    #[test]
    fn substitute_follows_relations() {
        let r = substitute(&perm("1 2"), 2, &perm("2 1")).unwrap();
        assert_eq!(r.to_string(), "1 3 2");
        let r = substitute(&perm("2 1"), 1, &perm("1 2")).unwrap();
        assert_eq!(r.to_string(), "2 3 1");
        let p = perm("3 1 4 2");
        assert!(substitute(&p, 3, &perm("1")).unwrap().same_pattern(&p));
        assert!(substitute(&p, 9, &perm("1")).is_err());
    }

    #[test]
    fn random_permutation_is_deterministic() {
        assert!(random_permutation(0, 3).is_empty());
        assert_eq!(random_permutation(5, 11), random_permutation(5, 11));
        assert!(random_permutation(50, 1).is_reduced());
    }

    #[test]
    fn random_permutation_histogram_within_three_sigma() {
        let mut counts = std::collections::HashMap::new();
        for seed in 0..6000u64 {
            *counts.entry(random_permutation(3, seed).one_line()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let sigma = (6000.0f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for (pattern, &c) in &counts {
            assert!(
                (c as f64 - 1000.0).abs() <= 3.0 * sigma,
                "{pattern:?} drawn {c} times"
            );
        }
    }

    #[test]
    fn separable_generator_produces_permutations() {
        for seed in 0..20 {
            let p = random_separable(30, seed);
            assert!(p.is_reduced());
            assert_eq!(p.len(), 30);
        }
    }
}
