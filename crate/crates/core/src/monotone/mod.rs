//! Pattern matching in permutations split into few monotone sequences.
//!
//! When every pattern label is told which monotone class of the text it must map into,
//! each label's image is a position inside its class. Along either axis, the coordinates of
//! a class are monotone in the position, so every pairwise order constraint is a staircase
//! relation between two positions. Writing positions as threshold booleans ("position ≥ v")
//! turns those staircases into implications, and the whole problem into 2SAT. Trying every
//! class assignment of the pattern labels decides containment.

mod decomposition;
mod partition;
mod twosat;

pub use decomposition::monotone_decomposition;
pub use partition::{greedy_monotone_partition, Direction, MonotoneClass, MonotonePartition};
pub use twosat::{Literal, TwoSat};

use crate::embedding::{verify_embedding, Embedding};
use crate::error::{Error, Result};
use crate::geometry::{Axis, Point};
use crate::par::Execution;
use crate::perm::{Label, Permutation};

/// Class index (0-based, into the text's partition) of every pattern label, listed in the
/// order of the pattern's labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternAssignment {
    pub classes: Vec<usize>,
}

impl PatternAssignment {
    /// The `index`-th assignment in base-`t` counting order, the first label being the
    /// least significant digit.
    pub fn from_index(mut index: u64, len: usize, t: usize) -> PatternAssignment {
        let classes = (0..len)
            .map(|_| {
                let digit = (index % t as u64) as usize;
                index /= t as u64;
                digit
            })
            .collect();
        PatternAssignment { classes }
    }
}

/// A pairwise constraint: the images of `first` and `second` must be ordered along `axis`
/// as the pattern orders them (`first` before `second`). `allowed` lists the permitted
/// image pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub first: Label,
    pub second: Label,
    pub axis: Axis,
    pub allowed: Vec<(Label, Label)>,
}

/// The constraints for mapping pattern labels into prescribed classes, with explicit
/// relations. Intended for checking properties on small inputs.
pub fn build_csp(
    sigma: &Permutation,
    assignment: &PatternAssignment,
    pi: &Permutation,
    part: &MonotonePartition,
) -> Result<Vec<Constraint>> {
    check_assignment(sigma, assignment, part)?;
    let mut out = Vec::new();
    for (a, (x, px)) in sigma.iter().enumerate() {
        for (b, (y, py)) in sigma.iter().enumerate() {
            for axis in Axis::BOTH {
                if px.coord(axis) >= py.coord(axis) {
                    continue;
                }
                let allowed = part.classes[assignment.classes[a]]
                    .labels
                    .iter()
                    .flat_map(|&xi| part.classes[assignment.classes[b]].labels.iter().map(move |&yi| (xi, yi)))
                    .filter(|&(xi, yi)| coord(pi, xi, axis) < coord(pi, yi, axis))
                    .collect();
                out.push(Constraint { first: x, second: y, axis, allowed });
            }
        }
    }
    Ok(out)
}

fn coord(pi: &Permutation, label: Label, axis: Axis) -> usize {
    pi.point(label).expect("partition labels belong to the text").coord(axis)
}

/// Median of three labels of `pi` with respect to the order along `axis`.
pub fn mid(pi: &Permutation, a: Label, b: Label, c: Label, axis: Axis) -> Label {
    let mut v = [a, b, c];
    v.sort_unstable_by_key(|&l| coord(pi, l, axis));
    v[1]
}

fn check_assignment(sigma: &Permutation, assignment: &PatternAssignment, part: &MonotonePartition) -> Result<()> {
    if assignment.classes.len() != sigma.len() {
        return Err(Error::Domain(format!(
            "assignment has {} entries for a pattern of length {}",
            assignment.classes.len(),
            sigma.len()
        )));
    }
    if let Some(&c) = assignment.classes.iter().find(|&&c| c >= part.len()) {
        return Err(Error::Domain(format!("class index {c} out of range for {} classes", part.len())));
    }
    Ok(())
}

// Threshold encoding of one pattern label's position inside its class (1-based).
struct Threshold {
    // Variable of "position ≥ 2"; thresholds 2..=size use consecutive variables.
    base: usize,
    size: usize,
}

impl Threshold {
    // Literal "position ≥ v".
    fn at_least(&self, v: usize) -> Literal {
        if v <= 1 {
            Literal::True
        } else if v > self.size {
            Literal::False
        } else {
            Literal::Var { var: self.base + v - 2, positive: true }
        }
    }

    // Literal "u ≥ v" where u is the position counted along the axis order of the class:
    // u = position when coordinates increase with position, u = size + 1 − position
    // otherwise.
    fn along(&self, v: usize, ascending: bool) -> Literal {
        if ascending {
            self.at_least(v)
        } else if v <= 1 {
            Literal::True
        } else {
            // size + 1 − position ≥ v  ⟺  ¬(position ≥ size + 2 − v).
            self.at_least(self.size + 2 - v).negate()
        }
    }
}

/// An embedding of `sigma` into `pi` that maps each pattern label into its assigned class of
/// `part`, if one exists. `part` must be a valid partition of `pi`.
pub fn sigma_pi_embedding(
    sigma: &Permutation,
    assignment: &PatternAssignment,
    pi: &Permutation,
    part: &MonotonePartition,
) -> Result<Option<Embedding>> {
    check_assignment(sigma, assignment, part)?;
    let part = part.normalized(pi)?;
    Ok(solve_assignment(sigma, assignment, pi, &part))
}

// Coordinates of every class member along each axis, in class (x) order.
struct ClassCoords {
    coords: [Vec<usize>; 2],
    ascending: [bool; 2],
}

fn class_coords(pi: &Permutation, part: &MonotonePartition) -> Vec<ClassCoords> {
    part.classes
        .iter()
        .map(|class| {
            let pts: Vec<Point> = class.labels.iter().map(|&l| pi.point(l).expect("valid partition")).collect();
            ClassCoords {
                coords: [pts.iter().map(|p| p.x).collect(), pts.iter().map(|p| p.y).collect()],
                ascending: [true, class.direction == Direction::Increasing],
            }
        })
        .collect()
}

// The core solver; `part` is already normalized.
fn solve_assignment(
    sigma: &Permutation,
    assignment: &PatternAssignment,
    pi: &Permutation,
    part: &MonotonePartition,
) -> Option<Embedding> {
    let coords = class_coords(pi, part);
    solve_with_coords(sigma, assignment, pi, part, &coords)
}

fn solve_with_coords(
    sigma: &Permutation,
    assignment: &PatternAssignment,
    pi: &Permutation,
    part: &MonotonePartition,
    coords: &[ClassCoords],
) -> Option<Embedding> {
    let l = sigma.len();
    // Labels sharing a class must be monotone in the class's direction.
    let mut by_class: Vec<Vec<Point>> = vec![Vec::new(); part.len()];
    for (idx, p) in sigma.points().iter().enumerate() {
        by_class[assignment.classes[idx]].push(*p);
    }
    for (c, pts) in by_class.iter_mut().enumerate() {
        if pts.len() > part.classes[c].labels.len() {
            return None;
        }
        pts.sort_unstable_by_key(|p| p.x);
        let ok = pts.windows(2).all(|w| match part.classes[c].direction {
            Direction::Increasing => w[0].y < w[1].y,
            Direction::Decreasing => w[0].y > w[1].y,
        });
        if !ok {
            return None;
        }
    }
    let mut vars = 0;
    let thresholds: Vec<Threshold> = assignment
        .classes
        .iter()
        .map(|&c| {
            let size = part.classes[c].labels.len();
            let t = Threshold { base: vars, size };
            vars += size.saturating_sub(1);
            t
        })
        .collect();
    let mut sat = TwoSat::new(vars);
    for t in &thresholds {
        for v in 2..t.size {
            sat.implies(t.at_least(v + 1), t.at_least(v));
        }
    }
    let points = sigma.points();
    for a in 0..l {
        for b in 0..l {
            for (axis_idx, axis) in Axis::BOTH.into_iter().enumerate() {
                if points[a].coord(axis) >= points[b].coord(axis) {
                    continue;
                }
                let (ca, cb) = (&coords[assignment.classes[a]], &coords[assignment.classes[b]]);
                add_staircase(&mut sat, &thresholds[a], ca, &thresholds[b], cb, axis_idx);
            }
        }
    }
    let solution = sat.solve()?;
    let pairs: Vec<(Label, Label)> = (0..l)
        .map(|a| {
            let t = &thresholds[a];
            let pos = 1 + (2..=t.size)
                .filter(|&v| matches!(t.at_least(v), Literal::Var { var, .. } if solution[var]))
                .count();
            (sigma.labels()[a], part.classes[assignment.classes[a]].labels[pos - 1])
        })
        .collect();
    let phi = Embedding::new(pairs).ok()?;
    debug_assert!(verify_embedding(sigma, pi, &phi).unwrap_or(false));
    Some(phi)
}

// Constraint "image of a before image of b along the axis". In axis-order positions u (for
// a's class) and w (for b's class) both coordinate lists increase, so the allowed pairs are
// exactly w ≥ g(u) with g(u) the first w whose coordinate exceeds that of u. The frontier g
// is nondecreasing and found with two pointers.
fn add_staircase(sat: &mut TwoSat, ta: &Threshold, ca: &ClassCoords, tb: &Threshold, cb: &ClassCoords, axis: usize) {
    let along = |c: &ClassCoords, u: usize| {
        let list = &c.coords[axis];
        if c.ascending[axis] {
            list[u - 1]
        } else {
            list[list.len() - u]
        }
    };
    let (sa, sb) = (ta.size, tb.size);
    let mut w = 1;
    for u in 1..=sa {
        let cu = along(ca, u);
        while w <= sb && along(cb, w) <= cu {
            w += 1;
        }
        sat.implies(ta.along(u, ca.ascending[axis]), tb.along(w, cb.ascending[axis]));
    }
}

/// An embedding of `sigma` into `pi` found by trying every assignment of pattern labels to
/// the classes of `part` in base-`t` counting order; the first success is returned.
pub fn t_monotone_match(sigma: &Permutation, pi: &Permutation, part: &MonotonePartition) -> Result<Option<Embedding>> {
    t_monotone_match_with(sigma, pi, part, Execution::default())
}

/// [`t_monotone_match`] with an explicit execution mode.
pub fn t_monotone_match_with(
    sigma: &Permutation,
    pi: &Permutation,
    part: &MonotonePartition,
    execution: Execution,
) -> Result<Option<Embedding>> {
    let part = part.normalized(pi)?;
    let l = sigma.len();
    if l == 0 {
        return Err(Error::Domain("pattern must be nonempty".into()));
    }
    if l > pi.len() {
        return Ok(None);
    }
    let t = part.len();
    let count = u64::try_from(t)
        .ok()
        .and_then(|t| t.checked_pow(u32::try_from(l).ok()?))
        .ok_or_else(|| Error::Domain(format!("{t}^{l} class assignments overflow 64 bits")))?;
    let coords = class_coords(pi, &part);
    Ok(execution.find_map_first(count, |index| {
        let assignment = PatternAssignment::from_index(index, l, t);
        solve_with_coords(sigma, &assignment, pi, &part, &coords)
    }))
}

/// Containment using only polynomial space: a greedy monotone partition of `pi` followed
/// by [`t_monotone_match`].
pub fn poly_space_match(sigma: &Permutation, pi: &Permutation) -> Result<Option<Embedding>> {
    t_monotone_match(sigma, pi, &greedy_monotone_partition(pi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_match;
    use crate::perm::{parse_permutation, random_permutation};

    fn one_class(pi: &Permutation, direction: Direction) -> MonotonePartition {
        MonotonePartition {
            classes: vec![MonotoneClass { labels: pi.labels().to_vec(), direction }],
        }
    }

    #[test]
    fn single_class_cases() {
        let pi = parse_permutation("1 2 3").unwrap();
        let part = one_class(&pi, Direction::Increasing);
        let all_one = PatternAssignment { classes: vec![0, 0] };
        let up = parse_permutation("1 2").unwrap();
        assert!(sigma_pi_embedding(&up, &all_one, &pi, &part).unwrap().is_some());
        let down = parse_permutation("2 1").unwrap();
        assert!(sigma_pi_embedding(&down, &all_one, &pi, &part).unwrap().is_none());
    }

    #[test]
    fn cross_class_descent() {
        let pi = parse_permutation("2 1 4 3").unwrap();
        // Values {1, 4} sit at positions 2 and 3; values {2, 3} at positions 1 and 4.
        let part = MonotonePartition::parse("inc: 2 3\ninc: 1 4\n").unwrap();
        let sigma = parse_permutation("2 1").unwrap();
        for classes in [vec![0, 1], vec![1, 0], vec![0, 0], vec![1, 1]] {
            let a = PatternAssignment { classes: classes.clone() };
            let got = sigma_pi_embedding(&sigma, &a, &pi, &part).unwrap();
            let norm = part.normalized(&pi).unwrap();
            let expected = (1..=4).any(|x| {
                (1..=4).any(|y| {
                    x != y
                        && norm.classes[classes[0]].labels.contains(&x)
                        && norm.classes[classes[1]].labels.contains(&y)
                        && verify_embedding(&sigma, &pi, &Embedding::new(vec![(1, x), (2, y)]).unwrap()).unwrap()
                })
            });
            assert_eq!(got.is_some(), expected, "assignment {classes:?}");
        }
    }

    #[test]
    fn introductory_example() {
        let pi = parse_permutation("3 2 1 5 6 7 4").unwrap();
        let part = MonotonePartition::parse("dec: 1 2 3\ninc: 4 5 6\ninc: 7\n").unwrap();
        assert!(t_monotone_match(&parse_permutation("1 3 2").unwrap(), &pi, &part).unwrap().is_some());
        assert!(t_monotone_match(&parse_permutation("4 3 2 1").unwrap(), &pi, &part).unwrap().is_none());
        assert!(t_monotone_match(&parse_permutation("1").unwrap(), &pi, &part).unwrap().is_some());
    }

    #[test]
    fn poly_space_agrees_with_brute_force() {
        for seed in 0..80 {
            let n = 1 + seed as usize % 10;
            let pi = random_permutation(n, seed);
            for l in 1..=4 {
                let sigma = random_permutation(l, 1000 + seed * 7 + l as u64);
                let got = poly_space_match(&sigma, &pi).unwrap();
                assert_eq!(got.is_some(), brute_force_match(&sigma, &pi).is_some(), "σ={sigma} π={pi}");
                if let Some(phi) = got {
                    assert!(verify_embedding(&sigma, &pi, &phi).unwrap());
                }
            }
        }
        let pi = random_permutation(9, 5);
        assert!(poly_space_match(&pi, &pi).unwrap().is_some());
    }

    #[test]
    fn median_closure_on_small_instances() {
        for seed in 0..20 {
            let pi = random_permutation(7, seed);
            let part = greedy_monotone_partition(&pi).normalized(&pi).unwrap();
            let sigma = random_permutation(3, seed + 50);
            let t = part.len();
            for index in 0..(t as u64).pow(3) {
                let a = PatternAssignment::from_index(index, 3, t);
                for c in build_csp(&sigma, &a, &pi, &part).unwrap() {
                    for &(x1, y1) in &c.allowed {
                        for &(x2, y2) in &c.allowed {
                            for &(x3, y3) in &c.allowed {
                                for axis in Axis::BOTH {
                                    let m = (mid(&pi, x1, x2, x3, axis), mid(&pi, y1, y2, y3, axis));
                                    assert!(c.allowed.contains(&m));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn modes_agree() {
        let pi = random_permutation(12, 9);
        let part = greedy_monotone_partition(&pi);
        let sigma = parse_permutation("3 1 4 2").unwrap();
        assert_eq!(
            t_monotone_match_with(&sigma, &pi, &part, Execution::Sequential).unwrap(),
            t_monotone_match_with(&sigma, &pi, &part, Execution::Parallel).unwrap()
        );
    }
}
