//! Monotone partitions and greedy extraction of longest monotone subsequences.

use std::collections::HashSet;
use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::perm::{Label, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn tag(self) -> &'static str {
        match self {
            Direction::Increasing => "inc",
            Direction::Decreasing => "dec",
        }
    }
}

/// A set of labels on which the permutation is monotone, listed by increasing x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneClass {
    pub labels: Vec<Label>,
    pub direction: Direction,
}

/// A partition of a permutation's labels into monotone classes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonotonePartition {
    pub classes: Vec<MonotoneClass>,
}

impl MonotonePartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Checks that the classes are nonempty, cover every label of `pi` exactly once and are
    /// monotone in their stated direction. Sorts each class by x as a side effect.
    pub fn normalize(&mut self, pi: &Permutation) -> Result<()> {
        let mut seen = HashSet::new();
        for (c, class) in self.classes.iter_mut().enumerate() {
            if class.labels.is_empty() {
                return Err(Error::Domain(format!("class {} is empty", c + 1)));
            }
            let mut pts = Vec::with_capacity(class.labels.len());
            for &l in &class.labels {
                let p = pi
                    .point(l)
                    .ok_or_else(|| Error::Domain(format!("class {} names unknown label {l}", c + 1)))?;
                if !seen.insert(l) {
                    return Err(Error::Domain(format!("label {l} appears in two classes")));
                }
                pts.push((p, l));
            }
            pts.sort_unstable_by_key(|(p, _)| p.x);
            let ok = pts.windows(2).all(|w| match class.direction {
                Direction::Increasing => w[0].0.y < w[1].0.y,
                Direction::Decreasing => w[0].0.y > w[1].0.y,
            });
            if !ok {
                return Err(Error::Domain(format!(
                    "class {} is not {}",
                    c + 1,
                    match class.direction {
                        Direction::Increasing => "increasing",
                        Direction::Decreasing => "decreasing",
                    }
                )));
            }
            class.labels = pts.into_iter().map(|(_, l)| l).collect();
        }
        if seen.len() != pi.len() {
            return Err(Error::Domain(format!(
                "partition covers {} of {} labels",
                seen.len(),
                pi.len()
            )));
        }
        Ok(())
    }

    /// Validated copy with classes sorted by x.
    pub fn normalized(&self, pi: &Permutation) -> Result<MonotonePartition> {
        let mut out = self.clone();
        out.normalize(pi)?;
        Ok(out)
    }

    /// One class per line: `inc: l1 l2 …` or `dec: l1 l2 …`. Blank lines and `#` lines
    /// are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut classes = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (tag, rest) = line
                .split_once(':')
                .ok_or_else(|| parse_err(line, "expected `inc:` or `dec:` prefix"))?;
            let direction = match tag.trim() {
                "inc" => Direction::Increasing,
                "dec" => Direction::Decreasing,
                other => return Err(parse_err(other, "direction must be `inc` or `dec`")),
            };
            let labels = rest
                .split_whitespace()
                .map(|tok| tok.parse::<Label>().map_err(|_| parse_err(tok, "expected a label")))
                .collect::<Result<Vec<_>>>()?;
            classes.push(MonotoneClass { labels, direction });
        }
        Ok(MonotonePartition { classes })
    }
}

impl fmt::Display for MonotonePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for class in &self.classes {
            write!(f, "{}:", class.direction.tag())?;
            for l in &class.labels {
                write!(f, " {l}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// Prefix-maximum Fenwick tree over values 1..=n.
struct MaxFenwick {
    tree: Vec<usize>,
}

impl MaxFenwick {
    fn new(n: usize) -> Self {
        MaxFenwick { tree: vec![0; n + 1] }
    }

    fn raise(&mut self, mut i: usize, v: usize) {
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].max(v);
            i += i & i.wrapping_neg();
        }
    }

    fn prefix_max(&self, mut i: usize) -> usize {
        let mut best = 0;
        while i > 0 {
            best = best.max(self.tree[i]);
            i -= i & i.wrapping_neg();
        }
        best
    }
}

/// Positions of the lexicographically least longest increasing subsequence of `values`,
/// which must be a permutation of `1..=len`.
fn least_longest_increasing(values: &[usize]) -> Vec<usize> {
    let m = values.len();
    // longest[i]: longest increasing run starting at i. Scanning right to left and
    // indexing by reversed value turns "later and larger" into a prefix query.
    let mut longest = vec![0; m];
    let mut fen = MaxFenwick::new(m);
    for i in (0..m).rev() {
        let rev = m + 1 - values[i];
        longest[i] = 1 + fen.prefix_max(rev - 1);
        fen.raise(rev, longest[i]);
    }
    let mut need = longest.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(need);
    let mut last = 0;
    for (i, &len) in longest.iter().enumerate() {
        if need > 0 && len == need && values[i] > last {
            out.push(i);
            last = values[i];
            need -= 1;
        }
    }
    out
}

/// Repeatedly removes a longest monotone subsequence (increasing on ties) until nothing is
/// left. Each removal takes at least `⌈√m⌉` of the `m` remaining points, so at most
/// `2⌈√n⌉` classes result.
pub fn greedy_monotone_partition(pi: &Permutation) -> MonotonePartition {
    let mut remaining: Vec<(Label, usize)> = pi.by_x().into_iter().map(|(l, p)| (l, p.y)).collect();
    let mut classes = Vec::new();
    while !remaining.is_empty() {
        let m = remaining.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_unstable_by_key(|&i| remaining[i].1);
        let mut rank = vec![0; m];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r + 1;
        }
        let inc = least_longest_increasing(&rank);
        let flipped: Vec<usize> = rank.iter().map(|&r| m + 1 - r).collect();
        let dec = least_longest_increasing(&flipped);
        let (chosen, direction) = if dec.len() > inc.len() {
            (dec, Direction::Decreasing)
        } else {
            (inc, Direction::Increasing)
        };
        let mut take = vec![false; m];
        for &i in &chosen {
            take[i] = true;
        }
        classes.push(MonotoneClass {
            labels: chosen.iter().map(|&i| remaining[i].0).collect(),
            direction,
        });
        remaining = remaining
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !take[*i])
            .map(|(_, e)| e)
            .collect();
    }
    MonotonePartition { classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{parse_permutation, random_permutation};

    #[test]
    fn increasing_is_one_class() {
        let part = greedy_monotone_partition(&parse_permutation("1 2 3 4").unwrap());
        assert_eq!(part.len(), 1);
        assert_eq!(part.classes[0].direction, Direction::Increasing);
    }

    #[test]
    fn two_one_four_three() {
        let pi = parse_permutation("2 1 4 3").unwrap();
        let part = greedy_monotone_partition(&pi);
        assert_eq!(part.len(), 2);
        // Least positions first: 2 then 4 (labels 1 and 3), then labels 2 and 4.
        assert_eq!(part.classes[0].labels, vec![1, 3]);
        assert_eq!(part.classes[1].labels, vec![2, 4]);
        assert!(part.normalized(&pi).is_ok());
    }

    #[test]
    fn lis_is_lexicographically_least() {
        assert_eq!(least_longest_increasing(&[3, 1, 2, 5, 4]), vec![1, 2, 3]);
        assert_eq!(least_longest_increasing(&[2, 1]), vec![0]);
        assert_eq!(least_longest_increasing(&[]), Vec::<usize>::new());
    }

    #[test]
    fn class_count_bound() {
        for seed in 0..30 {
            let n = 1 + (seed as usize * 37) % 200;
            let pi = random_permutation(n, seed);
            let part = greedy_monotone_partition(&pi);
            let bound = 2 * (n as f64).sqrt().ceil() as usize;
            assert!(part.len() <= bound);
            assert!(part.normalized(&pi).is_ok());
        }
    }

    #[test]
    fn parse_and_validate() {
        let pi = parse_permutation("2 1 4 3").unwrap();
        let part = MonotonePartition::parse("inc: 3 1\n# comment\ndec: 2 4\n").unwrap();
        assert!(part.normalized(&pi).is_err());
        let part = MonotonePartition::parse("inc: 3 1\ninc: 2 4\n").unwrap();
        let norm = part.normalized(&pi).unwrap();
        assert_eq!(norm.classes[0].labels, vec![1, 3]);
        assert_eq!(norm.to_string(), "inc: 1 3\ninc: 2 4\n");
        assert!(MonotonePartition::parse("up: 1").is_err());
        assert!(MonotonePartition::parse("inc: 1\ninc: 1 2 3 4").unwrap().normalized(&pi).is_err());
        assert!(MonotonePartition::parse("inc: 1 3").unwrap().normalized(&pi).is_err());
    }
}
