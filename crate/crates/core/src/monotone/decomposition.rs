//! Bounded-width decompositions of permutations with a `t`-monotone partition.
//!
//! Rectangles of one class stay monotone as consecutive members are merged. A rectangle
//! *pins* a candidate pair along an axis when its projection lies inside the pair's
//! enclosing projection. Averaging shows some pair has at most `4(t − 1)` pins on both axes;
//! merging it creates a rectangle that views at most `6(t − 1)` others.

use crate::error::Result;
use crate::merge::{require_standard_labels, MergeSequence, MergeStep};
use crate::perm::Permutation;

use super::partition::MonotonePartition;

// Debug builds recount every pin after each merge up to this size.
const RECOUNT_LIMIT: usize = 64;

type RankBox = [(usize, usize); 2];

fn hull(a: &RankBox, b: &RankBox) -> RankBox {
    [
        (a[0].0.min(b[0].0), a[0].1.max(b[0].1)),
        (a[1].0.min(b[1].0), a[1].1.max(b[1].1)),
    ]
}

fn inside(inner: (usize, usize), outer: (usize, usize)) -> bool {
    outer.0 <= inner.0 && inner.1 <= outer.1
}

struct State {
    boxes: Vec<RankBox>,
    // Rectangle indices of each class in x order.
    classes: Vec<Vec<usize>>,
    // pins[c][p]: pin counts of the pair (classes[c][p], classes[c][p + 1]).
    pins: Vec<Vec<[usize; 2]>>,
}

impl State {
    fn live(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes.iter().flatten().copied()
    }

    fn count_pins(&self, a: usize, b: usize) -> [usize; 2] {
        let h = hull(&self.boxes[a], &self.boxes[b]);
        let mut pins = [0; 2];
        for r in self.live().filter(|&r| r != a && r != b) {
            for (axis, pin) in pins.iter_mut().enumerate() {
                if inside(self.boxes[r][axis], h[axis]) {
                    *pin += 1;
                }
            }
        }
        pins
    }

    fn pins_are_fresh(&self) -> bool {
        self.classes
            .iter()
            .zip(&self.pins)
            .all(|(list, pins)| list.windows(2).zip(pins).all(|(w, &p)| self.count_pins(w[0], w[1]) == p))
    }

    // Pair with the smallest larger pin count; ties go to the lower class, then the
    // leftmost pair.
    fn best_pair(&self) -> Option<(usize, usize, [usize; 2])> {
        let mut best: Option<(usize, usize, [usize; 2])> = None;
        for (c, list) in self.pins.iter().enumerate() {
            for (p, &pins) in list.iter().enumerate() {
                let score = pins[0].max(pins[1]);
                if best.is_none_or(|(_, _, b)| score < b[0].max(b[1])) {
                    best = Some((c, p, pins));
                }
            }
        }
        best
    }
}

/// A `(6t − 5)`-wide merge sequence of `pi` built from a `t`-monotone partition of it.
/// Labels of `pi` must be `1..=n`.
pub fn monotone_decomposition(pi: &Permutation, part: &MonotonePartition) -> Result<MergeSequence> {
    require_standard_labels(pi)?;
    let part = part.normalized(pi)?;
    let n = pi.len();
    let t = part.len();
    let (xr, yr) = pi.ranks();
    let mut boxes = Vec::with_capacity(2 * n);
    boxes.push([(0, 0); 2]);
    boxes.extend((0..n).map(|i| [(xr[i], xr[i]), (yr[i], yr[i])]));
    let mut state = State {
        boxes,
        classes: part.classes.iter().map(|c| c.labels.clone()).collect(),
        pins: Vec::new(),
    };
    state.pins = state
        .classes
        .iter()
        .map(|list| list.windows(2).map(|w| state.count_pins(w[0], w[1])).collect())
        .collect();
    let pin_cap = 4 * t.saturating_sub(1);
    let mut seq = MergeSequence::default();
    while let Some((c, p, pins)) = state.best_pair() {
        debug_assert!(pins[0] <= pin_cap && pins[1] <= pin_cap, "pair pins {pins:?} exceed {pin_cap}");
        let (a, b) = (state.classes[c][p], state.classes[c][p + 1]);
        let k = n + seq.len() + 1;
        seq.push(MergeStep::new(a, b, k));
        let merged = hull(&state.boxes[a], &state.boxes[b]);
        let old = [state.boxes[a], state.boxes[b]];
        state.boxes.push(merged);
        // Every other pair loses the pins of the two parts and gains that of the new box.
        for (cc, list) in state.classes.iter().enumerate() {
            for (pp, w) in list.windows(2).enumerate() {
                if cc == c && (pp + 1 == p || pp == p || pp == p + 1) {
                    continue;
                }
                let h = hull(&state.boxes[w[0]], &state.boxes[w[1]]);
                for axis in 0..2 {
                    let lost = old.iter().filter(|bx| inside(bx[axis], h[axis])).count();
                    let pin = &mut state.pins[cc][pp][axis];
                    *pin = *pin + usize::from(inside(merged[axis], h[axis])) - lost;
                }
            }
        }
        state.classes[c].splice(p..p + 2, [k]);
        state.pins[c].remove(p);
        if p > 0 {
            state.pins[c][p - 1] = state.count_pins(state.classes[c][p - 1], k);
        }
        if p + 1 < state.classes[c].len() {
            state.pins[c][p] = state.count_pins(k, state.classes[c][p + 1]);
        }
        debug_assert!(n > RECOUNT_LIMIT || state.pins_are_fresh());
    }
    // One rectangle per class is left; merge them in class order.
    let mut survivors = state.classes.iter().map(|list| list[0]);
    if let Some(mut acc) = survivors.next() {
        for r in survivors {
            let k = n + seq.len() + 1;
            seq.push(MergeStep::new(acc, r, k));
            acc = k;
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{verify_wide, width_of_decomposition};
    use crate::monotone::greedy_monotone_partition;
    use crate::perm::{parse_permutation, random_permutation};

    #[test]
    fn increasing_is_one_wide() {
        let pi = parse_permutation("1 2 3 4 5").unwrap();
        let seq = monotone_decomposition(&pi, &greedy_monotone_partition(&pi)).unwrap();
        assert_eq!(width_of_decomposition(&pi, &seq).unwrap(), 1);
    }

    #[test]
    fn two_class_example() {
        let pi = parse_permutation("2 1 4 3").unwrap();
        let part = greedy_monotone_partition(&pi);
        let seq = monotone_decomposition(&pi, &part).unwrap();
        assert!(width_of_decomposition(&pi, &seq).unwrap() <= 7);
    }

    #[test]
    fn single_point() {
        let pi = parse_permutation("1").unwrap();
        let seq = monotone_decomposition(&pi, &greedy_monotone_partition(&pi)).unwrap();
        assert!(seq.is_empty());
    }

    #[test]
    fn greedy_partitions_give_wide_sequences() {
        for seed in 0..10 {
            let pi = random_permutation(30 + 10 * seed as usize, seed);
            let part = greedy_monotone_partition(&pi);
            let seq = monotone_decomposition(&pi, &part).unwrap();
            let t = part.len();
            assert!(verify_wide(&pi, &seq, 6 * t - 5).unwrap());
        }
    }
}
