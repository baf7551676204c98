use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::perm::{Label, Permutation};

/// Map from labels of a pattern `σ` to labels of a text `π`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Embedding {
    // Sorted by pattern label.
    pairs: Vec<(Label, Label)>,
}

impl Embedding {
    pub fn new(mut pairs: Vec<(Label, Label)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Domain(format!("pattern label {} mapped twice", w[0].0)));
            }
        }
        Ok(Embedding { pairs })
    }

    /// `(pattern label, text label)` pairs in ascending pattern-label order.
    pub fn pairs(&self) -> &[(Label, Label)] {
        &self.pairs
    }

    pub fn get(&self, pattern_label: Label) -> Option<Label> {
        self.pairs
            .binary_search_by_key(&pattern_label, |&(s, _)| s)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Parses `ℓ` lines of "pattern-label text-label".
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(parse_err(line, "expected two labels"));
            }
            let a = toks[0].parse().map_err(|_| parse_err(toks[0], "not a label"))?;
            let b = toks[1].parse().map_err(|_| parse_err(toks[1], "not a label"))?;
            pairs.push((a, b));
        }
        Embedding::new(pairs)
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, p) in &self.pairs {
            writeln!(f, "{s} {p}")?;
        }
        Ok(())
    }
}

/// Checks that `phi` is an embedding of `sigma` into `pi`: injective and order-preserving
/// along both axes for every pair.
pub fn verify_embedding(sigma: &Permutation, pi: &Permutation, phi: &Embedding) -> Result<bool> {
    if phi.len() != sigma.len() {
        return Err(Error::Domain(format!(
            "embedding has {} entries for a pattern of length {}",
            phi.len(),
            sigma.len()
        )));
    }
    let mut images = Vec::with_capacity(sigma.len());
    for (label, sp) in sigma.iter() {
        let target = phi
            .get(label)
            .ok_or_else(|| Error::Domain(format!("pattern label {label} is not mapped")))?;
        let tp = pi
            .point(target)
            .ok_or_else(|| Error::Domain(format!("image {target} is not a label of the text")))?;
        images.push((sp, tp));
    }
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            let (s1, t1) = images[a];
            let (s2, t2) = images[b];
            if (s1.x < s2.x) != (t1.x < t2.x) || (s1.y < s2.y) != (t1.y < t2.y) || t1 == t2 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_permutation;

    #[test]
    fn verifies_the_introductory_example() {
        let sigma = parse_permutation("1 3 2").unwrap();
        let pi = parse_permutation("3 2 1 5 6 7 4").unwrap();
        let phi = Embedding::new(vec![(1, 3), (2, 4), (3, 7)]).unwrap();
        assert!(verify_embedding(&sigma, &pi, &phi).unwrap());
    }

    #[test]
    fn rejects_reversed_order() {
        let sigma = parse_permutation("1 2").unwrap();
        let pi = parse_permutation("2 1").unwrap();
        let phi = Embedding::new(vec![(1, 1), (2, 2)]).unwrap();
        assert!(!verify_embedding(&sigma, &pi, &phi).unwrap());
    }

    #[test]
    fn identity_embeds() {
        let p = parse_permutation("2 4 1 3").unwrap();
        let phi = Embedding::new(p.labels().iter().map(|&l| (l, l)).collect()).unwrap();
        assert!(verify_embedding(&p, &p, &phi).unwrap());
    }

    #[test]
    fn partial_or_out_of_range_maps_are_domain_errors() {
        let sigma = parse_permutation("1 2").unwrap();
        let pi = parse_permutation("1 2 3").unwrap();
        let partial = Embedding::new(vec![(1, 1)]).unwrap();
        assert!(verify_embedding(&sigma, &pi, &partial).is_err());
        let outside = Embedding::new(vec![(1, 1), (2, 9)]).unwrap();
        assert!(verify_embedding(&sigma, &pi, &outside).is_err());
        let wrong = Embedding::new(vec![(1, 1), (3, 2)]).unwrap();
        assert!(verify_embedding(&sigma, &pi, &wrong).is_err());
    }

    #[test]
    fn text_round_trip() {
        let phi = Embedding::new(vec![(2, 5), (1, 3)]).unwrap();
        assert_eq!(phi.to_string(), "1 3\n2 5\n");
        assert_eq!(Embedding::parse(&phi.to_string()).unwrap(), phi);
        assert!(Embedding::parse("1").is_err());
    }
}
