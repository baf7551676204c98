//! Distributions of pattern labels into rectangle sets, and the table of satisfiable ones.

use std::collections::HashMap;

/// Longest pattern whose distribution codes fit in 64 bits.
pub const MAX_PATTERN_LEN: usize = 15;

/// A distribution of pattern labels into the rectangles of `key`: `masks[p]` is the set of
/// (0-based) pattern labels assigned to `key[p]`, as a bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution {
    pub key: Vec<usize>,
    pub masks: Vec<u32>,
}

impl Distribution {
    /// Base-`(|key| + 1)` code over pattern labels in order: digit 0 means unassigned,
    /// digit `p + 1` means assigned to `key[p]`.
    pub fn code(&self, pattern_len: usize) -> u64 {
        encode(&self.masks, pattern_len)
    }

    pub fn decode(key: Vec<usize>, code: u64, pattern_len: usize) -> Distribution {
        let masks = decode(code, key.len(), pattern_len);
        Distribution { key, masks }
    }

    /// Union of all parts.
    pub fn range(&self) -> u32 {
        self.masks.iter().fold(0, |acc, m| acc | m)
    }
}

pub(crate) fn encode(masks: &[u32], pattern_len: usize) -> u64 {
    let base = masks.len() as u64 + 1;
    let mut code = 0;
    for s in (0..pattern_len).rev() {
        let digit = masks.iter().position(|m| m >> s & 1 == 1).map_or(0, |p| p as u64 + 1);
        code = code * base + digit;
    }
    code
}

pub(crate) fn decode(mut code: u64, parts: usize, pattern_len: usize) -> Vec<u32> {
    let base = parts as u64 + 1;
    let mut masks = vec![0u32; parts];
    for s in 0..pattern_len {
        let digit = (code % base) as usize;
        code /= base;
        if digit > 0 {
            masks[digit - 1] |= 1 << s;
        }
    }
    masks
}

/// Satisfiable distributions per connected rectangle set. Sets whose rectangles have been
/// merged away are moved to an archive that witness reconstruction still reads.
#[derive(Debug, Clone, Default)]
pub struct SubproblemTable {
    live: HashMap<Vec<usize>, Vec<u64>>,
    archive: HashMap<Vec<usize>, Vec<u64>>,
    // Live keys containing each rectangle index.
    keys_of: HashMap<usize, Vec<Vec<usize>>>,
}

impl SubproblemTable {
    /// Records the sorted satisfiable codes of `key`; empty lists are not stored.
    pub fn insert(&mut self, key: Vec<usize>, codes: Vec<u64>) {
        if codes.is_empty() {
            return;
        }
        for &m in &key {
            self.keys_of.entry(m).or_default().push(key.clone());
        }
        self.live.insert(key, codes);
    }

    /// Satisfiable codes of a live key.
    pub fn get(&self, key: &[usize]) -> Option<&[u64]> {
        self.live.get(key).map(Vec::as_slice)
    }

    /// Satisfiable codes of a live or archived key.
    pub fn lookup(&self, key: &[usize]) -> Option<&[u64]> {
        self.live.get(key).or_else(|| self.archive.get(key)).map(Vec::as_slice)
    }

    pub fn is_satisfiable(&self, key: &[usize], code: u64) -> bool {
        self.lookup(key).is_some_and(|codes| codes.binary_search(&code).is_ok())
    }

    /// Archives every live key that contains one of `merged`.
    pub fn invalidate(&mut self, merged: &[usize]) {
        for &m in merged {
            for key in self.keys_of.remove(&m).unwrap_or_default() {
                if let Some(codes) = self.live.remove(&key) {
                    for &other in key.iter().filter(|o| !merged.contains(o)) {
                        if let Some(list) = self.keys_of.get_mut(&other) {
                            list.retain(|k| k != &key);
                        }
                    }
                    self.archive.insert(key, codes);
                }
            }
        }
    }

    /// Live keys in sorted order, each with its codes.
    pub fn entries(&self) -> Vec<(&Vec<usize>, &Vec<u64>)> {
        let mut v: Vec<_> = self.live.iter().collect();
        v.sort();
        v
    }

    pub fn live_len(&self) -> usize {
        self.live.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        let d = Distribution { key: vec![4, 9, 11], masks: vec![0b0101, 0b0010, 0b1000] };
        let code = d.code(5);
        assert_eq!(Distribution::decode(vec![4, 9, 11], code, 5), d);
        assert_eq!(d.range(), 0b1111);
        // Labels 1..3 all in the only part: 1 + 2 + 4.
        assert_eq!(encode(&[0b111], 3), 7);
    }

    #[test]
    fn invalidation_archives_keys() {
        let mut t = SubproblemTable::default();
        t.insert(vec![1, 2], vec![3, 5]);
        t.insert(vec![2, 3], vec![1]);
        t.insert(vec![4], vec![]);
        assert_eq!(t.live_len(), 2);
        t.invalidate(&[1]);
        assert!(t.get(&[1, 2]).is_none());
        assert!(t.is_satisfiable(&[1, 2], 5));
        assert_eq!(t.get(&[2, 3]), Some(&[1u64][..]));
        t.invalidate(&[3]);
        assert_eq!(t.live_len(), 0);
        assert!(t.keys_of.values().all(Vec::is_empty));
    }
}
