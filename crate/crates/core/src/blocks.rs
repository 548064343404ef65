//! Common-block enumeration, filtering and extension sets.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{CommonBlock, Instance, Partition};

/// Common blocks in canonical order (longest first, then `k1`, then `k2`),
/// without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockSet {
    blocks: Vec<CommonBlock>,
}

impl BlockSet {
    /// Sorts into canonical order and drops duplicates.
    pub fn from_blocks(mut blocks: Vec<CommonBlock>) -> Self {
        blocks.sort_unstable();
        blocks.dedup();
        Self { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&CommonBlock> {
        self.blocks.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CommonBlock> {
        self.blocks.iter()
    }

    pub fn as_slice(&self) -> &[CommonBlock] {
        &self.blocks
    }

    /// Canonical index of `b`, if present.
    pub fn index_of(&self, b: &CommonBlock) -> Option<usize> {
        self.blocks.binary_search(b).ok()
    }

    pub fn contains(&self, b: &CommonBlock) -> bool {
        self.index_of(b).is_some()
    }

    /// Length of the longest block, `None` for an empty set.
    pub fn max_len(&self) -> Option<usize> {
        self.blocks.first().map(|b| b.len)
    }

    /// `B_{>=l}`: blocks of length at least `l`. Because of the canonical
    /// order this is a prefix of the set.
    pub fn filter_min_length(&self, l: usize) -> BlockSet {
        let end = self.blocks.partition_point(|b| b.len >= l);
        Self {
            blocks: self.blocks[..end].to_vec(),
        }
    }

    /// Checks that every block is a common block of `inst`.
    pub fn check_against(&self, inst: &Instance) -> Result<()> {
        match self.blocks.iter().find(|b| !b.is_common_in(inst)) {
            Some(b) => Err(Error::NotACommonBlock {
                k1: b.k1,
                k2: b.k2,
                len: b.len,
            }),
            None => Ok(()),
        }
    }

    /// Tab-separated dump, one `text k1 k2` line per block.
    pub fn dump(&self, inst: &Instance) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let _ = writeln!(out, "{}\t{}\t{}", b.text(inst), b.k1, b.k2);
        }
        out
    }
}

impl<'a> IntoIterator for &'a BlockSet {
    type Item = &'a CommonBlock;
    type IntoIter = std::slice::Iter<'a, CommonBlock>;

    fn into_iter(self) -> Self::IntoIter {
        self.blocks.iter()
    }
}

/// Longest-common-extension table: `lce[i * n + j]` is the length of the
/// longest common prefix of `s1[i..]` and `s2[j..]` (0-based).
pub(crate) fn lce_table(inst: &Instance) -> Vec<u32> {
    let n = inst.n();
    let a = inst.symbols1();
    let b = inst.symbols2();
    let mut lce = vec![0u32; n * n];
    for i in (0..n).rev() {
        for j in (0..n).rev() {
            if a[i] == b[j] {
                let ext = if i + 1 < n && j + 1 < n {
                    lce[(i + 1) * n + j + 1]
                } else {
                    0
                };
                lce[i * n + j] = ext + 1;
            }
        }
    }
    lce
}

/// Enumerates every common block of the instance in canonical order.
///
/// Each position pair `(k1, k2)` contributes one block per length up to its
/// longest common extension. Blocks are bucketed by length so the output is
/// produced in canonical order without a comparison sort.
pub fn enumerate_blocks(inst: &Instance) -> BlockSet {
    let n = inst.n();
    let lce = lce_table(inst);
    let max_len = lce.iter().copied().max().unwrap_or(0) as usize;

    // count[len] = number of pairs whose extension is at least len
    let mut at_least = vec![0usize; max_len + 2];
    for &e in &lce {
        at_least[e as usize] += 1;
    }
    for len in (1..=max_len).rev() {
        at_least[len] += at_least[len + 1];
    }
    // bucket offsets, longest bucket first
    let mut offset = vec![0usize; max_len + 2];
    let mut acc = 0;
    for len in (1..=max_len).rev() {
        offset[len] = acc;
        acc += at_least[len];
    }
    let total = acc;

    let mut blocks = vec![CommonBlock::new(0, 0, 0); total];
    for i in 0..n {
        for j in 0..n {
            let e = lce[i * n + j] as usize;
            for len in 1..=e {
                blocks[offset[len]] = CommonBlock::new(i + 1, j + 1, len);
                offset[len] += 1;
            }
        }
    }
    BlockSet { blocks }
}

/// Largest `l` with a non-empty `B_{>=l}`, i.e. the longest block length.
pub fn l_max(set: &BlockSet) -> Result<usize> {
    set.max_len().ok_or(Error::EmptyBlockSet)
}

/// Blocks of `set` that can be added to `partial` without overlapping it in
/// either string, in canonical order.
pub fn compatible_blocks(set: &BlockSet, partial: &Partition) -> BlockSet {
    let prefix = |cover: &[bool]| {
        let mut p = Vec::with_capacity(cover.len() + 1);
        p.push(0usize);
        for &c in cover {
            p.push(p.last().unwrap() + c as usize);
        }
        p
    };
    let p1 = prefix(partial.cover1());
    let p2 = prefix(partial.cover2());
    let n = partial.n();
    let blocks = set
        .iter()
        .filter(|b| b.in_bounds(n) && p1[b.end1()] == p1[b.k1 - 1] && p2[b.end2()] == p2[b.k2 - 1])
        .copied()
        .collect();
    BlockSet { blocks }
}

/// Number of blocks per block length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LengthHistogram {
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
}

impl LengthHistogram {
    pub fn count(&self, len: usize) -> usize {
        self.counts.get(&len).copied().unwrap_or(0)
    }

    /// Fraction of blocks with length `len`; 0 for an empty histogram.
    pub fn fraction(&self, len: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(len) as f64 / self.total as f64
        }
    }

    /// `length,count` CSV with a header line, ascending length.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,count\n");
        for (len, count) in &self.counts {
            let _ = writeln!(out, "{len},{count}");
        }
        out
    }
}

pub fn length_histogram(set: &BlockSet) -> LengthHistogram {
    let mut counts = BTreeMap::new();
    for b in set {
        *counts.entry(b.len).or_insert(0) += 1;
    }
    LengthHistogram {
        counts,
        total: set.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex() -> Instance {
        Instance::new("AGACTG", "ACTAGG").unwrap()
    }

    fn triples(set: &BlockSet, inst: &Instance) -> Vec<(String, usize, usize)> {
        set.iter().map(|b| (b.text(inst), b.k1, b.k2)).collect()
    }

    #[test]
    fn example_block_set() {
        let inst = ex();
        let b = enumerate_blocks(&inst);
        assert_eq!(b.len(), 14);
        let mut got = triples(&b, &inst);
        got.sort();
        let mut want: Vec<(String, usize, usize)> = [
            ("ACT", 3, 1),
            ("AG", 1, 4),
            ("AC", 3, 1),
            ("CT", 4, 2),
            ("A", 1, 1),
            ("A", 1, 4),
            ("A", 3, 1),
            ("A", 3, 4),
            ("C", 4, 2),
            ("T", 5, 3),
            ("G", 2, 5),
            ("G", 2, 6),
            ("G", 6, 5),
            ("G", 6, 6),
        ]
        .iter()
        .map(|&(t, a, b)| (t.to_string(), a, b))
        .collect();
        want.sort();
        assert_eq!(got, want);
        // canonical order keeps the four multi-letter blocks first
        assert_eq!(
            &triples(&b, &inst)[..4],
            &[
                ("ACT".to_string(), 3, 1),
                ("AG".to_string(), 1, 4),
                ("AC".to_string(), 3, 1),
                ("CT".to_string(), 4, 2),
            ]
        );
    }

    #[test]
    fn tiny_sets() {
        let inst = Instance::new("A", "A").unwrap();
        let b = enumerate_blocks(&inst);
        assert_eq!(b.as_slice(), &[CommonBlock::new(1, 1, 1)]);
        assert_eq!(l_max(&b), Ok(1));

        let inst = Instance::new("ABCD", "ABCD").unwrap();
        assert_eq!(l_max(&enumerate_blocks(&inst)), Ok(4));
        assert_eq!(l_max(&BlockSet::default()), Err(Error::EmptyBlockSet));
    }

    #[test]
    fn abab_babab() {
        // hand count: 8 singletons, AB x2, BA x2, ABA, BAB
        let inst = Instance::new("ABAB", "BABA").unwrap();
        let b = enumerate_blocks(&inst);
        assert_eq!(b.len(), 14);
        assert!(b.contains(&CommonBlock::new(1, 2, 3)));
        assert!(b.contains(&CommonBlock::new(2, 1, 3)));
    }

    #[test]
    fn filtering() {
        let inst = ex();
        let b = enumerate_blocks(&inst);
        let b2 = b.filter_min_length(2);
        assert_eq!(b2.as_slice(), &b.as_slice()[..4]);
        assert_eq!(b.filter_min_length(1), b);
        assert!(b.filter_min_length(4).is_empty());
        assert_eq!(l_max(&b), Ok(3));
    }

    #[test]
    fn extension_sets() {
        let inst = ex();
        let b = enumerate_blocks(&inst);
        let mut p = Partition::empty(6);
        assert_eq!(compatible_blocks(&b, &p), b);

        p.try_add(CommonBlock::new(3, 1, 3)).unwrap();
        let c = compatible_blocks(&b, &p);
        let want = BlockSet::from_blocks(vec![
            CommonBlock::new(1, 4, 2),
            CommonBlock::new(1, 4, 1),
            CommonBlock::new(2, 5, 1),
            CommonBlock::new(2, 6, 1),
            CommonBlock::new(6, 5, 1),
            CommonBlock::new(6, 6, 1),
        ]);
        assert_eq!(c, want);

        p.try_add(CommonBlock::new(1, 4, 2)).unwrap();
        p.try_add(CommonBlock::new(6, 6, 1)).unwrap();
        assert!(compatible_blocks(&b, &p).is_empty());
    }

    #[test]
    fn histogram() {
        let inst = ex();
        let h = length_histogram(&enumerate_blocks(&inst));
        assert_eq!(h.counts, BTreeMap::from([(1, 10), (2, 3), (3, 1)]));
        assert_eq!(h.total, 14);
        assert_eq!(h.to_csv(), "length,count\n1,10\n2,3\n3,1\n");

        let h = length_histogram(&enumerate_blocks(&Instance::new("A", "A").unwrap()));
        assert_eq!(h.counts, BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn dump_format() {
        let inst = Instance::new("AB", "AB").unwrap();
        let b = enumerate_blocks(&inst);
        assert_eq!(b.dump(&inst), "AB\t1\t1\nA\t1\t1\nB\t2\t2\n");
    }
}
