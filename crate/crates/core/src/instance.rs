//! Instances, common blocks and (partial) partitions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::blocks::BlockSet;
use crate::error::{Error, Result};

/// Returns true iff both strings have the same length and every symbol occurs
/// equally often in each.
pub fn is_related(s1: &str, s2: &str) -> bool {
    first_count_mismatch(s1, s2).is_none() && s1.chars().count() == s2.chars().count()
}

fn symbol_counts(s: &str) -> BTreeMap<char, usize> {
    let mut counts = BTreeMap::new();
    for c in s.chars() {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts
}

fn first_count_mismatch(s1: &str, s2: &str) -> Option<(char, usize, usize)> {
    let c1 = symbol_counts(s1);
    let c2 = symbol_counts(s2);
    c1.keys()
        .chain(c2.keys())
        .map(|&sym| {
            (
                sym,
                c1.get(&sym).copied().unwrap_or(0),
                c2.get(&sym).copied().unwrap_or(0),
            )
        })
        .find(|&(_, a, b)| a != b)
}

/// Two related strings of common length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    s1: String,
    s2: String,
    sym1: Vec<char>,
    sym2: Vec<char>,
    alphabet: BTreeSet<char>,
}

impl Instance {
    pub fn new(s1: impl Into<String>, s2: impl Into<String>) -> Result<Self> {
        let s1 = s1.into();
        let s2 = s2.into();
        if s1.is_empty() || s2.is_empty() {
            return Err(Error::EmptyString);
        }
        if let Some(c) = s1
            .chars()
            .chain(s2.chars())
            .find(|c| c.is_whitespace() || c.is_control())
        {
            return Err(Error::InvalidSymbol(c));
        }
        let sym1: Vec<char> = s1.chars().collect();
        let sym2: Vec<char> = s2.chars().collect();
        if sym1.len() != sym2.len() {
            return Err(Error::LengthMismatch(sym1.len(), sym2.len()));
        }
        if let Some((symbol, count1, count2)) = first_count_mismatch(&s1, &s2) {
            return Err(Error::NotRelated {
                symbol,
                count1,
                count2,
            });
        }
        let alphabet = sym1.iter().copied().collect();
        Ok(Self {
            s1,
            s2,
            sym1,
            sym2,
            alphabet,
        })
    }

    /// Parses the two-line text format: `s1` on the first line, `s2` on the
    /// second, optional trailing newline.
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let lines: Vec<&str> = body
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .collect();
        if lines.len() != 2 {
            return Err(Error::Format(format!(
                "expected exactly two lines, found {}",
                lines.len()
            )));
        }
        if lines.iter().any(|l| l.is_empty()) {
            return Err(Error::Format("empty line".into()));
        }
        Self::new(lines[0], lines[1])
    }

    /// Serializes to the two-line text format (with trailing newline).
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.s1, self.s2)
    }

    pub fn n(&self) -> usize {
        self.sym1.len()
    }

    pub fn s1(&self) -> &str {
        &self.s1
    }

    pub fn s2(&self) -> &str {
        &self.s2
    }

    pub fn symbols1(&self) -> &[char] {
        &self.sym1
    }

    pub fn symbols2(&self) -> &[char] {
        &self.sym2
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }
}

/// A common block `(t, k1, k2)`: the substring `t` of length `len` occurs at
/// 1-based position `k1` in `s1` and `k2` in `s2`.
///
/// The text is not stored; use [`CommonBlock::text`]. Blocks order
/// canonically: longer first, then by `k1`, then by `k2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CommonBlock {
    pub k1: usize,
    pub k2: usize,
    pub len: usize,
}

impl CommonBlock {
    pub const fn new(k1: usize, k2: usize, len: usize) -> Self {
        Self { k1, k2, len }
    }

    /// Last s1 position covered (inclusive).
    pub fn end1(&self) -> usize {
        self.k1 + self.len - 1
    }

    /// Last s2 position covered (inclusive).
    pub fn end2(&self) -> usize {
        self.k2 + self.len - 1
    }

    pub fn overlaps_s1(&self, other: &CommonBlock) -> bool {
        self.k1 <= other.end1() && other.k1 <= self.end1()
    }

    pub fn overlaps_s2(&self, other: &CommonBlock) -> bool {
        self.k2 <= other.end2() && other.k2 <= self.end2()
    }

    pub fn in_bounds(&self, n: usize) -> bool {
        self.len >= 1 && self.k1 >= 1 && self.k2 >= 1 && self.end1() <= n && self.end2() <= n
    }

    /// True iff the block lies inside both strings and the substrings match.
    pub fn is_common_in(&self, inst: &Instance) -> bool {
        self.in_bounds(inst.n())
            && inst.sym1[self.k1 - 1..self.end1()] == inst.sym2[self.k2 - 1..self.end2()]
    }

    /// Block string. Panics if the block does not fit in the instance.
    pub fn text(&self, inst: &Instance) -> String {
        inst.sym1[self.k1 - 1..self.end1()].iter().collect()
    }
}

impl Ord for CommonBlock {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .len
            .cmp(&self.len)
            .then(self.k1.cmp(&other.k1))
            .then(self.k2.cmp(&other.k2))
    }
}

impl PartialOrd for CommonBlock {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CommonBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k1={}, k2={}, len={})", self.k1, self.k2, self.len)
    }
}

/// First violated condition found when checking a block selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    OutOfBounds(CommonBlock),
    NotCommon(CommonBlock),
    Duplicate(CommonBlock),
    Overlap {
        first: CommonBlock,
        second: CommonBlock,
        in_s1: bool,
        in_s2: bool,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfBounds(b) => write!(f, "block {b} lies outside the strings"),
            Violation::NotCommon(b) => write!(f, "block {b} is not a common block"),
            Violation::Duplicate(b) => write!(f, "block {b} selected twice"),
            Violation::Overlap {
                first,
                second,
                in_s1,
                in_s2,
            } => {
                let wher = match (in_s1, in_s2) {
                    (true, true) => "s1 and s2",
                    (true, false) => "s1",
                    _ => "s2",
                };
                write!(f, "blocks {first} and {second} overlap in {wher}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Complete,
    Partial,
    Invalid(Violation),
}

/// A set of pairwise non-overlapping blocks together with its coverage masks.
///
/// Blocks are kept in canonical order so that equal selections compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    #[serde(skip)]
    n: usize,
    blocks: Vec<CommonBlock>,
    #[serde(skip)]
    cover1: Vec<bool>,
    #[serde(skip)]
    cover2: Vec<bool>,
    covered_len: usize,
}

impl Partition {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            blocks: Vec::new(),
            cover1: vec![false; n],
            cover2: vec![false; n],
            covered_len: 0,
        }
    }

    /// Builds a partition from blocks, checking bounds, duplicates and
    /// overlaps (but not that the blocks are common; see [`validate_blocks`]).
    pub fn from_blocks<I>(n: usize, blocks: I) -> Result<Self, Violation>
    where
        I: IntoIterator<Item = CommonBlock>,
    {
        let mut p = Self::empty(n);
        for b in blocks {
            p.try_add(b)?;
        }
        Ok(p)
    }

    /// The all-singletons partition: each s1 position is matched to the
    /// leftmost unused s2 position carrying the same symbol.
    pub fn singletons(inst: &Instance) -> Self {
        let n = inst.n();
        let mut p = Self::empty(n);
        let mut used = vec![false; n];
        for (i, c) in inst.sym1.iter().enumerate() {
            let j = (0..n)
                .find(|&j| !used[j] && inst.sym2[j] == *c)
                .expect("related strings always admit a singleton matching");
            used[j] = true;
            p.try_add(CommonBlock::new(i + 1, j + 1, 1))
                .expect("singletons never overlap");
        }
        p
    }

    pub fn can_add(&self, b: &CommonBlock) -> bool {
        b.in_bounds(self.n)
            && self.cover1[b.k1 - 1..b.end1()].iter().all(|c| !c)
            && self.cover2[b.k2 - 1..b.end2()].iter().all(|c| !c)
    }

    pub fn try_add(&mut self, b: CommonBlock) -> Result<(), Violation> {
        if !b.in_bounds(self.n) {
            return Err(Violation::OutOfBounds(b));
        }
        if self.blocks.contains(&b) {
            return Err(Violation::Duplicate(b));
        }
        if !self.can_add(&b) {
            let other = self
                .blocks
                .iter()
                .find(|o| o.overlaps_s1(&b) || o.overlaps_s2(&b))
                .copied()
                .expect("coverage masks are consistent with the block list");
            return Err(Violation::Overlap {
                first: other,
                second: b,
                in_s1: other.overlaps_s1(&b),
                in_s2: other.overlaps_s2(&b),
            });
        }
        self.cover1[b.k1 - 1..b.end1()].fill(true);
        self.cover2[b.k2 - 1..b.end2()].fill(true);
        self.covered_len += b.len;
        let at = self.blocks.binary_search(&b).unwrap_or_else(|e| e);
        self.blocks.insert(at, b);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[CommonBlock] {
        &self.blocks
    }

    /// Number of selected blocks (the MCSP objective for complete partitions).
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn covered_len(&self) -> usize {
        self.covered_len
    }

    pub fn cover1(&self) -> &[bool] {
        &self.cover1
    }

    pub fn cover2(&self) -> &[bool] {
        &self.cover2
    }

    pub fn is_complete(&self) -> bool {
        self.covered_len == self.n
    }

    pub fn contains(&self, b: &CommonBlock) -> bool {
        self.blocks.binary_search(b).is_ok()
    }
}

/// Checks an arbitrary block selection against the instance.
pub fn validate_blocks(inst: &Instance, blocks: &[CommonBlock]) -> Validity {
    let mut p = Partition::empty(inst.n());
    for b in blocks {
        if !b.in_bounds(inst.n()) {
            return Validity::Invalid(Violation::OutOfBounds(*b));
        }
        if !b.is_common_in(inst) {
            return Validity::Invalid(Violation::NotCommon(*b));
        }
        if let Err(v) = p.try_add(*b) {
            return Validity::Invalid(v);
        }
    }
    if p.is_complete() {
        Validity::Complete
    } else {
        Validity::Partial
    }
}

/// Checks the selection `sel` (0-based indices into `set`).
pub fn validate_partition(inst: &Instance, set: &BlockSet, sel: &[usize]) -> Result<Validity> {
    let blocks = sel
        .iter()
        .map(|&i| {
            set.get(i).copied().ok_or(Error::IndexOutOfRange {
                index: i,
                len: set.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(validate_blocks(inst, &blocks))
}
