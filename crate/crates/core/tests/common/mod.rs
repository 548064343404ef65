//! Test oracles that work on the raw strings and share no code path with the
//! library's enumeration or search.

#![allow(dead_code)]

use mcsp::{CommonBlock, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every `(k1, k2, len)` with matching substrings, by cubic scan.
pub fn brute_blocks(inst: &Instance) -> Vec<CommonBlock> {
    let a = inst.symbols1();
    let b = inst.symbols2();
    let n = a.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for len in 1..=n - i.max(j) {
                if a[i..i + len] == b[j..j + len] {
                    out.push(CommonBlock::new(i + 1, j + 1, len));
                }
            }
        }
    }
    out
}

fn disjoint(x: &CommonBlock, y: &CommonBlock) -> bool {
    (x.k1 + x.len <= y.k1 || y.k1 + y.len <= x.k1) && (x.k2 + x.len <= y.k2 || y.k2 + y.len <= x.k2)
}

/// Over all pairwise-disjoint subsets of `blocks`: the maximum covered
/// length, and the fewest blocks achieving it.
pub fn best_packing(blocks: &[CommonBlock]) -> (usize, usize) {
    fn rec(
        blocks: &[CommonBlock],
        i: usize,
        chosen: &mut Vec<CommonBlock>,
        covered: usize,
        best: &mut (usize, usize),
    ) {
        if i == blocks.len() {
            let cand = (covered, chosen.len());
            if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                *best = cand;
            }
            return;
        }
        rec(blocks, i + 1, chosen, covered, best);
        let b = blocks[i];
        if chosen.iter().all(|c| disjoint(c, &b)) {
            chosen.push(b);
            rec(blocks, i + 1, chosen, covered + b.len, best);
            chosen.pop();
        }
    }
    let mut best = (0, 0);
    rec(blocks, 0, &mut Vec::new(), 0, &mut best);
    best
}

/// Number of distinct complete partitions, enumerated on the strings.
pub fn count_partitions(inst: &Instance) -> u64 {
    fn rec(a: &[char], b: &[char], u1: &mut [bool], u2: &mut [bool]) -> u64 {
        let n = a.len();
        let Some(p) = u1.iter().position(|u| !u) else {
            return 1;
        };
        let mut total = 0;
        for q in 0..n {
            let mut len = 0;
            while p + len < n
                && q + len < n
                && !u1[p + len]
                && !u2[q + len]
                && a[p + len] == b[q + len]
            {
                len += 1;
                u1[p..p + len].fill(true);
                u2[q..q + len].fill(true);
                total += rec(a, b, u1, u2);
                u1[p..p + len].fill(false);
                u2[q..q + len].fill(false);
            }
        }
        total
    }
    let n = inst.n();
    rec(
        inst.symbols1(),
        inst.symbols2(),
        &mut vec![false; n],
        &mut vec![false; n],
    )
}

/// Random related instance over the first `sigma` letters of `ACGT`, with its
/// own generator so tests do not depend on the library's instance generator.
pub fn random_instance(n: usize, sigma: usize, seed: u64) -> Instance {
    let letters = ['A', 'C', 'G', 'T'];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05ee_d0f0_ac1e);
    let s1: Vec<char> = (0..n).map(|_| letters[rng.gen_range(0..sigma)]).collect();
    let mut s2 = s1.clone();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        s2.swap(i, j);
    }
    Instance::new(s1.iter().collect::<String>(), s2.iter().collect::<String>()).unwrap()
}
