//! Maximum weighted coverage (the phase-1 model shape).
//!
//! The exact search is a depth-first branch-and-bound over `s1` positions.
//! It runs in slices, alternating with a large-neighbourhood improvement
//! step: free a random window of one string, drop the incumbent blocks that
//! touch it, and re-pack the freed positions with the same search under a
//! small node quota. Improvements tighten pruning in the main tree; the
//! main tree alone decides optimality and the bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{relative_gap, Budget, Run, SolveResult, SolveStatus, SolverConfig};
use crate::blocks::BlockSet;
use crate::error::{Error, Result};
use crate::instance::{CommonBlock, Instance, Partition};
use crate::lp::Sense;

/// Main-tree nodes between two improvement slices.
const TREE_SLICE: u64 = 200_000;
/// Node budget of one improvement slice.
const LNS_SLICE: u64 = 1_000_000;
/// Node quota of one window re-pack.
const LNS_QUOTA: u64 = 20_000;
const LNS_SEED: u64 = 0x6d63_7370;

struct Incumbent {
    sel: Vec<u32>,
    w: i64,
    time_best: f64,
}

struct Frame {
    pos: usize,
    /// Next candidate index; `starts[pos].len()` is the "leave uncovered"
    /// branch, anything beyond means exhausted.
    next: usize,
    ub: i64,
    entered: Option<u32>,
}

/// Resumable search over a subset of the blocks. Candidates must not touch
/// positions covered by `fixed`; `base_w` is the weight of `fixed`.
struct Packing<'a> {
    n: usize,
    blocks: &'a [CommonBlock],
    weight: i64,
    max_len: i64,
    starts: Vec<Vec<u32>>,
    reach1: Vec<i64>,
    next_start: Vec<usize>,
    cov2_total: i64,
    cover2: Vec<bool>,
    fixed: Vec<u32>,
    chosen: Vec<u32>,
    w: i64,
    placed: i64,
    stack: Vec<Frame>,
}

impl<'a> Packing<'a> {
    fn new(
        n: usize,
        blocks: &'a [CommonBlock],
        weight: i64,
        candidates: impl Iterator<Item = u32>,
        fixed: Vec<u32>,
        base_w: i64,
    ) -> Self {
        let mut starts = vec![Vec::new(); n];
        let mut max_len = 1;
        let mut coverable2 = vec![false; n];
        for bi in candidates {
            let b = blocks[bi as usize];
            starts[b.k1 - 1].push(bi);
            max_len = max_len.max(b.len as i64);
            coverable2[b.k2 - 1..b.end2()].fill(true);
        }
        // reach1[p]: s1 positions >= p coverable by some candidate starting at >= p
        let mut reach1 = vec![0i64; n + 1];
        let mut marked = vec![false; n];
        for p in (0..n).rev() {
            reach1[p] = reach1[p + 1];
            if let Some(&bi) = starts[p].first() {
                for m in &mut marked[p..p + blocks[bi as usize].len] {
                    if !*m {
                        *m = true;
                        reach1[p] += 1;
                    }
                }
            }
        }
        let mut next_start = vec![n; n + 1];
        for p in (0..n).rev() {
            next_start[p] = if starts[p].is_empty() {
                next_start[p + 1]
            } else {
                p
            };
        }
        let mut s = Self {
            n,
            blocks,
            weight,
            max_len,
            starts,
            reach1,
            next_start,
            cov2_total: coverable2.iter().filter(|&&c| c).count() as i64,
            cover2: vec![false; n],
            fixed,
            chosen: Vec::new(),
            w: base_w,
            placed: 0,
            stack: Vec::new(),
        };
        let root = s.next_start[0];
        if root < n {
            let ub = s.upper(root);
            s.stack.push(Frame {
                pos: root,
                next: 0,
                ub,
                entered: None,
            });
        }
        s
    }

    fn upper(&self, pos: usize) -> i64 {
        let u = self.reach1[pos].min(self.cov2_total - self.placed);
        if u <= 0 {
            self.w
        } else {
            self.w + self.weight * u - (u + self.max_len - 1) / self.max_len
        }
    }

    fn apply(&mut self, bi: u32) {
        let b = self.blocks[bi as usize];
        self.cover2[b.k2 - 1..b.end2()].fill(true);
        self.w += self.weight * b.len as i64 - 1;
        self.placed += b.len as i64;
        self.chosen.push(bi);
    }

    fn undo(&mut self, bi: u32) {
        let b = self.blocks[bi as usize];
        self.cover2[b.k2 - 1..b.end2()].fill(false);
        self.w -= self.weight * b.len as i64 - 1;
        self.placed -= b.len as i64;
        self.chosen.pop();
    }

    fn pop(&mut self) {
        if let Some(Frame {
            entered: Some(bi), ..
        }) = self.stack.pop()
        {
            self.undo(bi);
        }
    }

    /// Largest bound among open frames.
    fn open_bound(&self) -> Option<i64> {
        self.stack.iter().map(|f| f.ub).max()
    }

    /// Explores at most `quota` nodes. Solutions strictly better than
    /// `best.w` replace it.
    fn run(&mut self, best: &mut Incumbent, quota: u64, budget: &mut Budget) -> Run {
        let mut used = 0;
        while let Some(top) = self.stack.last() {
            let pos = top.pos;
            if top.ub <= best.w || top.next > self.starts[pos].len() {
                self.pop();
                continue;
            }
            if budget.exhausted(true) {
                return Run::Stopped;
            }
            if used >= quota {
                return Run::Paused;
            }
            used += 1;
            budget.nodes += 1;

            let k = self.stack.len() - 1;
            let mut next = self.stack[k].next;
            let mut child = None;
            while next < self.starts[pos].len() {
                let bi = self.starts[pos][next];
                next += 1;
                let b = &self.blocks[bi as usize];
                if self.cover2[b.k2 - 1..b.end2()].iter().all(|c| !c) {
                    child = Some(bi);
                    break;
                }
            }
            let child_pos = match child {
                Some(bi) => {
                    self.stack[k].next = next;
                    self.apply(bi);
                    if self.w > best.w {
                        best.w = self.w;
                        best.sel = self.fixed.iter().chain(&self.chosen).copied().collect();
                        best.time_best = budget.elapsed();
                    }
                    self.next_start[(pos + self.blocks[bi as usize].len).min(self.n)]
                }
                None => {
                    // leave `pos` uncovered
                    self.stack[k].next = self.starts[pos].len() + 1;
                    self.next_start[pos + 1]
                }
            };
            let ub = if child_pos < self.n {
                self.upper(child_pos)
            } else {
                self.w
            };
            if child_pos < self.n && ub > best.w {
                self.stack.push(Frame {
                    pos: child_pos,
                    next: 0,
                    ub,
                    entered: child,
                });
            } else if let Some(bi) = child {
                self.undo(bi);
            }
        }
        Run::Finished
    }
}

fn prefix_counts(cover: &[bool]) -> Vec<u32> {
    let mut p = Vec::with_capacity(cover.len() + 1);
    p.push(0);
    for &c in cover {
        p.push(p.last().unwrap() + c as u32);
    }
    p
}

/// One window re-pack around the incumbent. Accepts equal-weight moves so
/// the incumbent can drift across plateaus.
fn improve_once(
    n: usize,
    blocks: &[CommonBlock],
    weight: i64,
    rng: &mut ChaCha8Rng,
    best: &mut Incumbent,
    budget: &mut Budget,
) -> Run {
    if budget.exhausted(true) {
        return Run::Stopped;
    }
    let lo = (n / 40).clamp(4, 40).min(n);
    let hi = (n / 8).clamp(lo, 120).min(n);
    let width = rng.gen_range(lo..=hi);
    let a = rng.gen_range(0..=n - width);
    let b = a + width;
    let in_s1 = rng.gen_bool(0.5);

    // free the window, then the neighbourhood of the freed blocks in the
    // other string
    let radius = rng.gen_range(0..=width / 4);
    let mut near = vec![false; n];
    for &bi in &best.sel {
        let blk = blocks[bi as usize];
        let (start, other) = if in_s1 {
            (blk.k1, blk.k2)
        } else {
            (blk.k2, blk.k1)
        };
        if start - 1 < b && start - 1 + blk.len > a {
            let lo = (other - 1).saturating_sub(radius);
            let hi = (other - 1 + blk.len + radius).min(n);
            near[lo..hi].fill(true);
        }
    }
    let mut kept = Vec::new();
    let mut base_w = 0;
    let mut cover1 = vec![false; n];
    let mut cover2 = vec![false; n];
    for &bi in &best.sel {
        let blk = blocks[bi as usize];
        let (start, other) = if in_s1 {
            (blk.k1, blk.k2)
        } else {
            (blk.k2, blk.k1)
        };
        if (start - 1 < b && start - 1 + blk.len > a)
            || near[other - 1..other - 1 + blk.len].iter().any(|&x| x)
        {
            continue;
        }
        cover1[blk.k1 - 1..blk.end1()].fill(true);
        cover2[blk.k2 - 1..blk.end2()].fill(true);
        base_w += weight * blk.len as i64 - 1;
        kept.push(bi);
    }
    let p1 = prefix_counts(&cover1);
    let p2 = prefix_counts(&cover2);
    let candidates = blocks.iter().enumerate().filter_map(|(i, blk)| {
        let free = p1[blk.end1()] == p1[blk.k1 - 1] && p2[blk.end2()] == p2[blk.k2 - 1];
        free.then_some(i as u32)
    });
    let mut sub = Packing::new(n, blocks, weight, candidates, kept, base_w);
    let mut local = Incumbent {
        sel: Vec::new(),
        w: best.w - 1,
        time_best: best.time_best,
    };
    let run = sub.run(&mut local, LNS_QUOTA, budget);
    if !local.sel.is_empty() && local.w >= best.w {
        if local.w == best.w {
            local.time_best = best.time_best;
        }
        *best = local;
    }
    run
}

/// Maximum weighted coverage: maximise `sum (C*len - 1)` over pairwise
/// compatible blocks of `blocks` (typically `B_{>=l}`).
///
/// Branches on the leftmost undecided position of `s1`: place one of the
/// blocks starting there (longest first), or leave the position uncovered.
/// The empty selection is the root incumbent, so the result always carries a
/// solution.
pub fn solve_max_coverage(
    inst: &Instance,
    blocks: &BlockSet,
    weight: i64,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    let n = inst.n();
    let min_weight = crate::model::phase1_weight(n);
    if weight < min_weight {
        return Err(Error::WeightTooSmall {
            c: weight,
            min: min_weight,
        });
    }
    blocks.check_against(inst)?;

    let mut budget = Budget::new(cfg);
    let bs = blocks.as_slice();
    let t0 = budget.elapsed();
    let mut best = Incumbent {
        sel: Vec::new(),
        w: 0,
        time_best: t0,
    };
    let mut tree = Packing::new(n, bs, weight, 0..bs.len() as u32, Vec::new(), 0);
    let mut rng = ChaCha8Rng::seed_from_u64(LNS_SEED);

    let stopped = loop {
        match tree.run(&mut best, TREE_SLICE, &mut budget) {
            Run::Finished => break false,
            Run::Stopped => break true,
            Run::Paused => {}
        }
        let mut spent = 0;
        let mut halted = false;
        while spent < LNS_SLICE && !best.sel.is_empty() {
            let before = budget.nodes;
            if let Run::Stopped = improve_once(n, bs, weight, &mut rng, &mut best, &mut budget) {
                halted = true;
                break;
            }
            spent += (budget.nodes - before).max(1);
        }
        if halted {
            break true;
        }
    };

    let time_total = budget.elapsed();
    let bound = if stopped {
        tree.open_bound().unwrap_or(best.w).max(best.w)
    } else {
        best.w
    };
    let partition = Partition::from_blocks(n, best.sel.iter().map(|&i| bs[i as usize]))
        .expect("search only places non-overlapping blocks");
    Ok(SolveResult {
        status: if stopped {
            SolveStatus::FeasibleTimeLimit
        } else {
            SolveStatus::ProvenOptimal
        },
        sense: Sense::Maximize,
        incumbent: Some(partition),
        objective: Some(best.w),
        bound,
        gap: Some(relative_gap(best.w, bound)),
        time_first_s: Some(t0),
        time_best_s: Some(best.time_best),
        time_total_s: time_total,
        nodes: budget.nodes,
        block_set_size: blocks.len(),
    })
}
