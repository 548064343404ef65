//! Minimum-cardinality exact partition (the exact and phase-2 model shapes).
//!
//! Same scheme as the coverage search: a resumable depth-first tree that
//! alone decides optimality, interleaved with window re-solves around the
//! incumbent. The incumbent starts from the greedy completion when that
//! completion only uses blocks of the set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{relative_gap, Budget, Run, SolveResult, SolveStatus, SolverConfig};
use crate::blocks::BlockSet;
use crate::error::{Error, Result};
use crate::greedy::greedy_extend;
use crate::instance::{validate_blocks, CommonBlock, Instance, Partition, Validity, Violation};
use crate::lp::Sense;

const TREE_SLICE: u64 = 100_000;
const LNS_SLICE: u64 = 400_000;
const LNS_QUOTA: u64 = 5_000;
const LNS_SEED: u64 = 0x6d63_7370_0002;

struct Incumbent {
    /// Selected blocks, forced ones included.
    sel: Vec<u32>,
    /// `i64::MAX` while no solution is known.
    value: i64,
    time_first: Option<f64>,
    time_best: Option<f64>,
}

impl Incumbent {
    fn found(&self) -> bool {
        self.value != i64::MAX
    }
}

struct Frame {
    pos: usize,
    next: usize,
    lb: i64,
    entered: Option<u32>,
}

/// Resumable search that completes `fixed` with candidate blocks. Candidates
/// must not touch positions covered by `fixed`.
struct Completion<'a> {
    n: usize,
    blocks: &'a [CommonBlock],
    starts: Vec<Vec<u32>>,
    max_len: usize,
    cover1: Vec<bool>,
    cover2: Vec<bool>,
    covered: usize,
    fixed: Vec<u32>,
    chosen: Vec<u32>,
    stack: Vec<Frame>,
    /// The fixed blocks already cover everything.
    complete_at_root: bool,
}

impl<'a> Completion<'a> {
    fn new(
        n: usize,
        blocks: &'a [CommonBlock],
        candidates: impl Iterator<Item = u32>,
        fixed: Vec<u32>,
    ) -> Self {
        let mut starts = vec![Vec::new(); n];
        let mut max_len = 0;
        for bi in candidates {
            let b = blocks[bi as usize];
            starts[b.k1 - 1].push(bi);
            max_len = max_len.max(b.len);
        }
        let mut s = Self {
            n,
            blocks,
            starts,
            max_len,
            cover1: vec![false; n],
            cover2: vec![false; n],
            covered: 0,
            fixed,
            chosen: Vec::new(),
            stack: Vec::new(),
            complete_at_root: false,
        };
        for &bi in &s.fixed {
            let b = blocks[bi as usize];
            s.cover1[b.k1 - 1..b.end1()].fill(true);
            s.cover2[b.k2 - 1..b.end2()].fill(true);
            s.covered += b.len;
        }
        if s.covered == n {
            s.complete_at_root = true;
        } else {
            let lb = s.lower_bound();
            if lb != i64::MAX {
                s.stack.push(Frame {
                    pos: s.first_open(0),
                    next: 0,
                    lb,
                    entered: None,
                });
            }
        }
        s
    }

    fn apply(&mut self, bi: u32) {
        let b = self.blocks[bi as usize];
        self.cover1[b.k1 - 1..b.end1()].fill(true);
        self.cover2[b.k2 - 1..b.end2()].fill(true);
        self.covered += b.len;
        self.chosen.push(bi);
    }

    fn undo(&mut self, bi: u32) {
        let b = self.blocks[bi as usize];
        self.cover1[b.k1 - 1..b.end1()].fill(false);
        self.cover2[b.k2 - 1..b.end2()].fill(false);
        self.covered -= b.len;
        let popped = self.chosen.pop();
        debug_assert_eq!(popped, Some(bi));
    }

    fn pop(&mut self) {
        if let Some(Frame {
            entered: Some(bi), ..
        }) = self.stack.pop()
        {
            self.undo(bi);
        }
    }

    fn count(&self) -> i64 {
        (self.fixed.len() + self.chosen.len()) as i64
    }

    fn fits(&self, bi: u32) -> bool {
        let b = &self.blocks[bi as usize];
        self.cover1[b.k1 - 1..b.end1()].iter().all(|c| !c)
            && self.cover2[b.k2 - 1..b.end2()].iter().all(|c| !c)
    }

    fn first_open(&self, from: usize) -> usize {
        (from..self.n).find(|&p| !self.cover1[p]).unwrap_or(self.n)
    }

    /// Admissible bound: every uncovered run of either string needs at least
    /// `ceil(run / L)` further blocks, where `L` bounds the length of any
    /// block that still fits (longest block, longest open run in s1 and s2).
    fn lower_bound(&self) -> i64 {
        if self.covered == self.n {
            return self.count();
        }
        let runs = |cover: &[bool]| {
            let mut out = Vec::new();
            let mut run = 0usize;
            for &c in cover {
                if c {
                    if run > 0 {
                        out.push(run);
                    }
                    run = 0;
                } else {
                    run += 1;
                }
            }
            if run > 0 {
                out.push(run);
            }
            out
        };
        let r1 = runs(&self.cover1);
        let r2 = runs(&self.cover2);
        let longest = |r: &[usize]| r.iter().copied().max().unwrap_or(0);
        let cap = self.max_len.min(longest(&r1)).min(longest(&r2));
        if cap == 0 {
            return i64::MAX;
        }
        let need = |r: &[usize]| r.iter().map(|x| x.div_ceil(cap)).sum::<usize>();
        self.count() + need(&r1).max(need(&r2)) as i64
    }

    fn record(&self, best: &mut Incumbent, budget: &Budget) {
        let t = budget.elapsed();
        best.value = self.count();
        best.sel = self.fixed.iter().chain(&self.chosen).copied().collect();
        best.time_first.get_or_insert(t);
        best.time_best = Some(t);
    }

    /// Smallest bound among open frames.
    fn open_bound(&self) -> Option<i64> {
        self.stack.iter().map(|f| f.lb).min()
    }

    /// Explores at most `quota` nodes. Solutions strictly better than
    /// `best.value` replace it.
    fn run(&mut self, best: &mut Incumbent, quota: u64, budget: &mut Budget) -> Run {
        if self.complete_at_root {
            self.complete_at_root = false;
            if self.count() < best.value {
                self.record(best, budget);
            }
        }
        let mut used = 0;
        while let Some(top) = self.stack.last() {
            if top.lb >= best.value {
                self.pop();
                continue;
            }
            if budget.exhausted(best.found()) {
                return Run::Stopped;
            }
            if used >= quota {
                return Run::Paused;
            }
            let pos = top.pos;
            let k = self.stack.len() - 1;
            let mut next = self.stack[k].next;
            let mut child = None;
            while next < self.starts[pos].len() {
                let bi = self.starts[pos][next];
                next += 1;
                if self.fits(bi) {
                    child = Some(bi);
                    break;
                }
            }
            self.stack[k].next = next;
            let Some(bi) = child else {
                self.pop();
                continue;
            };
            used += 1;
            budget.nodes += 1;
            self.apply(bi);
            if self.covered == self.n {
                if self.count() < best.value {
                    self.record(best, budget);
                }
                self.undo(bi);
                continue;
            }
            let lb = self.lower_bound();
            if lb >= best.value {
                self.undo(bi);
                continue;
            }
            let next_pos = self.first_open(pos);
            self.stack.push(Frame {
                pos: next_pos,
                next: 0,
                lb,
                entered: Some(bi),
            });
        }
        Run::Finished
    }
}

/// One window re-solve around the incumbent. Blocks in `forced` (sorted
/// indices) are never freed. Equal-value moves are accepted.
fn improve_once(
    n: usize,
    blocks: &[CommonBlock],
    by_start: &[Vec<u32>],
    forced: &[u32],
    rng: &mut ChaCha8Rng,
    best: &mut Incumbent,
    budget: &mut Budget,
) -> Run {
    if budget.exhausted(true) {
        return Run::Stopped;
    }
    let lo = (n / 40).clamp(4, 8).min(n);
    let hi = (n / 10).clamp(8, 16).min(n);
    let width = rng.gen_range(lo..=hi);
    let a = rng.gen_range(0..=n - width);
    let b = a + width;
    let in_s1 = rng.gen_bool(0.5);
    let radius = rng.gen_range(0..=width / 4);

    let is_forced = |bi: u32| forced.binary_search(&bi).is_ok();
    let span = |blk: &CommonBlock| {
        if in_s1 {
            (blk.k1 - 1, blk.k2 - 1)
        } else {
            (blk.k2 - 1, blk.k1 - 1)
        }
    };
    let mut near = vec![false; n];
    for &bi in &best.sel {
        let blk = blocks[bi as usize];
        let (start, other) = span(&blk);
        if !is_forced(bi) && start < b && start + blk.len > a {
            near[other.saturating_sub(radius)..(other + blk.len + radius).min(n)].fill(true);
        }
    }
    let mut kept = Vec::new();
    let mut cover1 = vec![false; n];
    let mut cover2 = vec![false; n];
    for &bi in &best.sel {
        let blk = blocks[bi as usize];
        let (start, other) = span(&blk);
        let freed =
            (start < b && start + blk.len > a) || near[other..other + blk.len].iter().any(|&x| x);
        if freed && !is_forced(bi) {
            continue;
        }
        cover1[blk.k1 - 1..blk.end1()].fill(true);
        cover2[blk.k2 - 1..blk.end2()].fill(true);
        kept.push(bi);
    }
    if kept.len() == best.sel.len() {
        return Run::Finished;
    }
    let prefix = |cover: &[bool]| {
        let mut p = vec![0u32; n + 1];
        for (i, &c) in cover.iter().enumerate() {
            p[i + 1] = p[i] + c as u32;
        }
        p
    };
    let p1 = prefix(&cover1);
    let p2 = prefix(&cover2);
    // only blocks starting at a freed s1 position can fit
    let candidates = (0..n)
        .filter(|&p| !cover1[p])
        .flat_map(|p| &by_start[p])
        .copied()
        .filter(|&bi| {
            let blk = &blocks[bi as usize];
            p1[blk.end1()] == p1[blk.k1 - 1] && p2[blk.end2()] == p2[blk.k2 - 1]
        });
    let mut sub = Completion::new(n, blocks, candidates, kept);
    let mut local = Incumbent {
        sel: Vec::new(),
        value: best.value + 1,
        time_first: best.time_first,
        time_best: best.time_best,
    };
    let run = sub.run(&mut local, LNS_QUOTA, budget);
    if !local.sel.is_empty() && local.value <= best.value {
        if local.value == best.value {
            local.time_best = best.time_best;
        }
        *best = local;
    }
    run
}

/// Minimum-cardinality exact partition over `blocks`, with every block of
/// `forced` pre-selected.
///
/// Branches on the leftmost uncovered position of `s1`, trying the blocks
/// starting there from longest to shortest (ties by ascending `k2`).
pub fn solve_min_partition(
    inst: &Instance,
    blocks: &BlockSet,
    forced: &[CommonBlock],
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    blocks.check_against(inst)?;
    match validate_blocks(inst, forced) {
        Validity::Invalid(Violation::NotCommon(b)) => {
            return Err(Error::NotACommonBlock {
                k1: b.k1,
                k2: b.k2,
                len: b.len,
            })
        }
        Validity::Invalid(_) => return Err(Error::ForcedOverlap),
        _ => {}
    }
    let mut forced_idx = Vec::with_capacity(forced.len());
    for b in forced {
        match blocks.index_of(b) {
            Some(i) => forced_idx.push(i as u32),
            None => {
                return Err(Error::ForcedNotInSet {
                    k1: b.k1,
                    k2: b.k2,
                    len: b.len,
                })
            }
        }
    }
    forced_idx.sort_unstable();

    let n = inst.n();
    let bs = blocks.as_slice();
    let mut budget = Budget::new(cfg);
    let mut best = Incumbent {
        sel: Vec::new(),
        value: i64::MAX,
        time_first: None,
        time_best: None,
    };
    let start = Partition::from_blocks(n, forced.iter().copied()).expect("validated above");
    let greedy = greedy_extend(inst, blocks, start);
    let greedy_sel: Option<Vec<u32>> = greedy
        .blocks()
        .iter()
        .map(|b| blocks.index_of(b).map(|i| i as u32))
        .collect();
    if let Some(sel) = greedy_sel {
        let t = budget.elapsed();
        best = Incumbent {
            value: sel.len() as i64,
            sel,
            time_first: Some(t),
            time_best: Some(t),
        };
    }

    let mut tree = Completion::new(n, bs, 0..bs.len() as u32, forced_idx.clone());
    let by_start = tree.starts.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(LNS_SEED);
    let stopped = loop {
        match tree.run(&mut best, TREE_SLICE, &mut budget) {
            Run::Finished => break false,
            Run::Stopped => break true,
            Run::Paused => {}
        }
        let mut spent = 0;
        let mut halted = false;
        while spent < LNS_SLICE && best.found() {
            let before = budget.nodes;
            if let Run::Stopped = improve_once(
                n,
                bs,
                &by_start,
                &forced_idx,
                &mut rng,
                &mut best,
                &mut budget,
            ) {
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
    let objective = best.found().then_some(best.value);
    let (status, bound) = match (objective, stopped) {
        (Some(v), false) => (SolveStatus::ProvenOptimal, v),
        (None, false) => return Err(Error::Infeasible),
        (v, true) => {
            let open = tree.open_bound().unwrap_or(i64::MAX);
            match v {
                Some(v) => (SolveStatus::FeasibleTimeLimit, open.min(v)),
                None => (SolveStatus::NoSolutionTimeLimit, open),
            }
        }
    };
    let incumbent = objective.map(|_| {
        Partition::from_blocks(n, best.sel.iter().map(|&i| bs[i as usize]))
            .expect("search only places non-overlapping blocks")
    });
    Ok(SolveResult {
        status,
        sense: Sense::Minimize,
        gap: objective.map(|v| relative_gap(v, bound)),
        incumbent,
        objective,
        bound,
        time_first_s: best.time_first,
        time_best_s: best.time_best,
        time_total_s: time_total,
        nodes: budget.nodes,
        block_set_size: blocks.len(),
    })
}
