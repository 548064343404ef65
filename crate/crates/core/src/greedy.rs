//! Greedy baseline: repeatedly take a longest block compatible with the
//! blocks chosen so far.

use crate::blocks::{enumerate_blocks, BlockSet};
use crate::instance::{Instance, Partition};

/// Greedy partition of the instance. Ties between equally long blocks go to
/// the smaller `k1`, then the smaller `k2`.
pub fn greedy_partition(inst: &Instance) -> Partition {
    greedy_over(inst, &enumerate_blocks(inst))
}

/// Greedy over a precomputed block set.
///
/// Blocks that become incompatible stay incompatible, so a single pass over
/// the canonical order picks exactly the longest compatible block at every
/// step. If `blocks` lacks the singletons needed to finish, the result is
/// completed with the singleton matching of the uncovered positions.
pub fn greedy_over(inst: &Instance, blocks: &BlockSet) -> Partition {
    greedy_extend(inst, blocks, Partition::empty(inst.n()))
}

/// Greedy continuation of an existing partial partition.
pub fn greedy_extend(inst: &Instance, blocks: &BlockSet, start: Partition) -> Partition {
    let mut p = start;
    for b in blocks {
        if p.is_complete() {
            break;
        }
        if p.can_add(b) {
            p.try_add(*b).expect("checked by can_add");
        }
    }
    if !p.is_complete() {
        complete_with_singletons(inst, &mut p);
    }
    p
}

pub(crate) fn complete_with_singletons(inst: &Instance, p: &mut Partition) {
    let n = inst.n();
    let (a, b) = (inst.symbols1(), inst.symbols2());
    for (i, &ai) in a.iter().enumerate() {
        if p.cover1()[i] {
            continue;
        }
        let j = (0..n)
            .find(|&j| !p.cover2()[j] && b[j] == ai)
            .expect("uncovered parts of related strings have equal letter multisets");
        p.try_add(crate::instance::CommonBlock::new(i + 1, j + 1, 1))
            .expect("both positions are uncovered");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::CommonBlock;

    #[test]
    fn example_trace() {
        let inst = Instance::new("AGACTG", "ACTAGG").unwrap();
        let p = greedy_partition(&inst);
        assert_eq!(
            p.blocks(),
            &[
                CommonBlock::new(3, 1, 3),
                CommonBlock::new(1, 4, 2),
                CommonBlock::new(6, 6, 1)
            ]
        );
    }

    #[test]
    fn identical_and_swapped() {
        let inst = Instance::new("AGGC", "AGGC").unwrap();
        assert_eq!(greedy_partition(&inst).len(), 1);
        let inst = Instance::new("AB", "BA").unwrap();
        assert_eq!(greedy_partition(&inst).len(), 2);
    }

    #[test]
    fn completes_without_singletons() {
        let inst = Instance::new("AGACTG", "ACTAGG").unwrap();
        let b = enumerate_blocks(&inst).filter_min_length(2);
        let p = greedy_over(&inst, &b);
        assert!(p.is_complete());
    }
}
