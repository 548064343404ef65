//! The three set-partitioning programs over common blocks.
//!
//! Every model has one binary variable `x<i>` per block of its block set
//! (1-based canonical index within that set). Coverage rows are built from
//! block intervals directly; the block-by-position incidence matrices are
//! never stored densely.
//!
//! Row order is fixed: the length row, then s1 coverage rows for positions
//! 1..n, then s2 coverage rows, then one `x = 1` row per forced block.

use std::collections::HashMap;

use crate::blocks::BlockSet;
use crate::error::{Error, Result};
use crate::instance::{validate_blocks, CommonBlock, Instance, Partition, Validity};
use crate::lp::{Comparator, Constraint, LinearProgram, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Minimum number of blocks, exact partition.
    Orig,
    /// Maximum weighted coverage over blocks of length `>= l`.
    Phase1 { l: usize, weight: i64 },
    /// Exact partition over a reduced block set with forced blocks.
    Phase2,
}

impl Formulation {
    pub fn label(&self) -> &'static str {
        match self {
            Formulation::Orig => "orig",
            Formulation::Phase1 { .. } => "ph1",
            Formulation::Phase2 => "ph2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub formulation: Formulation,
    pub n: usize,
    pub blocks: BlockSet,
    /// Indices (into `blocks`) of variables fixed to one.
    pub fixed: Vec<usize>,
    pub program: LinearProgram,
}

/// Phase-1 weight constant `C = n + 1`: one extra covered position always
/// outweighs any difference in block count.
pub fn phase1_weight(n: usize) -> i64 {
    n as i64 + 1
}

fn var_name(i: usize) -> String {
    format!("x{}", i + 1)
}

fn build(
    inst: &Instance,
    blocks: &BlockSet,
    sense: Sense,
    objective: Vec<i64>,
    cmp: Comparator,
    fixed: &[usize],
) -> LinearProgram {
    let n = inst.n();
    let mut rows1: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    let mut rows2: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (v, b) in blocks.iter().enumerate() {
        for j in b.k1..=b.end1() {
            rows1[j - 1].push((v, 1));
        }
        for j in b.k2..=b.end2() {
            rows2[j - 1].push((v, 1));
        }
    }
    let mut constraints = Vec::with_capacity(2 * n + 1 + fixed.len());
    constraints.push(Constraint {
        name: "len".into(),
        terms: blocks
            .iter()
            .enumerate()
            .map(|(v, b)| (v, b.len as i64))
            .collect(),
        cmp,
        rhs: n as i64,
    });
    for (prefix, rows) in [("s1_", rows1), ("s2_", rows2)] {
        for (j, terms) in rows.into_iter().enumerate() {
            // an empty `<= 1` row is vacuous; empty `= 1` rows are kept so
            // that infeasibility stays visible
            if terms.is_empty() && cmp == Comparator::Le {
                continue;
            }
            constraints.push(Constraint {
                name: format!("{prefix}{}", j + 1),
                terms,
                cmp,
                rhs: 1,
            });
        }
    }
    for &v in fixed {
        constraints.push(Constraint {
            name: format!("fix_{}", var_name(v)),
            terms: vec![(v, 1)],
            cmp: Comparator::Eq,
            rhs: 1,
        });
    }
    LinearProgram {
        sense,
        var_names: (0..blocks.len()).map(var_name).collect(),
        objective,
        constraints,
    }
}

/// The exact model: minimise the number of blocks subject to exact coverage
/// of both strings.
pub fn build_ilp_orig(inst: &Instance, blocks: &BlockSet) -> Result<IlpModel> {
    blocks.check_against(inst)?;
    let program = build(
        inst,
        blocks,
        Sense::Minimize,
        vec![1; blocks.len()],
        Comparator::Eq,
        &[],
    );
    Ok(IlpModel {
        formulation: Formulation::Orig,
        n: inst.n(),
        blocks: blocks.clone(),
        fixed: Vec::new(),
        program,
    })
}

/// Phase-1 model: maximise `sum (C*len - 1) x` with all rows relaxed to `<=`.
/// `blocks` is expected to be `B_{>=l}`; `l` is recovered as its shortest
/// block length.
pub fn build_ilp_ph1(inst: &Instance, blocks: &BlockSet, weight: i64) -> Result<IlpModel> {
    if blocks.is_empty() {
        return Err(Error::EmptyBlockSet);
    }
    let min = phase1_weight(inst.n());
    if weight < min {
        return Err(Error::WeightTooSmall { c: weight, min });
    }
    blocks.check_against(inst)?;
    let l = blocks.iter().map(|b| b.len).min().unwrap_or(1);
    let objective = blocks.iter().map(|b| weight * b.len as i64 - 1).collect();
    let program = build(
        inst,
        blocks,
        Sense::Maximize,
        objective,
        Comparator::Le,
        &[],
    );
    Ok(IlpModel {
        formulation: Formulation::Phase1 { l, weight },
        n: inst.n(),
        blocks: blocks.clone(),
        fixed: Vec::new(),
        program,
    })
}

/// Phase-2 model: the exact model over `blocks` with every block of `forced`
/// fixed to one.
pub fn build_ilp_ph2(
    inst: &Instance,
    blocks: &BlockSet,
    forced: &[CommonBlock],
) -> Result<IlpModel> {
    blocks.check_against(inst)?;
    if let Validity::Invalid(_) = validate_blocks(inst, forced) {
        return Err(Error::ForcedOverlap);
    }
    let mut fixed = forced
        .iter()
        .map(|b| {
            blocks.index_of(b).ok_or(Error::ForcedNotInSet {
                k1: b.k1,
                k2: b.k2,
                len: b.len,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fixed.sort_unstable();
    let program = build(
        inst,
        blocks,
        Sense::Minimize,
        vec![1; blocks.len()],
        Comparator::Eq,
        &fixed,
    );
    Ok(IlpModel {
        formulation: Formulation::Phase2,
        n: inst.n(),
        blocks: blocks.clone(),
        fixed,
        program,
    })
}

impl IlpModel {
    pub fn num_vars(&self) -> usize {
        self.program.num_vars()
    }

    pub fn num_constraints(&self) -> usize {
        self.program.constraints.len()
    }

    /// LP-format text of the model.
    pub fn to_lp_string(&self) -> String {
        let header = match self.formulation {
            Formulation::Orig => format!("MCSP exact model, n={}, m={}", self.n, self.num_vars()),
            Formulation::Phase1 { l, weight } => format!(
                "MCSP phase-1 model, n={}, l={l}, C={weight}, m={}",
                self.n,
                self.num_vars()
            ),
            Formulation::Phase2 => format!(
                "MCSP phase-2 model, n={}, m={}, forced={}",
                self.n,
                self.num_vars(),
                self.fixed.len()
            ),
        };
        self.program.to_lp_string(&header)
    }

    pub fn write_lp<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_lp_string().as_bytes())
    }

    /// Maps a variable name back to its block.
    pub fn block_of(&self, name: &str) -> Option<CommonBlock> {
        let i: usize = name.strip_prefix('x')?.parse().ok()?;
        self.blocks.get(i.checked_sub(1)?).copied()
    }
}

/// Reads a solver assignment (`<name> <value>` per line, unlisted variables
/// are zero) and returns the selected blocks as a partition, after checking
/// every model row.
pub fn import_solution(model: &IlpModel, text: &str) -> Result<Partition> {
    let index: HashMap<&str, usize> = model
        .program
        .var_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut values = vec![false; model.num_vars()];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(raw), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::InvalidSolution(format!(
                "expected `<name> <value>`, got {line:?}"
            )));
        };
        let &v = index
            .get(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let non_binary = || Error::NonBinaryValue {
            name: name.to_string(),
            value: raw.to_string(),
        };
        let x: f64 = raw.parse().map_err(|_| non_binary())?;
        values[v] = if x == 0.0 {
            false
        } else if x == 1.0 {
            true
        } else {
            return Err(non_binary());
        };
    }
    if let Some(c) = model.program.first_violation(&values) {
        return Err(Error::ConstraintViolation(c.name.clone()));
    }
    let selected: Vec<CommonBlock> = model
        .blocks
        .iter()
        .zip(&values)
        .filter(|(_, &x)| x)
        .map(|(b, _)| *b)
        .collect();
    Partition::from_blocks(model.n, selected).map_err(|v| Error::InvalidSolution(v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::enumerate_blocks;
    use crate::instance::Validity;

    fn ex() -> (Instance, BlockSet) {
        let inst = Instance::new("AGACTG", "ACTAGG").unwrap();
        let b = enumerate_blocks(&inst);
        (inst, b)
    }

    fn var_of(model: &IlpModel, k1: usize, k2: usize, len: usize) -> usize {
        model
            .blocks
            .index_of(&CommonBlock::new(k1, k2, len))
            .unwrap()
    }

    #[test]
    fn orig_dimensions_and_rows() {
        let (inst, b) = ex();
        let m = build_ilp_orig(&inst, &b).unwrap();
        assert_eq!(m.num_vars(), 14);
        assert_eq!(m.num_constraints(), 13);
        let row = &m.program.constraints[3];
        assert_eq!(row.name, "s1_3");
        let mut got: Vec<usize> = row.terms.iter().map(|t| t.0).collect();
        got.sort();
        let mut want = vec![
            var_of(&m, 3, 1, 3),
            var_of(&m, 3, 1, 2),
            var_of(&m, 3, 1, 1),
            var_of(&m, 3, 4, 1),
        ];
        want.sort();
        assert_eq!(got, want);

        let one = Instance::new("A", "A").unwrap();
        let m = build_ilp_orig(&one, &enumerate_blocks(&one)).unwrap();
        assert_eq!((m.num_vars(), m.num_constraints()), (1, 3));
    }

    #[test]
    fn row_memberships_sum_to_lengths() {
        let (inst, b) = ex();
        let m = build_ilp_orig(&inst, &b).unwrap();
        let total_len: usize = b.iter().map(|b| b.len).sum();
        let s1: usize = m.program.constraints[1..7]
            .iter()
            .map(|c| c.terms.len())
            .sum();
        let s2: usize = m.program.constraints[7..13]
            .iter()
            .map(|c| c.terms.len())
            .sum();
        assert_eq!(s1, total_len);
        assert_eq!(s2, total_len);
    }

    #[test]
    fn ph1_objective_and_errors() {
        let (inst, b) = ex();
        let m = build_ilp_ph1(&inst, &b.filter_min_length(2), 7).unwrap();
        assert_eq!(m.program.objective, vec![20, 13, 13, 13]);
        assert_eq!(m.program.sense, Sense::Maximize);
        assert_eq!(m.formulation, Formulation::Phase1 { l: 2, weight: 7 });
        assert!(m
            .program
            .constraints
            .iter()
            .all(|c| c.cmp == Comparator::Le));
        // empty selection feasible
        assert!(m.program.first_violation(&[false; 4]).is_none());
        assert_eq!(
            build_ilp_ph1(&inst, &b.filter_min_length(4), 7),
            Err(Error::EmptyBlockSet)
        );
        assert_eq!(
            build_ilp_ph1(&inst, &b.filter_min_length(2), 6),
            Err(Error::WeightTooSmall { c: 6, min: 7 })
        );
    }

    #[test]
    fn ph2_forcing() {
        let (inst, b) = ex();
        let forced = [CommonBlock::new(3, 1, 3), CommonBlock::new(1, 4, 2)];
        let bph2 = BlockSet::from_blocks(
            forced
                .iter()
                .copied()
                .chain([CommonBlock::new(6, 6, 1)])
                .collect(),
        );
        let m = build_ilp_ph2(&inst, &bph2, &forced).unwrap();
        assert_eq!(m.fixed, vec![0, 1]);
        assert_eq!(m.num_constraints(), 13 + 2);
        assert_eq!(m.program.constraints[13].name, "fix_x1");

        let none = build_ilp_ph2(&inst, &b, &[]).unwrap();
        let orig = build_ilp_orig(&inst, &b).unwrap();
        assert_eq!(none.program, orig.program);

        let overlap = [CommonBlock::new(3, 1, 3), CommonBlock::new(3, 1, 2)];
        assert_eq!(
            build_ilp_ph2(&inst, &b, &overlap),
            Err(Error::ForcedOverlap)
        );
    }

    #[test]
    fn lp_round_trip_and_import() {
        let (inst, b) = ex();
        let m = build_ilp_orig(&inst, &b).unwrap();
        let text = m.to_lp_string();
        assert_eq!(LinearProgram::parse_lp(&text).unwrap(), m.program);
        assert_eq!(text.matches("Binaries").count(), 1);

        let sel = format!(
            "x{} 1\nx{} 1\nx{} 1\n",
            var_of(&m, 3, 1, 3) + 1,
            var_of(&m, 1, 4, 2) + 1,
            var_of(&m, 6, 6, 1) + 1
        );
        let p = import_solution(&m, &sel).unwrap();
        assert!(p.is_complete());
        assert_eq!(p.len(), 3);
        assert_eq!(validate_blocks(&inst, p.blocks()), Validity::Complete);

        let bad = format!(
            "x{} 1\nx{} 1\n",
            var_of(&m, 3, 1, 3) + 1,
            var_of(&m, 3, 1, 2) + 1
        );
        assert!(matches!(
            import_solution(&m, &bad),
            Err(Error::ConstraintViolation(_))
        ));
        assert_eq!(
            import_solution(&m, "y 1\n"),
            Err(Error::UnknownVariable("y".into()))
        );
        assert!(matches!(
            import_solution(&m, "x1 0.5\n"),
            Err(Error::NonBinaryValue { .. })
        ));

        let ph1 = build_ilp_ph1(&inst, &b.filter_min_length(2), 7).unwrap();
        let p = import_solution(&ph1, "").unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn single_binary_declaration() {
        let one = Instance::new("A", "A").unwrap();
        let m = build_ilp_orig(&one, &enumerate_blocks(&one)).unwrap();
        let text = m.to_lp_string();
        let after = text.split("Binaries\n").nth(1).unwrap();
        assert_eq!(after, " x1\nEnd\n");
    }

    #[test]
    fn block_of_names() {
        let (inst, b) = ex();
        let m = build_ilp_orig(&inst, &b).unwrap();
        assert_eq!(m.block_of("x1"), Some(CommonBlock::new(3, 1, 3)));
        assert_eq!(m.block_of("x0"), None);
        assert_eq!(m.block_of("x15"), None);
    }
}
