//! Positive 1-in-3 formulas, planar 3-SAT instances and exhaustive oracles.

pub mod embed;
pub mod gadgets;
pub mod io;
pub mod random;
pub mod transform;

use rayon::prelude::*;
use thiserror::Error;

pub use embed::{
    validate_embedding, ClausePlacement, EmbedIssue, EmbeddingReport, LegPath,
    embed_line, line_model, LineClause, RectilinearEmbedding, Side, VarPlacement,
};
pub use gadgets::{build_gadget, GadgetKind, Namer};
pub use transform::{transform_instance, Transformed};

pub const BRUTE_FORCE_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("{0} variables exceed the brute-force budget")]
    TooLarge(usize),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub neg: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, neg: false }
    }
    pub fn neg(var: usize) -> Self {
        Lit { var, neg: true }
    }
}

/// Conjunction of exactly-one-of-three clauses over positive variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Formula1in3 {
    pub vars: Vec<String>,
    pub clauses: Vec<[usize; 3]>,
}

impl Formula1in3 {
    pub fn var(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(name.into());
        self.vars.len() - 1
    }

    /// Each clause names three distinct variables.
    pub fn is_well_formed(&self) -> bool {
        self.clauses.iter().all(|c| {
            c[0] != c[1] && c[1] != c[2] && c[0] != c[2] && c.iter().all(|&v| v < self.vars.len())
        })
    }
}

/// A CNF with at most three literals per clause plus its planar embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planar3SatInstance {
    pub vars: Vec<String>,
    pub clauses: Vec<Vec<Lit>>,
    pub embedding: RectilinearEmbedding,
}

impl Planar3SatInstance {
    /// Embedding report plus a check that it covers exactly the clause incidences.
    pub fn validate(&self) -> EmbeddingReport {
        let mut rep = validate_embedding(&self.embedding);
        if self.embedding.clauses.len() != self.clauses.len() {
            rep.issues.push(EmbedIssue::Coverage(format!(
                "{} clause placements for {} clauses",
                self.embedding.clauses.len(),
                self.clauses.len()
            )));
            return rep;
        }
        for (i, c) in self.clauses.iter().enumerate() {
            let mut want: Vec<usize> = c.iter().map(|l| l.var).collect();
            want.sort_unstable();
            want.dedup();
            let mut have = self.embedding.clauses[i].vars.clone();
            have.sort_unstable();
            if want != have {
                rep.issues.push(EmbedIssue::Coverage(format!(
                    "clause {i} placement lists {have:?}, clause uses {want:?}"
                )));
            }
        }
        rep
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatOutcome {
    pub satisfiable: bool,
    pub witness: Option<Vec<bool>>,
    pub model_count: u64,
}

/// Exhaustive 1-in-3 enumeration with optionally fixed variables.
pub fn brute_force_1in3_with(
    f: &Formula1in3,
    fixed: &[(usize, bool)],
) -> Result<SatOutcome, SatError> {
    let n = f.vars.len();
    if n > BRUTE_FORCE_VARS {
        return Err(SatError::TooLarge(n));
    }
    let (fix_mask, fix_val) = fixed.iter().fold((0u32, 0u32), |(m, v), &(x, b)| {
        (m | 1 << x, v | (b as u32) << x)
    });
    let total: u64 = 1 << n;
    let block: u64 = 1 << 12;
    let blocks = total.div_ceil(block);
    let per_block: Vec<(u64, Option<u32>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut count = 0;
            let mut first = None;
            for a in b * block..((b + 1) * block).min(total) {
                let a = a as u32;
                if a & fix_mask != fix_val {
                    continue;
                }
                // repeated variables count once per occurrence
                if f.clauses
                    .iter()
                    .all(|c| c.iter().map(|&v| a >> v & 1).sum::<u32>() == 1)
                {
                    count += 1;
                    first.get_or_insert(a);
                }
            }
            (count, first)
        })
        .collect();
    let model_count = per_block.iter().map(|b| b.0).sum();
    let witness = per_block
        .iter()
        .find_map(|b| b.1)
        .map(|a| (0..n).map(|i| a >> i & 1 == 1).collect());
    Ok(SatOutcome {
        satisfiable: model_count > 0,
        witness,
        model_count,
    })
}

pub fn brute_force_1in3(f: &Formula1in3) -> Result<SatOutcome, SatError> {
    brute_force_1in3_with(f, &[])
}

/// Exhaustive enumeration of a CNF.
pub fn brute_force_cnf(nvars: usize, clauses: &[Vec<Lit>]) -> Result<SatOutcome, SatError> {
    if nvars > BRUTE_FORCE_VARS {
        return Err(SatError::TooLarge(nvars));
    }
    let mut count = 0u64;
    let mut witness = None;
    for a in 0u32..(1u32 << nvars) {
        let ok = clauses
            .iter()
            .all(|c| c.iter().any(|l| (a >> l.var & 1 == 1) != l.neg));
        if ok {
            count += 1;
            witness.get_or_insert_with(|| (0..nvars).map(|i| a >> i & 1 == 1).collect());
        }
    }
    Ok(SatOutcome {
        satisfiable: count > 0,
        witness,
        model_count: count,
    })
}

/// Complete backtracking search for 1-in-3 formulas of any size.
///
/// Propagation: a true variable falsifies its clause partners, and a clause
/// with two false variables forces the third.
pub fn search_1in3(f: &Formula1in3) -> Option<Vec<bool>> {
    let n = f.vars.len();
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in f.clauses.iter().enumerate() {
        for &v in c {
            occ[v].push(ci);
        }
    }
    let mut val: Vec<Option<bool>> = vec![None; n];
    if solve(f, &occ, &mut val) {
        Some(val.into_iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        None
    }
}

fn propagate(
    f: &Formula1in3,
    occ: &[Vec<usize>],
    val: &mut [Option<bool>],
    trail: &mut Vec<usize>,
    start: usize,
) -> bool {
    let mut queue = vec![start];
    while let Some(v) = queue.pop() {
        for &ci in &occ[v] {
            let c = f.clauses[ci];
            let trues = c.iter().filter(|&&x| val[x] == Some(true)).count();
            let falses = c.iter().filter(|&&x| val[x] == Some(false)).count();
            if trues > 1 || falses == 3 {
                return false;
            }
            let forced = if trues == 1 {
                Some(false)
            } else if falses == 2 {
                Some(true)
            } else {
                None
            };
            if let Some(b) = forced {
                for &x in &c {
                    if val[x].is_none() {
                        val[x] = Some(b);
                        trail.push(x);
                        queue.push(x);
                    }
                }
            }
        }
    }
    true
}

fn solve(f: &Formula1in3, occ: &[Vec<usize>], val: &mut Vec<Option<bool>>) -> bool {
    // most constrained unassigned variable
    let Some(v) = (0..val.len())
        .filter(|&v| val[v].is_none())
        .max_by_key(|&v| occ[v].len())
    else {
        return true;
    };
    for b in [false, true] {
        let mut trail = vec![v];
        val[v] = Some(b);
        if propagate(f, occ, val, &mut trail, v) && solve(f, occ, val) {
            return true;
        }
        for x in trail {
            val[x] = None;
        }
    }
    false
}

pub fn check_1in3(f: &Formula1in3, a: &[bool]) -> bool {
    f.clauses
        .iter()
        .all(|c| c.iter().filter(|&&v| a[v]).count() == 1)
}

pub fn check_cnf(clauses: &[Vec<Lit>], a: &[bool]) -> bool {
    clauses.iter().all(|c| c.iter().any(|l| a[l.var] != l.neg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(n: usize, clauses: &[[usize; 3]]) -> Formula1in3 {
        Formula1in3 {
            vars: (0..n).map(|i| format!("v{i}")).collect(),
            clauses: clauses.to_vec(),
        }
    }

    #[test]
    fn single_clause() {
        let f = formula(3, &[[0, 1, 2]]);
        let r = brute_force_1in3(&f).unwrap();
        assert!(r.satisfiable);
        assert_eq!(r.witness, Some(vec![true, false, false]));
        assert_eq!(r.model_count, 3);
    }

    #[test]
    fn inequality_block() {
        // x a y b c d
        let f = formula(6, &[[0, 1, 2], [1, 3, 4], [1, 4, 5], [3, 4, 5]]);
        assert!(
            !brute_force_1in3_with(&f, &[(0, true), (2, true)])
                .unwrap()
                .satisfiable
        );
        assert!(
            brute_force_1in3_with(&f, &[(0, true), (2, false)])
                .unwrap()
                .satisfiable
        );
    }

    #[test]
    fn budget() {
        let f = formula(25, &[[0, 1, 2]]);
        assert_eq!(brute_force_1in3(&f), Err(SatError::TooLarge(25)));
    }

    #[test]
    fn search_agrees_on_k4() {
        let f = formula(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]);
        assert!(search_1in3(&f).is_none());
        assert!(!brute_force_1in3(&f).unwrap().satisfiable);
        let g = formula(5, &[[0, 1, 2], [2, 3, 4]]);
        let a = search_1in3(&g).unwrap();
        assert!(check_1in3(&g, &a));
    }
}
