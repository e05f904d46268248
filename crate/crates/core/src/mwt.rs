//! Minimum-weight triangulation of a simple polygon.
//!
//! The dynamic program runs over vertex ranges `(i, k)` and split vertices
//! `j`, accepting triangle `(i, j, k)` when it is counterclockwise or
//! collinear. No crossing tests are needed: a fan-recursive family of
//! counterclockwise triangles always tiles the polygon.
//!
//! Costs are interval sums. Two partial solutions are only discarded when
//! their enclosures are separated by more than the width that the rest of
//! the triangulation could still add, so the surviving set is exactly the set
//! of triangulations whose enclosure reaches below the best upper bound.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{IntInterval, WORK_SCALE};
use crate::geometry::{cross_i, edge_length_i, Polygon, Triangulation};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeConstraint {
    pub forbidden: BTreeSet<(usize, usize)>,
}

impl EdgeConstraint {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn forbid(pairs: &[(usize, usize)]) -> Self {
        EdgeConstraint {
            forbidden: pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
        }
    }

    pub fn is_forbidden(&self, a: usize, b: usize) -> bool {
        self.forbidden.contains(&(a.min(b), a.max(b)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MwtResult {
    pub optimal_cost: IntInterval,
    pub witness: Triangulation,
    pub multiplicity: BigUint,
    pub candidates_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MwtError {
    #[error("no feasible triangulation")]
    NoFeasibleTriangulation,
    #[error("every surviving optimum is degenerate")]
    OnlyDegenerateOptimal,
    #[error("polygon has {0} vertices, above the brute-force budget")]
    TooLarge(usize),
    #[error("polygon needs at least 3 vertices")]
    TooFewVertices,
    #[error("coordinates do not fit in 64-bit integers")]
    CoordinateOverflow,
}

pub const BRUTE_FORCE_MAX: usize = 14;

struct Prepared {
    n: usize,
    pts: Vec<(i64, i64)>,
    len: Vec<IntInterval>,
    scale: u32,
}

impl Prepared {
    fn new(poly: &Polygon, scale: u32) -> Result<Self, MwtError> {
        let n = poly.len();
        if n < 3 {
            return Err(MwtError::TooFewVertices);
        }
        let pts = poly.int_coords().ok_or(MwtError::CoordinateOverflow)?;
        let coord = poly.scale();
        let mut len = vec![IntInterval::zero(scale); n * n];
        for i in 0..n {
            for k in i + 2..n {
                if i == 0 && k == n - 1 {
                    continue;
                }
                len[i * n + k] = edge_length_i(pts[i], pts[k], coord, scale);
            }
        }
        Ok(Prepared { n, pts, len, scale })
    }

    fn chord(&self, i: usize, k: usize) -> Option<&IntInterval> {
        if k == i + 1 || (i == 0 && k == self.n - 1) {
            None
        } else {
            Some(&self.len[i * self.n + k])
        }
    }

    /// Width the remaining edges of a triangulation can add, in ulps.
    fn slack(&self) -> BigInt {
        BigInt::from(self.n.saturating_sub(3))
    }
}

#[derive(Debug, Clone)]
struct Entry {
    lo: BigInt,
    hi: BigInt,
    degenerate: bool,
    count: BigUint,
    split: u32,
    left: u32,
    right: u32,
}

/// Optimal internal cost at the default working precision.
pub fn polygon_mwt(poly: &Polygon, constraint: &EdgeConstraint) -> Result<MwtResult, MwtError> {
    polygon_mwt_at(poly, constraint, WORK_SCALE)
}

pub fn polygon_mwt_at(
    poly: &Polygon,
    constraint: &EdgeConstraint,
    scale: u32,
) -> Result<MwtResult, MwtError> {
    let prep = Prepared::new(poly, scale)?;
    let n = prep.n;
    let slack = prep.slack();
    let mut cells: Vec<Vec<Entry>> = vec![Vec::new(); n * n];
    for i in 0..n - 1 {
        cells[i * n + i + 1].push(Entry {
            lo: BigInt::zero(),
            hi: BigInt::zero(),
            degenerate: false,
            count: BigUint::one(),
            split: u32::MAX,
            left: 0,
            right: 0,
        });
    }
    let zero = IntInterval::zero(scale);
    for d in 2..n {
        for i in 0..n - d {
            let k = i + d;
            let chord = prep.chord(i, k);
            if chord.is_some() && constraint.is_forbidden(i, k) {
                continue;
            }
            let chord = chord.unwrap_or(&zero);
            let mut found: Vec<Entry> = Vec::new();
            for j in i + 1..k {
                let c = cross_i(prep.pts[i], prep.pts[j], prep.pts[k]);
                if c < 0 {
                    continue;
                }
                let (a, b) = (&cells[i * n + j], &cells[j * n + k]);
                for (ai, ea) in a.iter().enumerate() {
                    for (bi, eb) in b.iter().enumerate() {
                        found.push(Entry {
                            lo: &ea.lo + &eb.lo + &chord.lo,
                            hi: &ea.hi + &eb.hi + &chord.hi,
                            degenerate: c == 0 || ea.degenerate || eb.degenerate,
                            count: &ea.count * &eb.count,
                            split: j as u32,
                            left: ai as u32,
                            right: bi as u32,
                        });
                    }
                }
            }
            cells[i * n + k] = prune(found, &slack);
        }
    }
    let root = &cells[n - 1];
    if root.is_empty() {
        return Err(MwtError::NoFeasibleTriangulation);
    }
    finish(&prep, &cells, root)
}

fn prune(mut found: Vec<Entry>, slack: &BigInt) -> Vec<Entry> {
    let Some(best_hi) = found.iter().map(|e| &e.hi).min().cloned() else {
        return found;
    };
    let bound = best_hi + slack;
    found.retain(|e| e.lo <= bound);
    // merge equal keys, keeping the earliest contributor as backpointer
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&found[a], &found[b]);
        (&x.lo, &x.hi, x.degenerate, a).cmp(&(&y.lo, &y.hi, y.degenerate, b))
    });
    let mut out: Vec<Entry> = Vec::with_capacity(order.len());
    for idx in order {
        let e = &found[idx];
        if let Some(last) = out.last_mut() {
            if last.lo == e.lo && last.hi == e.hi && last.degenerate == e.degenerate {
                last.count += &e.count;
                continue;
            }
        }
        out.push(e.clone());
    }
    out
}

fn finish(prep: &Prepared, cells: &[Vec<Entry>], root: &[Entry]) -> Result<MwtResult, MwtError> {
    let n = prep.n;
    let upper = root.iter().map(|e| &e.hi).min().unwrap().clone();
    let cands: Vec<&Entry> = root.iter().filter(|e| e.lo <= upper).collect();
    if cands.iter().all(|e| e.degenerate) {
        return Err(MwtError::OnlyDegenerateOptimal);
    }
    let lower = cands.iter().map(|e| &e.lo).min().unwrap().clone();
    let multiplicity: BigUint = cands.iter().map(|e| e.count.clone()).sum();
    let candidates_degenerate = cands.iter().any(|e| e.degenerate);
    let best = cands
        .iter()
        .min_by(|a, b| (&a.lo, a.split).cmp(&(&b.lo, b.split)))
        .unwrap();
    let mut tris = Vec::with_capacity(n - 2);
    collect(cells, n, 0, n - 1, best, &mut tris);
    let witness = Triangulation::from_triangles(
        n,
        &tris,
        IntInterval::new(best.lo.clone(), best.hi.clone(), prep.scale),
        best.degenerate,
    );
    Ok(MwtResult {
        optimal_cost: IntInterval::new(lower, upper, prep.scale),
        witness,
        multiplicity,
        candidates_degenerate,
    })
}

fn collect(
    cells: &[Vec<Entry>],
    n: usize,
    i: usize,
    k: usize,
    e: &Entry,
    out: &mut Vec<[usize; 3]>,
) {
    if k == i + 1 {
        return;
    }
    let j = e.split as usize;
    out.push([i, j, k]);
    collect(cells, n, i, j, &cells[i * n + j][e.left as usize], out);
    collect(cells, n, j, k, &cells[j * n + k][e.right as usize], out);
}

/// Every fan-recursive triangulation of the index range `i..=k`.
fn enumerate(
    i: usize,
    k: usize,
    memo: &mut Vec<Option<Vec<Vec<[usize; 3]>>>>,
    n: usize,
) -> Vec<Vec<[usize; 3]>> {
    if k == i + 1 {
        return vec![Vec::new()];
    }
    if let Some(v) = &memo[i * n + k] {
        return v.clone();
    }
    let mut all = Vec::new();
    for j in i + 1..k {
        let left = enumerate(i, j, memo, n);
        let right = enumerate(j, k, memo, n);
        for l in &left {
            for r in &right {
                let mut t = Vec::with_capacity(l.len() + r.len() + 1);
                t.push([i, j, k]);
                t.extend_from_slice(l);
                t.extend_from_slice(r);
                all.push(t);
            }
        }
    }
    memo[i * n + k] = Some(all.clone());
    all
}

/// Exhaustive oracle: evaluates all Catalan-many triangulations.
pub fn brute_force_mwt(poly: &Polygon, constraint: &EdgeConstraint) -> Result<MwtResult, MwtError> {
    brute_force_mwt_at(poly, constraint, WORK_SCALE)
}

pub fn brute_force_mwt_at(
    poly: &Polygon,
    constraint: &EdgeConstraint,
    scale: u32,
) -> Result<MwtResult, MwtError> {
    let n = poly.len();
    if n > BRUTE_FORCE_MAX {
        return Err(MwtError::TooLarge(n));
    }
    let prep = Prepared::new(poly, scale)?;
    let mut memo = vec![None; n * n];
    let all = enumerate(0, n - 1, &mut memo, n);
    struct Eval {
        cost: IntInterval,
        degenerate: bool,
        tris: Vec<[usize; 3]>,
    }
    let mut evals: Vec<Eval> = Vec::new();
    'outer: for tris in all {
        let mut cost = IntInterval::zero(scale);
        let mut degenerate = false;
        for t in &tris {
            let c = cross_i(prep.pts[t[0]], prep.pts[t[1]], prep.pts[t[2]]);
            if c < 0 {
                continue 'outer;
            }
            degenerate |= c == 0;
            // each triangle contributes its outer chord (i, k)
            if let Some(ch) = prep.chord(t[0], t[2]) {
                if constraint.is_forbidden(t[0], t[2]) {
                    continue 'outer;
                }
                cost = cost.add(ch);
            }
        }
        evals.push(Eval {
            cost,
            degenerate,
            tris,
        });
    }
    if evals.is_empty() {
        return Err(MwtError::NoFeasibleTriangulation);
    }
    let upper = evals.iter().map(|e| &e.cost.hi).min().unwrap().clone();
    let cands: Vec<&Eval> = evals.iter().filter(|e| e.cost.lo <= upper).collect();
    if cands.iter().all(|e| e.degenerate) {
        return Err(MwtError::OnlyDegenerateOptimal);
    }
    let lower = cands.iter().map(|e| &e.cost.lo).min().unwrap().clone();
    // enumeration order is root split first, so the first minimum matches the DP tie rule at the root
    let best = cands
        .iter()
        .min_by(|a, b| a.cost.lo.cmp(&b.cost.lo))
        .unwrap();
    Ok(MwtResult {
        optimal_cost: IntInterval::new(lower, upper, scale),
        witness: Triangulation::from_triangles(n, &best.tris, best.cost.clone(), best.degenerate),
        multiplicity: BigUint::from(cands.len()),
        candidates_degenerate: cands.iter().any(|e| e.degenerate),
    })
}

/// Enclosure of the internal cost of a given triangulation.
pub fn triangulation_cost(
    poly: &Polygon,
    tris: &[[usize; 3]],
    scale: u32,
) -> Result<IntInterval, MwtError> {
    let prep = Prepared::new(poly, scale)?;
    let t = Triangulation::from_triangles(prep.n, tris, IntInterval::zero(scale), false);
    let mut cost = IntInterval::zero(scale);
    for &(a, b) in &t.internal_edges {
        cost = cost.add(prep.chord(a, b).unwrap());
    }
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow10;
    use crate::geometry::{check_triangulation, edge_length, Point, TriangulationCheck};

    #[test]
    fn triangle() {
        let poly = Polygon::from_ints(&[(0, 0), (4, 0), (0, 3)], 0);
        let r = polygon_mwt(&poly, &EdgeConstraint::none()).unwrap();
        assert_eq!(r.optimal_cost, IntInterval::zero(15));
        assert_eq!(r.witness.triangles.len(), 1);
        assert_eq!(r.multiplicity, BigUint::one());
        assert_eq!(
            brute_force_mwt(&poly, &EdgeConstraint::none())
                .unwrap()
                .optimal_cost,
            IntInterval::zero(15)
        );
    }

    #[test]
    fn quadrilateral_short_diagonal() {
        let poly = Polygon::from_ints(&[(0, 0), (4, 0), (4, 3), (0, 1)], 0);
        let r = polygon_mwt(&poly, &EdgeConstraint::none()).unwrap();
        let s17 = edge_length(&Point::from_ints(4, 0, 0), &Point::from_ints(0, 1, 0), 15);
        assert_eq!(r.optimal_cost, s17);
        assert_eq!(r.witness.internal_edges, vec![(1, 3)]);
        assert_eq!(brute_force_mwt(&poly, &EdgeConstraint::none()).unwrap(), r);
        // forbidding the short diagonal leaves the length-5 one
        let f = polygon_mwt(&poly, &EdgeConstraint::forbid(&[(1, 3)])).unwrap();
        assert_eq!(
            f.optimal_cost,
            IntInterval::point(BigInt::from(5) * pow10(15), 15)
        );
        let both = polygon_mwt(&poly, &EdgeConstraint::forbid(&[(1, 3), (0, 2)]));
        assert_eq!(both, Err(MwtError::NoFeasibleTriangulation));
    }

    #[test]
    fn square_has_two_optima() {
        let poly = Polygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)], 0);
        let r = polygon_mwt(&poly, &EdgeConstraint::none()).unwrap();
        assert_eq!(r.multiplicity, BigUint::from(2u32));
        assert_eq!(
            check_triangulation(&poly, &r.witness.triangles),
            TriangulationCheck::Valid
        );
    }

    #[test]
    fn degenerate_only() {
        // the only chord runs along the collinear boundary
        let poly = Polygon::from_ints(&[(0, 0), (1, 0), (2, 0), (1, 1)], 0);
        let r = polygon_mwt(&poly, &EdgeConstraint::forbid(&[(1, 3)]));
        assert_eq!(r, Err(MwtError::OnlyDegenerateOptimal));
        let ok = polygon_mwt(&poly, &EdgeConstraint::none()).unwrap();
        assert!(!ok.witness.degenerate);
    }
}
