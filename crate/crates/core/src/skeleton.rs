//! β-skeleton membership and the diamond test.
//!
//! A point `r` lies in the β-neighbourhood of `pq` (β ≥ 1) when the angle
//! `prq` is at least `asin(1/β)`. For an acute angle this happens exactly
//! when `β ≥ |rp|·|rq| / |cross|`, so every comparison below is done on
//! integers by cross-multiplication.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::arith::{interval_isqrt, pow10, IntInterval, ScaledInt, WORK_SCALE};
use crate::geometry::Point;

/// Default certification threshold for gadget boundaries.
pub const BETA_PIECES: &str = "1.1806";
/// Upper end of the provable β range, sqrt(1 + sqrt(4/27)) rounded down.
pub const BETA_MWT_SUBGRAPH: &str = "1.17682";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaWitness {
    pub point: Point,
    /// `cos²` of the angle `prq`, exact.
    pub cos2: BigRational,
    /// The angle is obtuse, so `r` blocks `pq` for every β ≥ 1.
    pub obtuse: bool,
    sq_prod: BigInt,
    cross2: BigInt,
}

impl BetaWitness {
    /// `1/β²` as an exact rational; zero for a collinear interior point.
    pub fn inv_beta2(&self) -> BigRational {
        BigRational::new(self.cross2.clone(), self.sq_prod.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaReport {
    pub edge: (Point, Point),
    pub witness: Option<BetaWitness>,
    /// Largest β for which `pq` is still in the skeleton; `None` when
    /// unconstrained or when an obtuse witness blocks every β ≥ 1.
    pub min_beta: Option<IntInterval>,
}

impl BetaReport {
    /// Whether `pq` survives in the β-skeleton at `threshold`.
    pub fn passes(&self, threshold: &ScaledInt) -> bool {
        match &self.witness {
            None => true,
            Some(w) if w.obtuse => false,
            Some(w) => {
                let t2 = &threshold.value * &threshold.value;
                &w.sq_prod * pow10(2 * threshold.scale) > t2 * &w.cross2
            }
        }
    }
}

fn ints(p: &Point, s: u32) -> (i128, i128) {
    let p = p.rescale(s);
    (
        i128::try_from(&p.x.value).expect("coordinate range"),
        i128::try_from(&p.y.value).expect("coordinate range"),
    )
}

struct Cand {
    sq_prod: BigInt,
    cross2: BigInt,
    dot: BigInt,
    obtuse: bool,
    idx: usize,
}

/// `true` when `a` needs a smaller β than `b` (is more binding).
fn more_binding(a: &Cand, b: &Cand) -> bool {
    match (a.obtuse, b.obtuse) {
        (true, false) => true,
        (false, true) => false,
        // both obtuse: the larger angle (more negative cosine) first
        (true, true) => &a.dot * &a.dot * &b.sq_prod > &b.dot * &b.dot * &a.sq_prod,
        (false, false) => &a.sq_prod * &b.cross2 < &b.sq_prod * &a.cross2,
    }
}

fn candidate(p: (i128, i128), q: (i128, i128), r: (i128, i128), idx: usize) -> Option<Cand> {
    let a = (p.0 - r.0, p.1 - r.1);
    let b = (q.0 - r.0, q.1 - r.1);
    let dot = BigInt::from(a.0) * a.0 + BigInt::from(a.1) * a.1;
    let dot_ab = BigInt::from(a.0) * b.0 + BigInt::from(a.1) * b.1;
    let cr = BigInt::from(a.0) * b.1 - BigInt::from(a.1) * b.0;
    let nb = BigInt::from(b.0) * b.0 + BigInt::from(b.1) * b.1;
    if cr.is_zero() && dot_ab.is_positive() {
        return None; // on the line outside the segment: angle 0
    }
    Some(Cand {
        sq_prod: dot * nb,
        cross2: &cr * &cr,
        obtuse: dot_ab.is_negative(),
        dot: dot_ab,
        idx,
    })
}

fn beta_interval(sq_prod: &BigInt, cross2: &BigInt) -> IntInterval {
    let n = sq_prod * pow10(2 * WORK_SCALE);
    let (fl, rem) = n.div_rem(cross2);
    let ce = if rem.is_zero() { fl.clone() } else { &fl + 1 };
    let lo = interval_isqrt(&fl).expect("nonnegative").lo;
    let hi = interval_isqrt(&ce).expect("nonnegative").hi;
    IntInterval::new(lo, hi, WORK_SCALE)
}

/// Worst witness against `pq` among `others`.
pub fn min_beta(p: &Point, q: &Point, others: &[Point]) -> BetaReport {
    let s = others
        .iter()
        .map(|r| r.scale())
        .chain([p.scale(), q.scale()])
        .max()
        .unwrap();
    let (pi, qi) = (ints(p, s), ints(q, s));
    let mut best: Option<Cand> = None;
    for (idx, r) in others.iter().enumerate() {
        if let Some(c) = candidate(pi, qi, ints(r, s), idx) {
            if best.as_ref().is_none_or(|b| more_binding(&c, b)) {
                best = Some(c);
            }
        }
    }
    report(p, q, others, best)
}

fn report(p: &Point, q: &Point, others: &[Point], best: Option<Cand>) -> BetaReport {
    let edge = (p.clone(), q.clone());
    let Some(c) = best else {
        return BetaReport {
            edge,
            witness: None,
            min_beta: None,
        };
    };
    let cos2 = BigRational::new(&c.dot * &c.dot, c.sq_prod.clone());
    let min_beta = (!c.obtuse).then(|| beta_interval(&c.sq_prod, &c.cross2));
    let witness = BetaWitness {
        point: others[c.idx].clone(),
        cos2,
        obtuse: c.obtuse,
        sq_prod: c.sq_prod,
        cross2: c.cross2,
    };
    BetaReport {
        edge,
        witness: Some(witness),
        min_beta,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertReport {
    pub threshold: ScaledInt,
    pub reports: Vec<(usize, usize, BetaReport)>,
    pub violators: Vec<(usize, usize)>,
}

impl CertReport {
    pub fn passes(&self) -> bool {
        self.violators.is_empty()
    }

    /// The edge with the smallest admissible β.
    pub fn binding(&self) -> Option<&(usize, usize, BetaReport)> {
        let mut best: Option<&(usize, usize, BetaReport)> = None;
        for r in &self.reports {
            let Some(w) = &r.2.witness else { continue };
            let better = match best.and_then(|b| b.2.witness.as_ref()) {
                None => true,
                Some(bw) => match (w.obtuse, bw.obtuse) {
                    (true, false) => true,
                    (false, true) => false,
                    (true, true) => false,
                    (false, false) => &w.sq_prod * &bw.cross2 < &bw.sq_prod * &w.cross2,
                },
            };
            if better {
                best = Some(r);
            }
        }
        best
    }
}

/// Certify that every edge `(i, j)` of `points` lies in the β-skeleton.
pub fn beta_skeleton_certify(
    edges: &[(usize, usize)],
    points: &[Point],
    threshold: &ScaledInt,
) -> CertReport {
    let reports: Vec<(usize, usize, BetaReport)> = edges
        .par_iter()
        .map(|&(i, j)| {
            let others: Vec<Point> = points
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, r)| r.clone())
                .collect();
            (i, j, min_beta(&points[i], &points[j], &others))
        })
        .collect();
    let violators = reports
        .iter()
        .filter(|r| !r.2.passes(threshold))
        .map(|r| (r.0, r.1))
        .collect();
    CertReport {
        threshold: threshold.clone(),
        reports,
        violators,
    }
}

/// Squared radius around the midpoint of `pq`, relative to `|pq|²`, that
/// contains every possible witness at a threshold β: `(β + sqrt(β²-1))²/4 < β²`.
pub fn interaction_radius2(len2: &BigInt, threshold: &ScaledInt) -> BigInt {
    let t2 = &threshold.value * &threshold.value;
    let den = pow10(2 * threshold.scale);
    (len2 * t2).div_ceil(&den)
}

/// Tangent enclosure of a diamond base angle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseAngle {
    pub tan_lo: ScaledInt,
    pub tan_hi: ScaledInt,
}

impl BaseAngle {
    /// π/4.6, the improved diamond constant.
    pub fn pi_over_4_6() -> Self {
        BaseAngle {
            tan_lo: ScaledInt::new("81356034376264503897".parse::<BigInt>().unwrap(), 20),
            tan_hi: ScaledInt::new("81356034376264503898".parse::<BigInt>().unwrap(), 20),
        }
    }

    /// π/8, the original diamond constant.
    pub fn pi_over_8() -> Self {
        BaseAngle {
            tan_lo: ScaledInt::new("41421356237309504880".parse::<BigInt>().unwrap(), 20),
            tan_hi: ScaledInt::new("41421356237309504881".parse::<BigInt>().unwrap(), 20),
        }
    }

    pub fn exact(t: ScaledInt) -> Self {
        BaseAngle {
            tan_lo: t.clone(),
            tan_hi: t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    Ambiguous,
}

/// Where `r` sits relative to the open isosceles triangle on the left of `p→q`.
pub fn diamond_side(p: &Point, q: &Point, r: &Point, angle: &BaseAngle) -> Containment {
    let s = p.scale().max(q.scale()).max(r.scale());
    let ts = angle.tan_lo.scale.max(angle.tan_hi.scale);
    let (tlo, thi) = (
        angle.tan_lo.rescale(ts).value,
        angle.tan_hi.rescale(ts).value,
    );
    let c = |pt: &Point| {
        let pt = pt.rescale(s);
        (pt.x.value, pt.y.value)
    };
    let (p, q, r) = (c(p), c(q), c(r));
    // everything scaled by 2·10^ts so the apex is integral
    let d = pow10(ts) * 2;
    let sc = |v: &(BigInt, BigInt)| (&v.0 * &d, &v.1 * &d);
    let (ps, qs, rs) = (sc(&p), sc(&q), sc(&r));
    let apex = |t: &BigInt| {
        let m = ((&p.0 + &q.0) * pow10(ts), (&p.1 + &q.1) * pow10(ts));
        (m.0 - t * (&q.1 - &p.1), m.1 + t * (&q.0 - &p.0))
    };
    let cross = |a: &(BigInt, BigInt), b: &(BigInt, BigInt), r: &(BigInt, BigInt)| {
        (&b.0 - &a.0) * (&r.1 - &a.1) - (&b.1 - &a.1) * (&r.0 - &a.0)
    };
    if !cross(&ps, &qs, &rs).is_positive() {
        return Containment::Outside;
    }
    let (alo, ahi) = (apex(&tlo), apex(&thi));
    let mut ambiguous = false;
    for (x, y) in [
        (cross(&qs, &alo, &rs), cross(&qs, &ahi, &rs)),
        (cross(&alo, &ps, &rs), cross(&ahi, &ps, &rs)),
    ] {
        match (x.is_positive(), y.is_positive()) {
            (true, true) => {}
            (false, false) => return Containment::Outside,
            _ => ambiguous = true,
        }
    }
    if ambiguous {
        Containment::Ambiguous
    } else {
        Containment::Inside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiamondOutcome {
    pub left_empty: bool,
    pub right_empty: bool,
    pub ambiguous_points: usize,
}

/// Side emptiness counting ambiguous points as possibly outside.
pub fn diamond_outcome(
    p: &Point,
    q: &Point,
    others: &[Point],
    angle: &BaseAngle,
) -> DiamondOutcome {
    let mut out = DiamondOutcome {
        left_empty: true,
        right_empty: true,
        ambiguous_points: 0,
    };
    for r in others {
        match diamond_side(p, q, r, angle) {
            Containment::Inside => out.left_empty = false,
            Containment::Ambiguous => out.ambiguous_points += 1,
            Containment::Outside => {}
        }
        match diamond_side(q, p, r, angle) {
            Containment::Inside => out.right_empty = false,
            Containment::Ambiguous => out.ambiguous_points += 1,
            Containment::Outside => {}
        }
    }
    out
}

/// Whether `pq` passes the diamond test (may be an MWT edge).
pub fn diamond_test(p: &Point, q: &Point, others: &[Point], angle: &BaseAngle) -> bool {
    let o = diamond_outcome(p, q, others, angle);
    o.left_empty || o.right_empty
}
