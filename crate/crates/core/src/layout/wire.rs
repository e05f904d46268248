use super::{add, scale, Dims, LayoutError, PieceKind, Pt, EXTENDED_SPAN, WIRE_SPAN};
use crate::arith::ScaledInt;

/// Every length from here on is a non-negative combination of the two
/// straight piece lengths (one more than the Frobenius number of 2740 and
/// 8221).
pub const MIN_ALL_REPRESENTABLE: i64 = 22_514_580;

/// `(extended pieces, wire pieces)` covering `z` hundredths exactly, using
/// the fewest extended pieces; `None` when no combination exists.
pub fn split_length(z: i64) -> Option<(i64, i64)> {
    if z < 0 {
        return None;
    }
    let y = z % WIRE_SPAN;
    let wires = z / WIRE_SPAN - 3 * y;
    (wires >= 0).then_some((y, wires))
}

/// Representable length closest to `z`, ties towards the shorter one.
pub fn representable_near(z: i64) -> i64 {
    if z >= MIN_ALL_REPRESENTABLE {
        return z;
    }
    let mut best = 0i64;
    for b in 0..=z / EXTENDED_SPAN + 1 {
        let rest = z - b * EXTENDED_SPAN;
        let a0 = rest.div_euclid(WIRE_SPAN);
        for a in [a0, a0 + 1] {
            if a < 0 {
                continue;
            }
            let v = a * WIRE_SPAN + b * EXTENDED_SPAN;
            if (v - z).abs() < (best - z).abs() || ((v - z).abs() == (best - z).abs() && v < best)
            {
                best = v;
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// `count` equal straight pieces laid end to end.
    Straight {
        kind: PieceKind,
        count: u64,
        start: Pt,
        dir: Pt,
    },
    Bend {
        kind: PieceKind,
        corner: Pt,
        din: Pt,
        dout: Pt,
        arm: i64,
    },
}

impl Step {
    pub fn start(&self) -> Pt {
        match *self {
            Step::Straight { start, .. } => start,
            Step::Bend {
                corner, din, arm, ..
            } => add(corner, scale(din, -arm)),
        }
    }

    pub fn end(&self) -> Pt {
        match *self {
            Step::Straight {
                kind,
                count,
                start,
                dir,
            } => add(start, scale(dir, kind.span().unwrap() * count as i64)),
            Step::Bend {
                corner, dout, arm, ..
            } => add(corner, scale(dout, arm)),
        }
    }

    pub fn pieces(&self) -> u64 {
        match self {
            Step::Straight { count, .. } => *count,
            Step::Bend { .. } => 1,
        }
    }

    pub fn kind(&self) -> PieceKind {
        match self {
            Step::Straight { kind, .. } | Step::Bend { kind, .. } => *kind,
        }
    }

    /// Travel direction at the start and at the end.
    pub fn dirs(&self) -> (Pt, Pt) {
        match *self {
            Step::Straight { dir, .. } => (dir, dir),
            Step::Bend { din, dout, .. } => (din, dout),
        }
    }
}

/// Piece sequence of one wire between two terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WirePlan {
    pub start: Pt,
    pub end: Pt,
    pub steps: Vec<Step>,
}

impl WirePlan {
    pub fn pieces(&self) -> u64 {
        self.steps.iter().map(Step::pieces).sum()
    }

    pub fn bends(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Bend { .. }))
            .count()
    }

    pub fn count(&self, kind: PieceKind) -> u64 {
        self.steps
            .iter()
            .filter(|s| s.kind() == kind)
            .map(Step::pieces)
            .sum()
    }

    /// Steps follow each other without gaps and join the end points.
    pub fn is_contiguous(&self) -> bool {
        let mut at = self.start;
        for s in &self.steps {
            if s.start() != at {
                return false;
            }
            at = s.end();
        }
        at == self.end
    }
}

fn straight_steps(start: Pt, dir: Pt, z: i64, out: &mut Vec<Step>) -> Result<(), LayoutError> {
    let (y, w) = split_length(z).ok_or(LayoutError::TooShort { z })?;
    let mut at = start;
    for (kind, count) in [(PieceKind::ExtendedWire, y), (PieceKind::Wire, w)] {
        if count > 0 {
            let s = Step::Straight {
                kind,
                count: count as u64,
                start: at,
                dir,
            };
            at = s.end();
            out.push(s);
        }
    }
    Ok(())
}

/// Straight wire of length `d` between aligned terminals, laid along `+x`
/// from the origin.
pub fn straight_connection(d: &ScaledInt) -> Result<WirePlan, LayoutError> {
    let z = d
        .try_coarsen(2)
        .and_then(|v| v.to_i64())
        .ok_or_else(|| LayoutError::NotGridAligned(d.to_canonical()))?;
    if z < MIN_ALL_REPRESENTABLE {
        return Err(LayoutError::TooShort { z });
    }
    let mut steps = Vec::new();
    straight_steps((0, 0), (1, 0), z, &mut steps)?;
    Ok(WirePlan {
        start: (0, 0),
        end: (z, 0),
        steps,
    })
}

fn sign(v: i64) -> i64 {
    v.signum()
}

/// Drop repeated points and merge collinear runs.
fn normalize(path: &[Pt]) -> Result<Vec<Pt>, LayoutError> {
    let mut pts: Vec<Pt> = Vec::new();
    for &p in path {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    if pts.len() < 2 {
        return Err(LayoutError::InvalidPath("fewer than two distinct points".into()));
    }
    let dir = |a: Pt, b: Pt| -> Result<Pt, LayoutError> {
        if a.0 != b.0 && a.1 != b.1 {
            return Err(LayoutError::InvalidPath(format!(
                "diagonal segment {a:?} -> {b:?}"
            )));
        }
        Ok((sign(b.0 - a.0), sign(b.1 - a.1)))
    };
    let mut out = vec![pts[0]];
    for i in 1..pts.len() {
        let d = dir(pts[i - 1], pts[i])?;
        if out.len() >= 2 {
            let prev = dir(out[out.len() - 2], out[out.len() - 1])?;
            if prev == d {
                out.pop();
            } else if prev == (-d.0, -d.1) {
                return Err(LayoutError::InvalidPath(format!(
                    "path reverses at {:?}",
                    pts[i - 1]
                )));
            }
        }
        out.push(pts[i]);
    }
    Ok(out)
}

/// Lay out one orientation class: `stations[0]` and the last station are
/// fixed, the others are free within the tolerance.
///
/// Returns the real stations. `seg[j]` is the path index of the segment
/// between station `j` and `j + 1`.
fn settle(
    nominal: &[i64],
    seg: &[usize],
    arms: &[i64],
    dims: &Dims,
    name: &'static str,
) -> Result<Vec<i64>, LayoutError> {
    let k = seg.len();
    let mut st = nominal.to_vec();
    if k == 0 {
        return Ok(st);
    }
    let len = |j: usize| (nominal[j + 1] - nominal[j]).abs();
    let absorber = (0..k)
        .filter(|&j| len(j) >= dims.straight_min)
        .max_by_key(|&j| (len(j), std::cmp::Reverse(j)));
    let Some(a) = absorber else {
        return Err(LayoutError::MissingStraightPortion(name));
    };
    let tol = dims.tolerance();
    let check = |j: usize, v: i64| -> Result<(), LayoutError> {
        let drift = v - nominal[j];
        if drift.abs() > tol {
            return Err(LayoutError::CorridorTooTight {
                segment: seg[j.min(k - 1)],
                drift,
            });
        }
        Ok(())
    };
    for j in 0..a {
        let s = sign(nominal[j + 1] - nominal[j]);
        let want = (nominal[j + 1] - st[j]).abs() - arms[j];
        let w = representable_near(want.max(0));
        st[j + 1] = st[j] + s * (w + arms[j]);
        check(j + 1, st[j + 1])?;
    }
    for j in (a + 1..k).rev() {
        let s = sign(nominal[j + 1] - nominal[j]);
        let want = (st[j + 1] - nominal[j]).abs() - arms[j];
        let w = representable_near(want.max(0));
        st[j] = st[j + 1] - s * (w + arms[j]);
        check(j, st[j])?;
    }
    Ok(st)
}

/// Pieces along a rectilinear path from one terminal to another.
///
/// Interior corners get bends; every straight length is rounded to a
/// representable one by moving corners sideways inside the corridor, and
/// the longest straight portion of each direction takes up the remainder.
pub fn route_corridor(path: &[Pt], dims: &Dims) -> Result<WirePlan, LayoutError> {
    let pts = normalize(path)?;
    let m = pts.len() - 1;
    let dirs: Vec<Pt> = (0..m)
        .map(|i| (sign(pts[i + 1].0 - pts[i].0), sign(pts[i + 1].1 - pts[i].1)))
        .collect();
    let arm_count = |i: usize| (i > 0) as i64 + (i + 1 < m) as i64;
    // stations per class: x-stations for horizontal segments, y for vertical
    let mut real = pts.clone();
    for horizontal in [true, false] {
        let coord = |p: Pt| if horizontal { p.0 } else { p.1 };
        let seg: Vec<usize> = (0..m)
            .filter(|&i| (dirs[i].1 == 0) == horizontal)
            .collect();
        let mut nominal = vec![coord(pts[0])];
        nominal.extend(seg.iter().map(|&i| coord(pts[i + 1])));
        if seg.is_empty() && coord(pts[0]) != coord(pts[m]) {
            return Err(LayoutError::InvalidPath("end points not aligned".into()));
        }
        let arms: Vec<i64> = seg.iter().map(|&i| arm_count(i) * dims.bend_arm).collect();
        let name = if horizontal { "horizontal" } else { "vertical" };
        let st = settle(&nominal, &seg, &arms, dims, name)?;
        // corner i + 1 sits at the end of segment i
        for (j, &i) in seg.iter().enumerate() {
            let v = st[j + 1];
            // every point from the end of segment i up to the next segment of this class
            let next = seg.get(j + 1).copied().unwrap_or(m);
            for p in &mut real[i + 1..=next] {
                if horizontal {
                    p.0 = v;
                } else {
                    p.1 = v;
                }
            }
        }
    }
    if real[m] != pts[m] || real[0] != pts[0] {
        return Err(LayoutError::InvalidPath("end point moved".into()));
    }
    let mut steps = Vec::new();
    for i in 0..m {
        let d = dirs[i];
        let from = if i == 0 {
            real[0]
        } else {
            add(real[i], scale(d, dims.bend_arm))
        };
        let to = if i + 1 == m {
            real[m]
        } else {
            add(real[i + 1], scale(d, -dims.bend_arm))
        };
        let z = (to.0 - from.0) * d.0 + (to.1 - from.1) * d.1;
        if z < 0 {
            return Err(LayoutError::CorridorTooTight {
                segment: i,
                drift: z,
            });
        }
        straight_steps(from, d, z, &mut steps).map_err(|_| LayoutError::CorridorTooTight {
            segment: i,
            drift: z,
        })?;
        if i + 1 < m {
            let dn = dirs[i + 1];
            let left = d.0 * dn.1 - d.1 * dn.0 > 0;
            steps.push(Step::Bend {
                kind: if left {
                    PieceKind::LeftBend
                } else {
                    PieceKind::RightBend
                },
                corner: real[i + 1],
                din: d,
                dout: dn,
                arm: dims.bend_arm,
            });
        }
    }
    Ok(WirePlan {
        start: pts[0],
        end: pts[m],
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_examples() {
        assert_eq!(split_length(0), Some((0, 0)));
        assert_eq!(split_length(2740), Some((0, 1)));
        assert_eq!(split_length(8221), Some((1, 0)));
        assert_eq!(split_length(2741), None);
        assert_eq!(split_length(22_514_579), None);
        assert!(split_length(MIN_ALL_REPRESENTABLE).is_some());
    }

    #[test]
    fn nearest_representable() {
        assert_eq!(representable_near(2740 * 2 + 3), 2740 * 2);
        assert_eq!(representable_near(2740 * 5 + 3), 8221 + 2 * 2740);
        assert_eq!(representable_near(8221 + 1), 8221);
        assert_eq!(representable_near(100), 0);
        assert_eq!(representable_near(30_000_000), 30_000_000);
    }

    #[test]
    fn normalize_merges_and_rejects() {
        let p = normalize(&[(0, 0), (5, 0), (9, 0), (9, 0), (9, 4)]).unwrap();
        assert_eq!(p, vec![(0, 0), (9, 0), (9, 4)]);
        assert!(normalize(&[(0, 0), (5, 5)]).is_err());
        assert!(normalize(&[(0, 0), (5, 0), (2, 0)]).is_err());
    }
}
