use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use super::emit::ReductionOutput;
use super::network::{GadgetGraph, PortRef};
use super::{add, dir_index, scale, Mode, Pt};
use crate::arith::{parse_fixed_decimal, ScaledInt};
use crate::skeleton::{interaction_radius2, min_beta, BETA_PIECES};
use crate::workshop::{to_point, Size, State};

fn bbox(a: Pt, b: Pt) -> (i64, i64, i64, i64) {
    (a.0.min(b.0), a.1.min(b.1), a.0.max(b.0), a.1.max(b.1))
}

/// Chebyshev distance between two axis-parallel segments.
fn seg_distance(a: (Pt, Pt), b: (Pt, Pt)) -> i64 {
    let (ax0, ay0, ax1, ay1) = bbox(a.0, a.1);
    let (bx0, by0, bx1, by1) = bbox(b.0, b.1);
    let gx = (bx0 - ax1).max(ax0 - bx1).max(0);
    let gy = (by0 - ay1).max(ay0 - by1).max(0);
    gx.max(gy)
}

/// Pairs of paths whose corridors of the given width overlap, with the
/// distance between their centre lines.
pub fn corridor_conflicts(paths: &[Vec<Pt>], width: i64) -> Vec<(usize, usize, i64)> {
    let segs: Vec<Vec<(Pt, Pt)>> = paths
        .iter()
        .map(|p| p.windows(2).map(|w| (w[0], w[1])).collect())
        .collect();
    let mut out = Vec::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let d = segs[i]
                .iter()
                .flat_map(|&s| segs[j].iter().map(move |&t| seg_distance(s, t)))
                .min();
            if let Some(d) = d.filter(|&d| d < width) {
                out.push((i, j, d));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub terminals: usize,
    pub bookkeeping: Vec<String>,
    pub contiguity: Vec<String>,
    pub clearance: Vec<String>,
    /// Edges checked and failures; `None` when the check was skipped.
    pub beta: Option<(usize, Vec<String>)>,
    pub log: Vec<String>,
}

impl AuditReport {
    pub fn passes(&self) -> bool {
        self.bookkeeping.is_empty()
            && self.contiguity.is_empty()
            && self.clearance.is_empty()
            && self.beta.as_ref().is_none_or(|b| b.1.is_empty())
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "passes": self.passes(),
            "terminals": self.terminals,
            "bookkeeping_failures": self.bookkeeping.len(),
            "contiguity_failures": self.contiguity.len(),
            "clearance_failures": self.clearance.len(),
            "beta_edges": self.beta.as_ref().map(|b| b.0),
            "beta_failures": self.beta.as_ref().map(|b| b.1.len()),
        })
    }
}

type TerminalKey = (Pt, Size, u32);

fn check_bookkeeping(out: &ReductionOutput, r: &mut AuditReport) {
    let mut seen: BTreeMap<TerminalKey, Vec<(String, State)>> = BTreeMap::new();
    for p in &out.pieces {
        for t in &p.piece.terminals {
            seen.entry((t.apex, t.size, t.axis % 4))
                .or_default()
                .push((p.piece.name.clone(), t.area));
        }
    }
    for run in &out.runs {
        let span = run.kind.span().unwrap() * 100;
        let a = (run.start.0 * 100, run.start.1 * 100);
        let b = add(a, scale(run.dir, span * run.count as i64));
        let k = dir_index(run.dir);
        let name = format!("{} run x{}", run.kind.name(), run.count);
        seen.entry((a, Size::Small, k)).or_default().push((name.clone(), State::L));
        seen.entry((b, Size::Small, k)).or_default().push((name, State::R));
    }
    r.terminals = seen.len();
    for ((apex, size, axis), users) in &seen {
        let ok = users.len() == 2 && users[0].1 != users[1].1;
        if !ok {
            let names: Vec<String> = users
                .iter()
                .map(|(n, s)| format!("{n} ({})", s.letter()))
                .collect();
            r.bookkeeping.push(format!(
                "{size:?} terminal at ({}, {}) axis {axis}: {}",
                apex.0,
                apex.1,
                names.join(", ")
            ));
        }
    }
}

fn check_contiguity(g: &GadgetGraph, r: &mut AuditReport) {
    let half = g.dims.complex_half();
    for (i, l) in g.links.iter().enumerate() {
        let name = g.link_name(i);
        let mut bad = |why: &str| r.contiguity.push(format!("{name}: {why}"));
        let (a, _) = g.port(l.from);
        let (b, _) = g.port(l.to);
        if l.path.first() != Some(&a) || l.path.last() != Some(&b) {
            bad("path does not join its ports");
        }
        if l.plans.iter().any(|p| !p.is_contiguous()) {
            bad("plan has a gap");
        }
        let (Some(first), Some(last)) = (l.plans.first(), l.plans.last()) else {
            bad("no plan");
            continue;
        };
        if first.start != a || last.end != b {
            bad("plan does not join its ports");
        }
        match (&l.middle, l.plans.len()) {
            (None, 1) => {}
            (Some(m), 2) => {
                if l.plans[0].end != add(m.center, scale(m.dir, -half))
                    || l.plans[1].start != add(m.center, scale(m.dir, half))
                {
                    bad("adapters do not meet the plan");
                }
            }
            _ => bad("plan count does not match the middle piece"),
        }
    }
}

fn check_clearance(g: &GadgetGraph, r: &mut AuditReport) {
    let paths: Vec<Vec<Pt>> = g.links.iter().map(|l| l.path.clone()).collect();
    for (a, b, d) in corridor_conflicts(&paths, g.dims.corridor) {
        r.clearance.push(format!(
            "{} and {} at distance {d}",
            g.link_name(a),
            g.link_name(b)
        ));
    }
    // loops against links not attached to them
    let h = g.dims.loop_half;
    for (li, lp) in g.loops.iter().enumerate() {
        let c = lp.center;
        let ring = [
            (c.0 - h, c.1 - h),
            (c.0 + h, c.1 - h),
            (c.0 + h, c.1 + h),
            (c.0 - h, c.1 + h),
            (c.0 - h, c.1 - h),
        ];
        for (i, l) in g.links.iter().enumerate() {
            let attached = |p: PortRef| matches!(p, PortRef::Loop { idx, .. } if idx == li);
            if attached(l.from) || attached(l.to) {
                continue;
            }
            let found = corridor_conflicts(&[ring.to_vec(), l.path.clone()], g.dims.corridor);
            if let Some((_, _, d)) = found.first() {
                r.clearance.push(format!("loop {li} and {} at distance {d}", g.link_name(i)));
            }
        }
    }
}

/// Local β-skeleton check of every boundary edge of placed geometry.
fn check_beta(out: &ReductionOutput, threshold: &ScaledInt) -> (usize, Vec<String>) {
    let pts = out.points();
    let mut edges: Vec<(Pt, Pt)> = Vec::new();
    for p in out.pieces.iter().filter(|p| p.geometric) {
        let raw = p.piece.raw_points();
        for (a, b) in p.piece.boundary_edges() {
            let (u, v) = (raw[a], raw[b]);
            edges.push(if u < v { (u, v) } else { (v, u) });
        }
    }
    edges.sort();
    edges.dedup();
    let radii: Vec<(BigInt, i64)> = edges
        .iter()
        .map(|&(p, q)| {
            let dx = BigInt::from(q.0 - p.0);
            let dy = BigInt::from(q.1 - p.1);
            let r2 = interaction_radius2(&(&dx * &dx + &dy * &dy), threshold);
            let reach = i64::try_from(r2.sqrt() + 1u32).unwrap_or(i64::MAX / 4);
            (r2, reach)
        })
        .collect();
    let cell = radii.iter().map(|r| r.1).max().unwrap_or(1).max(1);
    let mut grid: HashMap<(i64, i64), Vec<Pt>> = HashMap::new();
    for &s in &pts {
        grid.entry((s.0.div_euclid(cell), s.1.div_euclid(cell)))
            .or_default()
            .push(s);
    }
    let mut fails = Vec::new();
    for (&(p, q), (r2, _)) in edges.iter().zip(&radii) {
        // compare |2s - (p + q)|² <= 4 r2 to stay integral
        let (mx2, my2) = (p.0 + q.0, p.1 + q.1);
        let (cx, cy) = ((mx2 / 2).div_euclid(cell), (my2 / 2).div_euclid(cell));
        let four_r2 = r2 * 4u32;
        let mut others: Vec<Pt> = (cx - 1..=cx + 1)
            .flat_map(|i| (cy - 1..=cy + 1).map(move |j| (i, j)))
            .filter_map(|c| grid.get(&c))
            .flatten()
            .copied()
            .filter(|&s| s != p && s != q)
            .filter(|s| {
                let ex = BigInt::from(2 * s.0 - mx2);
                let ey = BigInt::from(2 * s.1 - my2);
                &ex * &ex + &ey * &ey <= four_r2
            })
            .collect();
        others.sort();
        let others: Vec<_> = others.into_iter().map(to_point).collect();
        let rep = min_beta(&to_point(p), &to_point(q), &others);
        if !rep.passes(threshold) {
            fails.push(format!("edge ({}, {})-({}, {})", p.0, p.1, q.0, q.1));
        }
    }
    (edges.len(), fails)
}

/// Structural audit of a network and, when given, its emitted point set.
pub fn audit_layout(g: &GadgetGraph, out: Option<&ReductionOutput>) -> AuditReport {
    let mut r = AuditReport::default();
    check_contiguity(g, &mut r);
    check_clearance(g, &mut r);
    r.log.push(format!(
        "{} links, {} loops: {} contiguity and {} clearance failures",
        g.links.len(),
        g.loops.len(),
        r.contiguity.len(),
        r.clearance.len()
    ));
    let Some(out) = out else {
        r.log.push("no point set: terminal and beta checks skipped".into());
        return r;
    };
    check_bookkeeping(out, &mut r);
    r.log.push(format!(
        "{} terminals, {} not shared by exactly two pieces",
        r.terminals,
        r.bookkeeping.len()
    ));
    if out.mode == Mode::Mini && out.geometric > 0 {
        let t = parse_fixed_decimal(BETA_PIECES, 4).expect("constant parses");
        let b = check_beta(out, &t);
        r.log.push(format!(
            "beta {BETA_PIECES}: {} boundary edges, {} failures",
            b.0,
            b.1.len()
        ));
        r.beta = Some(b);
    } else {
        r.log.push("beta check skipped: no placed geometry".into());
    }
    r
}
