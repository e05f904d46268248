use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;

use super::cost::{nano, network_model, CostModel, DELTA4, NANO};
use super::network::{Conn, GadgetGraph, LoopRole, PortRef};
use super::{add, dir_index, scale, unit, LayoutError, Mode, PieceKind, Pt, Step};
use crate::arith::{pow10, sqrt_enclosure, IntInterval, ScaledInt, COORD_SCALE, WORK_SCALE};
use crate::sat::{check_1in3, Formula1in3};
use crate::workshop::{analyze_piece, rot, write_piece, Item, Piece, Size, State, Terminal};

/// One piece of the emitted point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedPiece {
    pub kind: PieceKind,
    pub piece: Piece,
    /// Placed from piece data; otherwise a stub carrying only terminals.
    pub geometric: bool,
}

/// A straight run of `count` equal pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub kind: PieceKind,
    pub count: u64,
    pub start: Pt,
    pub dir: Pt,
}

/// Region between gadgets whose triangulation is not computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hole {
    pub name: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub mode: Mode,
    pub pieces: Vec<EmittedPiece>,
    /// Straight runs not expanded into pieces (proof mode).
    pub runs: Vec<Run>,
    pub piece_count: u64,
    pub geometric: u64,
    pub stubs: u64,
    /// Pieces inside unexpanded runs.
    pub in_runs: u64,
    /// Reduced cost of geometric pieces plus their boundary edges; `None`
    /// when nothing was placed and the target is relative only.
    pub absolute: Option<IntInterval>,
    /// Relative reduced cost of the ideal state over all pieces.
    pub relative_ideal: ScaledInt,
    pub target: IntInterval,
    pub threshold: ScaledInt,
    pub gap: ScaledInt,
    pub holes: Vec<Hole>,
    pub cost_source: String,
    /// Least relative cost over satisfying and over violating assignments,
    /// when the variables are few enough to enumerate.
    pub separation: Option<(Option<ScaledInt>, Option<ScaledInt>)>,
}

fn mk_terminal(size: Size, apex: Pt, dir: Pt, area: State) -> Terminal {
    Terminal {
        size,
        apex: (apex.0 * 100, apex.1 * 100),
        axis: dir_index(dir),
        area,
        line: 0,
    }
}

fn stub(kind: PieceKind, name: String, terminals: Vec<Terminal>) -> EmittedPiece {
    EmittedPiece {
        kind,
        piece: Piece {
            name,
            parts: Vec::new(),
            items: (0..terminals.len()).map(Item::Terminal).collect(),
            terminals,
            symmetry: Vec::new(),
            line: 0,
        },
        geometric: false,
    }
}

fn place(p: &Piece, name: String, k: u32, at: Pt) -> Piece {
    let off = (at.0 * 100, at.1 * 100);
    let tr = |q: Pt| add(rot(k, q), off);
    let mut out = p.clone();
    out.name = name;
    for part in &mut out.parts {
        for q in &mut part.points {
            *q = tr(*q);
        }
    }
    for t in &mut out.terminals {
        t.apex = tr(t.apex);
        t.axis = (t.axis + k) % 4;
    }
    out.symmetry.clear();
    out
}

fn straight_piece_ok(p: &Piece, span: i64) -> bool {
    p.terminals.len() == 2
        && p.terminals[0].apex == (0, 0)
        && p.terminals[1].apex == (span * 100, 0)
        && p.terminals.iter().all(|t| t.axis == 0)
        && p.terminals[0].area == State::L
        && p.terminals[1].area == State::R
}

/// Point set and weight threshold for a gadget network.
///
/// `geometry` holds piece data for straight kinds; other pieces become
/// stubs with their terminal triangles only. In proof mode straight runs
/// are reported, not expanded.
pub fn emit_reduction(
    g: &GadgetGraph,
    f: &Formula1in3,
    geometry: &BTreeMap<PieceKind, Piece>,
    cm: &CostModel,
) -> Result<ReductionOutput, LayoutError> {
    let dims = &g.dims;
    for (kind, p) in geometry {
        let ok = kind.span().is_some_and(|s| straight_piece_ok(p, s));
        if !ok {
            return Err(LayoutError::InvalidPath(format!(
                "piece {} cannot be laid as a straight {}",
                p.name,
                kind.name()
            )));
        }
    }
    let mut pieces: Vec<EmittedPiece> = Vec::new();
    let mut runs = Vec::new();
    let mut piece_count = 0u64;
    let mut geometric = 0u64;
    let expand = dims.mode == Mode::Mini;
    // which link uses each port, and whether it starts there
    let mut port_use: BTreeMap<PortRef, bool> = BTreeMap::new();
    for l in &g.links {
        port_use.insert(l.from, true);
        port_use.insert(l.to, false);
    }
    let small = |apex: Pt, dir: Pt, area| mk_terminal(Size::Small, apex, dir, area);
    let large = |apex: Pt, dir: Pt, area| mk_terminal(Size::Large, apex, dir, area);
    let exit_terminal = |r: PortRef| -> Terminal {
        let (pt, d) = g.port(r);
        match port_use.get(&r) {
            Some(false) => small(pt, (-d.0, -d.1), State::L),
            _ => small(pt, d, State::R),
        }
    };
    for (li, l) in g.links.iter().enumerate() {
        for (pi, plan) in l.plans.iter().enumerate() {
            for (si, step) in plan.steps.iter().enumerate() {
                piece_count += step.pieces();
                match *step {
                    Step::Straight {
                        kind,
                        count,
                        start,
                        dir,
                    } => {
                        let span = kind.span().unwrap();
                        let geo = geometry.get(&kind);
                        if !expand {
                            runs.push(Run {
                                kind,
                                count,
                                start,
                                dir,
                            });
                            continue;
                        }
                        for c in 0..count as i64 {
                            let at = add(start, scale(dir, span * c));
                            let name = format!("{}-{li}.{pi}.{si}.{c}", kind.name());
                            match geo {
                                Some(p) => {
                                    geometric += 1;
                                    pieces.push(EmittedPiece {
                                        kind,
                                        piece: place(p, name, dir_index(dir), at),
                                        geometric: true,
                                    });
                                }
                                None => pieces.push(stub(
                                    kind,
                                    name,
                                    vec![
                                        small(at, dir, State::L),
                                        small(add(at, scale(dir, span)), dir, State::R),
                                    ],
                                )),
                            }
                        }
                    }
                    Step::Bend { kind, din, dout, .. } => pieces.push(stub(
                        kind,
                        format!("{}-{li}.{pi}.{si}", kind.name()),
                        vec![
                            small(step.start(), din, State::L),
                            small(step.end(), dout, State::R),
                        ],
                    )),
                }
            }
        }
        if let Some(m) = &l.middle {
            let ch = dims.complex_half();
            let mh = dims.middle_half;
            let d = m.dir;
            let at = |k: i64| add(m.center, scale(d, k));
            pieces.push(stub(
                PieceKind::Thickening,
                format!("thickening-{li}"),
                vec![small(at(-ch), d, State::L), large(at(-mh), d, State::R)],
            ));
            let mut ts = vec![large(at(-mh), d, State::L), large(at(mh), d, State::R)];
            if m.exit.is_some() {
                ts.push(exit_terminal(PortRef::Middle { link: li }));
            }
            pieces.push(stub(m.kind, format!("{}-{li}", m.kind.name()), ts));
            pieces.push(stub(
                PieceKind::Thinning,
                format!("thinning-{li}"),
                vec![large(at(mh), d, State::L), small(at(ch), d, State::R)],
            ));
            piece_count += 3;
        }
    }
    for (i, lp) in g.loops.iter().enumerate() {
        let travel = |s: usize| unit(s as u32 + 1);
        let mid = |s: usize| add(lp.center, scale(unit(s as u32), dims.loop_half));
        for s in 0..4 {
            let t = travel(s);
            let a = add(mid(s), scale(t, -dims.conn_half));
            let b = add(mid(s), scale(t, dims.conn_half));
            let mut ts = vec![large(a, t, State::L), large(b, t, State::R)];
            if lp.sides[s] != Conn::C0 {
                ts.push(exit_terminal(PortRef::Loop { idx: i, side: s }));
            }
            pieces.push(stub(lp.sides[s].kind(), format!("{}-loop{i}.{s}", lp.sides[s].kind().name()), ts));
            let n = (s + 1) % 4;
            pieces.push(stub(
                PieceKind::ThickLeftBend,
                format!("thick-left-bend-loop{i}.{s}"),
                vec![
                    large(b, t, State::L),
                    large(add(mid(n), scale(travel(n), -dims.conn_half)), travel(n), State::R),
                ],
            ));
        }
        piece_count += 8;
    }
    let stubs = pieces.iter().filter(|p| !p.geometric).count() as u64;
    let in_runs = runs.iter().map(|r| r.count).sum();

    // weight of the geometric part
    let mut absolute = IntInterval::zero(WORK_SCALE);
    if geometric > 0 {
        let mut edges: BTreeSet<(Pt, Pt)> = BTreeSet::new();
        for ep in pieces.iter().filter(|p| p.geometric) {
            let raw = ep.piece.raw_points();
            for (a, b) in ep.piece.boundary_edges() {
                let (p, q) = (raw[a], raw[b]);
                edges.insert(if p < q { (p, q) } else { (q, p) });
            }
        }
        for (p, q) in &edges {
            let dx = BigInt::from(q.0 - p.0);
            let dy = BigInt::from(q.1 - p.1);
            let len = sqrt_enclosure(&(&dx * &dx + &dy * &dy), COORD_SCALE, WORK_SCALE)
                .map_err(|e| LayoutError::AmbiguousWeight(e.to_string()))?;
            absolute = absolute.add(&len);
        }
        for (kind, p) in geometry {
            let n = pieces.iter().filter(|e| e.geometric && e.kind == *kind).count() as u64;
            if n == 0 {
                continue;
            }
            let t = analyze_piece(p).map_err(|e| LayoutError::AmbiguousWeight(e.to_string()))?;
            let ll = &t.row("LL").unwrap().cbar;
            let rr = &t.row("RR").unwrap().cbar;
            if ll != rr {
                return Err(LayoutError::AmbiguousWeight(format!(
                    "{}: LL and RR differ, the ideal state is not unique",
                    p.name
                )));
            }
            absolute = absolute.add(&ll.mul_int(n));
        }
    }
    let nm = network_model(g, cm);
    let rel = nm.ideal(g);
    let relative_ideal = nano(rel);
    let absolute = (geometric > 0).then_some(absolute);
    let target = IntInterval::zero(WORK_SCALE)
        .add(absolute.as_ref().unwrap_or(&IntInterval::zero(WORK_SCALE)))
        .add_scaled(&relative_ideal.rescale(WORK_SCALE));
    let gap = nano(DELTA4);
    let budget = BigInt::from(DELTA4) * pow10(WORK_SCALE - NANO) / 4;
    if target.width() >= budget {
        return Err(LayoutError::AmbiguousWeight(format!(
            "enclosure width {} at scale {WORK_SCALE}",
            target.width()
        )));
    }
    let half = BigInt::from(DELTA4 / 2) * pow10(WORK_SCALE - NANO);
    let unit9 = pow10(WORK_SCALE - NANO);
    let raw = &target.hi + half;
    let up = -Integer::div_floor(&-raw, &unit9);
    let threshold = ScaledInt::new(up, NANO);

    let separation = (f.vars.len() <= 10).then(|| {
        let mut sat = None::<i64>;
        let mut viol = None::<i64>;
        for mask in 0u32..1 << f.vars.len() {
            let a: Vec<bool> = (0..f.vars.len()).map(|v| mask >> v & 1 == 1).collect();
            let c = nm.model.minimize(&nm.fix_assignment(g, &a));
            let slot = if check_1in3(f, &a) { &mut sat } else { &mut viol };
            *slot = Some(slot.map_or(c, |s| s.min(c)));
        }
        (sat, viol)
    });
    let separation = separation.map(|(s, v)| (s.map(nano), v.map(nano)));
    let status = match dims.mode {
        Mode::Mini => "deferred: stub pieces carry no boundary",
        Mode::Proof => "deferred: proof-mode output is checked structurally",
    };
    let mut holes: Vec<Hole> = g
        .loops
        .iter()
        .enumerate()
        .map(|(i, lp)| Hole {
            name: match lp.role {
                LoopRole::Var { var, x } => format!("inside loop {i} (var {var}, column {x})"),
                LoopRole::Clause { clause, group, hat } => format!(
                    "inside loop {i} (clause {clause}, group {group}{})",
                    if hat { ", hat" } else { "" }
                ),
            },
            status: status.into(),
        })
        .collect();
    for c in &g.clauses {
        for gi in 0..3 {
            holes.push(Hole {
                name: format!("between the links of clause {} group {gi}", c.clause),
                status: status.into(),
            });
        }
    }
    holes.push(Hole {
        name: "outer face".into(),
        status: status.into(),
    });
    Ok(ReductionOutput {
        mode: dims.mode,
        pieces,
        runs,
        piece_count,
        geometric,
        stubs,
        in_runs,
        absolute,
        relative_ideal,
        target,
        threshold,
        gap,
        holes,
        cost_source: cm.source.clone(),
        separation,
    })
}

impl ReductionOutput {
    /// Pieces in the coordinate file format.
    pub fn coordinate_text(&self) -> String {
        let mut out = format!(
            "# reduction point set, {} mode{}\n",
            self.mode.name(),
            if self.mode == Mode::Mini {
                " (not proof grade)"
            } else {
                ""
            }
        );
        for r in &self.runs {
            out.push_str(&format!(
                "# run {} x{} from ({}, {}) direction ({}, {})\n",
                r.kind.name(),
                r.count,
                r.start.0,
                r.start.1,
                r.dir.0,
                r.dir.1
            ));
        }
        for p in &self.pieces {
            if !p.geometric {
                out.push_str("# stub\n");
            }
            out.push_str(&write_piece(&p.piece));
        }
        out
    }

    /// Distinct points of all emitted pieces.
    pub fn points(&self) -> Vec<Pt> {
        let set: BTreeSet<Pt> = self
            .pieces
            .iter()
            .flat_map(|p| p.piece.raw_points())
            .collect();
        set.into_iter().collect()
    }

    pub fn sidecar(&self) -> serde_json::Value {
        let s = |v: &ScaledInt| v.to_canonical();
        serde_json::json!({
            "mode": self.mode.name(),
            "proof_grade": self.mode == Mode::Proof,
            "target_weight": {
                "lo": s(&self.target.lo_scaled()),
                "hi": s(&self.target.hi_scaled()),
            },
            "threshold": s(&self.threshold),
            "gap": s(&self.gap),
            "weight_basis": if self.absolute.is_some() {
                "placed pieces plus relative state costs"
            } else {
                "relative state costs only, no pieces placed"
            },
            "absolute_part": self.absolute.as_ref().map(|a| serde_json::json!({
                "lo": s(&a.lo_scaled()),
                "hi": s(&a.hi_scaled()),
            })),
            "relative_ideal": s(&self.relative_ideal),
            "cost_source": self.cost_source,
            "pieces": {
                "total": self.piece_count,
                "with_geometry": self.geometric,
                "stubs": self.stubs,
                "in_runs": self.in_runs,
                "emitted": self.pieces.len(),
                "unexpanded_runs": self.runs.len(),
            },
            "separation": self.separation.as_ref().map(|(a, b)| serde_json::json!({
                "satisfying_min": a.as_ref().map(s),
                "violating_min": b.as_ref().map(s),
            })),
            "holes": self.holes.iter().map(|h| serde_json::json!({
                "name": h.name,
                "status": h.status,
            })).collect::<Vec<_>>(),
        })
    }
}
