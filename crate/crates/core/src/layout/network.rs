use std::collections::{BTreeMap, BTreeSet};

use super::{add, audit, scale, unit, Dims, LayoutError, PieceKind, Pt, WirePlan};
use crate::sat::{validate_embedding, Formula1in3, RectilinearEmbedding};
use crate::workshop::rot;

/// Connection piece on one side of a bit loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conn {
    C,
    CPrime,
    C0,
}

impl Conn {
    pub fn kind(self) -> PieceKind {
        match self {
            Conn::C => PieceKind::C,
            Conn::CPrime => PieceKind::CPrime,
            Conn::C0 => PieceKind::C0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopRole {
    Var { var: usize, x: i64 },
    Clause { clause: usize, group: usize, hat: bool },
}

/// Square of four connection pieces and four thick left bends; sides are
/// indexed east, north, west, south.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitLoop {
    pub role: LoopRole,
    pub center: Pt,
    pub sides: [Conn; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PortRef {
    Loop { idx: usize, side: usize },
    /// The small terminal of the connection piece in the middle of a link.
    Middle { link: usize },
}

/// Connection piece between a thickening and a thinning adapter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Middle {
    pub kind: PieceKind,
    pub center: Pt,
    /// Travel direction of the link through the piece.
    pub dir: Pt,
    pub exit: Option<Pt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Chain { var: usize },
    Entry { clause: usize, group: usize, var: usize },
    /// First link of a group, through the DOWN connection.
    Down { clause: usize, group: usize },
    /// Second link of a group, through a C0 piece.
    Zero { clause: usize, group: usize },
    /// From the DOWN connection of `group` to the UP side of the next group.
    Cycle { clause: usize, group: usize },
}

/// A wire from the small terminal of a C (`from`) to that of a C′ (`to`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub kind: LinkKind,
    pub from: PortRef,
    pub to: PortRef,
    /// Nominal centre line.
    pub path: Vec<Pt>,
    pub middle: Option<Middle>,
    /// One plan, or two around the middle piece.
    pub plans: Vec<WirePlan>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub var: usize,
    pub main: usize,
    pub hat: usize,
    pub entry: usize,
    pub down: usize,
    pub zero: usize,
    pub cycle: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseGadget {
    pub clause: usize,
    pub center: Pt,
    /// Quarter turns of the template: 0 above the line, 2 below.
    pub turn: u32,
    pub groups: Vec<Group>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetGraph {
    pub dims: Dims,
    pub nvars: usize,
    pub loops: Vec<BitLoop>,
    pub links: Vec<Link>,
    pub clauses: Vec<ClauseGadget>,
    /// Loops of each variable from left to right.
    pub chains: Vec<Vec<usize>>,
}

pub(crate) const GROUP_NAMES: [&str; 3] = ["alpha", "beta", "gamma"];

impl GadgetGraph {
    /// Small-terminal apex and outward direction.
    pub fn port(&self, r: PortRef) -> (Pt, Pt) {
        match r {
            PortRef::Loop { idx, side } => {
                let d = unit(side as u32);
                (add(self.loops[idx].center, scale(d, self.dims.port())), d)
            }
            PortRef::Middle { link } => {
                let m = self.links[link].middle.as_ref().expect("link has a middle piece");
                let d = m.exit.expect("middle piece has an exit");
                (add(m.center, scale(d, self.dims.down_exit)), d)
            }
        }
    }

    pub fn link_name(&self, i: usize) -> String {
        match self.links[i].kind {
            LinkKind::Chain { var } => format!("chain {i} of var {var}"),
            LinkKind::Entry { clause, group, .. } => {
                format!("entry {}.{}", clause, GROUP_NAMES[group])
            }
            LinkKind::Down { clause, group } => format!("down {}.{}", clause, GROUP_NAMES[group]),
            LinkKind::Zero { clause, group } => format!("zero {}.{}", clause, GROUP_NAMES[group]),
            LinkKind::Cycle { clause, group } => format!(
                "cycle {}.{}->{}",
                clause,
                GROUP_NAMES[group],
                GROUP_NAMES[(group + 1) % 3]
            ),
        }
    }

    pub fn pieces(&self) -> u64 {
        let wires: u64 = self
            .links
            .iter()
            .flat_map(|l| &l.plans)
            .map(WirePlan::pieces)
            .sum();
        let middles = self.links.iter().filter(|l| l.middle.is_some()).count() as u64;
        wires + 3 * middles + 8 * self.loops.len() as u64
    }
}

fn seg_dir(a: Pt, b: Pt) -> Pt {
    ((b.0 - a.0).signum(), (b.1 - a.1).signum())
}

/// Route a link, splitting around its middle piece.
fn plan_link(path: &[Pt], middle: Option<&Middle>, dims: &Dims) -> Result<Vec<WirePlan>, LayoutError> {
    let Some(m) = middle else {
        return Ok(vec![super::route_corridor(path, dims)?]);
    };
    let k = path
        .iter()
        .position(|&p| p == m.center)
        .ok_or_else(|| LayoutError::InvalidPath("middle piece off the path".into()))?;
    let half = dims.complex_half();
    let mut first = path[..k].to_vec();
    first.push(add(m.center, scale(m.dir, -half)));
    let mut second = vec![add(m.center, scale(m.dir, half))];
    second.extend_from_slice(&path[k + 1..]);
    Ok(vec![
        super::route_corridor(&first, dims)?,
        super::route_corridor(&second, dims)?,
    ])
}

struct Frame {
    center: Pt,
    turn: u32,
}

impl Frame {
    fn at(&self, p: Pt) -> Pt {
        add(self.center, rot(self.turn, p))
    }
}

/// Gadget network for a 1-in-3 formula and its rectilinear embedding.
pub fn build_network(
    f: &Formula1in3,
    e: &RectilinearEmbedding,
    dims: &Dims,
) -> Result<GadgetGraph, LayoutError> {
    let bad = |m: String| LayoutError::InvalidEmbedding(m);
    if !f.is_well_formed() {
        return Err(bad("clauses must name three distinct variables".into()));
    }
    if e.vars.len() != f.vars.len() || e.clauses.len() != f.clauses.len() {
        return Err(bad("embedding does not match the formula".into()));
    }
    let report = validate_embedding(e);
    if !report.is_valid() {
        return Err(bad(format!("{:?}", report.issues[0])));
    }
    for (ci, c) in f.clauses.iter().enumerate() {
        let a: BTreeSet<usize> = c.iter().copied().collect();
        let b: BTreeSet<usize> = e.clauses[ci].vars.iter().copied().collect();
        if a != b {
            return Err(bad(format!("clause {ci} is placed with other variables")));
        }
    }
    let g = dims.grid;
    let line = e.line_y() * g;
    let port = dims.port();
    let mut loops = Vec::new();
    let mut links = Vec::new();

    // variable loops, one per distinct leg column
    let mut cols: BTreeMap<usize, BTreeMap<i64, [bool; 2]>> = BTreeMap::new();
    for leg in &e.legs {
        let x = leg.corners[0].0;
        let above = e.side(leg.clause) == crate::sat::Side::Above;
        let slot = cols.entry(leg.var).or_default().entry(x).or_default();
        let k = usize::from(!above);
        if slot[k] {
            return Err(bad(format!("two legs of var {} share column {x}", leg.var)));
        }
        slot[k] = true;
    }
    let mut chains = vec![Vec::new(); f.vars.len()];
    let mut var_loop: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    for (&var, xs) in &cols {
        let n = xs.len();
        for (i, (&x, used)) in xs.iter().enumerate() {
            let side = |u: bool| if u { Conn::CPrime } else { Conn::C0 };
            let sides = [
                if i + 1 < n { Conn::C } else { Conn::C0 },
                side(used[0]),
                if i > 0 { Conn::CPrime } else { Conn::C0 },
                side(used[1]),
            ];
            var_loop.insert((var, x), loops.len());
            chains[var].push(loops.len());
            loops.push(BitLoop {
                role: LoopRole::Var { var, x },
                center: (x * g, line),
                sides,
            });
        }
        for w in chains[var].windows(2) {
            let a = add(loops[w[0]].center, (port, 0));
            let b = add(loops[w[1]].center, (-port, 0));
            links.push(Link {
                kind: LinkKind::Chain { var },
                from: PortRef::Loop { idx: w[0], side: 0 },
                to: PortRef::Loop { idx: w[1], side: 2 },
                path: vec![a, b],
                middle: None,
                plans: Vec::new(),
            });
        }
    }

    let (p, h, d, m, pe) = (dims.p, dims.h, dims.d, dims.m, port);
    let de = dims.down_exit;
    let mut clauses = Vec::new();
    for (ci, cp) in e.clauses.iter().enumerate() {
        let above = e.side(ci) == crate::sat::Side::Above;
        let fr = Frame {
            center: (cp.point.0 * g, cp.point.1 * g),
            turn: if above { 0 } else { 2 },
        };
        // which leg feeds which group
        let mut leg_of = [usize::MAX; 3];
        for (li, leg) in e.legs.iter().enumerate().filter(|(_, l)| l.clause == ci) {
            let n = leg.corners.len();
            let approach = seg_dir(leg.corners[n - 2], leg.corners[n - 1]);
            let local = rot(4 - fr.turn, approach);
            let grp = match local {
                (1, 0) => 0,
                (0, 1) => 1,
                (-1, 0) => 2,
                _ => return Err(bad(format!("clause {ci}: a leg arrives from outside"))),
            };
            if leg_of[grp] != usize::MAX {
                return Err(bad(format!("clause {ci}: two legs arrive from one side")));
            }
            leg_of[grp] = li;
        }
        if leg_of.contains(&usize::MAX) {
            return Err(bad(format!("clause {ci} needs three legs")));
        }
        let mut groups = Vec::new();
        for (gi, &li) in leg_of.iter().enumerate() {
            let k = gi as u32 + 1;
            let o = scale(rot(k, (0, -1)), -d);
            let at = |q: Pt| fr.at(add(o, rot(k, q)));
            let side = |local: usize| (local + k as usize + fr.turn as usize) % 4;
            let main = loops.len();
            let mut s = [Conn::C0; 4];
            s[side(2)] = Conn::C;
            s[side(0)] = Conn::C;
            s[side(1)] = Conn::C;
            loops.push(BitLoop {
                role: LoopRole::Clause {
                    clause: ci,
                    group: gi,
                    hat: false,
                },
                center: at((-p, 0)),
                sides: s,
            });
            let hat = loops.len();
            let mut s = [Conn::C0; 4];
            s[side(2)] = Conn::CPrime;
            s[side(1)] = Conn::CPrime;
            s[side(3)] = Conn::CPrime;
            loops.push(BitLoop {
                role: LoopRole::Clause {
                    clause: ci,
                    group: gi,
                    hat: true,
                },
                center: at((p, 0)),
                sides: s,
            });
            let travel = rot(fr.turn + k, (1, 0));
            let down = links.len();
            links.push(Link {
                kind: LinkKind::Down {
                    clause: ci,
                    group: gi,
                },
                from: PortRef::Loop {
                    idx: main,
                    side: side(0),
                },
                to: PortRef::Loop {
                    idx: hat,
                    side: side(2),
                },
                path: vec![at((-p + pe, 0)), at((0, 0)), at((p - pe, 0))],
                middle: Some(Middle {
                    kind: PieceKind::C,
                    center: at((0, 0)),
                    dir: travel,
                    exit: Some(rot(fr.turn + k, (0, -1))),
                }),
                plans: Vec::new(),
            });
            let zero = links.len();
            links.push(Link {
                kind: LinkKind::Zero {
                    clause: ci,
                    group: gi,
                },
                from: PortRef::Loop {
                    idx: main,
                    side: side(1),
                },
                to: PortRef::Loop {
                    idx: hat,
                    side: side(1),
                },
                path: vec![
                    at((-p, pe)),
                    at((-p, h)),
                    at((0, h)),
                    at((p, h)),
                    at((p, pe)),
                ],
                middle: Some(Middle {
                    kind: PieceKind::C0,
                    center: at((0, h)),
                    dir: travel,
                    exit: None,
                }),
                plans: Vec::new(),
            });
            // entry: from the variable port along the leg, around the group
            let leg = &e.legs[li];
            let n = leg.corners.len();
            let x0 = leg.corners[0].0;
            let vl = var_loop[&(leg.var, x0)];
            let vside = if above { 1 } else { 3 };
            let mut path = vec![add(loops[vl].center, scale(unit(vside as u32), port))];
            path.extend(leg.corners[1..n - 1].iter().map(|&(x, y)| (x * g, y * g)));
            let r = d + h + m;
            let approach: Vec<Pt> = [
                (-r, 0),
                (-r, -(p + pe + m)),
                (-d, -(p + pe + m)),
                (-d, -(p + pe)),
            ]
            .iter()
            .map(|&q| fr.at(rot(gi as u32, q)))
            .collect();
            let last = *path.last().unwrap();
            let dir_in = seg_dir(last, fr.center);
            if seg_dir(last, approach[0]) != dir_in || approach[0] == last {
                return Err(bad(format!(
                    "clause {ci}: the final leg segment is shorter than the template"
                )));
            }
            path.extend(approach);
            path.reverse();
            let entry = links.len();
            links.push(Link {
                kind: LinkKind::Entry {
                    clause: ci,
                    group: gi,
                    var: leg.var,
                },
                from: PortRef::Loop {
                    idx: main,
                    side: side(2),
                },
                to: PortRef::Loop {
                    idx: vl,
                    side: vside,
                },
                path,
                middle: None,
                plans: Vec::new(),
            });
            groups.push(Group {
                var: leg.var,
                main,
                hat,
                entry,
                down,
                zero,
                cycle: usize::MAX,
            });
        }
        for gi in 0..3 {
            let next = (gi + 1) % 3;
            let local: Vec<Pt> = if gi < 2 {
                [(-d + de, 0), (-p, 0), (-p, -d + pe)]
                    .iter()
                    .map(|&q| rot(gi as u32, q))
                    .collect()
            } else {
                vec![(d - de, 0), (0, 0), (0, p), (-d + pe, p)]
            };
            let hat = groups[next].hat;
            let k = next as u32 + 1;
            groups[gi].cycle = links.len();
            links.push(Link {
                kind: LinkKind::Cycle {
                    clause: ci,
                    group: gi,
                },
                from: PortRef::Middle {
                    link: groups[gi].down,
                },
                to: PortRef::Loop {
                    idx: hat,
                    side: (3 + k as usize + fr.turn as usize) % 4,
                },
                path: local.iter().map(|&q| fr.at(q)).collect(),
                middle: None,
                plans: Vec::new(),
            });
        }
        clauses.push(ClauseGadget {
            clause: ci,
            center: fr.center,
            turn: fr.turn,
            groups,
        });
    }

    let mut graph = GadgetGraph {
        dims: dims.clone(),
        nvars: f.vars.len(),
        loops,
        links,
        clauses,
        chains,
    };
    for i in 0..graph.links.len() {
        let (a, da) = graph.port(graph.links[i].from);
        let (b, db) = graph.port(graph.links[i].to);
        let l = &graph.links[i];
        let n = l.path.len();
        if l.path[0] != a || l.path[n - 1] != b {
            return Err(LayoutError::InvalidPath(format!(
                "{} does not start and end at its ports",
                graph.link_name(i)
            )));
        }
        if seg_dir(l.path[0], l.path[1]) != da || seg_dir(l.path[n - 2], l.path[n - 1]) != (-db.0, -db.1)
        {
            return Err(LayoutError::InvalidPath(format!(
                "{} leaves a port sideways",
                graph.link_name(i)
            )));
        }
        let plans = plan_link(&l.path, l.middle.as_ref(), dims)?;
        graph.links[i].plans = plans;
    }
    let paths: Vec<Vec<Pt>> = graph.links.iter().map(|l| l.path.clone()).collect();
    if let Some(&(a, b, _)) = audit::corridor_conflicts(&paths, dims.corridor).first() {
        return Err(LayoutError::LayoutConflict {
            a: graph.link_name(a),
            b: graph.link_name(b),
        });
    }
    Ok(graph)
}
