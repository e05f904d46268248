use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;

use super::network::{Conn, GadgetGraph, LinkKind, LoopRole, PortRef};
use super::{PieceKind, Step, WirePlan};
use crate::arith::{pow10, ScaledInt};
use crate::workshop::{PatternTable, State};

/// Costs are integers in units of 10⁻⁹.
pub const NANO: u32 = 9;
const INF: i64 = i64::MAX / 8;

type Mat = [[i64; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[INF; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j] = out[i][j].min(a[i][k].saturating_add(b[k][j]));
            }
        }
    }
    out
}

fn mat_pow(a: &Mat, mut n: u64) -> Mat {
    let mut out = [[0, INF], [INF, 0]];
    let mut base = *a;
    while n > 0 {
        if n & 1 == 1 {
            out = mat_mul(&out, &base);
        }
        base = mat_mul(&base, &base);
        n >>= 1;
    }
    out
}

fn idx(s: State) -> usize {
    match s {
        State::L => 0,
        State::R => 1,
    }
}

fn st(i: usize) -> State {
    if i == 0 {
        State::L
    } else {
        State::R
    }
}

/// Relative reduced costs per piece kind and pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    tables: BTreeMap<PieceKind, BTreeMap<String, i64>>,
    pub source: String,
}

const PUBLISHED: &[(PieceKind, &[(&str, i64)])] = &[
    (
        PieceKind::Wire,
        &[("LL", 0), ("LR", 210_506_663), ("RL", 125_593_246), ("RR", 0)],
    ),
    (
        PieceKind::ExtendedWire,
        &[("LL", 0), ("LR", 208_397_570), ("RL", 122_001_310), ("RR", 0)],
    ),
    (
        PieceKind::Thickening,
        &[("LL", 51_402), ("LR", 18_887_246), ("RL", 14_627_250), ("RR", 0)],
    ),
    (
        PieceKind::Thinning,
        &[("LL", 0), ("LR", 18_887_246), ("RL", 14_627_250), ("RR", 51_402)],
    ),
    (
        PieceKind::C0,
        &[("LL", 0), ("LR", 44_001_701), ("RL", 20_571_757), ("RR", 0)],
    ),
    (
        PieceKind::LeftBend,
        &[("LL", 0), ("LR", 86_460_895), ("RL", 125_593_246), ("RR", 0)],
    ),
    (
        PieceKind::RightBend,
        &[("LL", 0), ("LR", 210_506_663), ("RL", 125_593_246), ("RR", 0)],
    ),
    (
        PieceKind::ThickLeftBend,
        &[("LL", 0), ("LR", 891_261_046), ("RL", 20_571_757), ("RR", 0)],
    ),
    (
        PieceKind::C,
        &[
            ("LLL", 3_861_076),
            ("LLR", 1_575),
            ("LRL", 29_994_716),
            ("LRR", 26_135_215),
            ("RLL", 20_571_757),
            ("RLR", 20_573_332),
            ("RRL", 0),
            ("RRR", 4_630_878),
        ],
    ),
];

fn key(states: &[State]) -> String {
    states.iter().map(|s| s.letter()).collect()
}

impl CostModel {
    /// The published relative reduced costs.
    pub fn published() -> CostModel {
        CostModel {
            tables: PUBLISHED
                .iter()
                .map(|(k, rows)| (*k, rows.iter().map(|(p, v)| (p.to_string(), *v)).collect()))
                .collect(),
            source: "published tables".into(),
        }
    }

    /// Costs from analysed pieces named after the kinds; every kind except
    /// the mirrored `C'` has to be present.
    pub fn from_tables(tables: &[PatternTable]) -> Result<CostModel, String> {
        let mut out = BTreeMap::new();
        for kind in PieceKind::ALL {
            if kind == PieceKind::CPrime {
                continue;
            }
            let t = tables
                .iter()
                .find(|t| t.piece == kind.name())
                .ok_or_else(|| format!("no analysed piece named {}", kind.name()))?;
            let mut rows = BTreeMap::new();
            for r in &t.rows {
                let half = pow10(crate::arith::WORK_SCALE - NANO);
                let round = |v: &BigInt| -> BigInt { Integer::div_floor(&(v + &half / 2), &half) };
                let (lo, hi) = (round(&r.ctilde.lo), round(&r.ctilde.hi));
                if lo != hi {
                    return Err(format!(
                        "{} {}: enclosure does not round to one nine-digit value",
                        t.piece, r.pattern
                    ));
                }
                let v = i64::try_from(&lo).map_err(|e| e.to_string())?;
                rows.insert(r.pattern.to_uppercase(), v);
            }
            out.insert(kind, rows);
        }
        Ok(CostModel {
            tables: out,
            source: "analysed pieces".into(),
        })
    }

    /// `c̃` of a pattern; `C'` is the mirror image of `C`.
    pub fn c(&self, kind: PieceKind, states: &[State]) -> i64 {
        if kind == PieceKind::CPrime {
            let flipped: Vec<State> = states.iter().map(|s| s.flip()).collect();
            return self.c(PieceKind::C, &flipped);
        }
        self.tables[&kind][&key(states)]
    }

    fn mat(&self, kind: PieceKind) -> Mat {
        let mut m = [[0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.c(kind, &[st(i), st(j)]);
            }
        }
        m
    }

    /// Least cost of a wire per (start state, end state).
    pub fn wire_matrix(&self, plan: &WirePlan) -> [[i64; 2]; 2] {
        let mut out = [[0, INF], [INF, 0]];
        for s in &plan.steps {
            let m = match s {
                Step::Straight { kind, count, .. } => mat_pow(&self.mat(*kind), *count),
                Step::Bend { kind, .. } => self.mat(*kind),
            };
            out = mat_mul(&out, &m);
        }
        out
    }

    pub fn delta1(&self) -> i64 {
        self.c(PieceKind::C, &[State::L, State::L, State::L])
    }
    pub fn eps2(&self) -> i64 {
        self.c(PieceKind::C, &[State::L, State::L, State::R])
    }
    pub fn delta2(&self) -> i64 {
        self.c(PieceKind::C, &[State::R, State::R, State::R])
    }
    pub fn eps1(&self) -> i64 {
        self.c(PieceKind::Thickening, &[State::L, State::L])
    }
}

/// Lower bound for a breach in any wire-like piece.
pub const DELTA3: i64 = 10_000_000;
/// Separation between satisfiable and unsatisfiable networks.
pub const DELTA4: i64 = 700_000;

pub fn nano(v: i64) -> ScaledInt {
    ScaledInt::new(v, NANO)
}

/// Least cost of a link from a `C` of state `v1` to a `C'` of state `v2`.
pub fn link_cost(cm: &CostModel, plan: &WirePlan, v1: State, v2: State) -> i64 {
    let w = cm.wire_matrix(plan);
    let mut best = INF;
    for s in 0..2 {
        for t in 0..2 {
            let c = cm.c(PieceKind::C, &[v1, v1, st(s)])
                + w[s][t]
                + cm.c(PieceKind::CPrime, &[v2, v2, st(t)]);
            best = best.min(c);
        }
    }
    best
}

/// Least cost of a bit loop with the given connection pieces and exit
/// states, over uniform and over non-uniform large terminal states.
pub fn bit_loop_margin(cm: &CostModel, sides: [Conn; 4], exits: [State; 4]) -> (i64, i64) {
    let mut uniform = INF;
    let mut mixed = INF;
    for mask in 0u32..256 {
        let t = |i: usize| st((mask >> (i % 8) & 1) as usize);
        let mut c = 0;
        for (i, conn) in sides.iter().enumerate() {
            let (a, b) = (t(2 * i), t(2 * i + 1));
            c += match conn {
                Conn::C0 => cm.c(PieceKind::C0, &[a, b]),
                _ => cm.c(conn.kind(), &[a, b, exits[i]]),
            };
            c += cm.c(PieceKind::ThickLeftBend, &[b, t(2 * i + 2)]);
        }
        if mask == 0 || mask == 255 {
            uniform = uniform.min(c);
        } else {
            mixed = mixed.min(c);
        }
    }
    (uniform, mixed)
}

/// Cost term over a few binary variables; bit `i` of the table index is
/// the state of `vars[i]` (0 = L).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub vars: Vec<usize>,
    pub table: Vec<i64>,
}

impl Factor {
    fn at(&self, assign: impl Fn(usize) -> usize) -> i64 {
        let mut i = 0;
        for (b, &v) in self.vars.iter().enumerate() {
            i |= assign(v) << b;
        }
        self.table[i]
    }
}

/// Sum of factors over binary state variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateModel {
    pub names: Vec<String>,
    pub factors: Vec<Factor>,
}

impl StateModel {
    pub fn var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn add(&mut self, vars: Vec<usize>, f: impl Fn(&[State]) -> i64) {
        let k = vars.len();
        let table = (0..1usize << k)
            .map(|i| {
                let s: Vec<State> = (0..k).map(|b| st(i >> b & 1)).collect();
                f(&s)
            })
            .collect();
        self.factors.push(Factor { vars, table });
    }

    pub fn cost(&self, assign: &[State]) -> i64 {
        self.factors
            .iter()
            .map(|f| f.at(|v| idx(assign[v])))
            .sum()
    }

    /// Exhaustive minimum with some variables fixed: `(cost, argmin,
    /// number of optimal assignments)`.
    pub fn brute_force(&self, fixed: &[Option<State>]) -> (i64, Vec<State>, u64) {
        let n = self.names.len();
        let free: Vec<usize> = (0..n).filter(|&v| fixed.get(v).copied().flatten().is_none()).collect();
        assert!(free.len() <= 30, "too many free variables for enumeration");
        let mut cur: Vec<usize> = (0..n)
            .map(|v| fixed.get(v).copied().flatten().map_or(0, idx))
            .collect();
        let mut best = (INF, Vec::new(), 0u64);
        for mask in 0u64..1 << free.len() {
            for (b, &v) in free.iter().enumerate() {
                cur[v] = (mask >> b & 1) as usize;
            }
            let c: i64 = self.factors.iter().map(|f| f.at(|v| cur[v])).sum();
            if c < best.0 {
                best = (c, cur.iter().map(|&i| st(i)).collect(), 1);
            } else if c == best.0 {
                best.2 += 1;
            }
        }
        best
    }

    /// Exact minimum by variable elimination.
    pub fn minimize(&self, fixed: &[Option<State>]) -> i64 {
        let n = self.names.len();
        let fix = |v: usize| fixed.get(v).copied().flatten();
        let mut constant = 0i64;
        let mut pool: Vec<Factor> = Vec::new();
        for f in &self.factors {
            let keep: Vec<usize> = f.vars.iter().copied().filter(|&v| fix(v).is_none()).collect();
            let table = (0..1usize << keep.len())
                .map(|i| {
                    f.at(|v| match fix(v) {
                        Some(s) => idx(s),
                        None => i >> keep.iter().position(|&k| k == v).unwrap() & 1,
                    })
                })
                .collect::<Vec<i64>>();
            if keep.is_empty() {
                constant += table[0];
            } else {
                pool.push(Factor { vars: keep, table });
            }
        }
        let mut alive: Vec<bool> = (0..n).map(|v| fix(v).is_none()).collect();
        let mut occ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (i, f) in pool.iter().enumerate() {
            for &v in &f.vars {
                occ[v].push(i);
                nbrs[v].extend(f.vars.iter().copied().filter(|&u| u != v));
            }
        }
        let mut pool: Vec<Option<Factor>> = pool.into_iter().map(Some).collect();
        // minimum degree order in the interaction graph
        while let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (nbrs[v].len(), v)) {
            alive[v] = false;
            let touch: Vec<Factor> = occ[v].iter().filter_map(|&i| pool[i].take()).collect();
            let scope: Vec<usize> = std::mem::take(&mut nbrs[v]).into_iter().collect();
            for &u in &scope {
                nbrs[u].remove(&v);
                nbrs[u].extend(scope.iter().copied().filter(|&w| w != u));
            }
            assert!(scope.len() <= 24, "elimination scope too wide");
            let table: Vec<i64> = (0..1usize << scope.len())
                .map(|i| {
                    (0..2)
                        .map(|sv| {
                            touch
                                .iter()
                                .map(|f| {
                                    f.at(|u| {
                                        if u == v {
                                            sv
                                        } else {
                                            i >> scope.binary_search(&u).unwrap() & 1
                                        }
                                    })
                                })
                                .sum::<i64>()
                        })
                        .min()
                        .unwrap()
                })
                .collect();
            if scope.is_empty() {
                constant += table[0];
            } else {
                for &u in &scope {
                    occ[u].push(pool.len());
                }
                pool.push(Some(Factor {
                    vars: scope,
                    table,
                }));
            }
        }
        constant
    }
}

/// Which part of the network a factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Clause(usize),
    Entry { clause: usize, group: usize },
    Chain(usize),
}

/// State model of a gadget network: one variable per bit loop, two per
/// connection piece between adapters. Small terminal states are minimised
/// inside each factor.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    pub model: StateModel,
    pub loop_var: Vec<usize>,
    pub tags: Vec<Tag>,
}

fn end_vec(cm: &CostModel, kind: PieceKind, a: State, b: State) -> [i64; 2] {
    [cm.c(kind, &[a, b, State::L]), cm.c(kind, &[a, b, State::R])]
}

fn through(from: [i64; 2], w: &Mat, to: [i64; 2]) -> i64 {
    let mut best = INF;
    for s in 0..2 {
        for t in 0..2 {
            best = best.min(from[s] + w[s][t] + to[t]);
        }
    }
    best
}

pub fn network_model(g: &GadgetGraph, cm: &CostModel) -> NetworkModel {
    let mut m = StateModel::default();
    let mut tags = Vec::new();
    let loop_tag = |i: usize| match g.loops[i].role {
        LoopRole::Var { var, .. } => Tag::Chain(var),
        LoopRole::Clause { clause, .. } => Tag::Clause(clause),
    };
    let loop_var: Vec<usize> = (0..g.loops.len()).map(|i| m.var(format!("loop {i}"))).collect();
    for (i, l) in g.loops.iter().enumerate() {
        let unused = l.sides.iter().filter(|&&c| c == Conn::C0).count() as i64;
        m.add(vec![loop_var[i]], |s| {
            unused * cm.c(PieceKind::C0, &[s[0], s[0]])
                + 4 * cm.c(PieceKind::ThickLeftBend, &[s[0], s[0]])
        });
        tags.push(loop_tag(i));
    }
    let mut mid: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (i, l) in g.links.iter().enumerate() {
        if l.middle.is_some() {
            let a = m.var(format!("{} in", g.link_name(i)));
            let b = m.var(format!("{} out", g.link_name(i)));
            mid.insert(i, (a, b));
        }
    }
    for (i, l) in g.links.iter().enumerate() {
        let tag = match l.kind {
            LinkKind::Chain { var } => Tag::Chain(var),
            LinkKind::Entry { clause, group, .. } => Tag::Entry { clause, group },
            LinkKind::Down { clause, .. }
            | LinkKind::Zero { clause, .. }
            | LinkKind::Cycle { clause, .. } => Tag::Clause(clause),
        };
        let PortRef::Loop { idx: to, .. } = l.to else {
            unreachable!("links end at loops")
        };
        let to = loop_var[to];
        if let Some(md) = &l.middle {
            let PortRef::Loop { idx: from, .. } = l.from else {
                unreachable!("middle links start at loops")
            };
            let (t1, t2) = mid[&i];
            let w0 = cm.wire_matrix(&l.plans[0]);
            let w1 = cm.wire_matrix(&l.plans[1]);
            m.add(vec![loop_var[from], t1], |s| {
                let thick = [
                    cm.c(PieceKind::Thickening, &[State::L, s[1]]),
                    cm.c(PieceKind::Thickening, &[State::R, s[1]]),
                ];
                through(end_vec(cm, PieceKind::C, s[0], s[0]), &w0, thick)
            });
            tags.push(tag);
            m.add(vec![t2, to], |s| {
                let thin = [
                    cm.c(PieceKind::Thinning, &[s[0], State::L]),
                    cm.c(PieceKind::Thinning, &[s[0], State::R]),
                ];
                through(thin, &w1, end_vec(cm, PieceKind::CPrime, s[1], s[1]))
            });
            tags.push(tag);
            if md.kind == PieceKind::C0 {
                m.add(vec![t1, t2], |s| cm.c(PieceKind::C0, s));
                tags.push(tag);
            }
            continue;
        }
        let w = cm.wire_matrix(&l.plans[0]);
        match l.from {
            PortRef::Loop { idx, .. } => {
                m.add(vec![loop_var[idx], to], |s| {
                    through(
                        end_vec(cm, PieceKind::C, s[0], s[0]),
                        &w,
                        end_vec(cm, PieceKind::CPrime, s[1], s[1]),
                    )
                });
            }
            PortRef::Middle { link } => {
                let (t1, t2) = mid[&link];
                m.add(vec![t1, t2, to], |s| {
                    through(
                        end_vec(cm, PieceKind::C, s[0], s[1]),
                        &w,
                        end_vec(cm, PieceKind::CPrime, s[2], s[2]),
                    )
                });
            }
        }
        tags.push(tag);
    }
    NetworkModel {
        model: m,
        loop_var,
        tags,
    }
}

impl NetworkModel {
    fn sub(&self, keep: impl Fn(Tag) -> bool) -> StateModel {
        StateModel {
            names: self.model.names.clone(),
            factors: self
                .model
                .factors
                .iter()
                .zip(&self.tags)
                .filter(|(_, t)| keep(**t))
                .map(|(f, _)| f.clone())
                .collect(),
        }
    }

    /// Fix every loop of each variable to `true → L`.
    pub fn fix_assignment(&self, g: &GadgetGraph, a: &[bool]) -> Vec<Option<State>> {
        let mut fixed = vec![None; self.model.names.len()];
        for (var, chain) in g.chains.iter().enumerate() {
            for &l in chain {
                fixed[self.loop_var[l]] = Some(if a[var] { State::L } else { State::R });
            }
        }
        fixed
    }

    /// Cost of the ideal state: every clause in its best exactly-one-L
    /// pattern with consistent entries and uniform chains. Independent of
    /// satisfiability.
    pub fn ideal(&self, g: &GadgetGraph) -> i64 {
        let mut total = 0;
        for c in &g.clauses {
            let sub = self.sub(|t| match t {
                Tag::Clause(k) => k == c.clause,
                Tag::Entry { clause, .. } => clause == c.clause,
                Tag::Chain(_) => false,
            });
            let mut best = INF;
            for one in 0..3 {
                let mut fixed = vec![None; self.model.names.len()];
                for (gi, grp) in c.groups.iter().enumerate() {
                    let s = if gi == one { State::L } else { State::R };
                    fixed[self.loop_var[grp.main]] = Some(s);
                    for &l in &g.chains[grp.var] {
                        fixed[self.loop_var[l]] = Some(s);
                    }
                }
                best = best.min(sub.minimize(&fixed));
            }
            total += best;
        }
        for (var, chain) in g.chains.iter().enumerate() {
            let sub = self.sub(|t| t == Tag::Chain(var));
            let best = [State::L, State::R]
                .into_iter()
                .map(|s| {
                    let mut fixed = vec![None; self.model.names.len()];
                    for &l in chain {
                        fixed[self.loop_var[l]] = Some(s);
                    }
                    sub.minimize(&fixed)
                })
                .max()
                .unwrap_or(0);
            total += best;
        }
        total
    }
}

/// Least cost of one clause gadget per state of its three main loops
/// (entries excluded), in pattern order LLL, LLR, ..., RRR.
pub fn clause_case_costs(g: &GadgetGraph, cm: &CostModel, clause: usize) -> Vec<([State; 3], i64)> {
    let nm = network_model(g, cm);
    let sub = nm.sub(|t| t == Tag::Clause(clause));
    let c = &g.clauses[clause];
    (0..8)
        .map(|mask| {
            let s = [st(mask >> 2 & 1), st(mask >> 1 & 1), st(mask & 1)];
            let mut fixed = vec![None; nm.model.names.len()];
            for (gi, grp) in c.groups.iter().enumerate() {
                fixed[nm.loop_var[grp.main]] = Some(s[gi]);
            }
            // only the clause's own variables matter; the rest have no factors
            let used: Vec<usize> = sub.factors.iter().flat_map(|f| f.vars.clone()).collect();
            for (v, f) in fixed.iter_mut().enumerate() {
                if f.is_none() && !used.contains(&v) {
                    *f = Some(State::L);
                }
            }
            (s, sub.brute_force(&fixed).0)
        })
        .collect()
}
