//! Rectilinear embeddings: variables as segments on one horizontal line,
//! clauses as points above or below it, and one axis-parallel lattice path
//! per variable-clause incidence.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Above,
    Below,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Side::Above => 1,
            Side::Below => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarPlacement {
    pub x_from: i64,
    pub x_to: i64,
    pub y: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClausePlacement {
    pub point: (i64, i64),
    pub vars: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegPath {
    pub clause: usize,
    pub var: usize,
    /// Corner points from the variable segment to the clause point.
    pub corners: Vec<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RectilinearEmbedding {
    pub vars: Vec<VarPlacement>,
    pub clauses: Vec<ClausePlacement>,
    pub legs: Vec<LegPath>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedIssue {
    NotCollinear(usize),
    VarOverlap(usize, usize),
    ClauseOnLine(usize),
    Diagonal {
        leg: usize,
    },
    BadStart {
        leg: usize,
    },
    BadEnd {
        leg: usize,
    },
    SharedPoint {
        point: (i64, i64),
        legs: (usize, usize),
    },
    CrossesLine {
        leg: usize,
        point: (i64, i64),
    },
    Coverage(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddingReport {
    pub issues: Vec<EmbedIssue>,
}

impl EmbeddingReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl RectilinearEmbedding {
    pub fn line_y(&self) -> i64 {
        self.vars.first().map(|v| v.y).unwrap_or(0)
    }

    pub fn side(&self, clause: usize) -> Side {
        if self.clauses[clause].point.1 > self.line_y() {
            Side::Above
        } else {
            Side::Below
        }
    }

    /// Variables ordered along the line.
    pub fn var_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by_key(|&v| (self.vars[v].x_from, v));
        order
    }

    /// Bounding box `(xmin, ymin, xmax, ymax)` of everything drawn.
    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        let mut b = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        let mut eat = |x: i64, y: i64| {
            b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
        };
        for v in &self.vars {
            eat(v.x_from, v.y);
            eat(v.x_to, v.y);
        }
        for l in &self.legs {
            for &(x, y) in &l.corners {
                eat(x, y);
            }
        }
        if b.0 == i64::MAX {
            (0, 0, 0, 0)
        } else {
            b
        }
    }
}

fn lattice_points(corners: &[(i64, i64)]) -> Option<Vec<(i64, i64)>> {
    let mut out = vec![corners[0]];
    for w in corners.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b || (a.0 != b.0 && a.1 != b.1) {
            return None;
        }
        let (dx, dy) = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
        let mut p = a;
        while p != b {
            p = (p.0 + dx, p.1 + dy);
            out.push(p);
        }
    }
    Some(out)
}

pub fn validate_embedding(e: &RectilinearEmbedding) -> EmbeddingReport {
    let mut issues = Vec::new();
    let y0 = e.line_y();
    for (i, v) in e.vars.iter().enumerate() {
        if v.y != y0 || v.x_from > v.x_to {
            issues.push(EmbedIssue::NotCollinear(i));
        }
    }
    let order = e.var_order();
    for w in order.windows(2) {
        if e.vars[w[0]].x_to >= e.vars[w[1]].x_from {
            issues.push(EmbedIssue::VarOverlap(w[0], w[1]));
        }
    }
    let on_span =
        |p: (i64, i64)| p.1 == y0 && e.vars.iter().any(|v| v.x_from <= p.0 && p.0 <= v.x_to);
    for (i, c) in e.clauses.iter().enumerate() {
        if c.point.1 == y0 {
            issues.push(EmbedIssue::ClauseOnLine(i));
        }
    }
    // point -> (leg, is_endpoint)
    let mut claimed: HashMap<(i64, i64), (usize, bool)> = HashMap::new();
    for c in &e.clauses {
        claimed.insert(c.point, (usize::MAX, true));
    }
    let mut seen: HashMap<usize, Vec<usize>> = HashMap::new();
    for (li, leg) in e.legs.iter().enumerate() {
        if leg.corners.len() < 2 || leg.clause >= e.clauses.len() || leg.var >= e.vars.len() {
            issues.push(EmbedIssue::BadEnd { leg: li });
            continue;
        }
        let Some(pts) = lattice_points(&leg.corners) else {
            issues.push(EmbedIssue::Diagonal { leg: li });
            continue;
        };
        let v = &e.vars[leg.var];
        let start = pts[0];
        if start.1 != y0 || start.0 < v.x_from || start.0 > v.x_to {
            issues.push(EmbedIssue::BadStart { leg: li });
        }
        if *pts.last().unwrap() != e.clauses[leg.clause].point {
            issues.push(EmbedIssue::BadEnd { leg: li });
        }
        seen.entry(leg.clause).or_default().push(leg.var);
        let last = pts.len() - 1;
        for (k, &p) in pts.iter().enumerate() {
            let endpoint = k == 0 || k == last;
            if !endpoint && p.1 == y0 {
                issues.push(EmbedIssue::CrossesLine { leg: li, point: p });
                continue;
            }
            if k == 0 && on_span(p) {
                // starts are checked above; several legs may start at one point
                if let Some(&(other, false)) = claimed.get(&p) {
                    issues.push(EmbedIssue::SharedPoint {
                        point: p,
                        legs: (other, li),
                    });
                }
                claimed.entry(p).or_insert((li, true));
                continue;
            }
            match claimed.get(&p) {
                None => {
                    claimed.insert(p, (li, endpoint));
                }
                Some(&(_, true)) if endpoint => {}
                Some(&(other, _)) => issues.push(EmbedIssue::SharedPoint {
                    point: p,
                    legs: (other, li),
                }),
            }
        }
    }
    for (ci, c) in e.clauses.iter().enumerate() {
        let mut have = seen.remove(&ci).unwrap_or_default();
        have.sort_unstable();
        let mut want = c.vars.clone();
        want.sort_unstable();
        if have != want {
            issues.push(EmbedIssue::Coverage(format!(
                "clause {ci}: legs from {have:?}, expected {want:?}"
            )));
        }
    }
    EmbeddingReport { issues }
}

/// One clause of a line model: its variables and the side it is drawn on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineClause {
    pub vars: Vec<usize>,
    pub side: Side,
}

/// Embed clauses around variables placed in `order` along the line.
///
/// Each side must form a non-interleaving family. Clause height is its
/// nesting depth; legs at a variable run left to right as: clauses ending
/// here (inner first), single-variable clauses, the middle leg, clauses
/// starting here (outer first).
pub fn embed_line(nvars: usize, order: &[usize], clauses: &[LineClause]) -> RectilinearEmbedding {
    let mut pos = vec![usize::MAX; nvars];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let sorted: Vec<Vec<usize>> = clauses
        .iter()
        .map(|c| {
            let mut v = c.vars.clone();
            v.sort_by_key(|&x| pos[x]);
            v
        })
        .collect();
    let span = |ci: usize| (pos[sorted[ci][0]], pos[*sorted[ci].last().unwrap()]);
    let mut height = vec![1i64; clauses.len()];
    let mut by_len: Vec<usize> = (0..clauses.len()).collect();
    by_len.sort_by_key(|&c| (span(c).1 - span(c).0, sorted[c].len() == 2, c));
    for (k, &c) in by_len.iter().enumerate() {
        let (lo, hi) = span(c);
        for &d in &by_len[..k] {
            let (dl, dh) = span(d);
            // a two-variable clause can also enclose one with the same ends
            let same = (dl, dh) == (lo, hi)
                && lo != hi
                && sorted[c].len() == 2
                && (sorted[d].len() == 3 || d < c);
            if clauses[d].side == clauses[c].side
                && lo <= dl
                && dh <= hi
                && ((dl, dh) != (lo, hi) || same)
            {
                height[c] = height[c].max(height[d] + 1);
            }
        }
    }
    // (clause, var) legs per var and side, in left-to-right order
    let mut legs_at: HashMap<(usize, Side), Vec<usize>> = HashMap::new();
    for (ci, c) in clauses.iter().enumerate() {
        for &v in &c.vars {
            legs_at.entry((v, c.side)).or_default().push(ci);
        }
    }
    let rank = |ci: usize, v: usize| -> (u8, i64, usize) {
        let s = &sorted[ci];
        if s.len() == 1 {
            (1, 0, ci)
        } else if *s.last().unwrap() == v {
            (0, height[ci], ci)
        } else if s[0] == v {
            (3, -height[ci], ci)
        } else {
            (2, 0, ci)
        }
    };
    let mut attach: HashMap<(usize, usize), i64> = HashMap::new();
    let mut vars = vec![
        VarPlacement {
            x_from: 0,
            x_to: 0,
            y: 0
        };
        nvars
    ];
    let mut x = 0i64;
    for &v in order {
        let mut slots = 1usize;
        for side in [Side::Above, Side::Below] {
            if let Some(list) = legs_at.get_mut(&(v, side)) {
                list.sort_by_key(|&ci| rank(ci, v));
                for (i, &ci) in list.iter().enumerate() {
                    attach.insert((ci, v), x + i as i64);
                }
                slots = slots.max(list.len());
            }
        }
        vars[v] = VarPlacement {
            x_from: x,
            x_to: x + slots as i64 - 1,
            y: 0,
        };
        x += slots as i64 + 1;
    }
    let mut out_clauses = Vec::with_capacity(clauses.len());
    let mut legs = Vec::new();
    for (ci, c) in clauses.iter().enumerate() {
        let s = &sorted[ci];
        let h = c.side.sign() * height[ci];
        let top = if s.len() == 3 {
            s[1]
        } else {
            *s.last().unwrap()
        };
        let tx = attach[&(ci, top)];
        for &v in &c.vars {
            let ax = attach[&(ci, v)];
            let corners = if ax == tx {
                vec![(ax, 0), (ax, h)]
            } else {
                vec![(ax, 0), (ax, h), (tx, h)]
            };
            legs.push(LegPath {
                clause: ci,
                var: v,
                corners,
            });
        }
        out_clauses.push(ClausePlacement {
            point: (tx, h),
            vars: c.vars.clone(),
        });
    }
    RectilinearEmbedding {
        vars,
        clauses: out_clauses,
        legs,
    }
}

/// Recover line order and clause sides from an embedding.
pub fn line_model(e: &RectilinearEmbedding) -> Result<(Vec<usize>, Vec<LineClause>), String> {
    let y0 = e.line_y();
    for leg in &e.legs {
        let side = e.side(leg.clause);
        let first = leg.corners.get(1).copied().unwrap_or(leg.corners[0]);
        let dir = (first.1 - y0).signum();
        if dir != side.sign() {
            return Err(format!(
                "leg of clause {} leaves the line away from its clause",
                leg.clause
            ));
        }
    }
    let clauses = e
        .clauses
        .iter()
        .enumerate()
        .map(|(i, c)| LineClause {
            vars: c.vars.clone(),
            side: e.side(i),
        })
        .collect();
    Ok((e.var_order(), clauses))
}
