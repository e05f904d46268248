use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use super::{rot, to_point, Axis, Piece, Size, State, WInstance, WorkshopError};
use crate::arith::{
    format_fixed, parse_fixed_decimal, pow10, IntInterval, DISPLAY_DIGITS, WORK_SCALE,
};
use crate::geometry::{validate_simple_polygon, Polygon, Triangulation};
use crate::mwt::{polygon_mwt, EdgeConstraint};
use crate::skeleton::{beta_skeleton_certify, CertReport, BETA_PIECES};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceReport {
    pub name: String,
    pub points: usize,
    /// Terminals whose apex is off the 0.01 grid.
    pub terminal_off_grid: Vec<usize>,
    pub duplicates: Vec<(i64, i64)>,
    pub symmetry: Vec<(Axis, bool)>,
    /// Per terminal: points of the expected W half that are missing, or
    /// `None` when no W was supplied.
    pub w_copies: Vec<Option<Vec<(i64, i64)>>>,
    /// Pattern polygons that are not simple.
    pub bad_patterns: Vec<String>,
    pub beta: CertReport,
    pub log: Vec<String>,
}

impl PieceReport {
    pub fn passes(&self) -> bool {
        self.terminal_off_grid.is_empty()
            && self.duplicates.is_empty()
            && self.symmetry.iter().all(|s| s.1)
            && self
                .w_copies
                .iter()
                .all(|w| w.as_ref().is_none_or(|m| m.is_empty()))
            && self.bad_patterns.is_empty()
            && self.beta.passes()
    }
}

fn pt(p: (i64, i64)) -> String {
    to_point(p).to_string()
}

/// All state assignments, first terminal most significant, `L` before `R`.
pub fn patterns(k: usize) -> Vec<Vec<State>> {
    (0..1u32 << k)
        .map(|b| {
            (0..k)
                .map(|i| {
                    if b >> (k - 1 - i) & 1 == 0 {
                        State::L
                    } else {
                        State::R
                    }
                })
                .collect()
        })
        .collect()
}

/// Image of W's matching half at terminal `t`, or `None` if it leaves the grid.
fn w_copy(w: &WInstance, t: &super::Terminal) -> Vec<Option<(i64, i64)>> {
    let side = t.area.flip();
    let (num, den) = t.size.factor();
    w.half(side)
        .into_iter()
        .map(|p| {
            let (a, b) = (p.0 * num, p.1 * num);
            if a % den != 0 || b % den != 0 {
                return None;
            }
            let q = rot(t.axis, (a / den, b / den));
            Some((t.apex.0 + q.0, t.apex.1 + q.1))
        })
        .collect()
}

/// Structural checks and β-certification of the boundary.
pub fn validate_piece(p: &Piece, w: Option<&WInstance>) -> PieceReport {
    let raw = p.raw_points();
    let mut log = vec![
        format!("======================== {} ====================", p.name),
        "All coordinates are multiples of 0.0001".to_string(),
    ];
    let mut terminal_off_grid = Vec::new();
    for (i, t) in p.terminals.iter().enumerate() {
        log.push(format!("terminal triangle basepoint: {}", pt(t.apex)));
        log.push(format!(
            "     edge vector in state L: {}",
            pt(t.edge_vector(State::L))
        ));
        log.push(format!(
            "     edge vector in state R: {}",
            pt(t.edge_vector(State::R))
        ));
        if t.apex.0 % 100 != 0 || t.apex.1 % 100 != 0 {
            terminal_off_grid.push(i);
        }
    }
    if terminal_off_grid.is_empty() {
        log.push("All terminal coordinates are multiples of 0.01".into());
    } else {
        log.push(format!(
            "Terminal coordinates off the 0.01 grid: {terminal_off_grid:?}"
        ));
    }
    let mut seen = HashSet::new();
    let mut duplicates: Vec<(i64, i64)> =
        raw.iter().filter(|&&q| !seen.insert(q)).copied().collect();
    duplicates.sort_unstable();
    duplicates.dedup();
    log.push(format!("{} duplicate point(s).", duplicates.len()));
    let set: HashSet<(i64, i64)> = raw.iter().copied().collect();
    let symmetry: Vec<(Axis, bool)> = p
        .symmetry
        .iter()
        .map(|&a| (a, set.iter().all(|&q| set.contains(&a.mirror(q)))))
        .collect();
    for (a, ok) in &symmetry {
        let neg = if *ok { "" } else { "NOT " };
        log.push(format!(
            "The point set is {neg}symmetric with respect to the {}.",
            a.describe()
        ));
    }
    let w_copies: Vec<Option<Vec<(i64, i64)>>> = p
        .terminals
        .iter()
        .map(|t| {
            w.map(|w| {
                let (num, den) = t.size.factor();
                w_copy(w, t)
                    .into_iter()
                    .zip(w.half(t.area.flip()))
                    .filter(|(img, _)| img.is_none_or(|q| !set.contains(&q)))
                    .map(|(img, orig)| img.unwrap_or((orig.0 * num / den, orig.1 * num / den)))
                    .collect()
            })
        })
        .collect();
    for (i, c) in w_copies.iter().enumerate() {
        match c {
            None => log.push(format!("terminal {}: W copy not checked", i + 1)),
            Some(m) if m.is_empty() => log.push(format!("terminal {}: W copy present", i + 1)),
            Some(m) => log.push(format!(
                "terminal {}: W copy misses {} point(s)",
                i + 1,
                m.len()
            )),
        }
    }
    let bad_patterns: Vec<String> = patterns(p.terminals.len())
        .into_iter()
        .filter(|s| {
            !validate_simple_polygon(&Polygon::new(
                p.pattern_polygon(s).into_iter().map(to_point).collect(),
            ))
            .is_valid()
        })
        .map(|s| p.pattern_name(&s))
        .collect();
    if !bad_patterns.is_empty() {
        log.push(format!(
            "Pattern polygons that are not simple: {}",
            bad_patterns.join(" ")
        ));
    }
    let threshold = parse_fixed_decimal(BETA_PIECES, 4).unwrap();
    let beta = beta_skeleton_certify(&p.boundary_edges(), &p.points(), &threshold);
    if let Some((_, _, r)) = beta.binding() {
        let w = r.witness.as_ref().unwrap();
        let c7 = (w.cos2.numer() * pow10(7)).div_floor(w.cos2.denom());
        let b = r
            .min_beta
            .as_ref()
            .map_or("1 (obtuse witness)".to_string(), |b| b.display_string(6));
        log.push(format!(
            "cos(alpha)^2 = {c7}/10000000 = {}; beta = {b}.",
            format_fixed(&((&c7 + 5) / 10), 6)
        ));
    }
    if beta.passes() {
        log.push(format!(
            "All {} boundary edges are in the {BETA_PIECES}-skeleton.",
            beta.reports.len()
        ));
    } else {
        for &(i, j) in &beta.violators {
            log.push(format!(
                "Boundary edge {} {} is not in the {BETA_PIECES}-skeleton.",
                pt(raw[i]),
                pt(raw[j])
            ));
        }
    }
    PieceReport {
        name: p.name.clone(),
        points: raw.len(),
        terminal_off_grid,
        duplicates,
        symmetry,
        w_copies,
        bad_patterns,
        beta,
        log,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Subtract δ when the piece contains the terminal triangle.
    Standard,
    /// The opposite sign choice.
    Swapped,
}

/// `c ± δ` per terminal.
pub fn reduced_cost(p: &Piece, states: &[State], c: &IntInterval, conv: Convention) -> IntInterval {
    let mut out = c.clone();
    for (t, &s) in p.terminals.iter().zip(states) {
        let d = t.delta().rescale(c.scale);
        let inside = (s == t.area) == (conv == Convention::Standard);
        out = if inside {
            out.sub_scaled(&d)
        } else {
            out.add_scaled(&d)
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRow {
    pub pattern: String,
    pub states: Vec<State>,
    pub polygon: Polygon,
    pub multiplicity: BigUint,
    pub c: IntInterval,
    pub cbar: IntInterval,
    pub ctilde: IntInterval,
    pub witness: Triangulation,
    pub candidates_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTable {
    pub piece: String,
    pub sizes: Vec<Size>,
    pub rows: Vec<PatternRow>,
}

impl PatternTable {
    pub fn row(&self, pattern: &str) -> Option<&PatternRow> {
        self.rows.iter().find(|r| r.pattern == pattern)
    }

    /// `case LL: 44 points. c c̄` lines.
    pub fn log(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "case {}: {} points. {} {}",
                    r.pattern,
                    r.polygon.len(),
                    r.c.display_string(DISPLAY_DIGITS),
                    r.cbar.display_string(DISPLAY_DIGITS)
                )
            })
            .collect()
    }
}

/// Optimal triangulation of every terminal pattern with reduced costs.
pub fn analyze_piece(p: &Piece) -> Result<PatternTable, WorkshopError> {
    let k = p.terminals.len();
    if !(2..=3).contains(&k) {
        return Err(WorkshopError::InvalidPiece {
            piece: p.name.clone(),
            msg: format!("{k} terminals"),
        });
    }
    let rows: Vec<Result<PatternRow, WorkshopError>> = patterns(k)
        .into_par_iter()
        .map(|states| {
            let pattern = p.pattern_name(&states);
            let polygon = Polygon::new(
                p.pattern_polygon(&states)
                    .into_iter()
                    .map(to_point)
                    .collect(),
            );
            let r = polygon_mwt(&polygon, &EdgeConstraint::none()).map_err(|source| {
                WorkshopError::Mwt {
                    pattern: pattern.clone(),
                    source,
                }
            })?;
            let cbar = reduced_cost(p, &states, &r.optimal_cost, Convention::Standard);
            Ok(PatternRow {
                pattern,
                states,
                polygon,
                multiplicity: r.multiplicity,
                c: r.optimal_cost,
                cbar,
                ctilde: IntInterval::zero(WORK_SCALE),
                witness: r.witness,
                candidates_degenerate: r.candidates_degenerate,
            })
        })
        .collect();
    let mut rows: Vec<PatternRow> = rows.into_iter().collect::<Result<_, _>>()?;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.cbar.overlaps(&b.cbar) && a.cbar != b.cbar {
                return Err(WorkshopError::AmbiguousOptimum(
                    a.pattern.clone(),
                    b.pattern.clone(),
                ));
            }
        }
    }
    let lo = rows.iter().map(|r| r.cbar.lo.clone()).min().unwrap();
    let hi = rows.iter().map(|r| r.cbar.hi.clone()).min().unwrap();
    for r in &mut rows {
        let zero = BigInt::zero();
        r.ctilde = IntInterval::new(
            (&r.cbar.lo - &hi).max(zero.clone()),
            (&r.cbar.hi - &lo).max(zero),
            WORK_SCALE,
        );
    }
    Ok(PatternTable {
        piece: p.name.clone(),
        sizes: p.terminals.iter().map(|t| t.size).collect(),
        rows,
    })
}
