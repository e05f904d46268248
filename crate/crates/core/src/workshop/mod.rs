//! Gadget pieces: data files, structural checks, pattern tables and the
//! terminal-edge lemma on the point set W.

mod analysis;
mod lemma;
mod parse;

pub use analysis::{
    analyze_piece, patterns, reduced_cost, validate_piece, Convention, PatternRow, PatternTable,
    PieceReport,
};
pub use lemma::{check_terminal_lemma, validate_w, LemmaReport, WCase};
pub use parse::{load_pieces, write_piece};

use std::collections::HashMap;

use thiserror::Error;

use crate::arith::{ScaledInt, COORD_SCALE};
use crate::geometry::Point;
use crate::mwt::MwtError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkshopError {
    #[error("line {line}: {msg}")]
    MalformedFile { line: usize, msg: String },
    #[error("piece {piece}: {msg}")]
    InvalidPiece { piece: String, msg: String },
    #[error("pattern {pattern}: {source}")]
    Mwt { pattern: String, source: MwtError },
    #[error("patterns {0} and {1} overlap without being equal")]
    AmbiguousOptimum(String, String),
    #[error("case {0}: {1}")]
    LemmaFails(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    L,
    R,
}

impl State {
    pub fn flip(self) -> State {
        match self {
            State::L => State::R,
            State::R => State::L,
        }
    }

    pub fn letter(self) -> char {
        match self {
            State::L => 'L',
            State::R => 'R',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Size {
    Small,
    Large,
}

impl Size {
    /// Base corner offset `(a, b)`: corners sit at `(∓a, b)` from the apex.
    fn offset(self) -> (i64, i64) {
        match self {
            Size::Small => (27_000, 112_000),
            Size::Large => (116_100, 481_600),
        }
    }

    pub fn delta(self) -> ScaledInt {
        match self {
            Size::Small => ScaledInt::new(5_655_172, 6),
            Size::Large => ScaledInt::new(2_406, 2),
        }
    }

    /// Scale factor against W as a fraction.
    pub fn factor(self) -> (i64, i64) {
        match self {
            Size::Small => (1, 1),
            Size::Large => (43, 10),
        }
    }
}

/// Rotate by `k` quarter turns counterclockwise.
pub fn rot(k: u32, p: (i64, i64)) -> (i64, i64) {
    match k % 4 {
        0 => p,
        1 => (-p.1, p.0),
        2 => (-p.0, -p.1),
        _ => (p.1, -p.0),
    }
}

/// A terminal triangle with apex `x` and corners `y` (left arm seen from
/// the apex) and `z` (right arm). Coordinates are integers at scale 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terminal {
    pub size: Size,
    pub apex: (i64, i64),
    /// Quarter turns applied to the upright triangle.
    pub axis: u32,
    /// The state whose terminal edge leaves the triangle inside this piece.
    pub area: State,
    pub line: usize,
}

impl Terminal {
    pub fn edge_vector(&self, s: State) -> (i64, i64) {
        let (a, b) = self.size.offset();
        match s {
            State::L => rot(self.axis, (-a, b)),
            State::R => rot(self.axis, (a, b)),
        }
    }

    pub fn y(&self) -> (i64, i64) {
        add(self.apex, self.edge_vector(State::L))
    }

    pub fn z(&self) -> (i64, i64) {
        add(self.apex, self.edge_vector(State::R))
    }

    pub fn delta(&self) -> ScaledInt {
        self.size.delta()
    }

    /// Boundary points contributed in `state`, in counterclockwise order.
    pub fn sequence(&self, state: State) -> Vec<(i64, i64)> {
        let far = state == self.area;
        match self.area {
            State::L if far => vec![self.z(), self.y(), self.apex],
            State::L => vec![self.z(), self.apex],
            State::R if far => vec![self.apex, self.z(), self.y()],
            State::R => vec![self.apex, self.y()],
        }
    }
}

fn add(p: (i64, i64), q: (i64, i64)) -> (i64, i64) {
    (p.0 + q.0, p.1 + q.1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub name: String,
    pub points: Vec<(i64, i64)>,
    pub lines: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    Part(usize),
    Terminal(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Mirror line `x = v/2`, `v` at scale 4.
    Vertical(i64),
    Horizontal(i64),
}

impl Axis {
    pub fn mirror(self, p: (i64, i64)) -> (i64, i64) {
        match self {
            Axis::Vertical(v) => (v - p.0, p.1),
            Axis::Horizontal(v) => (p.0, v - p.1),
        }
    }

    pub fn describe(self) -> String {
        let half = |v: i64| ScaledInt::new(v * 5, COORD_SCALE + 1).to_canonical();
        match self {
            Axis::Vertical(v) => format!("vertical axis x={}", half(v)),
            Axis::Horizontal(v) => format!("horizontal axis y={}", half(v)),
        }
    }
}

/// One elementary piece: boundary parts and terminals in counterclockwise
/// cyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub name: String,
    pub parts: Vec<Part>,
    pub terminals: Vec<Terminal>,
    pub items: Vec<Item>,
    pub symmetry: Vec<Axis>,
    pub line: usize,
}

impl Piece {
    /// Every point: part points in order, then `x, y, z` per terminal.
    pub fn raw_points(&self) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> = self
            .parts
            .iter()
            .flat_map(|p| p.points.iter().copied())
            .collect();
        for t in &self.terminals {
            out.extend([t.apex, t.y(), t.z()]);
        }
        out
    }

    pub fn points(&self) -> Vec<Point> {
        self.raw_points().into_iter().map(to_point).collect()
    }

    /// Boundary cycle with all far corners present.
    fn full_cycle(&self) -> Vec<((i64, i64), bool)> {
        let mut out = Vec::new();
        for item in &self.items {
            match *item {
                Item::Part(i) => out.extend(self.parts[i].points.iter().map(|&p| (p, false))),
                Item::Terminal(i) => {
                    let t = &self.terminals[i];
                    let seq = t.sequence(t.area);
                    // the side from the apex to the far corner is not a boundary edge
                    match t.area {
                        State::L => out.extend([(seq[0], false), (seq[1], true), (seq[2], false)]),
                        State::R => out.extend([(seq[0], true), (seq[1], false), (seq[2], false)]),
                    }
                }
            }
        }
        out
    }

    /// Boundary edges as index pairs into [`Piece::raw_points`].
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let pts = self.raw_points();
        let index: HashMap<(i64, i64), usize> =
            pts.iter().enumerate().rev().map(|(i, &p)| (p, i)).collect();
        let cyc = self.full_cycle();
        let n = cyc.len();
        (0..n)
            .filter(|&i| !cyc[i].1)
            .map(|i| (index[&cyc[i].0], index[&cyc[(i + 1) % n].0]))
            .collect()
    }

    /// Closed boundary for one terminal state per terminal.
    pub fn pattern_polygon(&self, states: &[State]) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for item in &self.items {
            match *item {
                Item::Part(i) => out.extend(self.parts[i].points.iter().copied()),
                Item::Terminal(i) => out.extend(self.terminals[i].sequence(states[i])),
            }
        }
        out
    }

    /// Pattern label: lower case marks a small terminal in a piece that
    /// also has large ones.
    pub fn pattern_name(&self, states: &[State]) -> String {
        let mixed = self.terminals.iter().any(|t| t.size == Size::Large)
            && self.terminals.iter().any(|t| t.size == Size::Small);
        states
            .iter()
            .zip(&self.terminals)
            .map(|(s, t)| {
                if mixed && t.size == Size::Small {
                    s.letter().to_ascii_lowercase()
                } else {
                    s.letter()
                }
            })
            .collect()
    }

    /// Mirror image under `x -> -x`, still counterclockwise.
    pub fn mirrored(&self) -> Piece {
        let m = |p: (i64, i64)| (-p.0, p.1);
        let parts = self
            .parts
            .iter()
            .map(|p| Part {
                name: p.name.clone(),
                points: p.points.iter().rev().map(|&q| m(q)).collect(),
                lines: p.lines.iter().rev().copied().collect(),
            })
            .collect();
        let terminals = self
            .terminals
            .iter()
            .map(|t| Terminal {
                apex: m(t.apex),
                axis: (4 - t.axis % 4) % 4,
                area: t.area.flip(),
                ..t.clone()
            })
            .collect();
        let symmetry = self
            .symmetry
            .iter()
            .map(|a| match *a {
                Axis::Vertical(v) => Axis::Vertical(-v),
                h => h,
            })
            .collect();
        Piece {
            name: format!("{} (mirrored)", self.name),
            parts,
            terminals,
            items: self.items.iter().rev().copied().collect(),
            symmetry,
            line: self.line,
        }
    }
}

pub fn to_point(p: (i64, i64)) -> Point {
    Point::from_ints(p.0, p.1, COORD_SCALE)
}

/// The point set W with labelled points and its counterclockwise boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WInstance {
    pub name: String,
    pub labels: Vec<String>,
    pub points: Vec<(i64, i64)>,
    pub boundary: Vec<usize>,
    pub line: usize,
}

impl WInstance {
    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Number of `v` points on each side.
    pub fn k(&self) -> usize {
        (1..)
            .take_while(|i| self.index(&format!("v{i}")).is_some())
            .count()
    }

    /// Points of the half on side `side` (`L` for x < 0), plus x, y, z.
    pub fn half(&self, side: State) -> Vec<(i64, i64)> {
        self.labels
            .iter()
            .zip(&self.points)
            .filter(|(l, p)| {
                matches!(l.as_str(), "x" | "y" | "z")
                    || (side == State::L && p.0 < 0)
                    || (side == State::R && p.0 > 0)
            })
            .map(|(_, &p)| p)
            .collect()
    }
}

/// Everything read from one coordinate file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PieceCatalog {
    pub pieces: Vec<Piece>,
    pub wsets: Vec<WInstance>,
}

impl PieceCatalog {
    pub fn piece(&self, name: &str) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.name == name)
    }

    pub fn w(&self) -> Option<&WInstance> {
        self.wsets.first()
    }
}
