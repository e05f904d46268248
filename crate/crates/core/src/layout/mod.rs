//! Turning a 1-in-3 formula with a rectilinear embedding into a gadget
//! network: wire arithmetic, corridor routing, the clause template, a
//! state cost model and point-set emission.
//!
//! Layout coordinates are integers in hundredths of a unit (`i64`).

mod audit;
mod cost;
mod emit;
mod network;
mod wire;

pub use audit::{audit_layout, corridor_conflicts, AuditReport};
pub use cost::{
    bit_loop_margin, clause_case_costs, link_cost, nano, network_model, CostModel, Factor, NetworkModel,
    DELTA3, DELTA4,
    StateModel,
};
pub use emit::{emit_reduction, EmittedPiece, Hole, ReductionOutput, Run};
pub use network::{
    build_network, BitLoop, ClauseGadget, Conn, GadgetGraph, Group, Link, LinkKind, LoopRole,
    Middle, PortRef,
};
pub use wire::{
    representable_near, route_corridor, split_length, straight_connection, Step, WirePlan,
    MIN_ALL_REPRESENTABLE,
};

use thiserror::Error;

use crate::arith::ScaledInt;

pub type Pt = (i64, i64);

/// Wire piece length 27.4 in hundredths.
pub const WIRE_SPAN: i64 = 2740;
/// Extended wire piece length 82.21 in hundredths.
pub const EXTENDED_SPAN: i64 = 8221;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("length {z} (hundredths) is below the representable bound")]
    TooShort { z: i64 },
    #[error("distance {0} is not a multiple of 0.01")]
    NotGridAligned(String),
    #[error("segment {segment}: drift {drift} exceeds the corridor tolerance")]
    CorridorTooTight { segment: usize, drift: i64 },
    #[error("no straight portion long enough in the {0} direction")]
    MissingStraightPortion(&'static str),
    #[error("corridors {a} and {b} are too close")]
    LayoutConflict { a: String, b: String },
    #[error("weight enclosure too wide for the separation gap: {0}")]
    AmbiguousWeight(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Dimensions that satisfy the straight-portion precondition.
    Proof,
    /// Small lattice-aligned dimensions; not proof grade.
    Mini,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Proof => "proof",
            Mode::Mini => "mini",
        }
    }
}

/// Layout dimensions in hundredths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims {
    pub mode: Mode,
    /// One embedding grid unit.
    pub grid: i64,
    /// Corridor width around every wire path.
    pub corridor: i64,
    /// Shortest straight portion that may absorb drift; zero disables the check.
    pub straight_min: i64,
    /// Distance from a bend corner to each of its terminals.
    pub bend_arm: i64,
    /// Half side of a bit loop.
    pub loop_half: i64,
    /// Half width of a connection piece along the loop side.
    pub conn_half: i64,
    /// Port distance beyond the loop side.
    pub exit: i64,
    /// Half width of a free connection piece between adapters.
    pub middle_half: i64,
    /// Adapter length.
    pub adapter: i64,
    /// Port distance of a free connection piece from its path.
    pub down_exit: i64,
    /// Clause template: loop offset inside a group.
    pub p: i64,
    /// Clause template: height of the second link of a group.
    pub h: i64,
    /// Clause template: group distance from the clause point.
    pub d: i64,
    /// Clause template: clearance around groups for entry paths.
    pub m: i64,
}

impl Dims {
    pub fn proof() -> Dims {
        Dims {
            mode: Mode::Proof,
            grid: 100_000_000,
            corridor: 200_000,
            straight_min: 25_000_000,
            bend_arm: 35_000,
            loop_half: 350_000,
            conn_half: 200_000,
            exit: 150_000,
            middle_half: 200_000,
            adapter: 100_000,
            down_exit: 250_000,
            p: 30_000_000,
            h: 30_000_000,
            d: 60_000_000,
            m: 5_000_000,
        }
    }

    pub fn mini() -> Dims {
        let q = WIRE_SPAN;
        Dims {
            mode: Mode::Mini,
            grid: 300 * q,
            corridor: 2 * q,
            straight_min: 0,
            bend_arm: q,
            loop_half: 4 * q,
            conn_half: 2 * q,
            exit: 2 * q,
            middle_half: q,
            adapter: q,
            down_exit: 2 * q,
            p: 40 * q,
            h: 40 * q,
            d: 80 * q,
            m: 10 * q,
        }
    }

    pub fn for_mode(mode: Mode) -> Dims {
        match mode {
            Mode::Proof => Dims::proof(),
            Mode::Mini => Dims::mini(),
        }
    }

    /// Port distance from a loop centre.
    pub fn port(&self) -> i64 {
        self.loop_half + self.exit
    }

    /// Half length of an adapter, middle piece, adapter run.
    pub fn complex_half(&self) -> i64 {
        self.middle_half + self.adapter
    }

    /// Largest sideways shift of a bend corner that keeps the bend box in
    /// the corridor.
    pub fn tolerance(&self) -> i64 {
        self.corridor / 2 - self.bend_arm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum PieceKind {
    Wire,
    ExtendedWire,
    LeftBend,
    RightBend,
    ThickLeftBend,
    Thickening,
    Thinning,
    C,
    CPrime,
    C0,
}

impl PieceKind {
    pub const ALL: [PieceKind; 10] = [
        PieceKind::Wire,
        PieceKind::ExtendedWire,
        PieceKind::LeftBend,
        PieceKind::RightBend,
        PieceKind::ThickLeftBend,
        PieceKind::Thickening,
        PieceKind::Thinning,
        PieceKind::C,
        PieceKind::CPrime,
        PieceKind::C0,
    ];

    /// Name used in piece files.
    pub fn name(self) -> &'static str {
        match self {
            PieceKind::Wire => "wire",
            PieceKind::ExtendedWire => "extended-wire",
            PieceKind::LeftBend => "left-bend",
            PieceKind::RightBend => "right-bend",
            PieceKind::ThickLeftBend => "thick-left-bend",
            PieceKind::Thickening => "thickening",
            PieceKind::Thinning => "thinning",
            PieceKind::C => "C",
            PieceKind::CPrime => "C'",
            PieceKind::C0 => "C0",
        }
    }

    pub fn from_name(s: &str) -> Option<PieceKind> {
        PieceKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Terminal distance of straight pieces.
    pub fn span(self) -> Option<i64> {
        match self {
            PieceKind::Wire => Some(WIRE_SPAN),
            PieceKind::ExtendedWire => Some(EXTENDED_SPAN),
            _ => None,
        }
    }
}

/// Quarter turns taking `(1, 0)` to the unit vector `d`.
pub fn dir_index(d: Pt) -> u32 {
    match d {
        (1, 0) => 0,
        (0, 1) => 1,
        (-1, 0) => 2,
        (0, -1) => 3,
        _ => panic!("not a unit direction: {d:?}"),
    }
}

pub fn unit(k: u32) -> Pt {
    crate::workshop::rot(k, (1, 0))
}

pub(crate) fn add(a: Pt, b: Pt) -> Pt {
    (a.0 + b.0, a.1 + b.1)
}

pub(crate) fn scale(d: Pt, k: i64) -> Pt {
    (d.0 * k, d.1 * k)
}

/// Hundredths as a scaled decimal.
pub fn hundredths(v: i64) -> ScaledInt {
    ScaledInt::new(v, 2)
}
