//! Coordinate files.
//!
//! ```text
//! piece wire-piece
//! part lower
//! 2.5 -1.2
//! terminal small 27.4 0 0 R     # size, apex, rotation in degrees, area state
//! part upper
//! 13.7 11.3
//! terminal small 0 0 0 L
//! symmetric vertical 13.7
//!
//! wset W
//! point x 0 0
//! boundary u v2 v1 x v1' v2' u' t' z y t
//! ```

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use super::{
    Axis, Item, Part, Piece, PieceCatalog, Size, State, Terminal, WInstance, WorkshopError,
};
use crate::arith::{parse_fixed_decimal, ScaledInt, COORD_SCALE};

fn bad(line: usize, msg: impl Into<String>) -> WorkshopError {
    WorkshopError::MalformedFile {
        line,
        msg: msg.into(),
    }
}

fn coord(line: usize, t: Option<&str>) -> Result<i64, WorkshopError> {
    let t = t.ok_or_else(|| bad(line, "missing coordinate"))?;
    let v = parse_fixed_decimal(t, COORD_SCALE).map_err(|e| bad(line, e.to_string()))?;
    v.value
        .to_i64()
        .filter(|v| v.abs() < 1 << 52)
        .ok_or_else(|| bad(line, format!("coordinate {t} out of range")))
}

enum Block {
    None,
    Piece(Piece),
    W(WInstance),
}

fn close(block: Block, cat: &mut PieceCatalog) -> Result<(), WorkshopError> {
    match block {
        Block::None => {}
        Block::Piece(p) => {
            if !(2..=3).contains(&p.terminals.len()) {
                return Err(bad(
                    p.line,
                    format!(
                        "piece {} has {} terminals, expected 2 or 3",
                        p.name,
                        p.terminals.len()
                    ),
                ));
            }
            if let Some(part) = p.parts.iter().find(|q| q.points.is_empty()) {
                return Err(bad(
                    p.line,
                    format!("part {} of piece {} has no points", part.name, p.name),
                ));
            }
            cat.pieces.push(p);
        }
        Block::W(w) => {
            if w.boundary.is_empty() {
                return Err(bad(w.line, format!("wset {} has no boundary line", w.name)));
            }
            cat.wsets.push(w);
        }
    }
    Ok(())
}

/// Strict parse of a coordinate file.
pub fn load_pieces(text: &str) -> Result<PieceCatalog, WorkshopError> {
    let mut cat = PieceCatalog::default();
    let mut block = Block::None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        let mut tok = body.split_whitespace();
        let Some(tag) = tok.next() else { continue };
        match tag {
            "piece" | "wset" => {
                let name = tok
                    .next()
                    .ok_or_else(|| bad(ln, format!("{tag} needs a name")))?
                    .to_string();
                if cat.pieces.iter().any(|p| p.name == name)
                    || cat.wsets.iter().any(|w| w.name == name)
                {
                    return Err(bad(ln, format!("duplicate name {name}")));
                }
                close(std::mem::replace(&mut block, Block::None), &mut cat)?;
                block = if tag == "piece" {
                    Block::Piece(Piece {
                        name,
                        parts: Vec::new(),
                        terminals: Vec::new(),
                        items: Vec::new(),
                        symmetry: Vec::new(),
                        line: ln,
                    })
                } else {
                    Block::W(WInstance {
                        name,
                        labels: Vec::new(),
                        points: Vec::new(),
                        boundary: Vec::new(),
                        line: ln,
                    })
                };
            }
            "part" => {
                let Block::Piece(p) = &mut block else {
                    return Err(bad(ln, "part outside a piece"));
                };
                let name = tok
                    .next()
                    .ok_or_else(|| bad(ln, "part needs a name"))?
                    .to_string();
                p.items.push(Item::Part(p.parts.len()));
                p.parts.push(Part {
                    name,
                    points: Vec::new(),
                    lines: Vec::new(),
                });
            }
            "terminal" => {
                let Block::Piece(p) = &mut block else {
                    return Err(bad(ln, "terminal outside a piece"));
                };
                let size = match tok.next() {
                    Some("small") => Size::Small,
                    Some("large") => Size::Large,
                    other => {
                        return Err(bad(
                            ln,
                            format!("terminal size must be small or large, got {other:?}"),
                        ))
                    }
                };
                let apex = (coord(ln, tok.next())?, coord(ln, tok.next())?);
                let axis = match tok.next() {
                    Some("0") => 0,
                    Some("90") => 1,
                    Some("180") => 2,
                    Some("270") => 3,
                    other => {
                        return Err(bad(
                            ln,
                            format!("axis must be 0, 90, 180 or 270, got {other:?}"),
                        ))
                    }
                };
                let area = match tok.next() {
                    Some("L") => State::L,
                    Some("R") => State::R,
                    other => {
                        return Err(bad(ln, format!("area state must be L or R, got {other:?}")))
                    }
                };
                p.items.push(Item::Terminal(p.terminals.len()));
                p.terminals.push(Terminal {
                    size,
                    apex,
                    axis,
                    area,
                    line: ln,
                });
            }
            "symmetric" => {
                let Block::Piece(p) = &mut block else {
                    return Err(bad(ln, "symmetric outside a piece"));
                };
                let dir = tok.next();
                let v = tok.next().ok_or_else(|| bad(ln, "missing axis position"))?;
                let v =
                    parse_fixed_decimal(v, COORD_SCALE + 1).map_err(|e| bad(ln, e.to_string()))?;
                let twice = v
                    .value
                    .to_i64()
                    .map(|v| 2 * v)
                    .filter(|v| v % 10 == 0)
                    .ok_or_else(|| bad(ln, "axis position off the coordinate grid"))?
                    / 10;
                p.symmetry.push(match dir {
                    Some("vertical") => Axis::Vertical(twice),
                    Some("horizontal") => Axis::Horizontal(twice),
                    other => {
                        return Err(bad(
                            ln,
                            format!("axis must be vertical or horizontal, got {other:?}"),
                        ))
                    }
                });
            }
            "point" => {
                let Block::W(w) = &mut block else {
                    return Err(bad(ln, "point outside a wset"));
                };
                let label = tok
                    .next()
                    .ok_or_else(|| bad(ln, "point needs a label"))?
                    .to_string();
                if w.labels.contains(&label) {
                    return Err(bad(ln, format!("duplicate label {label}")));
                }
                let p = (coord(ln, tok.next())?, coord(ln, tok.next())?);
                w.labels.push(label);
                w.points.push(p);
            }
            "boundary" => {
                let Block::W(w) = &mut block else {
                    return Err(bad(ln, "boundary outside a wset"));
                };
                for t in tok.by_ref() {
                    let i = w
                        .index(t)
                        .ok_or_else(|| bad(ln, format!("unknown label {t}")))?;
                    if w.boundary.contains(&i) {
                        return Err(bad(ln, format!("label {t} repeated on the boundary")));
                    }
                    w.boundary.push(i);
                }
            }
            _ => {
                let Block::Piece(p) = &mut block else {
                    return Err(bad(ln, format!("unexpected line {body:?}")));
                };
                let Some(part) = (match p.items.last() {
                    Some(Item::Part(k)) => p.parts.get_mut(*k),
                    _ => None,
                }) else {
                    return Err(bad(ln, "coordinates outside a part"));
                };
                let pt = (coord(ln, Some(tag))?, coord(ln, tok.next())?);
                part.points.push(pt);
                part.lines.push(ln);
            }
        }
        if tok.next().is_some() {
            return Err(bad(ln, "trailing tokens"));
        }
    }
    close(block, &mut cat)?;
    Ok(cat)
}

fn c(v: i64) -> String {
    ScaledInt::new(v, COORD_SCALE).to_canonical()
}

/// Text form accepted by [`load_pieces`].
pub fn write_piece(p: &Piece) -> String {
    let mut out = format!("piece {}\n", p.name);
    for item in &p.items {
        match *item {
            Item::Part(i) => {
                let _ = writeln!(out, "part {}", p.parts[i].name);
                for q in &p.parts[i].points {
                    let _ = writeln!(out, "{} {}", c(q.0), c(q.1));
                }
            }
            Item::Terminal(i) => {
                let t = &p.terminals[i];
                let size = if t.size == Size::Small {
                    "small"
                } else {
                    "large"
                };
                let _ = writeln!(
                    out,
                    "terminal {size} {} {} {} {}",
                    c(t.apex.0),
                    c(t.apex.1),
                    t.axis * 90,
                    t.area.letter()
                );
            }
        }
    }
    for a in &p.symmetry {
        let (dir, v) = match *a {
            super::Axis::Vertical(v) => ("vertical", v),
            super::Axis::Horizontal(v) => ("horizontal", v),
        };
        let _ = writeln!(
            out,
            "symmetric {dir} {}",
            ScaledInt::new(v * 5, COORD_SCALE + 1).to_canonical()
        );
    }
    out
}
