//! Static vector figures.

use std::fmt::Write as _;

use mwt_core::arith::ScaledInt;
use mwt_core::geometry::{Polygon, Triangulation};
use mwt_core::layout::{Conn, GadgetGraph, LinkKind, LoopRole};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Point { at: (i64, i64) },
    Line { a: (i64, i64), b: (i64, i64) },
    Path { pts: Vec<(i64, i64)>, closed: bool },
    Label { at: (i64, i64), text: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub name: String,
    pub color: &'static str,
    pub elements: Vec<Element>,
}

/// Layered drawing; integer coordinates at a fixed decimal scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureDoc {
    pub scale: u32,
    pub layers: Vec<Layer>,
}

fn layer(name: &str, color: &'static str) -> Layer {
    Layer {
        name: name.into(),
        color,
        elements: Vec::new(),
    }
}

impl FigureDoc {
    pub fn triangulation(poly: &Polygon, tri: &Triangulation) -> FigureDoc {
        let pts = poly.int_coords().expect("coordinates fit");
        let n = pts.len();
        let mut boundary = layer("boundary", "black");
        for i in 0..n {
            boundary.elements.push(Element::Line {
                a: pts[i],
                b: pts[(i + 1) % n],
            });
        }
        let mut edges = layer("edges", "steelblue");
        for &(a, b) in &tri.internal_edges {
            edges.elements.push(Element::Line {
                a: pts[a],
                b: pts[b],
            });
        }
        let mut points = layer("points", "black");
        let mut labels = layer("labels", "dimgray");
        for (i, &p) in pts.iter().enumerate() {
            points.elements.push(Element::Point { at: p });
            labels.elements.push(Element::Label {
                at: p,
                text: i.to_string(),
            });
        }
        FigureDoc {
            scale: poly.scale(),
            layers: vec![boundary, edges, points, labels],
        }
    }

    /// Schematic of a gadget network: loops, link centre lines, middle
    /// pieces and exits.
    pub fn network(g: &GadgetGraph) -> FigureDoc {
        let h = g.dims.loop_half;
        let mut loops = layer("loops", "black");
        let mut exits = layer("exits", "firebrick");
        let mut labels = layer("labels", "dimgray");
        for (i, lp) in g.loops.iter().enumerate() {
            let c = lp.center;
            loops.elements.push(Element::Path {
                pts: vec![
                    (c.0 - h, c.1 - h),
                    (c.0 + h, c.1 - h),
                    (c.0 + h, c.1 + h),
                    (c.0 - h, c.1 + h),
                ],
                closed: true,
            });
            for s in 0..4 {
                if lp.sides[s] != Conn::C0 {
                    let (p, _) = g.port(mwt_core::layout::PortRef::Loop { idx: i, side: s });
                    exits.elements.push(Element::Point { at: p });
                }
            }
            let text = match lp.role {
                LoopRole::Var { var, .. } => format!("x{var}"),
                LoopRole::Clause { clause, group, hat } => {
                    format!("c{clause}.{group}{}", if hat { "'" } else { "" })
                }
            };
            labels.elements.push(Element::Label { at: c, text });
        }
        let mut wires = layer("wires", "steelblue");
        let mut clause = layer("clause-links", "darkorange");
        let mut middles = layer("middle-pieces", "seagreen");
        for l in &g.links {
            let target = match l.kind {
                LinkKind::Chain { .. } | LinkKind::Entry { .. } => &mut wires,
                _ => &mut clause,
            };
            target.elements.push(Element::Path {
                pts: l.path.clone(),
                closed: false,
            });
            if let Some(m) = &l.middle {
                let k = g.dims.complex_half();
                middles.elements.push(Element::Line {
                    a: (m.center.0 - m.dir.0 * k, m.center.1 - m.dir.1 * k),
                    b: (m.center.0 + m.dir.0 * k, m.center.1 + m.dir.1 * k),
                });
            }
        }
        FigureDoc {
            scale: 2,
            layers: vec![loops, wires, clause, middles, exits, labels],
        }
    }

    fn bounds(&self) -> (i64, i64, i64, i64) {
        let mut b = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        let mut see = |p: (i64, i64)| {
            b = (b.0.min(p.0), b.1.min(p.1), b.2.max(p.0), b.3.max(p.1));
        };
        for l in &self.layers {
            for e in &l.elements {
                match e {
                    Element::Point { at } | Element::Label { at, .. } => see(*at),
                    Element::Line { a, b } => {
                        see(*a);
                        see(*b);
                    }
                    Element::Path { pts, .. } => pts.iter().for_each(|&p| see(p)),
                }
            }
        }
        if b.0 > b.2 {
            (0, 0, 0, 0)
        } else {
            b
        }
    }

    /// Standalone SVG; y grows upwards in the drawing.
    pub fn to_svg(&self) -> String {
        let (x0, y0, x1, y1) = self.bounds();
        let extent = (x1 - x0).max(y1 - y0).max(1);
        let pad = extent / 20 + 1;
        let d = |v: i64| ScaledInt::new(v, self.scale).to_canonical();
        let pt = |p: (i64, i64)| format!("{},{}", d(p.0), d(-p.1));
        let stroke = d((extent / 400).max(1));
        let radius = d((extent / 150).max(1));
        let font = d((extent / 40).max(1));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
            d(x0 - pad),
            d(-y1 - pad),
            d(x1 - x0 + 2 * pad),
            d(y1 - y0 + 2 * pad)
        );
        for l in &self.layers {
            let _ = writeln!(
                out,
                "<g id=\"{}\" stroke=\"{}\" fill=\"none\" stroke-width=\"{stroke}\">",
                l.name, l.color
            );
            for e in &l.elements {
                let _ = match e {
                    Element::Point { at } => writeln!(
                        out,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{radius}\" fill=\"{}\"/>",
                        d(at.0),
                        d(-at.1),
                        l.color
                    ),
                    Element::Line { a, b } => writeln!(
                        out,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                        d(a.0),
                        d(-a.1),
                        d(b.0),
                        d(-b.1)
                    ),
                    Element::Path { pts, closed } => {
                        let list: Vec<String> = pts.iter().map(|&p| pt(p)).collect();
                        let tag = if *closed { "polygon" } else { "polyline" };
                        writeln!(out, "<{tag} points=\"{}\"/>", list.join(" "))
                    }
                    Element::Label { at, text } => writeln!(
                        out,
                        "<text x=\"{}\" y=\"{}\" font-size=\"{font}\" stroke=\"none\" fill=\"{}\">{}</text>",
                        d(at.0),
                        d(-at.1),
                        l.color,
                        escape(text)
                    ),
                };
            }
            out.push_str("</g>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
