//! Points, orientation, simple polygons and a direct triangulation checker.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{interval_isqrt, pow10, IntInterval, ScaledInt};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: ScaledInt,
    pub y: ScaledInt,
}

impl Point {
    pub fn new(x: ScaledInt, y: ScaledInt) -> Self {
        assert_eq!(x.scale, y.scale, "point coordinates on different scales");
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64, scale: u32) -> Self {
        Point {
            x: ScaledInt::new(x, scale),
            y: ScaledInt::new(y, scale),
        }
    }

    pub fn scale(&self) -> u32 {
        self.x.scale
    }

    pub fn rescale(&self, scale: u32) -> Point {
        Point {
            x: self.x.rescale(scale),
            y: self.y.rescale(scale),
        }
    }

    /// Raw integer coordinates, if they fit.
    pub fn ints(&self) -> Option<(i64, i64)> {
        Some((self.x.to_i64()?, self.y.to_i64()?))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x.to_canonical(), self.y.to_canonical())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
    Collinear,
}

fn aligned(p: &Point, q: &Point) -> (Point, Point) {
    let s = p.scale().max(q.scale());
    (p.rescale(s), q.rescale(s))
}

pub fn cross(p: &Point, q: &Point, r: &Point) -> BigInt {
    let s = p.scale().max(q.scale()).max(r.scale());
    let (p, q, r) = (p.rescale(s), q.rescale(s), r.rescale(s));
    (&q.x.value - &p.x.value) * (&r.y.value - &p.y.value)
        - (&q.y.value - &p.y.value) * (&r.x.value - &p.x.value)
}

pub fn orientation(p: &Point, q: &Point, r: &Point) -> Orientation {
    let c = cross(p, q, r);
    if c.is_positive() {
        Orientation::Ccw
    } else if c.is_negative() {
        Orientation::Cw
    } else {
        Orientation::Collinear
    }
}

/// Squared distance in units of `10^-2s` where `s` is the common scale.
pub fn dist2(p: &Point, q: &Point) -> (BigInt, u32) {
    let (p, q) = aligned(p, q);
    let dx = &q.x.value - &p.x.value;
    let dy = &q.y.value - &p.y.value;
    (&dx * &dx + &dy * &dy, p.scale())
}

/// Enclosure of `|pq| · 10^out` with width at most one ulp.
pub fn edge_length(p: &Point, q: &Point, out: u32) -> IntInterval {
    let (d2, s) = dist2(p, q);
    if out >= s {
        let iv = interval_isqrt(&(d2 * pow10(2 * (out - s)))).expect("nonnegative");
        IntInterval { scale: out, ..iv }
    } else {
        let iv = interval_isqrt(&d2).expect("nonnegative");
        IntInterval { scale: s, ..iv }.outward(out)
    }
}

/// Integer-coordinate kernel shared by the hot loops.
pub(crate) fn cross_i(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> i128 {
    (q.0 as i128 - p.0 as i128) * (r.1 as i128 - p.1 as i128)
        - (q.1 as i128 - p.1 as i128) * (r.0 as i128 - p.0 as i128)
}

pub(crate) fn edge_length_i(p: (i64, i64), q: (i64, i64), coord: u32, out: u32) -> IntInterval {
    edge_length(
        &Point::from_ints(p.0, p.1, coord),
        &Point::from_ints(q.0, q.1, coord),
        out,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Polygon { vertices }
    }

    pub fn from_ints(pts: &[(i64, i64)], scale: u32) -> Self {
        Polygon {
            vertices: pts
                .iter()
                .map(|&(x, y)| Point::from_ints(x, y, scale))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn scale(&self) -> u32 {
        self.vertices.iter().map(|p| p.scale()).max().unwrap_or(0)
    }

    /// Twice the signed area.
    pub fn doubled_area(&self) -> BigInt {
        let s = self.scale();
        let v: Vec<Point> = self.vertices.iter().map(|p| p.rescale(s)).collect();
        let n = v.len();
        let mut a = BigInt::zero();
        for i in 0..n {
            let (p, q) = (&v[i], &v[(i + 1) % n]);
            a += &p.x.value * &q.y.value - &q.x.value * &p.y.value;
        }
        a
    }

    pub fn int_coords(&self) -> Option<Vec<(i64, i64)>> {
        let s = self.scale();
        self.vertices.iter().map(|p| p.rescale(s).ints()).collect()
    }

    pub fn mirrored(&self) -> Polygon {
        let mut v: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| Point {
                x: p.x.neg(),
                y: p.y.clone(),
            })
            .collect();
        v.reverse();
        Polygon { vertices: v }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolygonIssue {
    TooFewVertices(usize),
    DuplicateVertex(usize, usize),
    NotCounterClockwise,
    Crossing((usize, usize), (usize, usize)),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<PolygonIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    if orientation(a, b, p) != Orientation::Collinear {
        return false;
    }
    let within = |u: &ScaledInt, v: &ScaledInt, w: &ScaledInt| u.min(v) <= w && w <= u.max(v);
    within(&a.x, &b.x, &p.x) && within(&a.y, &b.y, &p.y)
}

/// Closed-segment intersection test.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 != o2
        && o3 != o4
        && o1 != Orientation::Collinear
        && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear
        && o4 != Orientation::Collinear
    {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

pub fn validate_simple_polygon(poly: &Polygon) -> ValidationReport {
    let mut issues = Vec::new();
    let n = poly.len();
    if n < 3 {
        issues.push(PolygonIssue::TooFewVertices(n));
        return ValidationReport { issues };
    }
    let v = &poly.vertices;
    let mut seen: HashMap<&Point, usize> = HashMap::new();
    let s = poly.scale();
    let norm: Vec<Point> = v.iter().map(|p| p.rescale(s)).collect();
    for (i, p) in norm.iter().enumerate() {
        if let Some(&j) = seen.get(p) {
            issues.push(PolygonIssue::DuplicateVertex(j, i));
        } else {
            seen.insert(p, i);
        }
    }
    if !poly.doubled_area().is_positive() {
        issues.push(PolygonIssue::NotCounterClockwise);
    }
    for i in 0..n {
        let (a, b) = (&norm[i], &norm[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (&norm[j], &norm[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let hit = if adjacent {
                // shared endpoint; fail only on a fold-back overlap
                if j == i + 1 {
                    on_segment(a, b, d) || on_segment(c, d, a)
                } else {
                    on_segment(a, b, c) || on_segment(c, d, b)
                }
            } else {
                segments_intersect(a, b, c, d)
            };
            if hit {
                issues.push(PolygonIssue::Crossing((i, (i + 1) % n), (j, (j + 1) % n)));
            }
        }
    }
    ValidationReport { issues }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub triangles: Vec<[usize; 3]>,
    pub internal_edges: Vec<(usize, usize)>,
    pub cost: IntInterval,
    pub degenerate: bool,
}

impl Triangulation {
    /// Normalize triangles and derive internal edges of an `n`-gon.
    pub fn from_triangles(
        n: usize,
        tris: &[[usize; 3]],
        cost: IntInterval,
        degenerate: bool,
    ) -> Self {
        let mut triangles: Vec<[usize; 3]> = tris
            .iter()
            .map(|t| {
                let mut t = *t;
                t.sort_unstable();
                t
            })
            .collect();
        triangles.sort_unstable();
        let mut internal_edges: Vec<(usize, usize)> = Vec::new();
        for t in &triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                if !is_boundary_edge(n, a, b) {
                    internal_edges.push((a, b));
                }
            }
        }
        internal_edges.sort_unstable();
        internal_edges.dedup();
        Triangulation {
            triangles,
            internal_edges,
            cost,
            degenerate,
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let e = (a.min(b), a.max(b));
        self.internal_edges.binary_search(&e).is_ok()
    }
}

pub fn is_boundary_edge(n: usize, a: usize, b: usize) -> bool {
    let (a, b) = (a.min(b), a.max(b));
    b == a + 1 || (a == 0 && b == n - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangulationCheck {
    Valid,
    ValidDegenerate,
    Invalid(String),
}

pub fn check_triangulation(poly: &Polygon, triangles: &[[usize; 3]]) -> TriangulationCheck {
    let n = poly.len();
    if n < 3 {
        return TriangulationCheck::Invalid("fewer than 3 vertices".into());
    }
    if triangles.len() != n - 2 {
        return TriangulationCheck::Invalid(format!(
            "{} triangles, expected {}",
            triangles.len(),
            n - 2
        ));
    }
    let mut degenerate = false;
    let mut uses: HashMap<(usize, usize), usize> = HashMap::new();
    for t in triangles {
        let mut t = *t;
        t.sort_unstable();
        if t[2] >= n || t[0] == t[1] || t[1] == t[2] {
            return TriangulationCheck::Invalid(format!("bad triple {t:?}"));
        }
        let v = &poly.vertices;
        match orientation(&v[t[0]], &v[t[1]], &v[t[2]]) {
            Orientation::Ccw => {}
            Orientation::Collinear => degenerate = true,
            Orientation::Cw => {
                return TriangulationCheck::Invalid(format!("clockwise triangle {t:?}"))
            }
        }
        for e in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            *uses.entry(e).or_default() += 1;
        }
    }
    for i in 0..n {
        let e = (i.min((i + 1) % n), i.max((i + 1) % n));
        if uses.get(&e).copied().unwrap_or(0) != 1 {
            return TriangulationCheck::Invalid(format!(
                "boundary edge {e:?} not used exactly once"
            ));
        }
    }
    for (e, c) in &uses {
        if !is_boundary_edge(n, e.0, e.1) && *c != 2 {
            return TriangulationCheck::Invalid(format!("internal edge {e:?} used {c} times"));
        }
    }
    if degenerate {
        TriangulationCheck::ValidDegenerate
    } else {
        TriangulationCheck::Valid
    }
}
