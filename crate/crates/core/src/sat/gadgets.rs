//! Inequality and equality gadgets over 1-in-3 clauses.

use std::collections::HashSet;

use super::embed::{embed_line, LineClause, RectilinearEmbedding, Side};
use super::Formula1in3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetKind {
    Inequality,
    Equality,
}

/// Hands out variable names that have not been used before.
#[derive(Debug, Clone, Default)]
pub struct Namer {
    used: HashSet<String>,
}

impl Namer {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(existing: I) -> Self {
        Namer {
            used: existing.into_iter().map(Into::into).collect(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut k = 1;
        while self.used.contains(&name) {
            k += 1;
            name = format!("{base}~{k}");
        }
        self.used.insert(name.clone());
        name
    }
}

/// Clauses plus the left-to-right line order `x, fresh.., y` they embed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetFragment {
    pub fresh: Vec<String>,
    pub line: Vec<String>,
    pub clauses: Vec<([String; 3], Side)>,
}

impl GadgetFragment {
    pub fn formula(&self) -> Formula1in3 {
        let mut f = Formula1in3::default();
        for n in &self.line {
            if f.var(n).is_none() {
                f.add_var(n.clone());
            }
        }
        f.clauses = self
            .clauses
            .iter()
            .map(|(c, _)| c.clone().map(|n| f.var(&n).unwrap()))
            .collect();
        f
    }

    pub fn embedding(&self) -> RectilinearEmbedding {
        let f = self.formula();
        let order: Vec<usize> = (0..f.vars.len()).collect();
        let clauses: Vec<LineClause> = f
            .clauses
            .iter()
            .zip(&self.clauses)
            .map(|(c, (_, s))| LineClause {
                vars: c.to_vec(),
                side: *s,
            })
            .collect();
        embed_line(f.vars.len(), &order, &clauses)
    }
}

/// Three fresh variables that force `g` false: `(g,h,i)`, `(g,i,j)` on `side`
/// and `(h,i,j)` on the other side.
pub(crate) fn forcer(
    g: &str,
    side: Side,
    namer: &mut Namer,
) -> (Vec<String>, Vec<([String; 3], Side)>) {
    let [h, i, j] = ["h", "i", "j"].map(|s| namer.fresh(&format!("{g}.{s}")));
    let clauses = vec![
        ([g.to_string(), h.clone(), i.clone()], side),
        ([g.to_string(), i.clone(), j.clone()], side),
        ([h.clone(), i.clone(), j.clone()], side.flip()),
    ];
    (vec![h, i, j], clauses)
}

/// `x != y` as `(x,a,y)` with `a` forced false.
pub(crate) fn inequality_on(x: &str, y: &str, side: Side, namer: &mut Namer) -> GadgetFragment {
    let a = namer.fresh(&format!("{x}/ne.a"));
    let (rest, mut clauses) = forcer(&a, side, namer);
    clauses.insert(0, ([x.to_string(), a.clone(), y.to_string()], side));
    let mut fresh = vec![a];
    fresh.extend(rest);
    let mut line = vec![x.to_string()];
    line.extend(fresh.iter().cloned());
    line.push(y.to_string());
    GadgetFragment {
        fresh,
        line,
        clauses,
    }
}

pub(crate) fn equality_on(x: &str, y: &str, side: Side, namer: &mut Namer) -> GadgetFragment {
    let m = namer.fresh(&format!("{x}/eq.a"));
    let left = inequality_on(x, &m, side, namer);
    let right = inequality_on(&m, y, side, namer);
    let mut fresh = left.fresh.clone();
    fresh.push(m);
    fresh.extend(right.fresh.iter().cloned());
    let mut line = left.line.clone();
    line.extend(right.line[1..].iter().cloned());
    let mut clauses = left.clauses;
    clauses.extend(right.clauses);
    GadgetFragment {
        fresh,
        line,
        clauses,
    }
}

pub fn build_gadget(kind: GadgetKind, x: &str, y: &str, namer: &mut Namer) -> GadgetFragment {
    match kind {
        GadgetKind::Inequality => inequality_on(x, y, Side::Above, namer),
        GadgetKind::Equality => equality_on(x, y, Side::Above, namer),
    }
}

/// The clause block that holds iff `x | y | z`:
/// `(x,u,a) (y,u,b) (a,b,q) (u = c) (d != z) (c,d,r)`.
pub fn disjunction_block(x: &str, y: &str, z: &str, namer: &mut Namer) -> Formula1in3 {
    let [u, a, b, q, c, d, r] =
        ["u", "a", "b", "q", "c", "d", "r"].map(|s| namer.fresh(&format!("or.{s}")));
    let mut f = Formula1in3::default();
    let mut clauses: Vec<[String; 3]> = vec![
        [x.into(), u.clone(), a.clone()],
        [y.into(), u.clone(), b.clone()],
        [a.clone(), b.clone(), q.clone()],
        [c.clone(), d.clone(), r.clone()],
    ];
    clauses.extend(
        equality_on(&u, &c, Side::Above, namer)
            .clauses
            .into_iter()
            .map(|(c, _)| c),
    );
    clauses.extend(
        inequality_on(&d, z, Side::Above, namer)
            .clauses
            .into_iter()
            .map(|(c, _)| c),
    );
    for c in &clauses {
        for n in c {
            if f.var(n).is_none() {
                f.add_var(n.clone());
            }
        }
    }
    f.clauses = clauses
        .iter()
        .map(|c| c.clone().map(|n| f.var(&n).unwrap()))
        .collect();
    f
}
