//! Planar 3-SAT to positive planar 1-in-3 SAT.
//!
//! Stages: literal cleanup and unit propagation, negation elimination by
//! alternating variable chains, then one clause block per disjunction. The
//! result is re-embedded on the line after every structural change.

use std::collections::HashMap;

use super::embed::{
    embed_line, line_model, validate_embedding, LineClause, RectilinearEmbedding, Side,
};
use super::gadgets::{forcer, Namer};
use super::{Formula1in3, Lit, Planar3SatInstance, SatError};

/// How a source variable is recovered from a 1-in-3 assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceVar {
    Fixed(bool),
    Free,
    /// Equal to the given output variable, or its negation.
    Chain {
        var: usize,
        negated: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformed {
    pub formula: Formula1in3,
    pub embedding: RectilinearEmbedding,
    pub source: Vec<SourceVar>,
    /// Unit propagation already derived a contradiction.
    pub refuted: bool,
}

impl Transformed {
    pub fn decode(&self, a: &[bool]) -> Vec<bool> {
        self.source
            .iter()
            .map(|s| match *s {
                SourceVar::Fixed(b) => b,
                SourceVar::Free => false,
                SourceVar::Chain { var, negated } => a[var] != negated,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct MClause {
    vars: Vec<usize>,
    side: Side,
    disjunction: bool,
    alive: bool,
}

#[derive(Debug, Default)]
struct Model {
    names: Vec<String>,
    order: Vec<usize>,
    clauses: Vec<MClause>,
    namer: Namer,
    index: HashMap<String, usize>,
}

impl Model {
    fn var(&mut self, base: &str) -> usize {
        let name = self.namer.fresh(base);
        self.named(name)
    }

    fn named(&mut self, name: String) -> usize {
        self.index.insert(name.clone(), self.names.len());
        self.names.push(name);
        self.names.len() - 1
    }

    /// Forcer clauses for `g`; returns its three helper variables.
    fn force_false(&mut self, g: usize, side: Side) -> Vec<usize> {
        let (fresh, clauses) = forcer(&self.names[g].clone(), side, &mut self.namer);
        let ids = fresh.into_iter().map(|n| self.named(n)).collect();
        for (c, sd) in clauses {
            let vars = c.map(|n| self.index[&n]);
            self.exact(vars, sd);
        }
        ids
    }

    fn exact(&mut self, vars: [usize; 3], side: Side) {
        self.clauses.push(MClause {
            vars: vars.to_vec(),
            side,
            disjunction: false,
            alive: true,
        });
    }

    fn live(&self) -> (Vec<usize>, Vec<LineClause>) {
        let ids: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| self.clauses[i].alive)
            .collect();
        let lcs = ids
            .iter()
            .map(|&i| LineClause {
                vars: self.clauses[i].vars.clone(),
                side: self.clauses[i].side,
            })
            .collect();
        (ids, lcs)
    }

    fn embed(&self) -> (Vec<usize>, RectilinearEmbedding) {
        let (ids, lcs) = self.live();
        (ids, embed_line(self.names.len(), &self.order, &lcs))
    }

    /// Clauses attached to `v` on `side`, left to right.
    fn legs_at(&self, v: usize, side: Side) -> Vec<usize> {
        let (ids, e) = self.embed();
        let mut legs: Vec<(i64, usize)> = e
            .legs
            .iter()
            .filter(|l| l.var == v && self.clauses[ids[l.clause]].side == side)
            .map(|l| (l.corners[0].0, ids[l.clause]))
            .collect();
        legs.sort_unstable();
        legs.into_iter().map(|l| l.1).collect()
    }

    fn place(&mut self, at: usize, after: bool, new: &[usize]) {
        let i = self.order.iter().position(|&v| v == at).unwrap() + after as usize;
        self.order.splice(i..i, new.iter().copied());
    }

    /// `x != y` through a fresh middle variable followed by its forcer.
    /// Returns the variables to put on the line between `x` and `y`.
    fn inequality(&mut self, x: usize, y: usize, side: Side, base: &str) -> Vec<usize> {
        let g = self.var(base);
        self.exact([x, g, y], side);
        let mut ids = vec![g];
        ids.extend(self.force_false(g, side));
        ids
    }

    /// `x = y` through a fresh middle; returns the line segment between them.
    fn equality(&mut self, x: usize, y: usize, side: Side, base: &str) -> Vec<usize> {
        let e = self.var(&format!("{base}.e"));
        let mut line = self.inequality(x, e, side, &format!("{base}.g1"));
        line.push(e);
        line.extend(self.inequality(e, y, side, &format!("{base}.g2")));
        line
    }

    /// Make a copy `v'` of `v` carrying the listed clause legs. Returns the
    /// line segment from just after `v` up to and including `v'`.
    fn copy_with(&mut self, v: usize, moved: &[usize], side: Side) -> Vec<usize> {
        let base = self.names[v].clone();
        let copy = self.var(&format!("{base}'"));
        for &ci in moved {
            for x in self.clauses[ci].vars.iter_mut() {
                if *x == v {
                    *x = copy;
                }
            }
        }
        let mut line = self.equality(v, copy, side.flip(), &format!("{base}'"));
        line.push(copy);
        line
    }
}

fn refutation() -> Transformed {
    let formula = Formula1in3 {
        vars: ["bot.a", "bot.b", "bot.c", "bot.d"]
            .map(String::from)
            .to_vec(),
        clauses: vec![[0, 1, 2], [0, 2, 3], [0, 1, 3], [1, 2, 3]],
    };
    let sides = [Side::Above, Side::Above, Side::Below, Side::Below];
    let lcs: Vec<LineClause> = formula
        .clauses
        .iter()
        .zip(sides)
        .map(|(c, side)| LineClause {
            vars: c.to_vec(),
            side,
        })
        .collect();
    let embedding = embed_line(4, &[0, 1, 2, 3], &lcs);
    Transformed {
        formula,
        embedding,
        source: Vec::new(),
        refuted: true,
    }
}

pub fn transform_instance(inst: &Planar3SatInstance) -> Result<Transformed, SatError> {
    let report = inst.validate();
    if !report.is_valid() {
        return Err(SatError::InvalidEmbedding(format!("{:?}", report.issues)));
    }
    let (src_order, placed) = line_model(&inst.embedding).map_err(SatError::InvalidEmbedding)?;
    let n = inst.vars.len();

    // cleanup and unit propagation
    let mut fixed: Vec<Option<bool>> = vec![None; n];
    let mut clauses: Vec<Option<(Vec<Lit>, Side)>> = Vec::new();
    for (c, p) in inst.clauses.iter().zip(&placed) {
        let mut lits = c.clone();
        lits.sort_unstable();
        lits.dedup();
        let taut = lits.windows(2).any(|w| w[0].var == w[1].var);
        clauses.push((!taut).then_some((lits, p.side)));
    }
    loop {
        let mut changed = false;
        for slot in clauses.iter_mut() {
            let Some((lits, _)) = slot else { continue };
            if lits.iter().any(|l| fixed[l.var] == Some(!l.neg)) {
                *slot = None;
                changed = true;
                continue;
            }
            let before = lits.len();
            lits.retain(|l| fixed[l.var].is_none());
            changed |= lits.len() != before;
            match lits.len() {
                0 => {
                    let mut t = refutation();
                    t.source = vec![SourceVar::Free; n];
                    return Ok(t);
                }
                1 => {
                    fixed[lits[0].var] = Some(!lits[0].neg);
                    *slot = None;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    // source model on the remaining variables
    let live: Vec<(usize, &Vec<Lit>, Side)> = clauses
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.as_ref().map(|(l, s)| (i, l, *s)))
        .collect();
    let lcs: Vec<LineClause> = live
        .iter()
        .map(|(_, l, s)| LineClause {
            vars: l.iter().map(|x| x.var).collect(),
            side: *s,
        })
        .collect();
    let src_emb = embed_line(n, &src_order, &lcs);
    let mut legs: HashMap<(usize, Side), Vec<(i64, usize)>> = HashMap::new();
    for leg in &src_emb.legs {
        legs.entry((leg.var, lcs[leg.clause].side))
            .or_default()
            .push((leg.corners[0].0, leg.clause));
    }
    for v in legs.values_mut() {
        v.sort_unstable();
    }

    let mut m = Model {
        namer: Namer::new(inst.vars.iter().cloned()),
        ..Default::default()
    };
    let mut source: Vec<SourceVar> = fixed
        .iter()
        .map(|f| f.map_or(SourceVar::Free, SourceVar::Fixed))
        .collect();
    // (live clause, source var) -> chain variable
    let mut chain_of: HashMap<(usize, usize), usize> = HashMap::new();
    for &x in &src_order {
        let polarity = |side: Side, k: usize| -> Option<bool> {
            let (_, ci) = *legs.get(&(x, side))?.get(k)?;
            live[ci].1.iter().find(|l| l.var == x).map(|l| l.neg)
        };
        let (mut ia, mut ib) = (0, 0);
        let Some(mut neg) = polarity(Side::Above, 0).or(polarity(Side::Below, 0)) else {
            continue;
        };
        let mut chunks: Vec<(bool, Vec<usize>)> = Vec::new();
        while polarity(Side::Above, ia).is_some() || polarity(Side::Below, ib).is_some() {
            let mut took = Vec::new();
            while polarity(Side::Above, ia) == Some(neg) {
                took.push(legs[&(x, Side::Above)][ia].1);
                ia += 1;
            }
            while polarity(Side::Below, ib) == Some(neg) {
                took.push(legs[&(x, Side::Below)][ib].1);
                ib += 1;
            }
            chunks.push((neg, took));
            neg = !neg;
        }
        let name = &inst.vars[x];
        let single = chunks.len() == 1 && !chunks[0].0;
        let mut prev: Option<usize> = None;
        for (k, (neg, took)) in chunks.iter().enumerate() {
            let v = if single {
                m.named(name.clone())
            } else {
                m.var(&format!("{name}.{}", k + 1))
            };
            if let Some(p) = prev {
                let mid = m.inequality(p, v, Side::Above, &format!("{name}.{k}/ne"));
                m.order.extend(mid);
            } else {
                source[x] = SourceVar::Chain {
                    var: v,
                    negated: *neg,
                };
            }
            m.order.push(v);
            for &ci in took {
                chain_of.insert((ci, x), v);
            }
            prev = Some(v);
        }
    }
    for (ci, (_, lits, side)) in live.iter().enumerate() {
        let vars = lits.iter().map(|l| chain_of[&(ci, l.var)]).collect();
        m.clauses.push(MClause {
            vars,
            side: *side,
            disjunction: true,
            alive: true,
        });
    }

    for ci in 0..m.clauses.len() {
        if !m.clauses[ci].disjunction {
            continue;
        }
        match m.clauses[ci].vars.len() {
            2 => two_literal(&mut m, ci),
            3 => three_literal(&mut m, ci),
            _ => unreachable!("unit clauses were propagated"),
        }
    }

    // renumber output variables by line position
    let (ids, lcs) = m.live();
    debug_assert!(ids.iter().all(|&i| !m.clauses[i].disjunction));
    let mut new_id = vec![usize::MAX; m.names.len()];
    for (i, &v) in m.order.iter().enumerate() {
        new_id[v] = i;
    }
    let formula = Formula1in3 {
        vars: m.order.iter().map(|&v| m.names[v].clone()).collect(),
        clauses: lcs
            .iter()
            .map(|c| [new_id[c.vars[0]], new_id[c.vars[1]], new_id[c.vars[2]]])
            .collect(),
    };
    let lcs: Vec<LineClause> = formula
        .clauses
        .iter()
        .zip(&lcs)
        .map(|(c, l)| LineClause {
            vars: c.to_vec(),
            side: l.side,
        })
        .collect();
    let order: Vec<usize> = (0..formula.vars.len()).collect();
    let embedding = embed_line(formula.vars.len(), &order, &lcs);
    let report = validate_embedding(&embedding);
    if !report.is_valid() {
        return Err(SatError::InvalidEmbedding(format!(
            "transformed layout: {:?}",
            report.issues
        )));
    }
    for s in source.iter_mut() {
        if let SourceVar::Chain { var, .. } = s {
            *var = new_id[*var];
        }
    }
    Ok(Transformed {
        formula,
        embedding,
        source,
        refuted: false,
    })
}

fn sorted_by_line(m: &Model, vars: &[usize]) -> Vec<usize> {
    let mut v = vars.to_vec();
    v.sort_by_key(|x| m.order.iter().position(|o| o == x).unwrap());
    v
}

fn split_at_leg(list: &[usize], ci: usize) -> (Vec<usize>, Vec<usize>) {
    let k = list.iter().position(|&c| c == ci).unwrap();
    (list[..k].to_vec(), list[k + 1..].to_vec())
}

/// `(p | s)` becomes `(p | f | s)` with `f` forced false and placed right
/// after `p`; clause legs nested inside move to a copy of `p` right of `f`.
fn two_literal(m: &mut Model, ci: usize) {
    let side = m.clauses[ci].side;
    let [p, s] = <[usize; 2]>::try_from(sorted_by_line(m, &m.clauses[ci].vars)).unwrap();
    let (_, inner) = split_at_leg(&m.legs_at(p, side), ci);
    let tag = format!("{}|{}", m.names[p], m.names[s]);
    let f = m.var(&format!("{tag}.f"));
    let mut line = vec![f];
    line.extend(m.force_false(f, side));
    if !inner.is_empty() {
        line.extend(m.copy_with(p, &inner, side));
    }
    m.clauses[ci].vars = vec![p, f, s];
    m.place(p, true, &line);
    three_literal(m, ci);
}

/// `(x | y | z)` becomes the disjunction block, with copies of `x` and `z`
/// taking over the clause legs nested inside the original clause.
fn three_literal(m: &mut Model, ci: usize) {
    let side = m.clauses[ci].side;
    let [p, mid, s] = <[usize; 3]>::try_from(sorted_by_line(m, &m.clauses[ci].vars)).unwrap();
    let (_, inner_p) = split_at_leg(&m.legs_at(p, side), ci);
    let (inner_s, _) = split_at_leg(&m.legs_at(s, side), ci);
    let tag = format!("{}|{}|{}", m.names[p], m.names[mid], m.names[s]);
    let [u, a, b, q, c, d, r] =
        ["u", "a", "b", "q", "c", "d", "r"].map(|x| m.var(&format!("{tag}.{x}")));
    m.clauses[ci].alive = false;

    let mut left = vec![a, b, q];
    if !inner_p.is_empty() {
        left.extend(m.copy_with(p, &inner_p, side));
    }
    // z' always exists: the inequality (d != z) must stay inside (y,u,b)
    let s2 = m.var(&format!("{}'", m.names[s]));
    for &cj in &inner_s {
        for x in m.clauses[cj].vars.iter_mut() {
            if *x == s {
                *x = s2;
            }
        }
    }
    let mut right = vec![s2, c, r];
    let e = m.var(&format!("{tag}.e"));
    right.push(e);
    right.push(d);
    right.extend(m.inequality(d, s2, side, &format!("{tag}.g3")));
    right.push(u);
    right.extend(m.inequality(u, e, side.flip(), &format!("{tag}.g1")));
    right.extend(m.inequality(e, c, side.flip(), &format!("{tag}.g2")));
    right.extend(m.equality(s2, s, side.flip(), &format!("{}'", m.names[s])));

    m.exact([p, u, a], side);
    m.exact([mid, u, b], side);
    m.exact([a, b, q], side.flip());
    m.exact([c, d, r], side);
    m.place(p, true, &left);
    m.place(s, false, &right);
}
