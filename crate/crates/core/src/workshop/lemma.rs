use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;

use super::{to_point, WInstance, WorkshopError};
use crate::arith::{format_fixed, pow10, IntInterval, ScaledInt, WORK_SCALE};
use crate::geometry::Polygon;
use crate::mwt::{polygon_mwt, EdgeConstraint, MwtError};

/// Structural problems with a W instance; empty when usable.
pub fn validate_w(w: &WInstance) -> Vec<String> {
    let mut issues = Vec::new();
    let at = |l: &str| w.index(l).map(|i| w.points[i]);
    for (l, want) in [
        ("x", (0, 0)),
        ("y", (-27_000, 112_000)),
        ("z", (27_000, 112_000)),
    ] {
        if at(l) != Some(want) {
            issues.push(format!("{l} must be at {}", to_point(want)));
        }
    }
    for l in ["u", "u'"] {
        match at(l) {
            Some(p) if p.1 == -1_000 => {}
            Some(_) => issues.push(format!("{l} must lie 0.1 below the x-axis")),
            None => issues.push(format!("missing label {l}")),
        }
    }
    let k = w.k();
    if k == 0 {
        issues.push("no v points".into());
    }
    for i in 1..=k {
        if at(&format!("v{i}'")).is_none() {
            issues.push(format!("missing label v{i}'"));
        }
    }
    let mirror_label = |l: &str| match l {
        "x" => "x".to_string(),
        "y" => "z".to_string(),
        "z" => "y".to_string(),
        _ => l
            .strip_suffix('\'')
            .map_or_else(|| format!("{l}'"), str::to_string),
    };
    for (l, p) in w.labels.iter().zip(&w.points) {
        if at(&mirror_label(l)) != Some((-p.0, p.1)) {
            issues.push(format!("{l} has no mirror image {}", mirror_label(l)));
        }
    }
    if w.boundary.len() != w.points.len() {
        issues.push("every point must be on the boundary".into());
    }
    let poly = Polygon::new(w.boundary.iter().map(|&i| to_point(w.points[i])).collect());
    if !crate::geometry::validate_simple_polygon(&poly).is_valid() {
        issues.push("boundary is not a simple counterclockwise polygon".into());
    }
    issues
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WCase {
    pub i: usize,
    pub j: usize,
    pub polygon: Polygon,
    pub labels: Vec<String>,
    pub unrestricted: IntInterval,
    pub multiplicity: num_bigint::BigUint,
    pub witness: crate::geometry::Triangulation,
    /// `None` when no triangulation avoids both terminal edges.
    pub restricted: Option<IntInterval>,
    /// Lower bound on restricted minus unrestricted optimum.
    pub gap: Option<ScaledInt>,
}

impl WCase {
    pub fn name(&self) -> String {
        format!("v{}, v{}'", self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub cases: Vec<WCase>,
    pub gap_min: Option<ScaledInt>,
    pub worst: Option<String>,
    /// Largest number of internal edges in a case triangulation.
    pub e_max: usize,
    pub sigma: ScaledInt,
    /// `2 · E_max · σ`; the gap has to exceed twice this.
    pub margin: ScaledInt,
    pub margin_ok: bool,
    pub log: Vec<String>,
}

/// Remove the vertices strictly between `a` and `b` on the side away from `keep`.
fn cut(cycle: &[usize], a: usize, b: usize, keep: usize) -> Vec<usize> {
    let n = cycle.len();
    let pa = cycle.iter().position(|&v| v == a).unwrap();
    let pb = cycle.iter().position(|&v| v == b).unwrap();
    let forward: Vec<usize> = (1..n)
        .map(|d| (pa + d) % n)
        .take_while(|&p| p != pb)
        .collect();
    let drop: Vec<usize> = if forward.iter().any(|&p| cycle[p] == keep) {
        (1..n)
            .map(|d| (pb + d) % n)
            .take_while(|&p| p != pa)
            .collect()
    } else {
        forward
    };
    (0..n)
        .filter(|p| !drop.contains(p))
        .map(|p| cycle[p])
        .collect()
}

fn down5(v: &num_bigint::BigInt) -> String {
    format_fixed(&v.div_floor(&pow10(WORK_SCALE - 5)), 5)
}

/// Optimum with and without the terminal edges for every case `i ≤ j`.
pub fn check_terminal_lemma(w: &WInstance) -> Result<LemmaReport, WorkshopError> {
    let issues = validate_w(w);
    if !issues.is_empty() {
        return Err(WorkshopError::InvalidPiece {
            piece: w.name.clone(),
            msg: issues.join("; "),
        });
    }
    let k = w.k();
    let id = |l: &str| w.index(l).unwrap();
    let (x, y, z) = (id("x"), id("y"), id("z"));
    let jobs: Vec<(usize, usize)> = (1..=k).flat_map(|i| (i..=k).map(move |j| (i, j))).collect();
    let cases: Vec<Result<WCase, WorkshopError>> = jobs
        .into_par_iter()
        .map(|(i, j)| {
            let name = format!("v{i}, v{j}'");
            let cyc = cut(&w.boundary, id("u"), id(&format!("v{i}")), x);
            let cyc = cut(&cyc, id(&format!("v{j}'")), id("u'"), x);
            let pos: HashMap<usize, usize> = cyc.iter().enumerate().map(|(p, &v)| (v, p)).collect();
            let polygon = Polygon::new(cyc.iter().map(|&v| to_point(w.points[v])).collect());
            let fail = |e: MwtError| WorkshopError::LemmaFails(name.clone(), e.to_string());
            let free = polygon_mwt(&polygon, &EdgeConstraint::none()).map_err(fail)?;
            let terminal = [(pos[&x], pos[&y]), (pos[&x], pos[&z])];
            let restricted = match polygon_mwt(&polygon, &EdgeConstraint::forbid(&terminal)) {
                Ok(r) => Some(r.optimal_cost),
                Err(MwtError::NoFeasibleTriangulation) => None,
                Err(e) => return Err(fail(e)),
            };
            if free.candidates_degenerate {
                return Err(WorkshopError::LemmaFails(
                    name,
                    "a degenerate triangulation is a candidate optimum".into(),
                ));
            }
            let gap = restricted
                .as_ref()
                .map(|r| ScaledInt::new(&r.lo - &free.optimal_cost.hi, WORK_SCALE));
            if gap.as_ref().is_some_and(|g| g.value <= 0.into()) {
                return Err(WorkshopError::LemmaFails(
                    name,
                    "an optimum may avoid both terminal edges".into(),
                ));
            }
            Ok(WCase {
                i,
                j,
                labels: cyc.iter().map(|&v| w.labels[v].clone()).collect(),
                polygon,
                unrestricted: free.optimal_cost,
                multiplicity: free.multiplicity,
                witness: free.witness,
                restricted,
                gap,
            })
        })
        .collect();
    let cases: Vec<WCase> = cases.into_iter().collect::<Result<_, _>>()?;
    let mut log = Vec::new();
    for c in &cases {
        log.push(format!("Case {}: difference =", c.name()));
        log.push(
            c.gap
                .as_ref()
                .map_or("unbounded".to_string(), |g| down5(&g.value)),
        );
        log.push("          Best solution value without terminal edges:".into());
        log.push(format!(
            "              {}",
            c.restricted
                .as_ref()
                .map_or("none".to_string(), |r| r.outward(5).to_string())
        ));
        log.push(format!(
            "          There is/are {} best solution(s) without restriction:",
            c.multiplicity
        ));
        let shown = c
            .multiplicity
            .to_u64_digits()
            .first()
            .copied()
            .unwrap_or(0)
            .min(8);
        for _ in 0..shown {
            log.push(format!("              {}", c.unrestricted.outward(5)));
        }
    }
    let worst = cases
        .iter()
        .filter(|c| c.gap.is_some())
        .min_by(|a, b| a.gap.cmp(&b.gap));
    let gap_min = worst.and_then(|c| c.gap.clone());
    let e_max = cases.iter().map(|c| c.polygon.len() - 3).max().unwrap_or(0);
    let sigma = ScaledInt::new(4, 2);
    let margin = sigma.mul_int(2 * e_max as i64);
    let margin_ok = gap_min.as_ref().is_none_or(|g| *g > margin.mul_int(2));
    if let (Some(g), Some(c)) = (&gap_min, worst) {
        log.push(format!(
            "Smallest difference {} in case {}.",
            down5(&g.value),
            c.name()
        ));
        let rel = if margin_ok { ">" } else { "<=" };
        log.push(format!(
            "Perturbation margin: {} {rel} 2 * {} (E_max = {e_max}, sigma = 0.04).",
            down5(&g.value),
            margin.to_canonical()
        ));
    }
    Ok(LemmaReport {
        worst: worst.map(WCase::name),
        cases,
        gap_min,
        e_max,
        sigma,
        margin,
        margin_ok,
        log,
    })
}
