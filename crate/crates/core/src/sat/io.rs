//! Line-oriented instance files.
//!
//! ```text
//! p cnf 3 1            # or: p 1in3 <vars> <clauses>
//! v x 0 0 0            # name, span start, span end, line y
//! c x -y z             # clause; '-' marks a negated literal (cnf only)
//! k 1 2                # clause point of the preceding clause
//! e x 0,0 0,2 1,2      # leg corners from variable x to that clause
//! ```

use std::fmt::Write as _;

use super::embed::{ClausePlacement, LegPath, RectilinearEmbedding, VarPlacement};
use super::{Formula1in3, Lit, Planar3SatInstance, SatError};

fn write_body(
    out: &mut String,
    names: &[String],
    clauses: &[Vec<(usize, bool)>],
    e: &RectilinearEmbedding,
) {
    for (n, v) in names.iter().zip(&e.vars) {
        let _ = writeln!(out, "v {n} {} {} {}", v.x_from, v.x_to, v.y);
    }
    for (ci, c) in clauses.iter().enumerate() {
        let lits: Vec<String> = c
            .iter()
            .map(|&(v, neg)| format!("{}{}", if neg { "-" } else { "" }, names[v]))
            .collect();
        let _ = writeln!(out, "c {}", lits.join(" "));
        if let Some(p) = e.clauses.get(ci) {
            let _ = writeln!(out, "k {} {}", p.point.0, p.point.1);
        }
        for leg in e.legs.iter().filter(|l| l.clause == ci) {
            let pts: Vec<String> = leg
                .corners
                .iter()
                .map(|(x, y)| format!("{x},{y}"))
                .collect();
            let _ = writeln!(out, "e {} {}", names[leg.var], pts.join(" "));
        }
    }
}

pub fn write_planar(inst: &Planar3SatInstance) -> String {
    let mut out = format!("p cnf {} {}\n", inst.vars.len(), inst.clauses.len());
    let clauses: Vec<Vec<(usize, bool)>> = inst
        .clauses
        .iter()
        .map(|c| c.iter().map(|l| (l.var, l.neg)).collect())
        .collect();
    write_body(&mut out, &inst.vars, &clauses, &inst.embedding);
    out
}

pub fn write_1in3(f: &Formula1in3, e: &RectilinearEmbedding) -> String {
    let mut out = format!("p 1in3 {} {}\n", f.vars.len(), f.clauses.len());
    let clauses: Vec<Vec<(usize, bool)>> = f
        .clauses
        .iter()
        .map(|c| c.iter().map(|&v| (v, false)).collect())
        .collect();
    write_body(&mut out, &f.vars, &clauses, e);
    out
}

struct Parsed {
    kind: String,
    names: Vec<String>,
    clauses: Vec<Vec<Lit>>,
    embedding: RectilinearEmbedding,
}

fn err(line: usize, msg: impl Into<String>) -> SatError {
    SatError::Parse {
        line,
        msg: msg.into(),
    }
}

fn int(line: usize, t: Option<&str>) -> Result<i64, SatError> {
    let t = t.ok_or_else(|| err(line, "missing number"))?;
    t.parse()
        .map_err(|_| err(line, format!("bad integer {t:?}")))
}

fn parse(text: &str) -> Result<Parsed, SatError> {
    let mut p = Parsed {
        kind: String::new(),
        names: Vec::new(),
        clauses: Vec::new(),
        embedding: RectilinearEmbedding::default(),
    };
    let mut declared = (0usize, 0usize);
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        let mut tok = body.split_whitespace();
        let Some(tag) = tok.next() else { continue };
        if tag != "p" && p.kind.is_empty() {
            return Err(err(ln, "header line must come first"));
        }
        match tag {
            "p" => {
                p.kind = tok
                    .next()
                    .filter(|k| *k == "cnf" || *k == "1in3")
                    .ok_or_else(|| err(ln, "expected 'cnf' or '1in3'"))?
                    .to_string();
                declared = (int(ln, tok.next())? as usize, int(ln, tok.next())? as usize);
            }
            "v" => {
                let name = tok.next().ok_or_else(|| err(ln, "missing variable name"))?;
                if name.starts_with('-') || p.names.iter().any(|n| n == name) {
                    return Err(err(ln, format!("invalid or duplicate variable {name}")));
                }
                p.names.push(name.to_string());
                let v = VarPlacement {
                    x_from: int(ln, tok.next())?,
                    x_to: int(ln, tok.next())?,
                    y: int(ln, tok.next())?,
                };
                p.embedding.vars.push(v);
            }
            "c" => {
                let mut lits = Vec::new();
                for t in tok.by_ref() {
                    let (neg, name) = t.strip_prefix('-').map_or((false, t), |n| (true, n));
                    if neg && p.kind == "1in3" {
                        return Err(err(ln, "negated literal in a 1-in-3 formula"));
                    }
                    let var = p
                        .names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| err(ln, format!("unknown variable {name}")))?;
                    lits.push(Lit { var, neg });
                }
                if lits.is_empty() || lits.len() > 3 || (p.kind == "1in3" && lits.len() != 3) {
                    return Err(err(ln, format!("clause with {} literals", lits.len())));
                }
                p.clauses.push(lits);
            }
            "k" => {
                let mut vars: Vec<usize> = Vec::new();
                for l in p
                    .clauses
                    .last()
                    .ok_or_else(|| err(ln, "clause point before any clause"))?
                {
                    if !vars.contains(&l.var) {
                        vars.push(l.var);
                    }
                }
                p.embedding.clauses.push(ClausePlacement {
                    point: (int(ln, tok.next())?, int(ln, tok.next())?),
                    vars,
                });
            }
            "e" => {
                let clause = p
                    .clauses
                    .len()
                    .checked_sub(1)
                    .ok_or_else(|| err(ln, "leg before any clause"))?;
                let name = tok.next().ok_or_else(|| err(ln, "missing variable name"))?;
                let var = p
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| err(ln, format!("unknown variable {name}")))?;
                let mut corners = Vec::new();
                for t in tok.by_ref() {
                    let (x, y) = t
                        .split_once(',')
                        .ok_or_else(|| err(ln, format!("bad corner {t:?}")))?;
                    corners.push((int(ln, Some(x))?, int(ln, Some(y))?));
                }
                p.embedding.legs.push(LegPath {
                    clause,
                    var,
                    corners,
                });
            }
            other => return Err(err(ln, format!("unknown line tag {other:?}"))),
        }
        if tok.next().is_some() {
            return Err(err(ln, "trailing tokens"));
        }
    }
    if p.kind.is_empty() {
        return Err(err(0, "empty file"));
    }
    if declared != (p.names.len(), p.clauses.len()) {
        return Err(err(
            1,
            format!(
                "header declares {declared:?}, file has ({}, {})",
                p.names.len(),
                p.clauses.len()
            ),
        ));
    }
    Ok(p)
}

pub fn parse_planar(text: &str) -> Result<Planar3SatInstance, SatError> {
    let p = parse(text)?;
    if p.kind != "cnf" {
        return Err(err(1, "expected a cnf instance"));
    }
    Ok(Planar3SatInstance {
        vars: p.names,
        clauses: p.clauses,
        embedding: p.embedding,
    })
}

pub fn parse_1in3(text: &str) -> Result<(Formula1in3, RectilinearEmbedding), SatError> {
    let p = parse(text)?;
    if p.kind != "1in3" {
        return Err(err(1, "expected a 1in3 instance"));
    }
    let clauses = p
        .clauses
        .iter()
        .map(|c| [c[0].var, c[1].var, c[2].var])
        .collect();
    Ok((
        Formula1in3 {
            vars: p.names,
            clauses,
        },
        p.embedding,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "p cnf 3 1\nv x 0 0 0\nv y 2 2 0\nv z 4 4 0\nc x -y z\nk 2 1\ne x 0,0 0,1 2,1\ne y 2,0 2,1\ne z 4,0 4,1 2,1\n";

    #[test]
    fn round_trip() {
        let inst = parse_planar(SAMPLE).unwrap();
        assert!(inst.validate().is_valid());
        assert_eq!(write_planar(&inst), SAMPLE);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = SAMPLE.replace("e y 2,0 2,1", "e y 2,0 2;1");
        assert!(matches!(
            parse_planar(&bad),
            Err(SatError::Parse { line: 8, .. })
        ));
        assert!(matches!(
            parse_1in3(SAMPLE),
            Err(SatError::Parse { line: 1, .. })
        ));
        let neg = SAMPLE.replace("p cnf", "p 1in3");
        assert!(matches!(
            parse_1in3(&neg),
            Err(SatError::Parse { line: 5, .. })
        ));
    }
}
