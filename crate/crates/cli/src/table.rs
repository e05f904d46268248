//! Pattern tables as plain text and TeX.

use mwt_core::arith::{IntInterval, Rounded};
use mwt_core::workshop::PatternTable;

/// Split digits into groups of three away from the decimal point.
fn group(text: &str, sep: &str) -> String {
    let (sign, body) = match text.strip_prefix('-') {
        Some(b) => ("-", b),
        None => ("", text),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let mut head: Vec<&str> = Vec::new();
    let mut end = int.len();
    while end > 3 {
        head.push(&int[end - 3..end]);
        end -= 3;
    }
    head.push(&int[..end]);
    head.reverse();
    let mut out = format!("{sign}{}", head.join(sep));
    if !frac.is_empty() {
        let tail: Vec<&str> = frac
            .as_bytes()
            .chunks(3)
            .map(|c| std::str::from_utf8(c).unwrap())
            .collect();
        out.push('.');
        out.push_str(&tail.join(sep));
    }
    out
}

fn shown(v: &IntInterval, digits: u32, sep: &str) -> String {
    match v.display(digits) {
        Rounded::Unique(r) => group(&r.to_string(), sep),
        Rounded::Ambiguous(iv) => format!(
            "[{},{}]",
            group(&iv.lo_scaled().to_string(), sep),
            group(&iv.hi_scaled().to_string(), sep)
        ),
    }
}

/// Names attached to rows whose large terminals agree, by rank of the
/// positive relative cost.
fn annotations(t: &PatternTable) -> Vec<Option<&'static str>> {
    let uniform = |p: &str| {
        let b = p.as_bytes();
        match t.rows.first().map(|r| r.states.len()) {
            Some(3) => b[0] == b[1],
            Some(2) => b[0] == b[1],
            _ => false,
        }
    };
    let mut out = vec![None; t.rows.len()];
    let mut positive: Vec<usize> = Vec::new();
    for (i, r) in t.rows.iter().enumerate() {
        if !uniform(&r.pattern) {
            continue;
        }
        if r.ctilde.hi == 0.into() {
            out[i] = Some("0");
        } else {
            positive.push(i);
        }
    }
    positive.sort_by(|&a, &b| t.rows[a].ctilde.lo.cmp(&t.rows[b].ctilde.lo));
    let names: &[&str] = match (t.rows[0].states.len(), positive.len()) {
        (3, 3) => &["\\varepsilon_2", "\\delta_1", "\\delta_2"],
        (2, 1) => &["\\varepsilon_1"],
        _ => &[],
    };
    for (&i, &n) in positive.iter().zip(names) {
        out[i] = Some(n);
    }
    out
}

/// Mirror pattern: every state flipped, case kept.
fn mirror(p: &str) -> String {
    p.chars()
        .map(|c| match c {
            'L' => 'R',
            'R' => 'L',
            'l' => 'r',
            'r' => 'l',
            o => o,
        })
        .collect()
}

pub fn emit_text(tables: &[PatternTable], digits: u32) -> String {
    let mut out = String::from("# pattern tables: multiplicity, c, reduced c, relative c\n");
    for t in tables {
        out.push_str(&format!("\npiece {}\n", t.piece));
        let three = t.rows.first().is_some_and(|r| r.states.len() == 3);
        for r in &t.rows {
            out.push_str(&format!(
                "{:<4} {:>3}  {}  {}  {}",
                r.pattern,
                r.multiplicity,
                shown(&r.c, digits, " "),
                shown(&r.cbar, digits, " "),
                shown(&r.ctilde, digits, " ")
            ));
            if three {
                out.push_str(&format!("  mirror {}", mirror(&r.pattern)));
            }
            out.push('\n');
        }
    }
    out
}

pub fn emit_tex(tables: &[PatternTable], digits: u32) -> String {
    let mut out = String::from("% pattern tables\n");
    for t in tables {
        let three = t.rows.first().is_some_and(|r| r.states.len() == 3);
        let notes = annotations(t);
        out.push_str(&format!("% piece {}\n", t.piece));
        out.push_str(if three {
            "\\begin{tabular}{|c|r|r|r|l|c|}\n\\hline\npattern & multiplicity & $c$ & $\\bar c$ & $\\tilde c$ & mirror \\\\\n\\hline\n"
        } else {
            "\\begin{tabular}{|c|r|r|r|l|}\n\\hline\npattern & multiplicity & $c$ & $\\bar c$ & $\\tilde c$ \\\\\n\\hline\n"
        });
        for (r, note) in t.rows.iter().zip(&notes) {
            let mut ct = shown(&r.ctilde, digits, "\\,");
            match note {
                Some("0") => ct.push_str("=0"),
                Some(n) => ct.push_str(&format!("\\ldots={n}")),
                None => {}
            }
            out.push_str(&format!(
                "{} & {} & {} & {} & ${ct}$",
                r.pattern,
                r.multiplicity,
                shown(&r.c, digits, "\\,"),
                shown(&r.cbar, digits, "\\,")
            ));
            if three {
                out.push_str(&format!(" & {}", mirror(&r.pattern)));
            }
            out.push_str(" \\\\\n");
        }
        out.push_str("\\hline\n\\end{tabular}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        assert_eq!(group("14027.752986494", "\\,"), "14\\,027.752\\,986\\,494");
        assert_eq!(group("-0.0000015", " "), "-0.000 001 5");
        assert_eq!(group("455", " "), "455");
    }
}
