use std::collections::BTreeMap;
use std::path::PathBuf;

use mwt_core::arith::{IntInterval, WORK_SCALE};
use mwt_core::geometry::Polygon;
use mwt_core::mwt::{brute_force_mwt, EdgeConstraint, MwtError};
use mwt_core::workshop::*;
use num_bigint::BigUint;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn designer() -> PieceCatalog {
    load_pieces(&std::fs::read_to_string(data("designer-pieces.txt")).unwrap()).unwrap()
}

const JUNCTION: &str = "\
piece junction
terminal small 0 0 0 L
part lower
10 -0.5
20 -0.5
terminal small 30 0 0 R
part east
21.2 11.5
terminal small 21.2 20 90 R
part west
10.5 11.5
";

fn flip(p: &str) -> String {
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

fn raw(i: &IntInterval) -> String {
    format!("{} {}", i.lo, i.hi)
}

/// One golden line per pattern or case: name, lo, hi (scale 15), multiplicity.
fn golden_lines(entries: &[(String, Option<IntInterval>, BigUint)]) -> String {
    entries
        .iter()
        .map(|(n, c, m)| format!("{n}|{}|{m}\n", c.as_ref().map_or("none".into(), raw)))
        .collect()
}

fn check_golden(file: &str, body: &str) {
    let path = data(&format!("golden/{file}"));
    if std::env::var_os("MWT_REGEN_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, body).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {file}"));
    assert_eq!(body, want, "golden {file} differs");
}

fn brute(poly: &Polygon, c: &EdgeConstraint) -> Option<(IntInterval, BigUint)> {
    match brute_force_mwt(poly, c) {
        Ok(r) => Some((r.optimal_cost, r.multiplicity)),
        Err(MwtError::NoFeasibleTriangulation) => None,
        Err(e) => panic!("{e}"),
    }
}

/// Angle test with floats, away from the threshold.
fn clearly_inside_lens(p: (f64, f64), q: (f64, f64), r: (f64, f64), beta: f64) -> bool {
    let a = (p.0 - r.0, p.1 - r.1);
    let b = (q.0 - r.0, q.1 - r.1);
    let ang = (a.0 * b.1 - a.1 * b.0).abs().atan2(a.0 * b.0 + a.1 * b.1);
    ang > (1.0 / beta).asin() + 0.01
}

fn f(p: (i64, i64)) -> (f64, f64) {
    (p.0 as f64 / 1e4, p.1 as f64 / 1e4)
}

#[test]
fn designer_set_passes_structural_checks() {
    let cat = designer();
    let w = cat.w().unwrap();
    assert!(validate_w(w).is_empty(), "{:?}", validate_w(w));
    let wire = cat.piece("wire").unwrap();
    assert_eq!(wire.terminals[1].apex.0 - wire.terminals[0].apex.0, 274_000);
    let rep = validate_piece(wire, Some(w));
    assert!(rep.passes(), "{:#?}", rep.log);
    assert!(rep.log.contains(
        &"The point set is symmetric with respect to the vertical axis x=13.7.".to_string()
    ));
    assert!(rep.log.contains(&"0 duplicate point(s).".to_string()));
    assert!(rep
        .log
        .iter()
        .any(|l| l.starts_with("All 12 boundary edges are in the 1.1806-skeleton")));
    let again = load_pieces(&write_piece(wire)).unwrap();
    assert_eq!(again.pieces[0].raw_points(), wire.raw_points());
    assert_eq!(again.pieces[0].items, wire.items);
}

#[test]
fn nudged_point_breaks_beta_certificate() {
    let cat = designer();
    let wire = cat.piece("wire").unwrap();
    let pts = wire.raw_points();
    let edges = wire.boundary_edges();
    let beta = 1.1806;
    let mut found = false;
    // smallest multiple of 0.5 that carries a part point into some lens
    'outer: for step in (5_000..=20_000).step_by(5_000) {
        for (pi, part) in wire.parts.iter().enumerate() {
            for (qi, &r) in part.points.iter().enumerate() {
                for &(a, b) in &edges {
                    let (p, q) = (pts[a], pts[b]);
                    if p == r || q == r {
                        continue;
                    }
                    let mid = ((p.0 + q.0) / 2, (p.1 + q.1) / 2);
                    let (dx, dy) = ((mid.0 - r.0) as f64, (mid.1 - r.1) as f64);
                    let len = (dx * dx + dy * dy).sqrt();
                    let moved = (
                        r.0 + (step as f64 * dx / len).round() as i64,
                        r.1 + (step as f64 * dy / len).round() as i64,
                    );
                    if !clearly_inside_lens(f(p), f(q), f(moved), beta) {
                        continue;
                    }
                    let mut bad = wire.clone();
                    bad.parts[pi].points[qi] = moved;
                    let rep = validate_piece(&bad, None);
                    let bp = bad.raw_points();
                    assert!(
                        rep.beta
                            .violators
                            .iter()
                            .any(|&(i, j)| (bp[i], bp[j]) == (p, q) || (bp[i], bp[j]) == (q, p)),
                        "{:?}",
                        rep.log
                    );
                    assert!(!rep.passes());
                    found = true;
                    break 'outer;
                }
            }
        }
    }
    assert!(found, "no point of the wire reaches a lens within 2");
}

#[test]
fn missing_w_point_is_reported() {
    let cat = designer();
    let mut wire = cat.piece("wire").unwrap().clone();
    let gone = wire.parts[0].points.remove(0);
    let rep = validate_piece(&wire, cat.w());
    assert_eq!(rep.w_copies[0].as_ref().unwrap(), &vec![gone]);
    assert!(rep.w_copies[1].as_ref().unwrap().is_empty());
    assert!(!rep.passes());
}

#[test]
fn five_decimals_are_rejected_with_line() {
    let text = std::fs::read_to_string(data("designer-pieces.txt")).unwrap();
    let text = text.replace("\n8.5 -7.5\n", "\n8.50001 -7.5\n");
    let line = text.lines().position(|l| l.starts_with("8.50001")).unwrap() + 1;
    match load_pieces(&text) {
        Err(WorkshopError::MalformedFile { line: l, .. }) => assert_eq!(l, line),
        other => panic!("{other:?}"),
    }
}

fn table_golden(name: &str, p: &Piece) -> PatternTable {
    let t = analyze_piece(p).unwrap();
    let mut entries = Vec::new();
    for row in &t.rows {
        let poly = Polygon::new(
            p.pattern_polygon(&row.states)
                .into_iter()
                .map(to_point)
                .collect(),
        );
        assert_eq!(poly, row.polygon);
        let (c, m) = brute(&poly, &EdgeConstraint::none()).unwrap();
        assert_eq!(
            (&c, &m),
            (&row.c, &row.multiplicity),
            "pattern {}",
            row.pattern
        );
        entries.push((row.pattern.clone(), Some(c), m));
    }
    check_golden(name, &golden_lines(&entries));
    t
}

#[test]
fn wire_table_matches_brute_force() {
    let cat = designer();
    let wire = cat.piece("wire").unwrap();
    let t = table_golden("designer-wire.txt", wire);
    let names: Vec<&str> = t.rows.iter().map(|r| r.pattern.as_str()).collect();
    assert_eq!(names, ["LL", "LR", "RL", "RR"]);
    let d2 = Size::Small.delta().mul_int(2).rescale(WORK_SCALE);
    let row = |s: &str| t.row(s).unwrap();
    assert_eq!(row("LR").cbar, row("LR").c.sub_scaled(&d2));
    assert_eq!(row("RL").cbar, row("RL").c.add_scaled(&d2));
    assert_eq!(row("LL").cbar, row("LL").c);
    assert_eq!(row("LL").c, row("RR").c);
    assert_eq!(row("LL").ctilde, row("RR").ctilde);
    let min = t.rows.iter().map(|r| r.cbar.lo.clone()).min().unwrap();
    assert!(t
        .rows
        .iter()
        .any(|r| r.cbar.lo == min && r.ctilde.lo == 0.into()));
    assert!(t.rows.iter().all(|r| r.ctilde.lo >= 0.into()));
}

#[test]
fn junction_table_matches_brute_force() {
    let cat = load_pieces(JUNCTION).unwrap();
    let p = &cat.pieces[0];
    let rep = validate_piece(p, None);
    assert!(rep.bad_patterns.is_empty(), "{:?}", rep.log);
    let t = table_golden("designer-junction.txt", p);
    assert_eq!(t.rows.len(), 8);
    assert_eq!(t.rows[1].pattern, "LLR");
    assert_eq!(t.rows[1].polygon.len(), 12);
}

#[test]
fn mirror_image_relabels_the_table() {
    for p in [
        designer().piece("wire").unwrap().clone(),
        load_pieces(JUNCTION).unwrap().pieces[0].clone(),
    ] {
        let m = p.mirrored();
        assert!(validate_piece(&m, None).bad_patterns.is_empty());
        let (a, b) = (analyze_piece(&p).unwrap(), analyze_piece(&m).unwrap());
        for r in &a.rows {
            let s = b.row(&flip(&r.pattern)).unwrap();
            assert_eq!(
                (&r.c, &r.cbar, &r.ctilde, &r.multiplicity),
                (&s.c, &s.cbar, &s.ctilde, &s.multiplicity),
                "{} {}",
                p.name,
                r.pattern
            );
        }
    }
}

#[test]
fn shared_terminal_bookkeeping_telescopes() {
    let cat = designer();
    let a = cat.piece("wire").unwrap().clone();
    // the next wire in the chain shares a's right terminal
    let mut text = write_piece(&a);
    text = text.replace("piece wire", "piece next");
    let mut b = load_pieces(&text).unwrap().pieces.remove(0);
    for part in &mut b.parts {
        for q in &mut part.points {
            q.0 += 274_000;
        }
    }
    for t in &mut b.terminals {
        t.apex.0 += 274_000;
    }
    assert_eq!(a.terminals[1].apex, b.terminals[0].apex);
    assert_ne!(a.terminals[1].area, b.terminals[0].area);
    let ta = analyze_piece(&a).unwrap();
    let tb = analyze_piece(&b).unwrap();
    let d2 = Size::Small.delta().mul_int(2).rescale(WORK_SCALE);
    for ra in &ta.rows {
        for rb in tb.rows.iter().filter(|r| r.states[0] == ra.states[1]) {
            let sum = |c: Convention| {
                reduced_cost(&a, &ra.states, &ra.c, c).add(&reduced_cost(&b, &rb.states, &rb.c, c))
            };
            let raw = ra.c.add(&rb.c);
            // only the two outer terminals move the total
            let outer = [
                (&a.terminals[0], ra.states[0]),
                (&b.terminals[1], rb.states[1]),
            ];
            let mut want = raw.clone();
            for (t, s) in outer {
                want = if s == t.area {
                    want.sub_scaled(&t.delta().rescale(WORK_SCALE))
                } else {
                    want.add_scaled(&t.delta().rescale(WORK_SCALE))
                };
            }
            assert_eq!(sum(Convention::Standard), want);
            // swapping the convention moves each outer terminal by exactly 2δ
            let mut swapped = want.clone();
            for (t, s) in outer {
                swapped = if s == t.area {
                    swapped.add_scaled(&d2)
                } else {
                    swapped.sub_scaled(&d2)
                };
            }
            assert_eq!(sum(Convention::Swapped), swapped);
            assert_eq!(
                reduced_cost(&a, &ra.states, &ra.c, Convention::Standard),
                ra.cbar
            );
        }
    }
}

#[test]
fn terminal_lemma_matches_brute_force() {
    let cat = designer();
    let w = cat.w().unwrap();
    let rep = check_terminal_lemma(w).unwrap();
    assert_eq!(rep.cases.len(), 6);
    let mut entries = Vec::new();
    for c in &rep.cases {
        let n = c.polygon.len();
        let x = c.labels.iter().position(|l| l == "x").unwrap();
        let y = c.labels.iter().position(|l| l == "y").unwrap();
        let z = c.labels.iter().position(|l| l == "z").unwrap();
        assert!(
            c.labels.contains(&format!("v{}", c.i)) && c.labels.contains(&format!("v{}'", c.j))
        );
        assert!(n <= 13);
        let (u, m) = brute(&c.polygon, &EdgeConstraint::none()).unwrap();
        assert_eq!((&u, &m), (&c.unrestricted, &c.multiplicity));
        assert!(c.witness.has_edge(x, y) || c.witness.has_edge(x, z));
        let r = brute(&c.polygon, &EdgeConstraint::forbid(&[(x, y), (x, z)]));
        assert_eq!(r.as_ref().map(|r| &r.0), c.restricted.as_ref());
        let gap = r.as_ref().map(|r| &r.0.lo - &u.hi);
        assert_eq!(gap, c.gap.as_ref().map(|g| g.value.clone()));
        assert!(gap.is_none_or(|g| g > 0.into()));
        entries.push((format!("{} unrestricted", c.name()), Some(u), m));
        entries.push((
            format!("{} restricted", c.name()),
            r.map(|r| r.0),
            BigUint::from(1u32),
        ));
    }
    check_golden("designer-w.txt", &golden_lines(&entries));
    let worst = rep
        .cases
        .iter()
        .filter_map(|c| c.gap.clone())
        .min()
        .unwrap();
    assert_eq!(rep.gap_min, Some(worst));
    assert_eq!(
        rep.e_max,
        rep.cases.iter().map(|c| c.polygon.len() - 3).max().unwrap()
    );
    assert!(rep.margin_ok);
    assert!(rep.log[0].starts_with("Case v1, v1': difference ="));
    assert!(rep.log.last().unwrap().starts_with("Perturbation margin: "));
}

#[test]
fn lemma_failure_is_reported() {
    let cat = designer();
    let mut w = cat.w().unwrap().clone();
    // t1 and t1' right above x make the terminal edges avoidable
    for (l, p) in [("t1", (-10_000, 60_000)), ("t1'", (10_000, 60_000))] {
        let i = w.index(l).unwrap();
        w.points[i] = p;
    }
    assert!(validate_w(&w).is_empty());
    match check_terminal_lemma(&w) {
        Err(WorkshopError::LemmaFails(case, _)) => assert!(case.starts_with("v1")),
        other => panic!("{other:?}"),
    }
}

/// The coordinate archive for the published pieces is not shipped; point
/// `MWT_PIECE_ARCHIVE` at a file in the coordinate format to run these.
#[test]
fn archive_numbers_when_present() {
    let Some(path) = std::env::var_os("MWT_PIECE_ARCHIVE") else {
        eprintln!("MWT_PIECE_ARCHIVE not set, skipping");
        return;
    };
    let cat = load_pieces(&std::fs::read_to_string(path).unwrap()).unwrap();
    let ext = cat.piece("extended-wire").expect("piece extended-wire");
    assert_eq!(ext.terminals[1].apex.0 - ext.terminals[0].apex.0, 822_100);
    let rep = validate_piece(ext, cat.w());
    assert!(rep.passes());
    assert!(rep
        .log
        .iter()
        .any(|l| l == "The point set is symmetric with respect to the vertical axis x=0.005."));
    assert!(rep
        .log
        .iter()
        .any(|l| l.starts_with("cos(alpha)^2 = 3120343/10000000")));
    let t = analyze_piece(ext).unwrap();
    let want: BTreeMap<&str, &str> = [
        ("LL", "455.471523435"),
        ("LR", "466.990265006"),
        ("RL", "444.283180745"),
        ("RR", "455.471523435"),
    ]
    .into();
    for (p, v) in want {
        assert_eq!(t.row(p).unwrap().c.display_string(9), v);
    }
    assert_eq!(t.row("LR").unwrap().cbar.display_string(9), "455.679921006");
    assert_eq!(t.row("LR").unwrap().multiplicity, BigUint::from(2u32));
    for p in &cat.pieces {
        assert!(validate_piece(p, cat.w()).passes(), "{}", p.name);
        let t = analyze_piece(p).unwrap();
        if t.rows.len() == 4 {
            let d3 = IntInterval::from_decimal("0.01", WORK_SCALE).unwrap();
            let e1 = IntInterval::from_decimal("0.000051", WORK_SCALE).unwrap();
            for r in &t.rows {
                let mixed = r.states[0] != r.states[1];
                if mixed {
                    assert!(r.ctilde.lo >= d3.lo, "{} {}", p.name, r.pattern);
                } else {
                    assert!(r.ctilde.hi < e1.lo, "{} {}", p.name, r.pattern);
                }
            }
        }
    }
    if let Some(c) = cat.piece("C") {
        let t = analyze_piece(c).unwrap();
        assert_eq!(t.row("RRl").unwrap().ctilde.display_string(9), "0");
        assert!(t
            .row("LLr")
            .unwrap()
            .ctilde
            .display_string(9)
            .starts_with("0.000001575"));
        assert!(t
            .row("LLl")
            .unwrap()
            .ctilde
            .display_string(9)
            .starts_with("0.003861076"));
        assert!(t
            .row("RRr")
            .unwrap()
            .ctilde
            .display_string(9)
            .starts_with("0.004630878"));
    }
    let lemma = check_terminal_lemma(cat.w().unwrap()).unwrap();
    assert_eq!(lemma.cases.len(), 21);
    assert!(lemma.log.iter().any(|l| l == "4.00304"));
    assert_eq!(lemma.worst.as_deref(), Some("v5, v5'"));
    assert!(lemma
        .log
        .iter()
        .any(|l| l.starts_with("Smallest difference 3.83677")));
    assert_eq!(lemma.margin.to_canonical(), "1.44");
    assert!(lemma.margin_ok);
}
