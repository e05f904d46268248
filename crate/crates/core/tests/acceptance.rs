//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use mwt_core::arith::{interval_isqrt, parse_fixed_decimal, IntInterval, ScaledInt, WORK_SCALE};
use mwt_core::geometry::{edge_length, validate_simple_polygon, Point, Polygon};
use mwt_core::layout::*;
use mwt_core::mwt::{brute_force_mwt, polygon_mwt, EdgeConstraint};
use mwt_core::sat::gadgets::disjunction_block;
use mwt_core::sat::random::random_planar_instance;
use mwt_core::sat::{
    brute_force_1in3, brute_force_1in3_with, brute_force_cnf, build_gadget, check_1in3, check_cnf,
    embed_line, search_1in3, transform_instance, Formula1in3, GadgetKind, LineClause, Namer, Side,
};
use mwt_core::skeleton::beta_skeleton_certify;
use mwt_core::workshop::*;
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

/// Star-shaped polygon from random lattice points sorted by angle.
fn random_simple_polygon(rng: &mut ChaCha8Rng, n: usize, span: i64) -> Option<Polygon> {
    let mut pts: Vec<(i64, i64)> = (0..n)
        .map(|_| (rng.gen_range(-span..=span), rng.gen_range(-span..=span)))
        .collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() != n {
        return None;
    }
    let cx: i64 = pts.iter().map(|p| p.0).sum::<i64>() * 2 / n as i64 + 1;
    let cy: i64 = pts.iter().map(|p| p.1).sum::<i64>() * 2 / n as i64 + 1;
    let mut dbl: Vec<(i64, i64)> = pts.iter().map(|&(x, y)| (2 * x - cx, 2 * y - cy)).collect();
    dbl.sort_by(|a, b| {
        let ha = a.1 < 0 || (a.1 == 0 && a.0 < 0);
        let hb = b.1 < 0 || (b.1 == 0 && b.0 < 0);
        ha.cmp(&hb)
            .then_with(|| 0i128.cmp(&(a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128)))
    });
    let poly = Polygon::from_ints(&dbl, 0);
    validate_simple_polygon(&poly).is_valid().then_some(poly)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let (mut done, mut ties, mut degenerate) = (0, 0, 0);
    while done < 1000 {
        let n = rng.gen_range(5..=12);
        let span = [3, 20, 1000][done % 3];
        let Some(poly) = random_simple_polygon(&mut rng, n, span) else {
            continue;
        };
        let a = polygon_mwt(&poly, &EdgeConstraint::none());
        let b = brute_force_mwt(&poly, &EdgeConstraint::none());
        match (&a, &b) {
            (Ok(a), Ok(b)) => {
                ensure(
                    a.optimal_cost == b.optimal_cost && a.multiplicity == b.multiplicity,
                    || format!("{poly:?}: {a:?} vs {b:?}"),
                )?;
                ties += usize::from(a.multiplicity > BigUint::from(1u32));
                degenerate += usize::from(a.candidates_degenerate);
            }
            (Err(x), Err(y)) => ensure(x == y, || format!("{poly:?}: {x} vs {y}"))?,
            _ => return Err(format!("{poly:?}: {a:?} vs {b:?}")),
        }
        done += 1;
    }
    Ok(format!("{done} polygons, {ties} with ties, {degenerate} with degenerate candidates"))
}

fn random_big(rng: &mut ChaCha8Rng) -> BigInt {
    let bits = rng.gen_range(1..=256u32);
    let limbs: Vec<u64> = (0..bits.div_ceil(64)).map(|_| rng.gen()).collect();
    let mut v = BigInt::from(0);
    for l in limbs {
        v = (v << 64) + l;
    }
    v >> (bits.div_ceil(64) * 64 - bits)
}

fn arithmetic_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut exact = 0;
    for i in 0..1_000_000u32 {
        let n = match i % 4 {
            0 => {
                let r = random_big(&mut rng) >> 128u32;
                &r * &r + BigInt::from(rng.gen_range(-1i64..=1)).max(-(&r * &r))
            }
            _ => random_big(&mut rng),
        };
        let iv = interval_isqrt(&n).map_err(|e| e.to_string())?;
        let s = &iv.lo;
        ensure(s * s <= n && (s + 1u32) * (s + 1u32) > n, || format!("isqrt({n}) = {iv:?}"))?;
        let square = s * s == n;
        ensure(
            iv.hi == if square { s.clone() } else { s + 1u32 },
            || format!("isqrt({n}) upper end {iv:?}"),
        )?;
        exact += usize::from(square);
    }
    for k in [1i64, 7, 12_345, 999_999_999] {
        for scale in [0u32, 4, 9] {
            let p = Point::from_ints(-k, 2 * k, scale);
            let q = Point::from_ints(-k + 3 * k, 2 * k - 4 * k, scale);
            for out in [scale, scale + 6, 15] {
                let l = edge_length(&p, &q, out);
                let want = BigInt::from(5 * k) * BigInt::from(10).pow(out - scale);
                ensure(l.lo == want && l.hi == want, || format!("3-4-5 k={k}: {l:?}"))?;
            }
        }
    }
    Ok(format!("1000000 isqrt calls ({exact} perfect squares), 3-4-5 lengths exact"))
}

fn projection(f: &Formula1in3, on: &[usize]) -> BTreeSet<Vec<bool>> {
    let mut out = BTreeSet::new();
    for bits in 0..1u32 << on.len() {
        let fixed: Vec<(usize, bool)> = on
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, bits >> i & 1 == 1))
            .collect();
        if brute_force_1in3_with(f, &fixed).unwrap().satisfiable {
            out.insert(fixed.iter().map(|f| f.1).collect());
        }
    }
    out
}

fn sat_layer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=5);
        let inst = random_planar_instance(&mut rng, n, m);
        ensure(inst.validate().is_valid(), || "random instance is not planar".into())?;
        let t = transform_instance(&inst).map_err(|e| e.to_string())?;
        let src = brute_force_cnf(inst.vars.len(), &inst.clauses).map_err(|e| e.to_string())?;
        let searched = search_1in3(&t.formula);
        if t.formula.vars.len() <= 24 {
            let full = brute_force_1in3(&t.formula).map_err(|e| e.to_string())?;
            ensure(full.satisfiable == searched.is_some(), || "1-in-3 oracles disagree".into())?;
        }
        ensure(src.satisfiable == searched.is_some(), || {
            format!("satisfiability changed for {:?}", inst.clauses)
        })?;
        if let Some(a) = &searched {
            ensure(check_1in3(&t.formula, a) && check_cnf(&inst.clauses, &t.decode(a)), || {
                "decoded witness fails".into()
            })?;
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    ensure(sat > 0 && unsat > 0, || format!("only one outcome seen: {sat}/{unsat}"))?;

    let mut n = Namer::new(["x", "y", "z"]);
    let ne = build_gadget(GadgetKind::Inequality, "x", "y", &mut n).formula();
    let on = [ne.var("x").unwrap(), ne.var("y").unwrap()];
    ensure(
        projection(&ne, &on) == BTreeSet::from([vec![false, true], vec![true, false]]),
        || "inequality gadget projection".into(),
    )?;
    let eq = build_gadget(GadgetKind::Equality, "x", "y", &mut n).formula();
    let on = [eq.var("x").unwrap(), eq.var("y").unwrap()];
    ensure(
        projection(&eq, &on) == BTreeSet::from([vec![false, false], vec![true, true]]),
        || "equality gadget projection".into(),
    )?;
    let or = disjunction_block("x", "y", "z", &mut n);
    let on = [or.var("x").unwrap(), or.var("y").unwrap(), or.var("z").unwrap()];
    let want: BTreeSet<Vec<bool>> = (1..8u32)
        .map(|b| (0..3).map(|i| b >> i & 1 == 1).collect())
        .collect();
    ensure(projection(&or, &on) == want, || "disjunction block projection".into())?;
    Ok(format!("200 instances ({sat} satisfiable, {unsat} not), gadget projections exact"))
}

fn wire_arithmetic() -> Outcome {
    let mut cases = 0;
    for z in 22_514_580..=22_600_000i64 {
        let plan = straight_connection(&hundredths(z)).map_err(|e| format!("{z}: {e}"))?;
        let sum = plan.count(PieceKind::Wire) as i64 * WIRE_SPAN
            + plan.count(PieceKind::ExtendedWire) as i64 * EXTENDED_SPAN;
        ensure(sum == z && plan.end == (z, 0), || format!("{z} re-sums to {sum}"))?;
        cases += 1;
    }
    let plan = straight_connection(&hundredths(22_514_580)).unwrap();
    ensure(
        plan.count(PieceKind::ExtendedWire) == 0 && plan.count(PieceKind::Wire) == 8217,
        || "bound split".into(),
    )?;
    for z in [0, 2740, 8221, 1_000_000, 22_514_579] {
        ensure(
            matches!(straight_connection(&hundredths(z)), Err(LayoutError::TooShort { .. })),
            || format!("{z} accepted"),
        )?;
    }
    Ok(format!("{cases} lengths re-sum exactly; bound gives 0 extended, 8217 plain"))
}

fn line_embedding(f: &Formula1in3, sides: &[Side]) -> mwt_core::sat::RectilinearEmbedding {
    let order: Vec<usize> = (0..f.vars.len()).collect();
    let cl: Vec<LineClause> = f
        .clauses
        .iter()
        .zip(sides)
        .map(|(c, &side)| LineClause {
            vars: c.to_vec(),
            side,
        })
        .collect();
    embed_line(f.vars.len(), &order, &cl)
}

fn one_clause() -> Formula1in3 {
    Formula1in3 {
        vars: ["a", "b", "c"].map(String::from).to_vec(),
        clauses: vec![[0, 1, 2]],
    }
}

fn clause_logic() -> Outcome {
    let cm = CostModel::published();
    let consts = [
        (cm.eps2(), "0.000001575"),
        (cm.delta1(), "0.003861076"),
        (cm.delta2(), "0.004630878"),
        (DELTA3, "0.01"),
        (DELTA4, "0.0007"),
    ];
    for (v, text) in consts {
        ensure(nano(v) == parse_fixed_decimal(text, 9).unwrap(), || format!("constant {text}"))?;
    }
    let f = one_clause();
    let g = build_network(&f, &line_embedding(&f, &[Side::Above]), &Dims::proof())
        .map_err(|e| e.to_string())?;
    let cases = clause_case_costs(&g, &cm, 0);
    let base = cases.iter().map(|c| c.1).min().unwrap();
    let one = cm.delta1() + 3 * cm.eps2();
    let two = cm.delta2() + 2 * cm.eps2();
    let mut levels = BTreeMap::new();
    for (s, c) in &cases {
        let ls = s.iter().filter(|&&x| x == State::L).count();
        let rel = c - base + one;
        let ok = match ls {
            1 => rel == one,
            2 => rel == two,
            _ => rel > DELTA3,
        };
        ensure(ok, || format!("case {s:?}: relative cost {rel}"))?;
        levels.entry(ls).or_insert(rel);
    }
    ensure(one < 3_900_000 && 3_900_000 < two && two < 5_000_000, || "ranking".into())?;
    ensure(two - one >= DELTA4, || format!("gap {}", two - one))?;
    Ok(format!(
        "one L {}, two L {}, uniform > {}; gap {} >= {}",
        nano(one).to_canonical(),
        nano(two).to_canonical(),
        nano(DELTA3).to_canonical(),
        nano(two - one).to_canonical(),
        nano(DELTA4).to_canonical()
    ))
}

fn golden(file: &str) -> Result<Vec<(String, String, String)>, String> {
    let text = std::fs::read_to_string(data(&format!("golden/{file}"))).map_err(|e| e.to_string())?;
    Ok(text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('|').collect();
            (f[0].to_string(), f[1].to_string(), f[2].to_string())
        })
        .collect())
}

fn raw(i: &Option<IntInterval>) -> String {
    i.as_ref().map_or("none".into(), |i| format!("{} {}", i.lo, i.hi))
}

fn brute_pair(poly: &Polygon, c: &EdgeConstraint) -> Option<(IntInterval, BigUint)> {
    brute_force_mwt(poly, c).ok().map(|r| (r.optimal_cost, r.multiplicity))
}

fn piece_pipeline(cat: &PieceCatalog) -> Result<usize, String> {
    let beta = parse_fixed_decimal("1.1806", 9).unwrap();
    let mut edges = 0;
    for p in &cat.pieces {
        let rep = validate_piece(p, cat.w());
        ensure(rep.passes(), || format!("{}: {:?}", p.name, rep.log))?;
        let cert = beta_skeleton_certify(&p.boundary_edges(), &p.points(), &beta);
        ensure(cert.violators.is_empty(), || format!("{} below beta", p.name))?;
        edges += p.boundary_edges().len();
    }
    Ok(edges)
}

fn archive_numbers(path: &std::ffi::OsStr) -> Outcome {
    let cat = load_pieces(&std::fs::read_to_string(path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let edges = piece_pipeline(&cat)?;
    let ext = cat.piece("extended-wire").ok_or("no extended-wire piece")?;
    let rep = validate_piece(ext, cat.w());
    ensure(rep.log.iter().any(|l| l.starts_with("cos(alpha)^2 = 3120343/10000000")), || {
        "binding edge of the extended wire".into()
    })?;
    let t = analyze_piece(ext).map_err(|e| e.to_string())?;
    for (p, v) in [
        ("LL", "455.471523435"),
        ("LR", "466.990265006"),
        ("RL", "444.283180745"),
        ("RR", "455.471523435"),
    ] {
        let got = t.row(p).unwrap().c.display_string(9);
        ensure(got == v, || format!("extended wire {p}: {got}"))?;
    }
    if let Some(c) = cat.piece("C") {
        let t = analyze_piece(c).map_err(|e| e.to_string())?;
        for (p, v) in [("LLr", "0.000001575"), ("LLl", "0.003861076"), ("RRr", "0.004630878")] {
            let got = t.row(p).unwrap().ctilde.display_string(9);
            ensure(got.starts_with(v), || format!("C {p}: {got}"))?;
        }
    }
    let lemma = check_terminal_lemma(cat.w().ok_or("no point set W")?).map_err(|e| e.to_string())?;
    ensure(lemma.log.iter().any(|l| l == "4.00304"), || "gap 4.00304".into())?;
    ensure(
        lemma.log.iter().any(|l| l.starts_with("Smallest difference 3.83677")),
        || "gap 3.83677".into(),
    )?;
    ensure(lemma.margin.to_canonical() == "1.44" && lemma.margin_ok, || "margin".into())?;
    Ok(format!("archive: {} pieces, {edges} boundary edges certified", cat.pieces.len()))
}

fn designer_numbers() -> Outcome {
    let text = std::fs::read_to_string(data("designer-pieces.txt")).map_err(|e| e.to_string())?;
    let cat = load_pieces(&text).map_err(|e| e.to_string())?;
    let edges = piece_pipeline(&cat)?;
    let wire = cat.piece("wire").ok_or("no wire piece")?;
    let t = analyze_piece(wire).map_err(|e| e.to_string())?;
    let want = golden("designer-wire.txt")?;
    ensure(want.len() == t.rows.len(), || "wire golden length".into())?;
    for (row, (name, iv, mult)) in t.rows.iter().zip(&want) {
        let (c, m) = brute_pair(&row.polygon, &EdgeConstraint::none()).ok_or("no triangulation")?;
        ensure(c == row.c && m == row.multiplicity, || format!("wire {name} vs brute force"))?;
        ensure(
            &row.pattern == name && &raw(&Some(row.c.clone())) == iv && &row.multiplicity.to_string() == mult,
            || format!("wire {name} vs golden"),
        )?;
    }
    let w = cat.w().ok_or("no point set W")?;
    let rep = check_terminal_lemma(w).map_err(|e| e.to_string())?;
    let want = golden("designer-w.txt")?;
    ensure(want.len() == 2 * rep.cases.len(), || "W golden length".into())?;
    for (c, pair) in rep.cases.iter().zip(want.chunks(2)) {
        ensure(
            pair[0].0 == format!("{} unrestricted", c.name())
                && pair[0].1 == raw(&Some(c.unrestricted.clone()))
                && pair[0].2 == c.multiplicity.to_string()
                && pair[1].1 == raw(&c.restricted),
            || format!("case {} vs golden", c.name()),
        )?;
    }
    ensure(rep.margin_ok, || "perturbation margin".into())?;
    let smallest = rep.gap_min.as_ref().map(|g| g.to_canonical()).unwrap_or_default();
    Ok(format!(
        "designer set: {} pieces, {edges} boundary edges at beta 1.1806, wire table and {} cases match goldens, smallest difference {smallest}",
        cat.pieces.len(),
        rep.cases.len()
    ))
}

fn piece_numbers() -> Outcome {
    match std::env::var_os("MWT_PIECE_ARCHIVE") {
        Some(p) => archive_numbers(&p),
        None => designer_numbers().map(|s| format!("{s} (coordinate archive absent)")),
    }
}

fn reduction_audit() -> Outcome {
    let f = one_clause();
    let e = line_embedding(&f, &[Side::Above]);
    let g = build_network(&f, &e, &Dims::proof()).map_err(|e| e.to_string())?;
    let out = emit_reduction(&g, &f, &BTreeMap::new(), &CostModel::published()).map_err(|e| e.to_string())?;
    let a = audit_layout(&g, Some(&out));
    ensure(a.passes(), || format!("proof audit: {:?}", a.log))?;

    let text = std::fs::read_to_string(data("designer-pieces.txt")).map_err(|e| e.to_string())?;
    let cat = load_pieces(&text).map_err(|e| e.to_string())?;
    let geo = BTreeMap::from([(PieceKind::Wire, cat.piece("wire").unwrap().clone())]);
    let gm = build_network(&f, &e, &Dims::mini()).map_err(|e| e.to_string())?;
    let mini = emit_reduction(&gm, &f, &geo, &CostModel::published()).map_err(|e| e.to_string())?;
    let side = mini.sidecar();
    let sep = &side["separation"];
    let read = |k: &str| -> Result<ScaledInt, String> {
        let s = sep[k].as_str().ok_or(format!("sidecar lacks {k}"))?;
        parse_fixed_decimal(s, WORK_SCALE).map_err(|e| e.to_string())
    };
    let gap = read("violating_min")?.sub(&read("satisfying_min")?);
    ensure(gap.value >= nano(DELTA4).rescale(WORK_SCALE).value, || {
        format!("separation {}", gap.to_canonical())
    })?;
    Ok(format!(
        "proof network: {} pieces audited; mini separation {} >= {}",
        out.piece_count,
        gap.to_canonical(),
        nano(DELTA4).to_canonical()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("arithmetic soundness", arithmetic_soundness),
        ("sat layer", sat_layer),
        ("wire arithmetic", wire_arithmetic),
        ("clause logic", clause_logic),
        ("piece numbers", piece_numbers),
        ("reduction audit", reduction_audit),
    ];
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
                    (r, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (r, secs))) in criteria.iter().zip(&results).enumerate() {
        match r {
            Ok(msg) => println!("criterion {} ({name}): PASS in {secs:.1}s: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL in {secs:.1}s: {msg}", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
