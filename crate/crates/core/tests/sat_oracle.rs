use mwt_core::sat::embed::{embed_line, LineClause};
use mwt_core::sat::gadgets::disjunction_block;
use mwt_core::sat::io::{parse_1in3, parse_planar, write_1in3, write_planar};
use mwt_core::sat::random::random_planar_instance;
use mwt_core::sat::{
    brute_force_1in3, brute_force_1in3_with, brute_force_cnf, build_gadget, check_1in3, check_cnf,
    search_1in3, transform_instance, validate_embedding, Formula1in3, GadgetKind, Lit, Namer,
    Planar3SatInstance, Side,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

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

#[test]
fn gadget_projections() {
    let mut n = Namer::new(["x", "y", "z"]);
    let ne = build_gadget(GadgetKind::Inequality, "x", "y", &mut n).formula();
    let on = [ne.var("x").unwrap(), ne.var("y").unwrap()];
    assert_eq!(
        projection(&ne, &on),
        BTreeSet::from([vec![false, true], vec![true, false]])
    );

    let eq = build_gadget(GadgetKind::Equality, "x", "y", &mut n).formula();
    let on = [eq.var("x").unwrap(), eq.var("y").unwrap()];
    assert_eq!(
        projection(&eq, &on),
        BTreeSet::from([vec![false, false], vec![true, true]])
    );

    let or = disjunction_block("x", "y", "z", &mut n);
    assert!(or.vars.len() <= 24);
    let on = [
        or.var("x").unwrap(),
        or.var("y").unwrap(),
        or.var("z").unwrap(),
    ];
    let want: BTreeSet<Vec<bool>> = (1..8u32)
        .map(|b| (0..3).map(|i| b >> i & 1 == 1).collect())
        .collect();
    assert_eq!(projection(&or, &on), want);
}

fn lit(l: i32) -> Lit {
    Lit {
        var: l.unsigned_abs() as usize - 1,
        neg: l < 0,
    }
}

fn figure_formula() -> Planar3SatInstance {
    let clauses: Vec<Vec<Lit>> = [[1, -3, 5], [-1, 2, 3], [2, 4, -5]]
        .iter()
        .map(|c| c.iter().map(|&l| lit(l)).collect())
        .collect();
    let sides = [Side::Above, Side::Above, Side::Below];
    let lcs: Vec<LineClause> = clauses
        .iter()
        .zip(sides)
        .map(|(c, side)| LineClause {
            vars: c.iter().map(|l| l.var).collect(),
            side,
        })
        .collect();
    Planar3SatInstance {
        vars: (1..=5).map(|i| format!("x{i}")).collect(),
        clauses,
        embedding: embed_line(5, &[0, 1, 2, 3, 4], &lcs),
    }
}

fn equisatisfiable(inst: &Planar3SatInstance) -> bool {
    let t = transform_instance(inst).unwrap();
    assert!(t.formula.is_well_formed());
    assert!(validate_embedding(&t.embedding).is_valid());
    assert_eq!(t.embedding.clauses.len(), t.formula.clauses.len());
    let src = brute_force_cnf(inst.vars.len(), &inst.clauses).unwrap();
    let out = if t.formula.vars.len() <= 24 {
        let r = brute_force_1in3(&t.formula).unwrap();
        assert_eq!(r.satisfiable, search_1in3(&t.formula).is_some());
        r.witness
    } else {
        search_1in3(&t.formula)
    };
    assert_eq!(src.satisfiable, out.is_some(), "{}", write_planar(inst));
    if let Some(a) = out {
        assert!(check_1in3(&t.formula, &a));
        assert!(check_cnf(&inst.clauses, &t.decode(&a)));
    }
    src.satisfiable
}

#[test]
fn figure_formula_transforms() {
    let inst = figure_formula();
    assert!(inst.validate().is_valid());
    assert!(equisatisfiable(&inst));
}

#[test]
fn unit_and_contradiction() {
    let one = |clauses: Vec<Vec<Lit>>, sides: &[Side]| {
        let lcs: Vec<LineClause> = clauses
            .iter()
            .zip(sides)
            .map(|(c, &side)| LineClause {
                vars: c.iter().map(|l| l.var).collect(),
                side,
            })
            .collect();
        Planar3SatInstance {
            vars: vec!["x".into()],
            clauses,
            embedding: embed_line(1, &[0], &lcs),
        }
    };
    let t = transform_instance(&one(vec![vec![lit(1)]], &[Side::Above])).unwrap();
    assert!(t.formula.clauses.is_empty());
    assert_eq!(t.decode(&[]), vec![true]);
    let bad = one(
        vec![vec![lit(1)], vec![lit(-1)]],
        &[Side::Above, Side::Below],
    );
    assert!(!equisatisfiable(&bad));
    let t = transform_instance(&bad).unwrap();
    assert!(!brute_force_1in3(&t.formula).unwrap().satisfiable);
}

#[test]
fn random_instances_are_equisatisfiable() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=5);
        let inst = random_planar_instance(&mut rng, n, m);
        assert!(inst.validate().is_valid());
        if equisatisfiable(&inst) {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(sat > 0 && unsat > 0, "sat {sat} unsat {unsat}");
}

#[test]
fn search_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let n = rng.gen_range(3..=14);
        let m = rng.gen_range(1..=12);
        let clauses = (0..m)
            .map(|_| {
                rand::seq::index::sample(&mut rng, n, 3)
                    .into_vec()
                    .try_into()
                    .unwrap()
            })
            .collect();
        let f = Formula1in3 {
            vars: (0..n).map(|i| format!("v{i}")).collect(),
            clauses,
        };
        let a = search_1in3(&f);
        assert_eq!(a.is_some(), brute_force_1in3(&f).unwrap().satisfiable);
        if let Some(a) = a {
            assert!(check_1in3(&f, &a));
        }
    }
}

#[test]
fn files_round_trip() {
    let inst = figure_formula();
    let text = write_planar(&inst);
    assert_eq!(parse_planar(&text).unwrap(), inst);
    let t = transform_instance(&inst).unwrap();
    let text = write_1in3(&t.formula, &t.embedding);
    let (f, e) = parse_1in3(&text).unwrap();
    assert_eq!(f, t.formula);
    assert_eq!(e, t.embedding);
}

#[test]
fn broken_embeddings_are_rejected() {
    let mut inst = figure_formula();
    inst.embedding.legs[0].corners[1].0 += 1;
    assert!(!inst.validate().is_valid());
    assert!(transform_instance(&inst).is_err());
}
