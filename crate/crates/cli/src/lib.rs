//! Command-line front end: verification subcommands, reports and figures.

pub mod config;
pub mod figure;
pub mod table;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use mwt_core::arith::{parse_fixed_decimal, COORD_SCALE};
use mwt_core::geometry::{validate_simple_polygon, Point, Polygon};
use mwt_core::layout::{
    audit_layout, build_network, emit_reduction, CostModel, Dims, GadgetGraph, Mode, PieceKind,
    ReductionOutput,
};
use mwt_core::mwt::{polygon_mwt_at, EdgeConstraint};
use mwt_core::sat::io::{parse_1in3, parse_planar, write_1in3};
use mwt_core::sat::{transform_instance, Formula1in3, RectilinearEmbedding};
use mwt_core::skeleton::{beta_skeleton_certify, diamond_outcome, BaseAngle};
use mwt_core::workshop::{
    analyze_piece, check_terminal_lemma, load_pieces, to_point, validate_piece, PieceCatalog,
    WorkshopError,
};

pub use config::RunConfig;
pub use figure::FigureDoc;

#[derive(Debug, Parser)]
#[command(name = "mwt", version, about = "Exact checks for minimum-weight triangulation gadgets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct Global {
    /// Fraction digits of interval arithmetic.
    #[arg(long, global = true, default_value_t = 15)]
    precision: u32,
    /// Fraction digits in reports.
    #[arg(long, global = true, default_value_t = 9)]
    display: u32,
    /// β-skeleton threshold.
    #[arg(long, global = true, default_value = "1.1806")]
    beta: String,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Mini)]
    mode: ModeArg,
    /// Worker threads; MWT_WORKERS takes precedence.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Proof,
    Mini,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AngleArg {
    /// π/4.6
    Improved,
    /// π/8
    Original,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Optimal triangulation of a simple polygon.
    PolygonMwt {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// β-skeleton certificate for polygon or piece boundaries.
    BetaCheck {
        #[arg(long, conflicts_with = "pieces", required_unless_present = "pieces")]
        poly: Option<PathBuf>,
        #[arg(long)]
        pieces: Option<PathBuf>,
    },
    /// Diamond test for one edge or all pairs of a point list.
    Diamond {
        #[arg(long)]
        points: PathBuf,
        /// Two point indices, `i,j`.
        #[arg(long)]
        edge: Option<String>,
        #[arg(long, value_enum, default_value_t = AngleArg::Improved)]
        angle: AngleArg,
    },
    /// Structural checks of pieces.
    VerifyPiece {
        #[arg(long)]
        pieces: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Pattern tables of pieces.
    AnalyzePiece {
        #[arg(long)]
        piece: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        tex: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Case analysis of the terminal point set.
    CheckW {
        #[arg(long)]
        data: PathBuf,
        /// Directory for one SVG per case with its optimal triangulation.
        #[arg(long)]
        figures: Option<PathBuf>,
    },
    /// Planar 3-SAT to positive planar 1-in-3 SAT.
    SatReduce {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Gadget network, point set and weight threshold.
    Layout {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Piece file with geometry for straight pieces.
        #[arg(long)]
        pieces: Option<PathBuf>,
    },
    /// Structural audit of a reduction.
    Audit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        pieces: Option<PathBuf>,
    },
}

/// Exit status with a message for the error stream.
#[derive(Debug)]
enum Fail {
    /// Verification failed.
    Check(String),
    /// Bad input or usage.
    Usage(String),
}

type Res = Result<(), Fail>;

fn usage(e: impl std::fmt::Display) -> Fail {
    Fail::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Res {
    std::fs::write(path, text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Fail {
    Fail::Usage(e.to_string())
}

/// Run with the given arguments; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let g = &cli.global;
    let mode = match g.mode {
        ModeArg::Proof => Mode::Proof,
        ModeArg::Mini => Mode::Mini,
    };
    let cfg = match RunConfig::new(g.precision, g.display, &g.beta, mode, g.workers) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    cfg.apply_workers();
    let res = dispatch(&cli.cmd, &cfg, out, err);
    match res {
        Ok(()) => 0,
        Err(Fail::Check(m)) => {
            let _ = writeln!(err, "FAIL: {m}");
            1
        }
        Err(Fail::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn dispatch(cmd: &Cmd, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Res {
    match cmd {
        Cmd::PolygonMwt { poly, svg } => polygon_cmd(poly, svg.as_deref(), cfg, out),
        Cmd::BetaCheck { poly, pieces } => beta_cmd(poly.as_deref(), pieces.as_deref(), cfg, out),
        Cmd::Diamond {
            points,
            edge,
            angle,
        } => diamond_cmd(points, edge.as_deref(), *angle, out),
        Cmd::VerifyPiece { pieces, name } => verify_cmd(pieces, name.as_deref(), out),
        Cmd::AnalyzePiece {
            piece,
            name,
            tex,
            output,
        } => analyze_cmd(piece, name.as_deref(), *tex, output.as_deref(), cfg, out),
        Cmd::CheckW { data, figures } => check_w_cmd(data, figures.as_deref(), out),
        Cmd::SatReduce { input, output } => sat_cmd(input, output.as_deref(), out, err),
        Cmd::Layout {
            input,
            out_dir,
            pieces,
        } => layout_cmd(input, out_dir, pieces.as_deref(), cfg, out, err),
        Cmd::Audit { input, pieces } => audit_cmd(input, pieces.as_deref(), cfg, out, err),
    }
}

/// `x y` per line; `#` starts a comment.
pub fn parse_points(text: &str) -> Result<Vec<(i64, i64)>, String> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let f: Vec<&str> = body.split_whitespace().collect();
        if f.len() != 2 {
            return Err(format!("line {}: expected two coordinates", i + 1));
        }
        let mut c = [0i64; 2];
        for (k, s) in f.iter().enumerate() {
            let v = parse_fixed_decimal(s, COORD_SCALE)
                .map_err(|e| format!("line {}: {e}", i + 1))?;
            c[k] = v
                .to_i64()
                .ok_or_else(|| format!("line {}: coordinate out of range", i + 1))?;
        }
        pts.push((c[0], c[1]));
    }
    Ok(pts)
}

fn load_polygon(path: &Path) -> Result<Polygon, Fail> {
    let pts = parse_points(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let poly = Polygon::from_ints(&pts, COORD_SCALE);
    let report = validate_simple_polygon(&poly);
    if !report.is_valid() {
        return Err(usage(format!(
            "{}: not a simple counterclockwise polygon: {:?}",
            path.display(),
            report.issues
        )));
    }
    Ok(poly)
}

fn load_catalog(path: &Path) -> Result<PieceCatalog, Fail> {
    load_pieces(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn polygon_cmd(path: &Path, svg: Option<&Path>, cfg: &RunConfig, out: &mut dyn Write) -> Res {
    let poly = load_polygon(path)?;
    let r = polygon_mwt_at(&poly, &EdgeConstraint::none(), cfg.precision)
        .map_err(|e| Fail::Check(e.to_string()))?;
    writeln!(out, "vertices {}", poly.len()).map_err(io)?;
    writeln!(out, "cost {}", r.optimal_cost.display_string(cfg.display)).map_err(io)?;
    writeln!(out, "enclosure {}", r.optimal_cost).map_err(io)?;
    writeln!(out, "multiplicity {}", r.multiplicity).map_err(io)?;
    for t in &r.witness.triangles {
        writeln!(out, "triangle {} {} {}", t[0], t[1], t[2]).map_err(io)?;
    }
    for (a, b) in &r.witness.internal_edges {
        writeln!(out, "edge {a} {b}").map_err(io)?;
    }
    if let Some(p) = svg {
        write_file(p, &FigureDoc::triangulation(&poly, &r.witness).to_svg())?;
    }
    Ok(())
}

fn beta_cmd(poly: Option<&Path>, pieces: Option<&Path>, cfg: &RunConfig, out: &mut dyn Write) -> Res {
    let mut sets: Vec<(String, Vec<Point>, Vec<(usize, usize)>)> = Vec::new();
    if let Some(p) = poly {
        let poly = load_polygon(p)?;
        let n = poly.len();
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        sets.push((p.display().to_string(), poly.vertices.clone(), edges));
    }
    if let Some(p) = pieces {
        for piece in load_catalog(p)?.pieces {
            sets.push((piece.name.clone(), piece.points(), piece.boundary_edges()));
        }
    }
    let mut bad = 0;
    for (name, pts, edges) in &sets {
        let rep = beta_skeleton_certify(edges, pts, &cfg.beta);
        writeln!(
            out,
            "{name}: {} edges, {} below beta {}",
            edges.len(),
            rep.violators.len(),
            cfg.beta.to_canonical()
        )
        .map_err(io)?;
        if let Some((i, j, b)) = rep.binding() {
            let w = b.witness.as_ref().unwrap();
            writeln!(
                out,
                "     binding edge {i}-{j}: witness {}, cos2 = {}",
                w.point, w.cos2
            )
            .map_err(io)?;
        }
        for (i, j) in &rep.violators {
            writeln!(out, "     violated edge {i}-{j}: {} {}", pts[*i], pts[*j]).map_err(io)?;
        }
        bad += rep.violators.len();
    }
    if bad > 0 {
        return Err(Fail::Check(format!("{bad} boundary edges are not in the skeleton")));
    }
    Ok(())
}

fn diamond_cmd(path: &Path, edge: Option<&str>, angle: AngleArg, out: &mut dyn Write) -> Res {
    let pts: Vec<Point> = parse_points(&read(path)?)
        .map_err(usage)?
        .into_iter()
        .map(to_point)
        .collect();
    let angle = match angle {
        AngleArg::Improved => BaseAngle::pi_over_4_6(),
        AngleArg::Original => BaseAngle::pi_over_8(),
    };
    let pairs: Vec<(usize, usize)> = match edge {
        Some(e) => {
            let (a, b) = e
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| usage(format!("edge {e}: expected i,j")))?;
            if a >= pts.len() || b >= pts.len() || a == b {
                return Err(usage(format!("edge {e}: bad indices")));
            }
            vec![(a, b)]
        }
        None => (0..pts.len())
            .flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j)))
            .collect(),
    };
    let mut excluded = 0;
    for &(i, j) in &pairs {
        let others: Vec<Point> = pts
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, p)| p.clone())
            .collect();
        let o = diamond_outcome(&pts[i], &pts[j], &others, &angle);
        let pass = o.left_empty || o.right_empty;
        excluded += usize::from(!pass);
        writeln!(
            out,
            "edge {i}-{j}: {} (left {}, right {}, {} ambiguous)",
            if pass { "may be in an MWT" } else { "excluded" },
            if o.left_empty { "empty" } else { "occupied" },
            if o.right_empty { "empty" } else { "occupied" },
            o.ambiguous_points
        )
        .map_err(io)?;
    }
    if edge.is_some() && excluded > 0 {
        return Err(Fail::Check("edge fails the diamond test".into()));
    }
    Ok(())
}

fn select<'a>(
    cat: &'a PieceCatalog,
    name: Option<&str>,
) -> Result<Vec<&'a mwt_core::workshop::Piece>, Fail> {
    match name {
        Some(n) => Ok(vec![cat
            .piece(n)
            .ok_or_else(|| usage(format!("no piece named {n}")))?]),
        None => Ok(cat.pieces.iter().collect()),
    }
}

fn verify_cmd(path: &Path, name: Option<&str>, out: &mut dyn Write) -> Res {
    let cat = load_catalog(path)?;
    let mut failed = Vec::new();
    for p in select(&cat, name)? {
        let r = validate_piece(p, cat.w());
        for l in &r.log {
            writeln!(out, "{l}").map_err(io)?;
        }
        if !r.passes() {
            failed.push(p.name.clone());
        }
    }
    if !failed.is_empty() {
        return Err(Fail::Check(format!("pieces failing checks: {}", failed.join(", "))));
    }
    Ok(())
}

fn analyze_cmd(
    path: &Path,
    name: Option<&str>,
    tex: bool,
    output: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Res {
    let cat = load_catalog(path)?;
    let mut tables = Vec::new();
    for p in select(&cat, name)? {
        tables.push(analyze_piece(p).map_err(|e| match e {
            WorkshopError::MalformedFile { .. } => usage(e),
            _ => Fail::Check(e.to_string()),
        })?);
    }
    let doc = if tex {
        table::emit_tex(&tables, cfg.display)
    } else {
        table::emit_text(&tables, cfg.display)
    };
    match output {
        Some(p) => write_file(p, &doc),
        None => out.write_all(doc.as_bytes()).map_err(io),
    }
}

fn check_w_cmd(path: &Path, figures: Option<&Path>, out: &mut dyn Write) -> Res {
    let cat = load_catalog(path)?;
    let w = cat
        .w()
        .ok_or_else(|| usage(format!("{}: no wset block", path.display())))?;
    let rep = check_terminal_lemma(w).map_err(|e| match e {
        WorkshopError::InvalidPiece { .. } => usage(e),
        _ => Fail::Check(e.to_string()),
    })?;
    for l in &rep.log {
        writeln!(out, "{l}").map_err(io)?;
    }
    if let Some(dir) = figures {
        std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
        for c in &rep.cases {
            let svg = FigureDoc::triangulation(&c.polygon, &c.witness).to_svg();
            write_file(&dir.join(format!("case-v{}-v{}.svg", c.i, c.j)), &svg)?;
        }
    }
    if !rep.margin_ok {
        return Err(Fail::Check("smallest difference is within the perturbation margin".into()));
    }
    Ok(())
}

fn sat_cmd(input: &Path, output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Res {
    let inst = parse_planar(&read(input)?).map_err(usage)?;
    let t = transform_instance(&inst).map_err(usage)?;
    let text = write_1in3(&t.formula, &t.embedding);
    let _ = writeln!(
        err,
        "{} variables, {} clauses -> {} variables, {} clauses{}",
        inst.vars.len(),
        inst.clauses.len(),
        t.formula.vars.len(),
        t.formula.clauses.len(),
        if t.refuted { " (refuted by propagation)" } else { "" }
    );
    match output {
        Some(p) => write_file(p, &text),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

/// A 1-in-3 file, or a planar CNF file that is reduced first.
fn load_formula(path: &Path, err: &mut dyn Write) -> Result<(Formula1in3, RectilinearEmbedding), Fail> {
    let text = read(path)?;
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .unwrap_or("");
    if header.split_whitespace().nth(1) == Some("cnf") {
        let inst = parse_planar(&text).map_err(usage)?;
        let t = transform_instance(&inst).map_err(usage)?;
        let _ = writeln!(err, "reduced CNF input to {} 1-in-3 clauses", t.formula.clauses.len());
        Ok((t.formula, t.embedding))
    } else {
        parse_1in3(&text).map_err(usage)
    }
}

fn geometry_and_costs(
    pieces: Option<&Path>,
    err: &mut dyn Write,
) -> Result<(BTreeMap<PieceKind, mwt_core::workshop::Piece>, CostModel), Fail> {
    let mut geo = BTreeMap::new();
    let mut cm = CostModel::published();
    if let Some(p) = pieces {
        let cat = load_catalog(p)?;
        for piece in &cat.pieces {
            if let Some(k) = PieceKind::from_name(&piece.name).filter(|k| k.span().is_some()) {
                geo.insert(k, piece.clone());
            }
        }
        let tables: Vec<_> = cat
            .pieces
            .iter()
            .filter(|p| PieceKind::from_name(&p.name).is_some())
            .filter_map(|p| analyze_piece(p).ok())
            .collect();
        match CostModel::from_tables(&tables) {
            Ok(m) => cm = m,
            Err(e) => {
                let _ = writeln!(err, "cost model: published tables ({e})");
            }
        }
    }
    Ok((geo, cm))
}

fn reduce(
    input: &Path,
    pieces: Option<&Path>,
    cfg: &RunConfig,
    err: &mut dyn Write,
) -> Result<(GadgetGraph, ReductionOutput), Fail> {
    let (f, e) = load_formula(input, err)?;
    let g = build_network(&f, &e, &Dims::for_mode(cfg.mode)).map_err(|e| Fail::Check(e.to_string()))?;
    let (geo, cm) = geometry_and_costs(pieces, err)?;
    let out = emit_reduction(&g, &f, &geo, &cm).map_err(|e| Fail::Check(e.to_string()))?;
    Ok((g, out))
}

fn layout_cmd(
    input: &Path,
    dir: &Path,
    pieces: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Res {
    let (g, red) = reduce(input, pieces, cfg, err)?;
    let audit = audit_layout(&g, Some(&red));
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("points.txt"), &red.coordinate_text())?;
    let mut side = red.sidecar();
    side["audit"] = audit.summary();
    let json = serde_json::to_string_pretty(&side).map_err(usage)? + "\n";
    write_file(&dir.join("sidecar.json"), &json)?;
    write_file(&dir.join("layout.svg"), &FigureDoc::network(&g).to_svg())?;
    writeln!(
        out,
        "{} mode: {} loops, {} links, {} pieces ({} placed, {} stubs, {} in runs)",
        red.mode.name(),
        g.loops.len(),
        g.links.len(),
        red.piece_count,
        red.geometric,
        red.stubs,
        red.in_runs
    )
    .map_err(io)?;
    writeln!(out, "threshold {}", red.threshold).map_err(io)?;
    if red.mode == Mode::Mini {
        writeln!(out, "note: mini mode output is not proof grade").map_err(io)?;
    }
    if !audit.passes() {
        return Err(Fail::Check("layout audit failed".into()));
    }
    Ok(())
}

fn audit_cmd(
    input: &Path,
    pieces: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Res {
    let (g, red) = reduce(input, pieces, cfg, err)?;
    let a = audit_layout(&g, Some(&red));
    for l in &a.log {
        writeln!(out, "{l}").map_err(io)?;
    }
    let beta_fails = a.beta.iter().flat_map(|b| &b.1);
    for l in a
        .bookkeeping
        .iter()
        .chain(&a.contiguity)
        .chain(&a.clearance)
        .chain(beta_fails)
    {
        writeln!(out, "  {l}").map_err(io)?;
    }
    if !a.passes() {
        return Err(Fail::Check("audit failed".into()));
    }
    writeln!(out, "audit passed").map_err(io)?;
    Ok(())
}
