//! Batch front end for the thickfoam engine.
//!
//! Exit status: 0 success, 1 a check failed, 2 bad input, 3 resource cap.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thickfoam::complex::{multiset_label, state_string, ChainComplex};
use thickfoam::diagram::{validate, Diagram, Side};
use thickfoam::homology::Homology;
use thickfoam::kfoam::{natural_sectors, KConfig, KValue, OrientationVariants, Sector};
use thickfoam::moves::{Move, TwistSign};
use thickfoam::skein::kauffman_bracket;
use thickfoam::surface::UnorientedClass;
use thickfoam::{homology, theory, Error};

const WORKERS_ENV: &str = "THICKFOAM_WORKERS";

#[derive(Parser)]
#[command(name = "thickfoam", version, about = "Foam link homology for framed links in thickened surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Largest number of crossings accepted.
    #[arg(long, global = true, default_value_t = 12)]
    cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoryKind {
    Simple,
    K,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variants {
    All,
    Reachable,
}

#[derive(Args, Clone)]
struct TheoryArgs {
    #[arg(long, value_enum, default_value_t = TheoryKind::Simple)]
    theory: TheoryKind,
    /// A natural number or `inf`; only with `--theory k` (default inf).
    #[arg(long)]
    k: Option<KValue>,
    /// Restrict to one sector, written as in the output, e.g. `[(1)]` or `[+(1)]`.
    #[arg(long)]
    sector: Option<String>,
    #[arg(long, value_enum, default_value_t = Variants::All)]
    orientation_variants: Variants,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MoveKind {
    #[value(name = "r1+")]
    R1Positive,
    #[value(name = "r1-")]
    R1Negative,
    R2,
    R3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Args, Clone)]
struct MoveArgs {
    #[arg(long = "move", value_enum)]
    kind: MoveKind,
    /// Edge receiving the kink (r1).
    #[arg(long)]
    edge: Option<String>,
    /// Edge passing over (r2).
    #[arg(long)]
    a: Option<String>,
    /// Edge passing under (r2).
    #[arg(long)]
    b: Option<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    a_side: SideArg,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    b_side: SideArg,
    /// Three crossing ids forming the triangle (r3), comma separated.
    #[arg(long, value_delimiter = ',')]
    crossings: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check diagrams for structural problems.
    Validate { files: Vec<PathBuf> },
    /// Circles of every state.
    States { file: PathBuf },
    /// Generators and differentials of the chain complex.
    Complex {
        file: PathBuf,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Integral homology, graded by (i, j, sector).
    Homology {
        file: PathBuf,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Kauffman bracket in the skein module.
    Bracket { file: PathBuf },
    /// Check that the differential squares to zero.
    CheckD2 {
        files: Vec<PathBuf>,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Apply a Reidemeister move and write the new diagram.
    Move {
        file: PathBuf,
        #[command(flatten)]
        mv: MoveArgs,
        /// Output path; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Compare homology before and after a move.
    Invariance {
        file: PathBuf,
        #[command(flatten)]
        mv: MoveArgs,
        #[command(flatten)]
        theory: TheoryArgs,
    },
}

enum Failure {
    /// A check ran and failed; the report is still printed.
    Check(Value, String),
    Input(String),
    Resource(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::ResourceLimit(m) => Failure::Resource(m),
            Error::Invariant(_) | Error::DSquaredNonzero(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(Value, String), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var(WORKERS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {WORKERS_ENV} must be a positive integer, got `{n}`");
                return ExitCode::from(2);
            }
        }
    }
    let emit = |report: Value, table: String| {
        if cli.format == Format::Json {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        } else {
            print!("{table}");
        }
    };
    match run(&cli) {
        Ok((report, table)) => {
            emit(report, table);
            ExitCode::SUCCESS
        }
        Err(Failure::Check(report, table)) => {
            emit(report, table);
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn report(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema": 1, "command": command });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

fn read_diagram(path: &Path) -> Result<Diagram, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Diagram::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { files } => cmd_validate(files),
        Command::States { file } => cmd_states(file, cli.cap),
        Command::Complex { file, theory } => cmd_complex(file, theory, cli.cap),
        Command::Homology { file, theory } => cmd_homology(file, theory, cli.cap),
        Command::Bracket { file } => cmd_bracket(file, cli.cap),
        Command::CheckD2 { files, theory } => cmd_check_d2(files, theory, cli.cap),
        Command::Move { file, mv, output } => cmd_move(file, mv, output.as_deref()),
        Command::Invariance { file, mv, theory } => cmd_invariance(file, mv, theory, cli.cap),
    }
}

fn cmd_validate(files: &[PathBuf]) -> Outcome {
    let mut entries = Vec::new();
    let mut table = String::new();
    let mut all_ok = true;
    for f in files {
        let d = read_diagram(f)?;
        let r = validate(&d);
        all_ok &= r.is_valid();
        let status = if r.is_valid() { "VALID" } else { "INVALID" };
        writeln!(table, "{status} {}", f.display()).unwrap();
        for i in &r.issues {
            writeln!(table, "  {:?}: {}", i.kind, i.message).unwrap();
        }
        entries.push(json!({ "file": f.display().to_string(), "valid": r.is_valid(), "issues": r.issues }));
    }
    let rep = report("validate", json!({ "results": entries }));
    if all_ok {
        Ok((rep, table))
    } else {
        Err(Failure::Check(rep, table))
    }
}

fn cmd_states(file: &Path, cap: usize) -> Outcome {
    let d = read_diagram(file)?;
    let cube = theory::cube(&d, cap)?;
    let mut states = Vec::new();
    let mut table = format!("surface {}\n", d.surface);
    for s in thickfoam::state::enumerate_states(cube.m(), cap)? {
        let res = cube.resolution(s);
        let circles: Vec<Value> = res
            .circles
            .iter()
            .map(|c| {
                json!({
                    "edges": c.traversal.iter().map(|&(e, _)| d.edges[e].id.clone()).collect::<Vec<_>>(),
                    "class": c.class.to_string(),
                    "essential": c.essential,
                })
            })
            .collect();
        let summary: Vec<String> =
            res.circles.iter().map(|c| if c.essential { c.class.to_string() } else { "T".into() }).collect();
        let label = if cube.m() == 0 { "(empty)".to_string() } else { state_string(s) };
        writeln!(table, "{:>8}  i={:<3} {}", label, s.i(), summary.join(" ")).unwrap();
        states.push(json!({ "state": state_string(s), "i": s.i(), "circles": circles }));
    }
    Ok((report("states", json!({ "surface": d.surface.to_string(), "states": states })), table))
}

/// A built complex in either theory, restricted to the requested sector.
enum Built {
    Simple(ChainComplex<Vec<UnorientedClass>>),
    K(ChainComplex<Sector>, KValue),
}

fn k_config(t: &TheoryArgs) -> Result<Option<KConfig>, Failure> {
    match (t.theory, t.k) {
        (TheoryKind::Simple, Some(_)) => Err(Failure::Input("--k is only accepted with --theory k".into())),
        (TheoryKind::Simple, None) => Ok(None),
        (TheoryKind::K, k) => {
            let variants = match t.orientation_variants {
                Variants::All => OrientationVariants::All,
                Variants::Reachable => OrientationVariants::Reachable,
            };
            Ok(Some(KConfig { k: k.unwrap_or(KValue::INFINITY), variants }))
        }
    }
}

fn build(d: &Diagram, t: &TheoryArgs, cap: usize, sectors: Option<Vec<Sector>>) -> Result<Built, Failure> {
    Ok(match k_config(t)? {
        None => {
            let mut c = theory::simple_complex(d, cap)?;
            if let Some(f) = &t.sector {
                c.blocks.retain(|b| &multiset_label(&b.s) == f);
            }
            Built::Simple(c)
        }
        Some(cfg) => {
            let mut sectors = match sectors {
                Some(s) => s,
                None => natural_sectors(&theory::cube(d, cap)?),
            };
            if let Some(f) = &t.sector {
                sectors.retain(|s| &s.to_string() == f);
            }
            Built::K(theory::k_complex(d, cfg, Some(&sectors), cap)?, cfg.k)
        }
    })
}

fn theory_name(b: &Built) -> String {
    match b {
        Built::Simple(_) => "simple".into(),
        Built::K(_, k) => format!("k={k}"),
    }
}

fn complex_json<S>(c: &ChainComplex<S>, label: impl Fn(&S) -> String) -> Value {
    let blocks: Vec<Value> = c
        .blocks
        .iter()
        .map(|b| {
            let levels: serde_json::Map<String, Value> = b.levels.iter().map(|(i, g)| (i.to_string(), json!(g))).collect();
            let maps: serde_json::Map<String, Value> = b.maps.iter().map(|(i, m)| (i.to_string(), json!(m.to_dense()))).collect();
            json!({ "sector": label(&b.s), "j": b.j, "levels": levels, "maps": maps })
        })
        .collect();
    json!({ "crossings": c.m, "blocks": blocks })
}

fn complex_table<S>(c: &ChainComplex<S>, label: impl Fn(&S) -> String) -> String {
    let mut t = String::new();
    for b in &c.blocks {
        writeln!(t, "sector {} j={}", label(&b.s), b.j).unwrap();
        for (i, gens) in &b.levels {
            writeln!(t, "  i={i}: {}", gens.join(", ")).unwrap();
        }
        for (i, m) in &b.maps {
            writeln!(t, "  d: i={i} → i={}: {:?}", i - 2, m.to_dense()).unwrap();
        }
    }
    t
}

fn cmd_complex(file: &Path, t: &TheoryArgs, cap: usize) -> Outcome {
    let d = read_diagram(file)?;
    let built = build(&d, t, cap, None)?;
    let name = theory_name(&built);
    let (body, table) = match &built {
        Built::Simple(c) => (complex_json(c, |s| multiset_label(s)), complex_table(c, |s| multiset_label(s))),
        Built::K(c, _) => (complex_json(c, Sector::to_string), complex_table(c, Sector::to_string)),
    };
    let mut body = body;
    body["theory"] = json!(name);
    Ok((report("complex", body), format!("theory {name}\n{table}")))
}

/// Homology groups as `(i, j, sector label, group)` rows.
type Rows = Vec<(i64, i64, String, String)>;

fn rows<S: Ord + Clone>(h: &Homology<S>, label: impl Fn(&S) -> String) -> Rows {
    h.groups.iter().map(|((s, j, i), g)| (*i, *j, label(s), g.to_string())).collect()
}

fn homology_rows(b: &Built) -> Result<Rows, Failure> {
    Ok(match b {
        Built::Simple(c) => rows(&homology::homology(c, |s| multiset_label(s), true)?, |s| multiset_label(s)),
        Built::K(c, _) => rows(&homology::homology(c, Sector::to_string, true)?, Sector::to_string),
    })
}

fn rows_json(r: &Rows) -> Value {
    json!(r.iter().map(|(i, j, s, g)| json!({ "i": i, "j": j, "sector": s, "group": g })).collect::<Vec<_>>())
}

fn rows_table(r: &Rows) -> String {
    let mut t = String::new();
    for (i, j, s, g) in r {
        writeln!(t, "({i}, {j}, {s}) → {g}").unwrap();
    }
    if r.is_empty() {
        t.push_str("all groups vanish\n");
    }
    t
}

fn cmd_homology(file: &Path, t: &TheoryArgs, cap: usize) -> Outcome {
    let d = read_diagram(file)?;
    let built = build(&d, t, cap, None)?;
    let r = homology_rows(&built)?;
    let name = theory_name(&built);
    Ok((report("homology", json!({ "theory": name, "groups": rows_json(&r) })), format!("theory {name}\n{}", rows_table(&r))))
}

fn cmd_bracket(file: &Path, cap: usize) -> Outcome {
    let d = read_diagram(file)?;
    let b = kauffman_bracket(&d, cap)?;
    let mut table = String::new();
    let mut terms = serde_json::Map::new();
    for (key, p) in &b.0 {
        writeln!(table, "{}: {p}", multiset_label(key)).unwrap();
        terms.insert(multiset_label(key), json!(p.to_string()));
    }
    Ok((report("bracket", json!({ "bracket": terms })), table))
}

fn cmd_check_d2(files: &[PathBuf], t: &TheoryArgs, cap: usize) -> Outcome {
    let mut entries = Vec::new();
    let mut table = String::new();
    let mut all_ok = true;
    for f in files {
        let d = read_diagram(f)?;
        let built = build(&d, t, cap, None)?;
        let violation = match &built {
            Built::Simple(c) => c.d_squared_violation(|s| multiset_label(s)),
            Built::K(c, _) => c.d_squared_violation(Sector::to_string),
        };
        all_ok &= violation.is_none();
        match &violation {
            None => writeln!(table, "PASS {} ({})", f.display(), theory_name(&built)).unwrap(),
            Some(v) => writeln!(
                table,
                "FAIL {} ({}): d∘d sends {} to {} times {} (sector {}, j = {}, i = {})",
                f.display(),
                theory_name(&built),
                v.source,
                v.coefficient,
                v.target,
                v.sector,
                v.j,
                v.i
            )
            .unwrap(),
        }
        entries.push(json!({ "file": f.display().to_string(), "theory": theory_name(&built), "pass": violation.is_none(), "violation": violation }));
    }
    let rep = report("check-d2", json!({ "results": entries }));
    if all_ok {
        Ok((rep, table))
    } else {
        Err(Failure::Check(rep, table))
    }
}

fn to_move(m: &MoveArgs) -> Result<Move, Failure> {
    let need = |v: &Option<String>, flag: &str| v.clone().ok_or_else(|| Failure::Input(format!("this move needs --{flag}")));
    Ok(match m.kind {
        MoveKind::R1Positive => Move::R1 { edge: need(&m.edge, "edge")?, sign: TwistSign::Positive },
        MoveKind::R1Negative => Move::R1 { edge: need(&m.edge, "edge")?, sign: TwistSign::Negative },
        MoveKind::R2 => Move::R2 { a: need(&m.a, "a")?, b: need(&m.b, "b")?, a_side: m.a_side.into(), b_side: m.b_side.into() },
        MoveKind::R3 => {
            let c: [String; 3] =
                m.crossings.clone().try_into().map_err(|_| Failure::Input("r3 needs --crossings with three ids".into()))?;
            Move::R3 { crossings: c }
        }
    })
}

fn cmd_move(file: &Path, m: &MoveArgs, output: Option<&Path>) -> Outcome {
    let d = read_diagram(file)?;
    let after = to_move(m)?.apply(&d)?;
    let text = after.to_json();
    match output {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let rep = report("move", json!({ "output": p.display().to_string(), "crossings": after.crossings.len() }));
            Ok((rep, format!("wrote {}\n", p.display())))
        }
        None => {
            let rep = report("move", json!({ "diagram": serde_json::from_str::<Value>(&text).unwrap() }));
            Ok((rep, format!("{text}\n")))
        }
    }
}

fn cmd_invariance(file: &Path, m: &MoveArgs, t: &TheoryArgs, cap: usize) -> Outcome {
    let before = read_diagram(file)?;
    let mv = to_move(m)?;
    let after = mv.apply(&before)?;
    let (di, dj) = match m.kind {
        MoveKind::R1Positive => (1, 3),
        MoveKind::R1Negative => (-1, -3),
        _ => (0, 0),
    };
    let sectors = match t.theory {
        TheoryKind::K => Some(theory::joint_sectors(&[&before, &after], cap)?),
        TheoryKind::Simple => None,
    };
    let shift = |r: Rows| -> Rows { r.into_iter().map(|(i, j, s, g)| (i + di, j + dj, s, g)).collect() };
    let mut expected = shift(homology_rows(&build(&before, t, cap, sectors.clone())?)?);
    let built_after = build(&after, t, cap, sectors)?;
    let mut got = homology_rows(&built_after)?;
    expected.sort();
    got.sort();
    let pass = expected == got;
    let missing: Rows = expected.iter().filter(|r| !got.contains(r)).cloned().collect();
    let extra: Rows = got.iter().filter(|r| !expected.contains(r)).cloned().collect();
    let status = if pass { "PASS" } else { "FAIL" };
    let mut table = format!("{status} {} with shift (Δi, Δj) = ({di}, {dj})\n", theory_name(&built_after));
    if m.kind == MoveKind::R1Negative {
        table.push_str("note: the negative kink shift mirrors the positive one\n");
    }
    if !pass {
        writeln!(table, "expected but missing:\n{}", rows_table(&missing)).unwrap();
        writeln!(table, "present but unexpected:\n{}", rows_table(&extra)).unwrap();
    }
    let rep = report(
        "invariance",
        json!({
            "theory": theory_name(&built_after),
            "move": mv,
            "shift": [di, dj],
            "shift_derived": m.kind == MoveKind::R1Negative,
            "pass": pass,
            "missing": rows_json(&missing),
            "unexpected": rows_json(&extra),
        }),
    );
    if pass {
        Ok((rep, table))
    } else {
        Err(Failure::Check(rep, table))
    }
}
