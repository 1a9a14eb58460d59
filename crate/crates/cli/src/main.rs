//! Command-line front end for the `bigraded` library.
//!
//! Exit codes: 0 on success, 1 when a computation disagrees or an invariant
//! fails, 2 on usage and input errors.

mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bigraded::betti::{compare, euler_local_check, hilbert_identity_check};
use bigraded::generators::{gen_cz_family, gen_hook, gen_simple};
use bigraded::grid::grades_in;
use bigraded::io::{parse_module, parse_zigzag, write_module, write_zigzag, FormatError};
use bigraded::iso::{search_isomorphism, IsoError, DEFAULT_SEARCH_CAP};
use bigraded::random::{random_module, RandomModuleParams};
use bigraded::resolution::{intersection_diagnostic, DEFAULT_PADDING};
use bigraded::zigzag::{eight_bars, gen_from_barcode, restrict_into_frame, restrict_outward_frame};
use bigraded::{
    betti_theorem, free_module, resolve, Barcode, BettiTable, Direction, Grade, GradeMultiset, GridError,
    GridModule, PrimeField, ZigzagModule,
};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bigraded", version, about = "Bigraded Betti numbers of 2-parameter persistence modules")]
struct Cli {
    /// Report style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Formula,
    Resolution,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Example {
    Simple,
    Hook,
    Free,
    Czfamily,
    Eightbar,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a module (.pm2) or zigzag (.zz) file.
    Validate {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Bigraded Betti numbers.
    Betti {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Write a scatter plot of the table.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Into and outward frame barcodes, `y` and `z` at every grade.
    Frames {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Barcode of a zigzag module.
    Zigzag {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Free resolution: generator multisets and per-grade dimensions of F_j, K_j.
    Resolve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Dimension identities and intersection diagnostics at every grade.
    Check {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Compare both Betti engines on a file or on a seeded random corpus.
    Crosscheck {
        #[arg(short, long, conflicts_with = "random")]
        input: Option<PathBuf>,
        /// Number of random modules.
        #[arg(long, required_unless_present = "input")]
        random: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "BIGRADED_FIELD", default_value_t = 2)]
        field: u64,
    },
    /// Write an example module (.pm2) or zigzag (.zz).
    Gen {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long, env = "BIGRADED_FIELD", default_value_t = 2)]
        field: u64,
        /// Parameter of the czfamily example.
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        lambda: i64,
        /// Grade `x,y` of the simple module.
        #[arg(long, default_value = "0,0")]
        alpha: String,
        /// Box `s1,s2`; defaults depend on the example.
        #[arg(long = "box")]
        bounds: Option<String>,
        /// Generator grades of the free module, e.g. `0,0 1,2`.
        #[arg(long, default_value = "0,0")]
        grades: String,
        /// Arrow orientations of the eightbar zigzag, e.g. `fwd,bwd,fwd`.
        #[arg(long, default_value = "fwd,bwd,fwd")]
        directions: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive isomorphism test between two modules.
    Isocheck {
        first: PathBuf,
        second: PathBuf,
        /// Budget on candidate matrices examined.
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u64,
    },
}

enum Failure {
    /// Exit code 1.
    Math(String),
    /// Exit code 2.
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn math(e: impl std::fmt::Display) -> Failure {
    Failure::Math(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate { input } => cmd_validate(fmt, input),
        Command::Betti { input, method, svg } => cmd_betti(fmt, input, *method, svg.as_deref()),
        Command::Frames { input } => cmd_frames(fmt, input),
        Command::Zigzag { input } => cmd_zigzag(fmt, input),
        Command::Resolve { input, svg } => cmd_resolve(fmt, input, svg.as_deref()),
        Command::Check { input } => cmd_check(fmt, input),
        Command::Crosscheck {
            input,
            random,
            seed,
            field,
        } => match (input, random) {
            (Some(path), _) => cmd_crosscheck_file(fmt, path),
            (None, Some(n)) => cmd_crosscheck_random(fmt, *n, *seed, *field),
            (None, None) => Err(usage("give --input or --random")),
        },
        Command::Gen {
            example,
            field,
            lambda,
            alpha,
            bounds,
            grades,
            directions,
            output,
        } => {
            let field = PrimeField::new(*field).map_err(usage)?;
            let text = match example {
                Example::Simple => {
                    let a = parse_pair(alpha)?;
                    let b = bounds.as_deref().map(parse_pair).transpose()?.unwrap_or((1, 1));
                    write_module(&gen_simple(Grade::new(a.0 as i64, a.1 as i64), field, b).map_err(usage)?)
                }
                Example::Hook => {
                    let b = bounds.as_deref().map(parse_pair).transpose()?.unwrap_or((2, 2));
                    write_module(&gen_hook(field, b).map_err(usage)?)
                }
                Example::Free => {
                    let b = bounds.as_deref().map(parse_pair).transpose()?.unwrap_or((2, 2));
                    let mut s = GradeMultiset::new();
                    for tok in grades.split_whitespace() {
                        let (x, y) = parse_pair(tok)?;
                        s.insert(Grade::new(x as i64, y as i64), 1);
                    }
                    write_module(&free_module(&s, b, field).map_err(usage)?)
                }
                Example::Czfamily => write_module(&gen_cz_family(*lambda, field).map_err(usage)?),
                Example::Eightbar => {
                    let dirs = parse_directions(directions)?;
                    write_zigzag(&gen_from_barcode(&eight_bars(), &dirs, field).map_err(usage)?)
                }
            };
            match output {
                Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Isocheck { first, second, cap } => cmd_isocheck(fmt, first, second, *cap),
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|_| usage(format!("bad coordinate `{a}`")))?,
            b.parse().map_err(|_| usage(format!("bad coordinate `{b}`")))?,
        )),
        _ => Err(usage(format!("expected `x,y`, found `{s}`"))),
    }
}

fn parse_directions(s: &str) -> Result<Vec<Direction>, Failure> {
    s.split(',')
        .map(|t| match t.trim() {
            "fwd" => Ok(Direction::Forward),
            "bwd" => Ok(Direction::Backward),
            other => Err(usage(format!("direction must be fwd or bwd, found `{other}`"))),
        })
        .collect()
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_module(path: &Path) -> Result<GridModule, Failure> {
    parse_module(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_zigzag(path: &Path) -> Result<ZigzagModule, Failure> {
    parse_zigzag(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Writes the report; a closed stdout is not an error worth panicking over.
fn emit(fmt: Format, value: Value, table: String) {
    let text = match fmt {
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
        Format::Table => table,
    };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn multiset_json(ms: &GradeMultiset) -> Value {
    Value::Array(
        ms.iter()
            .map(|(g, m)| json!({"x": g.x, "y": g.y, "mult": m}))
            .collect(),
    )
}

fn table_json(t: &BettiTable) -> Value {
    json!({
        "beta_0": multiset_json(&t.beta[0]),
        "beta_1": multiset_json(&t.beta[1]),
        "beta_2": multiset_json(&t.beta[2]),
    })
}

fn barcode_json(b: &Barcode) -> Value {
    Value::Array(
        b.iter()
            .map(|(i, m)| json!({"start": i.start, "end": i.end, "mult": m}))
            .collect(),
    )
}

fn write_svg(path: &Path, table: &BettiTable, bounds: (usize, usize), title: &str) -> Outcome {
    fs::write(path, svg::render(table, bounds, title)).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_validate(fmt: Format, input: &Path) -> Outcome {
    let text = read(input)?;
    let is_zz = input.extension().is_some_and(|e| e == "zz");
    if is_zz {
        let z = parse_zigzag(&text).map_err(|e| usage(format!("{}: {e}", input.display())))?;
        let dims: Vec<String> = z.dims().iter().map(usize::to_string).collect();
        emit(
            fmt,
            json!({"kind": "zigzag", "valid": true, "field": z.field().modulus(), "dims": z.dims()}),
            format!("valid zigzag over {} with dims {}\n", z.field(), dims.join(" ")),
        );
        return Ok(());
    }
    match parse_module(&text) {
        Ok(m) => {
            emit(
                fmt,
                json!({
                    "kind": "module", "valid": true, "field": m.field().modulus(),
                    "box": [m.bounds().0, m.bounds().1], "total_dim": m.total_dim(),
                }),
                format!(
                    "valid module over {} on box {}x{}, total dimension {}\n",
                    m.field(),
                    m.bounds().0,
                    m.bounds().1,
                    m.total_dim()
                ),
            );
            Ok(())
        }
        Err(FormatError::Module(GridError::Invalid(violations))) => {
            let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            emit(
                fmt,
                json!({"kind": "module", "valid": false, "violations": lines}),
                lines.iter().map(|l| format!("{l}\n")).collect(),
            );
            Err(math(format!("{}: {} violation(s)", input.display(), lines.len())))
        }
        Err(e) => Err(usage(format!("{}: {e}", input.display()))),
    }
}

fn cmd_betti(fmt: Format, input: &Path, method: Method, svg: Option<&Path>) -> Outcome {
    let m = load_module(input)?;
    let formula = match method {
        Method::Formula | Method::Both => Some(betti_theorem(&m).map_err(math)?),
        Method::Resolution => None,
    };
    let resolution = match method {
        Method::Resolution | Method::Both => Some(resolve(&m).map_err(math)?),
        Method::Formula => None,
    };
    let mut value = serde_json::Map::new();
    let mut text = String::new();
    if let Some(t) = &formula {
        value.insert("formula".into(), table_json(t));
        text += &format!("formula\n{t}");
    }
    if let Some(r) = &resolution {
        let t = BettiTable::from(r.xi.clone());
        value.insert("resolution".into(), table_json(&t));
        text += &format!("resolution\n{t}");
    }
    let mut agree = true;
    if let (Some(t), Some(r)) = (&formula, &resolution) {
        let report = compare(&m, t.clone(), r);
        agree = report.agree();
        value.insert("agree".into(), Value::Bool(agree));
        text += &format!("agree: {}\n", if agree { "yes" } else { "no" });
        for mm in &report.mismatches {
            text += &format!(
                "  beta_{} at {}: formula {} vs resolution {}\n",
                mm.j, mm.grade, mm.theorem, mm.resolution
            );
        }
    }
    emit(fmt, Value::Object(value), text);
    if let Some(path) = svg {
        let table = formula
            .clone()
            .unwrap_or_else(|| BettiTable::from(resolution.as_ref().expect("one method ran").xi.clone()));
        write_svg(path, &table, m.bounds(), &format!("Betti numbers of {}", input.display()))?;
    }
    if agree {
        Ok(())
    } else {
        Err(math("the two engines disagree"))
    }
}

fn cmd_frames(fmt: Format, input: &Path) -> Outcome {
    let m = load_module(input)?;
    let (s1, s2) = m.bounds();
    let mut rows = Vec::new();
    let mut text = String::from("grade    y  z  into                 outward\n");
    for g in grades_in((s1 + DEFAULT_PADDING, s2 + DEFAULT_PADDING)) {
        let into = restrict_into_frame(&m, g).barcode();
        let out = restrict_outward_frame(&m, g).barcode();
        let y = into.multiplicity(bigraded::Interval::new(2, 2));
        let z = out.multiplicity(bigraded::Interval::new(2, 2));
        text += &format!("{:<8} {y:>2} {z:>2}  {:<20} {}\n", g.to_string(), into.to_string(), out);
        rows.push(json!({
            "x": g.x, "y": g.y, "y_alpha": y, "z_alpha": z,
            "into": barcode_json(&into), "outward": barcode_json(&out),
        }));
    }
    emit(fmt, json!({ "frames": rows }), text);
    Ok(())
}

fn cmd_zigzag(fmt: Format, input: &Path) -> Outcome {
    let z = load_zigzag(input)?;
    let bc = z.barcode();
    let mut text = String::new();
    let dirs: Vec<&str> = z.directions().iter().map(|d| d.as_str()).collect();
    text += &format!("dims {:?}  arrows {}\n", z.dims(), dirs.join(" "));
    for (bar, mult) in bc.iter() {
        text += &format!("{bar} x{mult}\n");
    }
    text += &format!("{} bars\n", bc.total());
    emit(
        fmt,
        json!({"dims": z.dims(), "directions": dirs, "barcode": barcode_json(&bc), "total": bc.total()}),
        text,
    );
    Ok(())
}

fn cmd_resolve(fmt: Format, input: &Path, svg: Option<&Path>) -> Outcome {
    let m = load_module(input)?;
    let r = resolve(&m).map_err(math)?;
    let table = BettiTable::from(r.xi.clone());
    let mut text = format!("{table}");
    text += "grade    F0 K0 F1 K1 F2 K2\n";
    let mut rows = Vec::new();
    for g in grades_in(r.bounds()) {
        let dims: Vec<usize> = (0..3).flat_map(|j| [r.free(j).dim(g), r.kernel(j).dim(g)]).collect();
        text += &format!("{:<8}", g.to_string());
        for d in &dims {
            text += &format!(" {d:>2}");
        }
        text += "\n";
        rows.push(json!({
            "x": g.x, "y": g.y,
            "F": [dims[0], dims[2], dims[4]], "K": [dims[1], dims[3], dims[5]],
        }));
    }
    emit(
        fmt,
        json!({
            "xi": table_json(&table),
            "box": [r.bounds().0, r.bounds().1],
            "dims": rows,
            "syzygy_vanishes": r.syzygy_witness,
        }),
        text,
    );
    if let Some(path) = svg {
        write_svg(path, &table, m.bounds(), &format!("Resolution of {}", input.display()))?;
    }
    Ok(())
}

fn cmd_check(fmt: Format, input: &Path) -> Outcome {
    let m = load_module(input)?;
    let formula = betti_theorem(&m).map_err(math)?;
    let r = resolve(&m).map_err(math)?;
    let resolved = BettiTable::from(r.xi.clone());
    let mut failures: Vec<String> = Vec::new();
    let mut count = |name: &str, checks: Vec<(Grade, bool)>| -> usize {
        for (g, ok) in &checks {
            if !ok {
                failures.push(format!("{name} fails at {g}"));
            }
        }
        checks.len()
    };
    let mut grades_checked = 0;
    grades_checked += count("cumulative identity (formula)", hilbert_identity_check(&m, &formula));
    grades_checked += count("cumulative identity (resolution)", hilbert_identity_check(&m, &resolved));
    grades_checked += count("local identity (formula)", euler_local_check(&m, &formula));
    grades_checked += count("local identity (resolution)", euler_local_check(&m, &resolved));
    let (s1, s2) = m.bounds();
    let k0 = r.kernel(0);
    for g in grades_in((s1 + DEFAULT_PADDING, s2 + DEFAULT_PADDING)) {
        let d = intersection_diagnostic(&m, &r.steps[0], g);
        if !d.contained {
            failures.push(format!("intersection at {g} escapes the image"));
        }
        if !d.identity_ok {
            failures.push(format!(
                "intersection at {g}: dim {} != {} + {}",
                d.dim_i, d.dim_k, d.z
            ));
        }
        let zk = bigraded::zigzag::z_alpha(k0, g);
        if zk != 0 {
            failures.push(format!("z of the first kernel is {zk} at {g}"));
        }
        grades_checked += 3;
    }
    let ok = failures.is_empty();
    let mut text = format!("{grades_checked} checks, {} failed\n", failures.len());
    for f in &failures {
        text += &format!("  {f}\n");
    }
    emit(
        fmt,
        json!({"checks": grades_checked, "failures": failures, "ok": ok}),
        text,
    );
    if ok {
        Ok(())
    } else {
        Err(math("invariant check failed"))
    }
}

fn cmd_crosscheck_file(fmt: Format, input: &Path) -> Outcome {
    let m = load_module(input)?;
    let report = bigraded::crosscheck(&m).map_err(math)?;
    let agree = report.agree();
    let mut text = String::new();
    for mm in &report.mismatches {
        text += &format!(
            "beta_{} at {}: formula {} vs resolution {}\n",
            mm.j, mm.grade, mm.theorem, mm.resolution
        );
    }
    text += &format!("{}/1 agree\n", u8::from(agree));
    emit(
        fmt,
        json!({"cases": 1, "agree": u8::from(agree), "mismatches": report.mismatches.len()}),
        text,
    );
    if agree {
        Ok(())
    } else {
        Err(math("the two engines disagree"))
    }
}

fn cmd_crosscheck_random(fmt: Format, n: u64, seed: u64, field: u64) -> Outcome {
    let field = PrimeField::new(field).map_err(usage)?;
    let params = RandomModuleParams::default();
    let results: Vec<(u64, Result<bool, String>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let m = random_module(field, seed, i, params);
            (i, bigraded::crosscheck(&m).map(|r| r.agree()).map_err(|e| e.to_string()))
        })
        .collect();
    let mut agree = 0;
    let mut text = String::new();
    let mut failed = Vec::new();
    for (i, r) in &results {
        match r {
            Ok(true) => agree += 1,
            Ok(false) => {
                text += &format!("case {i}: engines disagree\n");
                failed.push(json!({"case": i, "error": "disagree"}));
            }
            Err(e) => {
                text += &format!("case {i}: {e}\n");
                failed.push(json!({"case": i, "error": e}));
            }
        }
    }
    text += &format!("{agree}/{n} agree\n");
    emit(
        fmt,
        json!({
            "cases": n, "agree": agree, "seed": seed,
            "field": field.modulus(), "failures": failed,
        }),
        text,
    );
    if agree == n {
        Ok(())
    } else {
        Err(math(format!("{} case(s) failed", n - agree)))
    }
}

fn cmd_isocheck(fmt: Format, first: &Path, second: &Path, cap: u64) -> Outcome {
    let a = load_module(first)?;
    let b = load_module(second)?;
    match search_isomorphism(&a, &b, cap) {
        Ok(s) => {
            let verdict = if s.isomorphic { "isomorphic" } else { "not isomorphic" };
            emit(
                fmt,
                json!({"isomorphic": s.isomorphic, "visited": s.visited}),
                format!("{verdict} ({} candidates examined)\n", s.visited),
            );
            Ok(())
        }
        Err(e @ IsoError::FieldMismatch(..)) => Err(usage(e)),
        Err(e) => Err(math(e)),
    }
}
