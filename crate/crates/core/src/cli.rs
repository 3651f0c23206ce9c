//! Command-line front end.
//!
//! Exit codes: 0 for success, an admissible diagonal or a consistent
//! integer; 2 for a valid negative verdict; 1 for bad input or usage.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bj::{bj_analyze, BJReport, BJVerdict};
use crate::canonical::{pair_index, Cardinal};
use crate::error::{Error, Result};
use crate::io::{self, ProjectionInput};
use crate::kadison::{check_diagonal_with, construct_projection_with, KadisonReport, Verdict};
use crate::operators::ProjectionPair;
use crate::selftest::{self, SelftestReport};
use crate::tolerance::{snap, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "projpair", version, about = "Pairs of projections and their essential codimension")]
struct Cli {
    /// Print the machine report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Relative rank and multiplicity threshold.
    #[arg(long, global = true, value_name = "TOL")]
    tol_rank: Option<f64>,
    /// Integer snap distance for admissibility.
    #[arg(long, global = true, value_name = "TOL")]
    tol_int: Option<f64>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Intersection dimensions and angles of a pair.
    Halmos { p: PathBuf, q: PathBuf },
    /// `[p:q]` by three routes.
    Esscodim { p: PathBuf, q: PathBuf },
    /// Admissibility of a candidate diagonal.
    KadisonCheck { sequence: PathBuf },
    /// A projection with the given diagonal.
    KadisonBuild { sequence: PathBuf },
    /// The integer attached to a finite-spectrum operator.
    Bj { operator: PathBuf },
    /// Seeded property suites.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Serialize)]
struct HalmosReport {
    window: usize,
    n11: Cardinal,
    n10: Cardinal,
    n01: Cardinal,
    n00: Cardinal,
    generic_dim: usize,
    svals: Vec<f64>,
    index: Option<i64>,
    reconstruction_error: f64,
}

#[derive(Debug, Serialize)]
struct EsscodimReport {
    index: i64,
    kernel: usize,
    cokernel: usize,
    corner_trace: f64,
    halmos_index: i64,
}

#[derive(Debug, Serialize)]
struct BuildReport {
    #[serde(flatten)]
    check: KadisonReport,
    projection: serde_json::Value,
}

/// Outcome of a subcommand: the report and whether its verdict is negative.
struct Outcome {
    text: String,
    json: String,
    negative: bool,
}

impl Outcome {
    fn new<T: Serialize>(report: &T, text: String, negative: bool) -> Self {
        Outcome {
            text,
            json: io::report_json(report),
            negative,
        }
    }
}

pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol_rank {
        tol.rank = t;
    }
    if let Some(t) = cli.tol_int {
        tol.int_snap = t;
    }
    match run(&cli.command, &tol) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &out.json) {
                    eprintln!("error: {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            if cli.json {
                print!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            if out.negative {
                EXIT_NEGATIVE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error that ends a subcommand.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotFredholm(_)
        | Error::NotTraceClass(_)
        | Error::IndexObstruction { .. }
        | Error::DiagonalObstruction { .. }
        | Error::NotApplicable(_)
        | Error::RouteDisagreement(_) => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn run(cmd: &Command, tol: &Tolerances) -> Result<Outcome> {
    match cmd {
        Command::Halmos { p, q } => halmos(&load_pair(p, q)?.with_tolerances(*tol)),
        Command::Esscodim { p, q } => esscodim(&load_pair(p, q)?.with_tolerances(*tol), tol),
        Command::KadisonCheck { sequence } => {
            let d = io::load_sequence(sequence)?;
            let r = check_diagonal_with(&d, tol);
            Ok(Outcome::new(&r, kadison_text(&r), !r.is_admissible()))
        }
        Command::KadisonBuild { sequence } => {
            let d = io::load_sequence(sequence)?;
            let check = check_diagonal_with(&d, tol);
            let p = construct_projection_with(&d, tol)?;
            let doc = io::projection_to_json(&p);
            let report = BuildReport {
                check,
                projection: serde_json::from_str(&doc).expect("projection documents parse"),
            };
            let text = format!("{}projection:\n{doc}\n", kadison_text(&check));
            Ok(Outcome::new(&report, text, false))
        }
        Command::Bj { operator } => {
            let z = io::load_spectrum(operator)?;
            let r = bj_analyze(&z, tol)?;
            let negative = r.verdict != BJVerdict::Consistent;
            Ok(Outcome::new(&r, bj_text(&r), negative))
        }
        Command::Selftest { seed, trials } => {
            let r = selftest::run(*seed, *trials, tol);
            Ok(Outcome::new(&r, selftest_text(&r), !r.all_passed))
        }
    }
}

fn load_pair(p: &Path, q: &Path) -> Result<ProjectionPair> {
    match (io::load_projection(p)?, io::load_projection(q)?) {
        (ProjectionInput::Dense(p), ProjectionInput::Dense(q)) => ProjectionPair::dense(&p, &q),
        (ProjectionInput::Tailed(p), ProjectionInput::Tailed(q)) => Ok(ProjectionPair::tailed(&p, &q)),
        _ => Err(Error::Validation(
            "p and q must both be dense or both be tailed".into(),
        )),
    }
}

fn halmos(pair: &ProjectionPair) -> Result<Outcome> {
    let h = pair.halmos()?;
    let index = pair_index(&h.cp).ok();
    let r = HalmosReport {
        window: pair.window(),
        n11: h.cp.n11,
        n10: h.cp.n10,
        n01: h.cp.n01,
        n00: h.cp.n00,
        generic_dim: h.counts[4],
        svals: h.svals.clone(),
        index,
        reconstruction_error: h.reconstruction_error(pair),
    };
    let mut text = format!(
        "window {}\ndim p∧q = {}, p∧q⊥ = {}, p⊥∧q = {}, p⊥∧q⊥ = {}\ngeneric part: {} angle pairs\n",
        r.window, r.n11, r.n10, r.n01, r.n00, r.generic_dim
    );
    if !r.svals.is_empty() {
        let s: Vec<String> = r.svals.iter().map(|s| format!("{s:.6}")).collect();
        text += &format!("s = [{}]\n", s.join(", "));
    }
    match index {
        Some(i) => text += &format!("[p:q] = {i}\n"),
        None => text += "not a Fredholm pair\n",
    }
    text += &format!("reconstruction error {:.2e}\n", r.reconstruction_error);
    Ok(Outcome::new(&r, text, index.is_none()))
}

fn esscodim(pair: &ProjectionPair, tol: &Tolerances) -> Result<Outcome> {
    let fd = pair.fredholm_data()?;
    let corner_trace = pair.corner_trace()?;
    let halmos_index = pair_index(&pair.halmos()?.cp)?;
    if snap(corner_trace, tol.route) != Some(fd.index) || halmos_index != fd.index {
        return Err(Error::RouteDisagreement(format!(
            "kernel/cokernel {}, corner trace {corner_trace}, Halmos {halmos_index}",
            fd.index
        )));
    }
    let r = EsscodimReport {
        index: fd.index,
        kernel: fd.kernel,
        cokernel: fd.cokernel,
        corner_trace,
        halmos_index,
    };
    let text = format!(
        "[p:q] = {}\nkernel {}, cokernel {}\ncorner trace {:.9}\nHalmos index {}\n",
        r.index, r.kernel, r.cokernel, r.corner_trace, r.halmos_index
    );
    Ok(Outcome::new(&r, text, false))
}

fn ext(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn kadison_text(r: &KadisonReport) -> String {
    let mut s = format!("a = {}, b = {}\n", ext(r.a), ext(r.b));
    match r.verdict {
        Verdict::Admissible => {
            s += "admissible";
            if let Some(n) = r.integer {
                s += &format!(", a - b = {n}");
            }
            s += "\n";
        }
        Verdict::Rejected { defect } => s += &format!("rejected: a - b is {defect} away from an integer\n"),
    }
    s
}

fn bj_text(r: &BJReport) -> String {
    let mut s = format!("a = {}, b = {}\n", ext(r.a), ext(r.b));
    match &r.verdict {
        BJVerdict::NotApplicable { reason } => s += &format!("not applicable: {reason}\n"),
        v => {
            let mults: Vec<String> = r.middle_mults.iter().map(|c| c.to_string()).collect();
            s += &format!(
                "middle multiplicities [{}]\nweighted trace {}\na - b - weighted trace = {}\n",
                mults.join(", "),
                r.weighted_trace,
                r.raw
            );
            if let Some(e) = r.esscodim {
                s += &format!("[p_top:q] = {e}\n");
            }
            s += if *v == BJVerdict::Consistent { "consistent\n" } else { "inconsistent\n" };
        }
    }
    s
}

fn selftest_text(r: &SelftestReport) -> String {
    let mut s = format!("seed {}, {} trials per suite\n", r.seed, r.trials);
    for suite in &r.suites {
        s += &format!("{:<24} {}/{}\n", suite.name, suite.passed, suite.trials);
        for f in &suite.failures {
            s += &format!("    {f}\n");
        }
    }
    let total: usize = r.suites.iter().map(|x| x.passed).sum();
    let all: usize = r.suites.iter().map(|x| x.trials).sum();
    s += &format!("passed {total}/{all}\n");
    s
}
