//! Command-line front end. [`run`] takes the argument list and returns the
//! text to print, so the binary stays a thin wrapper.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::analysis::{
    compare_pipelines_with, error_poly_bound, error_poly_with, expected_cost, parse_probability, success_poly_with,
    CompareOptions, DistillerModel,
};
use crate::error::{parse_err, Error, Result};
use crate::gf2::BitMatrix;
use crate::polys::{parse_target, weighted_from_matrix, WeightedPolynomial};
use crate::synthesis::{
    check_equivalence, controlled_target, emit_circuit, mu_decompose, synthesize, synthesize_controlled,
    tensor_subadditive, MatrixRole, Method, SynthesisMatrix, SynthesisResult,
};
use crate::synthillation::{build_g, distance_with_limit, verify_quasitransversal, GMatrix, DISTANCE_LIMIT};

/// Environment variable holding the default enumeration limit.
pub const ENUM_LIMIT_VAR: &str = "SYNTHILL_ENUM_LIMIT";

#[derive(Debug, Parser)]
#[command(name = "synthill", version, about = "T-count synthesis and synthillation protocol compiler")]
pub struct Cli {
    /// Column/span limit for exhaustive enumeration [env: SYNTHILL_ENUM_LIMIT, default 24]
    #[arg(long, global = true)]
    pub enum_limit: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Optimal,
    Fast,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Optimal => Method::Optimal,
            MethodArg::Fast => Method::Fast,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gate-synthesis matrix, T-count and Clifford witness for a target
    Synth {
        /// Polynomial or circuit file, `-` for stdin
        input: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Also print a CNOT+T+Clifford circuit
        #[arg(long)]
        circuit: bool,
    },
    /// μ, the Lempel matrix B and the cubic remainder
    Mu { input: String },
    /// Optimal synthesis of the controlled version of a target
    Controlled {
        input: String,
        /// 1-based position of the control qubit [default: last]
        #[arg(long)]
        control: Option<usize>,
    },
    /// Subadditive synthesis of the tensor product of two gates
    Tensor {
        /// Matrix, polynomial or circuit file; a matrix must have odd T-count
        first: String,
        second: String,
    },
    /// Build the distillation matrix G for a target
    Synthillate {
        input: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Write the G file here and print only the summary
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Success probability and output error series of a G file
    Analyze {
        input: String,
        #[arg(long, default_value_t = 5)]
        order: usize,
        /// Evaluate at a raw error rate, e.g. `e=0.001`
        #[arg(long)]
        eval: Option<String>,
        /// Print the closed-form upper bound as well
        #[arg(long)]
        bound: bool,
    },
    /// Check a G file, or a synth result, against its target
    Verify {
        input: String,
        /// Target file when the input lacks a target section
        #[arg(long)]
        target: Option<String>,
    },
    /// Raw-state cost of synthillation versus distill-then-synthesize
    Estimate {
        input: String,
        /// Raw T-state error rate
        #[arg(long, default_value = "0.001")]
        eps: String,
        /// Required gate error
        #[arg(long = "target")]
        eps_target: String,
        #[arg(long, default_value_t = 6)]
        max_rounds: usize,
        /// Distiller output error is (slope*k + intercept)*e^2
        #[arg(long, default_value_t = 3)]
        distiller_slope: usize,
        #[arg(long, default_value_t = 1)]
        distiller_intercept: usize,
        /// Outputs per precursor distillation block
        #[arg(long, default_value_t = 10)]
        batch: usize,
        #[arg(long)]
        csv: bool,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(e.to_string()),
                _ => {
                    let msg = e.to_string();
                    Err(Error::Usage(msg.strip_prefix("error: ").unwrap_or(&msg).trim_end().to_string()))
                }
            };
        }
    };
    let limit = match cli.enum_limit {
        Some(l) => l,
        None => env_limit()?,
    };
    execute(&cli.command, limit)
}

fn env_limit() -> Result<usize> {
    match std::env::var(ENUM_LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("{ENUM_LIMIT_VAR}={v:?} is not a count"))),
        Err(_) => Ok(DISTANCE_LIMIT),
    }
}

fn read_input(path: &str) -> Result<String> {
    let io = |e: std::io::Error| Error::Io {
        path: path.to_string(),
        msg: e.to_string(),
    };
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn looks_like_matrix(text: &str) -> bool {
    let mut rows = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .peekable();
    rows.peek().is_some() && rows.all(|l| l.chars().all(|c| c == '0' || c == '1' || c.is_whitespace()))
}

fn execute(cmd: &Command, limit: usize) -> Result<String> {
    match cmd {
        Command::Synth { input, method, circuit } => {
            let f = parse_target(&read_input(input)?)?;
            let r = synthesize(&f, (*method).into())?;
            let mut out = synth_report(&r, &f);
            if *circuit {
                out.push_str("circuit\n");
                out.push_str(&emit_circuit(&r.matrix, &f)?.to_string());
            }
            Ok(out)
        }
        Command::Mu { input } => {
            let f = parse_target(&read_input(input)?)?;
            let d = mu_decompose(&f)?;
            let mut out = format!("mu={}\nmatrix\n", d.mu);
            out.push_str(&matrix_text(d.b.matrix()));
            out.push_str("cubic\n");
            out.push_str(&d.cubic_remainder.to_string());
            Ok(out)
        }
        Command::Controlled { input, control } => {
            let g = parse_target(&read_input(input)?)?;
            let c = match control {
                Some(0) => return Err(Error::Usage("--control is 1-based".into())),
                Some(c) => c - 1,
                None => g.k(),
            };
            let r = synthesize_controlled(&g, c)?;
            Ok(synth_report(&r, &controlled_target(&g, c)?))
        }
        Command::Tensor { first, second } => {
            let (a1, f1) = tensor_operand(first)?;
            let (a2, f2) = tensor_operand(second)?;
            let a = tensor_subadditive(&a1, &a2)?;
            let f = f1.direct_sum(&f2);
            let r = SynthesisResult::from_matrix(a, &f, false)?;
            Ok(synth_report(&r, &f))
        }
        Command::Synthillate { input, method, output } => {
            let f = parse_target(&read_input(input)?)?;
            let a = synthesize(&f, (*method).into())?;
            let b = mu_decompose(&f)?;
            let g = build_g(&f, &a.matrix, &b.b)?;
            let summary = format!(
                "# n={} case={} delta={} tau={} mu={} distance={}\n",
                g.n(),
                g.case_id(),
                g.delta(),
                a.t_count,
                b.mu,
                distance_with_limit(&g, limit)
            );
            match output {
                Some(path) => {
                    std::fs::write(path, g.to_string()).map_err(|e| Error::Io {
                        path: path.display().to_string(),
                        msg: e.to_string(),
                    })?;
                    Ok(summary)
                }
                None => Ok(summary + &g.to_string()),
            }
        }
        Command::Analyze { input, order, eval, bound } => analyze(&read_input(input)?, *order, eval.as_deref(), *bound, limit),
        Command::Verify { input, target } => {
            let target = target.as_deref().map(read_input).transpose()?.map(|t| parse_target(&t)).transpose()?;
            verify(&read_input(input)?, target, limit)
        }
        Command::Estimate {
            input,
            eps,
            eps_target,
            max_rounds,
            distiller_slope,
            distiller_intercept,
            batch,
            csv,
        } => {
            let f = parse_target(&read_input(input)?)?;
            let e = parse_probability(eps)?;
            let t = parse_probability(eps_target)?;
            if *batch == 0 {
                return Err(Error::Usage("--batch must be positive".into()));
            }
            let model = DistillerModel {
                slope: *distiller_slope,
                intercept: *distiller_intercept,
                batch: *batch,
                ..DistillerModel::default()
            };
            let a = synthesize(&f, Method::Auto)?;
            let b = mu_decompose(&f)?;
            let g = build_g(&f, &a.matrix, &b.b)?;
            let opts = CompareOptions {
                max_rounds: *max_rounds,
                span_limit: limit,
            };
            let c = compare_pipelines_with(a.t_count, &g, &e, &t, &model, &opts)?;
            Ok(if *csv { c.to_csv() } else { c.to_string() })
        }
    }
}

fn matrix_text(m: &BitMatrix) -> String {
    if m.cols() == 0 {
        String::new()
    } else {
        m.to_string()
    }
}

fn synth_report(r: &SynthesisResult, target: &WeightedPolynomial) -> String {
    let mut out = format!("t-count={} optimal={}\nmatrix\n", r.t_count, r.optimal);
    out.push_str(&matrix_text(r.matrix.matrix()));
    out.push_str("witness\n");
    out.push_str(&r.clifford_witness.to_string());
    out.push_str("target\n");
    out.push_str(&target.to_string());
    out
}

fn tensor_operand(path: &str) -> Result<(SynthesisMatrix, WeightedPolynomial)> {
    let text = read_input(path)?;
    if looks_like_matrix(&text) {
        let a = SynthesisMatrix::new(BitMatrix::parse(&text)?, MatrixRole::A);
        let f = a.function();
        Ok((a, f))
    } else {
        let f = parse_target(&text)?;
        Ok((synthesize(&f, Method::Auto)?.matrix, f))
    }
}

/// Sections of a synth report keyed by their header line.
fn sections(text: &str) -> Vec<(String, usize, Vec<(usize, &str)>)> {
    let mut out: Vec<(String, usize, Vec<(usize, &str)>)> = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let t = line.trim();
        if matches!(t, "matrix" | "witness" | "target" | "circuit") {
            out.push((t.to_string(), i + 1, Vec::new()));
        } else if let Some(last) = out.last_mut() {
            last.2.push((i + 1, line));
        } else if !t.is_empty() {
            out.push((String::new(), i + 1, vec![(i + 1, line)]));
        }
    }
    out
}

fn section_text(lines: &[(usize, &str)]) -> String {
    lines.iter().map(|(_, l)| format!("{l}\n")).collect()
}

fn reline(e: Error, offset: usize) -> Error {
    match e {
        Error::Parse { line, msg } => parse_err(line + offset, msg),
        other => other,
    }
}

fn verify(text: &str, target: Option<WeightedPolynomial>, limit: usize) -> Result<String> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| parse_err(1, "empty input"))?;
    if first.starts_with("G ") {
        let g = GMatrix::parse_with_target(text, target)?;
        g.check_invariants()?;
        let w = verify_quasitransversal(&g)?;
        let mut out = format!(
            "ok: quasitransversal n={} k={} s={} case={} distance={}\nwitness\n",
            g.n(),
            g.k(),
            g.s(),
            g.case_id(),
            distance_with_limit(&g, limit)
        );
        out.push_str(&w.f_tilde.to_string());
        return Ok(out);
    }
    let (matrix, claimed, witness, claimed_tau) = if let Some(rest) = first.strip_prefix("t-count=") {
        let tau: usize = rest
            .split_whitespace()
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| parse_err(1, "bad t-count header"))?;
        let mut matrix = None;
        let mut witness = None;
        let mut claimed = None;
        for (name, at, lines) in sections(text) {
            let body = section_text(&lines);
            match name.as_str() {
                "matrix" => {
                    matrix = Some(if body.trim().is_empty() {
                        None
                    } else {
                        Some(BitMatrix::parse(&body).map_err(|e| reline(e, at))?)
                    })
                }
                "witness" => witness = Some(WeightedPolynomial::parse(&body).map_err(|e| reline(e, at))?),
                "target" => claimed = Some(parse_target(&body).map_err(|e| reline(e, at))?),
                "circuit" => {}
                _ => return Err(parse_err(at, format!("unexpected section {name:?}"))),
            }
        }
        let matrix = matrix.ok_or_else(|| parse_err(1, "missing matrix section"))?;
        (matrix, claimed, witness, Some(tau))
    } else if looks_like_matrix(text) {
        (Some(BitMatrix::parse(text)?), None, None, None)
    } else {
        return Err(parse_err(1, "expected a G file, a synth report or a matrix"));
    };
    let f = target
        .or(claimed)
        .ok_or_else(|| Error::Usage("no target: pass --target or include a target section".into()))?;
    let a = matrix.unwrap_or_else(|| BitMatrix::zeros(f.k(), 0));
    if a.rows() != f.k() {
        return Err(Error::Dimension(format!("matrix has {} rows for a {}-variable target", a.rows(), f.k())));
    }
    let w = check_equivalence(&a, &f)?;
    if let Some(tau) = claimed_tau {
        if tau != a.cols() {
            return Err(Error::Precondition(format!("header says t-count={tau} but the matrix has {} columns", a.cols())));
        }
    }
    if let Some(claimed) = witness {
        // Reports state the witness with |A^T x| = F + 2 F̃.
        let stated = (&weighted_from_matrix(&a) - &f).halve();
        if Some(claimed.widen(f.k().max(claimed.k()))) != stated {
            return Err(Error::Precondition("stated witness does not match halve(|A^T x| - F)".into()));
        }
    }
    let mut out = format!("ok: clifford-equivalent t-count={}\nwitness\n", a.cols());
    out.push_str(&w.to_string());
    Ok(out)
}

fn parse_eval(spec: &str) -> Result<BigRational> {
    let v = spec.strip_prefix("e=").unwrap_or(spec);
    parse_probability(v)
}

fn decimal(r: &BigRational) -> String {
    format!("{:.12e}", r.to_f64().unwrap_or(f64::NAN))
}

fn analyze(text: &str, order: usize, eval: Option<&str>, bound: bool, limit: usize) -> Result<String> {
    let g = parse_untargeted(text)?;
    let mut out = String::new();
    let _ = writeln!(out, "n={} k={} s={} case={}", g.n(), g.k(), g.s(), g.case_id());
    let e = eval.map(parse_eval).transpose()?;
    match error_poly_with(&g, order, limit) {
        Ok(ep) => {
            let _ = writeln!(out, "p_suc = {}", ep.p_suc);
            let _ = writeln!(out, "eps_out = {}", ep.series());
            let _ = writeln!(out, "p_suc - accept = {}", ep.failure_numerator());
            if let Some(e) = &e {
                let p = ep.p_suc.eval(e);
                let _ = writeln!(out, "at e={}: p_suc={} eps_out={} cost={}", decimal(e), decimal(&p), decimal(&ep.eps_out_at(e)), decimal(&expected_cost(&g, e)?));
            }
        }
        Err(Error::Limit { .. }) => {
            let p = success_poly_with(&g, limit)?;
            let _ = writeln!(out, "p_suc = {p}");
            let _ = writeln!(out, "eps_out = unavailable: k+s exceeds the enumeration limit {limit}");
            if let Some(e) = &e {
                let _ = writeln!(out, "at e={}: p_suc={} cost={}", decimal(e), decimal(&p.eval(e)), decimal(&expected_cost(&g, e)?));
            }
        }
        Err(other) => return Err(other),
    }
    if bound {
        let b = error_poly_bound(&g)?;
        let _ = writeln!(out, "bound: eps_out <= {b}");
        if let Some(e) = &e {
            let _ = writeln!(out, "bound at e={}: {}", decimal(e), decimal(&b.eval(e)));
        }
    }
    Ok(out)
}

// Analysis never reads the target, so any target section is replaced.
fn parse_untargeted(text: &str) -> Result<GMatrix> {
    let k = text
        .lines()
        .find(|l| l.trim_start().starts_with("G "))
        .and_then(|l| l.split_whitespace().find_map(|t| t.strip_prefix("k=")?.parse::<usize>().ok()))
        .ok_or_else(|| parse_err(1, "missing `G k=..` header"))?;
    GMatrix::parse_with_target(text, Some(WeightedPolynomial::zero(k)))
}

