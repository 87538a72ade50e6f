//! Command-line front end for circle vector-field analysis.
//!
//! Exit codes: 0 success, 2 usage or unwritable output, 3 invalid input
//! (including fields that fail the smoothness check without
//! `--allow-nonsmooth`), 4 mode inapplicable, 5 not equivalent.

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use phaseline::analysis::AnalysisOpts;
use phaseline::circle::wrap;
use phaseline::equivalence::{Homeo, Orientation, PiecewiseLinearHomeo};
use phaseline::expr::{parse, validate_c1, VectorFieldExpr, DEFAULT_C1_TOL};
use phaseline::report::{
    input_digest, EquivalenceReport, PerturbationReport, Report, RobustnessCertificate,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 2;
const EXIT_INVALID_INPUT: u8 = 3;
const EXIT_INAPPLICABLE: u8 = 4;
const EXIT_INEQUIVALENT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "phaseline",
    version,
    about = "Fixed points, structural stability, equivalence, and verified \
             perturbations for dynamical systems on the circle"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Destabilize,
    Stabilize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Locate and classify fixed points and decide structural stability.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        root_tol: f64,
        #[arg(long, default_value_t = 8192)]
        scan_grid: usize,
        /// Analyze even if the field fails the C1 smoothness check.
        #[arg(long)]
        allow_nonsmooth: bool,
        #[arg(long)]
        json: bool,
    },
    /// Synthesize a verified perturbation and write the result next to the
    /// input.
    Perturb {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        allow_nonsmooth: bool,
        #[arg(long)]
        json: bool,
        /// Output path for the synthesized field (defaults to the input
        /// path with a mode suffix).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a candidate equivalence between two fields, or construct one.
    #[command(group(
        ArgGroup::new("homeo")
            .required(true)
            .args(["h", "h_breakpoints", "construct"]),
    ))]
    Equiv {
        file_f: PathBuf,
        file_g: PathBuf,
        /// Candidate map as a DSL expression in x.
        #[arg(long)]
        h: Option<String>,
        /// Candidate map as a breakpoint file with `x y` lines.
        #[arg(long)]
        h_breakpoints: Option<PathBuf>,
        /// Construct a piecewise linear equivalence instead.
        #[arg(long)]
        construct: bool,
        #[arg(long)]
        allow_nonsmooth: bool,
        #[arg(long)]
        json: bool,
    },
    /// Write (x, f(x), f'(x)) samples on a uniform grid to CSV.
    Sample {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate an orbit and write it to CSV.
    Flow {
        file: PathBuf,
        #[arg(long)]
        x0: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        /// Forward iterates to record.
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Backward iterates to record.
        #[arg(long, default_value_t = 0)]
        back: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let code = match run(cli.cmd, command_line) {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    };
    ExitCode::from(code)
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn run(cmd: Cmd, command_line: String) -> CmdResult {
    match cmd {
        Cmd::Analyze {
            file,
            root_tol,
            scan_grid,
            allow_nonsmooth,
            json,
        } => cmd_analyze(
            &file,
            root_tol,
            scan_grid,
            allow_nonsmooth,
            json,
            command_line,
        ),
        Cmd::Perturb {
            file,
            mode,
            epsilon,
            allow_nonsmooth,
            json,
            out,
        } => cmd_perturb(
            &file,
            mode,
            epsilon,
            allow_nonsmooth,
            json,
            out,
            command_line,
        ),
        Cmd::Equiv {
            file_f,
            file_g,
            h,
            h_breakpoints,
            construct,
            allow_nonsmooth,
            json,
        } => cmd_equiv(
            &file_f,
            &file_g,
            h,
            h_breakpoints,
            construct,
            allow_nonsmooth,
            json,
            command_line,
        ),
        Cmd::Sample { file, n, out } => cmd_sample(&file, n, &out),
        Cmd::Flow {
            file,
            x0,
            tau,
            steps,
            back,
            step,
            out,
        } => cmd_flow(&file, x0, tau, steps, back, step, &out),
    }
}

/// Reads, parses, and sanity-checks a field file.
fn load_field(path: &Path) -> Result<VectorFieldExpr, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INVALID_INPUT, format!("{}: {e}", path.display())))?;
    let f =
        parse(&text).map_err(|e| fail(EXIT_INVALID_INPUT, format!("{}: {e}", path.display())))?;
    f.check_finite(8192)
        .map_err(|e| fail(EXIT_INVALID_INPUT, format!("{}: {e}", path.display())))?;
    Ok(f)
}

/// Runs the smoothness gate shared by the analysis-facing commands.
fn smoothness_gate(
    f: &VectorFieldExpr,
    allow_nonsmooth: bool,
    report: &mut Report,
) -> Result<(), Failure> {
    let c1 = validate_c1(f, DEFAULT_C1_TOL);
    let ok = c1.overall;
    report.c1_report = Some(c1);
    if !ok {
        if allow_nonsmooth {
            report.warnings.push(
                "field is not C1 at the reported breakpoints; theorem hypotheses unmet".to_string(),
            );
        } else {
            return Err(fail(
                EXIT_INVALID_INPUT,
                "field fails the C1 smoothness check (rerun with --allow-nonsmooth to analyze anyway)",
            ));
        }
    }
    Ok(())
}

fn emit(report: &Report, json: bool) {
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
}

fn cmd_analyze(
    file: &Path,
    root_tol: f64,
    scan_grid: usize,
    allow_nonsmooth: bool,
    json: bool,
    command_line: String,
) -> CmdResult {
    let f = load_field(file)?;
    let mut report = Report::new(
        env!("CARGO_PKG_VERSION"),
        command_line,
        input_digest(&f.to_canonical_text()),
    );
    if let Err(failure) = smoothness_gate(&f, allow_nonsmooth, &mut report) {
        emit(&report, json);
        return Err(failure);
    }

    let opts = AnalysisOpts {
        root_tol,
        scan_grid,
        ..AnalysisOpts::default()
    };
    let set = phaseline::find_fixed_points(&f, &opts)
        .map_err(|e| fail(EXIT_INVALID_INPUT, e.to_string()))?;
    report.warnings.extend(set.warnings.clone());
    let verdict = phaseline::analysis::assess(&f, &opts)
        .map_err(|e| fail(EXIT_INVALID_INPUT, e.to_string()))?;
    report.certificates.robustness = RobustnessCertificate::from_verdict(&verdict);
    report.certificates.norm = phaseline::c1_norm(&f).ok();
    report.fixed_point_set = Some(set);
    report.verdict = Some(verdict);
    emit(&report, json);
    Ok(EXIT_OK)
}

fn cmd_perturb(
    file: &Path,
    mode: Mode,
    epsilon: f64,
    allow_nonsmooth: bool,
    json: bool,
    out: Option<PathBuf>,
    command_line: String,
) -> CmdResult {
    if !(epsilon > 0.0) {
        return Err(fail(EXIT_USAGE, "--epsilon must be positive"));
    }
    let f = load_field(file)?;
    let mut report = Report::new(
        env!("CARGO_PKG_VERSION"),
        command_line,
        input_digest(&f.to_canonical_text()),
    );
    if let Err(failure) = smoothness_gate(&f, allow_nonsmooth, &mut report) {
        emit(&report, json);
        return Err(failure);
    }
    let opts = AnalysisOpts::default();

    let (g, mut summary) = match mode {
        Mode::Destabilize => {
            let r = phaseline::destabilize(&f, epsilon, &opts).map_err(|e| match e {
                phaseline::Error::StableInput => fail(
                    EXIT_INAPPLICABLE,
                    "field is structurally stable; destabilize does not apply",
                ),
                other => fail(EXIT_INVALID_INPUT, other.to_string()),
            })?;
            let dist = r.perturbation.measured_norm;
            (
                r.g.clone(),
                PerturbationReport {
                    mode: "destabilize".into(),
                    perturbation: r.perturbation,
                    measured_distance: dist,
                    output_text: String::new(),
                    evidence: Some(r.evidence),
                },
            )
        }
        Mode::Stabilize => {
            let r = phaseline::stabilize(&f, epsilon, &opts)
                .map_err(|e| fail(EXIT_INVALID_INPUT, e.to_string()))?;
            let perturbation = summarize_stages(&f, &r);
            (
                r.g.clone(),
                PerturbationReport {
                    mode: "stabilize".into(),
                    perturbation,
                    measured_distance: r.total_distance,
                    output_text: String::new(),
                    evidence: None,
                },
            )
        }
    };

    let out_path = out.unwrap_or_else(|| {
        let suffix = match mode {
            Mode::Destabilize => "destabilized",
            Mode::Stabilize => "stabilized",
        };
        let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("field");
        file.with_file_name(format!("{stem}.{suffix}.vf"))
    });
    let text = format!("{}\n", g.to_canonical_text());
    std::fs::write(&out_path, &text)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", out_path.display())))?;

    summary.output_text = out_path.display().to_string();
    report.perturbation = Some(summary);
    // Record the verdict of the synthesized field so the report is
    // self-checking.
    let verdict = phaseline::analysis::assess(&g, &opts)
        .map_err(|e| fail(EXIT_INVALID_INPUT, e.to_string()))?;
    report.certificates.robustness = RobustnessCertificate::from_verdict(&verdict);
    report.verdict = Some(verdict);
    emit(&report, json);
    Ok(EXIT_OK)
}

/// Collapses the stage list into one reportable perturbation.
fn summarize_stages(
    f: &VectorFieldExpr,
    r: &phaseline::perturb::StabilizeResult,
) -> phaseline::Perturbation {
    if r.stages.len() == 1 {
        return r.stages[0].clone();
    }
    phaseline::Perturbation {
        expr: phaseline::expr::difference(&r.g, f),
        sigma: 1.0,
        support: phaseline::Arc::full(),
        measured_norm: r.total_distance,
        recipe: phaseline::Recipe::Composite,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_equiv(
    file_f: &Path,
    file_g: &Path,
    h: Option<String>,
    h_breakpoints: Option<PathBuf>,
    construct: bool,
    allow_nonsmooth: bool,
    json: bool,
    command_line: String,
) -> CmdResult {
    let f = load_field(file_f)?;
    let g = load_field(file_g)?;
    let mut report = Report::new(
        env!("CARGO_PKG_VERSION"),
        command_line,
        input_digest(&format!(
            "{}\n{}",
            f.to_canonical_text(),
            g.to_canonical_text()
        )),
    );
    for (field, name) in [(&f, file_f), (&g, file_g)] {
        let c1 = validate_c1(field, DEFAULT_C1_TOL);
        if !c1.overall && !allow_nonsmooth {
            report.c1_report = Some(c1);
            emit(&report, json);
            return Err(fail(
                EXIT_INVALID_INPUT,
                format!("{}: field fails the C1 smoothness check", name.display()),
            ));
        }
    }
    let opts = AnalysisOpts::default();

    if construct {
        match phaseline::build_plh(&f, &g, &opts) {
            Ok(plh) => {
                let homeo = Homeo::Plh(plh.clone());
                let verdict = phaseline::check_equivalence(&f, &g, &homeo, &opts)
                    .map_err(|e| fail(EXIT_INVALID_INPUT, e.to_string()))?;
                report.equivalence = Some(EquivalenceReport {
                    verdict,
                    breakpoints: Some(
                        plh.breakpoints
                            .iter()
                            .map(|(x, y)| (x.position(), y.position()))
                            .collect(),
                    ),
                });
                emit(&report, json);
                Ok(EXIT_OK)
            }
            Err(phaseline::Error::NoEquivalence(detail)) => {
                report.warnings.push(format!("no equivalence: {detail}"));
                emit(&report, json);
                Ok(EXIT_INEQUIVALENT)
            }
            Err(e) => Err(fail(EXIT_INVALID_INPUT, e.to_string())),
        }
    } else {
        let homeo = if let Some(expr_text) = h {
            let map =
                parse(&expr_text).map_err(|e| fail(EXIT_USAGE, format!("--h expression: {e}")))?;
            Homeo::Map(map)
        } else {
            let path = h_breakpoints.expect("clap group guarantees one source");
            Homeo::Plh(load_breakpoints(&path)?)
        };
        match phaseline::check_equivalence(&f, &g, &homeo, &opts) {
            Ok(verdict) => {
                let equivalent = verdict.equivalent;
                report.equivalence = Some(EquivalenceReport {
                    verdict,
                    breakpoints: None,
                });
                emit(&report, json);
                Ok(if equivalent {
                    EXIT_OK
                } else {
                    EXIT_INEQUIVALENT
                })
            }
            Err(phaseline::Error::NotAHomeomorphism(detail)) => {
                report
                    .warnings
                    .push(format!("candidate rejected: not a homeomorphism: {detail}"));
                emit(&report, json);
                Ok(EXIT_INEQUIVALENT)
            }
            Err(e) => Err(fail(EXIT_INVALID_INPUT, e.to_string())),
        }
    }
}

/// Breakpoint files carry one `x y` pair per line; `#` comments allowed.
fn load_breakpoints(path: &Path) -> Result<PiecewiseLinearHomeo, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INVALID_INPUT, format!("{}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse_num = |p: Option<&str>| -> Result<f64, Failure> {
            p.and_then(|s| s.parse().ok()).ok_or_else(|| {
                fail(
                    EXIT_INVALID_INPUT,
                    format!("{}:{}: expected `x y`", path.display(), lineno + 1),
                )
            })
        };
        let x = parse_num(parts.next())?;
        let y = parse_num(parts.next())?;
        pairs.push((wrap(x), wrap(y)));
    }
    for orientation in [Orientation::Increasing, Orientation::Decreasing] {
        if let Ok(plh) = PiecewiseLinearHomeo::new(pairs.clone(), orientation) {
            if Homeo::Plh(plh.clone()).orientation().is_ok() {
                return Ok(plh);
            }
        }
    }
    Err(fail(
        EXIT_INVALID_INPUT,
        format!(
            "{}: breakpoints do not describe a homeomorphism",
            path.display()
        ),
    ))
}

fn cmd_sample(file: &Path, n: usize, out: &Path) -> CmdResult {
    if n == 0 {
        return Err(fail(EXIT_USAGE, "--n must be positive"));
    }
    let f = load_field(file)?;
    let mut csv = String::from("x,f,fprime\n");
    for i in 0..n {
        let x = i as f64 / n as f64;
        csv.push_str(&format!(
            "{:.12e},{:.12e},{:.12e}\n",
            x,
            f.eval(x),
            f.eval_deriv(x)
        ));
    }
    std::fs::write(out, csv).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", out.display())))?;
    Ok(EXIT_OK)
}

fn cmd_flow(
    file: &Path,
    x0: f64,
    tau: f64,
    steps: usize,
    back: usize,
    step: f64,
    out: &Path,
) -> CmdResult {
    let f = load_field(file)?;
    let orbit = phaseline::integrate(&f, wrap(x0), tau, back, steps, step)
        .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let mut csv = String::from("n,t,position,lift\n");
    for s in &orbit.samples {
        csv.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e}\n",
            s.n,
            s.t,
            s.position.position(),
            s.lift
        ));
    }
    std::fs::write(out, csv).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", out.display())))?;
    Ok(EXIT_OK)
}
