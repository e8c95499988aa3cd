mod args;
mod output;

use args::{AnalyzeArgs, BuildArgs, Cli, Command, Format, StateArgs, SweepArgs, Table1Args, Tolerances, CEILING_ENV};
use clap::Parser;
use mzi_qfi::audit::{self, SweepPoint};
use mzi_qfi::factory::{solve_param_for_nbar, DEFAULT_CUTOFF_CEILING};
use mzi_qfi::qfi::{FiniteDifference, QfiOptions, RouteTolerances};
use mzi_qfi::report::{analyze_state, to_json, Source};
use mzi_qfi::state_file::{read_state, write_state};
use mzi_qfi::{build, AnalysisOptions, BuildConfig, CutoffPolicy, Error, Family, FockState, Probe, ProbeSpec};
use num_complex::Complex64;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_ROUTES: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Failure of a command, mapped to exit code 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error[usage]: {m}"),
            Failure::Core(e) => write!(f, "error[{}]: {e}", e.code()),
            Failure::Io(m) => write!(f, "error[io]: {m}"),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config().and_then(|cfg| match cli.command {
        Command::Analyze(a) => analyze(a, &cfg),
        Command::Table1(a) => table1(a, &cfg),
        Command::Sweep(a) => sweep(a, &cfg),
        Command::Build(a) => build_state(a, &cfg),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn build_config() -> Result<BuildConfig, Failure> {
    let mut cfg = BuildConfig::default();
    if let Ok(raw) = std::env::var(CEILING_ENV) {
        cfg.cutoff_ceiling = raw
            .trim()
            .parse()
            .ok()
            .filter(|&c: &usize| c > 0)
            .ok_or_else(|| Failure::Usage(format!("{CEILING_ENV} must be a positive integer, got {raw:?}")))?;
    } else {
        cfg.cutoff_ceiling = DEFAULT_CUTOFF_CEILING;
    }
    Ok(cfg)
}

fn analysis_options(t: &Tolerances) -> AnalysisOptions {
    let tolerances = t.route_tol.map(RouteTolerances::uniform).unwrap_or_default();
    AnalysisOptions {
        qfi: QfiOptions {
            step: t.step,
            scheme: if t.raw_fd {
                FiniteDifference::Central
            } else {
                FiniteDifference::Richardson
            },
            tolerances,
        },
        symmetry_tolerance: t.sym_tol,
        separability_tolerance: t.sep_tol,
    }
}

/// The native parameter flag a family takes.
fn native_flag(family: Family) -> &'static str {
    match family {
        Family::TwinSqueezedVacuum | Family::AmplifiedBell => "--xi",
        Family::TwoModeSqueezedVacuum => "--chi",
        Family::Coherent | Family::EntangledCoherent => "--alpha",
        _ => "--n",
    }
}

fn resolve_probe(s: &StateArgs, cfg: &BuildConfig) -> Result<(ProbeSpec, Option<mzi_qfi::factory::NbarSolution>), Failure> {
    let family: Family = s
        .family
        .ok_or_else(|| Failure::Usage("--family is required".into()))?
        .into();
    let flag = native_flag(family);
    let given: Vec<(&str, bool)> = vec![
        ("--n", s.n.is_some()),
        ("--xi", s.xi.is_some()),
        ("--chi", s.chi.is_some()),
        ("--alpha", s.alpha.is_some()),
    ];
    if let Some((other, _)) = given.iter().find(|(name, set)| *set && *name != flag) {
        return Err(Failure::Usage(format!("{other} does not apply to {family}; use {flag}")));
    }
    let native = match family {
        Family::TwinSqueezedVacuum | Family::AmplifiedBell => s.xi,
        Family::TwoModeSqueezedVacuum => s.chi,
        Family::Coherent | Family::EntangledCoherent => s.alpha,
        _ => s.n.map(|n| n as f64),
    };
    let (probe, solution) = match (native, s.nbar) {
        (Some(_), Some(_)) => {
            return Err(Failure::Usage(format!("give either {flag} or --nbar, not both")))
        }
        (None, None) => return Err(Failure::Usage(format!("{family} needs {flag} or --nbar"))),
        (Some(v), None) => {
            let probe = match family {
                Family::Coherent => Probe::Coherent {
                    alpha: Complex64::new(v, 0.0),
                },
                Family::EntangledCoherent => Probe::EntangledCoherent {
                    alpha: Complex64::new(v, 0.0),
                },
                _ => Probe::with_parameter(family, v),
            };
            (probe, None)
        }
        (None, Some(nbar)) => {
            let sol = solve_param_for_nbar(family, nbar, cfg)?;
            if sol.adjusted {
                eprintln!(
                    "warning: {family} cannot reach mean photon number {nbar}; using nearest attainable {}",
                    sol.nbar
                );
            }
            (sol.probe, Some(sol))
        }
    };
    let cutoff = s.cutoff.map(CutoffPolicy::Explicit).unwrap_or_default();
    Ok((ProbeSpec { probe, cutoff }, solution))
}

fn load_state_file(path: &std::path::Path) -> Result<FockState, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let loaded = read_state(&text)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.state)
}

fn analyze(a: AnalyzeArgs, cfg: &BuildConfig) -> Outcome {
    let opts = analysis_options(&a.tolerances);
    let (state, source) = match &a.state_file {
        Some(path) => (
            load_state_file(path)?,
            Source::StateFile {
                path: path.display().to_string(),
            },
        ),
        None => {
            let (spec, solution) = resolve_probe(&a.state, cfg)?;
            let state = build(&spec, cfg)?;
            (
                state,
                Source::Factory {
                    probe: spec.probe,
                    nbar_request: solution,
                },
            )
        }
    };
    let report = analyze_state(&state, source, &opts)?;
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => output::report_csv(&report).map_err(Failure::Io)?,
        Format::Table => output::report_table(&report),
    };
    output::emit(a.output.as_deref(), &text).map_err(Failure::Io)?;
    if !report.qfi.routes_consistent {
        eprintln!(
            "error[route-disagreement]: QFI routes differ by {:e}",
            report.qfi.route_agreement
        );
        return Ok(EXIT_ROUTES);
    }
    Ok(EXIT_OK)
}

fn table1(a: Table1Args, cfg: &BuildConfig) -> Outcome {
    let opts = analysis_options(&a.tolerances);
    let report = audit::table1(a.nbar, a.tol, cfg, &opts)?;
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => output::table1_csv(&report).map_err(Failure::Io)?,
        Format::Table => output::table1_table(&report),
    };
    output::emit(a.output.as_deref(), &text).map_err(Failure::Io)?;
    if report.route_failures > 0 {
        eprintln!("error[route-disagreement]: {} rows have inconsistent QFI routes", report.route_failures);
        return Ok(EXIT_ROUTES);
    }
    if report.mismatched_cells > 0 {
        eprintln!("note: {} cells differ from their closed forms", report.mismatched_cells);
        return Ok(EXIT_MISMATCH);
    }
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs, cfg: &BuildConfig) -> Outcome {
    let family: Family = a.family.into();
    let grid: Vec<SweepPoint> = match (a.nbar.is_empty(), a.param.is_empty()) {
        (false, true) => a.nbar.iter().map(|&v| SweepPoint::Nbar(v)).collect(),
        (true, false) => a.param.iter().map(|&v| SweepPoint::Parameter(v)).collect(),
        _ => {
            return Err(Failure::Usage(format!(
                "give exactly one grid: --nbar or {}",
                native_flag(family)
            )))
        }
    };
    let opts = analysis_options(&a.tolerances);
    let rows = audit::sweep(family, &grid, cfg, &opts);
    let text = match a.format {
        Format::Csv => output::sweep_csv(&rows).map_err(Failure::Io)?,
        Format::Json => to_json(&rows),
        Format::Table => output::sweep_table(&rows),
    };
    output::emit(a.output.as_deref(), &text).map_err(Failure::Io)?;
    if rows.iter().any(|r| !r.routes_consistent) {
        eprintln!("error[route-disagreement]: QFI routes differ at some grid points");
        return Ok(EXIT_ROUTES);
    }
    Ok(EXIT_OK)
}

fn build_state(a: BuildArgs, cfg: &BuildConfig) -> Outcome {
    let (spec, _) = resolve_probe(&a.state, cfg)?;
    let state = build(&spec, cfg)?;
    output::emit(a.output.as_deref(), &write_state(&state)).map_err(Failure::Io)?;
    Ok(EXIT_OK)
}
