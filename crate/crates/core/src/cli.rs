//! Command-line front end: `solve`, `scan`, `critical`, `triple`, `verify` and `export`.

use std::ffi::OsString;
use std::fmt::{self, Display};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{bernoulli_roundtrip, poincare_batch, poincare_check, random_gaussian_case, PoincareCase};
use crate::config::RunConfig;
use crate::continuation::{geometric_grid, locate_critical, scan, write_entries_csv};
use crate::diagnostics::{
    bernoulli_identity, default_seeds, mirror_symmetric_body, positivity_and_kutta, primitives, trace_streamline,
    write_field_csv, StreamlineEnd,
};
use crate::error::{Error, Result};
use crate::farfield::FarfieldTriple;
use crate::gas::GasLaw;
use crate::geometry::{Mesh, WallShape};
use crate::solver::{picard_iterate, picard_solve, FlowState, ProblemSetup, SolveReport, SolverConfig};
use crate::upstream::{TruncatedProfile, UpstreamProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bumpflow", version, about = "Subsonic Euler flow past a wall bump")]
pub struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for automatic.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve at one incoming density; writes `field.csv` and `solve.txt`.
    Solve,
    /// Certify a geometric range of densities; writes `scan.csv`.
    Scan,
    /// Bisect for the critical incoming density.
    Critical,
    /// Far-field matched triple for the configured wall height.
    Triple,
    /// Run the invariant suite.
    Verify,
    /// Solve and export fields; `--mirror` reflects across the axis to the flow past `|x2| <= f(x1)`.
    Export {
        #[arg(long)]
        mirror: bool,
    },
}

/// Flat `key: value` report.
#[derive(Debug, Default, Clone)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. }
        | Error::LinearSolveFailed { .. }
        | Error::SupersonicMomentum { .. }
        | Error::StateCorrupt(_) => EXIT_NO_CONVERGENCE,
        Error::NoAdmissibleTriple(_) => EXIT_CERTIFICATION,
        _ => EXIT_CONFIG,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_CONFIG;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok((report, code)) => {
            print!("{report}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<(Report, i32)> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out)?;
    let (report, code, name) = match &cli.command {
        Command::Solve => {
            let (r, c) = solve_cmd(&cfg, &out)?;
            (r, c, "solve")
        }
        Command::Scan => {
            let (r, c) = scan_cmd(&cfg, &out)?;
            (r, c, "scan")
        }
        Command::Critical => {
            let (r, c) = critical_cmd(&cfg, &out)?;
            (r, c, "critical")
        }
        Command::Triple => {
            let (r, c) = triple_cmd(&cfg)?;
            (r, c, "triple")
        }
        Command::Verify => {
            let (r, c) = verify_cmd(&cfg)?;
            (r, c, "verify")
        }
        Command::Export { mirror } => {
            let (r, c) = export_cmd(&cfg, &out, *mirror)?;
            (r, c, "export")
        }
    };
    fs::write(out.join(format!("{name}.txt")), report.to_string())?;
    Ok((report, code))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn solve_report(report: &mut Report, setup: &ProblemSetup, rep: &SolveReport) {
    let mesh = setup.mesh();
    report.push("gamma", setup.gas().gamma());
    report.push("rho0", setup.rho0());
    report.push("rho_star", setup.gas().rho_star(setup.profile().max_speed()));
    report.push("mass_flux", setup.mass_flux());
    report.push("L", mesh.height());
    report.push("N", mesh.half_width());
    report.push("nx", mesh.nx());
    report.push("ny", mesh.ny());
    report.push("converged", rep.converged);
    report.push("iterations", rep.iterations);
    report.push("final_update", format!("{:.6e}", rep.final_update));
    report.push("linear_iterations", rep.linear_iterations);
    report.push("theta", rep.theta);
    report.push("M_ratio", format!("{:.12e}", rep.m_ratio));
    report.push("truncation_active", rep.truncation_active);
    report.push("max_mach", format!("{:.12e}", rep.max_mach));
}

/// Solves at the configured density and fills the solve part of the report.
fn solve_configured(cfg: &RunConfig, report: &mut Report) -> Result<(ProblemSetup, FlowState, SolveReport)> {
    let setup = cfg.setup()?;
    let (state, rep) = picard_iterate(&setup, &setup.default_init())?;
    solve_report(report, &setup, &rep);
    if !rep.converged {
        return Err(Error::NoConvergence { iterations: rep.iterations, update: rep.final_update });
    }
    Ok((setup, state, rep))
}

fn certification_code(rep: &SolveReport) -> i32 {
    if rep.truncation_active {
        EXIT_CERTIFICATION
    } else {
        EXIT_OK
    }
}

fn solve_cmd(cfg: &RunConfig, out: &Path) -> Result<(Report, i32)> {
    let mut report = Report::default();
    let (setup, state, rep) = solve_configured(cfg, &mut report)?;
    let fields = primitives(&setup, &state);
    let b = bernoulli_identity(&setup, &state, &fields);
    let pos = positivity_and_kutta(&setup, &fields);
    report.push("bernoulli_identity_rel", format!("{:.6e}", b.relative()));
    report.push("min_interior_u", format!("{:.12e}", pos.min_interior_u));
    report.push("certified", !rep.truncation_active);
    let mut w = create(&out.join("field.csv"))?;
    write_field_csv(&mut w, setup.mesh(), &state.psi, &fields)?;
    w.flush()?;
    Ok((report, certification_code(&rep)))
}

fn scan_cmd(cfg: &RunConfig, out: &Path) -> Result<(Report, i32)> {
    let spec = cfg.scan.as_ref().ok_or_else(|| Error::Config("scan.hi and scan.lo are required".into()))?;
    let rho0s = geometric_grid(spec.hi, spec.lo, spec.steps)?;
    let template = cfg.setup_at(spec.hi)?;
    let result = scan(&template, &rho0s)?;
    let mut w = create(&out.join("scan.csv"))?;
    result.write_csv(&mut w)?;
    w.flush()?;
    let certified = result.entries.iter().filter(|e| e.certified()).count();
    let mut report = Report::default();
    report.push("entries", result.entries.len());
    report.push("certified", certified);
    match result.bracket {
        Some((lo, hi)) => {
            report.push("bracket_lo", lo);
            report.push("bracket_hi", hi);
        }
        None => report.push("bracket", "none"),
    }
    match result.slope {
        Some(s) => report.push("mach_slope", format!("{s:.6}")),
        None => report.push("mach_slope", "none"),
    }
    report.push("expected_slope", -(cfg.gamma - 1.0) / 2.0);
    Ok((report, if certified > 0 { EXIT_OK } else { EXIT_CERTIFICATION }))
}

fn critical_cmd(cfg: &RunConfig, out: &Path) -> Result<(Report, i32)> {
    let spec = cfg.scan.as_ref().ok_or_else(|| Error::Config("scan.hi and scan.lo bracket the search".into()))?;
    let rho_star = cfg.rho_star()?;
    let tol = cfg.critical_tol.unwrap_or(1e-3 * rho_star);
    let template = cfg.setup_at(spec.hi)?;
    let result = locate_critical(&template, spec.lo, spec.hi, tol)?;
    let mut w = create(&out.join("critical.csv"))?;
    write_entries_csv(&mut w, &result.trajectory)?;
    w.flush()?;
    let mut report = Report::default();
    report.push("rho_star", rho_star);
    report.push("lo", format!("{:.12e}", result.lo));
    report.push("hi", format!("{:.12e}", result.hi));
    report.push("width", format!("{:.6e}", result.width()));
    report.push("threshold", result.threshold);
    report.push("alternative", result.alternative);
    report.push("monotone", result.monotone);
    report.push("solves", result.trajectory.len());
    if let Some(e) = result.hi_entry() {
        report.push("M_ratio_hi", format!("{:.12e}", e.m_ratio));
    }
    Ok((report, if result.monotone { EXIT_OK } else { EXIT_CERTIFICATION }))
}

fn triple_cmd(cfg: &RunConfig) -> Result<(Report, i32)> {
    let rho0 = cfg.rho0_value()?.ok_or_else(|| Error::Config("rho0 or rho0_factor is required".into()))?;
    let gas = cfg.gas()?;
    let tp = TruncatedProfile::new(&cfg.profile()?, rho0, cfg.l)?;
    let j = cfg.wall()?.max_height();
    let triple = FarfieldTriple::solve(&tp, &gas, j)?;
    let r = triple.verify(&tp, &gas);
    let mut report = Report::default();
    report.push("rho0", rho0);
    report.push("J", j);
    report.push("L", cfg.l);
    report.push("rho1", format!("{:.12e}", r.rho1));
    report.push("mass_flux", tp.mass_flux());
    report.push("bernoulli_residual", format!("{:.6e}", r.bernoulli_residual));
    report.push("mass_residual", format!("{:.6e}", r.mass_residual));
    report.push("chi_start", r.chi_start);
    report.push("chi_end", r.chi_end);
    report.push("shift_min", format!("{:.6e}", r.shift_min));
    report.push("shift_max", format!("{:.6e}", r.shift_max));
    report.push("gap_min", format!("{:.6e}", r.gap_min));
    report.push("gap_max", format!("{:.6e}", r.gap_max));
    report.push("gap_bound", r.gap_bound);
    let ok = r.chi_increasing && r.shift_ok && r.gap_ok && r.momentum_ordered && r.subsonic;
    report.push("bounds_ok", ok);
    Ok((report, if ok { EXIT_OK } else { EXIT_CERTIFICATION }))
}

struct Suite {
    report: Report,
    all: bool,
}

impl Suite {
    fn check(&mut self, name: &str, pass: bool, detail: impl Display) {
        self.all &= pass;
        self.report.push(name, format!("{} ({detail})", if pass { "pass" } else { "FAIL" }));
    }
}

/// Invariant suite on the gas law, the Poincare inequality, the far-field triple,
/// the flat wall and one solve of the configured problem.
fn verify_cmd(cfg: &RunConfig) -> Result<(Report, i32)> {
    let mut suite = Suite { report: Report::default(), all: true };
    let mut rng = ChaCha8Rng::seed_from_u64(20);

    let rt = bernoulli_roundtrip(&mut rng, 10_000, 0.0);
    suite.check("bernoulli_roundtrip", rt.failures == 0 && rt.max_rel <= 1e-10, format!("max rel {:.2e}", rt.max_rel));

    let closed = poincare_check(&PoincareCase::constant(1.0, 3.0))?;
    let mut cases = Vec::new();
    for &l in &[2.5, 3.0, 4.0, 6.0] {
        cases.extend((0..25).map(|_| random_gaussian_case(&mut rng, l)));
    }
    let held = poincare_batch(&cases)?.iter().filter(|r| r.holds).count();
    suite.check(
        "poincare",
        closed.holds && held == cases.len(),
        format!("{held}/{} random, closed form {:.6} <= {:.6}", cases.len(), closed.lhs, closed.rhs),
    );

    let gas2 = GasLaw::new(2.0)?;
    let constant = UpstreamProfile::constant(1.0)?;
    let tp = TruncatedProfile::new(&constant, 5.0, 10.0)?;
    let triple = FarfieldTriple::solve(&tp, &gas2, 1.0)?;
    let tr = triple.verify(&tp, &gas2);
    let res = tr.bernoulli_residual.max(tr.mass_residual) / tp.mass_flux();
    suite.check(
        "farfield_triple",
        (tr.rho1 - 4.933).abs() < 5e-4 && res <= 1e-8 && tr.shift_ok && tr.gap_ok,
        format!("rho1 {:.6}, residual {res:.2e}", tr.rho1),
    );

    let mesh = Mesh::build(&WallShape::flat(), 4.0, 4.0, 128, 64)?;
    let flat = ProblemSetup::new(gas2, &constant, 20.0, mesh, SolverConfig::default())?;
    let (state, _) = picard_solve(&flat, &flat.default_init())?;
    let err = (0..flat.mesh().node_count())
        .map(|k| {
            let (i, j) = flat.mesh().node_ij(k);
            (state.psi[k] - 20.0 * flat.mesh().position(i, j).1).abs()
        })
        .fold(0.0, f64::max);
    suite.check("flat_wall_exact", err <= 1e-9 * flat.mass_flux(), format!("error {:.2e}", err / flat.mass_flux()));

    let mut solve_report = Report::default();
    let (setup, state, rep) = solve_configured(cfg, &mut solve_report)?;
    let fields = primitives(&setup, &state);
    suite.check("certified", !rep.truncation_active, format!("M_ratio {:.4}", rep.m_ratio));
    suite.check("subsonic", rep.max_mach < 1.0, format!("max mach {:.4}", rep.max_mach));
    let pos = positivity_and_kutta(&setup, &fields);
    suite.check("positive_u", pos.min_interior_u > 0.0, format!("min u {:.4}", pos.min_interior_u));
    let b = bernoulli_identity(&setup, &state, &fields);
    suite.check("bernoulli_identity", b.relative() <= 1e-3, format!("{:.2e}", b.relative()));
    let drift = default_seeds(setup.mesh())
        .into_iter()
        .map(|seed| trace_streamline(setup.mesh(), &state.psi, &fields, seed))
        .filter(|s| s.end == StreamlineEnd::Outflow)
        .map(|s| s.bernoulli_drift())
        .fold(0.0, f64::max);
    suite.check("streamline_bernoulli", drift <= 1e-3, format!("max drift {drift:.2e}"));
    let code = if suite.all { EXIT_OK } else { EXIT_CERTIFICATION };
    suite.report.push("all", suite.all);
    Ok((suite.report, code))
}

fn export_cmd(cfg: &RunConfig, out: &Path, mirror: bool) -> Result<(Report, i32)> {
    let mut report = Report::default();
    let (setup, state, rep) = solve_configured(cfg, &mut report)?;
    let fields = primitives(&setup, &state);
    if mirror {
        let m = mirror_symmetric_body(setup.mesh(), &state.psi, &fields);
        let mut w = create(&out.join("mirror.csv"))?;
        m.write_csv(&mut w)?;
        w.flush()?;
        report.push("mirror_rows", m.rows);
        report.push("mirror_mass_flux", m.mass_flux());
    } else {
        let mut w = create(&out.join("field.csv"))?;
        write_field_csv(&mut w, setup.mesh(), &state.psi, &fields)?;
        w.flush()?;
    }
    Ok((report, certification_code(&rep)))
}
