//! Command-line front end for the kink library: profile tables, verification
//! reports, energy/charge summaries and coupling sweeps.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical
//! failure.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use skyrme_kink::analysis::{
    energy_charge_report, equivalence_diagnostics, sweep, DiagnosticsReport, EnergyChargeReport,
};
use skyrme_kink::closed_form::{branch_map, ImplicitSolution};
use skyrme_kink::io::{
    format_f64, parse_kappa_list, write_profile_csv, write_profile_json, write_sweep_csv,
    write_sweep_json, ProfileDocument, SweepDocument, SweepRow, Units, SCHEMA_VERSION,
};
use skyrme_kink::model::ModelParams;
use skyrme_kink::solvers::{
    integrate_bps_branch, solve_second_order_bvp, Grid, KinkProfile, SolverConfig, DEFAULT_POINTS,
};
use skyrme_kink::Error;

/// Overrides the directory used when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "SKYRME_KINK_OUTPUT_DIR";

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_NUMERICAL_FAILURE: i32 = 3;

/// Thresholds applied by `verify`.
pub mod thresholds {
    /// `|E - |Q||`.
    pub const BPS_DEFECT: f64 = 1e-8;
    /// Relative gap between the sampled and closed-form charge.
    pub const CHARGE_MISMATCH: f64 = 1e-8;
    /// Largest residual of the first-order equation.
    pub const BPS_RESIDUAL: f64 = 1e-6;
    pub const PP_PRODUCT: f64 = 1e-8;
    /// Bound under which one of `P+`, `P-` counts as identically zero.
    pub const P_VANISHES: f64 = 1e-6;
    /// Pairwise sup distance between solution methods.
    pub const ORACLE_DISTANCE: f64 = 1e-6;
    /// Every quantity of a vacuum request. Finite differences of a constant
    /// `n pi` leave rounding noise of order `1e-12`.
    pub const VACUUM: f64 = 1e-9;
}

/// Solver settings installed by the `--loosen-tolerance` test hook. The wide
/// `tail_cut` truncates enough of the kink that the charge check fails.
pub const LOOSE_SOLVER: SolverConfig = SolverConfig {
    rel_tol: 1e-3,
    abs_tol: 1e-6,
    max_steps: 1_000_000,
    tail_cut: 1e-2,
};

#[derive(Debug, Parser)]
#[command(
    name = "skyrme-kink",
    version,
    about = "Kinks of the reduced 1-D Skyrme model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a kink profile (x, alpha, dalpha, densities, BPS residual)
    Solve(KinkArgs),
    /// Check BPS saturation, the charge formula and first/second-order equivalence
    Verify(KinkArgs),
    /// Energy and topological charge of one kink
    Charge(KinkArgs),
    /// Energy and charge of the closed-form kink over a list of couplings
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    #[value(name = "closed_form")]
    ClosedForm,
    Ode,
    Bvp,
    All,
}

impl Method {
    fn singles(self) -> Vec<Method> {
        match self {
            Method::All => vec![Method::ClosedForm, Method::Ode, Method::Bvp],
            m => vec![m],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Ode => "ode",
            Method::Bvp => "bvp",
            Method::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct KinkArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    pub big_l: f64,
    /// Kink center, where alpha crosses the midpoint between the vacua
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    /// Vacua at the left and right ends, alpha -> m pi and alpha -> n pi
    #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [0, 1], allow_negative_numbers = true)]
    pub branch: Vec<i64>,
    /// closed_form for solve and charge, all for verify
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Number of uniform output samples
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// File of coupling values kappa = lambda / L^2, one per line
    pub kappa_file: PathBuf,
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    pub big_l: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file, `-` for stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Emit x / L with L = 1 and lambda = kappa instead of the original units
    #[arg(long)]
    pub rescaled: bool,
    #[arg(long = "rel-tol", alias = "rel_tol", allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol", alias = "abs_tol", allow_negative_numbers = true)]
    pub abs_tol: Option<f64>,
    #[arg(long = "max-steps", alias = "max_steps")]
    pub max_steps: Option<usize>,
    #[arg(long = "tail-cut", alias = "tail_cut", allow_negative_numbers = true)]
    pub tail_cut: Option<f64>,
    /// Test hook: replace the solver settings with loose ones so that verify fails
    #[arg(long, hide = true)]
    pub loosen_tolerance: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Verify,
    Charge,
    Sweep,
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Unused by `sweep`, which takes its couplings from `kappa_file`.
    pub lambda: f64,
    pub big_l: f64,
    pub x0: f64,
    pub branch: (i64, i64),
    pub method: Method,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub solver: SolverConfig,
    pub points: usize,
    pub rescaled: bool,
    pub kappa_file: Option<PathBuf>,
}

fn solver_config(c: &CommonArgs) -> SolverConfig {
    if c.loosen_tolerance {
        return LOOSE_SOLVER;
    }
    let d = SolverConfig::default();
    SolverConfig {
        rel_tol: c.rel_tol.unwrap_or(d.rel_tol),
        abs_tol: c.abs_tol.unwrap_or(d.abs_tol),
        max_steps: c.max_steps.unwrap_or(d.max_steps),
        tail_cut: c.tail_cut.unwrap_or(d.tail_cut),
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let (command, a) = match cli.command {
            Command::Solve(a) => (CommandKind::Solve, a),
            Command::Verify(a) => (CommandKind::Verify, a),
            Command::Charge(a) => (CommandKind::Charge, a),
            Command::Sweep(s) => {
                return RunConfig {
                    command: CommandKind::Sweep,
                    lambda: f64::NAN,
                    big_l: s.big_l,
                    x0: 0.0,
                    branch: (0, 1),
                    method: Method::ClosedForm,
                    format: s.common.format,
                    output: s.common.output.clone(),
                    solver: solver_config(&s.common),
                    points: DEFAULT_POINTS,
                    rescaled: s.common.rescaled,
                    kappa_file: Some(s.kappa_file),
                }
            }
        };
        let default_method = if command == CommandKind::Verify {
            Method::All
        } else {
            Method::ClosedForm
        };
        RunConfig {
            command,
            lambda: a.lambda,
            big_l: a.big_l,
            x0: a.x0,
            branch: (a.branch[0], a.branch[1]),
            method: a.method.unwrap_or(default_method),
            format: a.common.format,
            output: a.common.output.clone(),
            solver: solver_config(&a.common),
            points: a.points,
            rescaled: a.common.rescaled,
            kappa_file: None,
        }
    }
}

/// Failure carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT_ERROR,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numeric(_) | Error::Singularity(_) => EXIT_NUMERICAL_FAILURE,
            _ => EXIT_INPUT_ERROR,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Parameters and center actually used for computation, after `--rescaled`.
#[derive(Debug, Clone, Copy)]
struct Setup {
    params: ModelParams,
    x0: f64,
    units: Units,
}

impl RunConfig {
    /// Checks everything that can be checked before computing.
    pub fn validate(&self) -> Result<(), CliError> {
        self.solver.validate()?;
        if self.command == CommandKind::Sweep {
            if !(self.big_l.is_finite() && self.big_l > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "L must be finite and > 0, got {}",
                    self.big_l
                ))
                .into());
            }
            return Ok(());
        }
        ModelParams::new(self.lambda, self.big_l)?;
        if !self.x0.is_finite() {
            return Err(CliError::input(format!(
                "x0 must be finite, got {}",
                self.x0
            )));
        }
        let (m, n) = self.branch;
        if m != n && !branch_map(m, n).valid {
            return Err(Error::NonAdjacentVacua { m, n }.into());
        }
        if self.points < 5 {
            return Err(CliError::input(format!(
                "need at least 5 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    fn setup(&self) -> Result<Setup, CliError> {
        let p = ModelParams::new(self.lambda, self.big_l)?;
        Ok(if self.rescaled {
            Setup {
                params: ModelParams::from_kappa(p.kappa(), 1.0)?,
                x0: self.x0 / p.big_l(),
                units: Units::Rescaled,
            }
        } else {
            Setup {
                params: p,
                x0: self.x0,
                units: Units::Original,
            }
        })
    }

    fn default_name(&self) -> &'static str {
        match self.command {
            CommandKind::Solve => "profile",
            CommandKind::Verify => "verify",
            CommandKind::Charge => "charge",
            CommandKind::Sweep => "sweep",
        }
    }

    /// Where the main output goes; `None` means stdout.
    pub fn output_path(&self) -> Option<PathBuf> {
        match &self.output {
            Some(p) if p.as_os_str() == "-" => None,
            Some(p) => Some(p.clone()),
            None => {
                let dir = std::env::var_os(OUTPUT_DIR_ENV)
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("."));
                Some(dir.join(format!(
                    "{}.{}",
                    self.default_name(),
                    self.format.extension()
                )))
            }
        }
    }
}

/// `dir/stem.ext` -> `dir/stem.tag.ext`.
fn tagged_path(path: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| {
                    CliError::input(format!("cannot create {}: {e}", dir.display()))
                })?;
            }
            std::fs::write(p, text)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))
        }
    }
}

fn single_profile(
    method: Method,
    s: &Setup,
    branch: (i64, i64),
    cfg: &SolverConfig,
    points: usize,
) -> Result<KinkProfile, CliError> {
    let grid = Grid::for_kink(&s.params, s.x0, cfg, points)?;
    let (m, n) = branch;
    Ok(match method {
        Method::ClosedForm if m == n => KinkProfile::vacuum(
            s.params,
            m,
            grid,
            skyrme_kink::solvers::Provenance::ClosedForm,
        ),
        Method::ClosedForm => {
            let sol = ImplicitSolution::from_branch(s.params, s.x0, m, n)?;
            KinkProfile::from_closed_form(&sol, grid)?
        }
        Method::Ode => integrate_bps_branch(&s.params, s.x0, branch, cfg, &grid)?,
        Method::Bvp => solve_second_order_bvp(&s.params, branch, cfg, &grid)?,
        Method::All => unreachable!("`all` is expanded before solving"),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDistance {
    pub a: &'static str,
    pub b: &'static str,
    pub sup_distance: f64,
}

/// Profiles by method, with pairwise distances when more than one was run.
type Solved = (Vec<(Method, KinkProfile)>, Vec<PairDistance>);

/// Profiles from the three methods and their pairwise distances after
/// centering. The shooting solution fixes its own center; the other two are
/// re-evaluated there before comparing with it.
fn oracle_triangle(
    s: &Setup,
    branch: (i64, i64),
    cfg: &SolverConfig,
    points: usize,
) -> Result<Solved, CliError> {
    let cf = single_profile(Method::ClosedForm, s, branch, cfg, points)?;
    let ode = single_profile(Method::Ode, s, branch, cfg, points)?;
    let bvp = single_profile(Method::Bvp, s, branch, cfg, points)?;
    let d_cf_ode = cf.sup_distance(&ode)?;
    let (d_cf_bvp, d_ode_bvp) = if bvp.is_vacuum() {
        (cf.sup_distance(&bvp)?, ode.sup_distance(&bvp)?)
    } else {
        let center = bvp
            .center()
            .ok_or_else(|| Error::Numeric("shooting profile has no center".into()))?;
        let recentered = Setup { x0: center, ..*s };
        let (m, n) = branch;
        let cf_c = KinkProfile::from_closed_form(
            &ImplicitSolution::from_branch(recentered.params, center, m, n)?,
            bvp.grid.clone(),
        )?;
        let ode_c = integrate_bps_branch(&recentered.params, center, branch, cfg, &bvp.grid)?;
        (bvp.sup_distance(&cf_c)?, bvp.sup_distance(&ode_c)?)
    };
    let distances = vec![
        PairDistance {
            a: "closed_form",
            b: "ode",
            sup_distance: d_cf_ode,
        },
        PairDistance {
            a: "closed_form",
            b: "bvp",
            sup_distance: d_cf_bvp,
        },
        PairDistance {
            a: "ode",
            b: "bvp",
            sup_distance: d_ode_bvp,
        },
    ];
    Ok((
        vec![
            (Method::ClosedForm, cf),
            (Method::Ode, ode),
            (Method::Bvp, bvp),
        ],
        distances,
    ))
}

fn profiles_for(
    cfg: &RunConfig,
    s: &Setup,
) -> Result<Solved, CliError> {
    if cfg.method == Method::All {
        oracle_triangle(s, cfg.branch, &cfg.solver, cfg.points)
    } else {
        let prof = single_profile(cfg.method, s, cfg.branch, &cfg.solver, cfg.points)?;
        Ok((vec![(cfg.method, prof)], Vec::new()))
    }
}

fn render_profile(prof: &KinkProfile, format: Format, units: Units) -> Result<String, CliError> {
    let doc = ProfileDocument::new(prof, units);
    Ok(match format {
        Format::Csv => write_profile_csv(&doc.rows)?,
        Format::Json => write_profile_json(&doc)?,
    })
}

#[derive(Serialize)]
struct DistanceDocument<'a> {
    schema_version: u32,
    distances: &'a [PairDistance],
}

fn render_distances(d: &[PairDistance], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut out = String::from("a,b,sup_distance\n");
            for p in d {
                out.push_str(&format!("{},{},{}\n", p.a, p.b, format_f64(p.sup_distance)));
            }
            Ok(out)
        }
        Format::Json => to_json(&DistanceDocument {
            schema_version: SCHEMA_VERSION,
            distances: d,
        }),
    }
}

fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::from(Error::Numeric(format!("json write failed: {e}"))))?;
    s.push('\n');
    Ok(s)
}

/// Writes the profile table; with `--method all` one file per method plus a
/// `summary` file of pairwise distances, which is also printed.
pub fn cmd_solve(cfg: &RunConfig) -> Result<i32, CliError> {
    cfg.validate()?;
    let s = cfg.setup()?;
    let out = cfg.output_path();
    if cfg.method == Method::All && out.is_none() {
        return Err(CliError::input(
            "--method all writes one file per method; give --output a file path",
        ));
    }
    let (profiles, distances) = profiles_for(cfg, &s)?;
    if cfg.method != Method::All {
        emit(
            out.as_deref(),
            &render_profile(&profiles[0].1, cfg.format, s.units)?,
        )?;
        return Ok(EXIT_SUCCESS);
    }
    let base = out.expect("checked above");
    let ext = cfg.format.extension();
    for (method, prof) in &profiles {
        let path = tagged_path(&base, method.as_str(), ext);
        emit(Some(&path), &render_profile(prof, cfg.format, s.units)?)?;
    }
    emit(
        Some(&tagged_path(&base, "summary", ext)),
        &render_distances(&distances, cfg.format)?,
    )?;
    println!("pairwise sup-distance after centering:");
    for d in &distances {
        println!("  {:<12} {:<4} {:.3e}", d.a, d.b, d.sup_distance);
    }
    Ok(EXIT_SUCCESS)
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodCheck {
    pub method: &'static str,
    pub energy_charge: EnergyChargeReport,
    pub diagnostics: DiagnosticsReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub units: Units,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    pub kappa: f64,
    pub x0: f64,
    pub branch: (i64, i64),
    pub checks: Vec<MethodCheck>,
    pub distances: Vec<PairDistance>,
    pub failures: Vec<String>,
    pub passed: bool,
}

fn check_failures(c: &MethodCheck, vacuum: bool) -> Vec<String> {
    let mut out = Vec::new();
    let mut require = |ok: bool, what: String| {
        if !ok {
            out.push(format!("{}: {what}", c.method));
        }
    };
    let ec = &c.energy_charge;
    let d = &c.diagnostics;
    if vacuum {
        let quantities = [
            ("energy", ec.energy),
            ("charge_quadrature", ec.charge_quadrature),
            ("charge_closed_form", ec.charge_closed_form),
            ("bps_defect", ec.bps_defect),
            ("max_bps_residual", d.max_bps_residual),
            ("max_second_order_residual", d.max_second_order_residual),
            ("max_abs_p_plus", d.max_abs_p_plus),
            ("max_abs_p_minus", d.max_abs_p_minus),
        ];
        for (name, v) in quantities {
            require(
                v.abs() <= thresholds::VACUUM,
                format!("vacuum {name} = {v:e} exceeds {:e}", thresholds::VACUUM),
            );
        }
        return out;
    }
    require(
        ec.bps_defect.abs() <= thresholds::BPS_DEFECT,
        format!(
            "|E - |Q|| = {:e} exceeds {:e}",
            ec.bps_defect.abs(),
            thresholds::BPS_DEFECT
        ),
    );
    let mismatch =
        (ec.charge_quadrature.abs() - ec.charge_closed_form).abs() / ec.charge_closed_form;
    require(
        mismatch <= thresholds::CHARGE_MISMATCH,
        format!(
            "charge quadrature vs closed form differ by {mismatch:e} (relative), limit {:e}",
            thresholds::CHARGE_MISMATCH
        ),
    );
    require(
        d.max_bps_residual <= thresholds::BPS_RESIDUAL,
        format!(
            "BPS residual {:e} exceeds {:e}",
            d.max_bps_residual,
            thresholds::BPS_RESIDUAL
        ),
    );
    require(
        d.pp_product_max_abs <= thresholds::PP_PRODUCT,
        format!(
            "max |P+ P-| = {:e} exceeds {:e}",
            d.pp_product_max_abs,
            thresholds::PP_PRODUCT
        ),
    );
    let plus_small = d.max_abs_p_plus <= thresholds::P_VANISHES;
    let minus_small = d.max_abs_p_minus <= thresholds::P_VANISHES;
    require(
        plus_small != minus_small,
        format!(
            "expected exactly one of max|P+| = {:e}, max|P-| = {:e} below {:e}",
            d.max_abs_p_plus,
            d.max_abs_p_minus,
            thresholds::P_VANISHES
        ),
    );
    out
}

fn render_verify(doc: &VerifyDocument, format: Format) -> Result<String, CliError> {
    if format == Format::Json {
        return to_json(doc);
    }
    let mut out = String::from("source,quantity,value\n");
    let mut row = |source: &str, quantity: &str, v: f64| {
        out.push_str(&format!("{source},{quantity},{}\n", format_f64(v)));
    };
    for c in &doc.checks {
        let ec = &c.energy_charge;
        let d = &c.diagnostics;
        row(c.method, "energy", ec.energy);
        row(c.method, "charge_quadrature", ec.charge_quadrature);
        row(c.method, "charge_closed_form", ec.charge_closed_form);
        row(c.method, "bps_defect", ec.bps_defect);
        row(c.method, "tail_bound", ec.tail_bound);
        row(c.method, "max_bps_residual", d.max_bps_residual);
        row(
            c.method,
            "max_second_order_residual",
            d.max_second_order_residual,
        );
        row(c.method, "max_abs_p_plus", d.max_abs_p_plus);
        row(c.method, "max_abs_p_minus", d.max_abs_p_minus);
        row(c.method, "pp_product_max_abs", d.pp_product_max_abs);
        row(c.method, "pp_product_variation", d.pp_product_variation);
        row(c.method, "endpoint_p_plus", d.endpoint_p_values.0);
        row(c.method, "endpoint_p_minus", d.endpoint_p_values.1);
    }
    for d in &doc.distances {
        row(&format!("{}:{}", d.a, d.b), "sup_distance", d.sup_distance);
    }
    row("summary", "failures", doc.failures.len() as f64);
    Ok(out)
}

/// Writes energy/charge and equivalence diagnostics for each method; exit 0
/// iff every threshold in [`thresholds`] holds.
pub fn cmd_verify(cfg: &RunConfig) -> Result<i32, CliError> {
    cfg.validate()?;
    let s = cfg.setup()?;
    let (profiles, distances) = profiles_for(cfg, &s)?;
    let vacuum = cfg.branch.0 == cfg.branch.1;
    let checks: Vec<MethodCheck> = profiles
        .iter()
        .map(|(m, prof)| MethodCheck {
            method: m.as_str(),
            energy_charge: energy_charge_report(prof),
            diagnostics: equivalence_diagnostics(prof),
        })
        .collect();
    let mut failures: Vec<String> = checks
        .iter()
        .flat_map(|c| check_failures(c, vacuum))
        .collect();
    for d in &distances {
        if !(d.sup_distance <= thresholds::ORACLE_DISTANCE) {
            failures.push(format!(
                "{} vs {}: sup distance {:e} exceeds {:e}",
                d.a,
                d.b,
                d.sup_distance,
                thresholds::ORACLE_DISTANCE
            ));
        }
    }
    let doc = VerifyDocument {
        schema_version: SCHEMA_VERSION,
        units: s.units,
        lambda: s.params.lambda(),
        big_l: s.params.big_l(),
        kappa: s.params.kappa(),
        x0: s.x0,
        branch: cfg.branch,
        checks,
        distances,
        passed: failures.is_empty(),
        failures,
    };
    emit(
        cfg.output_path().as_deref(),
        &render_verify(&doc, cfg.format)?,
    )?;
    for f in &doc.failures {
        eprintln!("FAIL {f}");
    }
    Ok(if doc.passed {
        EXIT_SUCCESS
    } else {
        EXIT_VERIFICATION_FAILED
    })
}

fn render_sweep(rows: Vec<SweepRow>, format: Format, units: Units) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => write_sweep_csv(&rows)?,
        Format::Json => write_sweep_json(&SweepDocument {
            schema_version: SCHEMA_VERSION,
            units,
            rows,
        })?,
    })
}

/// One row per method in the sweep layout (kappa, L, E, Q_quad, Q_closed,
/// defect); `--method all` gives closed_form, ode, bvp in that order.
pub fn cmd_charge(cfg: &RunConfig) -> Result<i32, CliError> {
    cfg.validate()?;
    let s = cfg.setup()?;
    let mut rows = Vec::new();
    for m in cfg.method.singles() {
        let prof = single_profile(m, &s, cfg.branch, &cfg.solver, cfg.points)?;
        rows.push(SweepRow::from(&energy_charge_report(&prof)));
    }
    emit(
        cfg.output_path().as_deref(),
        &render_sweep(rows, cfg.format, s.units)?,
    )?;
    Ok(EXIT_SUCCESS)
}

/// Reads couplings from `kappa_file` and tabulates the closed-form kink for
/// each, in file order. Items that fail are reported and left out; the exit
/// code is then 3.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<i32, CliError> {
    cfg.validate()?;
    let path = cfg
        .kappa_file
        .as_ref()
        .ok_or_else(|| CliError::input("sweep needs a kappa file"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let kappas = parse_kappa_list(&text).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })?;
    let (big_l, units) = if cfg.rescaled {
        (1.0, Units::Rescaled)
    } else {
        (cfg.big_l, Units::Original)
    };
    let mut rows = Vec::new();
    let mut failed = false;
    for (kappa, r) in kappas.iter().zip(sweep(&kappas, big_l, &cfg.solver)) {
        match r {
            Ok(report) => rows.push(SweepRow::from(&report)),
            Err(e) => {
                eprintln!("kappa = {kappa}: {e}");
                failed = true;
            }
        }
    }
    emit(
        cfg.output_path().as_deref(),
        &render_sweep(rows, cfg.format, units)?,
    )?;
    Ok(if failed {
        EXIT_NUMERICAL_FAILURE
    } else {
        EXIT_SUCCESS
    })
}

/// Dispatches and maps errors to exit codes, reporting them on stderr.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = match cfg.command {
        CommandKind::Solve => cmd_solve(cfg),
        CommandKind::Verify => cmd_verify(cfg),
        CommandKind::Charge => cmd_charge(cfg),
        CommandKind::Sweep => cmd_sweep(cfg),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
