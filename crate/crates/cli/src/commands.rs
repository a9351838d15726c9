//! One function per subcommand: config in, report out.

use crate::config::{Config, ConfigError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use zetashift_core::analysis::{
    find_tau, good_set_measure, scan_a_d, tail_energy, theorem_scan, tsang_detail, AnalysisError,
    DensityReport, ScanConfig, TailEnergy, TauHit, TsangReport, WindowSet, ZERO_FLOOR,
};
use zetashift_core::dirichlet::{DirichletError, ShiftVector};
use zetashift_core::kronecker::{
    certified_window_length, chen_search, homogeneous_window, KroneckerError, KroneckerInstance,
    KroneckerSolution, WindowHit,
};
use zetashift_core::primes::PrimeError;
use zetashift_core::report::{intervals_csv, csv, Report};
use zetashift_core::targeting::{
    assignment_sums, build_phase_assignment, exp_poly_zero_count, lattice_modulus, residual,
    wilder_bound_holds, wilder_count, GreedyOptions, PhaseAssignment, PhaseMode, Rectangle,
    TargetSpec, TargetingError,
};
use zetashift_core::zeta::{log_zeta, zero_proximity_scan, EvalPoint, ZeroProximityReport, ZetaError};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NONCONVERGENCE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn fail(code: u8, message: impl fmt::Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        fail(EXIT_USAGE, e)
    }
}

fn zeta_code(e: &ZetaError) -> u8 {
    match e {
        ZetaError::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn dirichlet_code(e: &DirichletError) -> u8 {
    match e {
        DirichletError::Resolution { .. } => EXIT_NUMERIC,
        DirichletError::Range(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn analysis_code(e: &AnalysisError) -> u8 {
    match e {
        AnalysisError::Resolution { .. } => EXIT_NUMERIC,
        AnalysisError::Invalid(_) => EXIT_USAGE,
        AnalysisError::Zeta(z) => zeta_code(z),
        AnalysisError::Dirichlet(d) => dirichlet_code(d),
        AnalysisError::Primes(_) => EXIT_BUDGET,
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        fail(analysis_code(&e), e)
    }
}

impl From<TargetingError> for Failure {
    fn from(e: TargetingError) -> Self {
        let code = match &e {
            TargetingError::NonConvergence { .. } => EXIT_NONCONVERGENCE,
            TargetingError::ContourNearZero => EXIT_NUMERIC,
            TargetingError::Invalid(_) => EXIT_USAGE,
            TargetingError::Primes(_) => EXIT_BUDGET,
            TargetingError::Dirichlet(d) => dirichlet_code(d),
        };
        fail(code, e)
    }
}

impl From<KroneckerError> for Failure {
    fn from(e: KroneckerError) -> Self {
        let code = match &e {
            KroneckerError::EnumerationBudget { .. }
            | KroneckerError::WindowBudget(_)
            | KroneckerError::SearchBudget { .. } => EXIT_BUDGET,
            KroneckerError::BoundViolated { .. } => EXIT_NUMERIC,
            KroneckerError::Invalid(_) => EXIT_USAGE,
        };
        fail(code, e)
    }
}

impl From<ZetaError> for Failure {
    fn from(e: ZetaError) -> Self {
        fail(zeta_code(&e), e)
    }
}

impl From<DirichletError> for Failure {
    fn from(e: DirichletError) -> Self {
        fail(dirichlet_code(&e), e)
    }
}

impl From<PrimeError> for Failure {
    fn from(e: PrimeError) -> Self {
        fail(EXIT_BUDGET, e)
    }
}

/// What a command hands back to `main`.
pub struct Output {
    pub json: String,
    pub csv: String,
    /// One line for stderr.
    pub summary: String,
    pub exit: u8,
}

pub struct Context {
    pub config: Config,
    pub config_dir: PathBuf,
    pub seed: u64,
}

fn finish<R: Serialize>(
    command: &str,
    ctx: &Context,
    results: R,
    csv: String,
    summary: String,
    exit: u8,
) -> Result<Output, Failure> {
    ctx.config.finish()?;
    let mut echo = serde_json::to_value(ctx.config.echo()).map_err(|e| fail(EXIT_USAGE, e))?;
    echo["seed"] = serde_json::Value::String(ctx.seed.to_string());
    let json = Report::new(command, echo, results, ctx.seed)
        .to_json()
        .map_err(|e| fail(EXIT_NUMERIC, e))?;
    Ok(Output {
        json,
        csv,
        summary,
        exit,
    })
}

fn eval_point(cfg: &Config) -> Result<EvalPoint, Failure> {
    let sigma = cfg.f64("sigma")?;
    let t = cfg.f64("t")?;
    EvalPoint::new(sigma, t).map_err(|e| fail(EXIT_USAGE, cfg.invalid("sigma", e)))
}

fn shifts(cfg: &Config, key: &str) -> Result<ShiftVector, Failure> {
    ShiftVector::new(cfg.list_f64(key)?).map_err(|e| fail(EXIT_USAGE, cfg.invalid(key, e)))
}

fn scan_config(cfg: &Config, seed: u64) -> Result<ScanConfig, Failure> {
    let mut sc = ScanConfig {
        s: eval_point(cfg)?,
        shifts: shifts(cfg, "shifts")?,
        t_base: cfg.f64("T")?,
        grid_step: 1.0,
        seed,
        cutoff_x: cfg.f64("cutoff_X")?,
        epsilon: cfg.opt_f64("epsilon")?.unwrap_or(0.0),
        prefilter_slack: cfg.opt_f64("prefilter_slack")?.unwrap_or(2.0),
    };
    sc.grid_step = match cfg.opt_f64("grid_step")? {
        Some(h) => h,
        None if sc.t_base > 0.0 && sc.shifts.last() > 0.0 => sc.max_grid_step(),
        None => 1.0,
    };
    if let Err(e) = sc.validate() {
        let key = match e {
            AnalysisError::Resolution { .. } => "grid_step",
            _ => "T",
        };
        return Err(fail(analysis_code(&e), cfg.invalid(key, e)));
    }
    Ok(sc)
}

/// `targets`, or log ζ at `s + i d_k τ₀` when `plant_tau = τ₀` is given.
fn targets(cfg: &Config, sc: &ScanConfig) -> Result<(Vec<Complex64>, Option<f64>), Failure> {
    match (cfg.opt_list_complex("targets")?, cfg.opt_f64("plant_tau")?) {
        (Some(_), Some(_)) => Err(fail(EXIT_USAGE, cfg.invalid("plant_tau", "give either targets or plant_tau"))),
        (Some(z), None) => {
            if z.len() != sc.shifts.len() {
                return Err(fail(
                    EXIT_USAGE,
                    cfg.invalid("targets", format!("{} targets for {} shifts", z.len(), sc.shifts.len())),
                ));
            }
            Ok((z, None))
        }
        (None, Some(tau)) => {
            let z = sc
                .shifts
                .shifts()
                .iter()
                .map(|&d| log_zeta(sc.s.shifted(d, tau), 1e-10).map(|v| v.value))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((z, Some(tau)))
        }
        (None, None) => Err(fail(EXIT_USAGE, "missing required key `targets` (or `plant_tau`)")),
    }
}

fn load_assignment(ctx: &Context) -> Result<PhaseAssignment, Failure> {
    let cfg = &ctx.config;
    if let Some(path) = cfg.opt_str("assignment_file") {
        let path = Path::new(&path);
        let full = if path.is_relative() { ctx.config_dir.join(path) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&full)
            .map_err(|e| fail(EXIT_USAGE, cfg.invalid("assignment_file", format!("{}: {e}", full.display()))))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| fail(EXIT_USAGE, cfg.invalid("assignment_file", e)))?;
        let doc = value.pointer("/results/assignment").cloned().unwrap_or(value);
        return serde_json::from_value(doc).map_err(|e| fail(EXIT_USAGE, cfg.invalid("assignment_file", e)));
    }
    let primes = cfg.opt_list_u64("primes")?.unwrap_or_default();
    let thetas = cfg.opt_list_f64("thetas")?.unwrap_or_else(|| vec![0.0; primes.len()]);
    if thetas.len() != primes.len() {
        return Err(fail(EXIT_USAGE, cfg.invalid("thetas", "one phase per prime required")));
    }
    let l = cfg.opt_u64("L")?;
    PhaseAssignment::new(primes.into_iter().zip(thetas).collect(), l)
        .map_err(|e| fail(EXIT_USAGE, cfg.invalid("primes", e)))
}

fn fmt_f64(x: f64) -> String {
    x.to_string()
}

// ---------------------------------------------------------------- build-phases

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildPhasesResult {
    pub converged: bool,
    pub residual: f64,
    pub epsilon: f64,
    pub primes_examined: usize,
    pub sums: Vec<Complex64>,
    pub assignment: PhaseAssignment,
}

pub fn build_phases(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let spec = TargetSpec {
        targets: cfg.list_complex("targets")?,
        epsilon: cfg.f64("epsilon")?,
        s: eval_point(cfg)?,
        shifts: shifts(cfg, "shifts")?,
        prime_floor: cfg.f64("y")?,
    };
    spec.validate().map_err(|e| fail(EXIT_USAGE, cfg.invalid("targets", e)))?;
    let mut options = GreedyOptions::default();
    if let Some(mode) = cfg.opt_str("mode") {
        options.mode = match mode.as_str() {
            "free" => PhaseMode::Free,
            "lattice" => PhaseMode::Lattice,
            other => return Err(fail(EXIT_USAGE, cfg.invalid("mode", format!("expected free or lattice, got `{other}`")))),
        };
    }
    if let Some(b) = cfg.opt_u64("budget")? {
        options.budget = b as usize;
    }
    if let Some(deg) = cfg.opt_f64("overshoot_deg")? {
        options.overshoot_angle = deg.to_radians();
    }
    if let Some(g) = cfg.opt_u64("phase_grid")? {
        options.phase_grid = g as usize;
    }

    let (assignment, primes_examined, converged) = match build_phase_assignment(&spec, &options) {
        Ok(out) => (out.assignment, out.primes_examined, true),
        Err(TargetingError::NonConvergence { best, primes_used, .. }) => (*best, primes_used, false),
        Err(e) => return Err(e.into()),
    };
    let res = residual(&assignment, &spec);
    let result = BuildPhasesResult {
        converged,
        residual: res,
        epsilon: spec.epsilon,
        primes_examined,
        sums: assignment_sums(&assignment, &spec),
        assignment,
    };
    let csv = csv(
        &["p", "theta"],
        result.assignment.terms().iter().map(|&(p, th)| [p.to_string(), fmt_f64(th)]),
    );
    let summary = if converged {
        format!("residual {res:.6e} < epsilon {} with {} primes", spec.epsilon, result.assignment.len())
    } else {
        format!(
            "no convergence after {primes_examined} primes; best residual {res:.6e} (epsilon {}, lattice L = {})",
            spec.epsilon,
            lattice_modulus(&spec)
        )
    };
    let exit = if converged { 0 } else { EXIT_NONCONVERGENCE };
    finish("build-phases", ctx, result, csv, summary, exit)
}

// ---------------------------------------------------------------- find-tau

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindTauResult {
    pub scan: ScanConfig,
    pub targets: Vec<Complex64>,
    pub planted_tau: Option<f64>,
    pub hits: Vec<TauHit>,
}

pub fn find_tau_cmd(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let sc = scan_config(cfg, ctx.seed)?;
    let (z, planted) = targets(cfg, &sc)?;
    let max_hits = cfg.opt_u64("max_hits")?.unwrap_or(10) as usize;
    let hits = find_tau(&sc, &z, max_hits)?;
    let csv = csv(
        &["tau", "distance"],
        hits.iter().map(|h| [fmt_f64(h.tau), fmt_f64(h.distance)]),
    );
    let summary = match hits.first() {
        Some(h) => format!("{} hits; best tau {} at distance {:.3e}", hits.len(), h.tau, h.distance),
        None => "no hits".to_string(),
    };
    let result = FindTauResult {
        scan: sc,
        targets: z,
        planted_tau: planted,
        hits,
    };
    finish("find-tau", ctx, result, csv, summary, 0)
}

// ---------------------------------------------------------------- density

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub kind: String,
    pub scan: ScanConfig,
    pub targets: Option<Vec<Complex64>>,
    pub report: DensityReport,
}

pub fn density(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let sc = scan_config(cfg, ctx.seed)?;
    let kind = cfg.opt_str("kind").unwrap_or_else(|| "theorem".into());
    let (report, z) = match kind.as_str() {
        "theorem" => {
            let (z, _) = targets(cfg, &sc)?;
            (theorem_scan(&sc, &z)?, Some(z))
        }
        "good-set" => (good_set_measure(&sc)?, None),
        other => return Err(fail(EXIT_USAGE, cfg.invalid("kind", format!("expected theorem or good-set, got `{other}`")))),
    };
    let csv = intervals_csv(&report.hit_intervals);
    let mut summary = format!(
        "fraction {:.6} (hit {:.4} of {:.4}, excluded {:.4})",
        report.fraction, report.hit_measure, report.total_measure, report.excluded_measure
    );
    if report.nonintegral_shifts {
        summary.push_str("; warning: shifts are not integers");
    }
    let result = DensityResult {
        kind,
        scan: sc,
        targets: z,
        report,
    };
    finish("density", ctx, result, csv, summary, 0)
}

// ---------------------------------------------------------------- tsang

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsangRow {
    pub sigma: f64,
    pub cutoff_x: f64,
    pub t_base: f64,
    pub grid_step: f64,
    pub report: TsangReport,
}

pub fn tsang(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let sigmas = cfg.list_f64("sigma")?;
    let cutoffs = cfg.list_f64("cutoff_X")?;
    let t_base = cfg.f64("T")?;
    let step = match cfg.opt_f64("grid_step")? {
        Some(h) => h,
        None => {
            let top = cutoffs.iter().fold(1.0f64, |m, x| m.max(x.ln()));
            std::f64::consts::PI / (8.0 * top)
        }
    };
    let mut rows = Vec::new();
    for &sigma in &sigmas {
        for &x in &cutoffs {
            let report = tsang_detail(sigma, t_base, x, step)?;
            rows.push(TsangRow {
                sigma,
                cutoff_x: x,
                t_base,
                grid_step: step,
                report,
            });
        }
    }
    let csv = csv(
        &["sigma", "cutoff_X", "mean_square", "included_measure", "excluded_measure"],
        rows.iter().map(|r| {
            [
                fmt_f64(r.sigma),
                fmt_f64(r.cutoff_x),
                fmt_f64(r.report.mean_square),
                fmt_f64(r.report.included_measure),
                fmt_f64(r.report.excluded_measure),
            ]
        }),
    );
    let summary = rows
        .iter()
        .map(|r| format!("σ={} X={}: {:.6e}", r.sigma, r.cutoff_x, r.report.mean_square))
        .collect::<Vec<_>>()
        .join("; ");
    finish("tsang", ctx, rows, csv, summary, 0)
}

// ---------------------------------------------------------------- kronecker

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum KroneckerResult {
    Chen {
        instance: KroneckerInstance,
        solution: KroneckerSolution,
    },
    Window {
        shifts: ShiftVector,
        omega: f64,
        a: i64,
        hit: WindowHit,
        target: f64,
        certified_length: Option<u64>,
    },
}

pub fn kronecker(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let mode = cfg.opt_str("mode").unwrap_or_else(|| "chen".into());
    let result = match mode.as_str() {
        "chen" => {
            let lambdas = cfg.list_f64("lambdas")?;
            let n = lambdas.len();
            let instance = KroneckerInstance {
                alphas: cfg.opt_list_f64("alphas")?.unwrap_or_else(|| vec![0.0; n]),
                weights: cfg.opt_list_f64("weights")?.unwrap_or_else(|| vec![1.0; n]),
                lambdas,
                coeff_bound: cfg.u64("M")?,
                window: (cfg.i64("T1")?, cfg.i64("T2")?),
                hypothesis_asserted: cfg.opt_bool("hypothesis_asserted")?.unwrap_or(false),
            };
            let solution = chen_search(&instance)?;
            KroneckerResult::Chen { instance, solution }
        }
        "window" => {
            let sv = shifts(cfg, "shifts")?;
            let omega = cfg.f64("omega")?;
            let a = cfg.opt_f64("a")?.unwrap_or(0.0);
            if a.fract() != 0.0 {
                return Err(fail(EXIT_USAGE, cfg.invalid("a", "must be an integer")));
            }
            let hit = homogeneous_window(&sv, omega, a as i64)?;
            let certified_length = match cfg.opt_bool("certify")?.unwrap_or(false) {
                true => Some(certified_window_length(&sv, omega)?),
                false => None,
            };
            KroneckerResult::Window {
                target: sv.len() as f64 / omega,
                shifts: sv,
                omega,
                a: a as i64,
                hit,
                certified_length,
            }
        }
        other => return Err(fail(EXIT_USAGE, cfg.invalid("mode", format!("expected chen or window, got `{other}`")))),
    };
    let (csv, summary) = match &result {
        KroneckerResult::Chen { solution: s, .. } => (
            csv(
                &["t_star", "objective", "bound", "Delta", "Lambda", "certified"],
                [[
                    s.t_star.to_string(),
                    fmt_f64(s.objective),
                    fmt_f64(s.bound),
                    fmt_f64(s.delta),
                    s.lambda.map_or("inf".to_string(), fmt_f64),
                    s.certified.to_string(),
                ]],
            ),
            format!("t* = {}, objective {:.6e} ≤ bound {:.6e}", s.t_star, s.objective, s.bound),
        ),
        KroneckerResult::Window { hit, target, .. } => (
            csv(
                &["h", "t_used", "objective", "target"],
                [[hit.h.to_string(), hit.t_used.to_string(), fmt_f64(hit.objective), fmt_f64(*target)]],
            ),
            format!("h = {} (window {}), objective {:.6e} ≤ {:.6e}", hit.h, hit.t_used, hit.objective, target),
        ),
    };
    finish("kronecker", ctx, result, csv, summary, 0)
}

// ---------------------------------------------------------------- zeros

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ZerosResult {
    Wilder {
        amplitudes: Vec<Complex64>,
        frequencies: Vec<f64>,
        k: f64,
        alpha: f64,
        beta: f64,
        count: i64,
        bound_holds: bool,
    },
    ExpPoly {
        coeffs: Vec<Complex64>,
        shifts: ShiftVector,
        count: i64,
        bound: f64,
    },
    Proximity {
        s: EvalPoint,
        shifts: ShiftVector,
        tau_range: (f64, f64),
        grid_step: f64,
        report: ZeroProximityReport,
    },
}

pub fn zeros(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let mode = cfg.opt_str("mode").unwrap_or_else(|| "exp-poly".into());
    let result = match mode.as_str() {
        "wilder" => {
            let amplitudes = cfg.list_complex("amplitudes")?;
            let frequencies = cfg.list_f64("frequencies")?;
            let rect = Rectangle {
                k: cfg.f64("K")?,
                alpha: cfg.f64("alpha")?,
                beta: cfg.f64("beta")?,
            };
            let count = wilder_count(&amplitudes, &frequencies, rect)?;
            ZerosResult::Wilder {
                bound_holds: wilder_bound_holds(count, &frequencies, rect.beta),
                amplitudes,
                frequencies,
                k: rect.k,
                alpha: rect.alpha,
                beta: rect.beta,
                count,
            }
        }
        "exp-poly" => {
            let coeffs = cfg.list_complex("coeffs")?;
            let sv = shifts(cfg, "shifts")?;
            let count = exp_poly_zero_count(&coeffs, &sv)?;
            ZerosResult::ExpPoly {
                bound: sv.len() as f64 - 1.0 + sv.last() - sv.first(),
                coeffs,
                shifts: sv,
                count,
            }
        }
        "proximity" => {
            let s = eval_point(cfg)?;
            let sv = shifts(cfg, "shifts")?;
            let t_base = cfg.f64("T")?;
            let grid_step = cfg.f64("grid_step")?;
            let floor = cfg.opt_f64("floor")?.unwrap_or(ZERO_FLOOR);
            let report = zero_proximity_scan(&s, &sv, (t_base, 2.0 * t_base), grid_step, floor)?;
            ZerosResult::Proximity {
                s,
                shifts: sv,
                tau_range: (t_base, 2.0 * t_base),
                grid_step,
                report,
            }
        }
        other => {
            return Err(fail(
                EXIT_USAGE,
                cfg.invalid("mode", format!("expected wilder, exp-poly or proximity, got `{other}`")),
            ))
        }
    };
    let (csv, summary) = match &result {
        ZerosResult::Wilder { count, bound_holds, .. } => (
            csv(&["count", "bound_holds"], [[count.to_string(), bound_holds.to_string()]]),
            format!("{count} zeros in the rectangle; Wilder bound holds: {bound_holds}"),
        ),
        ZerosResult::ExpPoly { count, bound, .. } => (
            csv(&["count", "bound"], [[count.to_string(), fmt_f64(*bound)]]),
            format!("{count} zeros in [0, 1); bound {bound}"),
        ),
        ZerosResult::Proximity { report, .. } => (
            intervals_csv(&report.tau_windows),
            format!("{} windows, measure {:.6}", report.tau_windows.len(), report.measure()),
        ),
    };
    finish("zeros", ctx, result, csv, summary, 0)
}

// ---------------------------------------------------------------- adscan

/// Config keys that only matter for other commands get harmless defaults here.
fn phase_scan_config(cfg: &Config, seed: u64) -> Result<ScanConfig, Failure> {
    let s = EvalPoint::new(
        cfg.opt_f64("sigma")?.unwrap_or(0.75),
        cfg.opt_f64("t")?.unwrap_or(1.0),
    )
    .map_err(|e| fail(EXIT_USAGE, cfg.invalid("sigma", e)))?;
    let sv = match cfg.opt_list_f64("shifts")? {
        Some(v) => ShiftVector::new(v).map_err(|e| fail(EXIT_USAGE, cfg.invalid("shifts", e)))?,
        None => ShiftVector::new(vec![1.0])?,
    };
    let mut sc = ScanConfig {
        s,
        shifts: sv,
        t_base: cfg.f64("T")?,
        grid_step: 1.0,
        seed,
        cutoff_x: cfg.opt_f64("cutoff_X")?.unwrap_or(2.0),
        epsilon: 0.0,
        prefilter_slack: 2.0,
    };
    sc.grid_step = cfg.opt_f64("grid_step")?.unwrap_or_else(|| sc.max_grid_step());
    if let Err(e) = sc.validate() {
        return Err(fail(analysis_code(&e), cfg.invalid("grid_step", e)));
    }
    Ok(sc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdScanResult {
    pub t_base: f64,
    pub fraction: f64,
    /// `(2d)^{|M|}`, the equidistribution limit.
    pub expected: f64,
    pub verified: bool,
    pub windows: WindowSet,
}

pub fn adscan(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let assignment = load_assignment(ctx)?;
    let sc = phase_scan_config(cfg, ctx.seed)?;
    let d = cfg.f64("d")?;
    let (windows, fraction) = scan_a_d(&assignment, d, &sc)?;
    let verified = windows.verify(2, ctx.seed, 1e-9);
    let expected = (2.0 * d).powi(assignment.len() as i32);
    let csv = intervals_csv(&windows.intervals);
    let summary = format!(
        "fraction {fraction:.6} vs (2d)^|M| = {expected:.6} over {} intervals",
        windows.intervals.len()
    );
    let result = AdScanResult {
        t_base: sc.t_base,
        fraction,
        expected,
        verified,
        windows,
    };
    finish("adscan", ctx, result, csv, summary, 0)
}

// ---------------------------------------------------------------- tail-energy

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEnergyResult {
    pub d: f64,
    pub shift_index: usize,
    pub scan: ScanConfig,
    pub energy: TailEnergy,
    pub ratio: f64,
}

pub fn tail_energy_cmd(ctx: &Context) -> Result<Output, Failure> {
    let cfg = &ctx.config;
    let assignment = load_assignment(ctx)?;
    let sc = phase_scan_config(cfg, ctx.seed)?;
    let d = cfg.f64("d")?;
    let k = cfg.opt_u64("shift_index")?.unwrap_or(0) as usize;
    let energy = tail_energy(&assignment, d, &sc, k)?;
    let ratio = energy.integral / energy.reference;
    let csv = csv(
        &["integral", "reference", "ratio", "y"],
        [[fmt_f64(energy.integral), fmt_f64(energy.reference), fmt_f64(ratio), energy.y.to_string()]],
    );
    let summary = format!(
        "integral {:.6e}, reference {:.6e}, ratio {ratio:.4}",
        energy.integral, energy.reference
    );
    let result = TailEnergyResult {
        d,
        shift_index: k,
        scan: sc,
        energy,
        ratio,
    };
    finish("tail-energy", ctx, result, csv, summary, 0)
}
