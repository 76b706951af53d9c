//! Command-line front end.
//!
//! Every flag has a config-file key of the same name (dashes become
//! underscores); flags win over the file, the file wins over
//! `CROSSPOLY_PREC`, which wins over the built-in default.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asym::AsymptoticModel;
use crate::direct::{DirectContext, SolutionRecord, DEFAULT_PREC};
use crate::error::{Error, Result};
use crate::geometry::{Builtin, CrossGeometry, WeightFile, WeightSpec};
use crate::harness::{run_comparison, write_grid_csv, ComparisonConfig, GridSpec};
use crate::identities::run_identity_suite;
use crate::surface::{compute_periods, eval_w, SurfacePoint};
use crate::szego::SzegoData;
use crate::C64;

pub const PREC_ENV: &str = "CROSSPOLY_PREC";
const MIN_PREC: u32 = 32;
const MAX_PREC: u32 = 8192;

#[derive(Debug, Parser)]
#[command(name = "crosspoly", version, about = "Orthogonal polynomials on a cross: direct solves and strong asymptotics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Period B, K±, and the ω, τ checks.
    Periods(Flags),
    /// c_ρ and sample values of the Szegő function.
    Szego(Flags),
    /// Coefficients of Q_n from moments.
    Direct(Flags),
    /// Predicted Q_n and wR_n on the interior grid.
    Predict(Flags),
    /// Direct-versus-predicted comparison report.
    Compare(Flags),
    /// Padé pole and interpolation-point tracking.
    Pade(Flags),
    /// Identity-suite residuals.
    Identities(Flags),
}

impl Command {
    fn parts(&self) -> (CommandKind, &Flags) {
        match self {
            Self::Periods(f) => (CommandKind::Periods, f),
            Self::Szego(f) => (CommandKind::Szego, f),
            Self::Direct(f) => (CommandKind::Direct, f),
            Self::Predict(f) => (CommandKind::Predict, f),
            Self::Compare(f) => (CommandKind::Compare, f),
            Self::Pade(f) => (CommandKind::Pade, f),
            Self::Identities(f) => (CommandKind::Identities, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Periods,
    Szego,
    Direct,
    Predict,
    Compare,
    Pade,
    Identities,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with defaults for any of the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Weight description file.
    #[arg(long, conflicts_with = "builtin")]
    pub weight: Option<PathBuf>,
    /// chebyshev, legendre or jacobi-quarter.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Working precision in bits.
    #[arg(long)]
    pub prec: Option<u32>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub order: Option<u8>,
    /// Grid description file.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Config-file counterpart of [`Flags`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub weight: Option<PathBuf>,
    pub builtin: Option<String>,
    pub n: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub prec: Option<u32>,
    pub epsilon: Option<f64>,
    pub order: Option<u8>,
    pub grid: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WeightSource {
    Builtin(Builtin),
    File(PathBuf),
}

/// Fully resolved and validated invocation.
#[derive(Debug, Clone, Serialize)]
pub struct CliConfig {
    pub command: CommandKind,
    pub weight: Option<WeightSource>,
    pub a: f64,
    pub b: f64,
    pub n: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub prec: u32,
    pub epsilon: f64,
    pub order: u8,
    pub grid: GridSpec,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn resolve_relative(base: Option<&Path>, p: PathBuf) -> PathBuf {
    match base.and_then(Path::parent) {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

impl CliConfig {
    pub fn resolve(command: CommandKind, flags: &Flags, env_prec: Option<&str>) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        let base = flags.config.as_deref();
        let env_prec = match env_prec {
            Some(s) => Some(
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Config(format!("{PREC_ENV} must be a positive integer, got '{s}'")))?,
            ),
            None => None,
        };
        let weight_path = flags.weight.clone().or_else(|| file.weight.clone().map(|p| resolve_relative(base, p)));
        let builtin = flags.builtin.clone().or(file.builtin.clone());
        // a flag on either source overrides the other source's weight choice
        let weight = match (&flags.weight, &flags.builtin) {
            (Some(p), _) => Some(WeightSource::File(p.clone())),
            (None, Some(name)) => Some(WeightSource::Builtin(Builtin::parse(name)?)),
            (None, None) => match (weight_path, builtin) {
                (Some(_), Some(_)) => return Err(Error::Config("config gives both 'weight' and 'builtin'".into())),
                (Some(p), None) => Some(WeightSource::File(p)),
                (None, Some(name)) => Some(WeightSource::Builtin(Builtin::parse(&name)?)),
                (None, None) => None,
            },
        };
        let grid = match flags.grid.clone().or_else(|| file.grid.clone().map(|p| resolve_relative(base, p))) {
            Some(p) => {
                let text = std::fs::read_to_string(&p)?;
                serde_json::from_str::<GridSpec>(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => GridSpec::default(),
        };
        let (mut a, mut b) = (flags.a.or(file.a), flags.b.or(file.b));
        if let Some(WeightSource::File(p)) = &weight {
            let wf = WeightFile::load(p)?;
            for (name, given, stored) in [("a", a, wf.a), ("b", b, wf.b)] {
                if given.is_some_and(|v| v != stored) {
                    return Err(Error::Config(format!("--{name} disagrees with {} ({stored})", p.display())));
                }
            }
            (a, b) = (Some(wf.a), Some(wf.b));
        }
        let cfg = Self {
            command,
            weight,
            a: a.unwrap_or(1.0),
            b: b.unwrap_or(1.0),
            n: flags.n.or(file.n),
            n_min: flags.n_min.or(file.n_min),
            n_max: flags.n_max.or(file.n_max),
            prec: flags.prec.or(file.prec).or(env_prec).unwrap_or(DEFAULT_PREC),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(0.1),
            order: flags.order.or(file.order).unwrap_or(1),
            grid,
            out: flags.out.clone().or(file.out),
            format: flags.format.or(file.format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        CrossGeometry::new(self.a, self.b)?;
        if !(MIN_PREC..=MAX_PREC).contains(&self.prec) {
            return Err(Error::Config(format!("precision must lie in [{MIN_PREC}, {MAX_PREC}] bits, got {}", self.prec)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1/2), got {}", self.epsilon)));
        }
        if self.order > 1 {
            return Err(Error::Config(format!("order must be 0 or 1, got {}", self.order)));
        }
        self.grid.validate()?;
        if let (Some(lo), Some(hi)) = (self.n_min, self.n_max) {
            if lo > hi {
                return Err(Error::Config(format!("n-min {lo} exceeds n-max {hi}")));
            }
        }
        if self.n.is_some() && (self.n_min.is_some() || self.n_max.is_some()) {
            return Err(Error::Config("give either --n or an --n-min/--n-max range".into()));
        }
        let needs_weight = !matches!(self.command, CommandKind::Periods | CommandKind::Identities);
        if needs_weight && self.weight.is_none() {
            return Err(Error::Config("a weight is required: --weight FILE or --builtin NAME".into()));
        }
        if matches!(self.command, CommandKind::Direct | CommandKind::Predict) && self.n.is_none() {
            return Err(Error::Config("--n is required".into()));
        }
        if matches!(self.command, CommandKind::Compare | CommandKind::Pade) && self.n.is_none() && self.n_max.is_none() {
            return Err(Error::Config("--n or --n-max is required".into()));
        }
        Ok(())
    }

    pub fn weight_spec(&self) -> Result<WeightSpec> {
        match &self.weight {
            Some(WeightSource::Builtin(b)) => WeightSpec::builtin(CrossGeometry::new(self.a, self.b)?, *b),
            Some(WeightSource::File(p)) => {
                let wf = WeightFile::load(p)?;
                let label = p.file_stem().map_or("custom".into(), |s| s.to_string_lossy().into_owned());
                Ok(wf.into_spec()?.with_label(&label))
            }
            None => Err(Error::Config("no weight given".into())),
        }
    }

    /// Requested indices: `--n`, or the range `[n-min, n-max]`.
    fn n_range(&self) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => (self.n_min.unwrap_or(1)..=self.n_max.unwrap_or(0)).collect(),
        }
    }
}

/// 0 success, 2 validation failure, 3 precision failure, 1 I/O failure.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Precision(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let env = std::env::var(PREC_ENV).ok();
    let (kind, flags) = cli.command.parts();
    let result = CliConfig::resolve(kind, flags, env.as_deref()).and_then(|cfg| dispatch(&cfg, stdout));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Writes to `--out` when given, otherwise to stdout.
fn emit(cfg: &CliConfig, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, body)?,
        None => stdout.write_all(body)?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))
}

fn c2(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Real or complex number with parts below `chop` printed as zero.
fn fmt_complex(z: C64, chop: f64) -> String {
    let re = if z.re.abs() <= chop { 0.0 } else { z.re };
    let im = if z.im.abs() <= chop { 0.0 } else { z.im };
    // avoid "-0"
    let re = re + 0.0;
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re}"),
        (true, false) => format!("{im}i"),
        (false, false) if im > 0.0 => format!("{re}+{im}i"),
        _ => format!("{re}{im}i"),
    }
}

fn dispatch(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    match cfg.command {
        CommandKind::Periods => periods(cfg, out),
        CommandKind::Szego => szego(cfg, out),
        CommandKind::Direct => direct(cfg, out),
        CommandKind::Predict => predict(cfg, out),
        CommandKind::Compare => compare(cfg, out),
        CommandKind::Pade => pade(cfg, out),
        CommandKind::Identities => identities(cfg, out),
    }
}

#[derive(Serialize)]
struct PeriodsOut {
    a: f64,
    b: f64,
    period_b: [f64; 2],
    k_plus: [f64; 2],
    k_minus: [f64; 2],
    omega: [f64; 2],
    tau: [f64; 2],
    omega_check: f64,
    tau_check: f64,
}

fn periods(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let ctx = compute_periods(&CrossGeometry::new(cfg.a, cfg.b)?)?;
    let p = PeriodsOut {
        a: cfg.a,
        b: cfg.b,
        period_b: c2(ctx.b),
        k_plus: c2(ctx.k_plus),
        k_minus: c2(ctx.k_minus),
        omega: c2(ctx.omega),
        tau: c2(ctx.tau),
        omega_check: (ctx.omega - 0.5).norm(),
        tau_check: (ctx.tau - 0.5).norm(),
    };
    let body = match cfg.format {
        Some(Format::Json) => json(&p)?,
        Some(Format::Csv) => csv_rows(&[&p].map(|p| {
            (p.a, p.b, p.period_b[0], p.period_b[1], p.omega[0], p.tau[0], p.omega_check, p.tau_check)
        }))?,
        None => format!(
            "B = {}\nK+ = {}\nK- = {}\nomega = {:.12}\ntau = {:.12}\n|omega - 1/2| = {:.2e}\n|tau - 1/2| = {:.2e}\n",
            ctx.b, ctx.k_plus, ctx.k_minus, ctx.omega.re, ctx.tau.re, p.omega_check, p.tau_check
        )
        .into_bytes(),
    };
    emit(cfg, out, &body)?;
    Ok(0)
}

#[derive(Serialize)]
struct SzegoSample {
    re_z: f64,
    im_z: f64,
    sheet: u8,
    s_re: f64,
    s_im: f64,
}

#[derive(Serialize)]
struct SzegoOut {
    weight: String,
    c_rho: [f64; 2],
    c_reduced: [f64; 2],
    lattice: [i64; 2],
    samples: Vec<SzegoSample>,
}

fn szego(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.weight_spec()?;
    let ctx = compute_periods(&spec.geometry)?;
    let sz = SzegoData::new(&spec, &ctx)?;
    let (red, l, m) = sz.c_class();
    let r = 2.0 * (cfg.a * cfg.a + cfg.b * cfg.b).sqrt();
    let mut samples = Vec::new();
    for k in 0..8 {
        let z = C64::from_polar(r, (k as f64 + 0.5) * std::f64::consts::PI / 4.0);
        for sheet in 0..2u8 {
            let s = sz.eval_s(&SurfacePoint::Regular { z, sheet })?;
            samples.push(SzegoSample { re_z: z.re, im_z: z.im, sheet, s_re: s.re, s_im: s.im });
        }
    }
    let o = SzegoOut { weight: spec.label.clone(), c_rho: c2(sz.c_rho), c_reduced: c2(red), lattice: [l, m], samples };
    let body = match cfg.format {
        Some(Format::Json) => json(&o)?,
        Some(Format::Csv) => csv_rows(&o.samples)?,
        None => {
            let mut s = format!("c_rho = {}\nreduced = {} (l = {l}, m = {m})\n", sz.c_rho, red);
            for x in &o.samples {
                s += &format!("S({:.6}{:+.6}i, sheet {}) = {:.12}{:+.12}i\n", x.re_z, x.im_z, x.sheet, x.s_re, x.s_im);
            }
            s.into_bytes()
        }
    };
    emit(cfg, out, &body)?;
    Ok(0)
}

#[derive(Serialize)]
struct CoeffRow {
    power: usize,
    re: f64,
    im: f64,
}

fn direct(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.weight_spec()?;
    let n = cfg.n.expect("validated");
    let ctx = DirectContext::new(&spec, n, cfg.prec)?;
    let sol = ctx.solve(n)?;
    let rec = sol.to_record();
    let c = sol.coeffs_c64();
    let r = ctx.moments.radius;
    let d = sol.effective_degree;
    let format = cfg.format.or(cfg.out.as_ref().map(|_| Format::Json));
    let body = match format {
        Some(Format::Json) => json(&rec)?,
        Some(Format::Csv) => csv_rows(&c.iter().enumerate().map(|(k, z)| CoeffRow { power: k, re: z.re, im: z.im }).collect::<Vec<_>>())?,
        None => {
            // parts far below the rank threshold relative to the R-scaled size are printed as 0
            let tiny = crate::direct::rank_threshold(cfg.prec);
            let words: Vec<String> = (0..=d).rev().map(|k| fmt_complex(c[k], tiny * r.powi((d - k) as i32))).collect();
            format!("{}\n", words.join(" ")).into_bytes()
        }
    };
    emit(cfg, out, &body)?;
    Ok(0)
}

/// Reads a `direct --out` file back.
pub fn read_solution(path: &Path) -> Result<crate::direct::DirectSolution> {
    let rec: SolutionRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    crate::direct::DirectSolution::from_record(&rec)
}

#[derive(Serialize)]
struct PredictRow {
    re_z: f64,
    im_z: f64,
    q_re: f64,
    q_im: f64,
    wr_re: f64,
    wr_im: f64,
}

fn predict(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.weight_spec()?;
    let n = cfg.n.expect("validated");
    let model = AsymptoticModel::new(&spec)?;
    if !model.is_allowable(n, cfg.epsilon)? {
        return Err(Error::ExcludedIndex(n));
    }
    let mut rows = Vec::new();
    for z in cfg.grid.interior(&spec.geometry) {
        let v = model.point_values(z)?;
        let q = model.predict_q_from(n, z, &v, cfg.order)?;
        let wr = model.predict_r_from(n, z, &v, cfg.order)?;
        rows.push(PredictRow { re_z: z.re, im_z: z.im, q_re: q.re, q_im: q.im, wr_re: wr.re, wr_im: wr.im });
    }
    let body = match cfg.format {
        Some(Format::Json) => json(&rows)?,
        Some(Format::Csv) => csv_rows(&rows)?,
        None => {
            let mut s = String::new();
            for r in &rows {
                let w = eval_w(&spec.geometry, C64::new(r.re_z, r.im_z))?;
                s += &format!(
                    "z = {:.6}{:+.6}i  Q = {:.10e}{:+.10e}i  R = {:.10e}\n",
                    r.re_z,
                    r.im_z,
                    r.q_re,
                    r.q_im,
                    (C64::new(r.wr_re, r.wr_im) / w).norm()
                );
            }
            s.into_bytes()
        }
    };
    emit(cfg, out, &body)?;
    Ok(0)
}

fn allowable_in_range(cfg: &CliConfig, spec: &WeightSpec) -> Result<Vec<usize>> {
    let wanted = cfg.n_range();
    let model = AsymptoticModel::new(spec)?;
    let hi = wanted.iter().copied().max().unwrap_or(0);
    let ok = model.allowable_indices(cfg.epsilon, hi)?;
    if cfg.n.is_some() {
        return if ok.contains(&wanted[0]) { Ok(wanted) } else { Err(Error::ExcludedIndex(wanted[0])) };
    }
    let set: Vec<usize> = wanted.into_iter().filter(|n| ok.contains(n)).collect();
    if set.is_empty() {
        return Err(Error::Config("no allowable index in the requested range".into()));
    }
    Ok(set)
}

fn compare(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.weight_spec()?;
    let n_set = allowable_in_range(cfg, &spec)?;
    let hc = ComparisonConfig {
        n_set,
        grid: cfg.grid.clone(),
        precisions: vec![cfg.prec],
        epsilon: cfg.epsilon,
        order: cfg.order,
    };
    let (report, rows) = run_comparison(&spec, &hc)?;
    let body = match cfg.format {
        Some(Format::Json) => report.to_json()?.into_bytes(),
        Some(Format::Csv) => {
            let mut buf = Vec::new();
            write_grid_csv(&rows, &mut buf)?;
            buf
        }
        None => {
            let mut s = format!("weight {} on a = {}, b = {}\n n  deg  sup_err  cut_err  remainder_err\n", report.weight, report.a, report.b);
            for r in &report.records {
                let o = cfg.order as usize;
                s += &format!(
                    "{:>3} {:>4}  {:.3e}  {:.3e}  {:.3e}\n",
                    r.n, r.effective_degree, r.sup_error[o], r.cut_error[o], r.remainder_error[o]
                );
            }
            for f in &report.fits {
                s += &format!("fit {}: exponent {:.3}, residual {:.3}\n", f.label, f.exponent, f.residual);
            }
            s.into_bytes()
        }
    };
    emit(cfg, out, &body)?;
    Ok(0)
}

fn pade(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.weight_spec()?;
    let n_set = allowable_in_range(cfg, &spec)?;
    let table = crate::harness::pade_pole_tracker(&spec, &n_set, cfg.prec)?;
    let body = match cfg.format {
        Some(Format::Json) => json(&table)?,
        Some(Format::Csv) => {
            #[derive(Serialize)]
            struct Row<'a> {
                n: usize,
                kind: &'a str,
                target_re: f64,
                target_im: f64,
                found_re: Option<f64>,
                found_im: Option<f64>,
                distance: Option<f64>,
            }
            let rows: Vec<Row> = table
                .rows
                .iter()
                .map(|r| Row {
                    n: r.n,
                    kind: &r.kind,
                    target_re: r.target[0],
                    target_im: r.target[1],
                    found_re: r.found.map(|f| f[0]),
                    found_im: r.found.map(|f| f[1]),
                    distance: r.distance,
                })
                .collect();
            csv_rows(&rows)?
        }
        None => {
            let mut s = format!("status: {}\n", table.status);
            for r in &table.rows {
                s += &format!(
                    "n = {:>3}  {:<13}  target {:.8}{:+.8}i  distance {}\n",
                    r.n,
                    r.kind,
                    r.target[0],
                    r.target[1],
                    r.distance.map_or("not found".into(), |d| format!("{d:.3e}"))
                );
            }
            s.into_bytes()
        }
    };
    emit(cfg, out, &body)?;
    Ok(0)
}

fn identities(cfg: &CliConfig, out: &mut dyn Write) -> Result<i32> {
    let rep = run_identity_suite(cfg.a, cfg.b)?;
    let body = match cfg.format {
        Some(Format::Json) => json(&rep)?,
        Some(Format::Csv) => csv_rows(&rep.rows)?,
        None => {
            let mut s = String::new();
            for r in &rep.rows {
                s += &format!("{:<16} {:<16} {:.3e}\n", r.name, r.weight, r.residual);
            }
            s += &format!("max residual {:.3e}: {}\n", rep.max_residual, if rep.pass { "pass" } else { "FAIL" });
            s.into_bytes()
        }
    };
    emit(cfg, out, &body)?;
    Ok(if rep.pass { 0 } else { 2 })
}
