//! Direct-versus-predicted comparisons and the artifacts they produce.
//!
//! [`run_comparison`] solves for `Q_n` from moments, evaluates the asymptotic
//! model on a fixed grid, and collects errors, decay fits, zero counts and the
//! Padé table into a [`ComparisonReport`]. Everything except the `timings`
//! field is a deterministic function of the inputs.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::asym::{AsymptoticModel, SheetValues};
use crate::direct::{coefficient_distance, DirectContext, DirectSolution};
use crate::error::{Error, Result};
use crate::geometry::{Analytic, Builtin, CrossGeometry, WeightSpec};
use crate::quad::tanh_sinh01;
use crate::surface::{eval_w, SurfacePoint};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub circle_points: usize,
    /// Circle radius in units of `√(a²+b²)`.
    pub circle_factor: f64,
    pub near_per_arc: usize,
    /// Distance from the cross in units of `min(a,b)`.
    pub near_factor: f64,
    /// Excluded fraction of each arc at both ends.
    pub cut_margin: f64,
    pub cut_per_arc: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { circle_points: 20, circle_factor: 2.0, near_per_arc: 3, near_factor: 0.3, cut_margin: 0.15, cut_per_arc: 5 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.circle_factor > 1.0
            && self.near_factor > 0.0
            && self.near_factor < 1.0
            && self.cut_margin >= 0.15
            && self.cut_margin < 0.5;
        if !ok {
            return Err(Error::Config(format!("invalid grid {self:?}")));
        }
        Ok(())
    }

    /// Circle points followed by points beside the arcs, alternating sides.
    pub fn interior(&self, g: &CrossGeometry) -> Vec<C64> {
        let r = self.circle_factor * (g.a * g.a + g.b * g.b).sqrt();
        let mut out: Vec<C64> = (0..self.circle_points)
            .map(|k| C64::from_polar(r, (k as f64 + 0.5) * 2.0 * PI / self.circle_points as f64))
            .collect();
        let d = self.near_factor * g.a.min(g.b);
        let k = self.near_per_arc;
        for i in 1..=4 {
            for j in 0..k {
                let t = if k == 1 { 0.5 } else { 0.3 + 0.4 * j as f64 / (k - 1) as f64 };
                let side = if j % 2 == 0 { 1.0 } else { -1.0 };
                out.push(g.arc_point(i, t) + g.plus_normal(i) * (side * d));
            }
        }
        out
    }

    /// `(arc, t)` pairs evenly spread over `[margin, 1 − margin]`.
    pub fn cut(&self) -> Vec<(usize, f64)> {
        let k = self.cut_per_arc;
        let span = 1.0 - 2.0 * self.cut_margin;
        (1..=4)
            .flat_map(|i| (0..k).map(move |j| (i, self.cut_margin + span * (j as f64 + 0.5) / k as f64)))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub n_set: Vec<usize>,
    #[serde(default)]
    pub grid: GridSpec,
    /// Working precision first; further entries are re-solved and compared.
    pub precisions: Vec<u32>,
    pub epsilon: f64,
    /// Highest prediction order evaluated (0 or 1).
    pub order: u8,
}

impl ComparisonConfig {
    pub fn new(n_set: Vec<usize>) -> Self {
        Self { n_set, grid: GridSpec::default(), precisions: vec![crate::direct::DEFAULT_PREC], epsilon: 0.1, order: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NRecord {
    pub n: usize,
    pub effective_degree: usize,
    pub rank_gap: f64,
    pub residual: f64,
    /// Sup relative error on the interior grid, per order.
    pub sup_error: Vec<f64>,
    /// Sup error on the cut grid relative to `max |Q_n|` there, per order.
    pub cut_error: Vec<f64>,
    /// Sup relative error of `wR_n`, per order.
    pub remainder_error: Vec<f64>,
    /// Sup relative gap between the order-0 and order-1 predictions.
    pub order_gap: Option<f64>,
    /// Largest relative coefficient distance to the re-solves at other precisions.
    pub precision_spread: Option<f64>,
    pub zero_counts: ZeroCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroCounts {
    /// Zeros closest to each arc.
    pub arcs: [usize; 4],
    pub origin: usize,
    /// Zeros farther than `0.25 min(a,b)` from the cross.
    pub off_cross: usize,
    /// `n · mass(Δ_i)`.
    pub expected: [f64; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub label: String,
    pub n: Vec<usize>,
    pub errors: Vec<f64>,
    /// `−slope` of `log error` against `log n`.
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `log error`.
    pub residual: f64,
    /// `exponent ± 2·stderr`, absent with fewer than three points.
    pub band: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PadeRow {
    pub n: usize,
    pub parity: usize,
    /// `"pole"` for a sheet-0 `z_k`, `"interpolation"` for sheet 1.
    pub kind: String,
    pub target: [f64; 2],
    pub found: Option<[f64; 2]>,
    pub distance: Option<f64>,
    /// Winding number of `R_n` around the interpolation point.
    pub winding: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PadeTable {
    pub status: String,
    pub rows: Vec<PadeRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub setup_ms: f64,
    pub per_n_ms: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub weight: String,
    pub a: f64,
    pub b: f64,
    pub n_list: Vec<usize>,
    pub grid: GridSpec,
    pub precisions: Vec<u32>,
    pub epsilon: f64,
    pub nu: [f64; 2],
    pub d_exponent: Option<f64>,
    pub c_rho: [f64; 2],
    pub masses: [f64; 4],
    pub records: Vec<NRecord>,
    pub fits: Vec<DecayFit>,
    pub pade: PadeTable,
    /// Excluded from determinism comparisons.
    pub timings: Timings,
}

/// One CSV row per `(n, grid point)`.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub n: usize,
    pub re_z: f64,
    pub im_z: f64,
    pub abs_direct: f64,
    pub abs_predicted0: f64,
    pub abs_predicted1: f64,
    pub rel_err0: f64,
    pub rel_err1: f64,
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the timing block zeroed.
    pub fn to_json_untimed(&self) -> Result<String> {
        let mut r = self.clone();
        r.timings = Timings { total_ms: 0.0, setup_ms: 0.0, per_n_ms: vec![] };
        r.to_json()
    }

    pub fn record(&self, n: usize) -> Option<&NRecord> {
        self.records.iter().find(|r| r.n == n)
    }

    pub fn fit(&self, label: &str) -> Option<&DecayFit> {
        self.fits.iter().find(|f| f.label == label)
    }
}

pub fn write_grid_csv<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// `mass(Δ_i) = (1/π)∫_{Δ_i} |s/w_+(s)| |ds|`.
pub fn arc_masses(g: &CrossGeometry) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (k, m) in out.iter_mut().enumerate() {
        let i = k + 1;
        let len = g.arc_length(i);
        // s = a_i(1−t), |s| = len·(1−t), |ds| = len·dt
        let v = tanh_sinh01(|t, tc| C64::new(len * len * tc / g.wabs_on_arc(i, t), 0.0), 1e-13)?;
        *m = v.re / PI;
    }
    Ok(out)
}

/// Least-squares fit of `log e = c − d log n`.
pub fn fit_decay(label: &str, n: &[usize], errors: &[f64]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = n
        .iter()
        .zip(errors)
        .filter(|(_, e)| e.is_finite() && **e > 0.0)
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let band = (pts.len() > 2).then(|| {
        let se = (ss / (m - 2.0) / sxx).sqrt();
        [-slope - 2.0 * se, -slope + 2.0 * se]
    });
    Some(DecayFit {
        label: label.into(),
        n: n.to_vec(),
        errors: errors.to_vec(),
        exponent: -slope,
        intercept,
        residual: (ss / m).sqrt(),
        band,
    })
}

fn nearest_arc(g: &CrossGeometry, z: C64) -> (usize, f64) {
    (1..=4)
        .map(|i| {
            let t = (1.0 - (z / g.endpoint(i)).re).clamp(0.0, 1.0);
            (i, (z - g.arc_point(i, t)).norm())
        })
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
}

pub fn count_zeros(g: &CrossGeometry, zeros: &[C64], masses: &[f64; 4], n: usize) -> ZeroCounts {
    let size = g.a.max(g.b);
    let far = 0.25 * g.a.min(g.b);
    let mut c = ZeroCounts { arcs: [0; 4], origin: 0, off_cross: 0, expected: masses.map(|m| m * n as f64) };
    for z in zeros {
        if z.norm() <= 1e-8 * size {
            c.origin += 1;
            continue;
        }
        let (i, d) = nearest_arc(g, *z);
        if d > far {
            c.off_cross += 1;
        } else {
            c.arcs[i - 1] += 1;
        }
    }
    c
}

struct Prepared {
    model: AsymptoticModel,
    direct: DirectContext,
    checks: Vec<DirectContext>,
    interior: Vec<(C64, [SheetValues; 2], C64)>,
    cut: Vec<(usize, f64, C64)>,
    masses: [f64; 4],
}

fn prepare(spec: &WeightSpec, cfg: &ComparisonConfig) -> Result<Prepared> {
    cfg.grid.validate()?;
    if cfg.n_set.is_empty() || cfg.precisions.is_empty() {
        return Err(Error::Config("n set and precision list must be non-empty".into()));
    }
    if cfg.order > 1 {
        return Err(Error::Config(format!("order must be 0 or 1, got {}", cfg.order)));
    }
    let model = AsymptoticModel::new(spec).map_err(|e| e.tag("asym"))?;
    for &n in &cfg.n_set {
        if !model.is_allowable(n, cfg.epsilon)? {
            return Err(Error::ExcludedIndex(n));
        }
    }
    let nmax = *cfg.n_set.iter().max().expect("non-empty");
    let direct = DirectContext::new(spec, nmax, cfg.precisions[0]).map_err(|e| e.tag("direct"))?;
    let checks = cfg.precisions[1..]
        .iter()
        .map(|&p| DirectContext::new(spec, nmax, p).map_err(|e| e.tag("direct")))
        .collect::<Result<Vec<_>>>()?;
    let g = &spec.geometry;
    let interior = cfg
        .grid
        .interior(g)
        .into_iter()
        .map(|z| Ok((z, model.point_values(z)?, eval_w(g, z)?)))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.tag("asym"))?;
    let cut = cfg.grid.cut().into_iter().map(|(i, t)| (i, t, g.arc_point(i, t))).collect();
    let masses = arc_masses(g)?;
    Ok(Prepared { model, direct, checks, interior, cut, masses })
}

fn compare_one(p: &Prepared, cfg: &ComparisonConfig, n: usize) -> Result<(NRecord, Vec<GridRow>, DirectSolution)> {
    let sol = p.direct.solve(n).map_err(|e| e.tag("direct"))?;
    let orders: Vec<u8> = (0..=cfg.order).collect();
    let mut sup = vec![0.0f64; orders.len()];
    let mut rem = vec![0.0f64; orders.len()];
    let mut gap: Option<f64> = None;
    let mut rows = Vec::with_capacity(p.interior.len());
    for (z, v, w) in &p.interior {
        let q = sol.eval(*z);
        let wr = *w * p.direct.remainder(&sol, *z).map_err(|e| e.tag("direct"))?;
        let mut pred = [C64::new(0.0, 0.0); 2];
        let mut err = [f64::NAN; 2];
        for &o in &orders {
            let k = o as usize;
            pred[k] = p.model.predict_q_from(n, *z, v, o).map_err(|e| e.tag("asym"))?;
            err[k] = (pred[k] / q - 1.0).norm();
            sup[k] = sup[k].max(err[k]);
            let pr = p.model.predict_r_from(n, *z, v, o).map_err(|e| e.tag("asym"))?;
            rem[k] = rem[k].max((pr / wr - 1.0).norm());
        }
        if orders.len() == 2 {
            let d = (pred[0] / pred[1] - 1.0).norm();
            gap = Some(gap.map_or(d, |g: f64| g.max(d)));
        }
        rows.push(GridRow {
            n,
            re_z: z.re,
            im_z: z.im,
            abs_direct: q.norm(),
            abs_predicted0: pred[0].norm(),
            abs_predicted1: if orders.len() == 2 { pred[1].norm() } else { f64::NAN },
            rel_err0: err[0],
            rel_err1: err[1],
        });
    }
    let mut cut_num = vec![0.0f64; orders.len()];
    let mut cut_den = 0.0f64;
    for &(i, t, s) in &p.cut {
        let q = sol.eval(s);
        cut_den = cut_den.max(q.norm());
        for &o in &orders {
            let pr = p.model.predict_q_on_cut(n, i, t, o).map_err(|e| e.tag("asym"))?;
            cut_num[o as usize] = cut_num[o as usize].max((pr - q).norm());
        }
    }
    let cut = cut_num.iter().map(|x| x / cut_den).collect();
    let mut spread: Option<f64> = None;
    for c in &p.checks {
        let other = c.solve(n).map_err(|e| e.tag("direct"))?;
        if other.effective_degree != sol.effective_degree {
            return Err(Error::Precision(format!(
                "Q_{n}: effective degree {} at {} bits but {} at {} bits",
                sol.effective_degree,
                sol.prec,
                other.effective_degree,
                other.prec
            )));
        }
        let d = coefficient_distance(&sol, &other, p.direct.moments.radius);
        spread = Some(spread.map_or(d, |s: f64| s.max(d)));
    }
    let zeros = sol.zeros().map_err(|e| e.tag("direct"))?;
    let g = &p.model.spec.geometry;
    let record = NRecord {
        n,
        effective_degree: sol.effective_degree,
        rank_gap: sol.rank_gap,
        residual: sol.residual,
        sup_error: sup,
        cut_error: cut,
        remainder_error: rem,
        order_gap: gap,
        precision_spread: spread,
        zero_counts: count_zeros(g, &zeros, &p.masses, n),
    };
    Ok((record, rows, sol))
}

/// Runs `f` for each index on scoped threads; results come back in input order.
fn parallel_map<T: Send, F: Fn(usize) -> Result<T> + Sync>(items: &[usize], f: F) -> Vec<Result<T>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len()).max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<T>>>> = items.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let r = f(items[k]);
                *slots[k].lock().expect("slot") = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot").expect("filled")).collect()
}

/// Full comparison: errors per `n`, decay fits, zero counts and the Padé table.
pub fn run_comparison(spec: &WeightSpec, cfg: &ComparisonConfig) -> Result<(ComparisonReport, Vec<GridRow>)> {
    let start = Instant::now();
    let mut n_set = cfg.n_set.clone();
    n_set.sort_unstable();
    n_set.dedup();
    let cfg = ComparisonConfig { n_set: n_set.clone(), ..cfg.clone() };
    let p = prepare(spec, &cfg).map_err(|e| e.tag("harness"))?;
    let setup_ms = start.elapsed().as_secs_f64() * 1e3;
    let results = parallel_map(&n_set, |n| {
        let t = Instant::now();
        compare_one(&p, &cfg, n).map(|r| (r, t.elapsed().as_secs_f64() * 1e3))
    });
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut sols = Vec::new();
    let mut per_n_ms = Vec::new();
    for r in results {
        let ((rec, rs, sol), ms) = r.map_err(|e| e.tag("harness"))?;
        records.push(rec);
        rows.extend(rs);
        sols.push(sol);
        per_n_ms.push(ms);
    }
    let mut fits = Vec::new();
    for o in 0..=cfg.order as usize {
        let errs: Vec<f64> = records.iter().map(|r| r.sup_error[o]).collect();
        fits.extend(fit_decay(&format!("order{o}"), &n_set, &errs));
        for parity in 0..2 {
            let (ns, es): (Vec<usize>, Vec<f64>) =
                records.iter().filter(|r| r.n % 2 == parity).map(|r| (r.n, r.sup_error[o])).unzip();
            if ns.len() < n_set.len() {
                let name = if parity == 0 { "even" } else { "odd" };
                fits.extend(fit_decay(&format!("order{o}-{name}"), &ns, &es));
            }
        }
    }
    let pade = pade_table(&p.model, &p.direct, &n_set, &sols).map_err(|e| e.tag("harness"))?;
    let g = &spec.geometry;
    let c = p.model.c_rho();
    let report = ComparisonReport {
        weight: spec.label.clone(),
        a: g.a,
        b: g.b,
        n_list: n_set,
        grid: cfg.grid.clone(),
        precisions: cfg.precisions.clone(),
        epsilon: cfg.epsilon,
        nu: [p.model.nu.re, p.model.nu.im],
        d_exponent: p.model.d.value(),
        c_rho: [c.re, c.im],
        masses: p.masses,
        records,
        fits,
        pade,
        timings: Timings { total_ms: start.elapsed().as_secs_f64() * 1e3, setup_ms, per_n_ms },
    };
    Ok((report, rows))
}

/// Zero of `R_n` near `z0` by the secant method, kept off the cross.
fn remainder_zero(direct: &DirectContext, sol: &DirectSolution, z0: C64) -> Result<Option<C64>> {
    let g = &direct.rules.spec.geometry;
    let size = g.a.max(g.b);
    let f = |z: C64| direct.remainder(sol, z);
    let mut x0 = z0;
    let mut x1 = z0 + C64::new(0.02, 0.01) * size;
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    for _ in 0..60 {
        let df = f1 - f0;
        if df.norm() == 0.0 {
            break;
        }
        let mut x2 = x1 - f1 * (x1 - x0) / df;
        let step = (x2 - x1).norm();
        if step > 0.25 * size {
            x2 = x1 + (x2 - x1) * (0.25 * size / step);
        }
        if g.distance_to_cross(x2) < 1e-3 * size {
            return Ok(None);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1)?;
        if (x1 - x0).norm() <= 1e-12 * size {
            return Ok(Some(x1));
        }
    }
    Ok(None)
}

/// Net number of turns of `R_n` around a small circle centred at `z`.
fn winding(direct: &DirectContext, sol: &DirectSolution, z: C64, r: f64) -> Result<i64> {
    let m = 64;
    let mut total = 0.0;
    let mut prev = direct.remainder(sol, z + r)?;
    for k in 1..=m {
        let cur = direct.remainder(sol, z + C64::from_polar(r, 2.0 * PI * k as f64 / m as f64))?;
        total += (cur / prev).arg();
        prev = cur;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn pade_table(model: &AsymptoticModel, direct: &DirectContext, n_set: &[usize], sols: &[DirectSolution]) -> Result<PadeTable> {
    let g = &model.spec.geometry;
    let finite: Vec<bool> = model.zk.zk.iter().map(|z| z.is_finite()).collect();
    if !finite[0] && !finite[1] {
        return Ok(PadeTable { status: "no finite z_k".into(), rows: vec![] });
    }
    let mut rows = Vec::new();
    for (&n, sol) in n_set.iter().zip(sols) {
        let k = n % 2;
        let (z, sheet) = match model.zk.zk[k].point {
            SurfacePoint::Regular { z, sheet } => (z, sheet),
            _ => continue,
        };
        let row = if sheet == 0 {
            let zeros = sol.zeros()?;
            let best = zeros.iter().copied().min_by(|x, y| (x - z).norm().total_cmp(&(y - z).norm()));
            PadeRow {
                n,
                parity: k,
                kind: "pole".into(),
                target: [z.re, z.im],
                found: best.map(|b| [b.re, b.im]),
                distance: best.map(|b| (b - z).norm()),
                winding: None,
            }
        } else {
            let found = remainder_zero(direct, sol, z)?;
            let wind = match found {
                Some(x) => {
                    let r = 0.05 * g.a.min(g.b).min(g.distance_to_cross(x));
                    Some(winding(direct, sol, x, r)?)
                }
                None => None,
            };
            PadeRow {
                n,
                parity: k,
                kind: "interpolation".into(),
                target: [z.re, z.im],
                found: found.map(|b| [b.re, b.im]),
                distance: found.map(|b| (b - z).norm()),
                winding: wind,
            }
        };
        rows.push(row);
    }
    let status = if rows.is_empty() { "z_k not finite for the requested parities" } else { "ok" };
    Ok(PadeTable { status: status.into(), rows })
}

/// Padé table on its own.
pub fn pade_pole_tracker(spec: &WeightSpec, n_set: &[usize], prec: u32) -> Result<PadeTable> {
    let model = AsymptoticModel::new(spec).map_err(|e| e.tag("asym"))?;
    if !model.zk.zk.iter().any(|z| z.is_finite()) {
        return Ok(PadeTable { status: "no finite z_k".into(), rows: vec![] });
    }
    let mut n_set = n_set.to_vec();
    n_set.sort_unstable();
    n_set.dedup();
    let nmax = *n_set.last().ok_or_else(|| Error::Config("empty n set".into()))?;
    let direct = DirectContext::new(spec, nmax, prec).map_err(|e| e.tag("direct"))?;
    let sols = parallel_map(&n_set, |n| direct.solve(n))
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.tag("direct"))?;
    pade_table(&model, &direct, &n_set, &sols).map_err(|e| e.tag("harness"))
}

/// Chebyshev weight times a rational factor: a generic class with finite `z_k`.
pub fn synthetic_pade_weight(g: CrossGeometry) -> Result<WeightSpec> {
    let c = std::array::from_fn(|k| Builtin::Chebyshev.constant(k + 1));
    let h = Analytic::Rational { num: vec![[1.0, 0.0], [0.4, 0.2]], den: vec![[1.0, 0.0], [0.0, -0.3]] };
    Ok(WeightSpec::from_constants(g, c, Builtin::Chebyshev.power(), Some(h))?.with_label("chebyshev-rational"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let g = CrossGeometry::new(1.0, 2.0).unwrap();
        let spec = GridSpec::default();
        let pts = spec.interior(&g);
        assert_eq!(pts.len(), 32);
        let r = 2.0 * 5f64.sqrt();
        assert!(pts[..20].iter().all(|z| (z.norm() - r).abs() < 1e-12));
        assert!(pts[20..].iter().all(|z| (g.distance_to_cross(*z) - 0.3).abs() < 1e-12));
        let cut = spec.cut();
        assert_eq!(cut.len(), 20);
        assert!(cut.iter().all(|(_, t)| (0.15..=0.85).contains(t)));
        assert!(GridSpec { cut_margin: 0.1, ..GridSpec::default() }.validate().is_err());
    }

    #[test]
    fn decay_fit_recovers_power_law() {
        let n = [4usize, 8, 12, 16];
        let e: Vec<f64> = n.iter().map(|n| 3.0 * (*n as f64).powf(-0.5)).collect();
        let f = fit_decay("x", &n, &e).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        let b = f.band.unwrap();
        assert!(b[0] <= 0.5 && 0.5 <= b[1]);
        assert!(fit_decay("x", &[4], &[0.1]).is_none());
    }

    #[test]
    fn masses_sum_to_one() {
        for (a, b) in [(1.0, 1.0), (1.0, 2.0), (2.0, 0.5)] {
            let m = arc_masses(&CrossGeometry::new(a, b).unwrap()).unwrap();
            assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-10, "{a} {b} {m:?}");
            assert!((m[0] - m[2]).abs() < 1e-12 && (m[1] - m[3]).abs() < 1e-12);
        }
        let m = arc_masses(&CrossGeometry::new(1.0, 1.0).unwrap()).unwrap();
        assert!(m.iter().all(|x| (x - 0.25).abs() < 1e-12));
    }

    #[test]
    fn chebyshev_report_is_deterministic() {
        let g = CrossGeometry::new(1.0, 1.0).unwrap();
        let spec = WeightSpec::builtin(g, Builtin::Chebyshev).unwrap();
        let cfg = ComparisonConfig { precisions: vec![128, 160], ..ComparisonConfig::new(vec![6, 2, 4]) };
        let (r1, rows) = run_comparison(&spec, &cfg).unwrap();
        let (r2, _) = run_comparison(&spec, &cfg).unwrap();
        assert_eq!(r1.to_json_untimed().unwrap(), r2.to_json_untimed().unwrap());
        assert_eq!(r1.n_list, vec![2, 4, 6]);
        assert_eq!(rows.len(), 3 * 32);
        assert_eq!(r1.pade.status, "no finite z_k");
        assert!(r1.pade.rows.is_empty());
        for rec in &r1.records {
            assert!(rec.cut_error[0] < 1e-12, "{rec:?}");
            assert!(rec.remainder_error[0] < 1e-12);
            assert!(rec.precision_spread.unwrap() < 1e-20);
        }
        // z², z⁴ − 1/2 and z²(z⁴ − 3/4)
        let counts: Vec<([usize; 4], usize)> = r1.records.iter().map(|r| (r.zero_counts.arcs, r.zero_counts.origin)).collect();
        assert_eq!(counts, vec![([0; 4], 2), ([1; 4], 0), ([1; 4], 2)]);
        let mut buf = Vec::new();
        write_grid_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,re_z,im_z,abs_direct,abs_predicted0,abs_predicted1,rel_err0,rel_err1\n"));
        let odd = ComparisonConfig::new(vec![3]);
        assert!(matches!(run_comparison(&spec, &odd).unwrap_err().root(), Error::ExcludedIndex(3)));
    }

    #[test]
    fn synthetic_weight_tracks_poles() {
        let g = CrossGeometry::new(1.0, 1.0).unwrap();
        let spec = synthetic_pade_weight(g).unwrap();
        let tab = pade_pole_tracker(&spec, &[3, 4, 7, 8, 11, 12], 192).unwrap();
        assert_eq!(tab.rows.len(), 6);
        for parity in 0..2 {
            let d: Vec<f64> = tab.rows.iter().filter(|r| r.parity == parity).map(|r| r.distance.unwrap()).collect();
            assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        }
        let interp: Vec<&PadeRow> = tab.rows.iter().filter(|r| r.kind == "interpolation").collect();
        assert!(!interp.is_empty());
        assert!(interp.iter().all(|r| r.winding == Some(1)));
    }
}
