//! Ground truth in arbitrary precision: moments of the weight on the cross,
//! the monic minimal-degree orthogonal polynomial `Q_n`, the remainder `R_n`,
//! the Cauchy transform `ρ̂` and the diagonal Padé approximant.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rug::float::Constant;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{poly_roots, WeightSpec};

pub const DEFAULT_PREC: u32 = 256;
/// Node counts are doubled up to this cap.
const MAX_NODES: usize = 4096;
/// Bits dropped for the cross-check solve.
const CHECK_DROP: u32 = 16;

pub fn to_c64(z: &Complex) -> C64 {
    C64::new(z.real().to_f64(), z.imag().to_f64())
}

pub fn from_c64(prec: u32, z: C64) -> Complex {
    Complex::with_val(prec, (z.re, z.im))
}

fn abs(prec: u32, z: &Complex) -> Float {
    Float::with_val(prec, z.abs_ref())
}

pub fn digits(prec: u32) -> f64 {
    prec as f64 * std::f64::consts::LOG10_2
}

/// Gauss–Jacobi rule on `[0,1]` for the weight `t^α`.
#[derive(Debug)]
pub struct GaussJacobi {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

/// Monic recurrence coefficients of `t^α` on `[0,1]`.
fn jacobi01_recurrence(n: usize, alpha: f64, prec: u32) -> (Vec<Float>, Vec<Float>) {
    let f = |x: f64| Float::with_val(prec, x);
    let al = f(alpha);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let kk = f(k as f64);
        let t = Float::with_val(prec, &kk * 2u32) + &al;
        // on [−1,1] with (1−y)^0 (1+y)^α
        let ay = if k == 0 {
            Float::with_val(prec, &al / Float::with_val(prec, &al + 2u32))
        } else {
            let num = Float::with_val(prec, &al * &al);
            let den = Float::with_val(prec, &t * Float::with_val(prec, &t + 2u32));
            num / den
        };
        let by = match k {
            0 => f(0.0),
            1 => {
                let num = Float::with_val(prec, Float::with_val(prec, &al + 1u32) * 4u32);
                let s2 = Float::with_val(prec, &al + 2u32);
                let den = Float::with_val(prec, &s2 * &s2) * Float::with_val(prec, &al + 3u32);
                num / den
            }
            _ => {
                let ka = Float::with_val(prec, &kk + &al);
                let num = Float::with_val(prec, &kk * &kk) * Float::with_val(prec, &ka * &ka) * 4u32;
                let den = Float::with_val(prec, &t * &t)
                    * Float::with_val(prec, &t + 1u32)
                    * Float::with_val(prec, &t - 1u32);
                num / den
            }
        };
        a.push((ay + 1u32) / 2u32);
        b.push(by / 4u32);
    }
    (a, b)
}

/// `(p_n(x), p_n′(x), p_{n−1}(x))` for the monic family.
fn eval_monic(x: &Float, a: &[Float], b: &[Float], prec: u32) -> (Float, Float, Float) {
    let n = a.len();
    let mut p0 = Float::with_val(prec, 0);
    let mut p1 = Float::with_val(prec, 1);
    let mut d0 = Float::with_val(prec, 0);
    let mut d1 = Float::with_val(prec, 0);
    for k in 0..n {
        let xa = Float::with_val(prec, x - &a[k]);
        let p2 = Float::with_val(prec, &xa * &p1) - Float::with_val(prec, &b[k] * &p0);
        let d2 = Float::with_val(prec, &xa * &d1) + &p1 - Float::with_val(prec, &b[k] * &d0);
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1, p0)
}

pub fn gauss_jacobi01(n: usize, alpha: f64, prec: u32) -> Result<GaussJacobi> {
    let (a, b) = jacobi01_recurrence(n, alpha, prec);
    // double-precision seeds from the Jacobi matrix
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = a[k].to_f64();
        if k + 1 < n {
            let off = b[k + 1].to_f64().sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let mut seeds: Vec<f64> = SymmetricEigen::new(j).eigenvalues.iter().copied().collect();
    seeds.sort_by(f64::total_cmp);
    let mu0 = Float::with_val(prec, 1) / Float::with_val(prec, alpha + 1.0);
    let mut norm = mu0;
    for bk in &b[1..] {
        norm *= bk;
    }
    // quadratic convergence: once the step is below half precision, two more steps suffice
    let half = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for s in seeds {
        let mut x = Float::with_val(prec, s);
        let mut polish = None;
        for _ in 0..60 {
            let (p, d, _) = eval_monic(&x, &a, &b, prec);
            let dx = Float::with_val(prec, &p / &d);
            x -= &dx;
            if let Some(k) = polish.as_mut() {
                *k -= 1;
                if *k == 0 {
                    break;
                }
            } else if Float::with_val(prec, dx.abs_ref()) <= Float::with_val(prec, &half * Float::with_val(prec, x.abs_ref())) {
                polish = Some(2);
            }
        }
        if polish != Some(0) {
            return Err(Error::Precision(format!("Gauss–Jacobi node refinement failed (n = {n}, α = {alpha})")));
        }
        let (_, d, pm1) = eval_monic(&x, &a, &b, prec);
        let w = Float::with_val(prec, &norm / Float::with_val(prec, &d * &pm1));
        nodes.push(x);
        weights.push(w);
    }
    Ok(GaussJacobi { nodes, weights })
}

type RuleKey = (usize, u64, u32);

fn cached_rule(n: usize, alpha: f64, prec: u32) -> Result<Arc<GaussJacobi>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussJacobi>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, alpha.to_bits(), prec);
    if let Some(r) = cache.lock().expect("rule cache").get(&key) {
        return Ok(r.clone());
    }
    let r = Arc::new(gauss_jacobi01(n, alpha, prec)?);
    cache.lock().expect("rule cache").insert(key, r.clone());
    Ok(r)
}

/// Nodes and combined weights on one arc: `∫_{Δ_i} f(s)ρ_i(s) ds ≈ Σ_j wg_j f(s_j)`.
#[derive(Debug)]
pub struct ArcRule {
    pub s: Vec<Complex>,
    pub wg: Vec<Complex>,
    /// `|wg_j|`, for error scales.
    pub absw: Vec<Float>,
}

/// `log(−a_i)` with the same branch as the double-precision evaluators.
fn ln_neg_endpoint(spec: &WeightSpec, i: usize, prec: u32) -> Complex {
    let g = &spec.geometry;
    let pi = Float::with_val(prec, Constant::Pi);
    let len = Float::with_val(prec, g.arc_length(i)).ln();
    let arg = match i {
        1 => -pi,
        2 => -pi / 2u32,
        3 => Float::with_val(prec, 0),
        _ => pi / 2u32,
    };
    Complex::with_val(prec, (len, arg))
}

fn horner_mp(c: &[Complex], z: &Complex, prec: u32) -> Complex {
    let mut acc = Complex::with_val(prec, 0);
    for x in c.iter().rev() {
        acc *= z;
        acc += x;
    }
    acc
}

/// Regular factor `G_i(t) = ρ_i(s)/t^{α_i}` at `s = a_i(1−t)`.
fn regular_factor(spec: &WeightSpec, i: usize, t: &Float, prec: u32) -> Complex {
    let g = &spec.geometry;
    let ai = from_c64(prec, g.endpoint(i));
    let s = Complex::with_val(prec, &ai * Float::with_val(prec, 1 - t.clone()));
    let (konst, num, den, power) = spec.analytic_parts(i);
    let mut v = from_c64(prec, konst);
    for p in &num {
        let c: Vec<Complex> = p.iter().map(|x| from_c64(prec, *x)).collect();
        v *= horner_mp(&c, &s, prec);
    }
    for p in &den {
        let c: Vec<Complex> = p.iter().map(|x| from_c64(prec, *x)).collect();
        v /= horner_mp(&c, &s, prec);
    }
    let lna = ln_neg_endpoint(spec, i, prec);
    let mut expo = Complex::with_val(prec, 0);
    if power != 0.0 {
        let q = power / 4.0;
        // power_base(s) = a_i Π_{j≠i}(s − a_j) is positive on the arc
        let mut base = ai.clone();
        for j in 1..=4 {
            if j != i {
                base *= Complex::with_val(prec, &s - from_c64(prec, g.endpoint(j)));
            }
        }
        let lb = Complex::with_val(prec, base.ln_ref());
        expo += Complex::with_val(prec, &lb * -q) + Complex::with_val(prec, &lna * q);
    }
    let al = spec.alpha(i);
    if al != 0.0 {
        expo += Complex::with_val(prec, &lna * al);
    }
    v * expo.exp()
}

fn build_arc_rule(spec: &WeightSpec, i: usize, n: usize, prec: u32) -> Result<ArcRule> {
    let g = &spec.geometry;
    let rule = cached_rule(n, spec.alpha(i), prec)?;
    let ai = from_c64(prec, g.endpoint(i));
    let neg_ai = Complex::with_val(prec, -&ai);
    let mut s = Vec::with_capacity(n);
    let mut wg = Vec::with_capacity(n);
    let mut absw = Vec::with_capacity(n);
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let sj = Complex::with_val(prec, &ai * Float::with_val(prec, 1 - t.clone()));
        // ds = −a_i dt along the arc from a_i to 0
        let gj = regular_factor(spec, i, t, prec) * &neg_ai * w;
        absw.push(abs(prec, &gj));
        s.push(sj);
        wg.push(gj);
    }
    Ok(ArcRule { s, wg, absw })
}

/// Quadrature rules for the weight at doubling node counts, built on demand.
pub struct WeightRules {
    pub spec: WeightSpec,
    pub prec: u32,
    base: usize,
    levels: Mutex<Vec<Arc<[ArcRule; 4]>>>,
}

impl WeightRules {
    pub fn new(spec: &WeightSpec, prec: u32) -> Self {
        Self { spec: spec.clone(), prec, base: 32, levels: Mutex::new(Vec::new()) }
    }

    pub fn nodes_at(&self, level: usize) -> usize {
        self.base << level
    }

    pub fn level(&self, level: usize) -> Result<Arc<[ArcRule; 4]>> {
        let mut lv = self.levels.lock().expect("rule levels");
        while lv.len() <= level {
            let n = self.nodes_at(lv.len());
            let mut arcs = Vec::with_capacity(4);
            for i in 1..=4 {
                arcs.push(build_arc_rule(&self.spec, i, n, self.prec)?);
            }
            let arcs: [ArcRule; 4] = arcs.try_into().map_err(|_| Error::Config("arc rules".into()))?;
            lv.push(Arc::new(arcs));
        }
        Ok(lv[level].clone())
    }

    fn max_level(&self) -> usize {
        (MAX_NODES / self.base).trailing_zeros() as usize
    }

    /// `∫_Δ f(s)ρ(s)ds` with node doubling until successive values agree to
    /// `rel_tol` times the absolute-value integral. Returns the value and the
    /// last change.
    pub fn integrate(
        &self,
        start_nodes: usize,
        rel_tol: &Float,
        f: &dyn Fn(&Complex) -> Complex,
    ) -> Result<(Complex, Float)> {
        let prec = self.prec;
        let mut level = 0;
        while self.nodes_at(level) < start_nodes && level < self.max_level() {
            level += 1;
        }
        let mut prev: Option<Complex> = None;
        loop {
            let rules = self.level(level)?;
            let mut sum = Complex::with_val(prec, 0);
            let mut scale = Float::with_val(prec, 0);
            for arc in rules.iter() {
                for j in 0..arc.s.len() {
                    let v = f(&arc.s[j]);
                    scale += Float::with_val(prec, v.abs_ref()) * &arc.absw[j];
                    sum += v * &arc.wg[j];
                }
            }
            if let Some(p) = prev {
                let diff = abs(prec, &Complex::with_val(prec, &sum - &p));
                if diff <= Float::with_val(prec, &scale * rel_tol) {
                    return Ok((sum, diff));
                }
            }
            if level >= self.max_level() {
                return Err(Error::Precision(format!(
                    "weight quadrature did not converge with {} nodes per arc",
                    self.nodes_at(level)
                )));
            }
            prev = Some(sum);
            level += 1;
        }
    }
}

/// Moments `μ_k = ∫_Δ s^k ρ(s) ds`.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub mu: Vec<Complex>,
    pub prec: u32,
    /// Change of each moment under the last node doubling.
    pub quad_error: Vec<f64>,
    /// Per-arc node count at convergence.
    pub nodes: [usize; 4],
    /// `max(a, b)`, used to scale `s` in the solver.
    pub radius: f64,
}

pub fn quadrature_moments(spec: &WeightSpec, kmax: usize, prec: u32) -> Result<MomentTable> {
    let rules = WeightRules::new(spec, prec);
    moments_from_rules(&rules, kmax)
}

pub fn moments_from_rules(rules: &WeightRules, kmax: usize) -> Result<MomentTable> {
    let prec = rules.prec;
    let spec = &rules.spec;
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 24));
    let mut mu = vec![Complex::with_val(prec, 0); kmax + 1];
    let mut err = vec![0.0; kmax + 1];
    let mut nodes = [0; 4];
    let mut level = 0;
    while rules.nodes_at(level) < kmax / 2 + 32 {
        level += 1;
    }
    for i in 0..4 {
        let mut lv = level;
        let mut prev: Option<Vec<Complex>> = None;
        loop {
            let rule = rules.level(lv)?;
            let arc = &rule[i];
            let mut m = vec![Complex::with_val(prec, 0); kmax + 1];
            let mut sc = vec![Float::with_val(prec, 0); kmax + 1];
            for j in 0..arc.s.len() {
                let mut p = arc.wg[j].clone();
                let mut ap = arc.absw[j].clone();
                let sabs = abs(prec, &arc.s[j]);
                for k in 0..=kmax {
                    m[k] += &p;
                    sc[k] += &ap;
                    p *= &arc.s[j];
                    ap *= &sabs;
                }
            }
            if let Some(pv) = &prev {
                let mut ok = true;
                let mut diffs = vec![0.0; kmax + 1];
                for k in 0..=kmax {
                    let d = abs(prec, &Complex::with_val(prec, &m[k] - &pv[k]));
                    diffs[k] = d.to_f64();
                    if d > Float::with_val(prec, &sc[k] * &tol) {
                        ok = false;
                    }
                }
                if ok {
                    for k in 0..=kmax {
                        mu[k] += &m[k];
                        err[k] += diffs[k];
                    }
                    nodes[i] = rules.nodes_at(lv);
                    break;
                }
            }
            if lv >= rules.max_level() {
                return Err(Error::Precision(format!(
                    "moments on arc {} did not converge with {} nodes (α = {})",
                    i + 1,
                    rules.nodes_at(lv),
                    spec.alpha(i + 1)
                )));
            }
            prev = Some(m);
            lv += 1;
        }
    }
    let g = &spec.geometry;
    Ok(MomentTable { mu, prec, quad_error: err, nodes, radius: g.a.max(g.b) })
}

impl MomentTable {
    /// The same moments rounded to fewer bits.
    pub fn rounded(&self, prec: u32) -> MomentTable {
        MomentTable {
            mu: self.mu.iter().map(|m| Complex::with_val(prec, m)).collect(),
            prec,
            quad_error: self.quad_error.clone(),
            nodes: self.nodes,
            radius: self.radius,
        }
    }
}

/// Monic minimal-degree solution of the orthogonality conditions.
#[derive(Debug, Clone)]
pub struct DirectSolution {
    pub n: usize,
    /// Ascending coefficients; the last one is exactly 1.
    pub coeffs: Vec<Complex>,
    pub effective_degree: usize,
    /// Smallest residual ratio among the accepted (independent) columns.
    pub rank_gap: f64,
    /// Residual ratio of the column that closed the system.
    pub dependent_ratio: f64,
    /// Largest relative orthogonality residual.
    pub residual: f64,
    pub prec: u32,
}

/// Solves without the cross-check; `thresh` is the rank threshold.
fn solve_once(m: &MomentTable, n: usize, thresh: f64) -> Result<DirectSolution> {
    let prec = m.prec;
    if m.mu.len() < 2 * n {
        return Err(Error::Config(format!("need moments through index {}, have {}", 2 * n - 1, m.mu.len() - 1)));
    }
    if n == 0 {
        return Ok(DirectSolution {
            n,
            coeffs: vec![Complex::with_val(prec, 1)],
            effective_degree: 0,
            rank_gap: 1.0,
            dependent_ratio: 0.0,
            residual: 0.0,
            prec,
        });
    }
    // scaled moments ν_k = μ_k / R^k
    let r = Float::with_val(prec, m.radius);
    let mut scaled = Vec::with_capacity(2 * n);
    let mut rk = Float::with_val(prec, 1);
    for k in 0..2 * n {
        scaled.push(Complex::with_val(prec, &m.mu[k] / &rk));
        rk *= &r;
    }
    let thresh = Float::with_val(prec, thresh);
    // dependence is judged against the largest column, so all-noise columns count as zero
    let mut scale = Float::with_val(prec, 0);
    for j in 0..=n {
        let col: Vec<Complex> = (0..n).map(|k| scaled[k + j].clone()).collect();
        let c = vec_norm(&col, prec);
        if c > scale {
            scale = c;
        }
    }
    if scale.is_zero() {
        return Err(Error::DegenerateWeight("all moments vanish".into()));
    }
    let mut qs: Vec<Vec<Complex>> = Vec::new();
    let mut rmat: Vec<Vec<Complex>> = Vec::new();
    let mut rank_gap = f64::INFINITY;
    for j in 0..=n {
        let col: Vec<Complex> = (0..n).map(|k| scaled[k + j].clone()).collect();
        let mut v = col;
        let mut rcol = vec![Complex::with_val(prec, 0); qs.len()];
        for _pass in 0..2 {
            for (i, q) in qs.iter().enumerate() {
                let h = inner(q, &v, prec);
                for k in 0..n {
                    let t = Complex::with_val(prec, &h * &q[k]);
                    v[k] -= t;
                }
                rcol[i] += h;
            }
        }
        let vnorm = vec_norm(&v, prec);
        let ratio = Float::with_val(prec, &vnorm / &scale);
        if j == n || ratio <= thresh {
            // column j depends on the previous ones: degree j
            let d = j;
            let mut c = vec![Complex::with_val(prec, 0); d + 1];
            c[d] = Complex::with_val(prec, 1);
            for i in (0..d).rev() {
                let mut acc = Complex::with_val(prec, -&rcol[i]);
                for (k, ck) in c.iter().enumerate().take(d).skip(i + 1) {
                    acc -= Complex::with_val(prec, &rmat[k][i] * ck);
                }
                c[i] = acc / &rmat[i][i];
            }
            // undo the scaling: c_i ↦ c_i R^{d−i}
            let mut rp = Float::with_val(prec, 1);
            for i in (0..d).rev() {
                rp *= &r;
                c[i] *= &rp;
            }
            let residual = orthogonality_residual(&m.mu, &c, n, m.radius, prec);
            return Ok(DirectSolution {
                n,
                coeffs: c,
                effective_degree: d,
                rank_gap: if rank_gap.is_finite() { rank_gap } else { 1.0 },
                dependent_ratio: ratio.to_f64(),
                residual,
                prec,
            });
        }
        rank_gap = rank_gap.min(ratio.to_f64());
        let q: Vec<Complex> = v.iter().map(|x| Complex::with_val(prec, x / &vnorm)).collect();
        rcol.push(Complex::with_val(prec, (vnorm, 0)));
        qs.push(q);
        rmat.push(rcol);
    }
    Err(Error::InvalidWeight("no degree satisfies the orthogonality conditions".into()))
}

fn inner(q: &[Complex], v: &[Complex], prec: u32) -> Complex {
    let mut s = Complex::with_val(prec, 0);
    for (a, b) in q.iter().zip(v) {
        s += Complex::with_val(prec, a.conj_ref()) * b;
    }
    s
}

fn vec_norm(v: &[Complex], prec: u32) -> Float {
    let mut s = Float::with_val(prec, 0);
    for x in v {
        let a = abs(prec, x);
        s += Float::with_val(prec, &a * &a);
    }
    s.sqrt()
}

/// `max_k |Σ_j c_j μ_{k+j}| / Σ_j |c_j μ_{k+j}|` over `k < n`.
fn orthogonality_residual(mu: &[Complex], c: &[Complex], n: usize, radius: f64, prec: u32) -> f64 {
    // rows scaled by R^{d+k}, normalized by sum_j |c_j| R^{j-d} times the largest scaled moment
    let d = c.len() - 1;
    let r = Float::with_val(prec, radius);
    let pow = |e: i64| -> Float {
        let p = Float::with_val(prec, rug::ops::Pow::pow(&r, e.unsigned_abs() as u32));
        if e < 0 { Float::with_val(prec, 1) / p } else { p }
    };
    let mut mmax = Float::with_val(prec, 0);
    for (i, m) in mu.iter().enumerate().take(n + d) {
        let v = abs(prec, m) / pow(i as i64);
        if v > mmax {
            mmax = v;
        }
    }
    let mut cs = Float::with_val(prec, 0);
    for (j, cj) in c.iter().enumerate() {
        cs += abs(prec, cj) * pow(j as i64 - d as i64);
    }
    let scale = cs * mmax;
    let mut worst = Float::with_val(prec, 0);
    for k in 0..n {
        let mut s = Complex::with_val(prec, 0);
        for (j, cj) in c.iter().enumerate() {
            s += Complex::with_val(prec, cj * &mu[k + j]);
        }
        let v = abs(prec, &s) / pow((d + k) as i64);
        if v > worst {
            worst = v;
        }
    }
    if scale.is_zero() {
        0.0
    } else {
        (worst / scale).to_f64()
    }
}

/// Default rank threshold `10^{−digits/2}`.
pub fn rank_threshold(prec: u32) -> f64 {
    10f64.powf(-digits(prec) / 2.0)
}

/// `Q_n` with the cross-check against a solve on moments rounded to fewer bits.
pub fn solve_qn(m: &MomentTable, n: usize, tol: Option<f64>) -> Result<DirectSolution> {
    let thresh = tol.unwrap_or_else(|| rank_threshold(m.prec));
    let sol = solve_once(m, n, thresh)?;
    let low_prec = m.prec.saturating_sub(CHECK_DROP).max(24);
    let low = solve_once(&m.rounded(low_prec), n, thresh.max(rank_threshold(low_prec)))?;
    if low.effective_degree != sol.effective_degree {
        return Err(Error::Precision(format!(
            "Q_{n}: effective degree {} at {} bits but {} at {} bits",
            sol.effective_degree, m.prec, low.effective_degree, low_prec
        )));
    }
    let agree = 10f64.powf(-digits(low_prec) / 4.0);
    let diff = coefficient_distance(&sol, &low, m.radius);
    if !(diff <= agree) {
        return Err(Error::Precision(format!(
            "Q_{n}: coefficients at {} and {} bits differ by {diff:.2e} (> {agree:.1e})",
            m.prec, low_prec
        )));
    }
    let resid_tol = 10f64.powf(-digits(m.prec) / 4.0);
    if !(sol.residual <= resid_tol) {
        return Err(Error::Precision(format!("Q_{n}: orthogonality residual {:.2e}", sol.residual)));
    }
    Ok(sol)
}

/// Relative distance of the `R`-scaled coefficient vectors.
pub fn coefficient_distance(x: &DirectSolution, y: &DirectSolution, radius: f64) -> f64 {
    let d = x.effective_degree;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..=d {
        let s = radius.powi((d - i) as i32);
        let a = to_c64(&x.coeffs[i]) / s;
        let b = to_c64(&y.coeffs[i]) / s;
        num = num.max((a - b).norm());
        den = den.max(a.norm());
    }
    num / den.max(1e-300)
}

impl DirectSolution {
    pub fn coeffs_c64(&self) -> Vec<C64> {
        self.coeffs.iter().map(to_c64).collect()
    }

    pub fn eval_mp(&self, z: &Complex) -> Complex {
        horner_mp(&self.coeffs, z, self.prec)
    }

    pub fn eval(&self, z: C64) -> C64 {
        to_c64(&self.eval_mp(&from_c64(self.prec, z)))
    }

    /// Zeros from companion-matrix seeds polished by Aberth iterations.
    pub fn zeros(&self) -> Result<Vec<C64>> {
        let d = self.effective_degree;
        if d == 0 {
            return Ok(vec![]);
        }
        let prec = self.prec;
        let seeds = poly_roots(&self.coeffs_c64());
        let mut z: Vec<Complex> = seeds.iter().map(|s| from_c64(prec, *s)).collect();
        let dc: Vec<Complex> =
            (1..=d).map(|k| Complex::with_val(prec, &self.coeffs[k] * k as u32)).collect();
        let scale = seeds.iter().map(|s| s.norm()).fold(1e-300, f64::max);
        let stop = scale * 2f64.powi(-(prec.min(1000) as i32) / 2);
        for _ in 0..200 {
            let mut worst = 0.0f64;
            for k in 0..d {
                let p = horner_mp(&self.coeffs, &z[k], prec);
                let dp = horner_mp(&dc, &z[k], prec);
                if p.is_zero() {
                    continue;
                }
                let ratio = Complex::with_val(prec, &p / &dp);
                let mut s = Complex::with_val(prec, 0);
                for j in 0..d {
                    if j != k {
                        s += Complex::with_val(prec, 1) / Complex::with_val(prec, &z[k] - &z[j]);
                    }
                }
                let den = Complex::with_val(prec, 1) - Complex::with_val(prec, &ratio * &s);
                let step = ratio / den;
                worst = worst.max(to_c64(&step).norm());
                z[k] -= step;
            }
            if worst <= stop {
                return Ok(z.iter().map(to_c64).collect());
            }
        }
        Err(Error::Precision(format!("Aberth iteration for the zeros of Q_{} did not settle", self.n)))
    }

    /// Padé numerator `P_n(z) = −(1/2πi) ∫ (Q_n(s) − Q_n(z))/(s − z) ρ(s) ds`.
    pub fn pade_numerator(&self, m: &MomentTable) -> Vec<Complex> {
        let prec = self.prec;
        let d = self.effective_degree;
        let two_pi_i = Complex::with_val(prec, (0, Float::with_val(prec, Constant::Pi) * 2u32));
        let mut p = Vec::with_capacity(d.max(1));
        for k in 0..d.max(1) {
            let mut acc = Complex::with_val(prec, 0);
            for j in (k + 1)..=d {
                acc += Complex::with_val(prec, &self.coeffs[j] * &m.mu[j - 1 - k]);
            }
            p.push(-acc / &two_pi_i);
        }
        p
    }

    pub fn to_record(&self) -> SolutionRecord {
        SolutionRecord {
            n: self.n,
            effective_degree: self.effective_degree,
            prec: self.prec,
            rank_gap: self.rank_gap,
            dependent_ratio: self.dependent_ratio,
            residual: self.residual,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| CoeffRecord {
                    re: c.real().to_string_radix(16, None),
                    im: c.imag().to_string_radix(16, None),
                    approx: [c.real().to_f64(), c.imag().to_f64()],
                })
                .collect(),
        }
    }

    pub fn from_record(r: &SolutionRecord) -> Result<Self> {
        let prec = r.prec;
        let parse = |s: &str| -> Result<Float> {
            let v = Float::parse_radix(s, 16).map_err(|e| Error::Config(format!("bad coefficient {s}: {e}")))?;
            Ok(Float::with_val(prec, v))
        };
        let mut coeffs = Vec::with_capacity(r.coeffs.len());
        for c in &r.coeffs {
            coeffs.push(Complex::with_val(prec, (parse(&c.re)?, parse(&c.im)?)));
        }
        if coeffs.len() != r.effective_degree + 1 {
            return Err(Error::Config("coefficient count does not match the degree".into()));
        }
        Ok(Self {
            n: r.n,
            coeffs,
            effective_degree: r.effective_degree,
            rank_gap: r.rank_gap,
            dependent_ratio: r.dependent_ratio,
            residual: r.residual,
            prec,
        })
    }
}

/// Serialized form of a solution; coefficients are exact hexadecimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub n: usize,
    pub effective_degree: usize,
    pub prec: u32,
    pub rank_gap: f64,
    pub dependent_ratio: f64,
    pub residual: f64,
    pub coeffs: Vec<CoeffRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffRecord {
    pub re: String,
    pub im: String,
    pub approx: [f64; 2],
}

/// Direct data for one weight: quadrature rules and moments.
pub struct DirectContext {
    pub rules: WeightRules,
    pub moments: MomentTable,
}

impl DirectContext {
    pub fn new(spec: &WeightSpec, nmax: usize, prec: u32) -> Result<Self> {
        let rules = WeightRules::new(spec, prec);
        let moments = moments_from_rules(&rules, 2 * nmax + 1)?;
        Ok(Self { rules, moments })
    }

    pub fn prec(&self) -> u32 {
        self.rules.prec
    }

    pub fn solve(&self, n: usize) -> Result<DirectSolution> {
        solve_qn(&self.moments, n, None)
    }

    fn check_off_cross(&self, z: C64) -> Result<()> {
        let g = &self.rules.spec.geometry;
        if g.distance_to_cross(z) < 1e-6 * g.a.max(g.b) {
            return Err(Error::Proximity(format!("{z} is too close to the cross")));
        }
        Ok(())
    }

    fn cauchy(&self, z: C64, q: Option<&DirectSolution>, rel_bits: i32) -> Result<Complex> {
        self.check_off_cross(z)?;
        let prec = self.prec();
        let zz = from_c64(prec, z);
        let tol = Float::with_val(prec, Float::i_exp(1, rel_bits));
        let start = q.map_or(32, |s| s.effective_degree / 2 + 32);
        let (v, _) = self.rules.integrate(start, &tol, &|s: &Complex| {
            let den = Complex::with_val(prec, s - &zz);
            match q {
                Some(sol) => sol.eval_mp(s) / den,
                None => Complex::with_val(prec, 1) / den,
            }
        })?;
        let two_pi_i = Complex::with_val(prec, (0, Float::with_val(prec, Constant::Pi) * 2u32));
        Ok(v / two_pi_i)
    }

    /// `R_n(z) = (1/2πi) ∫ Q_n(s)ρ(s)/(s − z) ds` in full precision.
    pub fn remainder_mp(&self, sol: &DirectSolution, z: C64) -> Result<Complex> {
        self.cauchy(z, Some(sol), -(self.prec() as i32) + 32)
    }

    /// `R_n(z)` to about twenty significant digits of the integrand scale.
    pub fn remainder(&self, sol: &DirectSolution, z: C64) -> Result<C64> {
        let bits = -(self.prec().min(96) as i32) + 16;
        Ok(to_c64(&self.cauchy(z, Some(sol), bits)?))
    }

    pub fn rho_hat_mp(&self, z: C64) -> Result<Complex> {
        self.cauchy(z, None, -(self.prec() as i32) + 32)
    }

    pub fn rho_hat(&self, z: C64) -> Result<C64> {
        let bits = -(self.prec().min(96) as i32) + 16;
        Ok(to_c64(&self.cauchy(z, None, bits)?))
    }

    /// `ρ̂(z) − P_n(z)/Q_n(z)` in full precision, as `R_n/Q_n`.
    pub fn pade_error(&self, sol: &DirectSolution, z: C64) -> Result<Complex> {
        let r = self.remainder_mp(sol, z)?;
        Ok(r / sol.eval_mp(&from_c64(self.prec(), z)))
    }

    /// `ρ̂(z) − P_n(z)/Q_n(z)` by subtraction, independent of `R_n`.
    pub fn pade_difference(&self, sol: &DirectSolution, z: C64) -> Result<Complex> {
        let prec = self.prec();
        let zz = from_c64(prec, z);
        let p = horner_mp(&sol.pade_numerator(&self.moments), &zz, prec);
        Ok(self.rho_hat_mp(z)? - p / sol.eval_mp(&zz))
    }

    /// `[n/n](z) = P_n(z)/Q_n(z)`.
    pub fn pade_value(&self, sol: &DirectSolution, z: C64) -> C64 {
        let prec = self.prec();
        let zz = from_c64(prec, z);
        let p = horner_mp(&sol.pade_numerator(&self.moments), &zz, prec);
        to_c64(&(p / sol.eval_mp(&zz)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Builtin, CrossGeometry};
    use crate::quad::tanh_sinh01;

    fn ctx(b: Builtin, a: f64, bb: f64, nmax: usize, prec: u32) -> DirectContext {
        let g = CrossGeometry::new(a, bb).unwrap();
        DirectContext::new(&WeightSpec::builtin(g, b).unwrap(), nmax, prec).unwrap()
    }

    #[test]
    fn gauss_jacobi_integrates_monomials() {
        let prec = 200;
        let r = gauss_jacobi01(20, -0.25, prec).unwrap();
        for k in [0u32, 5, 17, 39] {
            let mut s = Float::with_val(prec, 0);
            for (x, w) in r.nodes.iter().zip(&r.weights) {
                s += Float::with_val(prec, rug::ops::Pow::pow(x, k)) * w;
            }
            // ∫ t^{k−1/4} dt = 1/(k + 3/4)
            let exact = Float::with_val(prec, 1) / Float::with_val(prec, k as f64 + 0.75);
            let err = Float::with_val(prec, &s - &exact).abs().to_f64();
            assert!(err < 1e-55, "k={k}: {err:e}");
        }
    }

    #[test]
    fn moments_match_double_precision_quadrature() {
        let g = CrossGeometry::new(1.0, 1.7).unwrap();
        for b in [Builtin::Chebyshev, Builtin::Legendre, Builtin::JacobiQuarter] {
            let spec = WeightSpec::builtin(g, b).unwrap();
            let m = quadrature_moments(&spec, 6, 128).unwrap();
            for k in [0usize, 3, 6] {
                let mut v = C64::new(0.0, 0.0);
                for i in 1..=4 {
                    let ai = g.endpoint(i);
                    // substitute t = u^{1/(1+α)} to remove the endpoint singularity
                    let e = 1.0 / (1.0 + spec.alpha(i));
                    v += tanh_sinh01(
                        |u, _| {
                            let t = u.powf(e);
                            let s = g.arc_point(i, t);
                            spec.rho_on_arc(i, t) / t.powf(spec.alpha(i)) * s.powi(k as i32) * (-ai) * e
                        },
                        1e-13,
                    )
                    .unwrap();
                }
                let got = to_c64(&m.mu[k]);
                assert!((got - v).norm() < 1e-11 * v.norm().max(1.0), "{b:?} k={k}: {got} vs {v}");
            }
        }
    }

    #[test]
    fn chebyshev_even_moments_vanish() {
        let c = ctx(Builtin::Chebyshev, 1.0, 1.0, 10, 256);
        for k in (0..=20).step_by(2) {
            assert!(to_c64(&c.moments.mu[k]).norm() < 1e-60, "k={k}");
        }
        let l = ctx(Builtin::Legendre, 1.0, 1.0, 1, 256);
        assert!(to_c64(&l.moments.mu[0]).norm() < 1e-20);
    }

    #[test]
    fn low_degree_examples() {
        let c = ctx(Builtin::Chebyshev, 1.0, 1.0, 5, 256);
        let q4 = c.solve(4).unwrap();
        let want = [-0.5, 0.0, 0.0, 0.0, 1.0];
        for (x, y) in q4.coeffs_c64().iter().zip(want) {
            assert!((x - y).norm() < 1e-30);
        }
        let q5 = c.solve(5).unwrap();
        assert_eq!(q5.effective_degree, 4);
        assert!(coefficient_distance(&q4, &q5, 1.0) < 1e-30);
        let j = ctx(Builtin::JacobiQuarter, 1.0, 1.0, 4, 256);
        let q = j.solve(4).unwrap();
        assert!((to_c64(&q.coeffs[0]) + 0.25).norm() < 1e-30);
    }

    #[test]
    fn remainder_and_cauchy_transforms() {
        let c = ctx(Builtin::Chebyshev, 1.0, 1.0, 4, 256);
        // ρ̂ = 1/(2w) for this weight
        let z = C64::new(2.0, 0.0);
        let want = 1.0 / (2.0 * 15f64.sqrt());
        assert!((c.rho_hat(z).unwrap() - want).norm() < 1e-14);
        let q = c.solve(4).unwrap();
        let r10 = c.remainder(&q, C64::new(10.0, 0.0)).unwrap();
        assert!(r10.norm() * 1e5 > 1e-6 && r10.norm() * 1e5 < 1e3);
        // R_n = Q_n ρ̂ − P_n
        let z = C64::new(0.7, 0.9);
        let lhs = c.remainder(&q, z).unwrap();
        let p = horner_mp(&q.pade_numerator(&c.moments), &from_c64(256, z), 256);
        let rhs = q.eval(z) * c.rho_hat(z).unwrap() - to_c64(&p);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn record_round_trip() {
        let c = ctx(Builtin::Legendre, 1.0, 1.3, 6, 192);
        let q = c.solve(6).unwrap();
        let json = serde_json::to_string(&q.to_record()).unwrap();
        let back = DirectSolution::from_record(&serde_json::from_str(&json).unwrap()).unwrap();
        for (x, y) in q.coeffs.iter().zip(&back.coeffs) {
            assert_eq!(x, y);
        }
    }
}
