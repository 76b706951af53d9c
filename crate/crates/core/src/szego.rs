//! The constant `c_ρ` and the Szegő function `S_ρ`.
//!
//! On sheet 0,
//! `log S_ρ(z) = −Σ_i (w(z)/2πi) ∫_{Δ_i} log(ρ_i w_+)(s)/(s−z) ds/w_+(s) + 2πi (wH)(z) c_ρ`
//! with `H(z) = (1/2πi) ∫_{π(𝛂)} dt/((t−z)w(t))`; sheet 1 carries the reciprocal.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geometry::WeightSpec;
use crate::quad::tanh_sinh01_abs;
use crate::surface::{ellipse_chord, ellipse_integral, sheet_sign, w_raw, Side, SurfacePoint, ThetaContext};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const TOL: f64 = 1e-12;
const ABS_TOL: f64 = 1e-14;

fn tanh_sinh01<F: Fn(f64, f64) -> C64>(f: F, tol: f64) -> Result<C64> {
    tanh_sinh01_abs(f, tol, ABS_TOL)
}

/// Weight data, periods and `c_ρ`, ready to evaluate `S_ρ`.
#[derive(Debug, Clone)]
pub struct SzegoData {
    pub spec: WeightSpec,
    pub ctx: ThetaContext,
    /// Canonical representative produced by the branch conventions.
    pub c_rho: C64,
    f0: [C64; 4],
    g0: [C64; 4],
    first_moment: [C64; 4],
}

/// `∫_0^1 F(t, 1−t, t−t_s) dt`, split at `t_s` when it is interior so that a
/// near-singular point sits at the endpoints of both pieces.
fn split_integral(f: &dyn Fn(f64, f64, f64) -> C64, ts: f64) -> Result<C64> {
    if ts > 0.0 && ts < 1.0 {
        // absolute tolerances refer to the rescaled pieces
        let left =
            tanh_sinh01_abs(|v, vc| f(ts * v, (1.0 - ts) + ts * vc, -ts * vc), TOL, ABS_TOL / ts)? * ts;
        let len = 1.0 - ts;
        let right =
            tanh_sinh01_abs(|v, vc| f(ts + len * v, len * vc, len * v), TOL, ABS_TOL / len)? * len;
        Ok(left + right)
    } else {
        tanh_sinh01(|t, tc| f(t, tc, t - ts), TOL)
    }
}

/// `log(ρ_i w_+)(s)/w_+(s)` at `s = a_i(1−t)`.
fn density(spec: &WeightSpec, i: usize, t: f64) -> C64 {
    spec.log_rho_w_on_arc(i, t) / spec.geometry.w_plus_on_arc(i, t)
}

/// `c_ρ = (1/2πi)(1/I_α) Σ_i ∫_{Δ_i} log(ρ_i w_+)/w_+ ds`, `I_α` the half `𝛂`-period.
pub fn compute_c_rho(spec: &WeightSpec, ctx: &ThetaContext) -> Result<C64> {
    let g = &spec.geometry;
    let mut total = C64::new(0.0, 0.0);
    for i in 1..=4 {
        let ai = g.endpoint(i);
        total += tanh_sinh01(|t, _| density(spec, i, t) * (-ai), TOL).map_err(|e| e.tag("szego"))?;
    }
    Ok(total / (2.0 * PI * I * ctx.half_alpha))
}

/// `H(z)`.
pub fn eval_h(ctx: &ThetaContext, z: C64) -> Result<C64> {
    let g = &ctx.geometry;
    // nearest path parameter, for proximity checks and splitting
    let point = |u: f64| g.alpha_path(PI / 2.0 * (1.0 - u));
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=512 {
        let u = k as f64 / 512.0;
        let d = (point(u) - z).norm();
        if d < best.0 {
            best = (d, u);
        }
    }
    let (mut lo, mut hi) = ((best.1 - 1.0 / 512.0).max(0.0), (best.1 + 1.0 / 512.0).min(1.0));
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if (point(m1) - z).norm() < (point(m2) - z).norm() {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let us = {
        let u = 0.5 * (lo + hi);
        if u < 1e-12 { 0.0 } else if u > 1.0 - 1e-12 { 1.0 } else { u }
    };
    let dist = (point(us) - z).norm();
    let scale = g.a.max(g.b);
    if dist < 1e-13 * scale {
        return Err(Error::Proximity(format!("{z} is on the 𝛂 path")));
    }
    let v = if dist < 0.2 * scale {
        // t − z = (t − t_s) + (t_s − z) with the chord computed from the angle offset
        let th_s = PI / 2.0 * (1.0 - us);
        let e0 = point(us) - z;
        let left = |_: C64, _: f64, dr: f64| 1.0 / (ellipse_chord(g, false, th_s, dr) + e0);
        let right = |_: C64, dl: f64, _: f64| 1.0 / (ellipse_chord(g, false, th_s, -dl) + e0);
        if us <= 1e-12 {
            ellipse_integral(g, false, 0.0, 1.0, right, TOL)?
        } else if us >= 1.0 - 1e-12 {
            ellipse_integral(g, false, 0.0, 1.0, left, TOL)?
        } else {
            ellipse_integral(g, false, 0.0, us, left, TOL)?
                + ellipse_integral(g, false, us, 1.0, right, TOL)?
        }
    } else {
        ellipse_integral(g, false, 0.0, 1.0, |t: C64, _: f64, _: f64| 1.0 / (t - z), TOL)?
    };
    Ok(v / (2.0 * PI * I))
}

impl SzegoData {
    pub fn new(spec: &WeightSpec, ctx: &ThetaContext) -> Result<Self> {
        let c_rho = compute_c_rho(spec, ctx)?;
        let g = spec.geometry;
        let mut f0 = [C64::new(0.0, 0.0); 4];
        let mut g0 = [C64::new(0.0, 0.0); 4];
        let mut first_moment = [C64::new(0.0, 0.0); 4];
        for i in 1..=4 {
            let ai = g.endpoint(i);
            let f_zero = density(spec, i, 1.0);
            f0[i - 1] = f_zero;
            // ∫ (f − f(0))/s ds with s = a_i(1−t), ds = −a_i dt
            g0[i - 1] = tanh_sinh01(|t, tc| (density(spec, i, t) - f_zero) / (ai * tc) * (-ai), TOL)
                .map_err(|e| e.tag("szego"))?;
            first_moment[i - 1] = tanh_sinh01(|t, tc| density(spec, i, t) * (ai * tc) * (-ai), TOL)
                .map_err(|e| e.tag("szego"))?;
        }
        Ok(Self { spec: spec.clone(), ctx: ctx.clone(), c_rho, f0, g0, first_moment })
    }

    /// `c_ρ` reduced modulo the lattice, with `c_ρ = reduced + l + mB`.
    pub fn c_class(&self) -> (C64, i64, i64) {
        self.ctx.reduce(self.c_rho)
    }

    /// `∫_{Δ_i} f_i(s)/(s−z) ds` for `z` off `Δ_i`.
    fn cauchy_arc(&self, i: usize, z: C64) -> Result<C64> {
        let g = &self.spec.geometry;
        let ai = g.endpoint(i);
        let f0 = self.f0[i - 1];
        let ts = 1.0 - (z / ai).re;
        let spec = &self.spec;
        // s − z = (s_s − z) − a_i (t − t_s), s_s the foot of z on the arc line
        let e0 = ai * (1.0 - ts) - z;
        let ea = ai - z;
        let f = move |t: f64, tc: f64, d: f64| {
            let diff = if ts > 0.0 && ts < 1.0 {
                e0 - ai * d
            } else if t < 0.5 {
                ea - ai * t
            } else {
                ai * tc - z
            };
            (density(spec, i, t) - f0) / diff * (-ai)
        };
        let reg = split_integral(&f, ts)?;
        Ok(reg + f0 * ((-z) / (ai - z)).ln())
    }

    /// Plemelj traces of `∫_{Δ_i} f_i(s)/(s−s_0) ds` at `s_0 = a_i(1−t_0)`.
    fn cauchy_arc_trace(&self, i: usize, t0: f64, side: Side) -> Result<C64> {
        let g = &self.spec.geometry;
        let ai = g.endpoint(i);
        let spec = &self.spec;
        let fs = density(spec, i, t0);
        // s − s0 = a_i (t0 − t)
        let f = move |t: f64, _tc: f64, d: f64| (density(spec, i, t) - fs) / (-ai * d) * (-ai);
        let pv = split_integral(&f, t0)? + fs * ((1.0 - t0) / t0).ln();
        Ok(pv + I * PI * fs * side.sign())
    }

    fn log_s_sheet0(&self, z: C64) -> Result<C64> {
        let w = w_raw(&self.spec.geometry, z);
        let mut sum = C64::new(0.0, 0.0);
        for i in 1..=4 {
            sum += self.cauchy_arc(i, z)?;
        }
        let h = eval_h(&self.ctx, z)?;
        Ok(-w / (2.0 * PI * I) * sum + 2.0 * PI * I * w * h * self.c_rho)
    }

    fn log_s_trace(&self, arc: usize, t: f64, side: Side) -> Result<C64> {
        let g = &self.spec.geometry;
        let s0 = g.arc_point(arc, t);
        let w = g.w_plus_on_arc(arc, t) * side.sign();
        let mut sum = C64::new(0.0, 0.0);
        for i in 1..=4 {
            sum += if i == arc { self.cauchy_arc_trace(i, t, side)? } else { self.cauchy_arc(i, s0)? };
        }
        let h = eval_h(&self.ctx, s0)?;
        Ok(-w / (2.0 * PI * I) * sum + 2.0 * PI * I * w * h * self.c_rho)
    }

    fn log_s_infinity0(&self) -> C64 {
        let f1: C64 = self.first_moment.iter().sum();
        f1 / (2.0 * PI * I) - self.c_rho * self.ctx.half_alpha_z
    }

    /// `log S_ρ(p)` on the branch given by the integral representation.
    pub fn log_s(&self, p: &SurfacePoint) -> Result<C64> {
        match *p {
            SurfacePoint::Regular { z, sheet } => {
                let g = &self.spec.geometry;
                if (z.im == 0.0 && z.re.abs() <= g.a) || (z.re == 0.0 && z.im.abs() <= g.b) {
                    return Err(Error::AmbiguousTrace(format!("{z} lies on the cross")));
                }
                Ok(self.log_s_sheet0(z)? * sheet_sign(sheet))
            }
            SurfacePoint::Infinity { sheet } => Ok(self.log_s_infinity0() * sheet_sign(sheet)),
            SurfacePoint::Trace { arc, t, side } => {
                if !(t > 0.0 && t < 1.0) {
                    return Err(Error::SingularPoint(format!("t = {t} is not interior to arc {arc}")));
                }
                self.log_s_trace(arc, t, side)
            }
            SurfacePoint::Origin { .. } => {
                Err(Error::SingularPoint("S_ρ at the origin needs a directional limit".into()))
            }
            SurfacePoint::Branch { i } => Err(Error::SingularPoint(format!("S_ρ is singular at a_{i}"))),
        }
    }

    /// `S_ρ(p)`.
    pub fn eval_s(&self, p: &SurfacePoint) -> Result<C64> {
        Ok(self.log_s(p)?.exp())
    }

    /// `lim |z|^{2ν} S_ρ²(z^(0))` as `z → 0` along `arg z = 5π/4`.
    pub fn origin_limit(&self) -> Result<C64> {
        if self.spec.nu.re == 0.0 {
            return Err(Error::Unsupported("Re ν = 0: the origin limit is not used".into()));
        }
        Ok((2.0 * self.origin_log_constant()?).exp())
    }

    /// Finite part `K` of `log S_ρ(z^(0)) = −ν log|z| + K + o(1)` along `arg z = 5π/4`.
    pub fn origin_log_constant(&self) -> Result<C64> {
        let g = &self.spec.geometry;
        let w0 = C64::new(0.0, g.a * g.b);
        let dir = C64::from_polar(1.0, PI / 4.0);
        let mut sum = C64::new(0.0, 0.0);
        for i in 1..=4 {
            sum += self.g0[i - 1] + self.f0[i - 1] * (dir / g.endpoint(i)).ln();
        }
        let h0 = eval_h(&self.ctx, C64::new(0.0, 0.0))?;
        Ok(-w0 / (2.0 * PI * I) * sum + 2.0 * PI * I * w0 * h0 * self.c_rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Analytic, Builtin, CrossGeometry};
    use crate::surface::{compute_periods, eval_phi, eval_w};

    fn setup(b: Builtin, a: f64, bb: f64) -> SzegoData {
        let g = CrossGeometry::new(a, bb).unwrap();
        let spec = WeightSpec::builtin(g, b).unwrap();
        let ctx = compute_periods(&g).unwrap();
        SzegoData::new(&spec, &ctx).unwrap()
    }

    #[test]
    fn chebyshev_is_trivial() {
        let s = setup(Builtin::Chebyshev, 1.0, 1.5);
        assert!(s.c_rho.norm() < 1e-12, "{}", s.c_rho);
        for z in [C64::new(0.4, 0.3), C64::new(-2.0, 1.0), C64::new(0.2, -1.9)] {
            assert!((s.eval_s(&SurfacePoint::sheet0(z)).unwrap() - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn legendre_closed_form() {
        let s = setup(Builtin::Legendre, 1.0, 1.0);
        let (red, _, _) = s.c_class();
        assert!(red.norm() < 1e-10, "{}", s.c_rho);
        let g = s.spec.geometry;
        for z in [C64::new(2.0, 0.5), C64::new(-0.3, 0.4), C64::new(0.5, -0.2)] {
            let phi_star = -eval_phi(&g, &SurfacePoint::sheet0(z)).unwrap();
            let w = eval_w(&g, z).unwrap();
            // √w with √w ~ z at infinity: z(1−a²/z²)^{1/4}(1+b²/z²)^{1/4}
            let sw = z * (1.0 - 1.0 / (z * z)).powf(0.25) * (1.0 + 1.0 / (z * z)).powf(0.25);
            assert!((sw * sw - w).norm() < 1e-12);
            let expected = C64::from_polar(1.0, -PI / 4.0) * phi_star / sw;
            let lattice = s.c_rho.im / s.ctx.b.im;
            let u = s.ctx.abel_map(&SurfacePoint::sheet0(z)).unwrap();
            let got = s.eval_s(&SurfacePoint::sheet0(z)).unwrap() * (-2.0 * PI * I * lattice.round() * u).exp();
            // continuation of −Φ agrees with Φ_* up to the lens sign
            let ok = (got - expected).norm() < 1e-8 || (got + expected).norm() < 1e-8;
            assert!(ok, "z={z} got={got} expected={expected}");
        }
    }

    #[test]
    fn jacobi_c_rho() {
        let s = setup(Builtin::JacobiQuarter, 1.0, 1.0);
        let target = -s.ctx.b / 2.0;
        let (res, _, _) = s.ctx.lattice_residual(s.c_rho - target);
        assert!(res < 1e-10, "c = {}", s.c_rho);
    }

    #[test]
    fn reciprocity_and_jumps() {
        let s = setup(Builtin::JacobiQuarter, 1.0, 1.6);
        let z = C64::new(0.7, 0.9);
        let a = s.eval_s(&SurfacePoint::sheet0(z)).unwrap();
        let b = s.eval_s(&SurfacePoint::sheet1(z)).unwrap();
        assert!((a * b - 1.0).norm() < 1e-10);
        for arc in 1..=4 {
            let t = 0.37;
            let sp = s.eval_s(&SurfacePoint::Trace { arc, t, side: Side::Plus }).unwrap();
            let sm = s.eval_s(&SurfacePoint::Trace { arc, t, side: Side::Minus }).unwrap();
            let rw = s.spec.rho_on_arc(arc, t) * s.spec.geometry.w_plus_on_arc(arc, t);
            assert!((sp * sm * rw - 1.0).norm() < 1e-8, "arc {arc}");
        }
        let zp = s.ctx.geometry.alpha_path(0.6);
        let inn = s.eval_s(&SurfacePoint::sheet0(zp * (1.0 - 1e-10))).unwrap();
        let out = s.eval_s(&SurfacePoint::sheet0(zp * (1.0 + 1e-10))).unwrap();
        assert!((inn / out - (2.0 * PI * I * s.c_rho).exp()).norm() < 1e-7);
    }

    #[test]
    fn trace_matches_one_sided_limit() {
        let s = setup(Builtin::Legendre, 1.2, 0.8);
        let g = s.spec.geometry;
        let t = 0.45;
        for arc in 1..=4 {
            let near = g.arc_point(arc, t) + g.plus_normal(arc) * 1e-7;
            let a = s.eval_s(&SurfacePoint::sheet0(near)).unwrap();
            let b = s.eval_s(&SurfacePoint::Trace { arc, t, side: Side::Plus }).unwrap();
            assert!((a - b).norm() < 1e-5 * b.norm(), "arc {arc}: {a} vs {b}");
        }
    }

    #[test]
    fn jacobi_origin_limit() {
        let s = setup(Builtin::JacobiQuarter, 1.0, 1.0);
        let g = s.spec.geometry;
        let phi0 = eval_phi(&g, &SurfacePoint::Origin { star: false }).unwrap();
        let expected = (PI * I * s.ctx.b / 2.0).exp() * 2f64.sqrt() * phi0;
        // the canonical c_ρ is −B/2 + l + mB; the closed form is S·exp(2πi m u)
        let (_, _, m) = s.ctx.lattice_residual(s.c_rho + s.ctx.b / 2.0);
        let u0 = -s.ctx.k_minus;
        let got = s.origin_limit().unwrap() * (4.0 * PI * I * m as f64 * u0).exp();
        assert!((got - expected).norm() < 1e-9, "{got} vs {expected}");
        // small-radius cross-check
        let r = 1e-6;
        let z = C64::from_polar(r, 1.25 * PI);
        let sv = s.eval_s(&SurfacePoint::sheet0(z)).unwrap();
        let approx = sv * sv * r.powf(2.0 * s.spec.nu.re);
        assert!((approx - s.origin_limit().unwrap()).norm() < 1e-3);
    }

    #[test]
    fn h_jump_and_decay() {
        let s = setup(Builtin::Chebyshev, 1.0, 2.0);
        let g = s.ctx.geometry;
        let zp = g.alpha_path(0.9);
        let hin = eval_h(&s.ctx, zp * (1.0 - 1e-11)).unwrap();
        let hout = eval_h(&s.ctx, zp * (1.0 + 1e-11)).unwrap();
        let w = w_raw(&g, zp);
        assert!(((hin - hout) * w - 1.0).norm() < 1e-7);
        let big = eval_h(&s.ctx, C64::new(1e4, 1e4)).unwrap();
        assert!(big.norm() < 1e-3);
        for r in [1e-2, 1e-4, 1e-6] {
            let z = g.endpoint(1) + C64::from_polar(r, 2.0);
            assert!((eval_h(&s.ctx, z).unwrap() * w_raw(&g, z)).norm() < 1.0);
        }
    }

    fn perturbed(g: CrossGeometry) -> WeightSpec {
        let e = C64::from_polar(1.0, 0.6);
        let c = [C64::new(-1.0, 0.0), e, C64::new(-1.0, 0.0), 2.0 - e];
        let common = Analytic::Poly { coeffs: vec![[1.0, 0.0], [0.3, 0.0], [0.0, 0.1]] };
        WeightSpec::from_constants(g, c, 0.0, Some(common)).unwrap()
    }

    fn slope(s: &SzegoData, center: C64, dir: C64) -> f64 {
        let rs = [1e-3, 1e-4, 1e-5, 1e-6];
        let pts: Vec<(f64, f64)> = rs
            .iter()
            .map(|&r| {
                let v = s.eval_s(&SurfacePoint::sheet0(center + dir * r)).unwrap_or_else(|e| panic!("{} {center} {r}: {e}", s.spec.label));
                (r.ln(), v.norm().ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    #[test]
    fn endpoint_and_origin_exponents() {
        let g = CrossGeometry::new(1.0, 1.5).unwrap();
        let ctx = compute_periods(&g).unwrap();
        let mut specs: Vec<WeightSpec> = [Builtin::Chebyshev, Builtin::Legendre, Builtin::JacobiQuarter]
            .iter()
            .map(|&b| WeightSpec::builtin(g, b).unwrap())
            .collect();
        specs.push(perturbed(g));
        for spec in &specs {
            let s = SzegoData::new(spec, &ctx).unwrap();
            for i in 1..=4 {
                let ai = g.endpoint(i);
                let dir = ai / ai.norm() * C64::from_polar(1.0, 0.7);
                let want = -(2.0 * spec.alpha(i) + 1.0) / 4.0;
                let got = slope(&s, ai, dir);
                assert!((got - want).abs() < 0.05, "{} a_{i}: {got} vs {want}", spec.label);
            }
            for j in 1..=4 {
                let dir = C64::from_polar(1.0, PI / 4.0 + (j - 1) as f64 * PI / 2.0);
                let want = if j % 2 == 0 { spec.nu.re } else { -spec.nu.re };
                let got = slope(&s, C64::new(0.0, 0.0), dir);
                assert!((got - want).abs() < 0.05, "{} Q{j}: {got} vs {want}", spec.label);
            }
        }
    }
}
