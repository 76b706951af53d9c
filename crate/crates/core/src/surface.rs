//! The genus-one surface of `w² = (z²−a²)(z²+b²)`: branch `w`, the conformal
//! factor `Φ`, periods, theta functions, the Abel map, `T_k` and `z_k`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::CrossGeometry;
use crate::quad::tanh_sinh01;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const QTOL: f64 = 1e-14;
/// Radius used for directional limits at the origin.
const ORIGIN_EPS: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flip(self) -> Self {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// A point of the surface.
///
/// `Trace` is the sheet-0 boundary value on the given side of `Δ_i`; the
/// sheet-1 trace on one side is the sheet-0 trace on the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SurfacePoint {
    Regular { z: C64, sheet: u8 },
    Infinity { sheet: u8 },
    /// `star = false` is `𝟎` (sheet-0 limit through Q1/Q3), `true` is `𝟎*`.
    Origin { star: bool },
    Trace { arc: usize, t: f64, side: Side },
    Branch { i: usize },
}

impl SurfacePoint {
    pub fn sheet0(z: C64) -> Self {
        Self::Regular { z, sheet: 0 }
    }

    pub fn sheet1(z: C64) -> Self {
        Self::Regular { z, sheet: 1 }
    }

    pub fn star(&self) -> Self {
        match *self {
            Self::Regular { z, sheet } => Self::Regular { z, sheet: 1 - sheet },
            Self::Infinity { sheet } => Self::Infinity { sheet: 1 - sheet },
            Self::Origin { star } => Self::Origin { star: !star },
            Self::Trace { arc, t, side } => Self::Trace { arc, t, side: side.flip() },
            Self::Branch { i } => Self::Branch { i },
        }
    }

    /// Projection to the plane, `None` over infinity.
    pub fn projection(&self, g: &CrossGeometry) -> Option<C64> {
        match *self {
            Self::Regular { z, .. } => Some(z),
            Self::Infinity { .. } => None,
            Self::Origin { .. } => Some(C64::new(0.0, 0.0)),
            Self::Trace { arc, t, .. } => Some(g.arc_point(arc, t)),
            Self::Branch { i } => Some(g.endpoint(i)),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::Regular { z, sheet } => format!("({:.6}{:+.6}i)^({sheet})", z.re, z.im),
            Self::Infinity { sheet } => format!("inf^({sheet})"),
            Self::Origin { star: false } => "0".into(),
            Self::Origin { star: true } => "0*".into(),
            Self::Trace { arc, t, side } => format!("arc{arc}(t={t:.6}){}", if side == Side::Plus { "+" } else { "-" }),
            Self::Branch { i } => format!("a{i}"),
        }
    }
}

fn on_cross(g: &CrossGeometry, z: C64) -> bool {
    (z.im == 0.0 && z.re.abs() <= g.a) || (z.re == 0.0 && z.im.abs() <= g.b)
}

/// `w(z)` on sheet 0 without the domain check.
pub fn w_raw(g: &CrossGeometry, z: C64) -> C64 {
    let (r1, r2) = r_parts(g, z);
    r1 * r2
}

/// `z√(1−a²/z²)` and `z√(1+b²/z²)`; their product is `w` and their sum is `√(a²+b²) Φ_*`.
pub fn r_parts(g: &CrossGeometry, z: C64) -> (C64, C64) {
    let z2 = z * z;
    let r1 = z * (1.0 - g.a * g.a / z2).sqrt();
    let r2 = z * (1.0 + g.b * g.b / z2).sqrt();
    (r1, r2)
}

/// `w(z)`, holomorphic off the cross with `w(z) = z² + O(z)` at infinity.
pub fn eval_w(g: &CrossGeometry, z: C64) -> Result<C64> {
    if on_cross(g, z) {
        return Err(Error::AmbiguousTrace(format!("{z} lies on the cross; use eval_w_trace")));
    }
    Ok(w_raw(g, z))
}

/// `w_±(s)` at `s = a_i(1−t)`.
pub fn eval_w_trace(g: &CrossGeometry, arc: usize, t: f64, side: Side) -> Result<C64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::SingularPoint(format!("t = {t} is not interior to arc {arc}")));
    }
    Ok(g.w_plus_on_arc(arc, t) * side.sign())
}

/// `w` with cancellation-free evaluation near `a_i`, given `d = z − a_i`.
pub fn w_near(g: &CrossGeometry, z: C64, i: usize, d: C64) -> C64 {
    let mut q = d;
    for j in 1..=4 {
        if j != i {
            q *= z - g.endpoint(j);
        }
    }
    let s = q.sqrt();
    let reference = w_raw(g, z);
    if (s - reference).norm() <= (s + reference).norm() { s } else { -s }
}

fn nearest_endpoint(g: &CrossGeometry, z: C64) -> usize {
    (1..=4)
        .min_by(|&i, &j| (z - g.endpoint(i)).norm().partial_cmp(&(z - g.endpoint(j)).norm()).unwrap())
        .unwrap()
}

/// Sheet-0 traces of `r1`, `r2` on the given side of `Δ_i`.
pub fn r_parts_trace(g: &CrossGeometry, arc: usize, t: f64, side: Side) -> (C64, C64) {
    let s = g.arc_point(arc, t);
    let w = g.w_plus_on_arc(arc, t) * side.sign();
    let z2 = s * s;
    if arc % 2 == 1 {
        let r2 = s * (1.0 + g.b * g.b / z2).sqrt();
        (w / r2, r2)
    } else {
        let r1 = s * (1.0 - g.a * g.a / z2).sqrt();
        (r1, w / r1)
    }
}

/// `w` at a surface point; ramification points give zero.
pub fn w_at(g: &CrossGeometry, p: &SurfacePoint) -> Result<C64> {
    match *p {
        SurfacePoint::Regular { z, sheet } => Ok(eval_w(g, z)? * sheet_sign(sheet)),
        SurfacePoint::Infinity { .. } => Err(Error::Pole("w has a double pole at infinity".into())),
        SurfacePoint::Origin { star } => Ok(C64::new(0.0, g.a * g.b) * if star { -1.0 } else { 1.0 }),
        SurfacePoint::Trace { arc, t, side } => eval_w_trace(g, arc, t, side),
        SurfacePoint::Branch { .. } => Ok(C64::new(0.0, 0.0)),
    }
}

pub fn sheet_sign(sheet: u8) -> f64 {
    if sheet == 0 { 1.0 } else { -1.0 }
}

/// Direction in which the sheet-0 origin limit yields `𝟎` (`star = false`) or `𝟎*`.
pub fn origin_direction(star: bool) -> C64 {
    if star { C64::from_polar(1.0, 0.75 * PI) } else { C64::from_polar(1.0, 0.25 * PI) }
}

fn phi_sign(g: &CrossGeometry, probe: C64) -> f64 {
    if probe.re > 0.0 && g.ellipse_level(probe) < 1.0 { 1.0 } else { -1.0 }
}

fn phi0_from_parts(g: &CrossGeometry, r1: C64, r2: C64, probe: C64) -> C64 {
    let n = (g.a * g.a + g.b * g.b).sqrt();
    (r1 + r2) / n * phi_sign(g, probe)
}

/// `Φ(p)`, normalized by `Φ(a_3) = 1`; `Φ(z^(1)) = 1/Φ(z^(0))`.
pub fn eval_phi(g: &CrossGeometry, p: &SurfacePoint) -> Result<C64> {
    match *p {
        SurfacePoint::Regular { z, sheet } => {
            if on_cross(g, z) {
                return Err(Error::AmbiguousTrace(format!("{z} lies on the cross")));
            }
            let (r1, r2) = r_parts(g, z);
            let v = phi0_from_parts(g, r1, r2, z);
            Ok(if sheet == 0 { v } else { 1.0 / v })
        }
        SurfacePoint::Infinity { sheet: 0 } => Err(Error::Pole("Φ has a pole at ∞^(0)".into())),
        SurfacePoint::Infinity { .. } => Ok(C64::new(0.0, 0.0)),
        SurfacePoint::Origin { star } => {
            let z = origin_direction(star) * ORIGIN_EPS;
            let (r1, r2) = r_parts(g, z);
            Ok(phi0_from_parts(g, r1, r2, z))
        }
        SurfacePoint::Trace { arc, t, side } => {
            let (r1, r2) = r_parts_trace(g, arc, t, side);
            let s = g.arc_point(arc, t);
            let probe = s + g.plus_normal(arc) * side.sign() * 1e-9 * g.arc_length(arc);
            Ok(phi0_from_parts(g, r1, r2, probe))
        }
        SurfacePoint::Branch { i } => {
            let z = g.endpoint(i);
            let (r1, r2) = if i % 2 == 1 {
                (C64::new(0.0, 0.0), z * (1.0 + g.b * g.b / (z * z)).sqrt())
            } else {
                (z * (1.0 - g.a * g.a / (z * z)).sqrt(), C64::new(0.0, 0.0))
            };
            // a_1 and a_2 lie on the homology arcs; report the outside value
            let probe = z * (1.0 + 1e-9);
            Ok(phi0_from_parts(g, r1, r2, probe))
        }
    }
}

/// Period data of the surface.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaContext {
    pub geometry: CrossGeometry,
    /// `∫ dz/w` along `π(𝛂)` from `a_4` to `a_1`; the `𝛂`-period is twice this.
    pub half_alpha: C64,
    /// `∫ dz/w` along `π(𝛃)` from `a_2` to `a_1`.
    pub half_beta: C64,
    /// `∫ z dz/w` along `π(𝛂)` from `a_4` to `a_1`.
    pub half_alpha_z: C64,
    pub b: C64,
    pub k_plus: C64,
    pub k_minus: C64,
    pub omega: C64,
    pub tau: C64,
    pub truncation: usize,
    /// Working precision in bits of the surface quantities.
    pub precision: u32,
    pub theta0: C64,
    pub theta_half: C64,
    pub theta_half_b: C64,
}

/// `∫ h(z, δ_l, δ_r) dz/w(z)` along `π(𝛂)` from `a_4` to `a_1` (`beta = false`)
/// or along `π(𝛃)` from `a_2` to `a_1`, restricted to the window `[u0, u1] ⊂ [0,1]`
/// where `u = 0` is the starting endpoint. The path angle is `θ = (π/2)(1−u)`;
/// `h` also receives `δ_l = θ(u0) − θ` and `δ_r = θ − θ(u1)` free of cancellation.
pub fn ellipse_integral(
    g: &CrossGeometry,
    beta: bool,
    u0: f64,
    u1: f64,
    h: impl Fn(C64, f64, f64) -> C64,
    tol: f64,
) -> Result<C64> {
    let half = PI / 2.0;
    let (start, sgn) = if beta { (2, 1.0) } else { (4, -1.0) };
    let (a, b) = (g.a, g.b);
    let len = u1 - u0;
    let v = tanh_sinh01(
        |v, vc| {
            let u = u0 + len * v;
            let uc = (1.0 - u1) + len * vc;
            let th = half * uc;
            let z = C64::new(a * th.cos(), sgn * b * th.sin());
            let w = if u < 0.5 {
                w_near(g, z, start, path_delta_top(g, start, half * u))
            } else {
                w_near(g, z, 1, path_delta_bottom(g, start, th))
            };
            let dz = C64::new(-a * th.sin(), sgn * b * th.cos()) * (-half);
            dz / w * h(z, half * len * v, half * len * vc)
        },
        tol,
    )?;
    Ok(v * len)
}

/// `z(θ) − z(θ_s)` on the ellipse through `a_1`, with `d = θ − θ_s` given exactly.
pub fn ellipse_chord(g: &CrossGeometry, beta: bool, th_s: f64, d: f64) -> C64 {
    let sgn = if beta { 1.0 } else { -1.0 };
    let mid = th_s + 0.5 * d;
    let sd = (0.5 * d).sin();
    C64::new(-2.0 * g.a * mid.sin() * sd, sgn * 2.0 * g.b * mid.cos() * sd)
}

/// `z(θ) − a_1` on the ellipse, accurate for small `θ`.
fn path_delta_bottom(g: &CrossGeometry, start: usize, th: f64) -> C64 {
    let s = (0.5 * th).sin();
    let im = if start == 4 { -g.b * th.sin() } else { g.b * th.sin() };
    C64::new(-2.0 * g.a * s * s, im)
}

/// `z(π/2 − φ) − a_start` on the ellipse, accurate for small `φ`.
fn path_delta_top(g: &CrossGeometry, start: usize, phi: f64) -> C64 {
    let s = (0.5 * phi).sin();
    let re = g.a * phi.sin();
    if start == 4 { C64::new(re, 2.0 * g.b * s * s) } else { C64::new(re, -2.0 * g.b * s * s) }
}

/// Periods, `B`, `K_±` and the `ω`, `τ` self-checks.
pub fn compute_periods(g: &CrossGeometry) -> Result<ThetaContext> {
    let one = |_: C64, _: f64, _: f64| C64::new(1.0, 0.0);
    let ident = |z: C64, _: f64, _: f64| z;
    let half_alpha = ellipse_integral(g, false, 0.0, 1.0, one, QTOL)?;
    let half_beta = ellipse_integral(g, true, 0.0, 1.0, one, QTOL)?;
    let za = ellipse_integral(g, false, 0.0, 1.0, ident, QTOL)?;
    let zb = ellipse_integral(g, true, 0.0, 1.0, ident, QTOL)?;
    let tau = za * 2.0 / (2.0 * PI * I);
    let omega = -zb * 2.0 / (2.0 * PI * I);
    let bper = half_beta / half_alpha;
    if !(bper.im > 0.0) {
        return Err(Error::Precision(format!("period B = {bper} does not have positive imaginary part")));
    }
    let truncation = theta_truncation(bper);
    let mut ctx = ThetaContext {
        geometry: *g,
        half_alpha,
        half_beta,
        half_alpha_z: za,
        b: bper,
        k_plus: (1.0 + bper) / 4.0,
        k_minus: (1.0 - bper) / 4.0,
        omega,
        tau,
        truncation,
        precision: 53,
        theta0: C64::new(0.0, 0.0),
        theta_half: C64::new(0.0, 0.0),
        theta_half_b: C64::new(0.0, 0.0),
    };
    ctx.theta0 = ctx.theta(C64::new(0.0, 0.0));
    ctx.theta_half = ctx.theta(C64::new(0.5, 0.0));
    ctx.theta_half_b = ctx.theta(bper / 2.0);
    Ok(ctx)
}

/// Terms beyond `N` are below `1e-18` once the argument is reduced to `|Im ζ| ≤ Im B/2`.
fn theta_truncation(b: C64) -> usize {
    let q = PI * b.im;
    let target = 18.0 * std::f64::consts::LN_10 + 10.0;
    (0.5 + (0.25 + target / q).sqrt()).ceil() as usize + 1
}

impl ThetaContext {
    /// `∮_𝛂 ds/w`.
    pub fn alpha_period(&self) -> C64 {
        self.half_alpha * 2.0
    }

    /// `∮_𝛃 ds/w`.
    pub fn beta_period(&self) -> C64 {
        self.half_beta * 2.0
    }

    /// Reduces `ζ` to `ζ_0 = ζ − l − mB` with `|Im ζ_0| ≤ Im B/2`, `Re ζ_0 ∈ [−1/2, 1/2)`.
    pub fn reduce(&self, zeta: C64) -> (C64, i64, i64) {
        let m = (zeta.im / self.b.im).round();
        let z1 = zeta - self.b * m;
        let l = z1.re.round();
        (z1 - l, l as i64, m as i64)
    }

    /// `θ(ζ) = Σ exp(πiBn² + 2πinζ)`.
    pub fn theta(&self, zeta: C64) -> C64 {
        let (z0, _, m) = self.reduce(zeta);
        let mut s = C64::new(1.0, 0.0);
        for n in 1..=self.truncation as i64 {
            let nf = n as f64;
            let e = PI * I * self.b * nf * nf;
            s += (e + 2.0 * PI * I * nf * z0).exp() + (e - 2.0 * PI * I * nf * z0).exp();
        }
        if m == 0 {
            s
        } else {
            let mf = m as f64;
            s * (-PI * I * mf * mf * self.b - 2.0 * PI * I * mf * z0).exp()
        }
    }

    /// `θ′(ζ)`.
    pub fn theta_prime(&self, zeta: C64) -> C64 {
        // differentiate the reduced series and the quasi-periodic factor
        let (z0, _, m) = self.reduce(zeta);
        let mut s = C64::new(1.0, 0.0);
        let mut ds = C64::new(0.0, 0.0);
        for n in 1..=self.truncation as i64 {
            let nf = n as f64;
            let e = PI * I * self.b * nf * nf;
            let p = (e + 2.0 * PI * I * nf * z0).exp();
            let q = (e - 2.0 * PI * I * nf * z0).exp();
            s += p + q;
            ds += (p - q) * 2.0 * PI * I * nf;
        }
        let mf = m as f64;
        let f = (-PI * I * mf * mf * self.b - 2.0 * PI * I * mf * z0).exp();
        (ds - s * 2.0 * PI * I * mf) * f
    }

    /// Residual of `ζ` modulo the lattice and the nearest lattice integers.
    pub fn lattice_residual(&self, zeta: C64) -> (f64, i64, i64) {
        let m = (zeta.im / self.b.im).round();
        let l = (zeta - self.b * m).re.round();
        ((zeta - l - self.b * m).norm(), l as i64, m as i64)
    }

    /// `Ω = dz / (w ∮_𝛂 ds/w)` applied to `1/w` values.
    fn omega_scale(&self) -> C64 {
        1.0 / self.alpha_period()
    }

    /// `∫_𝒂₃^p Ω` along paths inside the surface cut along `𝛂`, `𝛃`.
    pub fn abel_map(&self, p: &SurfacePoint) -> Result<C64> {
        let g = &self.geometry;
        match *p {
            SurfacePoint::Infinity { sheet } => Ok(self.k_plus * sheet_sign(sheet)),
            SurfacePoint::Origin { star } => Ok(if star { self.k_minus } else { -self.k_minus }),
            SurfacePoint::Branch { i } => {
                if i == 3 {
                    Ok(C64::new(0.0, 0.0))
                } else {
                    self.abel_trace(i, 0.0, Side::Plus)
                }
            }
            SurfacePoint::Trace { arc, t, side } => {
                if !(t > 0.0 && t < 1.0) {
                    return Err(Error::SingularPoint(format!("t = {t} is not interior to arc {arc}")));
                }
                self.abel_trace(arc, t, side)
            }
            SurfacePoint::Regular { z, sheet } => {
                if on_cross(g, z) {
                    return Err(Error::AmbiguousTrace(format!("{z} lies on the cross")));
                }
                let u0 = self.abel_sheet0(z)?;
                Ok(u0 * sheet_sign(sheet))
            }
        }
    }

    fn abel_sheet0(&self, z: C64) -> Result<C64> {
        let g = &self.geometry;
        if g.ellipse_level(z) >= 1.0 {
            // radial path to infinity: ∫_z^∞ dz/w = ∫_0^1 (z/s²)/w(z/s) ds
            let i = nearest_endpoint(g, z);
            let ai = g.endpoint(i);
            let dz = z - ai;
            let v = tanh_sinh01(
                |s, sc| {
                    let x = z / s;
                    let w = if sc < 0.25 { w_near(g, x, i, (dz + ai * sc) / s) } else { w_raw(g, x) };
                    z / (s * s) / w
                },
                QTOL,
            )?;
            Ok(self.k_plus - v * self.omega_scale())
        } else {
            // straight segment from the origin limit in the quadrant of z
            let base = if z.re * z.im > 0.0 { -self.k_minus } else { self.k_minus };
            let i = nearest_endpoint(g, z);
            let ai = g.endpoint(i);
            let dz = z - ai;
            let v = tanh_sinh01(
                |t, tc| {
                    let x = z * t;
                    let w = if tc < 0.25 { w_near(g, x, i, dz - z * tc) } else { w_raw(g, x) };
                    z / w
                },
                QTOL,
            )?;
            Ok(base + v * self.omega_scale())
        }
    }

    fn abel_trace(&self, arc: usize, t: f64, side: Side) -> Result<C64> {
        let g = &self.geometry;
        let ai = g.endpoint(arc);
        let base = match (arc, side) {
            (1, Side::Plus) | (3, Side::Plus) | (2, Side::Minus) | (4, Side::Minus) => self.k_minus,
            _ => -self.k_minus,
        };
        // ∫_0^s dx/w_side = ∫_t^1 a_i / w_side(τ) dτ, τ = t + (1−t)v
        let len = 1.0 - t;
        let v = tanh_sinh01(
            |v, vc| {
                let tau = t + len * v;
                let _ = vc;
                ai / (g.w_plus_on_arc(arc, tau) * side.sign())
            },
            QTOL,
        )?;
        Ok(base + v * len * self.omega_scale())
    }

    /// `dU/dz` on the sheet of `p`: `1/(w ∮_𝛂 ds/w)`.
    pub fn abel_derivative(&self, p: &SurfacePoint) -> Result<C64> {
        Ok(self.omega_scale() / w_at(&self.geometry, p)?)
    }

    /// `Φ` from its theta representation.
    pub fn phi_theta(&self, u: C64) -> C64 {
        (-PI * I * u).exp() * self.theta(u - self.k_plus) / self.theta(u + self.k_plus)
    }

    /// Projection `z` recovered from the Abel value.
    pub fn z_theta(&self, u: C64) -> C64 {
        let g = &self.geometry;
        let n = (g.a * g.a + g.b * g.b).sqrt();
        let pre = -n / 2.0 * (-PI * I * self.k_plus).exp() * self.theta0 * self.theta0 / (self.theta_half * self.theta_half_b);
        pre * self.theta(u - self.k_minus) * self.theta(u + self.k_minus)
            / (self.theta(u - self.k_plus) * self.theta(u + self.k_plus))
    }

    /// `T_k` as a function of the Abel value `u`.
    pub fn t_of_u(&self, k: u8, u: C64, c: C64) -> C64 {
        let sgn = if k == 0 { 1.0 } else { -1.0 };
        (PI * I * k as f64 * u).exp() * self.theta(u - c - self.k_plus * sgn) / self.theta(u - self.k_plus)
    }

    /// `T_k(p)`.
    pub fn eval_t(&self, k: u8, p: &SurfacePoint, c: C64) -> Result<C64> {
        if let SurfacePoint::Infinity { sheet: 1 } = p {
            return Err(Error::Pole("T_k has a pole at ∞^(1)".into()));
        }
        let u = self.abel_map(p)?;
        Ok(self.t_of_u(k, u, c))
    }

    /// `z_k` with the lattice integers `(l_k, m_k)`.
    pub fn locate_zk(&self, k: u8, c: C64) -> Result<LocatedZk> {
        let g = &self.geometry;
        let sgn = if k == 0 { 1.0 } else { -1.0 };
        let target = c - self.k_plus * sgn;
        let scale = self.theta0.norm();
        let tol = 1e-10;
        let mut candidates: Vec<SurfacePoint> = Vec::new();
        if self.theta(target - self.k_plus).norm() < tol * scale {
            candidates.push(SurfacePoint::Infinity { sheet: 1 });
        } else if self.theta(target + self.k_plus).norm() < tol * scale {
            candidates.push(SurfacePoint::Infinity { sheet: 0 });
        } else {
            let z = self.z_theta(target);
            let size = g.a.max(g.b);
            if z.norm() < 1e-7 * size {
                candidates.push(SurfacePoint::Origin { star: false });
                candidates.push(SurfacePoint::Origin { star: true });
            } else if let Some(i) = (1..=4).find(|&i| (z - g.endpoint(i)).norm() < 1e-7 * size) {
                candidates.push(SurfacePoint::Branch { i });
            } else if let Some((arc, t)) = g.locate_on_cross(z, 1e-9 * size) {
                candidates.push(SurfacePoint::Trace { arc, t, side: Side::Plus });
                candidates.push(SurfacePoint::Trace { arc, t, side: Side::Minus });
            } else {
                let z = if on_cross(g, z) { z + C64::new(1e-300, 1e-300) } else { z };
                candidates.push(SurfacePoint::sheet0(z));
                candidates.push(SurfacePoint::sheet1(z));
            }
        }
        let mut best: Option<(f64, SurfacePoint, i64, i64)> = None;
        for p in candidates {
            let u = self.abel_map(&p)?;
            let (res, l, m) = self.lattice_residual(u - target);
            if best.as_ref().is_none_or(|b| res < b.0) {
                best = Some((res, p, l, m));
            }
        }
        let (res, point, l, m) = best.expect("at least one candidate");
        if res > 1e-6 {
            return Err(Error::Precision(format!("z_{k}: Abel residual {res:.3e} on both sheets")));
        }
        Ok(LocatedZk { point, l, m, residual: res })
    }
}

/// A located zero `z_k` of `T_k`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocatedZk {
    pub point: SurfacePoint,
    pub l: i64,
    pub m: i64,
    pub residual: f64,
}

impl LocatedZk {
    pub fn is_finite(&self) -> bool {
        !matches!(self.point, SurfacePoint::Infinity { .. })
    }
}
