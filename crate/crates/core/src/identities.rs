//! Numerical checks of the theta-function identities that tie the surface
//! quantities together. Each check evaluates both sides by different routes:
//! quadrature-based Abel values, branch evaluations of `Φ`, contour averages
//! for limits and derivatives, against the closed theta expressions.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{Analytic, Builtin, CrossGeometry, WeightSpec};
use crate::surface::{compute_periods, eval_phi, LocatedZk, SurfacePoint, ThetaContext};
use crate::szego::compute_c_rho;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Acceptance threshold for every residual.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub name: String,
    pub weight: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub a: f64,
    pub b: f64,
    pub rows: Vec<IdentityRow>,
    pub max_residual: f64,
    pub pass: bool,
}

fn rel(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// Surface point near `𝟎` (or `𝟎*`) whose projection is `z`: the local sheet
/// is 0 in the quadrants through which the sheet-0 limit reaches that point.
pub fn origin_chart(z: C64, star: bool) -> SurfacePoint {
    let q13 = z.re * z.im > 0.0;
    if q13 != star { SurfacePoint::sheet0(z) } else { SurfacePoint::sheet1(z) }
}

/// Value and derivative at `𝟎`/`𝟎*` of a function given in the local chart,
/// from trapezoid sums on a small circle.
pub fn origin_taylor(
    g: &CrossGeometry,
    star: bool,
    f: &dyn Fn(&SurfacePoint) -> Result<C64>,
) -> Result<(C64, C64)> {
    let n = 64;
    let r = 0.25 * g.a.min(g.b);
    let mut v = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    for k in 0..n {
        let z = C64::from_polar(r, (k as f64 + 0.5) * 2.0 * PI / n as f64);
        let fz = f(&origin_chart(z, star))?;
        v += fz;
        d += fz / z;
    }
    Ok((v / n as f64, d / n as f64))
}

/// Constant Laurent coefficient at `∞` of a function analytic outside the
/// ellipse through the endpoints, from a trapezoid sum on a large circle.
pub fn infinity_mean(g: &CrossGeometry, f: &dyn Fn(C64) -> Result<C64>) -> Result<C64> {
    let n = 64;
    let r = 10.0 * (g.a * g.a + g.b * g.b).sqrt();
    let mut v = C64::new(0.0, 0.0);
    for k in 0..n {
        v += f(C64::from_polar(r, (k as f64 + 0.5) * 2.0 * PI / n as f64))?;
    }
    Ok(v / n as f64)
}

/// Data needed by the `z_k`-dependent identities for one class `c`.
pub struct ZkData {
    pub c: C64,
    pub zk: [LocatedZk; 2],
    pub phi_zk: [C64; 2],
}

impl ZkData {
    pub fn new(ctx: &ThetaContext, c: C64) -> Result<Self> {
        let g = &ctx.geometry;
        let zk = [ctx.locate_zk(0, c)?, ctx.locate_zk(1, c)?];
        // Φ has a pole at ∞^(0)
        let phi = |p: &SurfacePoint| match p {
            SurfacePoint::Infinity { sheet: 0 } => Ok(C64::new(f64::INFINITY, 0.0)),
            _ => eval_phi(g, p),
        };
        let phi_zk = [phi(&zk[0].point)?, phi(&zk[1].point)?];
        Ok(Self { c, zk, phi_zk })
    }

    pub fn finite(&self) -> bool {
        self.zk[0].is_finite() && self.zk[1].is_finite()
    }

    pub fn sigma(&self, k: usize) -> f64 {
        let z = &self.zk[k];
        if (z.l + z.m + k as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 }
    }
}

/// `X_n` as the limit at infinity of `z^{−2}Ψ_n(z^(0))Ψ_{n−1}(z^(1))`; the Szegő
/// factors cancel by reciprocity, leaving `z^{−2}Φ(z^(0))T_{ı(n)}(z^(0))T_{ı(n−1)}(z^(1))`.
pub fn x_limit(ctx: &ThetaContext, c: C64, parity: u8) -> Result<C64> {
    let g = &ctx.geometry;
    infinity_mean(g, &|z| {
        let p0 = SurfacePoint::sheet0(z);
        // the sheet-1 Abel value is −u
        let u = ctx.abel_map(&p0)?;
        let phi = eval_phi(g, &p0)?;
        Ok(phi * ctx.t_of_u(parity, u, c) * ctx.t_of_u(1 - parity, -u, c) / (z * z))
    })
}

/// `Y_n` (`star = false`) or `Z_n` (`star = true`): the Wronskian-type
/// combination `T_ı′ T_{ı′}/Φ − T_ı (T_{ı′}/Φ)′` at the origin point.
pub fn wronskian_at_origin(ctx: &ThetaContext, c: C64, parity: u8, star: bool) -> Result<C64> {
    let g = &ctx.geometry;
    let (t, dt) = origin_taylor(g, star, &|p| Ok(ctx.t_of_u(parity, ctx.abel_map(p)?, c)))?;
    let (q, dq) = origin_taylor(g, star, &|p| {
        Ok(ctx.t_of_u(1 - parity, ctx.abel_map(p)?, c) / eval_phi(g, p)?)
    })?;
    Ok(dt * q - t * dq)
}

/// Closed form of `X_n` for finite `z_k`.
pub fn x_closed(ctx: &ThetaContext, d: &ZkData, parity: u8) -> C64 {
    let g = &ctx.geometry;
    let th = ctx.theta(d.c) / ctx.theta0;
    let sgn = if parity == 0 { 1.0 } else { -1.0 };
    4.0 / (g.a * g.a + g.b * g.b) * th * th * sgn / d.phi_zk[1].powi(2 * parity as i32)
}

/// Closed form of `Y_n` (`star = false`) or `Z_n` for finite `z_k`.
pub fn wronskian_closed(ctx: &ThetaContext, d: &ZkData, phi_o: C64, parity: u8, star: bool) -> C64 {
    let g = &ctx.geometry;
    let th = ctx.theta(d.c) / ctx.theta0;
    let z0 = &d.zk[0];
    let sgn = if (z0.l + z0.m + parity as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let e = if star { (-PI * I * d.c).exp() } else { (PI * I * d.c).exp() };
    sgn * 2.0 * e / (g.a * g.a + g.b * g.b).sqrt() * d.phi_zk[0] / (phi_o * phi_o) * th * th
}

fn sample_points(g: &CrossGeometry) -> Vec<SurfacePoint> {
    let base = [
        C64::new(0.3, 0.2),
        C64::new(-0.45, 0.5),
        C64::new(0.2, -0.35),
        C64::new(-0.3, -0.25),
        C64::new(1.7, -0.9),
        C64::new(-2.1, 1.3),
        C64::new(0.4, 2.2),
    ];
    let mut out = Vec::new();
    for z in base {
        let z = C64::new(z.re * g.a, z.im * g.b);
        out.push(SurfacePoint::sheet0(z));
        out.push(SurfacePoint::sheet1(z));
    }
    out
}

/// Weights with finite `z_k` used by the suite: a perturbed constant-density
/// weight with generic class, and the Jacobi-1/4 builtin.
pub fn suite_weights(g: CrossGeometry) -> Result<Vec<WeightSpec>> {
    let e = C64::from_polar(1.0, 0.6);
    let c = [C64::new(-1.0, 0.0), e, C64::new(-1.0, 0.0), 2.0 - e];
    let common = Analytic::Poly { coeffs: vec![[1.0, 0.0], [0.3, 0.0], [0.0, 0.1]] };
    let perturbed = WeightSpec::from_constants(g, c, 0.0, Some(common))?.with_label("perturbed");
    Ok(vec![perturbed, WeightSpec::builtin(g, Builtin::JacobiQuarter)?])
}

/// Runs the full suite at `(a, b)`.
pub fn run_identity_suite(a: f64, b: f64) -> Result<IdentityReport> {
    let g = CrossGeometry::new(a, b)?;
    let ctx = compute_periods(&g)?;
    let mut rows = Vec::new();
    let mut push = |name: &str, weight: &str, residual: f64| {
        rows.push(IdentityRow { name: name.into(), weight: weight.into(), residual });
    };
    let n2 = (a * a + b * b).sqrt();

    push("omtau12", "-", (ctx.omega - 0.5).norm().max((ctx.tau - 0.5).norm()));

    let mut r_phi = 0.0f64;
    let mut r_z = 0.0f64;
    for p in sample_points(&g) {
        let u = ctx.abel_map(&p)?;
        r_phi = r_phi.max(rel(eval_phi(&g, &p)?, ctx.phi_theta(u)));
        let z = p.projection(&g).expect("finite point");
        r_z = r_z.max(rel(ctx.z_theta(u), z));
    }
    push("Phitheta", "-", r_phi);
    push("z-theta", "-", r_z);

    let phi_o = eval_phi(&g, &SurfacePoint::Origin { star: false })?;
    let phi_os = eval_phi(&g, &SurfacePoint::Origin { star: true })?;
    push("Phi01", "-", rel(phi_o, (PI * I * ctx.k_minus).exp() * ctx.theta_half / ctx.theta_half_b));

    let t4 = ctx.theta0.powi(4);
    let moduli = (PI * I * ctx.b / 2.0).exp() * (ctx.theta_half * ctx.theta_half_b).powi(2) / t4;
    push("moduli", "-", rel(moduli, C64::new((a * a + b * b) / (4.0 * a * b), 0.0)));

    let ap = 2.0 * PI * I / n2 * (PI * I * ctx.k_plus).exp() * ctx.theta_half * ctx.theta_half_b;
    push("alpha-period", "-", rel(ctx.alpha_period(), ap));

    let lhs_fn = |z: C64| (PI * I * z).exp() * ctx.theta(z + ctx.k_plus) / ctx.theta(z - ctx.k_plus);
    let mut r_td = 0.0f64;
    for zeta in [C64::new(0.13, 0.07), C64::new(-0.31, 0.2), C64::new(0.4, -0.15)] {
        let zeta = C64::new(zeta.re, zeta.im * ctx.b.im);
        // fourth-order central difference
        let h = 1e-3;
        let fd = (lhs_fn(zeta - 2.0 * h) - 8.0 * lhs_fn(zeta - h) + 8.0 * lhs_fn(zeta + h)
            - lhs_fn(zeta + 2.0 * h))
            / (12.0 * h);
        let rhs = I * PI * ctx.theta0 * ctx.theta0 * (PI * I * zeta).exp()
            * ctx.theta(zeta - ctx.k_minus)
            * ctx.theta(zeta + ctx.k_minus)
            / ctx.theta(zeta - ctx.k_plus).powi(2);
        r_td = r_td.max(rel(fd, rhs));
    }
    push("theta-derivative", "-", r_td);

    for spec in suite_weights(g)? {
        let c = compute_c_rho(&spec, &ctx)?;
        let d = ZkData::new(&ctx, c)?;
        let label = spec.label.clone();
        if !d.finite() {
            continue;
        }
        let (z0, z1) = (&d.zk[0], &d.zk[1]);
        let th = ctx.theta(c);
        let phi0 = (if (z0.l + z0.m) % 2 == 0 { 1.0 } else { -1.0 })
            * (-PI * I * (c - ctx.k_plus)).exp()
            * ctx.theta(c + 2.0 * ctx.k_minus)
            / th;
        let phi1 = (if (z1.l + z1.m) % 2 == 0 { 1.0 } else { -1.0 })
            * (-PI * I * (c + ctx.k_plus)).exp()
            * th
            / ctx.theta(c + 2.0 * ctx.k_plus);
        push("Phizk", &label, rel(d.phi_zk[0], phi0).max(rel(d.phi_zk[1], phi1)));
        let sgn = if (z0.l - z1.l + z0.m - z1.m).rem_euclid(2) == 0 { -1.0 } else { 1.0 };
        push("ProdPhizk", &label, rel(d.phi_zk[0] * d.phi_zk[1], C64::new(sgn, 0.0)));

        let (mut r_x, mut r_y, mut r_zn, mut r_xy, mut r_xz) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for parity in [0u8, 1] {
            let x = x_limit(&ctx, c, parity)?;
            let y = wronskian_at_origin(&ctx, c, parity, false)?;
            let zn = wronskian_at_origin(&ctx, c, parity, true)?;
            r_x = r_x.max(rel(x, x_closed(&ctx, &d, parity)));
            r_y = r_y.max(rel(y, wronskian_closed(&ctx, &d, phi_o, parity, false)));
            r_zn = r_zn.max(rel(zn, wronskian_closed(&ctx, &d, phi_os, parity, true)));
            let k = parity as usize;
            let common = d.sigma(k) * n2 / 2.0 * d.phi_zk[k];
            r_xy = r_xy.max(rel(y / x, common * (PI * I * c).exp() / (phi_o * phi_o)));
            r_xz = r_xz.max(rel(zn / x, common * (-PI * I * c).exp() / (phi_os * phi_os)));
        }
        push("product-Psis-V", &label, r_x);
        push("T-ratio-V", &label, r_y);
        push("T-ratio1-V", &label, r_zn);
        push("XnYn", &label, r_xy);
        push("XnZn", &label, r_xz);
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(IdentityReport { a, b, rows, max_residual, pass: max_residual < IDENTITY_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_square_cross() {
        let r = run_identity_suite(1.0, 1.0).unwrap();
        for row in &r.rows {
            assert!(row.residual < IDENTITY_TOL, "{} [{}]: {:e}", row.name, row.weight, row.residual);
        }
        assert_eq!(r.rows.len(), 7 + 2 * 7);
    }

    #[test]
    fn suite_oblong_crosses() {
        for (a, b) in [(1.0, 2.0), (2.0, 0.5)] {
            let r = run_identity_suite(a, b).unwrap();
            assert!(r.pass, "({a},{b}): {:?}", r.rows.iter().max_by(|x, y| x.residual.total_cmp(&y.residual)));
            assert_eq!(r.rows.len(), 21);
        }
    }
}
