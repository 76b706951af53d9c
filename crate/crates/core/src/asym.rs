//! Strong-asymptotic predictions for `Q_n` and `wR_n` built from `Φ`, the
//! Szegő function and the theta quotients `T_0`, `T_1`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::geometry::{ClassIndex, WeightSpec};
use crate::identities::{origin_taylor, ZkData};
use crate::surface::{compute_periods, eval_phi, eval_w, Side, SurfacePoint, ThetaContext};
use crate::szego::SzegoData;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default `ε` of the index filter.
pub const DEFAULT_EPSILON: f64 = 0.1;
/// Distance from the arc ends, as a fraction of the arc length, for on-cut predictions.
pub const CUT_MARGIN: f64 = 0.15;

/// Error-decay exponent, or the reason it is not available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DExponent {
    Value { d: f64, first_branch: bool },
    Refused { re_nu: f64, ell: f64 },
}

impl DExponent {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Self::Value { d, .. } => Some(d),
            Self::Refused { .. } => None,
        }
    }
}

/// Whether `(ℓ, Re ν)` lies in the supported regime.
pub fn ell_nu_supported(nu: C64, ell: ClassIndex) -> bool {
    let x = nu.re.abs();
    match ell {
        ClassIndex::Finite(1) => x < 7f64.sqrt() / 2.0 - 1.0,
        ClassIndex::Finite(2) => x < 0.5,
        _ => x <= 0.5,
    }
}

pub fn d_exponent(nu: C64, ell: ClassIndex) -> DExponent {
    let x = nu.re.abs();
    if !ell_nu_supported(nu, ell) {
        return DExponent::Refused { re_nu: nu.re, ell: ell.as_f64() };
    }
    let l = match ell {
        ClassIndex::Infinite => return DExponent::Value { d: 0.5 + x, first_branch: true },
        ClassIndex::Finite(l) => l as f64,
    };
    let threshold = if x < 0.5 { 4.0 * x * (1.0 + x) / (1.0 - 2.0 * x) } else { f64::INFINITY };
    if l >= threshold {
        DExponent::Value { d: (0.5 + x) * (l - 2.0 * x) / (l + 1.0 + 2.0 * x), first_branch: true }
    } else {
        let d = (l * (3.0 - 2.0 * x) - 2.0 * x * (3.0 + 2.0 * x)) / (2.0 * (l + 3.0 + 2.0 * x));
        DExponent::Value { d, first_branch: false }
    }
}

/// `Φ`, `S_ρ`, `T_0`, `T_1` at one surface point.
#[derive(Debug, Clone, Copy)]
pub struct SheetValues {
    pub phi: C64,
    pub s: C64,
    pub t: [C64; 2],
}

impl SheetValues {
    /// `Ψ_n = Φ^n S_ρ T_{ı(n)}`.
    pub fn psi(&self, n: usize) -> C64 {
        self.phi.powi(n as i32) * self.s * self.t[n % 2]
    }
}

/// Quantities at the origin point `𝒐` that feed `L_{ni}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OriginData {
    pub star: bool,
    pub phi: C64,
    /// `(T_0/T_1)(𝒐)`.
    pub ratio: C64,
    /// `(T_0/T_1)′(𝒐)` from the theta closed form.
    pub ratio_derivative: C64,
    /// Relative gap to the contour-derivative estimate.
    pub derivative_check: f64,
}

pub struct AsymptoticModel {
    pub spec: WeightSpec,
    pub ctx: ThetaContext,
    pub szego: SzegoData,
    pub zk: ZkData,
    pub sigma: [f64; 2],
    pub nu: C64,
    /// `ς_ν`; `None` when `Re ν = 0`.
    pub varsigma: Option<f64>,
    pub ell_nu_ok: bool,
    pub d: DExponent,
    /// `A_ρ`; `None` when `Re ν = 0`.
    pub a_rho: Option<C64>,
    pub origin: Option<OriginData>,
    /// Representative `c_ρ + l + mB` of the class in use.
    c: C64,
    /// The `m` of that representative; `S_ρ` is multiplied by `e^{−2πimU}`.
    twist: i64,
    circle: OnceLock<Vec<(C64, [SheetValues; 2])>>,
    gamma_cache: Mutex<HashMap<usize, (C64, C64)>>,
}

/// Points where `γ_n` is read off: the same circle as the identity suite.
fn infinity_circle(spec: &WeightSpec) -> Vec<C64> {
    let g = &spec.geometry;
    let n = 64;
    let r = 10.0 * (g.a * g.a + g.b * g.b).sqrt();
    (0..n).map(|k| C64::from_polar(r, (k as f64 + 0.5) * 2.0 * PI / n as f64)).collect()
}

impl AsymptoticModel {
    pub fn new(spec: &WeightSpec) -> Result<Self> {
        let ctx = compute_periods(&spec.geometry).map_err(|e| e.tag("surface"))?;
        let szego = SzegoData::new(spec, &ctx).map_err(|e| e.tag("szego"))?;
        Self::assemble(spec, ctx, szego, 0, 0)
    }

    /// Same model with `c_ρ` replaced by `c_ρ + l + mB` and `S_ρ` by `S_ρ e^{−2πimU}`.
    pub fn with_lattice_shift(&self, l: i64, m: i64) -> Result<Self> {
        Self::assemble(&self.spec, self.ctx.clone(), self.szego.clone(), l, self.twist + m)
    }

    fn assemble(spec: &WeightSpec, ctx: ThetaContext, szego: SzegoData, l: i64, twist: i64) -> Result<Self> {
        let nu = spec.nu;
        let c = szego.c_rho + l as f64 + twist as f64 * ctx.b;
        let zk = ZkData::new(&ctx, c).map_err(|e| e.tag("asym"))?;
        let sigma = [zk.sigma(0), zk.sigma(1)];
        let varsigma = if nu.re > 0.0 {
            Some(1.0)
        } else if nu.re < 0.0 {
            Some(-1.0)
        } else {
            None
        };
        let a_rho = varsigma.map(|vs| {
            let r = |i| spec.rho_at_zero(i);
            if vs > 0.0 {
                (PI * I * nu).exp() * r(3) * (r(2) + r(3)) / r(2)
            } else {
                let g = &spec.geometry;
                (r(3) + r(4)) / (r(3) * r(4)) / (g.a * g.b).powi(2)
            }
        });
        let mut model = Self {
            spec: spec.clone(),
            ctx,
            szego,
            zk,
            sigma,
            nu,
            varsigma,
            ell_nu_ok: ell_nu_supported(nu, spec.class),
            d: d_exponent(nu, spec.class),
            a_rho,
            origin: None,
            c,
            twist,
            circle: OnceLock::new(),
            gamma_cache: Mutex::new(HashMap::new()),
        };
        if let Some(vs) = varsigma {
            if model.zk.finite() {
                model.origin = Some(model.origin_data(vs < 0.0)?);
            }
        }
        Ok(model)
    }

    pub fn c_rho(&self) -> C64 {
        self.c
    }

    /// `S_ρ(p)` for the representative in use, given the Abel value `u` at `p`.
    fn eval_s(&self, p: &SurfacePoint, u: C64) -> Result<C64> {
        let s = self.szego.eval_s(p)?;
        Ok(if self.twist == 0 { s } else { s * (-2.0 * PI * I * self.twist as f64 * u).exp() })
    }

    /// `𝒐`, defined when `Re ν ≠ 0`.
    pub fn o_point(&self) -> Option<SurfacePoint> {
        self.varsigma.map(|vs| SurfacePoint::Origin { star: vs < 0.0 })
    }

    fn origin_data(&self, star: bool) -> Result<OriginData> {
        let ctx = &self.ctx;
        let g = &self.spec.geometry;
        let c = self.c_rho();
        let o = SurfacePoint::Origin { star };
        let u = ctx.abel_map(&o)?;
        let phi = eval_phi(g, &o)?;
        let (kp, km) = (ctx.k_plus, ctx.k_minus);
        let v = u - c;
        // T_0/T_1 = e^{−πiu} θ(u−c−K₊)/θ(u−c+K₊)
        let ratio = (-PI * I * u).exp() * ctx.theta(v - kp) / ctx.theta(v + kp);
        let norm = (g.a * g.a + g.b * g.b).sqrt();
        let pre = (-PI * I * kp).exp() * ctx.theta0 * ctx.theta0 / (ctx.theta_half * ctx.theta_half_b);
        let w = C64::new(0.0, g.a * g.b) * if star { -1.0 } else { 1.0 };
        let ratio_derivative = -norm / (2.0 * w) * pre * (-PI * I * u).exp() * ctx.theta(v + km) * ctx.theta(v - km)
            / (ctx.theta(v + kp) * ctx.theta(v + kp));
        let (_, fd) = origin_taylor(g, star, &|p| {
            let u = ctx.abel_map(p)?;
            Ok(ctx.t_of_u(0, u, c) / ctx.t_of_u(1, u, c))
        })?;
        let derivative_check = (fd - ratio_derivative).norm() / ratio_derivative.norm().max(1e-300);
        Ok(OriginData { star, phi, ratio, ratio_derivative, derivative_check })
    }

    /// `Φ`, `S_ρ`, `T_k` at `z^(0)` and `z^(1)` for `z` off the cross.
    pub fn point_values(&self, z: C64) -> Result<[SheetValues; 2]> {
        let g = &self.spec.geometry;
        let p0 = SurfacePoint::sheet0(z);
        let u = self.ctx.abel_map(&p0)?;
        let phi = eval_phi(g, &p0)?;
        let s = self.eval_s(&p0, u)?;
        let c = self.c_rho();
        let t = |u| [self.ctx.t_of_u(0, u, c), self.ctx.t_of_u(1, u, c)];
        Ok([SheetValues { phi, s, t: t(u) }, SheetValues { phi: 1.0 / phi, s: 1.0 / s, t: t(-u) }])
    }

    /// Sheet-0 values on the `side` of `Δ_arc` at parameter `t`.
    pub fn trace_values(&self, arc: usize, t: f64, side: Side) -> Result<SheetValues> {
        let g = &self.spec.geometry;
        let p = SurfacePoint::Trace { arc, t, side };
        let u = self.ctx.abel_map(&p)?;
        let c = self.c_rho();
        Ok(SheetValues {
            phi: eval_phi(g, &p)?,
            s: self.eval_s(&p, u)?,
            t: [self.ctx.t_of_u(0, u, c), self.ctx.t_of_u(1, u, c)],
        })
    }

    fn circle_values(&self) -> Result<&Vec<(C64, [SheetValues; 2])>> {
        if let Some(v) = self.circle.get() {
            return Ok(v);
        }
        let mut out = Vec::new();
        for z in infinity_circle(&self.spec) {
            out.push((z, self.point_values(z)?));
        }
        Ok(self.circle.get_or_init(|| out))
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if let SurfacePoint::Infinity { sheet: 0 } = self.zk.zk[n % 2].point {
            return Err(Error::ExcludedIndex(n));
        }
        Ok(())
    }

    /// `(γ_n, γ*_{n−1})`.
    pub fn gamma_pair(&self, n: usize) -> Result<(C64, C64)> {
        self.check_index(n)?;
        if let Some(v) = self.gamma_cache.lock().expect("gamma cache").get(&n) {
            return Ok(*v);
        }
        let g = &self.spec.geometry;
        let circle = self.circle_values()?;
        let mut inv = C64::new(0.0, 0.0);
        let mut inv_star = C64::new(0.0, 0.0);
        for (z, v) in circle {
            inv += v[0].psi(n) / z.powi(n as i32);
            if n >= 1 {
                inv_star += v[1].psi(n - 1) * z.powi(n as i32) / eval_w(g, *z)?;
            }
        }
        let m = circle.len() as f64;
        let pair = (m / inv, if n >= 1 { m / inv_star } else { C64::new(f64::NAN, 0.0) });
        self.gamma_cache.lock().expect("gamma cache").insert(n, pair);
        Ok(pair)
    }

    pub fn gamma_n(&self, n: usize) -> Result<C64> {
        Ok(self.gamma_pair(n)?.0)
    }

    /// `A′_{ρ,n}`; zero when `Re ν = 0`.
    pub fn a_prime(&self, n: usize) -> Result<C64> {
        let (Some(vs), Some(a_rho)) = (self.varsigma, self.a_rho) else {
            return Ok(C64::new(0.0, 0.0));
        };
        let g = &self.spec.geometry;
        let nu = self.nu;
        // the limit is taken in Q3 of sheet 0, where U → −K₋
        let limit = self.szego.origin_limit()? * (4.0 * PI * I * self.twist as f64 * self.ctx.k_minus).exp();
        let lim = if vs > 0.0 { limit } else { 1.0 / limit };
        let expo = 0.5 - vs * nu;
        let scale = ((g.a * g.b / (2.0 * n as f64)).ln() * expo).exp();
        Ok(a_rho
            * (PI * I * vs * (self.c_rho() + 0.25)).exp()
            * (g.a * g.a + g.b * g.b).sqrt()
            / 2.0
            * gamma(1.0 - vs * nu)
            / (2.0 * PI).sqrt()
            * lim
            * scale)
    }

    /// `A_{ρ,n}`.
    pub fn a_rho_n(&self, n: usize) -> Result<C64> {
        if n == 0 {
            return Err(Error::Domain("A_{ρ,n} needs n ≥ 1".into()));
        }
        let Some(vs) = self.varsigma else {
            return Ok(C64::new(0.0, 0.0));
        };
        let k = n % 2;
        match self.zk.zk[k].point {
            SurfacePoint::Infinity { sheet: 1 } => return Ok(C64::new(0.0, 0.0)),
            SurfacePoint::Infinity { .. } => return Err(Error::ExcludedIndex(n)),
            _ => {}
        }
        let phi_o = eval_phi(&self.spec.geometry, &SurfacePoint::Origin { star: vs < 0.0 })?;
        Ok(self.sigma[k] * self.a_prime(n)? * self.zk.phi_zk[k] * phi_o.powi(2 * (n as i32 - 1)))
    }

    /// `A_{ρ,n}/(Φ(𝒐)^{2(n−1)} n^{ς_ν ν − 1/2})`, constant in each parity class.
    pub fn b_ratio(&self, n: usize) -> Result<C64> {
        let Some(vs) = self.varsigma else {
            return Ok(C64::new(0.0, 0.0));
        };
        let phi_o = eval_phi(&self.spec.geometry, &SurfacePoint::Origin { star: vs < 0.0 })?;
        let p = ((n as f64).ln() * (vs * self.nu - 0.5)).exp();
        Ok(self.a_rho_n(n)? / (phi_o.powi(2 * (n as i32 - 1)) * p))
    }

    pub fn is_allowable(&self, n: usize, epsilon: f64) -> Result<bool> {
        if n == 0 || self.check_index(n).is_err() {
            return Ok(false);
        }
        Ok((1.0 - self.a_rho_n(n)?).norm() >= epsilon)
    }

    /// `N_{ρ,ε} ∩ [1, n_max]`.
    pub fn allowable_indices(&self, epsilon: f64, n_max: usize) -> Result<Vec<usize>> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Config(format!("ε = {epsilon} is outside (0, 1/2)")));
        }
        let mut out = Vec::new();
        for n in 1..=n_max {
            if self.is_allowable(n, epsilon)? {
                out.push(n);
            }
        }
        Ok(out)
    }

    /// `(L_{n1}, L_{n2})`.
    pub fn l_constants(&self, n: usize) -> Result<(C64, C64)> {
        let a = self.a_rho_n(n)?;
        if a == C64::new(0.0, 0.0) {
            return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        }
        let Some(o) = self.origin else {
            return Err(Error::Unsupported("first-order constants need finite z_k".into()));
        };
        let k = n % 2;
        let sgn = if k == 0 { 1.0 } else { -1.0 };
        let pre = sgn * a / (1.0 - a) / o.ratio_derivative;
        // (−Φ T_ı/T_{ı′})(𝒐)·(T_0/T_1)(𝒐), written without the removable 0·∞
        let second = if k == 0 { -o.phi * o.ratio * o.ratio } else { -o.phi };
        Ok((pre * o.ratio, pre * second))
    }

    fn require_regime(&self) -> Result<()> {
        if let DExponent::Refused { re_nu, ell } = self.d {
            return Err(Error::Unsupported(format!(
                "|Re ν| = {} is outside the supported range for ℓ = {ell}: [0, √7/2−1) for ℓ = 1, [0, 1/2) for ℓ = 2, [0, 1/2] for ℓ ≥ 3",
                re_nu.abs()
            )));
        }
        Ok(())
    }

    fn combine(&self, n: usize, z: C64, order: u8, psi: impl Fn(usize) -> C64) -> Result<C64> {
        self.require_regime()?;
        let gam = self.gamma_n(n)?;
        match order {
            0 => Ok(gam * psi(n)),
            1 => {
                let (l1, l2) = match self.l_constants(n) {
                    Ok(l) => l,
                    Err(e) if matches!(e.root(), Error::Unsupported(_)) => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
                    Err(e) => return Err(e),
                };
                let mut v = gam * (1.0 + l1 / z) * psi(n);
                if l2 != C64::new(0.0, 0.0) {
                    v += gam * l2 / z * psi(n - 1);
                }
                Ok(v)
            }
            _ => Err(Error::Config(format!("order must be 0 or 1, got {order}"))),
        }
    }

    /// Predicted `Q_n(z)` from precomputed point values.
    pub fn predict_q_from(&self, n: usize, z: C64, v: &[SheetValues; 2], order: u8) -> Result<C64> {
        self.combine(n, z, order, |m| v[0].psi(m))
    }

    /// Predicted `w(z)R_n(z)` from precomputed point values.
    pub fn predict_r_from(&self, n: usize, z: C64, v: &[SheetValues; 2], order: u8) -> Result<C64> {
        self.combine(n, z, order, |m| v[1].psi(m))
    }

    pub fn predict_q(&self, n: usize, z: C64, order: u8) -> Result<C64> {
        let v = self.point_values(z)?;
        self.predict_q_from(n, z, &v, order)
    }

    pub fn predict_r(&self, n: usize, z: C64, order: u8) -> Result<C64> {
        let v = self.point_values(z)?;
        self.predict_r_from(n, z, &v, order)
    }

    /// Predicted `Q_n(s)` at `s = a_arc(1−t)` from the two one-sided traces.
    pub fn predict_q_on_cut(&self, n: usize, arc: usize, t: f64, order: u8) -> Result<C64> {
        if !(CUT_MARGIN..=1.0 - CUT_MARGIN).contains(&t) {
            return Err(Error::Proximity(format!(
                "t = {t} on arc {arc} is within {CUT_MARGIN} of an arc end"
            )));
        }
        let plus = self.trace_values(arc, t, Side::Plus)?;
        let minus = self.trace_values(arc, t, Side::Minus)?;
        let s = self.spec.geometry.arc_point(arc, t);
        self.combine(n, s, order, |m| plus.psi(m) + minus.psi(m))
    }

    /// `Ψ_n(p)`.
    pub fn eval_psi(&self, n: usize, p: &SurfacePoint) -> Result<C64> {
        if let SurfacePoint::Infinity { sheet: 0 } = p {
            return Err(Error::Pole(format!("Ψ_{n} has a pole of order {n} at ∞^(0)")));
        }
        let g = &self.spec.geometry;
        let u = self.ctx.abel_map(p)?;
        let phi = eval_phi(g, p)?;
        let s = self.eval_s(p, u)?;
        Ok(phi.powi(n as i32) * s * self.ctx.t_of_u((n % 2) as u8, u, self.c_rho()))
    }
}
