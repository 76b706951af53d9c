//! The cross, its arcs, and Jacobi-type weights on it.
//!
//! Arc `Δ_i` joins `a_i` to the origin and is oriented toward the origin,
//! with `a_1 = a`, `a_2 = ib`, `a_3 = -a`, `a_4 = -ib`. Points on an arc are
//! parameterized by `s = a_i (1 - t)`, `t ∈ [0,1]`, so `t = 0` is the
//! endpoint `a_i` and `t = 1` the origin.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// The cross `[-a,a] ∪ [-ib,ib]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossGeometry {
    pub a: f64,
    pub b: f64,
}

impl CrossGeometry {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("need a > 0 and b > 0, got a={a}, b={b}")));
        }
        Ok(Self { a, b })
    }

    /// Endpoint `a_i`, `i ∈ 1..=4`.
    pub fn endpoint(&self, i: usize) -> C64 {
        match i {
            1 => C64::new(self.a, 0.0),
            2 => C64::new(0.0, self.b),
            3 => C64::new(-self.a, 0.0),
            4 => C64::new(0.0, -self.b),
            _ => panic!("arc index {i} out of range"),
        }
    }

    pub fn arc_length(&self, i: usize) -> f64 {
        if i % 2 == 1 { self.a } else { self.b }
    }

    /// `s = a_i (1 - t)`.
    pub fn arc_point(&self, i: usize, t: f64) -> C64 {
        self.endpoint(i) * (1.0 - t)
    }

    /// Unit normal pointing to the `+` (left) side of `Δ_i`.
    pub fn plus_normal(&self, i: usize) -> C64 {
        // direction of travel is -a_i/|a_i|; left of it is i·direction
        let dir = -self.endpoint(i) / self.arc_length(i);
        I * dir
    }

    pub fn capacity(&self) -> f64 {
        (self.a * self.a + self.b * self.b).sqrt() / 2.0
    }

    /// `π(α)`: `t ↦ a cos t − i b sin t`, `t ∈ [0, π/2]`, from `a_1` to `a_4`.
    pub fn alpha_path(&self, t: f64) -> C64 {
        C64::new(self.a * t.cos(), -self.b * t.sin())
    }

    /// `π(β)`: `t ↦ a cos t + i b sin t`, `t ∈ [0, π/2]`, from `a_1` to `a_2`.
    pub fn beta_path(&self, t: f64) -> C64 {
        C64::new(self.a * t.cos(), self.b * t.sin())
    }

    /// `(Re z/a)² + (Im z/b)²`; equal to one on the homology arcs.
    pub fn ellipse_level(&self, z: C64) -> f64 {
        (z.re / self.a).powi(2) + (z.im / self.b).powi(2)
    }

    /// `|w(s)|` at `s = a_i(1-t)`, computed without cancellation near `a_i`.
    pub fn wabs_on_arc(&self, i: usize, t: f64) -> f64 {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let u = 1.0 - t;
        let near = t * (2.0 - t);
        if i % 2 == 1 {
            (a2 * near * (a2 * u * u + b2)).sqrt()
        } else {
            (b2 * near * (b2 * u * u + a2)).sqrt()
        }
    }

    /// `w_+(s)` on `Δ_i°`: modulus `|w(s)|`, argument `(-1)^i π/2`.
    pub fn w_plus_on_arc(&self, i: usize, t: f64) -> C64 {
        let m = self.wabs_on_arc(i, t);
        if i % 2 == 0 { C64::new(0.0, m) } else { C64::new(0.0, -m) }
    }

    /// Distance from `z` to the cross.
    pub fn distance_to_cross(&self, z: C64) -> f64 {
        let dx = if z.re.abs() <= self.a { z.im.abs() } else { z.norm().min(C64::new(z.re.abs() - self.a, z.im).norm()) };
        let dy = if z.im.abs() <= self.b { z.re.abs() } else { C64::new(z.re, z.im.abs() - self.b).norm() };
        dx.min(dy)
    }

    /// If `z` lies within `tol` of some open arc, the arc index and parameter.
    pub fn locate_on_cross(&self, z: C64, tol: f64) -> Option<(usize, f64)> {
        for i in 1..=4 {
            let ai = self.endpoint(i);
            let t = 1.0 - (z / ai).re;
            let s = self.arc_point(i, t);
            if t > 0.0 && t < 1.0 && (z - s).norm() <= tol {
                return Some((i, t));
            }
        }
        None
    }
}

/// Named weights with closed-form Szegő data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Chebyshev,
    Legendre,
    JacobiQuarter,
}

impl Builtin {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "chebyshev" => Ok(Self::Chebyshev),
            "legendre" => Ok(Self::Legendre),
            "jacobi-quarter" | "jacobi" | "jacobi14" => Ok(Self::JacobiQuarter),
            other => Err(Error::Config(format!("unknown builtin weight '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Chebyshev => "chebyshev",
            Self::Legendre => "legendre",
            Self::JacobiQuarter => "jacobi-quarter",
        }
    }

    /// Exponent `p` in `ρ_i = c_i ((a²−z²)(b²+z²))^{−p/4}`.
    pub fn power(&self) -> f64 {
        match self {
            Self::Chebyshev => 2.0,
            Self::Legendre => 0.0,
            Self::JacobiQuarter => 1.0,
        }
    }

    /// Arc constants `c_i`.
    pub fn constant(&self, i: usize) -> C64 {
        let c = match self {
            Self::Chebyshev => [I, -I, I, -I],
            Self::Legendre => [C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0)],
            Self::JacobiQuarter => [I, C64::new(1.0, 0.0), -I, C64::new(-1.0, 0.0)],
        };
        c[i - 1]
    }

    pub fn alpha(&self) -> f64 {
        -self.power() / 4.0
    }

    pub fn arc_spec(&self) -> ArcSpec {
        ArcSpec { alpha: self.alpha(), analytic: Analytic::Builtin { name: *self } }
    }
}

/// Holomorphic, non-vanishing factor `ρ_i*` of an arc weight.
///
/// Complex numbers are written as `[re, im]`; polynomial coefficients are in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Analytic {
    Poly { coeffs: Vec<[f64; 2]> },
    Rational { num: Vec<[f64; 2]>, den: Vec<[f64; 2]> },
    /// Regular part of `((a²−z²)(b²+z²))^{−p/4}` relative to `(z−a_i)^{−p/4}`.
    Power { p: f64 },
    Builtin { name: Builtin },
    Product { factors: Vec<Analytic> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub alpha: f64,
    pub analytic: Analytic,
}

/// Smoothness class `ℓ` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassIndex {
    Finite(u32),
    Infinite,
}

impl ClassIndex {
    pub fn as_f64(&self) -> f64 {
        match self {
            Self::Finite(l) => *l as f64,
            Self::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(l) => write!(f, "{l}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ClassIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(l) => s.serialize_u32(*l),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ClassIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u32),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(0) => Err(serde::de::Error::custom("class index must be positive")),
            Repr::N(l) => Ok(Self::Finite(l)),
            Repr::S(s) if s == "inf" || s == "infinity" => Ok(Self::Infinite),
            Repr::S(s) => Err(serde::de::Error::custom(format!("bad class index '{s}'"))),
        }
    }
}

/// On-disk weight description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<Builtin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<ArcSpec>>,
}

impl WeightFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn into_spec(self) -> Result<WeightSpec> {
        let geom = CrossGeometry::new(self.a, self.b)?;
        let class = self.class.unwrap_or(ClassIndex::Infinite);
        match (self.builtin, self.arcs) {
            (Some(bi), None) => {
                let mut w = WeightSpec::builtin(geom, bi)?;
                w.class = class;
                Ok(w)
            }
            (None, Some(arcs)) => {
                let arcs: [ArcSpec; 4] = arcs
                    .try_into()
                    .map_err(|_| Error::Config("exactly four arcs are required".into()))?;
                WeightSpec::new(geom, arcs, class)
            }
            _ => Err(Error::Config("give exactly one of 'builtin' or 'arcs'".into())),
        }
    }
}

/// Polynomial factor with its roots, for continuous logarithms along arcs.
#[derive(Debug, Clone)]
struct RootedPoly {
    coeffs: Vec<C64>,
    at_zero: C64,
    roots: Vec<C64>,
}

impl RootedPoly {
    fn new(c: &[[f64; 2]]) -> Result<Self> {
        let coeffs: Vec<C64> = c.iter().map(|p| C64::new(p[0], p[1])).collect();
        let mut deg = coeffs.len();
        while deg > 0 && coeffs[deg - 1] == C64::new(0.0, 0.0) {
            deg -= 1;
        }
        if deg == 0 {
            return Err(Error::Config("zero polynomial in analytic part".into()));
        }
        let coeffs = coeffs[..deg].to_vec();
        let at_zero = coeffs[0];
        if at_zero.norm() == 0.0 {
            return Err(Error::Config("analytic part vanishes at the origin".into()));
        }
        let roots = poly_roots(&coeffs);
        Ok(Self { coeffs, at_zero, roots })
    }

    fn eval(&self, z: C64) -> C64 {
        horner(&self.coeffs, z)
    }

    /// `log P(0) + Σ Log(1 − s/r_j)`; continuous on any segment from 0 avoiding the roots.
    fn log_from_origin(&self, s: C64) -> C64 {
        self.roots.iter().fold(self.at_zero.ln(), |acc, r| acc + (1.0 - s / r).ln())
    }

    fn min_root_distance(&self, z: C64) -> f64 {
        self.roots.iter().map(|r| (r - z).norm()).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
struct Compiled {
    konst: C64,
    num: Vec<RootedPoly>,
    den: Vec<RootedPoly>,
    power: f64,
}

impl Compiled {
    fn from(an: &Analytic, arc: usize) -> Result<Self> {
        let mut c = Compiled { konst: C64::new(1.0, 0.0), num: vec![], den: vec![], power: 0.0 };
        c.absorb(an, arc)?;
        Ok(c)
    }

    fn absorb(&mut self, an: &Analytic, arc: usize) -> Result<()> {
        match an {
            Analytic::Poly { coeffs } => {
                if coeffs.len() == 1 {
                    self.konst *= C64::new(coeffs[0][0], coeffs[0][1]);
                    if self.konst.norm() == 0.0 {
                        return Err(Error::Config("zero constant in analytic part".into()));
                    }
                } else {
                    self.num.push(RootedPoly::new(coeffs)?);
                }
            }
            Analytic::Rational { num, den } => {
                self.num.push(RootedPoly::new(num)?);
                self.den.push(RootedPoly::new(den)?);
            }
            Analytic::Power { p } => self.power += p,
            Analytic::Builtin { name } => {
                self.konst *= name.constant(arc);
                self.power += name.power();
            }
            Analytic::Product { factors } => {
                for f in factors {
                    self.absorb(f, arc)?;
                }
            }
        }
        Ok(())
    }
}

/// `a_i Π_{j≠i}(z − a_j)`, positive on `Δ_i`.
pub fn power_base(g: &CrossGeometry, i: usize, z: C64) -> C64 {
    let mut v = g.endpoint(i);
    for j in 1..=4 {
        if j != i {
            v *= z - g.endpoint(j);
        }
    }
    v
}

/// A validated arc weight `ρ_i(s) = ρ_i*(s)(s − a_i)^{α_i}`.
#[derive(Debug, Clone)]
pub struct ArcWeight {
    pub spec: ArcSpec,
    compiled: Compiled,
}

/// Weight on the four arcs together with the derived constant `ν`.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub geometry: CrossGeometry,
    pub arcs: [ArcWeight; 4],
    pub class: ClassIndex,
    /// Integers `k_i`: `2πi k_i` is added to the reference branch of `log ρ_i`.
    pub log_offsets: [i64; 4],
    pub nu: C64,
    pub label: String,
}

impl WeightSpec {
    pub fn new(geometry: CrossGeometry, arcs: [ArcSpec; 4], class: ClassIndex) -> Result<Self> {
        let mut compiled = Vec::with_capacity(4);
        for (k, a) in arcs.iter().enumerate() {
            if a.alpha.is_nan() || a.alpha <= -1.0 {
                return Err(Error::Domain(format!("arc {}: exponent {} must exceed -1", k + 1, a.alpha)));
            }
            let c = Compiled::from(&a.analytic, k + 1)?;
            compiled.push(ArcWeight { spec: a.clone(), compiled: c });
        }
        let arcs: [ArcWeight; 4] = compiled.try_into().expect("four arcs");
        let mut spec = WeightSpec {
            geometry,
            arcs,
            class,
            log_offsets: [0; 4],
            nu: C64::new(0.0, 0.0),
            label: "custom".into(),
        };
        let (nu, offs) = compute_nu(&spec)?;
        spec.nu = nu;
        spec.log_offsets = offs;
        Ok(spec)
    }

    pub fn builtin(geometry: CrossGeometry, b: Builtin) -> Result<Self> {
        let arcs = std::array::from_fn(|_| b.arc_spec());
        let mut w = Self::new(geometry, arcs, ClassIndex::Infinite)?;
        w.label = b.name().into();
        Ok(w)
    }

    /// `ρ_i(s) = c_i h(s) ((a²−s²)(b²+s²))^{−p/4}`: a common holomorphic factor
    /// `h` times constants summing to zero keeps the weight in `W_∞`.
    pub fn from_constants(geometry: CrossGeometry, c: [C64; 4], p: f64, common: Option<Analytic>) -> Result<Self> {
        let arcs = std::array::from_fn(|k| {
            let mut factors = vec![Analytic::Poly { coeffs: vec![[c[k].re, c[k].im]] }, Analytic::Power { p }];
            if let Some(h) = &common {
                factors.push(h.clone());
            }
            ArcSpec { alpha: -p / 4.0, analytic: Analytic::Product { factors } }
        });
        Self::new(geometry, arcs, ClassIndex::Infinite)
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn to_file(&self) -> WeightFile {
        WeightFile {
            a: self.geometry.a,
            b: self.geometry.b,
            class: Some(self.class),
            builtin: None,
            arcs: Some(self.arcs.iter().map(|a| a.spec.clone()).collect()),
        }
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.arcs[i - 1].spec.alpha
    }

    /// Builtin name if every arc is the same builtin.
    pub fn as_builtin(&self) -> Option<Builtin> {
        let first = match &self.arcs[0].spec.analytic {
            Analytic::Builtin { name } => *name,
            _ => return None,
        };
        let same = self.arcs.iter().all(|a| {
            matches!(&a.spec.analytic, Analytic::Builtin { name } if *name == first) && a.spec.alpha == first.alpha()
        });
        same.then_some(first)
    }

    /// Parts needed by arbitrary-precision evaluators: constant, numerator and
    /// denominator coefficient lists, and the power `p`.
    pub fn analytic_parts(&self, i: usize) -> (C64, Vec<Vec<C64>>, Vec<Vec<C64>>, f64) {
        let c = &self.arcs[i - 1].compiled;
        (
            c.konst,
            c.num.iter().map(|p| p.coeffs.clone()).collect(),
            c.den.iter().map(|p| p.coeffs.clone()).collect(),
            c.power,
        )
    }

    /// `ρ_i*(z)`.
    pub fn rho_star(&self, i: usize, z: C64) -> C64 {
        let c = &self.arcs[i - 1].compiled;
        let g = &self.geometry;
        let mut v = c.konst;
        for p in &c.num {
            v *= p.eval(z);
        }
        for p in &c.den {
            v /= p.eval(z);
        }
        if c.power != 0.0 {
            let q = c.power / 4.0;
            v *= power_base(g, i, z).powf(-q) * (-g.endpoint(i)).powf(q);
        }
        v
    }

    /// `log(z − a_i)` with the cut along the ray from `a_i` away from the origin.
    pub fn log_z_minus_ai(&self, i: usize, z: C64) -> C64 {
        let ai = self.geometry.endpoint(i);
        (-ai).ln() + ((z - ai) / (-ai)).ln()
    }

    /// Holomorphic extension of `ρ_i` to a neighbourhood of `Δ_i ∖ {a_i}`.
    pub fn rho(&self, i: usize, z: C64) -> C64 {
        let al = self.alpha(i);
        let f = if al == 0.0 { C64::new(1.0, 0.0) } else { (self.log_z_minus_ai(i, z) * al).exp() };
        self.rho_star(i, z) * f
    }

    pub fn rho_at_zero(&self, i: usize) -> C64 {
        self.rho(i, C64::new(0.0, 0.0))
    }

    /// `ρ_i(s)` at `s = a_i(1−t)`, `t ∈ (0,1]`.
    pub fn rho_on_arc(&self, i: usize, t: f64) -> C64 {
        let g = &self.geometry;
        let al = self.alpha(i);
        let s = g.arc_point(i, t);
        let f = if al == 0.0 { C64::new(1.0, 0.0) } else { ((-g.endpoint(i)).ln() * al).exp() * t.powf(al) };
        self.rho_star(i, s) * f
    }

    /// Continuous branch of `log ρ_i(s)` along the arc, including the offset.
    pub fn log_rho_on_arc(&self, i: usize, t: f64) -> C64 {
        self.log_rho_reference(i, t) + C64::new(0.0, 2.0 * PI * self.log_offsets[i - 1] as f64)
    }

    fn log_rho_reference(&self, i: usize, t: f64) -> C64 {
        let g = &self.geometry;
        let c = &self.arcs[i - 1].compiled;
        let s = g.arc_point(i, t);
        let mut v = c.konst.ln();
        for p in &c.num {
            v += p.log_from_origin(s);
        }
        for p in &c.den {
            v -= p.log_from_origin(s);
        }
        let lai = (-g.endpoint(i)).ln();
        if c.power != 0.0 {
            let q = c.power / 4.0;
            v += lai * q - q * power_base(g, i, s).norm().ln();
        }
        let al = self.alpha(i);
        if al != 0.0 {
            v += (lai + t.ln()) * al;
        }
        v
    }

    /// `log(ρ_i w_+)(s)` with `log w_+ = log|w_+| + (−1)^i πi/2`.
    pub fn log_rho_w_on_arc(&self, i: usize, t: f64) -> C64 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        self.log_rho_on_arc(i, t) + C64::new(self.geometry.wabs_on_arc(i, t).ln(), sign * PI / 2.0)
    }

    /// Regular part of `log(ρ_i w_+)` near `a_i`: the value minus
    /// `(α_i + 1/2) log t`, finite at `t = 0`.
    pub fn log_rho_w_regular(&self, i: usize, t: f64) -> C64 {
        let al = self.alpha(i);
        let g = &self.geometry;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let (a2, b2) = (g.a * g.a, g.b * g.b);
        let u = 1.0 - t;
        let other = if i % 2 == 1 { a2 * (2.0 - t) * (a2 * u * u + b2) } else { b2 * (2.0 - t) * (b2 * u * u + a2) };
        let mut v = self.log_rho_on_arc(i, t);
        if al != 0.0 {
            v -= al * t.ln();
        }
        v + C64::new(0.5 * other.ln(), sign * PI / 2.0)
    }

    /// Checks whether `s` lies on `Δ_i°` and returns its parameter.
    pub fn arc_parameter(&self, i: usize, s: C64) -> Result<f64> {
        let g = &self.geometry;
        let ai = g.endpoint(i);
        let r = s / ai;
        if r.im.abs() > 1e-12 * r.norm().max(1.0) {
            return Err(Error::Domain(format!("{s} is not on arc {i}")));
        }
        let t = 1.0 - r.re;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("{s} is not on arc {i}")));
        }
        Ok(t)
    }

    /// `ρ_i(s)` for `s` strictly inside `Δ_i`.
    pub fn eval_weight(&self, i: usize, s: C64) -> Result<C64> {
        let t = self.arc_parameter(i, s)?;
        if t == 0.0 && self.alpha(i) < 0.0 {
            return Err(Error::SingularPoint(format!("weight is singular at a_{i}")));
        }
        if t == 0.0 || t == 1.0 {
            return Err(Error::SingularPoint(format!("{s} is an endpoint of arc {i}")));
        }
        Ok(self.rho_on_arc(i, t))
    }

    /// Smallest distance from the closed arc `Δ_i` to a zero or pole of `ρ_i*`.
    fn min_singular_distance(&self, i: usize) -> f64 {
        let c = &self.arcs[i - 1].compiled;
        let mut d = f64::INFINITY;
        for k in 0..=64 {
            let s = self.geometry.arc_point(i, k as f64 / 64.0);
            for p in c.num.iter().chain(c.den.iter()) {
                d = d.min(p.min_root_distance(s));
            }
        }
        d
    }
}

/// `ν` and the integer offsets: the arc-1 branch is shifted by `2πi k` so that
/// `Re ν ∈ (−1/2, 1/2]`, where `ν = (1/2πi) Σ (−1)^i log(ρ_i w_+)(0)`.
pub fn compute_nu(spec: &WeightSpec) -> Result<(C64, [i64; 4])> {
    let mut raw = C64::new(0.0, 0.0);
    for i in 1..=4 {
        let r0 = spec.rho_at_zero(i);
        if !(r0.norm() > 0.0) || !r0.re.is_finite() {
            return Err(Error::DegenerateWeight(format!("ρ_{i}(0) = {r0}")));
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        raw += spec.log_rho_w_regular(i, 1.0) * sign;
    }
    let raw = raw / C64::new(0.0, 2.0 * PI);
    let k1 = (raw.re - 0.5).ceil();
    let nu = raw - k1;
    Ok((nu, [k1 as i64, 0, 0, 0]))
}

/// Outcome of checking the class conditions (i)–(iv).
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub exponents_ok: bool,
    pub nonvanishing_ok: bool,
    pub ratio_residual: f64,
    pub ratio_ok: bool,
    pub sum_residual: f64,
    pub sum_ok: bool,
    pub derivative_residuals: Vec<f64>,
    pub detected_class: ClassIndex,
    pub declared_class: ClassIndex,
    pub passes: bool,
}

/// Number of Taylor orders probed when detecting `ℓ`.
pub const CLASS_PROBE_ORDERS: usize = 16;

/// Checks the class conditions on the circle of radius `min(a,b)/4`.
pub fn validate_weight_class(spec: &WeightSpec, tol: f64) -> Result<ValidationReport> {
    let g = &spec.geometry;
    let exponents_ok = (1..=4).all(|i| spec.alpha(i) > -1.0);
    if !exponents_ok {
        return Err(Error::Domain("an exponent is ≤ −1".into()));
    }
    let nonvanishing_ok = (1..=4).all(|i| spec.min_singular_distance(i) > 1e-8 * g.a.max(g.b));
    let r = g.a.min(g.b) / 4.0;
    const M: usize = 64;
    let pts: Vec<C64> = (0..M).map(|k| C64::from_polar(r, 2.0 * PI * k as f64 / M as f64)).collect();
    let vals: Vec<Vec<C64>> = (1..=4).map(|i| pts.iter().map(|&z| spec.rho(i, z)).collect()).collect();
    for v in &vals {
        if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Config("analytic part is not evaluable near the origin".into()));
        }
    }
    // (ii) (ρ1ρ3)/(ρ2ρ4) constant
    let r0: Vec<C64> = (1..=4).map(|i| spec.rho_at_zero(i)).collect();
    let ratio0 = r0[0] * r0[2] / (r0[1] * r0[3]);
    let ratio_residual = (0..M)
        .map(|k| ((vals[0][k] * vals[2][k] / (vals[1][k] * vals[3][k])) / ratio0 - 1.0).norm())
        .fold(0.0, f64::max);
    // (iii)
    let sum: C64 = r0.iter().sum();
    let sum_residual = sum.norm();
    let scale = r0.iter().map(|x| x.norm()).fold(0.0, f64::max);
    // (iv) normalized Taylor coefficients c_l r^l / c_0 by the trapezoid rule
    let taylor: Vec<Vec<C64>> = vals
        .iter()
        .map(|v| {
            (0..CLASS_PROBE_ORDERS)
                .map(|l| {
                    let s: C64 = (0..M).map(|k| v[k] * C64::from_polar(1.0, -2.0 * PI * (l * k) as f64 / M as f64)).sum();
                    s / M as f64
                })
                .collect()
        })
        .collect();
    let mut derivative_residuals = Vec::with_capacity(CLASS_PROBE_ORDERS);
    for l in 0..CLASS_PROBE_ORDERS {
        let n: Vec<C64> = taylor.iter().map(|t| t[l] / t[0]).collect();
        let res = n.iter().map(|x| (x - n[0]).norm()).fold(0.0, f64::max);
        derivative_residuals.push(res);
    }
    let mut detected = ClassIndex::Infinite;
    for (l, res) in derivative_residuals.iter().enumerate() {
        if *res > tol {
            detected = ClassIndex::Finite(l as u32);
            break;
        }
    }
    let ratio_ok = ratio_residual <= tol;
    let sum_ok = sum_residual <= tol * scale.max(1.0);
    let class_ok = match (detected, spec.class) {
        (ClassIndex::Finite(0), _) => false,
        (_, ClassIndex::Infinite) => detected == ClassIndex::Infinite,
        (ClassIndex::Infinite, _) => true,
        (ClassIndex::Finite(d), ClassIndex::Finite(c)) => d >= c,
    };
    Ok(ValidationReport {
        exponents_ok,
        nonvanishing_ok,
        ratio_residual,
        ratio_ok,
        sum_residual,
        sum_ok,
        derivative_residuals,
        detected_class: detected,
        declared_class: spec.class,
        passes: exponents_ok && nonvanishing_ok && ratio_ok && sum_ok && class_ok,
    })
}

pub(crate) fn horner(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &x| acc * z + x)
}

/// Roots of `Σ c_k z^k` from the companion matrix, polished by Newton steps.
pub fn poly_roots(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        m[(0, k)] = -c[n - 1 - k] / lead;
        if k + 1 < n {
            m[(k + 1, k)] = C64::new(1.0, 0.0);
        }
    }
    let schur = nalgebra::linalg::Schur::new(m);
    let (_, t) = schur.unpack();
    let d: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let dc: Vec<C64> = (1..=n).map(|k| c[k] * k as f64).collect();
    d.into_iter()
        .map(|mut z| {
            for _ in 0..4 {
                let p = horner(c, z);
                let dp = horner(&dc, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.re.is_finite() {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratic() {
        let r = poly_roots(&[C64::new(-2.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 2f64.sqrt()).abs() < 1e-14 && (re[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn plus_normals() {
        let g = CrossGeometry::new(1.0, 2.0).unwrap();
        assert!((g.plus_normal(1) - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((g.plus_normal(2) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((g.plus_normal(3) - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((g.plus_normal(4) - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }
}
