//! Double-precision quadrature for complex-valued integrands.
//!
//! `tanh_sinh01` targets integrands with algebraic or logarithmic endpoint
//! singularities on `[0,1]`; the callback receives both `t` and `1 - t`
//! computed without cancellation. `gauss_kronrod` is an adaptive G7/K15 rule
//! for smooth integrands on a finite interval.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Integral of `f(t, 1-t)` over `[0,1]` by the double-exponential rule.
///
/// Non-finite samples (which only occur at nodes within a few ulps of an
/// endpoint singularity) are dropped.
pub fn tanh_sinh01<F>(f: F, tol: f64) -> Result<C64>
where
    F: Fn(f64, f64) -> C64,
{
    tanh_sinh01_abs(f, tol, 0.0)
}

/// As [`tanh_sinh01`], also accepting once successive estimates differ by at most `abs_tol`.
pub fn tanh_sinh01_abs<F>(f: F, tol: f64, abs_tol: f64) -> Result<C64>
where
    F: Fn(f64, f64) -> C64,
{
    const UMAX: f64 = 6.0;
    const MAX_LEVEL: u32 = 10;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let term = |u: f64| -> C64 {
        let v = half_pi * u.sinh();
        // t = 1/(1+e^{-2v}), 1-t = 1/(1+e^{2v}), dt/du = (π/2) cosh u / (2 cosh² v)
        let t = 1.0 / (1.0 + (-2.0 * v).exp());
        let tc = 1.0 / (1.0 + (2.0 * v).exp());
        if t <= 0.0 || tc <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let cv = v.cosh();
        let dw = half_pi * u.cosh() / (2.0 * cv * cv);
        if !dw.is_finite() || dw == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let y = f(t, tc) * dw;
        if y.re.is_finite() && y.im.is_finite() {
            y
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let mut h = 0.5;
    let t0 = term(0.0);
    let mut sum = t0;
    let mut l1 = t0.norm();
    let mut k = 1;
    while (k as f64) * h <= UMAX {
        let u = k as f64 * h;
        let (p, q) = (term(u), term(-u));
        sum += p + q;
        l1 += p.norm() + q.norm();
        k += 1;
    }
    let mut est = sum * h;
    let mut diff = f64::INFINITY;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= UMAX {
            let u = k as f64 * h;
            let (p, q) = (term(u), term(-u));
            sum += p + q;
            l1 += p.norm() + q.norm();
            k += 2;
        }
        let next = sum * h;
        diff = (next - est).norm();
        est = next;
        // relative to the L1 norm so that cancelling integrands still terminate
        if diff <= tol * (l1 * h).max(1e-300) || diff <= abs_tol {
            return Ok(est);
        }
    }
    Err(Error::Precision(format!(
        "tanh-sinh did not converge (value {est}, last change {diff:e}, scale {:e})",
        l1 * h
    )))
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a,b]`.
pub fn gauss_kronrod<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<C64> {
    let mut stack = vec![(a, b)];
    let (v0, _) = gk15(&f, a, b);
    let scale = v0.norm().max(1e-300);
    let mut total = C64::new(0.0, 0.0);
    let mut evals = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        let (v, e) = gk15(&f, lo, hi);
        evals += 1;
        let share = (hi - lo) / (b - a);
        if e <= tol * scale * share.max(1e-3) || hi - lo < 1e-14 * (b - a).abs() {
            total += v;
        } else if evals > 20_000 {
            return Err(Error::Precision(format!(
                "Gauss–Kronrod did not converge on [{a}, {b}]"
            )));
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid));
            stack.push((mid, hi));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 log(t)/sqrt(t) dt = -4
        let v = tanh_sinh01(|t, _| C64::new(t.ln() / t.sqrt(), 0.0), 1e-14).unwrap();
        assert!((v.re + 4.0).abs() < 1e-12, "{v}");
        // ∫_0^1 (1-t)^{-3/4} dt = 4, using the complement argument
        let v = tanh_sinh01(|_, tc| C64::new(tc.powf(-0.75), 0.0), 1e-14).unwrap();
        assert!((v.re - 4.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn kronrod_smooth() {
        let v = gauss_kronrod(|x| C64::new(x.cos(), x.sin()), 0.0, 2.0, 1e-14).unwrap();
        let exact = C64::new(2f64.sin(), 1.0 - 2f64.cos());
        assert!((v - exact).norm() < 1e-13);
    }
}
