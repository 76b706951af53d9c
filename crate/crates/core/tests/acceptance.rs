//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::BigRational;
use rug::{Complex, Float};

use crosspoly::asym::AsymptoticModel;
use crosspoly::classic::{compose_cross, ReferenceFamily};
use crosspoly::direct::{to_c64, DirectContext, DirectSolution};
use crosspoly::geometry::{Builtin, CrossGeometry, WeightSpec};
use crosspoly::harness::{arc_masses, count_zeros, fit_decay, run_comparison, ComparisonConfig, ComparisonReport};
use crosspoly::identities::{run_identity_suite, suite_weights};
use crosspoly::surface::{compute_periods, eval_phi, Side, SurfacePoint};
use crosspoly::szego::SzegoData;
use crosspoly::C64;

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn run(id: u32, title: &str, limit_s: Option<f64>, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let res = f();
    let secs = t.elapsed().as_secs_f64();
    let (ok, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    let late = limit_s.is_some_and(|l| secs > l);
    let pass = ok && !late;
    println!(
        "criterion {id:>2} {}: {title} [{detail}] ({secs:.1} s{})",
        if pass { "PASS" } else { "FAIL" },
        if late { ", over the time limit" } else { "" }
    );
    pass
}

fn square() -> CrossGeometry {
    CrossGeometry::new(1.0, 1.0).unwrap()
}

fn builtin(g: CrossGeometry, b: Builtin) -> WeightSpec {
    WeightSpec::builtin(g, b).unwrap()
}

fn perturbed(g: CrossGeometry) -> WeightSpec {
    suite_weights(g).unwrap().remove(0)
}

fn to_float(r: &BigRational, prec: u32) -> Float {
    let q = rug::Rational::from_str_radix(&r.to_string(), 10).unwrap();
    Float::with_val(prec, q)
}

/// Coefficientwise relative error; zero reference entries are measured against the largest one.
fn coeff_error(sol: &DirectSolution, reference: &[BigRational]) -> f64 {
    if sol.coeffs.len() != reference.len() {
        return f64::INFINITY;
    }
    let prec = sol.prec;
    let refs: Vec<Float> = reference.iter().map(|r| to_float(r, prec)).collect();
    let scale = refs.iter().map(|r| r.clone().abs().to_f64()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for (c, r) in sol.coeffs.iter().zip(&refs) {
        let d = Complex::with_val(prec, c - r).abs().real().to_f64();
        let den = if r.is_zero() { scale } else { r.clone().abs().to_f64() };
        worst = worst.max(d / den);
    }
    worst
}

/// Exact families on the square cross for every index up to `nmax`.
fn exact_families(prec: u32, nmax: usize) -> Outcome {
    let g = square();
    let tol = 1e-20;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (b, fam) in [(Builtin::Chebyshev, ReferenceFamily::Chebyshev), (Builtin::Legendre, ReferenceFamily::Legendre)] {
        let mmax = (nmax / 2).min(8);
        let ctx = DirectContext::new(&builtin(g, b), 2 * mmax, prec).map_err(err)?;
        for m in 1..=mmax {
            let sol = ctx.solve(2 * m).map_err(err)?;
            let e = coeff_error(&sol, &compose_cross(fam, m, 2, false).map_err(err)?);
            if !(e <= tol) {
                return Ok((false, format!("{} Q_{}: error {e:.2e}", b.name(), 2 * m)));
            }
            worst = worst.max(e);
            checked += 1;
        }
    }
    let ctx = DirectContext::new(&builtin(g, Builtin::JacobiQuarter), nmax, prec).map_err(err)?;
    for n in 1..=nmax {
        let m = n / 4;
        let (reference, degree) = if n % 4 == 0 {
            (compose_cross(ReferenceFamily::JACOBI_FIRST, m, 4, false).map_err(err)?, n)
        } else {
            (compose_cross(ReferenceFamily::JACOBI_SECOND, m, 4, true).map_err(err)?, 4 * m + 1)
        };
        let sol = ctx.solve(n).map_err(err)?;
        if sol.effective_degree != degree {
            return Ok((false, format!("jacobi Q_{n}: degree {} instead of {degree}", sol.effective_degree)));
        }
        let e = coeff_error(&sol, &reference);
        if !(e <= tol) {
            return Ok((false, format!("jacobi Q_{n}: error {e:.2e}")));
        }
        worst = worst.max(e);
        checked += 1;
    }
    Ok((true, format!("{checked} polynomials at {prec} bits, n <= {nmax}, worst relative error {worst:.1e}")))
}

fn identity_suite() -> Outcome {
    let names = [
        "omtau12",
        "Phitheta",
        "Phi01",
        "z-theta",
        "moduli",
        "alpha-period",
        "theta-derivative",
        "ProdPhizk",
        "product-Psis-V",
        "T-ratio-V",
        "T-ratio1-V",
        "XnYn",
        "XnZn",
    ];
    let mut worst = 0.0f64;
    for (a, b) in [(1.0, 1.0), (1.0, 2.0), (2.0, 0.5)] {
        let rep = run_identity_suite(a, b).map_err(err)?;
        for name in names {
            if !rep.rows.iter().any(|r| r.name == name) {
                return Ok((false, format!("identity {name} missing at ({a}, {b})")));
            }
        }
        if let Some(r) = rep.rows.iter().find(|r| !(r.residual < 1e-8)) {
            return Ok((false, format!("{} ({}) at ({a}, {b}): {:.2e}", r.name, r.weight, r.residual)));
        }
        worst = worst.max(rep.max_residual);
    }
    Ok((true, format!("13 identities at 3 geometries, max residual {worst:.1e}")))
}

fn log_slope(mut f: impl FnMut(f64) -> f64, radii: &[f64]) -> f64 {
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = radii.iter().map(|r| f(*r).ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn szego_contracts() -> Outcome {
    let g = CrossGeometry::new(1.0, 1.5).unwrap();
    let ctx = compute_periods(&g).map_err(err)?;
    let mut specs: Vec<WeightSpec> =
        [Builtin::Chebyshev, Builtin::Legendre, Builtin::JacobiQuarter].iter().map(|b| builtin(g, *b)).collect();
    specs.push(perturbed(g));
    let (mut jump, mut recip, mut slope_gap) = (0.0f64, 0.0f64, 0.0f64);
    for spec in &specs {
        let s = SzegoData::new(spec, &ctx).map_err(err)?;
        for arc in 1..=4 {
            for t in [0.2, 0.5, 0.8] {
                let sp = s.eval_s(&SurfacePoint::Trace { arc, t, side: Side::Plus }).map_err(err)?;
                let sm = s.eval_s(&SurfacePoint::Trace { arc, t, side: Side::Minus }).map_err(err)?;
                let rw = spec.rho_on_arc(arc, t) * g.w_plus_on_arc(arc, t);
                jump = jump.max((sp * sm * rw - 1.0).norm());
            }
        }
        for u in [0.2, 0.6] {
            let zp = g.alpha_path(u);
            let inner = s.eval_s(&SurfacePoint::sheet0(zp * (1.0 - 1e-10))).map_err(err)?;
            let outer = s.eval_s(&SurfacePoint::sheet0(zp * (1.0 + 1e-10))).map_err(err)?;
            jump = jump.max((inner / outer - (2.0 * PI * C64::i() * s.c_rho).exp()).norm());
        }
        for z in [C64::new(0.7, 0.9), C64::new(-2.0, 0.3), C64::new(0.1, -1.7)] {
            let a = s.eval_s(&SurfacePoint::sheet0(z)).map_err(err)?;
            let b = s.eval_s(&SurfacePoint::sheet1(z)).map_err(err)?;
            recip = recip.max((a * b - 1.0).norm());
        }
        let radii = [1e-3, 1e-4, 1e-5, 1e-6];
        let modulus = |c: C64, d: C64| {
            let s = &s;
            move |r: f64| s.eval_s(&SurfacePoint::sheet0(c + d * r)).map(|v| v.norm()).unwrap_or(f64::NAN)
        };
        for i in 1..=4 {
            let ai = g.endpoint(i);
            let dir = ai / ai.norm() * C64::from_polar(1.0, 0.7);
            let want = -(2.0 * spec.alpha(i) + 1.0) / 4.0;
            slope_gap = slope_gap.max((log_slope(modulus(ai, dir), &radii) - want).abs());
        }
        for j in 0..4 {
            let dir = C64::from_polar(1.0, PI / 4.0 + j as f64 * PI / 2.0);
            let want = if j % 2 == 1 { spec.nu.re } else { -spec.nu.re };
            slope_gap = slope_gap.max((log_slope(modulus(C64::new(0.0, 0.0), dir), &radii) - want).abs());
        }
    }
    let pass = jump < 1e-7 && recip < 1e-10 && slope_gap < 0.05;
    Ok((pass, format!("jump {jump:.1e}, reciprocity {recip:.1e}, worst exponent gap {slope_gap:.3}")))
}

fn phi_contracts() -> Outcome {
    let (mut at_origin, mut capacity, mut unimodular) = (0.0f64, 0.0f64, 0.0f64);
    for (a, b) in [(1.0, 1.0), (1.0, 2.0), (2.0, 0.5)] {
        let g = CrossGeometry::new(a, b).unwrap();
        let p0 = eval_phi(&g, &SurfacePoint::Origin { star: false }).map_err(err)?;
        at_origin = at_origin.max((p0 - C64::from_polar(1.0, (a / b).atan())).norm());
        let want = -(a * a + b * b).sqrt() / 2.0;
        for arg in [0.3, 2.0, -1.2] {
            let z = C64::from_polar(1e6, arg);
            let v = z / eval_phi(&g, &SurfacePoint::sheet0(z)).map_err(err)?;
            capacity = capacity.max((v - want).norm());
        }
        for arc in 1..=4 {
            for k in 1..10 {
                let t = k as f64 / 10.0;
                for side in [Side::Plus, Side::Minus] {
                    let v = eval_phi(&g, &SurfacePoint::Trace { arc, t, side }).map_err(err)?;
                    unimodular = unimodular.max((v.norm() - 1.0).abs());
                }
            }
        }
    }
    let pass = at_origin < 1e-10 && capacity < 1e-10 && unimodular < 1e-8;
    Ok((pass, format!("origin {at_origin:.1e}, capacity {capacity:.1e}, trace modulus {unimodular:.1e}")))
}

fn comparison(spec: &WeightSpec, n: &[usize], prec: u32) -> Result<ComparisonReport, String> {
    let cfg = ComparisonConfig { precisions: vec![prec], ..ComparisonConfig::new(n.to_vec()) };
    run_comparison(spec, &cfg).map(|r| r.0).map_err(err)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strong_asymptotics(prec: u32) -> Outcome {
    let g = square();
    let ns = [4, 8, 12, 16];
    let mut notes = Vec::new();
    let cheb = comparison(&builtin(g, Builtin::Chebyshev), &ns, prec)?;
    let ce: Vec<f64> = cheb.records.iter().map(|r| r.sup_error[0]).collect();
    if !strictly_decreasing(&ce) {
        return Ok((false, format!("chebyshev errors {ce:.3?} not decreasing")));
    }
    notes.push(format!("chebyshev {:.3?}", ce));
    let leg = comparison(&builtin(g, Builtin::Legendre), &ns, prec)?;
    let le: Vec<f64> = leg.records.iter().map(|r| r.sup_error[0]).collect();
    let fit = leg.fit("order0").ok_or("no legendre fit")?;
    if !strictly_decreasing(&le) || fit.exponent < 0.4 {
        return Ok((false, format!("legendre errors {le:.3?}, exponent {:.3}", fit.exponent)));
    }
    notes.push(format!("legendre {le:.3?} exponent {:.2}", fit.exponent));

    // Jacobi-1/4: the order-0 term differs from Q_n by the non-decaying L correction;
    // the band is that correction's size widened by the order-1 error
    let spec = builtin(g, Builtin::JacobiQuarter);
    let jn = [8, 9, 12, 13];
    let jac = comparison(&spec, &jn, prec)?;
    for r in &jac.records {
        let gap = r.order_gap.ok_or("order-1 predictions missing")?;
        let (e0, e1) = (r.sup_error[0], r.sup_error[1]);
        let band = e1 * (1.0 + gap) + 1e-12;
        if !((e0 - gap).abs() <= band && e1 < 0.15) {
            return Ok((false, format!("jacobi n={}: order-0 {e0:.3} outside {gap:.3} ± {band:.3}", r.n)));
        }
    }
    for parity in 0..2 {
        let (n, e): (Vec<usize>, Vec<f64>) =
            jac.records.iter().filter(|r| r.n % 2 == parity).map(|r| (r.n, r.sup_error[1])).unzip();
        let f = fit_decay("jacobi", &n, &e).ok_or("jacobi fit failed")?;
        if f.exponent <= 0.0 {
            return Ok((false, format!("jacobi parity {parity}: order-1 errors {e:.3?} do not decay")));
        }
    }
    // parity-distinct leading terms: T_1/T_0 is far from constant on the grid
    let model = AsymptoticModel::new(&spec).map_err(err)?;
    let ratios: Vec<C64> = jac.grid.interior(&g).iter().map(|z| {
        let v = model.point_values(*z).expect("grid point");
        v[0].t[1] / v[0].t[0]
    }).collect();
    let mean = ratios.iter().sum::<C64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r / mean - 1.0).norm()).fold(0.0, f64::max);
    if spread < 0.1 {
        return Ok((false, format!("T_1/T_0 spread {spread:.3} too small to distinguish parities")));
    }
    let o0: Vec<String> = jac.records.iter().map(|r| format!("{}:{:.2}/{:.2}", r.n, r.sup_error[0], r.sup_error[1])).collect();
    notes.push(format!("jacobi order0/order1 {}; T1/T0 spread {spread:.2}", o0.join(" ")));
    Ok((true, notes.join("; ")))
}

fn remainder_asymptotics(prec: u32) -> Outcome {
    let g = square();
    let mut notes = Vec::new();
    for b in [Builtin::Chebyshev, Builtin::Legendre] {
        let rep = comparison(&builtin(g, b), &[12], prec)?;
        let e = rep.records[0].remainder_error[1];
        if !(e < 0.1) {
            return Ok((false, format!("{} n=12: {e:.3}", b.name())));
        }
        notes.push(format!("{} {e:.2e}", b.name()));
    }
    Ok((true, notes.join(", ")))
}

fn index_filter() -> Outcome {
    let g = square();
    let eps = 0.1;
    let even: Vec<usize> = (1..=40).filter(|n| n % 2 == 0).collect();
    let quarter: Vec<usize> = (1..=40).filter(|n| n % 4 <= 1).collect();
    for (b, want) in [(Builtin::Chebyshev, &even), (Builtin::Legendre, &even), (Builtin::JacobiQuarter, &quarter)] {
        let got = AsymptoticModel::new(&builtin(g, b)).map_err(err)?.allowable_indices(eps, 40).map_err(err)?;
        if &got != want {
            return Ok((false, format!("{}: {got:?}", b.name())));
        }
    }
    Ok((true, "2N for chebyshev and legendre, {4k, 4k+1} for jacobi-1/4, n <= 40".into()))
}

fn zero_distribution() -> Outcome {
    let g = square();
    let masses = arc_masses(&g).map_err(err)?;
    if masses.iter().any(|m| (m - 0.25).abs() > 1e-10) {
        return Ok((false, format!("masses {masses:?}")));
    }
    let n = 32;
    let ctx = DirectContext::new(&builtin(g, Builtin::Chebyshev), n, 256).map_err(err)?;
    let zeros = ctx.solve(n).map_err(err)?.zeros().map_err(err)?;
    let c = count_zeros(&g, &zeros, &masses, n);
    let pass = c.arcs.iter().zip(&c.expected).all(|(k, e)| (*k as f64 - e).abs() <= 2.0);
    Ok((pass, format!("counts {:?} vs {:?}", c.arcs, c.expected)))
}

fn pade_structure(prec: u32) -> Outcome {
    // generic class so that no index is degenerate
    let spec = perturbed(square());
    let ctx = DirectContext::new(&spec, 10, prec).map_err(err)?;
    let dir = C64::from_polar(1.0, 0.3);
    let radii: Vec<f64> = (0..7).map(|k| 8.0 * 2f64.powf(k as f64 / 2.0)).collect();
    let mut worst = 0.0f64;
    let mut agree = 0.0f64;
    for n in 1..=10 {
        let sol = ctx.solve(n).map_err(err)?;
        if sol.effective_degree != n {
            return Ok((false, format!("Q_{n} degenerates to degree {}", sol.effective_degree)));
        }
        let mut bad = None;
        let s = log_slope(
            |r| match ctx.pade_error(&sol, dir * r) {
                Ok(v) => to_c64(&v).norm(),
                Err(e) => {
                    bad = Some(e.to_string());
                    f64::NAN
                }
            },
            &radii,
        );
        if let Some(e) = bad {
            return Err(e);
        }
        let gap = (s + (2 * n + 1) as f64).abs();
        if !(gap <= 0.2) {
            return Ok((false, format!("n={n}: slope {s:.3}")));
        }
        worst = worst.max(gap);
        // the same error by direct subtraction at |z| = 8
        let z = dir * 8.0;
        let by_r = to_c64(&ctx.pade_error(&sol, z).map_err(err)?);
        let by_sub = to_c64(&ctx.pade_difference(&sol, z).map_err(err)?);
        agree = agree.max((by_sub / by_r - 1.0).norm());
    }
    let pass = agree < 1e-6;
    Ok((pass, format!("n = 1..10 at {prec} bits, worst slope gap {worst:.3}, R/Q vs subtraction {agree:.1e}")))
}

fn robustness() -> Outcome {
    let mut notes = Vec::new();
    for (name, out) in [
        ("exact families", exact_families(128, 16)),
        ("strong asymptotics", strong_asymptotics(128)),
        ("remainder", remainder_asymptotics(128)),
        ("pade", pade_structure(128)),
    ] {
        match out {
            Ok((true, _)) => notes.push(format!("{name} ok")),
            Ok((false, d)) => return Ok((false, format!("{name} at 128 bits: {d}"))),
            Err(e) => return Ok((false, format!("{name} at 128 bits: {e}"))),
        }
    }
    // at 64 bits every index up to 40 is either exact to 1e-6 or refused as a precision failure
    let g = square();
    let ctx = DirectContext::new(&builtin(g, Builtin::Chebyshev), 40, 64).map_err(err)?;
    let mut refused = Vec::new();
    for n in 1..=40 {
        match ctx.solve(n) {
            Ok(sol) => {
                let m = n / 2;
                let e = coeff_error(&sol, &compose_cross(ReferenceFamily::Chebyshev, m, 2, false).map_err(err)?);
                if !(e < 1e-6) {
                    return Ok((false, format!("64 bits, n={n}: accepted with error {e:.2e}")));
                }
            }
            Err(e) if e.is_precision() => refused.push(n),
            Err(e) => return Ok((false, format!("64 bits, n={n}: {e}"))),
        }
    }
    if !refused.contains(&40) {
        return Ok((false, "n=40 at 64 bits was not refused".into()));
    }
    notes.push(format!("64 bits refuses {} of n = 1..=40, first at n = {}", refused.len(), refused[0]));
    Ok((true, notes.join(", ")))
}

fn main() {
    let mut all = true;
    all &= run(1, "exact families", Some(60.0), || exact_families(256, 35));
    all &= run(2, "identity suite", Some(120.0), identity_suite);
    all &= run(3, "Szego contracts", Some(120.0), szego_contracts);
    all &= run(4, "Phi contracts", None, phi_contracts);
    all &= run(5, "strong asymptotics", Some(600.0), || strong_asymptotics(256));
    all &= run(6, "remainder asymptotics", None, || remainder_asymptotics(256));
    all &= run(7, "index filter", None, index_filter);
    all &= run(8, "zero distribution", None, zero_distribution);
    all &= run(9, "Pade structure", None, || pade_structure(256));
    all &= run(10, "robustness", None, robustness);
    if !all {
        std::process::exit(1);
    }
}
