//! Exact reference families: monic Chebyshev and Legendre polynomials on
//! `[−1,1]` and monic Jacobi polynomials on `[0,1]`, with their substitutions
//! into cross polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceFamily {
    Chebyshev,
    Legendre,
    /// Weight `x^{p/q}(1−x)^{r/s}` on `[0,1]`, exponents stored as `(num, den)`.
    Jacobi01 { a_exp: (i64, i64), b_exp: (i64, i64) },
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ReferenceFamily {
    /// Weight `x^{−3/4}(1−x)^{−1/4}`.
    pub const JACOBI_FIRST: Self = Self::Jacobi01 { a_exp: (-3, 4), b_exp: (-1, 4) };
    /// Weight `x^{1/4}(1−x)^{−1/4}`.
    pub const JACOBI_SECOND: Self = Self::Jacobi01 { a_exp: (1, 4), b_exp: (-1, 4) };

    /// Standard Jacobi parameters `(α, β)` of the weight `(1−y)^α(1+y)^β` on `[−1,1]`.
    fn jacobi_params(&self) -> (BigRational, BigRational) {
        match *self {
            Self::Chebyshev => (rat(-1, 2), rat(-1, 2)),
            Self::Legendre => (rat(0, 1), rat(0, 1)),
            Self::Jacobi01 { a_exp, b_exp } => (rat(b_exp.0, b_exp.1), rat(a_exp.0, a_exp.1)),
        }
    }

    /// Monic recurrence coefficients `(α_k, β_k)`, `k = 0..m`, on the family's interval.
    pub fn recurrence(&self, m: usize) -> (Vec<BigRational>, Vec<BigRational>) {
        let (al, be) = self.jacobi_params();
        let one = BigRational::one();
        let two = rat(2, 1);
        let four = rat(4, 1);
        let s = &al + &be;
        let mut alpha = Vec::with_capacity(m + 1);
        let mut beta = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let kk = rat(k as i64, 1);
            let t = &two * &kk + &s;
            let a_k = if k == 0 {
                (&be - &al) / (&s + &two)
            } else {
                (&be * &be - &al * &al) / (&t * (&t + &two))
            };
            let b_k = match k {
                0 => BigRational::zero(),
                1 => &four * (&one + &al) * (&one + &be) / ((&two + &s) * (&two + &s) * (&s + rat(3, 1))),
                _ => {
                    &four * &kk * (&kk + &al) * (&kk + &be) * (&kk + &s)
                        / (&t * &t * (&t + &one) * (&t - &one))
                }
            };
            alpha.push(a_k);
            beta.push(b_k);
        }
        if matches!(self, Self::Jacobi01 { .. }) {
            // y = 2x − 1
            let half = rat(1, 2);
            let quarter = rat(1, 4);
            alpha = alpha.into_iter().map(|a| (a + &one) * &half).collect();
            beta = beta.into_iter().map(|b| b * &quarter).collect();
        }
        (alpha, beta)
    }

    /// Moments `∫ x^k dμ / ∫ dμ`, `k = 0..=kmax`, as exact rationals.
    pub fn normalized_moments(&self, kmax: usize) -> Vec<BigRational> {
        match *self {
            Self::Chebyshev | Self::Legendre => {
                let mut out = Vec::with_capacity(kmax + 1);
                let mut even = BigRational::one();
                for k in 0..=kmax {
                    if k % 2 == 1 {
                        out.push(BigRational::zero());
                        continue;
                    }
                    if k > 0 {
                        let j = (k - 1) as i64;
                        even = match self {
                            // m_k/m_{k−2} = (k−1)/k and (k−1)/(k+1)
                            Self::Chebyshev => even * rat(j, j + 1),
                            _ => even * rat(j, j + 2),
                        };
                    }
                    out.push(even.clone());
                }
                out
            }
            Self::Jacobi01 { a_exp, b_exp } => {
                // B(a+k+1, b+1)/B(a+1, b+1) = Π_{j<k} (a+1+j)/(a+b+2+j)
                let a = rat(a_exp.0, a_exp.1);
                let b = rat(b_exp.0, b_exp.1);
                let mut out = vec![BigRational::one()];
                for j in 0..kmax {
                    let jj = rat(j as i64, 1);
                    let next = out[j].clone() * (&a + rat(1, 1) + &jj) / (&a + &b + rat(2, 1) + &jj);
                    out.push(next);
                }
                out
            }
        }
    }
}

/// Ascending monic coefficients of the `m`-th polynomial of the family.
pub fn reference_poly(family: ReferenceFamily, m: usize) -> Vec<BigRational> {
    let (alpha, beta) = family.recurrence(m);
    let mut prev: Vec<BigRational> = vec![];
    let mut cur = vec![BigRational::one()];
    for k in 0..m {
        // p_{k+1} = (x − α_k) p_k − β_k p_{k−1}
        let mut next = vec![BigRational::zero(); k + 2];
        for (j, c) in cur.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= &alpha[k] * c;
        }
        for (j, c) in prev.iter().enumerate() {
            next[j] -= &beta[k] * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Substitutes `x ↦ z^power` and optionally multiplies by `z`.
pub fn compose_cross(family: ReferenceFamily, m: usize, power: usize, times_z: bool) -> Result<Vec<BigRational>> {
    let consistent = match family {
        ReferenceFamily::Chebyshev | ReferenceFamily::Legendre => power == 2 && !times_z,
        ReferenceFamily::Jacobi01 { .. } => power == 4,
    };
    if !consistent {
        return Err(Error::Config(format!("{family:?} does not compose with power {power}, times_z = {times_z}")));
    }
    let p = reference_poly(family, m);
    let shift = usize::from(times_z);
    let mut out = vec![BigRational::zero(); power * m + 1 + shift];
    for (j, c) in p.into_iter().enumerate() {
        out[power * j + shift] = c;
    }
    Ok(out)
}

pub fn to_f64(c: &[BigRational]) -> Vec<f64> {
    c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Orthogonality residuals `Σ_j c_j m_{j+i}` for `i < deg`, computed exactly.
pub fn orthogonality_residuals(family: ReferenceFamily, coeffs: &[BigRational]) -> Vec<BigRational> {
    let deg = coeffs.len() - 1;
    let mom = family.normalized_moments(2 * deg);
    (0..deg)
        .map(|i| coeffs.iter().enumerate().fold(BigRational::zero(), |acc, (j, c)| acc + c * &mom[i + j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(c: &[BigRational]) -> Vec<f64> {
        to_f64(c)
    }

    #[test]
    fn low_degree_examples() {
        assert_eq!(f(&reference_poly(ReferenceFamily::Chebyshev, 2)), vec![-0.5, 0.0, 1.0]);
        let l2 = reference_poly(ReferenceFamily::Legendre, 2);
        assert_eq!(l2[0], rat(-1, 3));
        assert_eq!(reference_poly(ReferenceFamily::JACOBI_FIRST, 1), vec![rat(-1, 4), rat(1, 1)]);
        let cross = compose_cross(ReferenceFamily::Chebyshev, 2, 2, false).unwrap();
        assert_eq!(f(&cross), vec![-0.5, 0.0, 0.0, 0.0, 1.0]);
        let cross = compose_cross(ReferenceFamily::JACOBI_FIRST, 1, 4, false).unwrap();
        assert_eq!(f(&cross), vec![-0.25, 0.0, 0.0, 0.0, 1.0]);
        let second = compose_cross(ReferenceFamily::JACOBI_SECOND, 1, 4, true).unwrap();
        let mom = ReferenceFamily::JACOBI_SECOND.normalized_moments(1);
        assert_eq!(second[1], -mom[1].clone());
        assert_eq!(second.len(), 6);
        assert!(compose_cross(ReferenceFamily::Legendre, 2, 4, false).is_err());
    }

    #[test]
    fn chebyshev_matches_closed_form() {
        // 2^{m−1} monic T_m(x) = T_m(x), compare values at a few points
        for m in 1..10usize {
            let p = f(&reference_poly(ReferenceFamily::Chebyshev, m));
            for x in [-0.9, -0.3, 0.2, 0.77] {
                let v: f64 = p.iter().rev().fold(0.0, |acc, c| acc * x + c);
                let t = (m as f64 * f64::acos(x)).cos() / 2f64.powi(m as i32 - 1);
                assert!((v - t).abs() < 1e-13, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn orthogonal_exactly() {
        for fam in [
            ReferenceFamily::Chebyshev,
            ReferenceFamily::Legendre,
            ReferenceFamily::JACOBI_FIRST,
            ReferenceFamily::JACOBI_SECOND,
        ] {
            for m in 1..=12 {
                let p = reference_poly(fam, m);
                assert_eq!(p.len(), m + 1);
                assert!(p[m].is_one());
                assert!(orthogonality_residuals(fam, &p).iter().all(|r| r.is_zero()), "{fam:?} m={m}");
            }
            let (_, beta) = fam.recurrence(12);
            assert!(beta[1..].iter().all(|b| *b > BigRational::zero()));
        }
    }

    #[test]
    fn orthogonal_against_float_quadrature() {
        // Gauss–Kronrod on the substituted integrals as an independent check
        use crate::quad::gauss_kronrod;
        use num_complex::Complex64 as C64;
        let p = f(&reference_poly(ReferenceFamily::Legendre, 8));
        for k in 0..8 {
            let v = gauss_kronrod(
                |x| C64::new(1.0 + x.powi(k) * p.iter().rev().fold(0.0, |acc, c| acc * x + c), 0.0),
                -1.0,
                1.0,
                1e-14,
            )
            .unwrap();
            assert!((v - 2.0).norm() < 1e-12);
        }
    }
}
