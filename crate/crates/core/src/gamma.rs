//! Complex gamma function (Lanczos, g = 7).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(z)` for complex `z`, with reflection for `Re z < 1/2`.
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return C64::new(PI, 0.0) / (s * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = C64::new(COEF[0], 0.0);
    for (k, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + G + 0.5;
    x * (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((gamma(C64::new(5.0, 0.0)) - 24.0).norm() < 1e-11);
        assert!((gamma(C64::new(0.5, 0.0)) - PI.sqrt()).norm() < 1e-13);
        assert!((gamma(C64::new(0.25, 0.0)) - 3.625_609_908_221_908).norm() < 1e-12);
        assert!((gamma(C64::new(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn recurrence() {
        let z = C64::new(0.3, 1.7);
        let r = gamma(z + 1.0) / (gamma(z) * z);
        assert!((r - 1.0).norm() < 1e-13);
    }
}
