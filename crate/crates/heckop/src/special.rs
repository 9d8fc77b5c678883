//! Complex Gamma function (Lanczos, g = 7) with reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

const G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance below which an argument is treated as sitting on a pole of Γ.
pub const POLE_TOL: f64 = 1e-12;

/// Returns `k` when `z` is within [`POLE_TOL`] of the nonpositive integer `-k`.
pub fn nonpositive_integer(z: Complex64) -> Option<u64> {
    let r = z.re.round();
    if r <= 0.0 && (z.re - r).abs() <= POLE_TOL && z.im.abs() <= POLE_TOL {
        Some((-r) as u64)
    } else {
        None
    }
}

/// `log(sin(πz))` on some branch, without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 10.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (e^{iπz} - e^{-iπz}) / 2i; factor out the dominant exponential.
    if z.im > 0.0 {
        -i * PI * z + ((i * 2.0 * PI * z).exp() - 1.0).ln() - (2.0 * i).ln()
    } else {
        i * PI * z + (1.0 - (-i * 2.0 * PI * z).exp()).ln() - (2.0 * i).ln()
    }
}

/// `log Γ(z)` on some branch; only `exp` of the result is meaningful.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let ln_pi = Complex64::new(PI.ln(), 0.0);
        return ln_pi - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Γ(z); infinite at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    if nonpositive_integer(z).is_some() {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    ln_gamma(z).exp()
}

/// 1/Γ(z), entire; exactly zero at nonpositive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if nonpositive_integer(z).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    (-ln_gamma(z)).exp()
}

pub(crate) fn factorial(k: u64) -> f64 {
    (1..=k).map(|j| j as f64).product()
}
