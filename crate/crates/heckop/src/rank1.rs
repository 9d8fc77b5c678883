//! Rank-one oracle through the Gauss hypergeometric function.
//!
//! With `ρ = m_s/2 + m_l` the rank-one radial operator
//! `∂² + (m_s coth x + 2 m_l coth 2x) ∂` becomes the Gauss equation in
//! `u = -sinh²x`, so that
//!
//! `F(λ, m; exp x) = ₂F₁((ρ+λ)/2, (ρ-λ)/2; (m_s+m_l+1)/2; -sinh² x)`.
//!
//! On the torus (`x = iy`) the variable is `u = sin² y ∈ [0, 1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::Multiplicity;
use crate::special::nonpositive_integer;

const SERIES_RADIUS: f64 = 0.8;
const MAX_TERMS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl GaussParams {
    pub const MAPPING: &'static str =
        "a=(rho+lambda)/2, b=(rho-lambda)/2, c=(m_s+m_l+1)/2, u=-sinh^2(z), rho=m_s/2+m_l";

    pub fn from_spectral(m: &Multiplicity, lambda: Complex64) -> Self {
        let rho = 0.5 * m.short + m.long;
        GaussParams {
            a: (rho + lambda) * 0.5,
            b: (rho - lambda) * 0.5,
            c: Complex64::new(0.5 * (m.short + m.long + 1.0), 0.0),
        }
    }
}

fn small(x: Complex64, scale: f64) -> bool {
    x.norm() <= 1e-17 * scale
}

/// Power series with its termwise derivative. Returns `(w, w')`.
fn series(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let num = (a + kf) * (b + kf);
        if num == Complex64::new(0.0, 0.0) {
            return Ok((sum, dsum));
        }
        let den = (c + kf) * (kf + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::Pole(format!("2F1 lower parameter c = {c} hits a pole")));
        }
        // derivative term for z^{k} uses the coefficient of z^{k+1}
        let coef = term * num / den;
        dsum += coef * (kf + 1.0);
        term = coef * z;
        sum += term;
        if small(term, sum.norm()) && small(coef * (kf + 1.0), dsum.norm()) {
            quiet += 1;
            if quiet >= 3 && k > 4 {
                return Ok((sum, dsum));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence { max_height: MAX_TERMS, last_block: term.norm() })
}

fn terminating_degree(a: Complex64, b: Complex64) -> Option<u64> {
    match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// Taylor-series continuation of the Gauss equation along the ray to `z`,
/// starting from `|s0| = 0.5` where the power series is used.
fn continue_along_ray(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let mut p = z * (0.5 / z.norm());
    let (mut w, mut dw) = series(a, b, c, p)?;
    let ab = a * b;
    let apb1 = a + b + 1.0;
    for _ in 0..10_000 {
        let remaining = z - p;
        let dist = remaining.norm();
        if dist == 0.0 {
            return Ok(w);
        }
        let radius = p.norm().min((Complex64::new(1.0, 0.0) - p).norm());
        let h = if dist <= 0.5 * radius { remaining } else { remaining * (0.5 * radius / dist) };
        // z(1-z) w'' + (c - (a+b+1) z) w' - ab w = 0, expanded at p in s = z - p.
        let p0 = p * (1.0 - p);
        let p1 = 1.0 - 2.0 * p;
        let q0 = c - apb1 * p;
        let (mut wk, mut wk1) = (w, dw);
        let mut val = w + dw * h;
        let mut dval = dw;
        let mut hk = h; // h^{k+1} for the current k
        let mut quiet = 0;
        for k in 0..5_000usize {
            let kf = k as f64;
            let wk2 = -((p1 * kf + q0) * (kf + 1.0) * wk1 + (-kf * (kf - 1.0) - apb1 * kf - ab) * wk)
                / (p0 * ((kf + 2.0) * (kf + 1.0)));
            let t = wk2 * hk * h;
            let dt = wk2 * (kf + 2.0) * hk;
            val += t;
            dval += dt;
            if small(t, val.norm()) && small(dt, dval.norm()) {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            wk = wk1;
            wk1 = wk2;
            hk *= h;
        }
        w = val;
        dw = dval;
        p += h;
    }
    Err(Error::NoConvergence { max_height: 10_000, last_block: f64::NAN })
}

/// Gauss hypergeometric function on the cut plane `C \ [1, ∞)`.
///
/// Power series for `|z| ≤ 0.8`, the Pfaff transformation where
/// `|z/(z-1)| ≤ 0.8`, otherwise analytic continuation of the Gauss equation
/// by Taylor steps along the ray from the origin. The continuation has no
/// special cases for integer parameter differences.
pub fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    if let Some(n) = terminating_degree(a, b) {
        if let Some(mc) = nonpositive_integer(c) {
            if mc < n {
                return Err(Error::Pole(format!("2F1 with c = {c} below the degree {n}")));
            }
        }
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 0..n {
            let kf = k as f64;
            term = term * (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
            sum += term;
        }
        return Ok(sum);
    }
    if nonpositive_integer(c).is_some() {
        return Err(Error::Pole(format!("2F1 lower parameter c = {c} is a nonpositive integer")));
    }
    if z.norm() <= SERIES_RADIUS {
        return Ok(series(a, b, c, z)?.0);
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::Domain(format!("2F1 argument {z} lies on the branch cut")));
    }
    let w = z / (z - 1.0);
    if w.norm() <= SERIES_RADIUS {
        let pref = (1.0 - z).powc(-a);
        return Ok(pref * series(a, c - b, c, w)?.0);
    }
    continue_along_ray(a, b, c, z)
}

/// Rank-one `F(λ, m; exp Z)` for `Z = x + iy` with `|y| < π/2`.
pub fn f_rank1(m: &Multiplicity, lambda: Complex64, z: Complex64) -> Result<Complex64> {
    if z.im.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Domain(format!("|Im Z| = {} must be below π/2", z.im.abs())));
    }
    let g = GaussParams::from_spectral(m, lambda);
    let s = z.sinh();
    gauss_2f1(g.a, g.b, g.c, -(s * s))
}

/// Torus values `F(λ, m; exp(iy))` through `u = sin² y`.
pub fn f_rank1_torus(m: &Multiplicity, lambda: Complex64, y: f64) -> Result<Complex64> {
    let g = GaussParams::from_spectral(m, lambda);
    let s = y.sin();
    let u = Complex64::new(s * s, 0.0);
    if u.re >= 1.0 {
        return Err(Error::Domain(format!("torus wall at y = {y}")));
    }
    gauss_2f1(g.a, g.b, g.c, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn closed_forms() {
        assert_eq!(gauss_2f1(c(0.3, 1.0), c(2.0, 0.0), c(1.5, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let v = gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((v.re - 2.0f64.ln() / 0.5).abs() < 1e-14);
        // -log(1-z)/z far from the origin and on both sides of the cut.
        for z in [c(-5.0, 0.0), c(0.9, 0.3), c(3.0, 0.5), c(3.0, -0.5), c(0.5, 0.9), c(-40.0, 7.0)] {
            let v = gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
            let e = -(1.0 - z).ln() / z;
            assert!(rel(v, e) < 1e-12, "z={z} {v} {e}");
        }
        // (1-z)^{-a}
        for z in [c(0.95, 0.2), c(-3.0, 2.0), c(0.5, 0.866)] {
            let a = c(0.7, -1.3);
            let v = gauss_2f1(a, c(2.5, 0.0), c(2.5, 0.0), z).unwrap();
            assert!(rel(v, (1.0 - z).powc(-a)) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn arcsin_form() {
        // 2F1(1/2,1/2;3/2;z²) = asin(z)/z
        for x in [0.3, 0.85, 0.97, 0.999] {
            let v = gauss_2f1(c(0.5, 0.0), c(0.5, 0.0), c(1.5, 0.0), c(x * x, 0.0)).unwrap();
            assert!((v.re - x.asin() / x).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn series_and_continuation_agree_at_07() {
        let (a, b, cc) = (c(0.4, 1.1), c(-1.3, 0.2), c(2.2, -0.5));
        let z = c(0.7, 0.0);
        let direct = series(a, b, cc, z).unwrap().0;
        let cont = continue_along_ray(a, b, cc, z).unwrap();
        assert!(rel(direct, cont) < 1e-12);
        // independent check through the 1-z connection formula
        let lhs = direct;
        let g = |x: Complex64| gamma(x);
        let one = c(1.0, 0.0);
        let t1 = g(cc) * g(cc - a - b) / (g(cc - a) * g(cc - b)) * series(a, b, a + b - cc + 1.0, one - z).unwrap().0;
        let t2 = (one - z).powc(cc - a - b) * g(cc) * g(a + b - cc) / (g(a) * g(b))
            * series(cc - a, cc - b, cc - a - b + 1.0, one - z).unwrap().0;
        assert!(rel(lhs, t1 + t2) < 1e-11);
    }

    #[test]
    fn degenerate_parameters_via_continuation() {
        // c - a - b = 0: 2F1(1/2,1/2;1;z) = 2K(√z)/π. Compare against the AGM.
        for z in [0.85, 0.95, 0.999] {
            let v = gauss_2f1(c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(z, 0.0)).unwrap();
            let (mut x, mut y) = (1.0f64, (1.0 - z).sqrt());
            for _ in 0..40 {
                let nx = 0.5 * (x + y);
                y = (x * y).sqrt();
                x = nx;
            }
            assert!((v.re - 1.0 / x).abs() < 1e-11, "z={z}");
        }
    }

    #[test]
    fn terminating_and_poles() {
        let v = gauss_2f1(c(-2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0), c(5.0, 1.0)).unwrap();
        let z = c(5.0, 1.0);
        let e = 1.0 - 6.0 * z + 6.0 * z * z;
        assert!(rel(v, e) < 1e-14);
        assert!(gauss_2f1(c(-1.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0), c(0.3, 0.0)).is_ok());
        assert!(gauss_2f1(c(0.5, 0.0), c(1.0, 0.0), c(-2.0, 0.0), c(0.3, 0.0)).is_err());
        assert!(gauss_2f1(c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn rank1_identity_and_symmetry() {
        let m = Multiplicity::new(2.0, 0.0, 1.0);
        for lam in [c(0.3, 2.0), c(-4.0, 0.5), c(7.0, 0.0)] {
            assert_eq!(f_rank1(&m, lam, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
            for z in [c(0.4, 0.3), c(1.7, -1.2), c(0.0, 1.3)] {
                let a = f_rank1(&m, lam, z).unwrap();
                let b = f_rank1(&m, -lam, z).unwrap();
                assert!(rel(a, b) < 1e-12);
            }
        }
    }

    #[test]
    fn rank1_degenerate_closed_form() {
        // m = 0: F = cosh(λx)
        let m = Multiplicity::ZERO;
        for (lam, z) in [(c(2.0, 0.0), c(0.5, 0.0)), (c(0.7, -1.0), c(1.2, 0.9))] {
            let v = f_rank1(&m, lam, z).unwrap();
            assert!(rel(v, (lam * z).cosh()) < 1e-11, "{lam} {z}");
        }
    }

    #[test]
    fn rank1_sphere_zonal() {
        // m = (0,·,1): on the 2-sphere the zonal functions are Legendre
        // polynomials in cos 2y at λ = 2k + 1.
        let m = Multiplicity::new(0.0, 0.0, 1.0);
        for y in [0.2, 0.9, 1.5] {
            let x = (2.0f64 * y).cos();
            let p2 = 0.5 * (3.0 * x * x - 1.0);
            let v = f_rank1_torus(&m, c(5.0, 0.0), y).unwrap();
            assert!((v.re - p2).abs() < 1e-13);
        }
    }
}
