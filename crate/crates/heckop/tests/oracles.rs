//! Independent oracles for the series, the c-function and the transform.

use std::f64::consts::PI;
use std::sync::Arc;

use heckop::catalog::lookup;
use heckop::hypergeom::{c_normalized, f_eval, gamma_table, phi_eval, SpectralParam, TubePoint};
use heckop::jacobi::{eta_eval, phi_spherical, Backend, SphericalFunction};
use heckop::quadrature::TorusGrid;
use heckop::rootdata::{rho, shift_multiplicity, Multiplicity, RootDatum, ShiftSign};
use heckop::special::gamma;
use heckop::transform::{
    extended_transform, forward_transform, inner_product, make_bump, synthesize, CoefficientVector,
    SampledSection,
};
use heckop::weights::{enumerate_lambda_l, DominantWeight};
use num_complex::Complex64 as C;

fn space(key: &str) -> RootDatum {
    lookup(key).unwrap().root_datum().unwrap()
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Plain Gauss series, valid for |z| well below one.
fn gauss_series(a: C, b: C, cc: C, z: C) -> C {
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    for k in 0..2000 {
        let k = k as f64;
        term = term * (a + k) * (b + k) / ((cc + k) * (k + 1.0)) * z;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Rank-one Harish-Chandra function in closed form:
/// `Φ(λ; x) = (2 cosh x)^{λ-ρ} ₂F₁((ρ-λ)/2, (m_s/2+1-λ)/2; 1-λ; 1/cosh² x)`.
fn phi_rank1_oracle(m: &Multiplicity, lambda: C, x: f64) -> C {
    let r = 0.5 * m.short + m.long;
    let ch = x.cosh();
    let pref = c(2.0 * ch, 0.0).powc(lambda - r);
    pref * gauss_series((r - lambda) * 0.5, (0.5 * m.short + 1.0 - lambda) * 0.5, 1.0 - lambda, c(1.0 / (ch * ch), 0.0))
}

/// Coefficient of `e^{(λ-ρ)x}` in the large-x expansion of the rank-one
/// Gauss representation.
fn c_rank1_oracle(m: &Multiplicity, lambda: C) -> C {
    let r = 0.5 * m.short + m.long;
    let a = (lambda + r) * 0.5;
    let b = (-lambda + r) * 0.5;
    let cc = c(0.5 * (m.short + m.long + 1.0), 0.0);
    gamma(cc) * gamma(a - b) / (gamma(a) * gamma(cc - b)) * c(4.0, 0.0).powc(b)
}

#[test]
fn harish_chandra_series_matches_closed_form() {
    let rd = space("AIII:p=1,q=2");
    for m in [rd.mult, shift_multiplicity(&rd.mult, 1, ShiftSign::Plus), Multiplicity::new(1.0, 0.0, 0.5)] {
        for lambda in [c(1.3, 0.4), c(-0.7, 2.1), c(2.5, -1.0)] {
            let table = gamma_table(&rd, &m, &SpectralParam::new(vec![lambda]), 200).unwrap();
            for x in [0.7, 1.1, 2.0] {
                let v = phi_eval(&table, &TubePoint::real(vec![x]), 1e-14).unwrap().value;
                let o = phi_rank1_oracle(&m, lambda, x);
                assert!((v - o).norm() <= 1e-11 * o.norm(), "m={m:?} λ={lambda} x={x}: {v} vs {o}");
            }
        }
    }
}

#[test]
fn c_function_matches_connection_coefficient() {
    for m in [Multiplicity::new(0.0, 2.0, 1.0), Multiplicity::new(2.0, 2.0, 1.0), Multiplicity::new(-2.0, 2.0, 3.0), Multiplicity::new(4.0, 4.0, 1.0)] {
        let rd = heckop::rootdata::build_root_system(1, heckop::rootdata::Case::II, m).unwrap();
        for lambda in [c(0.5, 0.0), c(1.7, 0.3), c(-2.2, 1.4), c(0.1, -3.0)] {
            let v = c_normalized(&rd, &m, &SpectralParam::new(vec![lambda])).unwrap();
            let o = c_rank1_oracle(&m, lambda);
            assert!((v - o).norm() <= 1e-11 * o.norm().max(1.0), "m={m:?} λ={lambda}: {v} vs {o}");
        }
    }
}

#[test]
fn series_and_polynomial_backends_agree() {
    for (key, l) in [("AIII:p=1,q=1", 1), ("CI:j=2", 0), ("CI:j=2", 1)] {
        let rd = space(key);
        let m_plus = shift_multiplicity(&rd.mult, l, ShiftSign::Plus);
        let r = rho(rd.rank, &m_plus);
        for mu in enumerate_lambda_l(&rd, l, 4 + 2 * l * rd.rank as i64).into_iter().take(4) {
            let lambda = SpectralParam::real(&mu.untwisted().iter().zip(&r).map(|(a, b)| *a as f64 + b).collect::<Vec<_>>());
            let x: Vec<f64> = (1..=rd.rank).map(|j| 0.45 * j as f64).collect();
            let z = TubePoint::new(x, vec![0.2; rd.rank]);
            let series = phi_spherical(&rd, l, &lambda, &z, ShiftSign::Plus, Backend::Series).unwrap();
            let poly = phi_spherical(&rd, l, &lambda, &z, ShiftSign::Plus, Backend::Poly).unwrap();
            assert!((series - poly).norm() <= 1e-6 * poly.norm(), "{key} μ={:?}: {series} vs {poly}", mu.mu);
        }
    }
}

#[test]
fn spherical_variants_and_symmetry() {
    let rd = space("AIII:p=1,q=1");
    let z = TubePoint::new(vec![0.8], vec![0.3]);
    for l in [1, 2] {
        let lambda = SpectralParam::new(vec![c(1.1, 0.7)]);
        let plus = phi_spherical(&rd, l, &lambda, &z, ShiftSign::Plus, Backend::Rank1).unwrap();
        let minus = phi_spherical(&rd, l, &lambda, &z, ShiftSign::Minus, Backend::Rank1).unwrap();
        assert!((plus - minus).norm() <= 1e-8 * plus.norm());
        // φ_{λ,l} = φ_{-λ,l} on A
        let a = TubePoint::real(vec![0.9]);
        let neg = SpectralParam::new(vec![c(-1.1, -0.7)]);
        let p = phi_spherical(&rd, l, &lambda, &a, ShiftSign::Plus, Backend::Series).unwrap();
        let q = phi_spherical(&rd, l, &neg, &a, ShiftSign::Plus, Backend::Series).unwrap();
        assert!((p - q).norm() <= 1e-9 * p.norm());
    }
}

#[test]
fn eta_example_and_poles() {
    let rd = space("CI:j=2");
    let z = TubePoint::torus(vec![PI / 3.0, PI / 6.0]);
    let v = eta_eval(&rd, 1, ShiftSign::Plus, &z).unwrap();
    assert!((v.re - 3f64.sqrt() / 4.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    assert_eq!(eta_eval(&rd, 0, ShiftSign::Minus, &z).unwrap(), c(1.0, 0.0));
    assert!(eta_eval(&rd, 2, ShiftSign::Minus, &TubePoint::torus(vec![PI / 2.0, 0.1])).is_err());
}

#[test]
fn flat_case_is_averaged_exponential() {
    let rd = heckop::rootdata::build_root_system(2, heckop::rootdata::Case::II, Multiplicity::ZERO).unwrap();
    let lambda = SpectralParam::new(vec![c(0.4, 1.0), c(-1.2, 0.3)]);
    let z = TubePoint::new(vec![0.3, 0.9], vec![0.2, -0.5]);
    let f = f_eval(&rd, &rd.mult, &lambda, &z, 1e-14).unwrap().value;
    // explicit sum over the eight signed permutations
    let (l1, l2) = (lambda.lambda[0], lambda.lambda[1]);
    let (z1, z2) = (c(0.3, 0.2), c(0.9, -0.5));
    let mut s = c(0.0, 0.0);
    for (a, b) in [(l1, l2), (l2, l1)] {
        for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            s += (a * sa * z1 + b * sb * z2).exp();
        }
    }
    assert!((f - s / 8.0).norm() < 1e-13 * (s / 8.0).norm());
}

#[test]
fn transform_of_spherical_function_is_a_delta() {
    let rd = space("AIII:p=1,q=1");
    let grid = Arc::new(TorusGrid::with_resolution(1, 512, false).unwrap());
    for l in [0, 1, 2] {
        let mus = enumerate_lambda_l(&rd, l, 10 + l);
        let nu = mus[2].clone();
        let sf = SphericalFunction::new(&rd, &nu).unwrap();
        let f = SampledSection::from_fn(grid.clone(), l, |y| c(sf.scalar_part(&rd, y), 0.0));
        let coeffs = forward_transform(&rd, &f, &mus).unwrap();
        let d = 1.0 / inner_product(&rd, &f, &f).unwrap().re;
        for (mu, v) in &coeffs.entries {
            let expect = if *mu == nu { 1.0 / d } else { 0.0 };
            assert!((v - expect).norm() < 1e-6, "l={l} μ={:?}", mu.mu);
        }
    }
}

#[test]
fn transform_is_linear_and_synthesis_of_constant() {
    let rd = space("AIII:p=1,q=1");
    let grid = Arc::new(TorusGrid::with_resolution(1, 256, false).unwrap());
    let mus = enumerate_lambda_l(&rd, 1, 9);
    let f = SampledSection::from_fn(grid.clone(), 1, |y| c(y[0].cos().powi(2), 0.2 * (2.0 * y[0]).sin().powi(2)));
    let g = SampledSection::from_fn(grid.clone(), 1, |y| c((4.0 * y[0]).cos(), 0.0));
    let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
    let lhs = forward_transform(&rd, &f.scale(a).add(&g.scale(b)).unwrap(), &mus).unwrap();
    let tf = forward_transform(&rd, &f, &mus).unwrap();
    let tg = forward_transform(&rd, &g, &mus).unwrap();
    for i in 0..mus.len() {
        let rhs = a * tf.entries[i].1 + b * tg.entries[i].1;
        assert!((lhs.entries[i].1 - rhs).norm() < 1e-12);
    }
    let one = CoefficientVector { l: 0, entries: vec![(DominantWeight::new(&rd, vec![0], 0), c(1.0, 0.0))] };
    let s = synthesize(&rd, &one, grid).unwrap();
    assert!(s.values.iter().all(|v| (v - 1.0).norm() < 1e-13));
}

#[test]
fn extended_transform_on_the_lattice() {
    let rd = space("AIII:p=1,q=1");
    let grid = Arc::new(TorusGrid::alcove_with_breaks(1, 48, &[0.5]).unwrap());
    for l in [0, 1] {
        let bump = make_bump(&rd, l, 0.5, grid.clone()).unwrap();
        let mus = enumerate_lambda_l(&rd, l, 8);
        let direct = forward_transform(&rd, &bump, &mus).unwrap();
        for (mu, v) in &direct.entries {
            let lam = SpectralParam::real(&[mu.mu[0] as f64]);
            let r1 = extended_transform(&rd, &bump, &lam, Backend::Rank1).unwrap();
            let poly = extended_transform(&rd, &bump, &lam, Backend::Poly).unwrap();
            assert!((r1 - v).norm() < 1e-10 * v.norm().max(1e-3), "l={l} μ={:?}", mu.mu);
            assert!((poly - v).norm() < 1e-12);
        }
        assert!(extended_transform(&rd, &bump, &SpectralParam::real(&[0.5]), Backend::Poly).is_err());
    }
}

#[test]
fn uniform_and_alcove_rules_agree_on_smooth_data() {
    // with m_s + m_l and m_l even the density is a trigonometric polynomial
    let rd = heckop::rootdata::build_root_system(1, heckop::rootdata::Case::II, Multiplicity::new(2.0, 0.0, 2.0)).unwrap();
    let mu = DominantWeight::new(&rd, vec![4], 0);
    let a = heckop::transform::Measure::new(&rd, 0, Arc::new(TorusGrid::uniform(1, 256))).unwrap();
    let b = heckop::transform::Measure::new(&rd, 0, Arc::new(TorusGrid::alcove(1, 64).unwrap())).unwrap();
    assert!((a.dimension(&mu).unwrap() - b.dimension(&mu).unwrap()).abs() < 1e-9);
}
