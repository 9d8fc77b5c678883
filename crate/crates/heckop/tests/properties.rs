use std::f64::consts::PI;

use heckop::hypergeom::{estimate_bound, SpectralParam, TubePoint};
use heckop::jacobi::orbit_sum_eval;
use heckop::rank1::{f_rank1, gauss_2f1};
use heckop::rootdata::{build_root_system, rho, shift_multiplicity, Case, Multiplicity, ShiftSign};
use heckop::transform::delta_density;
use heckop::weights::{enumerate_lambda_l, is_in_lambda_l};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn mult() -> impl Strategy<Value = Multiplicity> {
    (0u8..5, 1u8..6, 0u8..3).prop_map(|(s, m, l)| Multiplicity::new(s as f64, m as f64, l as f64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weyl_orbits_preserve_roots_and_sums(n in 1usize..4, m in mult(), y in prop::collection::vec(-3.0f64..3.0, 3)) {
        let rd = build_root_system(n, Case::II, m).unwrap();
        let y = &y[..n];
        let d = delta_density(&rd, &m, y);
        let nu: Vec<i64> = (0..n).map(|j| 2 * j as i64).collect();
        let o = orbit_sum_eval(&rd, &nu, y);
        for w in rd.weyl() {
            let wy = w.act(y);
            prop_assert!((delta_density(&rd, &m, &wy) - d).abs() <= 1e-12 * (1.0 + d));
            prop_assert!((orbit_sum_eval(&rd, &nu, &wy) - o).abs() <= 1e-11);
        }
    }

    #[test]
    fn rho_shift_is_integral(n in 1usize..4, m in mult(), l in -3i64..4) {
        let plus = shift_multiplicity(&m, l, ShiftSign::Plus);
        let (a, b) = (rho(n, &m), rho(n, &plus));
        for j in 0..n {
            prop_assert!((b[j] - a[j] - l.abs() as f64).abs() < 1e-14);
        }
        let rd = build_root_system(n, Case::II, m).unwrap();
        for w in enumerate_lambda_l(&rd, l, 10) {
            let back: Vec<i64> = w.untwisted();
            prop_assert!(is_in_lambda_l(&rd, &back, 0));
            prop_assert!(back.iter().zip(&w.mu).all(|(a, b)| b - a == l.abs()));
            prop_assert!(l == 0 || !is_in_lambda_l(&rd, &w.mu, l.abs() + 1));
        }
    }

    #[test]
    fn pfaff_transformation(ar in -2.0f64..2.0, br in -2.0f64..2.0, cr in 0.5f64..3.0, x in -0.9f64..0.45) {
        let (a, b, c) = (C::new(ar, 0.3), C::new(br, -0.2), C::new(cr, 0.1));
        let z = C::new(x, 0.0);
        let direct = gauss_2f1(a, b, c, z).unwrap();
        let pfaff = (1.0 - z).powc(-a) * gauss_2f1(a, c - b, c, z / (z - 1.0)).unwrap();
        prop_assert!((direct - pfaff).norm() <= 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn rank_one_weyl_invariance(m in mult(), lr in -4.0f64..4.0, li in -4.0f64..4.0, x in 0.0f64..2.5, y in -1.4f64..1.4) {
        let z = C::new(x, y);
        let a = f_rank1(&m, C::new(lr, li), z).unwrap();
        let b = f_rank1(&m, C::new(-lr, -li), z).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn estimate_bound_is_weyl_symmetric(lr in prop::collection::vec(-3.0f64..3.0, 2), li in prop::collection::vec(-3.0f64..3.0, 2),
                                        y in prop::collection::vec(-1.2f64..1.2, 2)) {
        let m = Multiplicity::new(-2.0, 1.0, 3.0);
        let rd = build_root_system(2, Case::I, Multiplicity::new(0.0, 1.0, 1.0)).unwrap();
        let lambda = SpectralParam::from_parts(&lr, &li);
        let z = TubePoint::new(vec![0.3, 0.9], y);
        prop_assume!(z.torus_extent() <= PI - 0.3);
        let base = estimate_bound(&rd, &m, &lambda, &z, 0.3).unwrap();
        prop_assert!(base > 0.0 && base.is_finite());
        for w in rd.weyl() {
            let wl = SpectralParam::new(w.act(&lambda.lambda));
            let v = estimate_bound(&rd, &m, &wl, &z, 0.3).unwrap();
            prop_assert!((v - base).abs() <= 1e-12 * base);
        }
    }
}
