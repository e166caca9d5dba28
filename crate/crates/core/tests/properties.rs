use approx::assert_abs_diff_eq;
use bellmap::bell::{algebra_map, group_map, TracelessHermitian2};
use bellmap::linalg::{expm, expm_su2, kron};
use bellmap::spin::{rho, SU2Element};
use bellmap::yang_mills::{action_bi, action_fos, action_ym, sd_asd_invariants, CurvatureConfig};
use bellmap::{ComplexMatrix, C64};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), rows * cols).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| C64::new(re, im)).collect();
        ComplexMatrix::new(rows, cols, data).unwrap()
    })
}

fn quaternion() -> impl Strategy<Value = SU2Element> {
    prop::array::uniform4(-1.0..1.0f64)
        .prop_filter("away from zero", |q| {
            q.iter().map(|x| x * x).sum::<f64>() > 1e-3
        })
        .prop_map(|q| {
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            SU2Element::from_quaternion(q.map(|x| x / n)).unwrap()
        })
}

fn hermitian() -> impl Strategy<Value = TracelessHermitian2> {
    prop::array::uniform3(-2.0..2.0f64).prop_map(|[a, b, c]| TracelessHermitian2::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_mixed_product(a in matrix(2, 3), b in matrix(3, 2), c in matrix(3, 2), d in matrix(2, 2)) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * rhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn kron_associative(a in matrix(2, 1), b in matrix(1, 3), c in matrix(2, 2)) {
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        // (ab)c and a(bc) round differently, so compare to working precision
        prop_assert!(lhs.distance(&rhs) <= 1e-14 * rhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn expm_matches_taylor(a in matrix(3, 3)) {
        let a = a.scale_real(0.25);
        let mut term = ComplexMatrix::identity(3);
        let mut sum = term.clone();
        for k in 1..40 {
            term = (&term * &a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        prop_assert!(expm(&a).unwrap().distance(&sum) <= 1e-13);
    }

    #[test]
    fn expm_determinant_is_exp_trace(a in matrix(4, 4)) {
        let det = expm(&a).unwrap().determinant().unwrap();
        let expect = a.trace().exp();
        prop_assert!((det - expect).norm() <= 1e-10 * expect.norm().max(1.0));
    }

    #[test]
    fn trace_invariant_under_conjugation(a in matrix(3, 3), b in matrix(3, 3)) {
        let b = &b + &ComplexMatrix::identity(3).scale_real(5.0);
        let conj = &(&b * &a) * &b.inverse().unwrap();
        assert_abs_diff_eq!(conj.trace().re, a.trace().re, epsilon = 1e-10);
        assert_abs_diff_eq!(conj.trace().im, a.trace().im, epsilon = 1e-10);
    }

    #[test]
    fn group_map_homomorphism(g1 in quaternion(), h1 in quaternion(), g2 in quaternion(), h2 in quaternion()) {
        let o = |g: &SU2Element, h: &SU2Element| group_map(&g.to_matrix(), &h.to_matrix()).unwrap();
        let lhs = o(&g1.compose(&g2), &h1.compose(&h2));
        let rhs = &o(&g1, &h1) * &o(&g2, &h2);
        prop_assert!(lhs.distance(&rhs) <= 1e-12);
    }

    #[test]
    fn group_map_kernel(g in quaternion(), h in quaternion()) {
        let a = group_map(&g.to_matrix(), &h.to_matrix()).unwrap();
        let b = group_map(&g.negated().to_matrix(), &h.negated().to_matrix()).unwrap();
        prop_assert!(a.distance(&b) <= 1e-14);
        prop_assert!(rho(&g).distance(&rho(&g.negated())) == 0.0);
    }

    #[test]
    fn exponentials_intertwine(a in hermitian(), b in hermitian()) {
        let o = group_map(&a.exp_i(), &b.exp_i()).unwrap();
        let e = expm(&algebra_map(&a, &b).to_matrix()).unwrap();
        prop_assert!(o.distance(&e) <= 1e-11);
    }

    #[test]
    fn closed_su2_exponential(a in hermitian()) {
        let [x, y, z] = a.as_array();
        let closed = expm_su2(x, y, z);
        let general = expm(&a.to_matrix().scale(bellmap::linalg::I)).unwrap();
        prop_assert!(closed.distance(&general) <= 1e-12);
    }

    #[test]
    fn curvature_actions(f in prop::array::uniform6(-3.0..3.0f64), g in -2.0..2.0f64) {
        let c = CurvatureConfig::new(f, g).unwrap();
        // det(1 + gF) = 1 + g²ΣF² + g⁴ Pf² ≥ 1
        let pf = f[0] * f[5] - f[1] * f[4] + f[2] * f[3];
        let bi = action_bi(&c).unwrap();
        let expect = (1.0 - action_ym(&c) + g.powi(4) * pf * pf).sqrt();
        prop_assert!((bi - expect).abs() <= 1e-10 * expect);
        prop_assert!(action_fos(&c).abs() <= 4.0 + 1e-12);
        let inv = sd_asd_invariants(&c);
        // Pf = X_asd² − X_sd²
        prop_assert!((inv.x_asd.powi(2) - inv.x_sd.powi(2) - pf).abs() <= 1e-12);
    }
}

#[test]
fn algebra_map_is_scaled_isometry() {
    // columns are images of the six basis generators
    let mut cols = Vec::new();
    for k in 0..6 {
        let mut v = [0.0; 6];
        v[k] = 1.0;
        let a = TracelessHermitian2::new(v[0], v[1], v[2]);
        let b = TracelessHermitian2::new(v[3], v[4], v[5]);
        cols.push(algebra_map(&a, &b).as_array());
    }
    for i in 0..6 {
        for j in 0..6 {
            let dot: f64 = (0..6).map(|k| cols[i][k] * cols[j][k]).sum();
            assert_eq!(dot, if i == j { 2.0 } else { 0.0 });
        }
    }
}
