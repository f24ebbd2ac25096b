use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbpsat::dense;
use sbpsat::sbp::{self, Grid1D, SbpError};
use sbpsat::sparse::Csr;

fn set(order: usize, n: usize) -> sbp::SbpSet<f64> {
    sbp::build_sbp_set(order, Grid1D::unit(n).unwrap()).unwrap()
}

// Diagonal norms of the classical diagonal-norm operators, scaled by 1/h.
const H4: [f64; 4] = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];
const H6: [f64; 6] = [13649.0 / 43200.0, 12013.0 / 8640.0, 2711.0 / 4320.0, 5359.0 / 4320.0, 7877.0 / 8640.0, 43801.0 / 43200.0];

#[test]
fn boundary_norms_match_classical_weights() {
    let s = set(2, 11);
    assert!((s.h[0] / s.grid.h - 0.5).abs() < 1e-15);
    for (order, w) in [(4, &H4[..]), (6, &H6[..])] {
        let s = set(order, 31);
        for (j, &wj) in w.iter().enumerate() {
            assert!((s.h[j] / s.grid.h - wj).abs() < 1e-13, "order {order} node {j}: {} vs {wj}", s.h[j] / s.grid.h);
            assert!((s.h[30 - j] / s.grid.h - wj).abs() < 1e-13);
        }
        assert!((s.h[15] / s.grid.h - 1.0).abs() < 1e-14);
    }
}

#[test]
fn second_order_d1_is_textbook() {
    let s = set(2, 6);
    let h = s.grid.h;
    assert!((s.d1.get(0, 0) * h + 1.0).abs() < 1e-14 && (s.d1.get(0, 1) * h - 1.0).abs() < 1e-14);
    assert!((s.d1.get(2, 1) * h + 0.5).abs() < 1e-14 && (s.d1.get(2, 3) * h - 0.5).abs() < 1e-14);
    assert_eq!(s.d1.row_nnz(2), 2);
}

#[test]
fn d1_of_linear_is_ones() {
    for order in [2, 4, 6] {
        let s = set(order, 11.max(sbp::min_nodes(order).unwrap()));
        let x = s.grid.nodes();
        for v in s.d1.matvec(&x) {
            assert!((v - 1.0).abs() < 1e-12, "order {order}: {v}");
        }
    }
}

#[test]
fn q_plus_qt_is_boundary_selector_order6() {
    let s = set(6, 31);
    let qq = s.q.add(&s.q.transpose());
    for i in 0..31 {
        for j in 0..31 {
            let want = match (i, j) {
                (0, 0) => -1.0,
                (30, 30) => 1.0,
                _ => 0.0,
            };
            assert!((qq.get(i, j) - want).abs() < 1e-14, "({i},{j})");
        }
    }
}

#[test]
fn d2_of_square_is_two() {
    let s = set(4, 21);
    let x2: Vec<f64> = s.grid.nodes().iter().map(|x| x * x).collect();
    for v in s.d2.matvec(&x2) {
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }
}

#[test]
fn certificates_pass_at_17_and_33() {
    for order in [2, 4, 6] {
        for n in [17, 33] {
            let c = sbp::verify_sbp_identities(&set(order, n));
            assert!(c.passed(), "{}", c.to_kv());
            let b = sbp::random_smooth_coefficient(&Grid1D::<f64>::unit(n).unwrap().nodes(), 11);
            let c = sbp::verify_variable_d2(&sbp::build_variable_d2(order, Grid1D::unit(n).unwrap(), b).unwrap());
            assert!(c.passed(), "{}", c.to_kv());
        }
    }
}

#[test]
fn negated_norm_entry_is_named() {
    let mut s = set(4, 17);
    s.h[3] = -s.h[3];
    let c = sbp::verify_sbp_identities(&s);
    assert!(!c.passed());
    assert!(c.failures().iter().any(|f| f.name == "H_positive.entry_3"), "{}", c.to_kv());
}

#[test]
fn grid_too_small_rejected() {
    let e = sbp::build_sbp_set(6, Grid1D::<f64>::unit(8).unwrap()).unwrap_err();
    assert!(matches!(e, SbpError::GridTooSmall { order: 6, .. }), "{e}");
}

#[test]
fn unit_coefficient_reduces_to_constant_operator() {
    for order in [2, 4, 6] {
        let n = 25;
        let s = set(order, n);
        let v = sbp::build_variable_d2(order, Grid1D::unit(n).unwrap(), vec![1.0; n]).unwrap();
        assert!(v.mb.axpy(-1.0, &s.m).max_abs() < 1e-13 * s.m.max_abs(), "order {order}");
        assert!(v.d2.axpy(-1.0, &s.d2).max_abs() < 1e-12 * s.d2.max_abs(), "order {order}");
    }
}

#[test]
fn variable_d2_linear_flux_interior() {
    // (b f')' with b = 1 + x, f = x is 1
    for order in [2, 4, 6] {
        let n = 31;
        let x = Grid1D::<f64>::unit(n).unwrap().nodes();
        let b: Vec<f64> = x.iter().map(|t| 1.0 + t).collect();
        let v = sbp::build_variable_d2(order, Grid1D::unit(n).unwrap(), b).unwrap();
        let g = v.d2.matvec(&x);
        for j in 8..n - 8 {
            assert!((g[j] - 1.0).abs() < 1e-10, "order {order} node {j}: {}", g[j]);
        }
    }
}

#[test]
fn rb_psd_for_random_coefficient_order6() {
    let n = 33;
    let x = Grid1D::<f64>::unit(n).unwrap().nodes();
    for seed in 0..3 {
        let b = sbp::random_smooth_coefficient(&x, seed);
        let v = sbp::build_variable_d2(6, Grid1D::unit(n).unwrap(), b).unwrap();
        let lam = dense::min_sym_eigenvalue(&dense::to_array(&v.rb));
        assert!(lam >= -1e-12 * v.rb.max_abs(), "seed {seed}: {lam}");
    }
}

#[test]
fn borrowing_of_identity_is_one() {
    let m = Csr::<f64>::identity(5);
    let r = Csr::from_triplets(1, 5, [(0, 0, 1.0)]);
    let g = sbp::compute_borrowing(&m, &r, 1.0, 1.0).unwrap();
    assert!((g - 1.0).abs() < 1e-12, "{g}");
}

#[test]
fn borrowing_is_grid_independent_and_sharp() {
    let gamma = |n: usize| {
        let s = set(4, n);
        let bs = sbp::bs_rows(&s.s);
        (sbp::compute_borrowing(&s.m, &bs, s.grid.h, 1.0).unwrap(), s, bs)
    };
    let (g21, s, bs) = gamma(21);
    let (g41, _, _) = gamma(41);
    assert!((g21 - g41).abs() <= 1e-8 * g21, "{g21} vs {g41}");
    let deflated = s.m.axpy(-1.01 * g21 * s.grid.h, &bs.transpose().matmul(&bs));
    assert!(dense::min_sym_eigenvalue(&dense::to_array(&deflated)) < 0.0);
}

#[test]
fn integration_by_parts_direct_sum() {
    let s = set(4, 29);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let u: Vec<f64> = (0..29).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..29).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (du, dv) = (s.d1.matvec(&u), s.d1.matvec(&v));
    let mut sum = 0.0;
    for j in 0..29 {
        sum += u[j] * s.h[j] * dv[j] + du[j] * s.h[j] * v[j];
    }
    assert!((sum - (u[28] * v[28] - u[0] * v[0])).abs() < 1e-12);
}

#[test]
fn triplet_text_round_trip() {
    let s = set(6, 17);
    let back = sbp::parse_triplets(&sbp::triplet_text(&s.d1)).unwrap();
    assert_eq!(back.axpy(-1.0, &s.d1).max_abs(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sbp_property_any_size(order in prop::sample::select(vec![2usize, 4, 6]), extra in 0usize..40) {
        let n = sbp::min_nodes(order).unwrap() + extra;
        let s = set(order, n);
        let qq = s.q.add(&s.q.transpose());
        let mut b = vec![0.0; n];
        b[0] = -1.0;
        b[n - 1] = 1.0;
        prop_assert!(qq.axpy(-1.0, &Csr::diag(&b)).max_abs() < 1e-13);
        prop_assert!(s.h.iter().all(|&v| v > 0.0));
        let total: f64 = s.h.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn variable_m_psd_random_positive_b(seed in 0u64..1000, order in prop::sample::select(vec![2usize, 4, 6])) {
        let n = 27;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        let s = set(order, n);
        let (_, m) = sbp::variable_d2_operator(&s, &b).unwrap();
        prop_assert!(m.asymmetry() < 1e-12 * m.max_abs());
        let lam = dense::min_sym_eigenvalue(&dense::to_array(&m));
        prop_assert!(lam >= -1e-12 * m.max_abs(), "{}", lam);
    }
}
