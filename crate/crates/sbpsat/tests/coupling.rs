use proptest::prelude::*;
use sbpsat::analysis;
use sbpsat::assembly::{self, presets, AssemblyError, RunConfig, SemiDiscreteSystem};
use sbpsat::coupling::{self, CouplingError, InterfaceKind, Scheme};

fn system(cfg: &RunConfig) -> SemiDiscreteSystem<f64> {
    assembly::assemble_system(cfg).unwrap()
}

fn sample(sys: &SemiDiscreteSystem<f64>, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    sys.x.iter().zip(&sys.y).map(|(&x, &y)| f(x, y)).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn gentle_pair(order: usize, nu: usize, nv: usize) -> RunConfig {
    let mut c = presets::gentle_interface_longtime(order, false);
    c.blocks[0].nx = nu;
    c.blocks[0].ny = nu;
    c.blocks[1].nx = nv;
    c.blocks[1].ny = nv;
    c
}

#[test]
fn tau_formula_examples() {
    assert_eq!(coupling::compute_tau_cartesian(1.0, 0.1, 0.1, 1.0).unwrap().0, 5.0);
    assert_eq!(coupling::compute_tau_cartesian(0.25, 0.1, 0.05, 1.0).unwrap().0, 40.0);
    let (a, _) = coupling::compute_tau_cartesian(0.3, 0.1, 0.07, 1.0).unwrap();
    let (b, _) = coupling::compute_tau_cartesian(0.3, 0.05, 0.035, 1.0).unwrap();
    assert_eq!(b, 2.0 * a);
    let (t, tau) = coupling::compute_tau_curvilinear(0.2, 1.0, 1.0, 0.0, 1.0, 0.0, 0.1, 0.1, 1.2).unwrap();
    assert!((t - 25.0).abs() < 1e-12 && (tau - 30.0).abs() < 1e-12);
    let (s, _) = coupling::compute_tau_curvilinear(0.3, 0.7, 1.4, 0.2, 1.4, 0.2, 0.05, 0.05, 1.0).unwrap();
    assert_eq!(s, coupling::curvilinear_bound(0.3, 0.7, 1.4, 0.2, 0.05));
    assert!(matches!(coupling::compute_tau_curvilinear(0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.1, 0.1, 1.0), Err(CouplingError::NonPositiveInput(_))));
}

#[test]
fn doubling_b_adds_three_b_squared_over_two_delta() {
    let (sigma, delta, a, b, h) = (0.37, 0.61, 1.9, 0.45, 0.02);
    let (t1, _) = coupling::compute_tau_curvilinear(sigma, delta, a, b, 0.5, 0.1, h, 0.04, 1.0).unwrap();
    let (t2, _) = coupling::compute_tau_curvilinear(sigma, delta, a, 2.0 * b, 0.5, 0.1, h, 0.04, 1.0).unwrap();
    let want = 3.0 * b * b / (2.0 * delta);
    assert!(((t2 - t1) - want).abs() <= 1e-12 * want, "{} vs {want}", t2 - t1);
}

#[test]
fn conforming_new_split_equals_legacy() {
    for order in [2, 4, 6] {
        let cfg = presets::cartesian_pair(order, 21, 21, "zero");
        let new = system(&cfg);
        let old = system(&cfg.with_scheme(Scheme::Legacy));
        let diff = new.interfaces[0].total().axpy(-1.0, &old.interfaces[0].total()).max_abs();
        assert!(diff <= 1e-12 * new.interfaces[0].total().max_abs(), "order {order}: {diff}");
    }
}

#[test]
fn constant_state_gives_zero_addends() {
    let mut cfgs = vec![presets::cartesian_pair(4, 13, 25, "zero"), gentle_pair(6, 21, 41), presets::tjunction_converge(4)];
    cfgs.push(cfgs[2].with_scheme(Scheme::Legacy));
    for cfg in cfgs {
        let sys = system(&cfg);
        let ones = vec![1.0; sys.n];
        for ia in &sys.interfaces {
            for sat in [&ia.sat_u, &ia.sat_v] {
                for (name, m) in sat.addends() {
                    let r = max_abs(&m.matvec(&ones));
                    assert!(r <= 1e-12 * m.max_abs().max(1.0), "{:?} {name}: {r:e}", cfg.preset);
                }
            }
        }
    }
}

#[test]
fn linear_data_is_consistent_on_cartesian_pairs() {
    // u = x + 2y is reproduced exactly by every trace, flux and interpolation
    for (order, nu, nv) in [(2, 11, 11), (4, 13, 25), (6, 21, 41)] {
        let sys = system(&presets::cartesian_pair(order, nu, nv, "zero"));
        let u = sample(&sys, |x, y| x + 2.0 * y);
        let ia = &sys.interfaces[0];
        for sat in [&ia.sat_u, &ia.sat_v] {
            for (name, m) in sat.addends() {
                let r = max_abs(&m.matvec(&u));
                assert!(r <= 1e-10, "order {order} {name}: {r:e}");
            }
        }
    }
}

#[test]
fn smooth_flux_mismatch_converges_on_curved_interface() {
    let sol = |x: f64, y: f64| (x + 1.0).cos() * (y + 2.0).cos();
    let residual = |n: usize| {
        let sys = system(&gentle_pair(6, n, n));
        let u = sample(&sys, sol);
        let p = &sys.interfaces[0].pieces_u[0];
        let jump: Vec<f64> = p.trace.matvec(&u).iter().zip(p.partner_trace.matvec(&u)).map(|(a, b)| a - b).collect();
        let flux: Vec<f64> = p.flux.matvec(&u).iter().zip(p.partner_flux.matvec(&u)).map(|(a, b)| a - b).collect();
        (max_abs(&jump), max_abs(&flux))
    };
    let (j1, f1) = residual(21);
    let (j2, f2) = residual(41);
    assert!(j1 < 1e-13 && j2 < 1e-13, "conforming traces coincide: {j1:e} {j2:e}");
    // boundary closures of order 6 are third-order accurate
    assert!(f2 <= 1e-4, "{f2:e}");
    assert!((f1 / f2).log2() >= 2.7, "{f1:e} {f2:e}");
}

#[test]
fn curvilinear_reduces_to_cartesian() {
    for order in [2, 4, 6] {
        let cart = presets::cartesian_pair(order, 13, 25, "zero");
        let mut curv = cart.clone();
        curv.interfaces[0].kind = "curvilinear".into();
        let (a, b) = (system(&cart), system(&curv));
        let (ia, ib) = (&a.interfaces[0], &b.interfaces[0]);
        assert_eq!(ib.tau.kind, InterfaceKind::Curvilinear);
        let ratio = ib.tau.tau / ia.tau.tau;
        for (sa, sb) in [(&ia.sat_u, &ib.sat_u), (&ia.sat_v, &ib.sat_v)] {
            let rel = |x: &sbpsat::sparse::Csr<f64>, y: &sbpsat::sparse::Csr<f64>| x.axpy(-1.0, y).max_abs() / x.max_abs().max(1e-300);
            assert!(rel(&sa.deriv, &sb.deriv) < 1e-13);
            assert!(rel(&sa.flux, &sb.flux) < 1e-13);
            assert!(rel(&sa.trace.scale(ratio), &sb.trace) < 1e-13);
            assert!(rel(&sa.composed.scale(ratio), &sb.composed) < 1e-13);
        }
    }
}

#[test]
fn tjunction_operator_is_self_adjoint_and_form_psd() {
    for order in [4, 6] {
        let sys = system(&presets::tjunction_converge(order));
        assert!(analysis::mass_asymmetry(&sys) < 1e-13, "order {order}");
        for ia in &sys.interfaces {
            for inp in analysis::form_inputs(&sys, ia, Some(ia.tau.tau_min)) {
                let r = analysis::interface_form_psd(&inp).unwrap();
                assert!(r.lambda_min_a1.min(r.lambda_min_a2) >= -1e-10 * r.norm, "{r:?}");
            }
        }
    }
}

#[test]
fn non_contiguous_pieces_rejected() {
    let mut cfg = presets::tjunction_converge(4);
    cfg.interfaces[0].side_v = vec!["1:left:0:0.6".into(), "2:left:0.621:1".into()];
    match assembly::assemble_system(&cfg) {
        Err(AssemblyError::Coupling { interface: 0, source: CouplingError::InvalidInterface(m) }) if m.contains("gap") => {}
        other => panic!("{:?}", other.err()),
    }
}

#[test]
fn misplaced_junction_rejected() {
    // contiguous in t, but the lower block's edge does not end where the parameter says
    let mut cfg = presets::tjunction_converge(4);
    cfg.interfaces[0].side_v = vec!["1:left:0:0.7".into(), "2:left:0.7:1".into()];
    assert!(matches!(assembly::assemble_system(&cfg), Err(AssemblyError::Coupling { source: CouplingError::NonMatchingJunction(_), .. })));
}

#[test]
fn cartesian_kind_requires_zero_cross_metric() {
    let mut cfg = gentle_pair(4, 13, 13);
    cfg.interfaces[0].kind = "cartesian".into();
    assert!(matches!(assembly::assemble_system(&cfg), Err(AssemblyError::Coupling { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tau_monotone_and_homogeneous(theta in 0.05f64..2.0, hu in 0.001f64..0.2, hv in 0.001f64..0.2, s in 1.0f64..3.0) {
        let (t, tau) = coupling::compute_tau_cartesian(theta, hu, hv, s).unwrap();
        prop_assert!((tau - s * t).abs() <= 1e-14 * tau);
        let (t2, _) = coupling::compute_tau_cartesian(theta, hu / 2.0, hv / 2.0, s).unwrap();
        prop_assert!((t2 - 2.0 * t).abs() <= 1e-14 * t2);
    }
}
