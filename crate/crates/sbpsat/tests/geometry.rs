use proptest::prelude::*;
use sbpsat::geometry::{self, library, BlockMapping, Curve, GeometryError, MetricField, MetricMethod, Sine};

const PI: f64 = std::f64::consts::PI;

fn metrics(m: BlockMapping<f64>, n: usize, method: MetricMethod) -> (geometry::Block<f64>, MetricField<f64>) {
    let b = geometry::build_block(m, n, n).unwrap();
    let f = geometry::compute_metrics(&b, method).unwrap();
    (b, f)
}

fn uniform_field(n: usize, a: f64, b: f64, c: f64) -> MetricField<f64> {
    let v = |x: f64| vec![x; n];
    MetricField { nx: n, ny: 1, x_xi: v(1.0), x_eta: v(0.0), y_xi: v(0.0), y_eta: v(1.0), j: v(1.0), a: v(a), b: v(b), c: v(c) }
}

#[test]
fn identity_nodes_uniform() {
    let b = geometry::build_block(BlockMapping::<f64>::identity(), 11, 11).unwrap();
    for ix in 0..11 {
        for iy in 0..11 {
            let k = b.index(ix, iy);
            assert!((b.x[k] - ix as f64 / 10.0).abs() < 1e-15 && (b.y[k] - iy as f64 / 10.0).abs() < 1e-15);
        }
    }
}

#[test]
fn extreme_left_edge_on_curve() {
    let (left, _) = library::extreme_interface::<f64>();
    let b = geometry::build_block(left, 21, 21).unwrap();
    for iy in 0..21 {
        let k = b.index(20, iy);
        assert!((b.x[k] - 0.8 * (7.0 * PI * b.y[k]).sin()).abs() < 1e-12, "node {iy}");
    }
}

#[test]
fn affine_spacing_and_metrics() {
    let (b, f) = metrics(BlockMapping::affine(0.0, 2.0, 0.0, 3.0), 11, MetricMethod::Analytic);
    assert!((b.x[b.index(1, 0)] - 0.2).abs() < 1e-15 && (b.y[b.index(0, 1)] - 0.3).abs() < 1e-15);
    for k in 0..b.len() {
        assert!((f.j[k] - 6.0).abs() < 1e-14);
        assert!((f.a[k] - 1.5).abs() < 1e-14 && (f.c[k] - 2.0 / 3.0).abs() < 1e-14 && f.b[k].abs() < 1e-14);
    }
    let (_, f) = metrics(BlockMapping::identity(), 11, MetricMethod::Fd10);
    for k in 0..f.a.len() {
        assert!((f.j[k] - 1.0).abs() < 1e-12 && (f.a[k] - 1.0).abs() < 1e-12 && f.b[k].abs() < 1e-12);
    }
}

#[test]
fn fd10_matches_analytic_on_curved_block() {
    let (left, _) = library::extreme_interface::<f64>();
    let (_, fa) = metrics(left, 101, MetricMethod::Analytic);
    let (_, ff) = metrics(left, 101, MetricMethod::Fd10);
    let rel = |u: &[f64], v: &[f64]| {
        let s = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        u.iter().zip(v).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / s
    };
    for (u, v) in [(&fa.x_xi, &ff.x_xi), (&fa.x_eta, &ff.x_eta), (&fa.y_eta, &ff.y_eta), (&fa.j, &ff.j)] {
        let r = rel(u, v);
        assert!(r <= 1e-8, "{r:e}");
    }
}

#[test]
fn fd10_refinement_slope() {
    let (left, _) = library::gentle_interface::<f64>();
    let err = |n: usize| {
        let (_, fa) = metrics(left, n, MetricMethod::Analytic);
        let (_, ff) = metrics(left, n, MetricMethod::Fd10);
        fa.x_eta.iter().zip(&ff.x_eta).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };
    let (e1, e2) = (err(21), err(41));
    let slope = (e1 / e2).log2();
    assert!(slope >= 8.0, "{e1:e} {e2:e} slope {slope}");
}

#[test]
fn metric_identity_on_library_blocks() {
    let (l, r) = library::extreme_interface::<f64>();
    let [a, b, c] = library::tjunction::<f64>();
    for (m, n) in [(l, 21), (r, 41), (a, 26), (b, 26), (c, 31)] {
        let (_, f) = metrics(m, n, MetricMethod::Analytic);
        for k in 0..f.a.len() {
            assert!(f.j[k] > 0.0);
            assert!((f.a[k] * f.c[k] - f.b[k] * f.b[k] - 1.0).abs() < 1e-11, "{}", f.a[k] * f.c[k] - f.b[k] * f.b[k]);
        }
    }
}

#[test]
fn delta_examples() {
    let id = uniform_field(4, 1.0, 0.0, 1.0);
    assert!((geometry::compute_delta(&id, &id).unwrap() - 1.0).abs() < 1e-15);
    let mut u = uniform_field(4, 1.0, 0.0, 1.0);
    u.a[2] = 2.0;
    assert!((geometry::compute_delta(&u, &id).unwrap() - 1.0).abs() < 1e-15);
    u.b[2] = 0.5;
    let want = (3.0 - 2f64.sqrt()) / 2.0;
    assert!((geometry::compute_delta(&u, &id).unwrap() - want).abs() < 1e-15);
    let bad = uniform_field(4, 1.0, 1.0, 1.0);
    assert!(matches!(geometry::compute_delta(&bad, &id), Err(GeometryError::NonPositiveDelta(_))));
}

#[test]
fn folded_mapping_reports_negative_jacobian() {
    let line = |a: [f64; 2], b: [f64; 2]| Curve::Line { from: a, to: b };
    // left and right edges swapped: orientation reversed
    let m = BlockMapping { left: line([1.0, 0.0], [1.0, 1.0]), right: line([0.0, 0.0], [0.0, 1.0]), bottom: line([1.0, 0.0], [0.0, 0.0]), top: line([1.0, 1.0], [0.0, 1.0]) };
    let b = geometry::build_block(m, 11, 11).unwrap();
    assert!(matches!(geometry::compute_metrics(&b, MetricMethod::Analytic), Err(GeometryError::NegativeJacobian { .. })));
}

#[test]
fn corner_mismatch_rejected() {
    let mut m = BlockMapping::<f64>::identity();
    m.top = Curve::Line { from: [0.0, 1.1], to: [1.0, 1.0] };
    assert!(matches!(geometry::build_block(m, 11, 11), Err(GeometryError::CornerMismatch { .. })));
}

#[test]
fn fd10_needs_eleven_nodes() {
    let b = geometry::build_block(BlockMapping::<f64>::identity(), 9, 12).unwrap();
    assert!(matches!(geometry::compute_metrics(&b, MetricMethod::Fd10), Err(GeometryError::TooFewNodes { .. })));
}

#[test]
fn tjunction_blocks_meet_at_junction() {
    let [left, lower, upper] = library::tjunction::<f64>();
    let yb = library::Y_BAR;
    let xb = library::x_bar();
    let p = lower.eval(0.0, 1.0);
    let q = upper.eval(0.0, 0.0);
    assert!((p[0] - xb).abs() < 1e-14 && (p[1] - yb).abs() < 1e-14);
    assert!((q[0] - xb).abs() < 1e-14 && (q[1] - yb).abs() < 1e-14);
    // the left block's right edge passes through the junction at η = ȳ
    let r = left.eval(1.0, yb);
    assert!((r[0] - xb).abs() < 1e-14);
    // horizontal curve passes through the junction
    let h: Sine<f64> = library::tjunction_horizontal();
    assert!((h.eval(xb) - yb).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jacobian_matches_finite_difference(xi in 0.01f64..0.99, eta in 0.01f64..0.99, which in 0usize..5) {
        let (l, r) = library::extreme_interface::<f64>();
        let [a, b, c] = library::tjunction::<f64>();
        let m = [l, r, a, b, c][which];
        let jac = m.jacobian(xi, eta);
        let e = 1e-6;
        let (p, q) = (m.eval(xi + e, eta), m.eval(xi - e, eta));
        let (s, t) = (m.eval(xi, eta + e), m.eval(xi, eta - e));
        let fd = [(p[0] - q[0]) / (2.0 * e), (s[0] - t[0]) / (2.0 * e), (p[1] - q[1]) / (2.0 * e), (s[1] - t[1]) / (2.0 * e)];
        for k in 0..4 {
            prop_assert!((jac[k] - fd[k]).abs() < 1e-6 * (1.0 + jac[k].abs()), "{} {} {}", k, jac[k], fd[k]);
        }
    }
}
