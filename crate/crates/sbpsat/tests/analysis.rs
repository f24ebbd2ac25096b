use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbpsat::analysis;
use sbpsat::assembly::{self, presets};
use sbpsat::timestep::TimeState;

fn random_state(n: usize, seed: u64) -> TimeState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TimeState { t: 0.0, w: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(), wt: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() }
}

#[test]
fn cartesian_split_matches_generic_energy() {
    for (order, nu, nv) in [(2, 11, 11), (4, 13, 25), (6, 21, 41)] {
        let cfg = presets::cartesian_pair(order, nu, nv, "zero");
        let sys = assembly::assemble_system(&cfg).unwrap();
        let s = random_state(sys.n, 3);
        let p = analysis::cartesian_energy(&sys, &s).unwrap();
        let e = analysis::generic_energy(&sys, &s);
        assert!((p.g - e).abs() <= 1e-10 * e.abs(), "order {order}: {} vs {}", p.g, e);
    }
}

#[test]
fn cached_forcing_matches_direct_evaluation() {
    let sys = assembly::assemble_system(&presets::tjunction_converge(4)).unwrap();
    for t in [0.0, 0.37, 1.9] {
        let a = sys.forcing(t);
        let b = sys.forcing_direct(t);
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err <= 1e-12 * scale, "t = {t}: {err} vs {scale}");
    }
}

#[test]
fn single_block_order2_spectrum_is_stable() {
    let sys = assembly::assemble_system(&presets::single_block(2, 11, "zero")).unwrap();
    let r = analysis::spectrum(&sys, 0).unwrap();
    assert_eq!(r.eigenvalues.len(), 121);
    assert!(r.max_real <= 1e-8 * r.rho && r.max_abs_imag <= 1e-6 * r.rho, "{}", r.to_kv());
    // h² scaling of the designated block
    assert!((r.h - 0.1).abs() < 1e-15);
    assert!((r.lambda_scaled[0] - r.eigenvalues[0] * 0.01).norm() < 1e-12 * r.rho);
}

#[test]
fn spectrum_refuses_over_budget() {
    let sys = assembly::assemble_system(&presets::single_block(2, 71, "zero")).unwrap();
    assert!(matches!(analysis::spectrum(&sys, 0), Err(analysis::AnalysisError::SizeOverBudget { .. })));
}

#[test]
fn zero_data_has_zero_energy() {
    let sys = assembly::assemble_system(&presets::cartesian_pair(4, 11, 21, "zero")).unwrap();
    let p = analysis::energy(&sys, &TimeState::zeros(sys.n));
    assert_eq!((p.g, p.g1, p.g2, p.g3), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn energy_rate_vanishes_along_exact_flow() {
    // directional derivative of G along (w_t, D w) by central differences
    for cfg in [presets::cartesian_pair(4, 13, 25, "zero"), presets::tjunction_converge(6)] {
        let sys = assembly::assemble_system(&cfg).unwrap();
        let s = random_state(sys.n, 9);
        let dw = sys.d.matvec(&s.w);
        let shifted = |e: f64| TimeState { t: 0.0, w: s.w.iter().zip(&s.wt).map(|(a, b)| a + e * b).collect(), wt: s.wt.iter().zip(&dw).map(|(a, b)| a + e * b).collect() };
        let eps = 1e-3;
        let g0 = analysis::generic_energy(&sys, &s);
        let rate = (analysis::generic_energy(&sys, &shifted(eps)) - analysis::generic_energy(&sys, &shifted(-eps))) / (2.0 * eps);
        assert!(rate.abs() <= 1e-9 * g0, "{:?}: {rate:e} vs {g0:e}", cfg.preset);
    }
}

#[test]
fn standing_wave_energy_drift_one_period() {
    let n = 21;
    let h = 1.0 / (n - 1) as f64;
    let mut cfg = presets::cartesian_pair(4, n, n, "standing");
    cfg.tau_safety = 1.2;
    cfg.t_end = 2f64.sqrt();
    let sys = assembly::assemble_system(&cfg).unwrap();
    let run = |dt: f64| analysis::run_system(&sys, &cfg, &analysis::RunOptions { dt: Some(dt), track_energy: true, ..Default::default() }).unwrap();
    let (a, b) = (run(h / 4.0), run(h / 8.0));
    assert!(a.energy.drift() <= 1e-6, "{:e}", a.energy.drift());
    let g0 = a.energy.points[0].g;
    assert!(a.energy.min_interface_terms() >= -1e-10 * g0);
    // RK4 energy loss per step is O(dt⁶), so over a fixed time the drift
    // scales as dt⁵
    let ratio = a.energy.drift() / b.energy.drift();
    assert!((ratio / 32.0 - 1.0).abs() <= 0.2, "{ratio}");
}

/// `G2` minimized over states that are `j + c·(x − 1)` next to the interface.
fn min_g2_near_interface(safety: f64) -> (f64, f64) {
    let n = 21;
    let mut cfg = presets::cartesian_pair(4, n, n, "zero");
    cfg.tau_safety = safety;
    let sys = assembly::assemble_system(&cfg).unwrap();
    let state = |j: f64, c: f64| {
        let mut w = vec![0.0; sys.n];
        for k in 0..n * n {
            if sys.x[k] > 1.0 - 5.5 / (n - 1) as f64 {
                w[k] = j + c * (sys.x[k] - 1.0);
            }
        }
        TimeState { t: 0.0, w, wt: vec![0.0; sys.n] }
    };
    let g = |j: f64, c: f64| analysis::cartesian_energy(&sys, &state(j, c)).unwrap();
    // G2 is a quadratic form in (j, c): recover it from three evaluations
    let (a, d) = (g(1.0, 0.0).g2, g(0.0, 1.0).g2);
    let b = (g(1.0, 1.0).g2 - a - d) / 2.0;
    let lmin = (a + d) / 2.0 - ((a - d).powi(2) / 4.0 + b * b).sqrt();
    let p = g(b, lmin - a);
    (p.g2.min(p.g3), p.g)
}

#[test]
fn interface_energy_terms_negative_below_bound() {
    let (m, g) = min_g2_near_interface(0.5);
    assert!(m < -1e-6 * g, "{m:e} vs {g:e}");
    let (m, g) = min_g2_near_interface(1.2);
    assert!(m >= -1e-10 * g, "{m:e} vs {g:e}");
}

fn cartesian_form(order: usize, tau_scale: f64) -> analysis::InterfaceFormReport {
    let sys = assembly::assemble_system(&presets::cartesian_pair(order, 17, 17, "zero")).unwrap();
    let ia = &sys.interfaces[0];
    let inp = analysis::form_inputs(&sys, ia, Some(tau_scale * ia.tau.tau_min));
    let r: Vec<_> = inp.iter().map(|i| analysis::interface_form_psd(i).unwrap()).collect();
    r.into_iter().min_by(|a, b| a.lambda_min_a1.min(a.lambda_min_a2).total_cmp(&b.lambda_min_a1.min(b.lambda_min_a2))).unwrap()
}

#[test]
fn cartesian_form_at_bound_is_singular_psd() {
    for order in [2, 4, 6] {
        // with Λ_a = I, Λ_b = 0, δ = 1 the node form is
        // τ/4·d² − d·x₂/2 + hσ/2·x₂² + x₃²/2 in d = x₁ − x₄: singular at τ = 1/(2hσ)
        let r = cartesian_form(order, 1.0);
        let lmin = r.lambda_min_a1.min(r.lambda_min_a2);
        assert!(r.psd && lmin >= -1e-12 * r.norm && lmin <= 1e-12 * r.norm, "order {order}: {}", r.to_kv());
        assert!(cartesian_form(order, 10.0).psd);
        let z = cartesian_form(order, 0.0);
        assert!(!z.psd && z.lambda_min_a1 < 0.0, "{}", z.to_kv());
    }
}

#[test]
fn form_rejects_inconsistent_dimensions() {
    let inp = analysis::FormInputs { tau: 1.0, sigma: 0.5, delta: 1.0, h_u: 0.1, h_v: 0.1, hn_u: vec![1.0; 3], a: vec![1.0; 3], b: vec![0.0; 2], hn_v: vec![1.0; 3], alpha: vec![1.0; 3], beta: vec![0.0; 3] };
    assert!(matches!(analysis::interface_form_psd(&inp), Err(analysis::AnalysisError::InconsistentDimensions(_))));
}

#[test]
fn l2_error_examples() {
    let z = vec![0.25; 7];
    assert_eq!(analysis::l2_error(&z, &z, 0.1, 0.2).unwrap(), 0.0);
    let ones = vec![1.0; 12];
    let zeros = vec![0.0; 12];
    assert!((analysis::l2_error(&ones, &zeros, 0.1, 0.2).unwrap() - (0.1f64 * 0.2 * 12.0).sqrt()).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (nx, ny) = (13, 9);
    let a: Vec<f64> = (0..nx * ny).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..nx * ny).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut sum = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let e = a[i * ny + j] - b[i * ny + j];
            sum += e * e;
        }
    }
    let want = (0.05 * 0.125 * sum).sqrt();
    assert!((analysis::l2_error(&a, &b, 0.05, 0.125).unwrap() - want).abs() <= 1e-14 * want);
    assert!(matches!(analysis::l2_error(&a, &b[1..], 0.1, 0.1), Err(analysis::AnalysisError::LengthMismatch(117, 116))));
}

#[test]
fn system_error_combines_block_squares() {
    let sys = assembly::assemble_system(&presets::cartesian_pair(2, 5, 9, "smooth")).unwrap();
    let (ex, _) = sys.exact(0.3);
    let u: Vec<f64> = ex.iter().map(|v| v + 1.0).collect();
    // unit error everywhere: Σ h_x·h_y·m over blocks
    let want = (0.25f64 * 0.25 * 25.0 + 0.125 * 0.125 * 81.0).sqrt();
    assert!((analysis::system_l2_error(&sys, &u, 0.3) - want).abs() < 1e-14);
}

#[test]
fn convergence_needs_three_levels() {
    assert!(matches!(analysis::convergence_study(&presets::single_block(2, 11, "smooth"), 2), Err(analysis::AnalysisError::TooFewLevels(2))));
}

#[test]
fn run_reports_zero_error_for_zero_data() {
    let mut cfg = presets::cartesian_pair(4, 11, 21, "zero");
    cfg.t_end = 0.1;
    let r = analysis::run(&cfg, &analysis::RunOptions::default()).unwrap();
    assert_eq!(r.max_error, 0.0);
    assert!(r.steps > 0 && r.errors.len() == r.steps + 1);
}

#[test]
fn run_refuses_step_budget() {
    let mut cfg = presets::single_block(2, 11, "smooth");
    cfg.t_end = 10.0;
    let opts = analysis::RunOptions { dt: Some(1e-3), step_budget: 100.0, ..Default::default() };
    assert!(matches!(analysis::run(&cfg, &opts), Err(analysis::AnalysisError::StepBudget { .. })));
}
