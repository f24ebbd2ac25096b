//! Stability and accuracy measurements: spectra, discrete energies, the
//! interface quadratic form, L2 errors and convergence studies.

use thiserror::Error;

use crate::assembly::{self, AssemblyError, RunConfig, SemiDiscreteSystem};
use crate::coupling::{InterfaceAssembly, InterfaceKind, Scheme};
use crate::dense::{self, c64};
use crate::geometry::Edge;
use crate::report::csv_table;
use crate::timestep::{self, TimeError, TimeState};

/// Largest system handed to the dense eigensolver.
pub const EIG_BUDGET: usize = 5000;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("system of size {n} exceeds the dense eigensolve budget {budget}; use the energy audit instead")]
    SizeOverBudget { n: usize, budget: usize },
    #[error("inconsistent dimensions: {0}")]
    InconsistentDimensions(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("at least 3 levels are needed, got {0}")]
    TooFewLevels(usize),
    #[error("level {level}: {source}")]
    Level { level: usize, source: Box<AnalysisError> },
    #[error("energy split needs a single two-block Cartesian interface with the new scheme")]
    NotCartesianPair,
    #[error("run would need {steps} steps (dt = {dt:e}), over the budget of {budget}")]
    StepBudget { steps: f64, dt: f64, budget: f64 },
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Time(#[from] TimeError),
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<c64>,
    /// Eigenvalues times `h²` of the designated block.
    pub lambda_scaled: Vec<c64>,
    pub h: f64,
    pub rho: f64,
    pub max_real: f64,
    pub max_abs_imag: f64,
}

impl SpectrumReport {
    /// `Re λ ≤ tol_re·ρ` and `|Im λ| ≤ tol_im·ρ`.
    pub fn is_stable(&self, tol_re: f64, tol_im: f64) -> bool {
        self.max_real <= tol_re * self.rho && self.max_abs_imag <= tol_im * self.rho
    }

    pub fn to_csv(&self, hash: &str) -> String {
        csv_table(
            hash,
            &["re", "im", "re_scaled", "im_scaled"],
            self.eigenvalues.iter().zip(&self.lambda_scaled).map(|(l, s)| vec![l.re, l.im, s.re, s.im]),
        )
    }

    pub fn to_kv(&self) -> String {
        format!(
            "size = {}\nh = {:.17e}\nrho = {:.17e}\nmax_real = {:.17e}\nmax_abs_imag = {:.17e}\nmax_real_rel = {:.3e}\nmax_abs_imag_rel = {:.3e}\n",
            self.eigenvalues.len(),
            self.h,
            self.rho,
            self.max_real,
            self.max_abs_imag,
            self.max_real / self.rho,
            self.max_abs_imag / self.rho
        )
    }
}

/// Full eigendecomposition of `D`; eigenvalues are scaled by the squared
/// reference spacing of block `scale_block`.
pub fn spectrum(sys: &SemiDiscreteSystem<f64>, scale_block: usize) -> Result<SpectrumReport, AnalysisError> {
    if sys.n > EIG_BUDGET {
        return Err(AnalysisError::SizeOverBudget { n: sys.n, budget: EIG_BUDGET });
    }
    let ev = dense::eigenvalues(&dense::to_array(&sys.d));
    let (hx, _) = sys.spacing(scale_block.min(sys.blocks.len() - 1));
    let h2 = hx * hx;
    let rho = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_real = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let max_abs_imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let lambda_scaled = ev.iter().map(|z| z * h2).collect();
    Ok(SpectrumReport { eigenvalues: ev, lambda_scaled, h: hx, rho, max_real, max_abs_imag })
}

/// Largest eigenvalue of the mass-weighted symmetric part `W^{-1/2}·sym(W·D)·W^{-1/2}`
/// (same inertia as `sym(W·D)`), with the spectral radius for scale.
pub fn weighted_symmetric_extremes(sys: &SemiDiscreteSystem<f64>) -> Result<(f64, f64), AnalysisError> {
    if sys.n > EIG_BUDGET {
        return Err(AnalysisError::SizeOverBudget { n: sys.n, budget: EIG_BUDGET });
    }
    let isq: Vec<f64> = sys.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let a = dense::to_array(&sys.d.scale_rows(&sys.weights).scale_rows(&isq).scale_cols(&isq));
    let e = dense::sym_eigenvalues(&a);
    Ok((e[e.len() - 1], e[0].abs().max(e[e.len() - 1].abs())))
}

/// Relative asymmetry `‖WD − (WD)ᵀ‖_max / ‖WD‖_max`.
pub fn mass_asymmetry(sys: &SemiDiscreteSystem<f64>) -> f64 {
    let wd = sys.d.scale_rows(&sys.weights);
    wd.asymmetry() / wd.max_abs()
}

/// Energy at one instant. `g1..g3` are the Cartesian split (NaN otherwise).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyPoint {
    pub t: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

#[derive(Clone, Debug, Default)]
pub struct EnergyTrace {
    pub points: Vec<EnergyPoint>,
    pub homogeneous: bool,
}

impl EnergyTrace {
    pub fn push(&mut self, p: EnergyPoint) {
        self.points.push(p);
    }

    /// `max |G(t) − G(0)| / G(0)`.
    pub fn drift(&self) -> f64 {
        let g0 = self.points.first().map(|p| p.g).unwrap_or(0.0);
        if g0 == 0.0 {
            return self.points.iter().map(|p| p.g.abs()).fold(0.0, f64::max);
        }
        self.points.iter().map(|p| (p.g - g0).abs()).fold(0.0, f64::max) / g0
    }

    /// Smallest of `G2`, `G3` over the trace.
    pub fn min_interface_terms(&self) -> f64 {
        self.points.iter().map(|p| p.g2.min(p.g3)).fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self, hash: &str) -> String {
        csv_table(hash, &["t", "G", "G1", "G2", "G3"], self.points.iter().map(|p| vec![p.t, p.g, p.g1, p.g2, p.g3]))
    }
}

fn dot_w(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), z)| x * y * z).sum()
}

/// Mass-weighted energy `u_tᵀ W u_t − uᵀ W D u`.
pub fn generic_energy(sys: &SemiDiscreteSystem<f64>, s: &TimeState<f64>) -> f64 {
    let du = sys.d.matvec(&s.w);
    dot_w(&s.wt, &s.wt, &sys.weights) - dot_w(&s.w, &du, &sys.weights)
}

fn quad_h(x: &[f64], y: &[f64], h: &[f64]) -> f64 {
    dot_w(x, y, h)
}

fn cartesian_interface(sys: &SemiDiscreteSystem<f64>) -> Option<&InterfaceAssembly<f64>> {
    match sys.interfaces.as_slice() {
        [ia] if ia.spec.kind == InterfaceKind::Cartesian
            && ia.spec.scheme == Scheme::NewSplit
            && ia.pieces_u.len() == 1
            && ia.pieces_v.len() == 1
            && ia.pieces_u[0].piece.edge.normal_is_xi()
            && ia.pieces_v[0].piece.edge.normal_is_xi() =>
        {
            Some(ia)
        }
        _ => None,
    }
}

/// `G1`, `G2`, `G3` of a two-block Cartesian interface with the new scheme:
///
/// ```text
/// G1 = u_tᵀ𝐇u_t + Σ_blocks uᵀ(H_x⊗M_y + M̃_x⊗H_y)u,  M̃_x = M_x − hθ(e S)ᵀ(e S) at the interface end
/// G2 = hθ‖f_u‖² − f_uᵀH(tr_u − I_v2u tr_v) + τ/2‖tr_u − I_v2u tr_v‖²
/// G3 = hθ‖f_v‖² + f_vᵀH(tr_v − I_u2v tr_u) + τ/2‖I_u2v tr_u − tr_v‖²
/// ```
pub fn cartesian_energy(sys: &SemiDiscreteSystem<f64>, s: &TimeState<f64>) -> Result<EnergyPoint, AnalysisError> {
    let ia = cartesian_interface(sys).ok_or(AnalysisError::NotCartesianPair)?;
    let mut g1 = dot_w(&s.wt, &s.wt, &sys.weights);
    let mut side_terms = [0.0; 2];
    for (k, piece) in [&ia.pieces_u[0], &ia.pieces_v[0]].into_iter().enumerate() {
        let b = &sys.blocks[piece.piece.block];
        let (nx, ny) = (b.block.nx, b.block.ny);
        let u = &s.w[b.offset..b.offset + b.len()];
        let (h, theta) = (b.sx.grid.h, b.sx.theta);
        // H_x ⊗ M_y
        for ix in 0..nx {
            let line = &u[ix * ny..(ix + 1) * ny];
            g1 += b.sx.h[ix] * line.iter().zip(b.sy.m.matvec(line)).map(|(a, c)| a * c).sum::<f64>();
        }
        // M_x ⊗ H_y
        let srow = if piece.piece.edge == Edge::Right { nx - 1 } else { 0 };
        for iy in 0..ny {
            let line: Vec<f64> = (0..nx).map(|ix| u[ix * ny + iy]).collect();
            let mu = b.sx.m.matvec(&line);
            let su: f64 = b.sx.s.row(srow).map(|(j, v)| v * line[j]).sum();
            let m = line.iter().zip(&mu).map(|(a, c)| a * c).sum::<f64>() - h * theta * su * su;
            g1 += b.sy.h[iy] * m;
        }
        let f = piece.flux.matvec(&s.w);
        let tr = piece.trace.matvec(&s.w);
        let p = piece.partner_trace.matvec(&s.w);
        let jump: Vec<f64> = tr.iter().zip(&p).map(|(a, c)| a - c).collect();
        side_terms[k] = h * theta * quad_h(&f, &f, &piece.h_t) - piece.sign * quad_h(&f, &jump, &piece.h_t)
            + 0.5 * piece.tau * quad_h(&jump, &jump, &piece.h_t);
    }
    let [g2, g3] = side_terms;
    Ok(EnergyPoint { t: s.t, g: g1 + g2 + g3, g1, g2, g3 })
}

/// Cartesian split when available, generic energy otherwise.
pub fn energy(sys: &SemiDiscreteSystem<f64>, s: &TimeState<f64>) -> EnergyPoint {
    match cartesian_energy(sys, s) {
        Ok(p) => p,
        Err(_) => EnergyPoint { t: s.t, g: generic_energy(sys, s), g1: f64::NAN, g2: f64::NAN, g3: f64::NAN },
    }
}

/// Energy along a trajectory.
pub fn energy_trace<'a>(sys: &SemiDiscreteSystem<f64>, trajectory: impl IntoIterator<Item = &'a TimeState<f64>>) -> EnergyTrace {
    let mut tr = EnergyTrace { points: Vec::new(), homogeneous: sys.solution.is_homogeneous() && sys.solution.amp == 0.0 };
    for s in trajectory {
        tr.push(energy(sys, s));
    }
    tr
}

/// Inputs of the interface quadratic form for one interface.
#[derive(Clone, Debug, PartialEq)]
pub struct FormInputs {
    pub tau: f64,
    pub sigma: f64,
    pub delta: f64,
    pub h_u: f64,
    pub h_v: f64,
    /// Tangential norm, normal and cross coefficients on side `u`.
    pub hn_u: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub hn_v: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceFormReport {
    pub lambda_min_a1: f64,
    pub lambda_min_a2: f64,
    pub norm: f64,
    /// Smallest eigenvalue over the per-node 4×4 blocks.
    pub per_node_min: f64,
    pub psd: bool,
}

impl InterfaceFormReport {
    pub fn to_kv(&self) -> String {
        format!(
            "lambda_min_a1 = {:.17e}\nlambda_min_a2 = {:.17e}\nnorm = {:.17e}\nper_node_min = {:.17e}\npsd = {}\n",
            self.lambda_min_a1, self.lambda_min_a2, self.norm, self.per_node_min, self.psd
        )
    }
}

/// The 4×4 coefficient pattern of one node; `flip = −1` for the `v` side.
fn node_block(tau: f64, a: f64, b: f64, hsd: f64, delta: f64, flip: f64) -> [[f64; 4]; 4] {
    let (q, fa, fb) = (tau / 4.0, flip * a / 4.0, flip * b / 4.0);
    [
        [q, -fa, -fb, -q],
        [-fa, hsd / 2.0, 0.0, fa],
        [-fb, 0.0, delta / 2.0, fb],
        [-q, fa, fb, q],
    ]
}

fn assemble_side_form(tau: f64, h: f64, sigma: f64, delta: f64, hn: &[f64], a: &[f64], b: &[f64], flip: f64) -> (ndarray::Array2<f64>, f64) {
    let n = hn.len();
    let mut m = ndarray::Array2::<f64>::zeros((4 * n, 4 * n));
    let mut node_min = f64::INFINITY;
    for i in 0..n {
        let blk = node_block(tau, a[i], b[i], h * sigma * delta, delta, flip);
        let mut small = ndarray::Array2::<f64>::zeros((4, 4));
        for r in 0..4 {
            for c in 0..4 {
                m[[r * n + i, c * n + i]] = blk[r][c] * hn[i];
                small[[r, c]] = blk[r][c] * hn[i];
            }
        }
        node_min = node_min.min(dense::min_sym_eigenvalue(&small));
    }
    (m, node_min)
}

/// Assembles `A₁` (side `u`) and `A₂` (side `v`) and checks them for
/// positive semi-definiteness at `10⁻¹²·‖A‖`.
pub fn interface_form_psd(inp: &FormInputs) -> Result<InterfaceFormReport, AnalysisError> {
    let nu = inp.hn_u.len();
    let nv = inp.hn_v.len();
    if inp.a.len() != nu || inp.b.len() != nu || inp.alpha.len() != nv || inp.beta.len() != nv {
        return Err(AnalysisError::InconsistentDimensions(format!(
            "u: {nu}/{}/{}, v: {nv}/{}/{}",
            inp.a.len(),
            inp.b.len(),
            inp.alpha.len(),
            inp.beta.len()
        )));
    }
    let (a1, n1) = assemble_side_form(inp.tau, inp.h_u, inp.sigma, inp.delta, &inp.hn_u, &inp.a, &inp.b, 1.0);
    let (a2, n2) = assemble_side_form(inp.tau, inp.h_v, inp.sigma, inp.delta, &inp.hn_v, &inp.alpha, &inp.beta, -1.0);
    let norm = dense::max_abs(&a1).max(dense::max_abs(&a2));
    let l1 = dense::min_sym_eigenvalue(&a1);
    let l2 = dense::min_sym_eigenvalue(&a2);
    let tol = 1e-12 * norm;
    Ok(InterfaceFormReport { lambda_min_a1: l1, lambda_min_a2: l2, norm, per_node_min: n1.min(n2), psd: l1 >= -tol && l2 >= -tol })
}

/// Form inputs for every piece pairing of an assembled interface, with the
/// per-piece penalty `τ'·L` (or `tau_override·L`).
pub fn form_inputs(sys: &SemiDiscreteSystem<f64>, ia: &InterfaceAssembly<f64>, tau_override: Option<f64>) -> Vec<FormInputs> {
    let tau = tau_override.unwrap_or(ia.tau.tau);
    let sigma = ia.tau.borrowing;
    let delta = ia.tau.delta;
    let side = |p: &crate::coupling::PieceOps<f64>| {
        let b = &sys.blocks[p.piece.block];
        (b.normal_spacing(p.piece.edge), p.h_t.clone(), b.metrics.normal_coefficient(p.piece.edge), b.metrics.edge_b(p.piece.edge))
    };
    let mut out = Vec::new();
    // each side is checked against itself in both slots: A₁ and A₂ only couple
    // quantities of one side, so pieces are independent
    for p in ia.pieces_u.iter().chain(&ia.pieces_v) {
        let (h, hn, a, b) = side(p);
        let t = tau * p.piece.length();
        out.push(FormInputs { tau: t, sigma, delta, h_u: h, h_v: h, hn_u: hn.clone(), a: a.clone(), b: b.clone(), hn_v: hn, alpha: a, beta: b });
    }
    out
}

/// `√(h_x·h_y·eᵀe)`.
pub fn l2_error(u_h: &[f64], u_exact: &[f64], hx: f64, hy: f64) -> Result<f64, AnalysisError> {
    if u_h.len() != u_exact.len() {
        return Err(AnalysisError::LengthMismatch(u_h.len(), u_exact.len()));
    }
    Ok((hx * hy * u_h.iter().zip(u_exact).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sqrt())
}

/// Multi-block L2 error: per-block squares summed, then the root.
pub fn system_l2_error(sys: &SemiDiscreteSystem<f64>, u_h: &[f64], t: f64) -> f64 {
    let (ex, _) = sys.exact(t);
    let mut sum = 0.0;
    for (i, b) in sys.blocks.iter().enumerate() {
        let (hx, hy) = sys.spacing(i);
        let r = b.offset..b.offset + b.len();
        let e = l2_error(&u_h[r.clone()], &ex[r], hx, hy).expect("block slice lengths");
        sum += e * e;
    }
    sum.sqrt()
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub dt: f64,
    pub steps: usize,
    pub rho: f64,
    /// `(t, L2 error)` at the observer cadence (and the final time).
    pub errors: Vec<(f64, f64)>,
    pub energy: EnergyTrace,
    pub final_error: f64,
    pub max_error: f64,
}

impl RunReport {
    pub fn errors_csv(&self, hash: &str) -> String {
        csv_table(hash, &["t", "l2_error"], self.errors.iter().map(|&(t, e)| vec![t, e]))
    }

    pub fn to_kv(&self) -> String {
        format!(
            "dt = {:.17e}\nsteps = {}\nrho = {:.17e}\nfinal_error = {:.17e}\nmax_error = {:.17e}\nenergy_drift = {:.17e}\n",
            self.dt,
            self.steps,
            self.rho,
            self.final_error,
            self.max_error,
            self.energy.drift()
        )
    }
}

/// Default ceiling on RK4 steps for a single run.
pub const STEP_BUDGET: f64 = 2.0e6;

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Fixed step; `None` uses the config (`dt`, else `cfl·2.8/√ρ`).
    pub dt: Option<f64>,
    pub cadence: usize,
    pub track_energy: bool,
    pub step_budget: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { dt: None, cadence: 1, track_energy: false, step_budget: STEP_BUDGET }
    }
}

/// Step size and spectral radius estimate for a system.
pub fn choose_dt(sys: &SemiDiscreteSystem<f64>, cfg: &RunConfig, fixed: Option<f64>) -> (f64, f64) {
    let rho = timestep::spectral_radius(sys, 50);
    let dt = match fixed {
        Some(dt) => dt,
        None if cfg.dt > 0.0 => cfg.dt,
        None => timestep::stable_dt(rho, cfg.cfl),
    };
    (dt, rho)
}

/// Integrates the manufactured-solution problem from its exact initial data.
pub fn run_system(sys: &SemiDiscreteSystem<f64>, cfg: &RunConfig, opts: &RunOptions) -> Result<RunReport, AnalysisError> {
    let (dt, rho) = choose_dt(sys, cfg, opts.dt);
    let steps = (cfg.t_end / dt).ceil();
    if steps > opts.step_budget {
        return Err(AnalysisError::StepBudget { steps, dt, budget: opts.step_budget });
    }
    let guard = timestep::stable_dt(rho, 1.0);
    let (w, wt) = sys.exact(0.0);
    let mut rep = RunReport { dt, rho, ..Default::default() };
    rep.energy.homogeneous = sys.solution.is_homogeneous();
    let cadence = opts.cadence.max(1);
    let t_end = cfg.t_end;
    let fin = timestep::integrate(sys, TimeState { t: 0.0, w, wt }, dt, t_end, Some(guard), |step, s| {
        let last = (s.t - t_end).abs() <= 1e-12 * t_end.max(1.0);
        if step % cadence == 0 || last {
            rep.errors.push((s.t, system_l2_error(sys, &s.w, s.t)));
            if opts.track_energy {
                rep.energy.push(energy(sys, s));
            }
        }
    })?;
    rep.final_error = system_l2_error(sys, &fin.w, fin.t);
    rep.max_error = rep.errors.iter().map(|e| e.1).fold(0.0, f64::max);
    rep.steps = (t_end / dt).ceil() as usize;
    Ok(rep)
}

pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunReport, AnalysisError> {
    let sys = assembly::assemble_system(cfg)?;
    run_system(&sys, cfg, opts)
}

#[derive(Clone, Debug, Default)]
pub struct RateTable {
    /// `(level, N, dt, error)`, `N` = nodes in x of the first block.
    pub rows: Vec<(usize, usize, f64, f64)>,
    pub rate: f64,
}

impl RateTable {
    pub fn to_csv(&self, hash: &str) -> String {
        csv_table(hash, &["level", "N", "dt", "l2_error"], self.rows.iter().map(|r| vec![r.0 as f64, r.1 as f64, r.2, r.3]))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{:>5} {:>6} {:>12} {:>14} {:>6}\n", "level", "N", "dt", "l2_error", "rate");
        for (i, r) in self.rows.iter().enumerate() {
            let rate = if i == 0 {
                String::from("-")
            } else {
                let p = &self.rows[i - 1];
                format!("{:.2}", (p.3 / r.3).ln() / (r.1 as f64 / p.1 as f64).ln())
            };
            s.push_str(&format!("{:>5} {:>6} {:>12.4e} {:>14.6e} {:>6}\n", r.0, r.1, r.2, r.3, rate));
        }
        s.push_str(&format!("observed rate (last 3 levels) = {:.3}\n", self.rate));
        s
    }
}

/// Least-squares slope of `log e` against `log N`, negated, over the last
/// three points.
pub fn observed_rate(ns: &[f64], errs: &[f64]) -> f64 {
    let k = ns.len().min(3);
    let (x, y): (Vec<f64>, Vec<f64>) = ns[ns.len() - k..].iter().zip(&errs[errs.len() - k..]).map(|(n, e)| (n.ln(), e.ln())).unzip();
    let mx = x.iter().sum::<f64>() / k as f64;
    let my = y.iter().sum::<f64>() / k as f64;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    -sxy / sxx
}

/// Runs `levels` refinements of `base` (node counts doubled per level) and
/// fits the convergence rate. `dt_of` picks the step for each level's system.
pub fn convergence_study_with(
    base: &RunConfig,
    levels: usize,
    mut dt_of: impl FnMut(usize, &SemiDiscreteSystem<f64>) -> Option<f64>,
) -> Result<RateTable, AnalysisError> {
    if levels < 3 {
        return Err(AnalysisError::TooFewLevels(levels));
    }
    let mut table = RateTable::default();
    for level in 0..levels {
        let cfg = base.refined(level as u32);
        let wrap = |e: AnalysisError| AnalysisError::Level { level, source: Box::new(e) };
        let sys = assembly::assemble_system(&cfg).map_err(|e| wrap(e.into()))?;
        let opts = RunOptions { dt: dt_of(level, &sys), cadence: usize::MAX, ..Default::default() };
        let rep = run_system(&sys, &cfg, &opts).map_err(wrap)?;
        table.rows.push((level, cfg.blocks[0].nx, rep.dt, rep.final_error));
    }
    // rates against 1/h, i.e. the interval count
    let ns: Vec<f64> = table.rows.iter().map(|r| (r.1 - 1) as f64).collect();
    let es: Vec<f64> = table.rows.iter().map(|r| r.3).collect();
    table.rate = observed_rate(&ns, &es);
    Ok(table)
}

pub fn convergence_study(base: &RunConfig, levels: usize) -> Result<RateTable, AnalysisError> {
    convergence_study_with(base, levels, |_, _| None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_block_psd_exactly_at_bound() {
        let (a, b, h, s, d) = (1.7, 0.4, 0.05, 0.39, 0.6);
        let tau = (a * a + b * b * h * s) / (2.0 * h * s * d);
        let blk = node_block(tau, a, b, h * s * d, d, 1.0);
        let m = ndarray::Array2::from_shape_fn((4, 4), |(i, j)| blk[i][j]);
        assert!(dense::min_sym_eigenvalue(&m) > -1e-12 * tau);
        let blk = node_block(0.9 * tau, a, b, h * s * d, d, 1.0);
        let m = ndarray::Array2::from_shape_fn((4, 4), |(i, j)| blk[i][j]);
        assert!(dense::min_sym_eigenvalue(&m) < 0.0);
    }

    #[test]
    fn observed_rate_exact_power_law() {
        let ns = [10.0, 20.0, 40.0, 80.0];
        let es: Vec<f64> = ns.iter().map(|n: &f64| 3.0 * n.powf(-4.0)).collect();
        assert!((observed_rate(&ns, &es) - 4.0).abs() < 1e-12);
    }
}
