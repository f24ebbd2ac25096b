//! SAT interface coupling between blocks.
//!
//! An interface has two sides, each a list of block edges ("pieces") laid
//! end to end along a common parameter `t`. A piece on `[t0, t1]` has length
//! `L = t1 − t0`; its reference tangential coordinate is `(t − t0)/L`. Two-block
//! interfaces have one piece per side on `[0, 1]`; a T-junction has one
//! piece on one side and two on the other.
//!
//! For a piece with outward sign `s`, trace `T`, conormal flux
//! `F = Λ_a·S + Λ_b·D1_t` and partner data interpolated onto it, the four
//! addends are
//!
//! ```text
//! deriv     = s/2 · 𝐇⁻¹ Fᵀ H_t (T − P)
//! trace     = −τ/2 · H_n⁻¹ Tᵀ (T − P)          (legacy: −τ · …)
//! composed  = −τ/2 · H_n⁻¹ Tᵀ (I_b2a I_a2b T − P)  (legacy: 0)
//! flux      = −s/2 · H_n⁻¹ Tᵀ (F − Q)
//! ```
//!
//! with `P = I_b2a T_B` and `Q = L·I_b2a (F_B / L_B)`. Fluxes are carried
//! per unit `t` on the glue parameter and the penalty is `τ = τ'·L` on each
//! piece, which keeps the coupled operator self-adjoint in the mass norm.

use thiserror::Error;

use crate::geometry::{Block, Edge, MetricField};
use crate::interp::{self, InterpError, InterpPair, Segment};
use crate::sbp::{self, SbpError, SbpSet};
use crate::scalar::Real;
use crate::sparse::Csr;

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("non-positive input: {0}")]
    NonPositiveInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("interface pair failed certification: {0}")]
    UncertifiedPair(String),
    #[error("junction points do not match: {0}")]
    NonMatchingJunction(String),
    #[error("metric invariant violated: {0}")]
    MetricInvariant(String),
    #[error("invalid interface: {0}")]
    InvalidInterface(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Sbp(#[from] SbpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterfaceKind {
    Cartesian,
    Curvilinear,
    TJunction,
}

impl InterfaceKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cartesian" => Some(Self::Cartesian),
            "curvilinear" => Some(Self::Curvilinear),
            "tjunction" => Some(Self::TJunction),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Cartesian => "cartesian",
            Self::Curvilinear => "curvilinear",
            Self::TJunction => "tjunction",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    NewSplit,
    Legacy,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "new-split" | "new" => Some(Self::NewSplit),
            "legacy" => Some(Self::Legacy),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::NewSplit => "new-split",
            Self::Legacy => "legacy",
        }
    }
}

/// Block edge occupying `[t0, t1]` of an interface parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub block: usize,
    pub edge: Edge,
    pub t0: f64,
    pub t1: f64,
}

impl Piece {
    pub fn whole(block: usize, edge: Edge) -> Self {
        Piece { block, edge, t0: 0.0, t1: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceSpec {
    pub kind: InterfaceKind,
    pub scheme: Scheme,
    pub side_u: Vec<Piece>,
    pub side_v: Vec<Piece>,
    pub tau_safety: f64,
}

/// One block's discrete operators and its place in the global vector.
#[derive(Clone, Debug)]
pub struct BlockDisc<T> {
    pub offset: usize,
    pub block: Block<T>,
    pub metrics: MetricField<T>,
    pub sx: SbpSet<T>,
    pub sy: SbpSet<T>,
    /// Diagonal of `H_x ⊗ H_y` (without `J`).
    pub hw: Vec<T>,
}

impl<T: Real> BlockDisc<T> {
    pub fn new(offset: usize, order: usize, block: Block<T>, metrics: MetricField<T>) -> Result<Self, SbpError> {
        let sx = sbp::build_sbp_set(order, sbp::Grid1D::unit(block.nx)?)?;
        let sy = sbp::build_sbp_set(order, sbp::Grid1D::unit(block.ny)?)?;
        let mut hw = Vec::with_capacity(block.len());
        for ix in 0..block.nx {
            for iy in 0..block.ny {
                hw.push(sx.h[ix] * sy.h[iy]);
            }
        }
        Ok(BlockDisc { offset, block, metrics, sx, sy, hw })
    }

    pub fn len(&self) -> usize {
        self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block.is_empty()
    }

    /// Global indices of the edge nodes, by tangential index.
    pub fn edge_nodes(&self, edge: Edge) -> Vec<usize> {
        edge.nodes(self.block.nx, self.block.ny).into_iter().map(|k| k + self.offset).collect()
    }

    /// Norm weight of the boundary node in the normal direction.
    pub fn normal_weight(&self, edge: Edge) -> T {
        match edge {
            Edge::Left => self.sx.h[0],
            Edge::Right => self.sx.h[self.block.nx - 1],
            Edge::Bottom => self.sy.h[0],
            Edge::Top => self.sy.h[self.block.ny - 1],
        }
    }

    /// Tangential norm along the edge.
    pub fn tangential_norm(&self, edge: Edge) -> &[T] {
        if edge.normal_is_xi() { &self.sy.h } else { &self.sx.h }
    }

    /// Reference spacing normal to the edge.
    pub fn normal_spacing(&self, edge: Edge) -> T {
        if edge.normal_is_xi() { self.sx.grid.h } else { self.sy.grid.h }
    }

    /// Edge trace selector, `n_t × n_global`.
    pub fn trace_op(&self, edge: Edge, n_global: usize) -> Csr<T> {
        let nodes = self.edge_nodes(edge);
        Csr::from_triplets(nodes.len(), n_global, nodes.iter().enumerate().map(|(k, &g)| (k, g, T::one())))
    }

    /// Conormal flux on the edge, `n_t × n_global`: normal coefficient times
    /// the boundary derivative plus `b` times the tangential derivative.
    pub fn flux_op(&self, edge: Edge, n_global: usize) -> Csr<T> {
        let (nx, ny) = (self.block.nx, self.block.ny);
        let coef = self.metrics.normal_coefficient(edge);
        let bvals = self.metrics.edge_b(edge);
        let mut trips = Vec::new();
        let o = self.offset;
        match edge {
            Edge::Left | Edge::Right => {
                let row = if edge == Edge::Left { 0 } else { nx - 1 };
                for iy in 0..ny {
                    for (jx, v) in self.sx.s.row(row) {
                        trips.push((iy, o + jx * ny + iy, coef[iy] * v));
                    }
                    for (jy, v) in self.sy.d1.row(iy) {
                        trips.push((iy, o + row * ny + jy, bvals[iy] * v));
                    }
                }
            }
            Edge::Bottom | Edge::Top => {
                let row = if edge == Edge::Bottom { 0 } else { ny - 1 };
                for ix in 0..nx {
                    for (jy, v) in self.sy.s.row(row) {
                        trips.push((ix, o + ix * ny + jy, coef[ix] * v));
                    }
                    for (jx, v) in self.sx.d1.row(ix) {
                        trips.push((ix, o + jx * ny + row, bvals[ix] * v));
                    }
                }
            }
        }
        Csr::from_triplets(edge.len(nx, ny), n_global, trips)
    }

    /// Physical point of the edge curve at local parameter `s ∈ [0, 1]`.
    pub fn edge_point(&self, edge: Edge, s: T) -> [T; 2] {
        let m = &self.block.mapping;
        match edge {
            Edge::Left => m.left.eval(s),
            Edge::Right => m.right.eval(s),
            Edge::Bottom => m.bottom.eval(s),
            Edge::Top => m.top.eval(s),
        }
    }
}

/// The four addends of one side, each `n_global × n_global`, before `J⁻¹`.
#[derive(Clone, Debug)]
pub struct SatContribution<T> {
    pub deriv: Csr<T>,
    pub trace: Csr<T>,
    pub composed: Csr<T>,
    pub flux: Csr<T>,
}

impl<T: Real> SatContribution<T> {
    pub fn zeros(n: usize) -> Self {
        SatContribution { deriv: Csr::zeros(n, n), trace: Csr::zeros(n, n), composed: Csr::zeros(n, n), flux: Csr::zeros(n, n) }
    }

    pub fn total(&self) -> Csr<T> {
        self.deriv.add(&self.trace).add(&self.composed).add(&self.flux)
    }

    pub fn addends(&self) -> [(&'static str, &Csr<T>); 4] {
        [("deriv", &self.deriv), ("trace", &self.trace), ("composed", &self.composed), ("flux", &self.flux)]
    }

    fn accumulate(&mut self, other: SatContribution<T>) {
        self.deriv = self.deriv.add(&other.deriv);
        self.trace = self.trace.add(&other.trace);
        self.composed = self.composed.add(&other.composed);
        self.flux = self.flux.add(&other.flux);
    }
}

/// Per-piece penalty data.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceTau {
    pub block: usize,
    pub edge: Edge,
    pub length: f64,
    pub h: f64,
    pub a_max: f64,
    pub b_max: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauReport {
    pub kind: InterfaceKind,
    /// θ for Cartesian interfaces, σ otherwise.
    pub borrowing: f64,
    pub delta: f64,
    pub pieces: Vec<PieceTau>,
    /// Bound on the per-unit-length penalty `τ'`.
    pub tau_min: f64,
    pub tau: f64,
    pub safety: f64,
}

impl TauReport {
    /// Penalty applied on a piece of length `L`.
    pub fn piece_tau(&self, length: f64) -> f64 {
        self.tau * length
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let name = if self.kind == InterfaceKind::Cartesian { "theta" } else { "sigma" };
        s.push_str(&format!("kind = {}\n{name} = {:.17e}\ndelta = {:.17e}\n", self.kind.name(), self.borrowing, self.delta));
        for (i, p) in self.pieces.iter().enumerate() {
            s.push_str(&format!(
                "piece.{i} = block={} edge={} length={:.17e} h={:.17e} a_max={:.17e} b_max={:.17e} bound={:.17e}\n",
                p.block,
                p.edge.name(),
                p.length,
                p.h,
                p.a_max,
                p.b_max,
                p.bound
            ));
        }
        s.push_str(&format!("tau_min = {:.17e}\ntau = {:.17e}\nsafety = {}\n", self.tau_min, self.tau, self.safety));
        s
    }
}

fn check_safety(safety: f64) -> Result<(), CouplingError> {
    if !(safety > 0.0) {
        return Err(CouplingError::NonPositiveInput(format!("safety {safety}")));
    }
    Ok(())
}

/// `τ_min = max(1/(2θh_u), 1/(2θh_v))`, `τ = safety·τ_min`.
pub fn compute_tau_cartesian(theta: f64, h_ux: f64, h_vx: f64, safety: f64) -> Result<(f64, f64), CouplingError> {
    if !(theta > 0.0 && h_ux > 0.0 && h_vx > 0.0) {
        return Err(CouplingError::NonPositiveInput(format!("theta {theta}, h {h_ux}, {h_vx}")));
    }
    check_safety(safety)?;
    let tau_min = (1.0 / (2.0 * theta * h_ux)).max(1.0 / (2.0 * theta * h_vx));
    Ok((tau_min, safety * tau_min))
}

/// One side's term of the curvilinear bound, `(a² + b²hσ)/(2hσδ)`.
pub fn curvilinear_bound(sigma: f64, delta: f64, a_max: f64, b_max: f64, h: f64) -> f64 {
    (a_max * a_max + b_max * b_max * h * sigma) / (2.0 * h * sigma * delta)
}

#[allow(clippy::too_many_arguments)]
pub fn compute_tau_curvilinear(
    sigma: f64,
    delta: f64,
    a_max: f64,
    b_max: f64,
    alpha_max: f64,
    beta_max: f64,
    h_ux: f64,
    h_vx: f64,
    safety: f64,
) -> Result<(f64, f64), CouplingError> {
    if !(sigma > 0.0 && delta > 0.0) {
        return Err(CouplingError::NonPositiveInput(format!("sigma {sigma}, delta {delta}")));
    }
    if !(h_ux > 0.0 && h_vx > 0.0) {
        return Err(CouplingError::NonPositiveInput(format!("h {h_ux}, {h_vx}")));
    }
    check_safety(safety)?;
    let tau_min =
        curvilinear_bound(sigma, delta, a_max, b_max, h_ux).max(curvilinear_bound(sigma, delta, alpha_max, beta_max, h_vx));
    Ok((tau_min, safety * tau_min))
}

fn pieces_of<'a>(spec: &'a InterfaceSpec) -> impl Iterator<Item = &'a Piece> {
    spec.side_u.iter().chain(&spec.side_v)
}

/// Penalty bound of an interface. Cartesian interfaces use θ, the others σ
/// (capped by θ of every participating line) and δ over all blocks involved.
pub fn interface_tau<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>], order: usize) -> Result<TauReport, CouplingError> {
    check_safety(spec.tau_safety)?;
    let mut involved: Vec<usize> = pieces_of(spec).map(|p| p.block).collect();
    involved.sort_unstable();
    involved.dedup();
    let mut theta = f64::INFINITY;
    for p in pieces_of(spec) {
        let b = &blocks[p.block];
        let set = if p.edge.normal_is_xi() { &b.sx } else { &b.sy };
        theta = theta.min(set.theta.f64());
    }
    let (borrowing, delta) = match spec.kind {
        InterfaceKind::Cartesian => (theta, 1.0),
        _ => {
            let fields: Vec<&MetricField<T>> = involved.iter().map(|&i| &blocks[i].metrics).collect();
            let delta = crate::geometry::delta_of(&fields).map_err(|e| CouplingError::MetricInvariant(e.to_string()))?;
            (sbp::sigma_family(order)?.min(theta), delta.f64())
        }
    };
    let mut pieces = Vec::new();
    let mut tau_min = 0.0f64;
    for p in pieces_of(spec) {
        let b = &blocks[p.block];
        let (a, bm) = b.metrics.edge_maxima(p.edge);
        let h = b.normal_spacing(p.edge).f64();
        let bound = match spec.kind {
            InterfaceKind::Cartesian => compute_tau_cartesian(borrowing, h, h, 1.0)?.0 * a.f64(),
            _ => curvilinear_bound(borrowing, delta, a.f64(), bm.f64(), h),
        };
        tau_min = tau_min.max(bound / p.length());
        pieces.push(PieceTau { block: p.block, edge: p.edge, length: p.length(), h, a_max: a.f64(), b_max: bm.f64(), bound });
    }
    Ok(TauReport { kind: spec.kind, borrowing, delta, pieces, tau_min, tau: spec.tau_safety * tau_min, safety: spec.tau_safety })
}

/// Operators of one piece after assembly, kept for energy evaluation.
#[derive(Clone, Debug)]
pub struct PieceOps<T> {
    pub piece: Piece,
    pub sign: f64,
    pub tau: f64,
    /// Edge trace, `n_t × n_global`.
    pub trace: Csr<T>,
    /// Conormal flux on the piece's own tangential measure.
    pub flux: Csr<T>,
    /// Partner trace interpolated onto the piece.
    pub partner_trace: Csr<T>,
    /// Partner flux interpolated and rescaled to the piece's measure.
    pub partner_flux: Csr<T>,
    /// `I_b2a I_a2b` applied to this side's trace, restricted to the piece.
    pub composed_trace: Csr<T>,
    pub h_t: Vec<T>,
    pub h_n: T,
}

#[derive(Clone, Debug)]
pub struct InterfaceAssembly<T> {
    pub spec: InterfaceSpec,
    pub tau: TauReport,
    pub pair: InterpPair<T>,
    pub pieces_u: Vec<PieceOps<T>>,
    pub pieces_v: Vec<PieceOps<T>>,
    pub sat_u: SatContribution<T>,
    pub sat_v: SatContribution<T>,
}

impl<T: Real> InterfaceAssembly<T> {
    pub fn total(&self) -> Csr<T> {
        self.sat_u.total().add(&self.sat_v.total())
    }
}

fn vstack<T: Real>(mats: &[Csr<T>]) -> Csr<T> {
    let ncols = mats[0].ncols;
    let mut trips = Vec::new();
    let mut r0 = 0;
    for m in mats {
        trips.extend(m.triplets().map(|(i, j, v)| (i + r0, j, v)));
        r0 += m.nrows;
    }
    Csr::from_triplets(r0, ncols, trips)
}

fn row_block<T: Real>(m: &Csr<T>, r0: usize, n: usize) -> Csr<T> {
    m.select_rows(&(r0..r0 + n).collect::<Vec<_>>())
}

fn validate_side<T: Real>(side: &[Piece], blocks: &[BlockDisc<T>], label: &str) -> Result<(), CouplingError> {
    if side.is_empty() {
        return Err(CouplingError::InvalidInterface(format!("side {label} is empty")));
    }
    for (i, p) in side.iter().enumerate() {
        if p.block >= blocks.len() {
            return Err(CouplingError::InvalidInterface(format!("side {label} piece {i}: no block {}", p.block)));
        }
        if !(p.length() > 0.0) {
            return Err(CouplingError::InvalidInterface(format!("side {label} piece {i}: empty span")));
        }
        if i > 0 && (side[i - 1].t1 - p.t0).abs() > 1e-12 {
            return Err(CouplingError::InvalidInterface(format!("side {label}: gap before piece {i}")));
        }
    }
    Ok(())
}

/// Physical point of a side at glue parameter `t`.
fn side_point<T: Real>(side: &[Piece], blocks: &[BlockDisc<T>], t: f64) -> [f64; 2] {
    let p = side.iter().find(|p| t <= p.t1 + 1e-14).unwrap_or(side.last().unwrap());
    let s = ((t - p.t0) / p.length()).clamp(0.0, 1.0);
    let q = blocks[p.block].edge_point(p.edge, T::lit(s));
    [q[0].f64(), q[1].f64()]
}

/// Checks that both sides trace the same physical curve, including every
/// junction point between pieces.
pub fn check_junctions<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>]) -> Result<(), CouplingError> {
    let (u, v) = (&spec.side_u, &spec.side_v);
    let ends = |s: &[Piece]| (s[0].t0, s.last().unwrap().t1);
    if (ends(u).0 - ends(v).0).abs() > 1e-12 || (ends(u).1 - ends(v).1).abs() > 1e-12 {
        return Err(CouplingError::NonMatchingJunction(format!("parameter spans {:?} vs {:?}", ends(u), ends(v))));
    }
    let mut ts: Vec<f64> = u.iter().chain(v).flat_map(|p| [p.t0, p.t1]).collect();
    let (a, b) = ends(u);
    ts.extend((1..16).map(|k| a + (b - a) * k as f64 / 16.0));
    for side in [u, v] {
        for w in side.windows(2) {
            let end = blocks[w[0].block].edge_point(w[0].edge, T::one());
            let start = blocks[w[1].block].edge_point(w[1].edge, T::zero());
            let d = ((end[0] - start[0]).f64().powi(2) + (end[1] - start[1]).f64().powi(2)).sqrt();
            if d > 1e-10 {
                return Err(CouplingError::NonMatchingJunction(format!("pieces meet with gap {d:e} at t = {}", w[0].t1)));
            }
        }
    }
    for t in ts {
        let (pu, pv) = (side_point(u, blocks, t), side_point(v, blocks, t));
        let d = ((pu[0] - pv[0]).powi(2) + (pu[1] - pv[1]).powi(2)).sqrt();
        if d > 1e-10 {
            return Err(CouplingError::NonMatchingJunction(format!("sides differ by {d:e} at t = {t}")));
        }
    }
    Ok(())
}

fn segments<T: Real>(side: &[Piece], blocks: &[BlockDisc<T>]) -> Vec<Segment<T>> {
    side.iter()
        .map(|p| {
            let b = &blocks[p.block].block;
            Segment::new(p.edge.len(b.nx, b.ny), T::lit(p.t0), T::lit(p.t1))
        })
        .collect()
}

/// Interpolation pair for the interface: identity when both sides carry the
/// same nodes, otherwise the glue-grid construction.
pub fn interface_pair<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>], order: usize) -> Result<InterpPair<T>, CouplingError> {
    let (su, sv) = (segments(&spec.side_u, blocks), segments(&spec.side_v, blocks));
    let pair = if su == sv && su.len() == 1 {
        interp::identity_pair(order, su[0].clone())?
    } else {
        interp::build_glue_pair(order, &su, &sv)?
    };
    let cert = interp::certify_pair(&pair);
    if !cert.passed() {
        let names: Vec<String> = cert.failures().iter().map(|c| c.name.clone()).collect();
        return Err(CouplingError::UncertifiedPair(names.join(", ")));
    }
    Ok(pair)
}

struct SideOps<T> {
    trace: Csr<T>,
    /// Flux per unit glue parameter.
    flux_per_t: Csr<T>,
    offsets: Vec<usize>,
}

fn side_ops<T: Real>(side: &[Piece], blocks: &[BlockDisc<T>], n: usize) -> SideOps<T> {
    let mut tr = Vec::new();
    let mut fl = Vec::new();
    let mut offsets = vec![0];
    for p in side {
        let b = &blocks[p.block];
        let t = b.trace_op(p.edge, n);
        offsets.push(offsets.last().unwrap() + t.nrows);
        tr.push(t);
        fl.push(b.flux_op(p.edge, n).scale(T::lit(1.0 / p.length())));
    }
    SideOps { trace: vstack(&tr), flux_per_t: vstack(&fl), offsets }
}

#[allow(clippy::too_many_arguments)]
fn assemble_side<T: Real>(
    side: &[Piece],
    mine: &SideOps<T>,
    other: &SideOps<T>,
    to_me: &Csr<T>,
    to_other: &Csr<T>,
    blocks: &[BlockDisc<T>],
    scheme: Scheme,
    tau: &TauReport,
    n: usize,
) -> (Vec<PieceOps<T>>, SatContribution<T>) {
    let p_all = to_me.matmul(&other.trace);
    let q_all = to_me.matmul(&other.flux_per_t);
    let c_all = to_me.matmul(&to_other.matmul(&mine.trace));
    let half = T::lit(0.5);
    let mut ops = Vec::new();
    let mut sat = SatContribution::zeros(n);
    let inv_hw: Vec<T> = {
        let mut w = vec![T::zero(); n];
        for b in blocks {
            for (k, &v) in b.hw.iter().enumerate() {
                w[b.offset + k] = T::one() / v;
            }
        }
        w
    };
    for (i, p) in side.iter().enumerate() {
        let b = &blocks[p.block];
        let (r0, nt) = (mine.offsets[i], mine.offsets[i + 1] - mine.offsets[i]);
        let s = T::lit(p.edge.sign());
        let l = T::lit(p.length());
        let trace = row_block(&mine.trace, r0, nt);
        let flux = row_block(&mine.flux_per_t, r0, nt).scale(l);
        let partner_trace = row_block(&p_all, r0, nt);
        let partner_flux = row_block(&q_all, r0, nt).scale(l);
        let composed_trace = row_block(&c_all, r0, nt);
        let h_t = b.tangential_norm(p.edge).to_vec();
        let h_n = b.normal_weight(p.edge);
        let tau_p = T::lit(tau.piece_tau(p.length()));
        let tt = trace.transpose();
        let jump = trace.axpy(-T::one(), &partner_trace);
        let deriv = flux.transpose().scale_cols(&h_t).matmul(&jump).scale_rows(&inv_hw).scale(s * half);
        let inv_hn = T::one() / h_n;
        let (trace_coef, composed) = match scheme {
            Scheme::NewSplit => {
                let cj = composed_trace.axpy(-T::one(), &partner_trace);
                (tau_p * half, tt.matmul(&cj).scale(-tau_p * half * inv_hn))
            }
            Scheme::Legacy => (tau_p, Csr::zeros(n, n)),
        };
        let trace_term = tt.matmul(&jump).scale(-trace_coef * inv_hn);
        let flux_term = tt.matmul(&flux.axpy(-T::one(), &partner_flux)).scale(-s * half * inv_hn);
        sat.accumulate(SatContribution { deriv, trace: trace_term, composed, flux: flux_term });
        ops.push(PieceOps {
            piece: *p,
            sign: p.edge.sign(),
            tau: tau.piece_tau(p.length()),
            trace,
            flux,
            partner_trace,
            partner_flux,
            composed_trace,
            h_t,
            h_n,
        });
    }
    (ops, sat)
}

/// Assembles any interface; the kind-specific entry points validate their
/// preconditions and delegate here.
pub fn assemble_interface<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>], order: usize) -> Result<InterfaceAssembly<T>, CouplingError> {
    validate_side(&spec.side_u, blocks, "u")?;
    validate_side(&spec.side_v, blocks, "v")?;
    check_junctions(spec, blocks)?;
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let pair = interface_pair(spec, blocks, order)?;
    let tau = interface_tau(spec, blocks, order)?;
    let u = side_ops(&spec.side_u, blocks, n);
    let v = side_ops(&spec.side_v, blocks, n);
    if u.trace.nrows != pair.n_u || v.trace.nrows != pair.n_v {
        return Err(CouplingError::DimensionMismatch(format!(
            "sides {}/{} vs pair {}/{}",
            u.trace.nrows, v.trace.nrows, pair.n_u, pair.n_v
        )));
    }
    let (pieces_u, sat_u) = assemble_side(&spec.side_u, &u, &v, &pair.i_v2u, &pair.i_u2v, blocks, spec.scheme, &tau, n);
    let (pieces_v, sat_v) = assemble_side(&spec.side_v, &v, &u, &pair.i_u2v, &pair.i_v2u, blocks, spec.scheme, &tau, n);
    Ok(InterfaceAssembly { spec: spec.clone(), tau, pair, pieces_u, pieces_v, sat_u, sat_v })
}

fn require_two_block(spec: &InterfaceSpec) -> Result<(), CouplingError> {
    if spec.side_u.len() != 1 || spec.side_v.len() != 1 {
        return Err(CouplingError::InvalidInterface("two-block interface needs one piece per side".into()));
    }
    Ok(())
}

pub fn assemble_cartesian_interface<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>], order: usize) -> Result<InterfaceAssembly<T>, CouplingError> {
    require_two_block(spec)?;
    for p in pieces_of(spec) {
        let m = &blocks[p.block].metrics;
        let tol = T::lit(1e-12);
        if m.b.iter().any(|v| v.abs() > tol) {
            return Err(CouplingError::MetricInvariant(format!("block {} is not Cartesian (b ≠ 0)", p.block)));
        }
    }
    assemble_interface(&InterfaceSpec { kind: InterfaceKind::Cartesian, ..spec.clone() }, blocks, order)
}

pub fn assemble_curvilinear_interface<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>], order: usize) -> Result<InterfaceAssembly<T>, CouplingError> {
    require_two_block(spec)?;
    assemble_interface(&InterfaceSpec { kind: InterfaceKind::Curvilinear, ..spec.clone() }, blocks, order)
}

pub fn assemble_tjunction_interface<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>], order: usize) -> Result<InterfaceAssembly<T>, CouplingError> {
    let counts = (spec.side_u.len(), spec.side_v.len());
    if !matches!(counts, (1, 2) | (2, 1)) {
        return Err(CouplingError::InvalidInterface(format!("T-junction needs 1 and 2 pieces, got {counts:?}")));
    }
    assemble_interface(&InterfaceSpec { kind: InterfaceKind::TJunction, ..spec.clone() }, blocks, order)
}

/// Dispatch on `spec.kind`.
pub fn assemble<T: Real>(spec: &InterfaceSpec, blocks: &[BlockDisc<T>], order: usize) -> Result<InterfaceAssembly<T>, CouplingError> {
    match spec.kind {
        InterfaceKind::Cartesian => assemble_cartesian_interface(spec, blocks, order),
        InterfaceKind::Curvilinear => assemble_curvilinear_interface(spec, blocks, order),
        InterfaceKind::TJunction => assemble_tjunction_interface(spec, blocks, order),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_cartesian_examples() {
        assert_eq!(compute_tau_cartesian(1.0, 0.1, 0.1, 1.0).unwrap().0, 5.0);
        assert_eq!(compute_tau_cartesian(0.25, 0.1, 0.05, 1.0).unwrap().0, 40.0);
        assert!(compute_tau_cartesian(0.0, 0.1, 0.1, 1.0).is_err());
    }

    #[test]
    fn tau_curvilinear_cartesian_reduction() {
        let (t, _) = compute_tau_curvilinear(0.2, 1.0, 1.0, 0.0, 1.0, 0.0, 0.1, 0.1, 1.2).unwrap();
        assert!((t - 25.0).abs() < 1e-12);
    }
}
