//! Global semi-discrete system `w_tt = D·w + F(t)`.
//!
//! Unknowns are stored block by block in config order, column-wise within
//! each block (`ix·ny + iy`).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coupling::{self, BlockDisc, CouplingError, InterfaceAssembly, InterfaceKind, InterfaceSpec, Piece, Scheme};
use crate::geometry::{self, library, BlockMapping, Edge, GeometryError, MetricMethod};
use crate::sbp::{self, SbpError};
use crate::scalar::Real;
use crate::sparse::Csr;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("config: {0}")]
    Config(String),
    #[error("block {block}: {source}")]
    Geometry { block: usize, source: GeometryError },
    #[error("block {block}: {source}")]
    Sbp { block: usize, source: SbpError },
    #[error("interface {interface}: {source}")]
    Coupling { interface: usize, source: CouplingError },
    #[error("edge {edge} of block {block} is already coupled")]
    EdgeAlreadyCoupled { block: usize, edge: &'static str },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `amp·cos(kx·x + px)·cos(ky·y + py)·cos(ω·t + pt)`, forcing `(kx² + ky² − ω²)·U`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedSolution {
    pub amp: f64,
    pub kx: f64,
    pub px: f64,
    pub ky: f64,
    pub py: f64,
    pub omega: f64,
    pub pt: f64,
}

impl ManufacturedSolution {
    pub fn zero() -> Self {
        ManufacturedSolution { amp: 0.0, kx: 0.0, px: 0.0, ky: 0.0, py: 0.0, omega: 0.0, pt: 0.0 }
    }

    /// `cos(x+1)·cos(y+2)·cos(√2·t+3)`
    pub fn smooth() -> Self {
        ManufacturedSolution { amp: 1.0, kx: 1.0, px: 1.0, ky: 1.0, py: 2.0, omega: 2f64.sqrt(), pt: 3.0 }
    }

    /// `cos(3πx+1)·cos(4πy+2)·cos(5πt+3)`
    pub fn oscillatory() -> Self {
        let pi = std::f64::consts::PI;
        ManufacturedSolution { amp: 1.0, kx: 3.0 * pi, px: 1.0, ky: 4.0 * pi, py: 2.0, omega: 5.0 * pi, pt: 3.0 }
    }

    /// `cos(πx)·cos(πy)·cos(√2π·t)`: zero normal derivative on integer lines.
    pub fn standing() -> Self {
        let pi = std::f64::consts::PI;
        ManufacturedSolution { amp: 1.0, kx: pi, px: 0.0, ky: pi, py: 0.0, omega: 2f64.sqrt() * pi, pt: 0.0 }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "zero" => Some(Self::zero()),
            "smooth" => Some(Self::smooth()),
            "oscillatory" => Some(Self::oscillatory()),
            "standing" => Some(Self::standing()),
            _ => None,
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn u(&self, x: f64, y: f64, t: f64) -> f64 {
        self.amp * (self.kx * x + self.px).cos() * (self.ky * y + self.py).cos() * (self.omega * t + self.pt).cos()
    }

    pub fn u_t(&self, x: f64, y: f64, t: f64) -> f64 {
        -self.amp * self.omega * (self.kx * x + self.px).cos() * (self.ky * y + self.py).cos() * (self.omega * t + self.pt).sin()
    }

    pub fn u_tt(&self, x: f64, y: f64, t: f64) -> f64 {
        -self.omega * self.omega * self.u(x, y, t)
    }

    pub fn grad(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let (cx, cy) = ((self.kx * x + self.px).cos(), (self.ky * y + self.py).cos());
        let (sx, sy) = ((self.kx * x + self.px).sin(), (self.ky * y + self.py).sin());
        let ct = self.amp * (self.omega * t + self.pt).cos();
        (-self.kx * sx * cy * ct, -self.ky * cx * sy * ct)
    }

    pub fn forcing(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.kx * self.kx + self.ky * self.ky - self.omega * self.omega) * self.u(x, y, t)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.amp == 0.0 || (self.kx * self.kx + self.ky * self.ky - self.omega * self.omega).abs() <= 1e-12 * self.omega * self.omega
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockConfig {
    pub mapping: String,
    /// `[x0, x1, y0, y1]` for `mapping = "affine"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 4]>,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Pieces as `"block:edge"` or `"block:edge:t0:t1"`.
    pub side_u: Vec<String>,
    pub side_v: Vec<String>,
}

fn default_order() -> usize {
    4
}
fn default_safety() -> f64 {
    1.2
}
fn default_cfl() -> f64 {
    0.5
}
fn default_scheme() -> String {
    "new-split".into()
}
fn default_solution() -> String {
    "zero".into()
}
fn default_metrics() -> String {
    "analytic".into()
}
fn default_out() -> String {
    "out".into()
}
fn default_cadence() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Default scheme for interfaces that do not set their own.
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "default_safety")]
    pub tau_safety: f64,
    /// Time step; `0` selects `cfl·2.8/√ρ`.
    #[serde(default)]
    pub dt: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub t_end: f64,
    #[serde(default = "default_solution")]
    pub solution: String,
    #[serde(default = "default_metrics")]
    pub metrics: String,
    #[serde(default = "default_out")]
    pub out: String,
    #[serde(default = "default_cadence")]
    pub cadence: usize,
    pub blocks: Vec<BlockConfig>,
    #[serde(default)]
    pub interfaces: Vec<InterfaceConfig>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, AssemblyError> {
        toml::from_str(text).map_err(|e| AssemblyError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialization")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn solution(&self) -> Result<ManufacturedSolution, AssemblyError> {
        ManufacturedSolution::by_name(&self.solution).ok_or_else(|| AssemblyError::Config(format!("unknown solution '{}'", self.solution)))
    }

    pub fn metric_method(&self) -> Result<MetricMethod, AssemblyError> {
        match self.metrics.as_str() {
            "analytic" => Ok(MetricMethod::Analytic),
            "fd10" => Ok(MetricMethod::Fd10),
            m => Err(AssemblyError::Config(format!("unknown metric method '{m}'"))),
        }
    }

    /// Same layout with every node count refined `2^level`-fold (`n → 2^level·(n−1)+1`).
    pub fn refined(&self, level: u32) -> RunConfig {
        let mut c = self.clone();
        let f = 1usize << level;
        for b in &mut c.blocks {
            b.nx = f * (b.nx - 1) + 1;
            b.ny = f * (b.ny - 1) + 1;
        }
        c
    }

    pub fn with_scheme(&self, scheme: Scheme) -> RunConfig {
        let mut c = self.clone();
        c.scheme = scheme.name().into();
        for i in &mut c.interfaces {
            i.scheme = None;
        }
        c
    }
}

pub fn parse_mapping(cfg: &BlockConfig) -> Result<BlockMapping<f64>, AssemblyError> {
    let err = || AssemblyError::Config(format!("unknown mapping '{}'", cfg.mapping));
    Ok(match cfg.mapping.as_str() {
        "identity" => BlockMapping::identity(),
        "affine" => {
            let [x0, x1, y0, y1] = cfg.bounds.ok_or_else(|| AssemblyError::Config("affine mapping needs bounds".into()))?;
            BlockMapping::affine(x0, x1, y0, y1)
        }
        "extreme-left" => library::extreme_interface().0,
        "extreme-right" => library::extreme_interface().1,
        "gentle-left" => library::gentle_interface().0,
        "gentle-right" => library::gentle_interface().1,
        "tjunction-left" => library::tjunction()[0],
        "tjunction-lower" => library::tjunction()[1],
        "tjunction-upper" => library::tjunction()[2],
        _ => return Err(err()),
    })
}

pub fn parse_piece(s: &str) -> Result<Piece, AssemblyError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || AssemblyError::Config(format!("bad interface piece '{s}'"));
    let block = parts.first().and_then(|b| b.trim().parse().ok()).ok_or_else(bad)?;
    let edge = parts.get(1).and_then(|e| Edge::parse(e.trim())).ok_or_else(bad)?;
    let (t0, t1) = match parts.len() {
        2 => (0.0, 1.0),
        4 => (parts[2].trim().parse().map_err(|_| bad())?, parts[3].trim().parse().map_err(|_| bad())?),
        _ => return Err(bad()),
    };
    Ok(Piece { block, edge, t0, t1 })
}

pub fn interface_specs(cfg: &RunConfig) -> Result<Vec<InterfaceSpec>, AssemblyError> {
    cfg.interfaces
        .iter()
        .map(|i| {
            let kind = InterfaceKind::parse(&i.kind).ok_or_else(|| AssemblyError::Config(format!("unknown interface kind '{}'", i.kind)))?;
            let sname = i.scheme.as_deref().unwrap_or(&cfg.scheme);
            let scheme = Scheme::parse(sname).ok_or_else(|| AssemblyError::Config(format!("unknown scheme '{sname}'")))?;
            let side_u = i.side_u.iter().map(|s| parse_piece(s)).collect::<Result<Vec<_>, _>>()?;
            let side_v = i.side_v.iter().map(|s| parse_piece(s)).collect::<Result<Vec<_>, _>>()?;
            Ok(InterfaceSpec { kind, scheme, side_u, side_v, tau_safety: cfg.tau_safety })
        })
        .collect()
}

/// Weakly imposed conormal flux on one physical edge:
/// `−s·H_n⁻¹·Tᵀ(F·u − g)`.
#[derive(Clone, Debug)]
pub struct NeumannSat<T> {
    pub block: usize,
    pub edge: Edge,
    /// Operator part `−s·H_n⁻¹·Tᵀ·F`, `n × n`.
    pub op: Csr<T>,
    /// Global node indices along the edge.
    pub nodes: Vec<usize>,
    /// `s·H_n⁻¹`.
    pub coef: T,
    /// Flux weights `(w_x, w_y)` per edge node: `g = w_x·U_x + w_y·U_y`.
    pub weights: Vec<(T, T)>,
}

impl<T: Real> NeumannSat<T> {
    /// Data part `s·H_n⁻¹·Tᵀ·g` as (node, value) pairs.
    pub fn data(&self, g: &[T]) -> Vec<(usize, T)> {
        self.nodes.iter().zip(g).map(|(&k, &v)| (k, self.coef * v)).collect()
    }

    /// Exact flux data from a manufactured solution.
    pub fn exact_flux(&self, sol: &ManufacturedSolution, x: &[T], y: &[T], t: f64) -> Vec<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&k, &(wx, wy))| {
                let (ux, uy) = sol.grad(x[k].f64(), y[k].f64(), t);
                wx * T::lit(ux) + wy * T::lit(uy)
            })
            .collect()
    }

    /// Full addend applied to `u` with data `g`.
    pub fn apply(&self, u: &[T], g: &[T]) -> Vec<T> {
        let mut out = self.op.matvec(u);
        for (k, v) in self.data(g) {
            out[k] += v;
        }
        out
    }
}

pub fn neumann_boundary_sat<T: Real>(blocks: &[BlockDisc<T>], block: usize, edge: Edge, coupled: &[(usize, Edge)]) -> Result<NeumannSat<T>, AssemblyError> {
    if coupled.contains(&(block, edge)) {
        return Err(AssemblyError::EdgeAlreadyCoupled { block, edge: edge.name() });
    }
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let b = &blocks[block];
    let s = T::lit(edge.sign());
    let coef = s / b.normal_weight(edge);
    let op = b.trace_op(edge, n).transpose().matmul(&b.flux_op(edge, n)).scale(-coef);
    let local = edge.nodes(b.block.nx, b.block.ny);
    let weights = local.iter().map(|&k| b.metrics.flux_weights(edge, k)).collect();
    Ok(NeumannSat { block, edge, op, nodes: local.iter().map(|&k| k + b.offset).collect(), coef, weights })
}

/// Interior operator of one block, `Σ D2x(a) + Σ D2y(c) + D1x Λ_b D1y + D1y Λ_b D1x`,
/// before `J⁻¹`.
pub fn volume_operator<T: Real>(b: &BlockDisc<T>, n: usize) -> Result<Csr<T>, SbpError> {
    let (nx, ny, o) = (b.block.nx, b.block.ny, b.offset);
    let m = &b.metrics;
    let mut trips = Vec::new();
    for iy in 0..ny {
        let line: Vec<T> = (0..nx).map(|ix| m.a[ix * ny + iy]).collect();
        let (d2, _) = sbp::variable_d2_operator(&b.sx, &line)?;
        trips.extend(d2.triplets().map(|(i, j, v)| (o + i * ny + iy, o + j * ny + iy, v)));
    }
    for ix in 0..nx {
        let line: Vec<T> = m.c[ix * ny..(ix + 1) * ny].to_vec();
        let (d2, _) = sbp::variable_d2_operator(&b.sy, &line)?;
        trips.extend(d2.triplets().map(|(i, j, v)| (o + ix * ny + i, o + ix * ny + j, v)));
    }
    if m.b.iter().any(|v| *v != T::zero()) {
        let dx = b.sx.d1.kron(&Csr::identity(ny));
        let dy = Csr::identity(nx).kron(&b.sy.d1);
        let mixed = dx.scale_cols(&m.b).matmul(&dy).add(&dy.scale_cols(&m.b).matmul(&dx));
        trips.extend(mixed.triplets().map(|(i, j, v)| (o + i, o + j, v)));
    }
    Ok(Csr::from_triplets(n, n, trips))
}

#[derive(Clone, Debug)]
pub struct SemiDiscreteSystem<T> {
    pub order: usize,
    pub blocks: Vec<BlockDisc<T>>,
    pub n: usize,
    /// Global operator, `J⁻¹` applied.
    pub d: Csr<T>,
    /// Mass weights `J·(H_x ⊗ H_y)` per node.
    pub weights: Vec<T>,
    pub jinv: Vec<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub interfaces: Vec<InterfaceAssembly<T>>,
    pub neumann: Vec<NeumannSat<T>>,
    pub solution: ManufacturedSolution,
    /// `F` at `cos(ωt + pt) = 1`; every data term carries that single time factor.
    pub forcing_profile: Vec<T>,
}

impl<T: Real> SemiDiscreteSystem<T> {
    /// `F(t)`: forcing plus Neumann data, with `J⁻¹` applied to the data.
    pub fn forcing(&self, t: f64) -> Vec<T> {
        let c = T::lit((self.solution.omega * t + self.solution.pt).cos());
        self.forcing_profile.iter().map(|&v| v * c).collect()
    }

    /// `F(t)` evaluated node by node from the closed-form data.
    pub fn forcing_direct(&self, t: f64) -> Vec<T> {
        self.forcing_of(&self.solution, t)
    }

    fn forcing_of(&self, sol: &ManufacturedSolution, t: f64) -> Vec<T> {
        let mut f: Vec<T> = if sol.is_homogeneous() {
            vec![T::zero(); self.n]
        } else {
            (0..self.n).map(|k| T::lit(sol.forcing(self.x[k].f64(), self.y[k].f64(), t))).collect()
        };
        if sol.amp != 0.0 {
            for nb in &self.neumann {
                let g = nb.exact_flux(sol, &self.x, &self.y, t);
                for (k, v) in nb.data(&g) {
                    f[k] += self.jinv[k] * v;
                }
            }
        }
        f
    }

    pub fn exact(&self, t: f64) -> (Vec<T>, Vec<T>) {
        let s = &self.solution;
        let u = (0..self.n).map(|k| T::lit(s.u(self.x[k].f64(), self.y[k].f64(), t))).collect();
        let ut = (0..self.n).map(|k| T::lit(s.u_t(self.x[k].f64(), self.y[k].f64(), t))).collect();
        (u, ut)
    }

    /// Block reference spacings `(h_x, h_y)`.
    pub fn spacing(&self, block: usize) -> (T, T) {
        let b = &self.blocks[block];
        (b.sx.grid.h, b.sy.grid.h)
    }

    /// Bounding-box extent over `n − 1` along each direction.
    pub fn physical_spacing(&self, block: usize) -> (f64, f64) {
        let b = &self.blocks[block];
        let bbx = b.block.x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |m, v| (m.0.min(v.f64()), m.1.max(v.f64())));
        let bby = b.block.y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |m, v| (m.0.min(v.f64()), m.1.max(v.f64())));
        ((bbx.1 - bbx.0) / (b.block.nx - 1) as f64, (bby.1 - bby.0) / (b.block.ny - 1) as f64)
    }
}

/// `D·w + F(t)`.
pub fn apply_rhs<T: Real>(sys: &SemiDiscreteSystem<T>, w: &[T], t: f64) -> Result<Vec<T>, AssemblyError> {
    if w.len() != sys.n {
        return Err(AssemblyError::DimensionMismatch { expected: sys.n, got: w.len() });
    }
    let mut out = sys.d.matvec(w);
    for (o, f) in out.iter_mut().zip(sys.forcing(t)) {
        *o += f;
    }
    Ok(out)
}

/// Triplets of `D`.
pub fn materialize<T: Real>(sys: &SemiDiscreteSystem<T>) -> Vec<(usize, usize, T)> {
    sys.d.triplets().collect()
}

pub fn assemble_system(cfg: &RunConfig) -> Result<SemiDiscreteSystem<f64>, AssemblyError> {
    sbp::closure_width(cfg.order).map_err(|e| AssemblyError::Config(e.to_string()))?;
    if cfg.blocks.is_empty() {
        return Err(AssemblyError::Config("no blocks".into()));
    }
    let solution = cfg.solution()?;
    let method = cfg.metric_method()?;
    let mut blocks = Vec::new();
    let mut offset = 0;
    for (i, bc) in cfg.blocks.iter().enumerate() {
        let mapping = parse_mapping(bc)?;
        let blk = geometry::build_block(mapping, bc.nx, bc.ny).map_err(|source| AssemblyError::Geometry { block: i, source })?;
        let metrics = geometry::compute_metrics(&blk, method).map_err(|source| AssemblyError::Geometry { block: i, source })?;
        let disc = BlockDisc::new(offset, cfg.order, blk, metrics).map_err(|source| AssemblyError::Sbp { block: i, source })?;
        offset += disc.len();
        blocks.push(disc);
    }
    let n = offset;
    let specs = interface_specs(cfg)?;
    let mut coupled: Vec<(usize, Edge)> = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        for p in s.side_u.iter().chain(&s.side_v) {
            if p.block >= blocks.len() {
                return Err(AssemblyError::Config(format!("interface {i} names missing block {}", p.block)));
            }
            if coupled.contains(&(p.block, p.edge)) {
                return Err(AssemblyError::EdgeAlreadyCoupled { block: p.block, edge: p.edge.name() });
            }
            coupled.push((p.block, p.edge));
        }
    }
    let mut total = Csr::zeros(n, n);
    for (i, b) in blocks.iter().enumerate() {
        total = total.add(&volume_operator(b, n).map_err(|source| AssemblyError::Sbp { block: i, source })?);
    }
    let mut interfaces = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        let ia = coupling::assemble(s, &blocks, cfg.order).map_err(|source| AssemblyError::Coupling { interface: i, source })?;
        total = total.add(&ia.total());
        interfaces.push(ia);
    }
    let mut neumann = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let _ = b;
        for e in Edge::ALL {
            if !coupled.contains(&(i, e)) {
                let nb = neumann_boundary_sat(&blocks, i, e, &coupled)?;
                total = total.add(&nb.op);
                neumann.push(nb);
            }
        }
    }
    let mut jinv = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for b in &blocks {
        for k in 0..b.len() {
            jinv[b.offset + k] = 1.0 / b.metrics.j[k];
            weights[b.offset + k] = b.metrics.j[k] * b.hw[k];
            x[b.offset + k] = b.block.x[k];
            y[b.offset + k] = b.block.y[k];
        }
    }
    let d = total.scale_rows(&jinv);
    let mut sys = SemiDiscreteSystem { order: cfg.order, blocks, n, d, weights, jinv, x, y, interfaces, neumann, solution, forcing_profile: Vec::new() };
    sys.forcing_profile = sys.forcing_of(&ManufacturedSolution { pt: 0.0, ..solution }, 0.0);
    Ok(sys)
}

/// Built-in experiment configurations.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 5] = ["extreme-interface-eig", "extreme-interface-longtime", "tjunction-converge", "sat-compare", "gentle-interface-longtime"];

    fn block(mapping: &str, nx: usize, ny: usize) -> BlockConfig {
        BlockConfig { mapping: mapping.into(), bounds: None, nx, ny }
    }

    fn iface(kind: &str, u: &[&str], v: &[&str]) -> InterfaceConfig {
        InterfaceConfig { kind: kind.into(), scheme: None, side_u: u.iter().map(|s| s.to_string()).collect(), side_v: v.iter().map(|s| s.to_string()).collect() }
    }

    fn base(preset: &str, order: usize, blocks: Vec<BlockConfig>, interfaces: Vec<InterfaceConfig>, solution: &str, t_end: f64) -> RunConfig {
        RunConfig {
            preset: Some(preset.into()),
            order,
            scheme: default_scheme(),
            tau_safety: default_safety(),
            dt: 0.0,
            cfl: default_cfl(),
            t_end,
            solution: solution.into(),
            metrics: default_metrics(),
            out: default_out(),
            cadence: default_cadence(),
            blocks,
            interfaces,
        }
    }

    /// Two blocks split by `x = 4 sin(7πy)/5`, 21×21 and 41×41, order 6.
    pub fn extreme_interface_eig() -> RunConfig {
        base(
            "extreme-interface-eig",
            6,
            vec![block("extreme-left", 21, 21), block("extreme-right", 41, 41)],
            vec![iface("curvilinear", &["0:right"], &["1:left"])],
            "zero",
            0.0,
        )
    }

    /// Ten periods of `cos(x+1)cos(y+2)cos(√2t+3)` on 51×51 / 101×101;
    /// `full` selects 101×101 / 201×201.
    pub fn extreme_interface_longtime(full: bool) -> RunConfig {
        let (a, b) = if full { (101, 201) } else { (51, 101) };
        let period = 2.0 * std::f64::consts::PI / 2f64.sqrt();
        base(
            "extreme-interface-longtime",
            6,
            vec![block("extreme-left", a, a), block("extreme-right", b, b)],
            vec![iface("curvilinear", &["0:right"], &["1:left"])],
            "smooth",
            10.0 * period,
        )
    }

    /// Same run across the milder curve `x = sin(3πy/2)/3`, whose penalty
    /// bound keeps the step count affordable.
    pub fn gentle_interface_longtime(order: usize, full: bool) -> RunConfig {
        let mut c = extreme_interface_longtime(full);
        c.preset = Some("gentle-interface-longtime".into());
        c.order = order;
        c.blocks[0].mapping = "gentle-left".into();
        c.blocks[1].mapping = "gentle-right".into();
        c
    }

    /// Three-block T-junction at the coarsest level with the oscillatory solution.
    pub fn tjunction_converge(order: usize) -> RunConfig {
        let yb = library::Y_BAR;
        let lower = format!("1:left:0:{yb}");
        let upper = format!("2:left:{yb}:1");
        base(
            "tjunction-converge",
            order,
            vec![block("tjunction-left", 26, 52), block("tjunction-lower", 26, 26), block("tjunction-upper", 51, 26)],
            vec![
                iface("tjunction", &["0:right"], &[lower.as_str(), upper.as_str()]),
                iface("curvilinear", &["1:top"], &["2:bottom"]),
            ],
            "oscillatory",
            2.0,
        )
    }

    /// T-junction with the legacy scheme, for comparison with `tjunction-converge`.
    pub fn sat_compare(order: usize) -> RunConfig {
        let mut c = tjunction_converge(order).with_scheme(Scheme::Legacy);
        c.preset = Some("sat-compare".into());
        c
    }

    pub fn by_name(name: &str) -> Option<RunConfig> {
        match name {
            "extreme-interface-eig" => Some(extreme_interface_eig()),
            "extreme-interface-longtime" => Some(extreme_interface_longtime(false)),
            "tjunction-converge" => Some(tjunction_converge(4)),
            "sat-compare" => Some(sat_compare(4)),
            "gentle-interface-longtime" => Some(gentle_interface_longtime(6, false)),
            _ => None,
        }
    }

    /// Single block on `[0, 1]²`.
    pub fn single_block(order: usize, n: usize, solution: &str) -> RunConfig {
        base("single-block", order, vec![block("identity", n, n)], vec![], solution, 0.0)
    }

    /// Conforming or 1:2 Cartesian pair `[0,1]² ∪ [1,2]×[0,1]`.
    pub fn cartesian_pair(order: usize, nu: usize, nv: usize, solution: &str) -> RunConfig {
        let mut l = block("affine", nu, nu);
        l.bounds = Some([0.0, 1.0, 0.0, 1.0]);
        let mut r = block("affine", nv, nv);
        r.bounds = Some([1.0, 2.0, 0.0, 1.0]);
        base("cartesian-pair", order, vec![l, r], vec![iface("cartesian", &["0:right"], &["1:left"])], solution, 0.0)
    }
}
