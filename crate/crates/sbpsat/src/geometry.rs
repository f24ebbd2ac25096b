//! Curvilinear blocks: transfinite interpolation of four boundary curves,
//! node generation and metric coefficients of the transformed wave operator
//!
//! ```text
//! J U_tt = (a U_ξ + b U_η)_ξ + (b U_ξ + c U_η)_η
//! J = x_ξ y_η − x_η y_ξ,  a = (x_η² + y_η²)/J,  b = −(x_ξ x_η + y_ξ y_η)/J,  c = (x_ξ² + y_ξ²)/J
//! ```
//!
//! on the reference square `[0, 1]²`. Nodes are stored column-wise,
//! `index = ix·ny + iy`.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("corner mismatch at {corner}: distance {distance:e}")]
    CornerMismatch { corner: &'static str, distance: f64 },
    #[error("non-positive Jacobian {value:e} at node ({ix}, {iy})")]
    NegativeJacobian { ix: usize, iy: usize, value: f64 },
    #[error("a·c − b² = {value:e} not positive at node ({ix}, {iy})")]
    PositivityViolation { ix: usize, iy: usize, value: f64 },
    #[error("fd10 metrics need at least 11 nodes per direction, got {nx}×{ny}")]
    TooFewNodes { nx: usize, ny: usize },
    #[error("non-positive delta {0:e}")]
    NonPositiveDelta(f64),
    #[error("degenerate mapping: {0}")]
    Degenerate(String),
}

/// `amp·sin(freq·t + phase) + offset`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sine<T> {
    pub amp: T,
    pub freq: T,
    pub phase: T,
    pub offset: T,
}

impl<T: Real> Sine<T> {
    pub fn eval(&self, t: T) -> T {
        self.amp * (self.freq * t + self.phase).sin() + self.offset
    }
    pub fn deriv(&self, t: T) -> T {
        self.amp * self.freq * (self.freq * t + self.phase).cos()
    }
}

/// Boundary curve parameterised on `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve<T> {
    Line { from: [T; 2], to: [T; 2] },
    /// `x = f(y)`, `y = y0 + s·(y1 − y0)`
    XOfY { f: Sine<T>, y0: T, y1: T },
    /// `y = f(x)`, `x = x0 + s·(x1 − x0)`
    YOfX { f: Sine<T>, x0: T, x1: T },
}

impl<T: Real> Curve<T> {
    pub fn eval(&self, s: T) -> [T; 2] {
        match *self {
            Curve::Line { from, to } => [from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])],
            Curve::XOfY { f, y0, y1 } => {
                let y = y0 + s * (y1 - y0);
                [f.eval(y), y]
            }
            Curve::YOfX { f, x0, x1 } => {
                let x = x0 + s * (x1 - x0);
                [x, f.eval(x)]
            }
        }
    }

    pub fn deriv(&self, s: T) -> [T; 2] {
        match *self {
            Curve::Line { from, to } => [to[0] - from[0], to[1] - from[1]],
            Curve::XOfY { f, y0, y1 } => {
                let y = y0 + s * (y1 - y0);
                [f.deriv(y) * (y1 - y0), y1 - y0]
            }
            Curve::YOfX { f, x0, x1 } => {
                let x = x0 + s * (x1 - x0);
                [x1 - x0, f.deriv(x) * (x1 - x0)]
            }
        }
    }
}

/// Four boundary curves: `left` (ξ = 0) and `right` (ξ = 1) run in η,
/// `bottom` (η = 0) and `top` (η = 1) run in ξ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockMapping<T> {
    pub left: Curve<T>,
    pub right: Curve<T>,
    pub bottom: Curve<T>,
    pub top: Curve<T>,
}

impl<T: Real> BlockMapping<T> {
    pub fn affine(x0: T, x1: T, y0: T, y1: T) -> Self {
        let line = |a: [T; 2], b: [T; 2]| Curve::Line { from: a, to: b };
        BlockMapping {
            left: line([x0, y0], [x0, y1]),
            right: line([x1, y0], [x1, y1]),
            bottom: line([x0, y0], [x1, y0]),
            top: line([x0, y1], [x1, y1]),
        }
    }

    pub fn identity() -> Self {
        Self::affine(T::zero(), T::one(), T::zero(), T::one())
    }

    pub fn check_corners(&self) -> Result<(), GeometryError> {
        let (z, o) = (T::zero(), T::one());
        let pairs = [
            ("(0,0)", self.left.eval(z), self.bottom.eval(z)),
            ("(1,0)", self.right.eval(z), self.bottom.eval(o)),
            ("(0,1)", self.left.eval(o), self.top.eval(z)),
            ("(1,1)", self.right.eval(o), self.top.eval(o)),
        ];
        for (corner, a, b) in pairs {
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt().f64();
            if d > 1e-12 {
                return Err(GeometryError::CornerMismatch { corner, distance: d });
            }
        }
        Ok(())
    }

    /// Physical point of reference coordinates `(ξ, η)`.
    pub fn eval(&self, xi: T, eta: T) -> [T; 2] {
        let (o, z) = (T::one(), T::zero());
        let (l, r, b, t) = (self.left.eval(eta), self.right.eval(eta), self.bottom.eval(xi), self.top.eval(xi));
        let (p00, p10, p01, p11) = (self.bottom.eval(z), self.bottom.eval(o), self.top.eval(z), self.top.eval(o));
        let mut out = [z; 2];
        for d in 0..2 {
            out[d] = (o - xi) * l[d] + xi * r[d] + (o - eta) * b[d] + eta * t[d]
                - ((o - xi) * (o - eta) * p00[d] + xi * (o - eta) * p10[d] + (o - xi) * eta * p01[d] + xi * eta * p11[d]);
        }
        out
    }

    /// `[x_ξ, x_η, y_ξ, y_η]` in closed form.
    pub fn jacobian(&self, xi: T, eta: T) -> [T; 4] {
        let (o, z) = (T::one(), T::zero());
        let (l, r) = (self.left.eval(eta), self.right.eval(eta));
        let (b, t) = (self.bottom.eval(xi), self.top.eval(xi));
        let (dl, dr) = (self.left.deriv(eta), self.right.deriv(eta));
        let (db, dt) = (self.bottom.deriv(xi), self.top.deriv(xi));
        let (p00, p10, p01, p11) = (self.bottom.eval(z), self.bottom.eval(o), self.top.eval(z), self.top.eval(o));
        let mut dxi = [z; 2];
        let mut deta = [z; 2];
        for d in 0..2 {
            dxi[d] = r[d] - l[d] + (o - eta) * db[d] + eta * dt[d]
                - (-(o - eta) * p00[d] + (o - eta) * p10[d] - eta * p01[d] + eta * p11[d]);
            deta[d] = (o - xi) * dl[d] + xi * dr[d] - b[d] + t[d]
                - (-(o - xi) * p00[d] - xi * p10[d] + (o - xi) * p01[d] + xi * p11[d]);
        }
        [dxi[0], deta[0], dxi[1], deta[1]]
    }
}

/// Node grid of one block.
#[derive(Clone, Debug)]
pub struct Block<T> {
    pub mapping: BlockMapping<T>,
    pub nx: usize,
    pub ny: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> Block<T> {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    pub fn xi(&self, ix: usize) -> T {
        T::from_usize_lossy(ix) / T::from_usize_lossy(self.nx - 1)
    }

    pub fn eta(&self, iy: usize) -> T {
        T::from_usize_lossy(iy) / T::from_usize_lossy(self.ny - 1)
    }
}

pub fn build_block<T: Real>(mapping: BlockMapping<T>, nx: usize, ny: usize) -> Result<Block<T>, GeometryError> {
    mapping.check_corners()?;
    if nx < 2 || ny < 2 {
        return Err(GeometryError::Degenerate(format!("{nx}×{ny} nodes")));
    }
    let mut x = Vec::with_capacity(nx * ny);
    let mut y = Vec::with_capacity(nx * ny);
    for ix in 0..nx {
        let xi = T::from_usize_lossy(ix) / T::from_usize_lossy(nx - 1);
        for iy in 0..ny {
            let eta = T::from_usize_lossy(iy) / T::from_usize_lossy(ny - 1);
            // edges are sampled from their curves directly
            let p = if ix == 0 {
                mapping.left.eval(eta)
            } else if ix == nx - 1 {
                mapping.right.eval(eta)
            } else if iy == 0 {
                mapping.bottom.eval(xi)
            } else if iy == ny - 1 {
                mapping.top.eval(xi)
            } else {
                mapping.eval(xi, eta)
            };
            x.push(p[0]);
            y.push(p[1]);
        }
    }
    Ok(Block { mapping, nx, ny, x, y })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricMethod {
    Analytic,
    Fd10,
}

/// Metric coefficients at every node. The vectors double as the diagonals
/// of the lifted matrices `Λ_J`, `Λ_a`, `Λ_b`, `Λ_c`.
#[derive(Clone, Debug)]
pub struct MetricField<T> {
    pub nx: usize,
    pub ny: usize,
    pub x_xi: Vec<T>,
    pub x_eta: Vec<T>,
    pub y_xi: Vec<T>,
    pub y_eta: Vec<T>,
    pub j: Vec<T>,
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

/// Fornberg weights for the first derivative at `z` from nodes `xs`.
pub fn fd_weights(z: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let m = 1;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

const BOUNDARY_WIDTH: usize = 13;

/// First-derivative matrix rows on `n` unit-spaced nodes: centered 11-point
/// (tenth order) in the interior, off-centre `BOUNDARY_WIDTH`-point near the
/// ends, where one-sided error constants are largest.
fn fd10_stencils(n: usize) -> Vec<(usize, Vec<f64>)> {
    (0..n)
        .map(|i| {
            let central = i >= 5 && i + 5 < n;
            let w = if central { 11 } else { BOUNDARY_WIDTH.min(n) };
            let start = if central { i - 5 } else if i < 5 { 0 } else { n - w };
            let xs: Vec<f64> = (start..start + w).map(|k| k as f64).collect();
            (start, fd_weights(i as f64, &xs))
        })
        .collect()
}

fn finish_metrics<T: Real>(nx: usize, ny: usize, d: [Vec<T>; 4]) -> Result<MetricField<T>, GeometryError> {
    let [x_xi, x_eta, y_xi, y_eta] = d;
    let n = nx * ny;
    let (mut j, mut a, mut b, mut c) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    for k in 0..n {
        let jac = x_xi[k] * y_eta[k] - x_eta[k] * y_xi[k];
        if !(jac > T::zero()) {
            // report the worst node
            let worst = (0..n)
                .map(|m| (m, (x_xi[m] * y_eta[m] - x_eta[m] * y_xi[m]).f64()))
                .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
            return Err(GeometryError::NegativeJacobian { ix: worst.0 / ny, iy: worst.0 % ny, value: worst.1 });
        }
        j[k] = jac;
        a[k] = (x_eta[k] * x_eta[k] + y_eta[k] * y_eta[k]) / jac;
        b[k] = -(x_xi[k] * x_eta[k] + y_xi[k] * y_eta[k]) / jac;
        c[k] = (x_xi[k] * x_xi[k] + y_xi[k] * y_xi[k]) / jac;
        let det = a[k] * c[k] - b[k] * b[k];
        if !(det > T::zero()) || !(a[k] > T::zero()) || !(c[k] > T::zero()) {
            return Err(GeometryError::PositivityViolation { ix: k / ny, iy: k % ny, value: det.f64() });
        }
    }
    Ok(MetricField { nx, ny, x_xi, x_eta, y_xi, y_eta, j, a, b, c })
}

pub fn compute_metrics<T: Real>(block: &Block<T>, method: MetricMethod) -> Result<MetricField<T>, GeometryError> {
    let (nx, ny) = (block.nx, block.ny);
    let n = nx * ny;
    match method {
        MetricMethod::Analytic => {
            let mut d = [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]];
            for ix in 0..nx {
                for iy in 0..ny {
                    let jac = block.mapping.jacobian(block.xi(ix), block.eta(iy));
                    let k = block.index(ix, iy);
                    for m in 0..4 {
                        d[m][k] = jac[m];
                    }
                }
            }
            finish_metrics(nx, ny, d)
        }
        MetricMethod::Fd10 => {
            if nx < 11 || ny < 11 {
                return Err(GeometryError::TooFewNodes { nx, ny });
            }
            let (sx, sy) = (fd10_stencils(nx), fd10_stencils(ny));
            let (hx, hy) = (T::from_usize_lossy(nx - 1), T::from_usize_lossy(ny - 1));
            let mut d = [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]];
            for ix in 0..nx {
                for iy in 0..ny {
                    let k = block.index(ix, iy);
                    let (s0, w) = &sx[ix];
                    for (m, &wm) in w.iter().enumerate() {
                        let kk = block.index(s0 + m, iy);
                        d[0][k] += T::lit(wm) * block.x[kk] * hx;
                        d[2][k] += T::lit(wm) * block.y[kk] * hx;
                    }
                    let (s0, w) = &sy[iy];
                    for (m, &wm) in w.iter().enumerate() {
                        let kk = block.index(ix, s0 + m);
                        d[1][k] += T::lit(wm) * block.x[kk] * hy;
                        d[3][k] += T::lit(wm) * block.y[kk] * hy;
                    }
                }
            }
            finish_metrics(nx, ny, d)
        }
    }
}

/// Smallest eigenvalue of `[[a, b], [b, c]]`.
pub fn min_eig_2x2<T: Real>(a: T, b: T, c: T) -> T {
    let half = T::lit(0.5);
    half * (a + c - ((a - c) * (a - c) + T::lit(4.0) * b * b).sqrt())
}

/// δ over every node of every field.
pub fn delta_of<T: Real>(fields: &[&MetricField<T>]) -> Result<T, GeometryError> {
    let mut d = T::infinity();
    for f in fields {
        for k in 0..f.a.len() {
            d = d.min(min_eig_2x2(f.a[k], f.b[k], f.c[k]));
        }
    }
    if !(d > T::zero()) {
        return Err(GeometryError::NonPositiveDelta(d.f64()));
    }
    Ok(d)
}

pub fn compute_delta<T: Real>(u: &MetricField<T>, v: &MetricField<T>) -> Result<T, GeometryError> {
    delta_of(&[u, v])
}

/// Block edge in reference coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Left, Edge::Right, Edge::Bottom, Edge::Top];

    /// Whether the edge normal is along ξ.
    pub fn normal_is_xi(self) -> bool {
        matches!(self, Edge::Left | Edge::Right)
    }

    /// Outward sign: −1 at the low end, +1 at the high end.
    pub fn sign(self) -> f64 {
        match self {
            Edge::Left | Edge::Bottom => -1.0,
            Edge::Right | Edge::Top => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Edge::Left => "left",
            Edge::Right => "right",
            Edge::Bottom => "bottom",
            Edge::Top => "top",
        }
    }

    pub fn parse(s: &str) -> Option<Edge> {
        Edge::ALL.into_iter().find(|e| e.name() == s)
    }

    /// Node indices (within the block) along the edge, by tangential index.
    pub fn nodes(self, nx: usize, ny: usize) -> Vec<usize> {
        match self {
            Edge::Left => (0..ny).collect(),
            Edge::Right => (0..ny).map(|iy| (nx - 1) * ny + iy).collect(),
            Edge::Bottom => (0..nx).map(|ix| ix * ny).collect(),
            Edge::Top => (0..nx).map(|ix| ix * ny + ny - 1).collect(),
        }
    }

    /// Node count along the edge.
    pub fn len(self, nx: usize, ny: usize) -> usize {
        if self.normal_is_xi() { ny } else { nx }
    }

    /// Node count normal to the edge.
    pub fn normal_len(self, nx: usize, ny: usize) -> usize {
        if self.normal_is_xi() { nx } else { ny }
    }
}

impl<T: Real> MetricField<T> {
    /// Coefficient multiplying the normal derivative in the conormal flux.
    pub fn normal_coefficient(&self, edge: Edge) -> Vec<T> {
        let src = if edge.normal_is_xi() { &self.a } else { &self.c };
        edge.nodes(self.nx, self.ny).into_iter().map(|k| src[k]).collect()
    }

    pub fn edge_b(&self, edge: Edge) -> Vec<T> {
        edge.nodes(self.nx, self.ny).into_iter().map(|k| self.b[k]).collect()
    }

    /// `(max |normal coefficient|, max |b|)` over the edge nodes.
    pub fn edge_maxima(&self, edge: Edge) -> (T, T) {
        let a = self.normal_coefficient(edge).into_iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let b = self.edge_b(edge).into_iter().fold(T::zero(), |m, v| m.max(v.abs()));
        (a, b)
    }

    /// Weights `(w_x, w_y)` with conormal flux `= w_x U_x + w_y U_y` on an edge node.
    pub fn flux_weights(&self, edge: Edge, k: usize) -> (T, T) {
        if edge.normal_is_xi() {
            (self.y_eta[k], -self.x_eta[k])
        } else {
            (-self.y_xi[k], self.x_xi[k])
        }
    }
}

/// CSV of node coordinates and metric coefficients.
pub fn metrics_csv<T: Real>(block: &Block<T>, m: &MetricField<T>) -> String {
    let mut s = String::from("ix,iy,x,y,J,a,b,c\n");
    for ix in 0..block.nx {
        for iy in 0..block.ny {
            let k = block.index(ix, iy);
            s.push_str(&format!(
                "{ix},{iy},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                block.x[k].f64(),
                block.y[k].f64(),
                m.j[k].f64(),
                m.a[k].f64(),
                m.b[k].f64(),
                m.c[k].f64()
            ));
        }
    }
    s
}

/// Built-in geometries of the numerical experiments.
pub mod library {
    use super::*;

    pub const Y_BAR: f64 = 0.621;

    fn sine<T: Real>(amp: f64, freq: f64, phase: f64, offset: f64) -> Sine<T> {
        Sine { amp: T::lit(amp), freq: T::lit(freq), phase: T::lit(phase), offset: T::lit(offset) }
    }

    fn line<T: Real>(a: [f64; 2], b: [f64; 2]) -> Curve<T> {
        Curve::Line { from: [T::lit(a[0]), T::lit(a[1])], to: [T::lit(b[0]), T::lit(b[1])] }
    }

    /// Two blocks `[−1, ·]` and `[·, 1]`, `y ∈ [0, 1]`, split by the curve `x = f(y)`.
    pub fn split_by<T: Real>(f: Sine<T>) -> (BlockMapping<T>, BlockMapping<T>) {
        let iface = Curve::XOfY { f, y0: T::zero(), y1: T::one() };
        let (start, end) = (iface.eval(T::zero())[0].f64(), iface.eval(T::one())[0].f64());
        let left = BlockMapping { left: line([-1.0, 0.0], [-1.0, 1.0]), right: iface, bottom: line([-1.0, 0.0], [start, 0.0]), top: line([-1.0, 1.0], [end, 1.0]) };
        let right = BlockMapping { left: iface, right: line([1.0, 0.0], [1.0, 1.0]), bottom: line([start, 0.0], [1.0, 0.0]), top: line([end, 1.0], [1.0, 1.0]) };
        (left, right)
    }

    /// Interface `x = 4 sin(7πy)/5`.
    pub fn extreme_interface<T: Real>() -> (BlockMapping<T>, BlockMapping<T>) {
        split_by(sine(0.8, 7.0 * std::f64::consts::PI, 0.0, 0.0))
    }

    /// Interface `x = sin(3πy/2)/3`, the vertical curve of the T-junction layout.
    pub fn gentle_interface<T: Real>() -> (BlockMapping<T>, BlockMapping<T>) {
        split_by(tjunction_vertical())
    }

    /// Vertical curve `x = sin(3πy/2)/3`.
    pub fn tjunction_vertical<T: Real>() -> Sine<T> {
        sine(1.0 / 3.0, 1.5 * std::f64::consts::PI, 0.0, 0.0)
    }

    /// Junction abscissa `x̄ = sin(3πȳ/2)/3`.
    pub fn x_bar() -> f64 {
        (1.5 * std::f64::consts::PI * Y_BAR).sin() / 3.0
    }

    /// Horizontal curve `y = sin(πx/2)/5 + ȳ − sin(π·sin(3πȳ/2)/6)/5`.
    pub fn tjunction_horizontal<T: Real>() -> Sine<T> {
        let pi = std::f64::consts::PI;
        let off = Y_BAR - (pi * (1.5 * pi * Y_BAR).sin() / 6.0).sin() / 5.0;
        sine(0.2, 0.5 * pi, 0.0, off)
    }

    /// Left, lower-right and upper-right blocks of the T-junction layout.
    pub fn tjunction<T: Real>() -> [BlockMapping<T>; 3] {
        let v = tjunction_vertical::<T>();
        let hz = tjunction_horizontal::<T>();
        let xb = x_bar();
        let top_x = v.eval(T::one()).f64();
        let y_right = hz.eval(T::one()).f64();
        let xl = |y0: f64, y1: f64| Curve::XOfY { f: v, y0: T::lit(y0), y1: T::lit(y1) };
        let hcurve = Curve::YOfX { f: hz, x0: T::lit(xb), x1: T::one() };
        let left = BlockMapping {
            left: line([-1.0, 0.0], [-1.0, 1.0]),
            right: xl(0.0, 1.0),
            bottom: line([-1.0, 0.0], [0.0, 0.0]),
            top: line([-1.0, 1.0], [top_x, 1.0]),
        };
        let lower = BlockMapping {
            left: xl(0.0, Y_BAR),
            right: line([1.0, 0.0], [1.0, y_right]),
            bottom: line([0.0, 0.0], [1.0, 0.0]),
            top: hcurve,
        };
        let upper = BlockMapping {
            left: xl(Y_BAR, 1.0),
            right: line([1.0, y_right], [1.0, 1.0]),
            bottom: hcurve,
            top: line([top_x, 1.0], [1.0, 1.0]),
        };
        [left, lower, upper]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_weights_central_second_order() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fd10_exact_on_degree_10() {
        let n = 15;
        for (i, (s0, w)) in fd10_stencils(n).into_iter().enumerate() {
            let d: f64 = w.iter().enumerate().map(|(m, wm)| wm * (((s0 + m) as f64) / 14.0).powi(10)).sum::<f64>() * 14.0;
            let exact = 10.0 * (i as f64 / 14.0).powi(9);
            assert!((d - exact).abs() < 1e-8, "node {i}: {d} vs {exact}");
        }
    }

    #[test]
    fn tjunction_corners_consistent() {
        for m in library::tjunction::<f64>() {
            m.check_corners().unwrap();
        }
        let (l, r) = library::extreme_interface::<f64>();
        l.check_corners().unwrap();
        r.check_corners().unwrap();
    }

    #[test]
    fn edge_node_ordering() {
        assert_eq!(Edge::Right.nodes(3, 2), vec![4, 5]);
        assert_eq!(Edge::Top.nodes(3, 2), vec![1, 3, 5]);
    }
}
