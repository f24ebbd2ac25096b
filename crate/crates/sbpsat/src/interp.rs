//! Norm-compatible interpolation between non-matching interface grids.
//!
//! Every interface grid carries a piecewise polynomial reconstruction
//! `R f = Σ_k f_k φ_k` (degree `2p−1` per cell, Lagrange in the interior,
//! solved closures in the first and last `p` cells). The closures make `R`
//! exact for degree `p−1` and the basis moments `∫ φ_k t^r` equal to the
//! quadrature `H_k t_k^r` for `r ≤ p−1`, with the higher-order defects
//! minimised in least squares. For two grids `u`, `v` on a common glue
//! parameter the Gram matrix `G = ∫ φ^v φ^uᵀ` gives
//!
//! ```text
//! I_u2v = H_v⁻¹ G,    I_v2u = H_u⁻¹ Gᵀ
//! ```
//!
//! so `H_u I_v2u = (H_v I_u2v)ᵀ` holds by construction. A side may consist
//! of several grids placed end to end (the T-junction case).

use std::sync::OnceLock;

use num_rational::BigRational;
use thiserror::Error;

use crate::dense;
use crate::exact::{solve_affine, FMat};
use crate::report::Certificate;
use crate::sbp::{self, SbpError};
use crate::scalar::{fint, fpow, Field, Real};
use crate::sparse::Csr;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error(transparent)]
    Sbp(#[from] SbpError),
    #[error("closure system infeasible for order {0}")]
    ClosureInfeasible(usize),
    #[error("interface grid too small: order {order} needs at least {min} nodes, got {n}")]
    GridTooSmall { order: usize, n: usize, min: usize },
    #[error("interface sides do not cover the same parameter interval: {0}")]
    SpanMismatch(String),
    #[error("at least three resolutions required, got {0}")]
    InsufficientResolutions(usize),
}

/// Boundary-cell closure of the reconstruction, in local cell coordinate
/// `s ∈ [0, 1]`: `φ_k(c + s) = Σ_m coef[c][k][m] s^m` for cells `c < cells`
/// and nodes `k < width`.
#[derive(Clone, Debug)]
pub struct Reconstruction<F> {
    pub order: usize,
    pub cells: usize,
    pub width: usize,
    pub degree: usize,
    pub coef: Vec<F>,
    pub free_parameters: usize,
}

impl<F: Clone> Reconstruction<F> {
    fn at(&self, c: usize, k: usize, m: usize) -> &F {
        &self.coef[(c * self.width + k) * (self.degree + 1) + m]
    }
}

fn poly_mul<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Coefficients (in `s`) of the Lagrange polynomial for `offsets[j]`.
fn lagrange_poly<F: Field>(offsets: &[i64], j: usize) -> Vec<F> {
    let mut poly = vec![F::one()];
    for (i, &d) in offsets.iter().enumerate() {
        if i != j {
            let den = F::from_ratio(offsets[j] - d, 1);
            poly = poly_mul(&poly, &[-fint::<F>(d) / den.clone(), F::one() / den]);
        }
    }
    poly
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `∫₀¹ s^m ((c+s)/S)^r ds`
fn shifted_moment<F: Field>(m: usize, c: i64, r: usize, scale: &F) -> F {
    let mut acc = F::zero();
    for j in 0..=r {
        let term = F::from_ratio(binom(r, j), (m + j + 1) as i64) * fpow(&fint(c), r - j);
        acc = acc + term;
    }
    acc / fpow(scale, r)
}

fn interior_offsets(p: usize) -> Vec<i64> {
    (-(p as i64) + 1..=p as i64).collect()
}

/// Solves the closure of the reconstruction for `order` with `p` boundary cells.
pub fn solve_reconstruction<F: Field>(order: usize) -> Result<Reconstruction<F>, InterpError> {
    let p = match order {
        2 | 4 | 6 => order / 2,
        _ => return Err(SbpError::UnsupportedOrder(order).into()),
    };
    let cells = p;
    let width = cells + p;
    let q = 2 * p - 1;
    let nunk = cells * width * (q + 1);
    let idx = |c: usize, k: usize, m: usize| (c * width + k) * (q + 1) + m;
    let scale = fint::<F>(width as i64);
    let hard_degree = p - 1;
    let mut hard: Vec<(Vec<F>, F)> = Vec::new();
    let mut soft: Vec<(Vec<F>, F)> = Vec::new();
    // reconstruction exactness, matched coefficient by coefficient in s
    for c in 0..cells {
        for r in 0..=q {
            for m in 0..=q {
                let mut row = vec![F::zero(); nunk];
                for k in 0..width {
                    row[idx(c, k, m)] = fpow(&(fint::<F>(k as i64) / scale.clone()), r);
                }
                let t = if m <= r {
                    F::from_ratio(binom(r, m), 1) * fpow(&(fint::<F>(c as i64) / scale.clone()), r - m)
                        / fpow(&scale, m)
                } else {
                    F::zero()
                };
                if r <= hard_degree {
                    hard.push((row, t));
                } else {
                    soft.push((row, t));
                }
            }
        }
    }
    // basis moments against the quadrature
    let norm = boundary_h::<F>(order);
    let offs = interior_offsets(p);
    let lag: Vec<Vec<F>> = (0..offs.len()).map(|j| lagrange_poly(&offs, j)).collect();
    for k in 0..=width {
        let hk = norm.get(k).cloned().unwrap_or_else(F::one);
        for r in 0..=2 * p {
            let mut row = vec![F::zero(); nunk];
            let mut known = F::zero();
            if k < width {
                for c in 0..cells {
                    for m in 0..=q {
                        row[idx(c, k, m)] = shifted_moment(m, c as i64, r, &scale);
                    }
                }
            }
            // interior cells c with k among nodes c-p+1..=c+p
            let lo = (k as i64 - p as i64).max(cells as i64);
            for c in lo..(k as i64 + p as i64) {
                let j = (k as i64 - c + p as i64 - 1) as usize;
                for (m, coef) in lag[j].iter().enumerate() {
                    known = known + coef.clone() * shifted_moment(m, c, r, &scale);
                }
            }
            let t = hk.clone() * fpow(&(fint::<F>(k as i64) / scale.clone()), r) - known;
            if r <= hard_degree {
                hard.push((row, t));
            } else {
                soft.push((row, t));
            }
        }
    }
    let to_mat = |rows: &[(Vec<F>, F)]| {
        let mut a = FMat::zeros(rows.len(), nunk);
        for (i, (r, _)) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                a[(i, j)] = v.clone();
            }
        }
        (a, rows.iter().map(|x| x.1.clone()).collect::<Vec<F>>())
    };
    let (a, b) = to_mat(&hard);
    let (cm, d) = to_mat(&soft);
    let set = solve_affine(&a, &b).ok_or(InterpError::ClosureInfeasible(order))?;
    let ridge = F::from_ratio(1, 100_000_000);
    let coef = set.least_squares(&cm, &d, &ridge).ok_or(InterpError::ClosureInfeasible(order))?;
    Ok(Reconstruction { order, cells, width, degree: q, coef, free_parameters: set.free_count() })
}

fn boundary_h<F: Field>(order: usize) -> Vec<F> {
    sbp::d1_closure(order)
        .map(|cl| cl.norm.iter().map(rational_to_field).collect())
        .unwrap_or_default()
}

fn rational_to_field<F: Field>(v: &BigRational) -> F {
    use num_traits::ToPrimitive;
    // Closure norms have small denominators; build the exact value.
    let n = v.numer().to_i64().expect("small numerator");
    let d = v.denom().to_i64().expect("small denominator");
    F::from_ratio(n, d)
}

/// Exact closure, cached and converted to `f64`.
pub fn reconstruction(order: usize) -> Result<&'static Reconstruction<f64>, InterpError> {
    static CACHE: [OnceLock<Result<Reconstruction<f64>, InterpError>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !matches!(order, 2 | 4 | 6) {
        return Err(SbpError::UnsupportedOrder(order).into());
    }
    CACHE[order / 2 - 1]
        .get_or_init(|| {
            let r = solve_reconstruction::<BigRational>(order)?;
            Ok(Reconstruction {
                order,
                cells: r.cells,
                width: r.width,
                degree: r.degree,
                coef: r.coef.iter().map(|v| v.magnitude_signed()).collect(),
                free_parameters: r.free_parameters,
            })
        })
        .as_ref()
        .map_err(Clone::clone)
}

/// Smallest node count of an interface grid.
pub fn min_interface_nodes(order: usize) -> Result<usize, InterpError> {
    let p = order / 2;
    let rc = reconstruction(order)?;
    Ok((2 * (rc.cells + p) + 1).max(sbp::min_nodes(order)?))
}

/// Values of all nonzero basis functions at reference coordinate `xi ∈ [0, n−1]`.
pub fn basis_at<T: Real>(order: usize, n: usize, xi: T, out: &mut Vec<(usize, T)>) {
    out.clear();
    let rc = reconstruction(order).expect("supported order");
    let p = order / 2;
    let big_n = n - 1;
    let c = (xi.floor().to_usize().unwrap_or(0)).min(big_n - 1);
    let s = xi - T::from_usize_lossy(c);
    let poly = |cell: usize, k: usize, s: T| {
        let mut v = T::zero();
        for m in (0..=rc.degree).rev() {
            v = v * s + T::lit(*rc.at(cell, k, m));
        }
        v
    };
    if c < rc.cells {
        for k in 0..rc.width {
            out.push((k, poly(c, k, s)));
        }
    } else if c >= big_n - rc.cells {
        let c2 = big_n - 1 - c;
        for k in 0..rc.width {
            out.push((big_n - k, poly(c2, k, T::one() - s)));
        }
    } else {
        let offs = interior_offsets(p);
        for (j, &dj) in offs.iter().enumerate() {
            let mut v = T::one();
            for (i, &di) in offs.iter().enumerate() {
                if i != j {
                    v *= (s - T::lit(di as f64)) / T::lit((dj - di) as f64);
                }
            }
            out.push(((c as i64 + dj) as usize, v));
        }
    }
}

/// One interface grid placed on `[t0, t1]` of the glue parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment<T> {
    pub n: usize,
    pub t0: T,
    pub t1: T,
}

impl<T: Real> Segment<T> {
    pub fn new(n: usize, t0: T, t1: T) -> Self {
        Segment { n, t0, t1 }
    }

    pub fn length(&self) -> T {
        self.t1 - self.t0
    }

    pub fn node(&self, k: usize) -> T {
        self.t0 + self.length() * T::from_usize_lossy(k) / T::from_usize_lossy(self.n - 1)
    }
}

/// Interface norm of a side: segment-wise `L·h·H_ref` concatenated.
pub fn side_norm<T: Real>(order: usize, side: &[Segment<T>]) -> Result<Vec<T>, InterpError> {
    let mut out = Vec::new();
    for seg in side {
        let set = sbp::build_sbp_set(order, sbp::Grid1D::new(seg.n, seg.t0, seg.t1)?)?;
        out.extend(set.h);
    }
    Ok(out)
}

fn side_offsets<T>(side: &[Segment<T>]) -> Vec<usize> {
    let mut off = vec![0];
    for s in side {
        off.push(off.last().unwrap() + s.n);
    }
    off
}

/// Interpolation pair between sides `u` and `v`.
#[derive(Clone, Debug)]
pub struct InterpPair<T> {
    pub order: usize,
    pub n_u: usize,
    pub n_v: usize,
    /// `n_v × n_u`
    pub i_u2v: Csr<T>,
    /// `n_u × n_v`
    pub i_v2u: Csr<T>,
    pub h_u: Vec<T>,
    pub h_v: Vec<T>,
    pub side_u: Vec<Segment<T>>,
    pub side_v: Vec<Segment<T>>,
    /// Union of cell boundaries of both sides (the glue grid).
    pub glue: Vec<T>,
    /// Rows of `I_v2u` (resp. `I_u2v`) computed from interior stencils only.
    pub interior_u: Vec<bool>,
    pub interior_v: Vec<bool>,
}

fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on Legendre polynomials, mapped to [0, 1].
    let mut x = vec![0.0; npts];
    let mut w = vec![0.0; npts];
    for i in 0..npts {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (npts as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..npts {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = npts as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn locate<T: Real>(side: &[Segment<T>], t: T) -> usize {
    side.iter().position(|s| t <= s.t1).unwrap_or(side.len() - 1)
}

fn validate_side<T: Real>(order: usize, side: &[Segment<T>]) -> Result<(), InterpError> {
    let min = min_interface_nodes(order)?;
    for (i, s) in side.iter().enumerate() {
        if s.n < min {
            return Err(InterpError::GridTooSmall { order, n: s.n, min });
        }
        if !(s.t1 > s.t0) {
            return Err(InterpError::SpanMismatch(format!("segment {i} has empty span")));
        }
        if i > 0 && (side[i - 1].t1 - s.t0).abs() > T::lit(1e-12) {
            return Err(InterpError::SpanMismatch(format!("gap before segment {i}")));
        }
    }
    Ok(())
}

fn interior_flags<T: Real>(order: usize, side: &[Segment<T>], other: &[Segment<T>]) -> Vec<bool> {
    let p = order / 2;
    let cells = p;
    let mut flags = Vec::new();
    let inner = |segs: &[Segment<T>], a: T, b: T| {
        segs.iter().any(|s| {
            let h = s.length() / T::from_usize_lossy(s.n - 1);
            let lo = s.t0 + h * T::from_usize_lossy(cells);
            let hi = s.t1 - h * T::from_usize_lossy(cells);
            a >= lo - T::lit(1e-12) && b <= hi + T::lit(1e-12)
        })
    };
    for s in side {
        let h = s.length() / T::from_usize_lossy(s.n - 1);
        for k in 0..s.n {
            let a = s.node(k) - h * T::from_usize_lossy(p);
            let b = s.node(k) + h * T::from_usize_lossy(p);
            flags.push(k >= cells + p && k + cells + p < s.n && inner(side, a, b) && inner(other, a, b));
        }
    }
    flags
}

/// Pair between two sides covering the same parameter interval.
pub fn build_glue_pair<T: Real>(order: usize, u: &[Segment<T>], v: &[Segment<T>]) -> Result<InterpPair<T>, InterpError> {
    validate_side(order, u)?;
    validate_side(order, v)?;
    let tol = T::lit(1e-12);
    let (ua, ub) = (u[0].t0, u.last().unwrap().t1);
    let (va, vb) = (v[0].t0, v.last().unwrap().t1);
    if (ua - va).abs() > tol || (ub - vb).abs() > tol {
        return Err(InterpError::SpanMismatch(format!(
            "[{}, {}] vs [{}, {}]",
            ua.f64(),
            ub.f64(),
            va.f64(),
            vb.f64()
        )));
    }
    let (ou, ov) = (side_offsets(u), side_offsets(v));
    let (n_u, n_v) = (ou[u.len()], ov[v.len()]);
    let mut breaks: Vec<T> = Vec::new();
    for s in u.iter().chain(v) {
        breaks.extend((0..s.n).map(|k| s.node(k)));
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let (gx, gw) = gauss_legendre(8);
    let mut g = vec![vec![T::zero(); n_u]; n_v];
    let (mut bu, mut bv) = (Vec::new(), Vec::new());
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = (a + b) * T::lit(0.5);
        let (su, sv) = (locate(u, mid), locate(v, mid));
        for (&x, &wt) in gx.iter().zip(&gw) {
            let t = a + (b - a) * T::lit(x);
            let weight = (b - a) * T::lit(wt);
            let seg = &u[su];
            let xi = ((t - seg.t0) / seg.length() * T::from_usize_lossy(seg.n - 1)).max(T::zero());
            basis_at(order, seg.n, xi, &mut bu);
            let seg = &v[sv];
            let xi = ((t - seg.t0) / seg.length() * T::from_usize_lossy(seg.n - 1)).max(T::zero());
            basis_at(order, seg.n, xi, &mut bv);
            for &(kv, fv) in &bv {
                for &(ku, fu) in &bu {
                    g[ov[sv] + kv][ou[su] + ku] += weight * fv * fu;
                }
            }
        }
    }
    let h_u = side_norm(order, u)?;
    let h_v = side_norm(order, v)?;
    let gm = Csr::from_triplets(
        n_v,
        n_u,
        g.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &x)| (i, j, x))),
    );
    let inv_v: Vec<T> = h_v.iter().map(|&x| T::one() / x).collect();
    let inv_u: Vec<T> = h_u.iter().map(|&x| T::one() / x).collect();
    let i_u2v = gm.scale_rows(&inv_v);
    let i_v2u = gm.transpose().scale_rows(&inv_u);
    Ok(InterpPair {
        order,
        n_u,
        n_v,
        i_u2v,
        i_v2u,
        h_u,
        h_v,
        side_u: u.to_vec(),
        side_v: v.to_vec(),
        glue: breaks,
        interior_u: interior_flags(order, u, v),
        interior_v: interior_flags(order, v, u),
    })
}

/// 1:2 pair on `[0, 1]`: `u` coarse with `n_coarse` nodes, `v` fine with `2·n_coarse − 1`.
pub fn build_interp_pair<T: Real>(order: usize, n_coarse: usize) -> Result<InterpPair<T>, InterpError> {
    let u = [Segment::new(n_coarse, T::zero(), T::one())];
    let v = [Segment::new(2 * n_coarse - 1, T::zero(), T::one())];
    build_glue_pair(order, &u, &v)
}

/// Identity pair for a conforming interface.
pub fn identity_pair<T: Real>(order: usize, seg: Segment<T>) -> Result<InterpPair<T>, InterpError> {
    let h = side_norm(order, std::slice::from_ref(&seg))?;
    let n = seg.n;
    let glue = (0..n).map(|k| seg.node(k)).collect();
    Ok(InterpPair {
        order,
        n_u: n,
        n_v: n,
        i_u2v: Csr::identity(n),
        i_v2u: Csr::identity(n),
        h_u: h.clone(),
        h_v: h,
        side_u: vec![seg.clone()],
        side_v: vec![seg],
        glue,
        interior_u: vec![true; n],
        interior_v: vec![true; n],
    })
}

fn side_nodes<T: Real>(side: &[Segment<T>]) -> Vec<f64> {
    side.iter().flat_map(|s| (0..s.n).map(move |k| s.node(k).f64())).collect()
}

/// Certifies compatibility, constant preservation and polynomial exactness.
pub fn certify_pair<T: Real>(pair: &InterpPair<T>) -> Certificate {
    let mut c = Certificate::new(format!("interp order {} n_u {} n_v {}", pair.order, pair.n_u, pair.n_v));
    let p = pair.order / 2;
    c.meta("order", pair.order);
    c.meta("n_u", pair.n_u);
    c.meta("n_v", pair.n_v);
    let lhs = pair.i_v2u.scale_rows(&pair.h_u);
    let rhs = pair.i_u2v.scale_rows(&pair.h_v).transpose();
    c.check("norm_compatibility", lhs.axpy(-T::one(), &rhs).max_abs().f64(), 1e-13);
    let u2v = pair.i_u2v.cast::<f64>();
    let v2u = pair.i_v2u.cast::<f64>();
    let rs = |m: &Csr<f64>| (0..m.nrows).map(|i| (m.row(i).map(|x| x.1).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    c.check("row_sums_u2v", rs(&u2v), 1e-13);
    c.check("row_sums_v2u", rs(&v2u), 1e-13);
    let (tu, tv) = (side_nodes(&pair.side_u), side_nodes(&pair.side_v));
    let t0 = tu[0];
    let span = tu[tu.len() - 1] - t0;
    let norm = |t: &[f64]| t.iter().map(|x| (x - t0) / span).collect::<Vec<_>>();
    let (xu, xv) = (norm(&tu), norm(&tv));
    let err = |m: &Csr<f64>, src: &[f64], dst: &[f64], k: usize, mask: Option<&[bool]>| {
        let f: Vec<f64> = src.iter().map(|x| x.powi(k as i32)).collect();
        let g = m.matvec(&f);
        g.iter()
            .zip(dst)
            .enumerate()
            .filter(|(i, _)| mask.is_none_or(|mk| mk[*i]))
            .map(|(_, (a, x))| (a - x.powi(k as i32)).abs())
            .fold(0.0, f64::max)
    };
    let mut edge: f64 = 0.0;
    let mut inner: f64 = 0.0;
    let mut comp: f64 = 0.0;
    let uvu = v2u.matmul(&u2v);
    let vuv = u2v.matmul(&v2u);
    for k in 0..2 * p {
        if k < p {
            edge = edge.max(err(&u2v, &xu, &xv, k, None)).max(err(&v2u, &xv, &xu, k, None));
            comp = comp.max(err(&uvu, &xu, &xu, k, None)).max(err(&vuv, &xv, &xv, k, None));
        }
        inner = inner
            .max(err(&u2v, &xu, &xv, k, Some(&pair.interior_v)))
            .max(err(&v2u, &xv, &xu, k, Some(&pair.interior_u)));
    }
    c.check("exact_degree_p_minus_1_all_rows", edge, 1e-12);
    c.check("exact_degree_2p_minus_1_interior_rows", inner, 1e-12);
    c.check("composition_exact_degree_p_minus_1", comp, 1e-12);
    c
}

/// Smallest eigenvalues of the symmetrised deficiency matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub lambda_min_u: f64,
    pub lambda_min_v: f64,
    pub tol: f64,
    pub contracting: bool,
}

impl ContractionReport {
    pub fn to_kv(&self) -> String {
        format!(
            "lambda_min_u = {:.17e}\nlambda_min_v = {:.17e}\ntol = {:.3e}\ncontracting = {}\n",
            self.lambda_min_u, self.lambda_min_v, self.tol, self.contracting
        )
    }
}

/// Tests whether `H_u(I − I_v2u I_u2v)` and `H_v(I − I_u2v I_v2u)` are PSD
/// (to `10⁻¹⁰·max H`).
pub fn check_norm_contracting<T: Real>(pair: &InterpPair<T>) -> ContractionReport {
    let deficiency = |h: &[T], a: &Csr<T>, b: &Csr<T>| {
        let n = h.len();
        let m = Csr::diag(h).axpy(-T::one(), &a.matmul(b).scale_rows(h));
        debug_assert_eq!(m.nrows, n);
        dense::min_sym_eigenvalue(&dense::to_array(&m))
    };
    let lu = deficiency(&pair.h_u, &pair.i_v2u, &pair.i_u2v);
    let lv = deficiency(&pair.h_v, &pair.i_u2v, &pair.i_v2u);
    let hmax = pair.h_u.iter().chain(&pair.h_v).fold(0.0f64, |m, v| m.max(v.f64()));
    let tol = 1e-10 * hmax;
    ContractionReport { lambda_min_u: lu, lambda_min_v: lv, tol, contracting: lu >= -tol && lv >= -tol }
}

/// Max interpolation errors on `sin(2πt)` per resolution, and fitted slopes.
#[derive(Clone, Debug)]
pub struct OrderTable {
    pub order: usize,
    /// (n_coarse, interior error, edge error)
    pub rows: Vec<(usize, f64, f64)>,
    pub interior_rate: f64,
    pub edge_rate: f64,
}

/// Least-squares slope of `log e` against `log n` (negated: convergence rate).
pub fn fit_rate(ns: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -sxy / sxx
}

/// Empirical orders of the 1:2 pair on `sin(2πt)`, interior versus edge rows,
/// both directions combined.
pub fn measure_interp_order(order: usize, n_coarse: &[usize]) -> Result<OrderTable, InterpError> {
    if n_coarse.len() < 3 {
        return Err(InterpError::InsufficientResolutions(n_coarse.len()));
    }
    let f = |t: f64| (2.0 * std::f64::consts::PI * t).sin();
    let mut rows = Vec::new();
    for &nc in n_coarse {
        let pair = build_interp_pair::<f64>(order, nc)?;
        let (tu, tv) = (side_nodes(&pair.side_u), side_nodes(&pair.side_v));
        let fu: Vec<f64> = tu.iter().map(|&t| f(t)).collect();
        let fv: Vec<f64> = tv.iter().map(|&t| f(t)).collect();
        let gv = pair.i_u2v.matvec(&fu);
        let gu = pair.i_v2u.matvec(&fv);
        let (mut ei, mut ee) = (0.0f64, 0.0f64);
        for (i, (&g, &e)) in gv.iter().zip(&fv).enumerate() {
            if pair.interior_v[i] { ei = ei.max((g - e).abs()) } else { ee = ee.max((g - e).abs()) }
        }
        for (i, (&g, &e)) in gu.iter().zip(&fu).enumerate() {
            if pair.interior_u[i] { ei = ei.max((g - e).abs()) } else { ee = ee.max((g - e).abs()) }
        }
        rows.push((nc, ei, ee));
    }
    let ns: Vec<f64> = rows.iter().map(|r| (r.0 - 1) as f64).collect();
    let interior_rate = fit_rate(&ns, &rows.iter().map(|r| r.1).collect::<Vec<_>>());
    let edge_rate = fit_rate(&ns, &rows.iter().map(|r| r.2).collect::<Vec<_>>());
    Ok(OrderTable { order, rows, interior_rate, edge_rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_degree_15() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 1.0 / 16.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lagrange_poly_interpolates() {
        let offs = interior_offsets(2);
        for j in 0..offs.len() {
            let l = lagrange_poly::<BigRational>(&offs, j);
            for (i, &d) in offs.iter().enumerate() {
                let mut v = fint::<BigRational>(0);
                for (m, c) in l.iter().enumerate() {
                    v += c.clone() * fpow(&fint::<BigRational>(d), m);
                }
                assert_eq!(v, fint::<BigRational>(if i == j { 1 } else { 0 }));
            }
        }
    }

    #[test]
    fn closure_is_partition_of_unity() {
        for order in [2, 4, 6] {
            let rc = reconstruction(order).unwrap();
            for c in 0..rc.cells {
                for m in 0..=rc.degree {
                    let sum: f64 = (0..rc.width).map(|k| rc.at(c, k, m)).sum();
                    let want = if m == 0 { 1.0 } else { 0.0 };
                    assert!((sum - want).abs() < 1e-13, "order {order} cell {c} power {m}: {sum}");
                }
            }
        }
    }
}
