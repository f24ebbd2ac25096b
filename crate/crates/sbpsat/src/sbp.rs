//! One-dimensional diagonal-norm summation-by-parts operators.
//!
//! Closures of the first-derivative operator are obtained by solving the
//! accuracy conditions exactly over the rationals with the boundary norm
//! fixed to the standard diagonal-norm family. Second-derivative operators
//! with variable coefficient `b` are built in the compatible form
//!
//! ```text
//! M(b) = D1ᵀ H diag(b) D1 + Σ_k (c_k / h) Δ_kᵀ diag(B_k) Δ_k
//! ```
//!
//! where `Δ_k` is the windowed `k`-th undivided difference and `B_k` the
//! window mean of `b`; the `c_k` are chosen so that the interior stencil is
//! the narrow `2p`-th order one. Second order uses the classical narrow
//! operator instead.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dense;
use crate::exact::{solve_affine, FMat};
use crate::report::Certificate;
use crate::scalar::{fint, fpow, Field, Real};
use crate::sparse::Csr;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SbpError {
    #[error("unsupported order {0}; expected 2, 4 or 6")]
    UnsupportedOrder(usize),
    #[error("grid too small: order {order} needs at least {min} nodes, got {n}")]
    GridTooSmall { order: usize, n: usize, min: usize },
    #[error("closure system singular or inconsistent for order {0}")]
    ClosureSingular(usize),
    #[error("coefficient b must be positive; b[{index}] = {value}")]
    NonPositiveCoefficient { index: usize, value: f64 },
    #[error("input matrix not positive semi-definite (smallest eigenvalue {0:e})")]
    NotPsdInput(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Uniform grid `x_j = x0 + j·h`, `j = 0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D<T> {
    pub n: usize,
    pub h: T,
    pub endpoints: (T, T),
}

impl<T: Real> Grid1D<T> {
    pub fn new(n: usize, x0: T, x1: T) -> Result<Self, SbpError> {
        if n < 2 {
            return Err(SbpError::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        let h = (x1 - x0) / T::from_usize_lossy(n - 1);
        if !(h > T::zero()) {
            return Err(SbpError::InvalidGrid("endpoints must be increasing".into()));
        }
        Ok(Grid1D { n, h, endpoints: (x0, x1) })
    }

    /// Grid on the reference interval [0, 1].
    pub fn unit(n: usize) -> Result<Self, SbpError> {
        Self::new(n, T::zero(), T::one())
    }

    pub fn node(&self, j: usize) -> T {
        if j + 1 == self.n {
            self.endpoints.1
        } else {
            self.endpoints.0 + T::from_usize_lossy(j) * self.h
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

fn check_order(order: usize) -> Result<usize, SbpError> {
    match order {
        2 | 4 | 6 => Ok(order / 2),
        _ => Err(SbpError::UnsupportedOrder(order)),
    }
}

/// Boundary norm weights of the diagonal-norm family (units of `h`).
fn boundary_norm<F: Field>(order: usize) -> Vec<F> {
    let r = |a, b| F::from_ratio(a, b);
    match order {
        2 => vec![r(1, 2)],
        4 => vec![r(17, 48), r(59, 48), r(43, 48), r(49, 48)],
        _ => vec![
            r(13649, 43200),
            r(12013, 8640),
            r(2711, 4320),
            r(5359, 4320),
            r(7877, 8640),
            r(43801, 43200),
        ],
    }
}

/// Number of boundary rows that differ from the interior stencil.
pub fn closure_width(order: usize) -> Result<usize, SbpError> {
    check_order(order)?;
    Ok(match order {
        2 => 1,
        4 => 4,
        _ => 6,
    })
}

/// Smallest node count accepted for an order.
pub fn min_nodes(order: usize) -> Result<usize, SbpError> {
    Ok((2 * closure_width(order)?).max(3))
}

/// Central first-derivative stencil `c_{-p..=p}` of order `2p`.
pub fn central_first_stencil<F: Field>(p: usize) -> Vec<F> {
    // Σ_k 2 c_k k^m = δ_{m1} for odd m < 2p
    let mut a = FMat::zeros(p, p);
    let mut rhs = vec![F::zero(); p];
    for (row, m) in (1..2 * p).step_by(2).enumerate() {
        for k in 1..=p {
            a[(row, k - 1)] = fint::<F>(2) * fpow(&fint(k as i64), m);
        }
        if m == 1 {
            rhs[row] = F::one();
        }
    }
    let c = crate::exact::solve_square(&a, &rhs).expect("central stencil system");
    let mut st = vec![F::zero(); 2 * p + 1];
    for k in 1..=p {
        st[p + k] = c[k - 1].clone();
        st[p - k] = -c[k - 1].clone();
    }
    st
}

/// Narrow central second-derivative stencil `ν_{-p..=p}` of order `2p`.
pub fn central_second_stencil<F: Field>(p: usize) -> Vec<F> {
    // ν symmetric; Σ_m ν_m m^j = 2 δ_{j2} for even j ≤ 2p
    let mut a = FMat::zeros(p + 1, p + 1);
    let mut rhs = vec![F::zero(); p + 1];
    for (row, j) in (0..=2 * p).step_by(2).enumerate() {
        a[(row, 0)] = if j == 0 { F::one() } else { F::zero() };
        for k in 1..=p {
            a[(row, k)] = fint::<F>(2) * fpow(&fint(k as i64), j);
        }
        if j == 2 {
            rhs[row] = fint(2);
        }
    }
    let v = crate::exact::solve_square(&a, &rhs).expect("second stencil system");
    let mut st = vec![F::zero(); 2 * p + 1];
    st[p] = v[0].clone();
    for k in 1..=p {
        st[p + k] = v[k].clone();
        st[p - k] = v[k].clone();
    }
    st
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Weights `c_k` (k = p+1..=2p) of the dissipative part of the compatible
/// second-derivative operator, matched to the narrow interior stencil.
pub fn d2_dissipation_weights<F: Field>(order: usize) -> Result<Vec<(usize, F)>, SbpError> {
    let p = check_order(order)?;
    let c = central_first_stencil::<F>(p);
    let nu = central_second_stencil::<F>(p);
    let w = 2 * p;
    // ω = c * c (wide stencil of D1·D1), offsets -2p..=2p
    let mut omega = vec![F::zero(); 2 * w + 1];
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            omega[i + j] = omega[i + j].clone() + ci.clone() * cj.clone();
        }
    }
    let ks: Vec<usize> = (p + 1..=w).collect();
    // Σ_k c_k t_k = ω − ν with t_k[m] = (−1)^m C(2k, k+m); offsets 0..=2p
    let mut a = FMat::zeros(w + 1, ks.len());
    let mut rhs = vec![F::zero(); w + 1];
    for m in 0..=w {
        for (col, &k) in ks.iter().enumerate() {
            if m <= k {
                let s = if m % 2 == 0 { 1 } else { -1 };
                a[(m, col)] = F::from_ratio(s * binom(2 * k, k + m), 1);
            }
        }
        let nu_m = if m <= p { nu[p + m].clone() } else { F::zero() };
        rhs[m] = omega[w + m].clone() - nu_m;
    }
    let sol = solve_affine(&a, &rhs).ok_or(SbpError::ClosureSingular(order))?;
    if sol.free_count() > 0 {
        return Err(SbpError::ClosureSingular(order));
    }
    Ok(ks.into_iter().zip(sol.particular).collect())
}

/// Exact boundary closure of the first-derivative operator, with `h = 1`.
#[derive(Clone, Debug)]
pub struct D1Closure<F> {
    pub order: usize,
    pub width: usize,
    /// Boundary norm weights `H_0..H_{r-1}` in units of `h`.
    pub norm: Vec<F>,
    /// Top-left `r × r` block of `Q`.
    pub block: FMat<F>,
    /// Interior stencil, offsets `-p..=p`.
    pub stencil: Vec<F>,
    /// Free parameters remaining after the accuracy conditions (fixed by
    /// minimising the Frobenius norm of the block).
    pub free_parameters: usize,
}

/// Solves the closure accuracy conditions `Σ_j Q_ij j^k = H_i k i^{k-1}`,
/// `k ≤ p`, for the antisymmetric part of the boundary block.
pub fn solve_d1_closure<F: Field>(order: usize) -> Result<D1Closure<F>, SbpError> {
    let p = check_order(order)?;
    let r = closure_width(order)?;
    let norm = boundary_norm::<F>(order);
    let stencil = central_first_stencil::<F>(p);
    let pairs: Vec<(usize, usize)> =
        (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let half = F::from_ratio(1, 2);
    let mut a = FMat::zeros(r * (p + 1), pairs.len());
    let mut rhs = vec![F::zero(); r * (p + 1)];
    for i in 0..r {
        for k in 0..=p {
            let row = i * (p + 1) + k;
            let mut known = F::zero();
            if i == 0 {
                known = known - half.clone() * fpow(&F::zero(), k);
            }
            for j in r..=(i + p) {
                if j >= r {
                    known = known + stencil[j + p - i].clone() * fpow(&fint(j as i64), k);
                }
            }
            for (col, &(a0, b0)) in pairs.iter().enumerate() {
                // Q[a0][b0] = q, Q[b0][a0] = -q
                if a0 == i {
                    a[(row, col)] = fpow(&fint(b0 as i64), k);
                } else if b0 == i {
                    a[(row, col)] = -fpow(&fint::<F>(a0 as i64), k);
                }
            }
            let target = if k == 0 {
                F::zero()
            } else {
                norm[i].clone() * fint(k as i64) * fpow(&fint(i as i64), k - 1)
            };
            rhs[row] = target - known;
        }
    }
    let set = solve_affine(&a, &rhs).ok_or(SbpError::ClosureSingular(order))?;
    let q = set.min_norm().ok_or(SbpError::ClosureSingular(order))?;
    let mut block = FMat::zeros(r, r);
    block[(0, 0)] = -half;
    for (col, &(i, j)) in pairs.iter().enumerate() {
        block[(i, j)] = q[col].clone();
        block[(j, i)] = -q[col].clone();
    }
    Ok(D1Closure { order, width: r, norm, block, stencil, free_parameters: set.free_count() })
}

/// Cached exact closure for an order.
pub fn d1_closure(order: usize) -> Result<&'static D1Closure<BigRational>, SbpError> {
    static CACHE: [OnceLock<Result<D1Closure<BigRational>, SbpError>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let p = check_order(order)?;
    CACHE[p - 1].get_or_init(|| solve_d1_closure(order)).as_ref().map_err(Clone::clone)
}

/// Unscaled `(H/h, Q)` on `n` nodes from the exact closure.
fn norm_and_q<T: Real>(order: usize, n: usize) -> Result<(Vec<T>, Csr<T>), SbpError> {
    let cl = d1_closure(order)?;
    let (p, r) = (order / 2, cl.width);
    let min = min_nodes(order)?;
    if n < min {
        return Err(SbpError::GridTooSmall { order, n, min });
    }
    let st: Vec<T> = cl.stencil.iter().map(|v| v.to_real()).collect();
    let blk: Vec<Vec<T>> =
        (0..r).map(|i| (0..r).map(|j| cl.block[(i, j)].to_real()).collect()).collect();
    let mut trips = Vec::new();
    for i in 0..n {
        let lo = i.saturating_sub(p);
        let hi = (i + p).min(n - 1);
        if i < r {
            trips.extend((0..r).map(|j| (i, j, blk[i][j])));
            trips.extend((r..=hi).map(|j| (i, j, st[j + p - i])));
        } else if i >= n - r {
            trips.extend((n - r..n).map(|j| (i, j, -blk[n - 1 - i][n - 1 - j])));
            trips.extend((lo..n - r).map(|j| (i, j, st[j + p - i])));
        } else {
            trips.extend((lo..=hi).map(|j| (i, j, st[j + p - i])));
        }
    }
    let nb: Vec<T> = cl.norm.iter().map(|v| v.to_real()).collect();
    let mut hd = vec![T::one(); n];
    for j in 0..r {
        hd[j] = nb[j];
        hd[n - 1 - j] = nb[j];
    }
    Ok((hd, Csr::from_triplets(n, n, trips)))
}

/// Boundary-derivative operator: rows 0 and n−1 approximate ∂/∂x, other rows are zero.
fn boundary_derivative<T: Real>(order: usize, d1: &Csr<T>, h: T) -> Csr<T> {
    let n = d1.nrows;
    if order == 2 {
        let c = [T::lit(-1.5), T::lit(2.0), T::lit(-0.5)];
        let mut trips = Vec::new();
        for (k, &v) in c.iter().enumerate() {
            trips.push((0, k, v / h));
            trips.push((n - 1, n - 1 - k, -v / h));
        }
        Csr::from_triplets(n, n, trips)
    } else {
        Csr::from_triplets(n, n, d1.row(0).map(|(j, v)| (0, j, v)).chain(d1.row(n - 1).map(|(j, v)| (n - 1, j, v))))
    }
}

/// `M(b)` for coefficient samples `b`.
pub fn assemble_m<T: Real>(order: usize, h: T, d1: &Csr<T>, hdiag: &[T], b: &[T]) -> Csr<T> {
    let n = b.len();
    if order == 2 {
        let mut trips = Vec::with_capacity(4 * n);
        for j in 0..n - 1 {
            let w = (b[j] + b[j + 1]) * T::lit(0.5) / h;
            trips.extend([(j, j, w), (j + 1, j + 1, w), (j, j + 1, -w), (j + 1, j, -w)]);
        }
        return Csr::from_triplets(n, n, trips);
    }
    let hb: Vec<T> = hdiag.iter().zip(b).map(|(&x, &y)| x * y).collect();
    let mut m = d1.transpose().matmul(&d1.scale_rows(&hb));
    let weights = d2_weights_real::<T>(order);
    let mut trips = Vec::new();
    for (k, ck) in weights {
        let coef: Vec<T> = (0..=k)
            .map(|m| {
                let s = if (k - m) % 2 == 0 { 1.0 } else { -1.0 };
                T::lit(s * binom(k, m) as f64)
            })
            .collect();
        let inv = T::one() / T::from_usize_lossy(k + 1);
        for i in 0..n - k {
            let bk = b[i..=i + k].iter().copied().sum::<T>() * inv * ck / h;
            for (a, &ca) in coef.iter().enumerate() {
                for (c, &cc) in coef.iter().enumerate() {
                    trips.push((i + a, i + c, bk * ca * cc));
                }
            }
        }
    }
    m = m.add(&Csr::from_triplets(n, n, trips));
    m
}

fn d2_weights_real<T: Real>(order: usize) -> Vec<(usize, T)> {
    static CACHE: [OnceLock<Vec<(usize, f64)>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let w = CACHE[order / 2 - 1].get_or_init(|| {
        d2_dissipation_weights::<BigRational>(order)
            .expect("dissipation weights")
            .into_iter()
            .map(|(k, c)| (k, c.magnitude_signed()))
            .collect()
    });
    w.iter().map(|&(k, c)| (k, T::lit(c))).collect()
}

/// `H⁻¹(−M + diag(−b_0, 0, …, 0, b_N)·S)`.
fn assemble_d2<T: Real>(m: &Csr<T>, s: &Csr<T>, hdiag: &[T], b: &[T]) -> Csr<T> {
    let n = b.len();
    let mut bb = vec![T::zero(); n];
    bb[0] = -b[0];
    bb[n - 1] = b[n - 1];
    let inv: Vec<T> = hdiag.iter().map(|&v| T::one() / v).collect();
    s.scale_rows(&bb).axpy(-T::one(), m).scale_rows(&inv)
}

/// The two rows of `B·S` (boundary selector times boundary derivative).
pub fn bs_rows<T: Real>(s: &Csr<T>) -> Csr<T> {
    let n = s.nrows;
    Csr::from_triplets(
        2,
        n,
        s.row(0).map(|(j, v)| (0, j, -v)).chain(s.row(n - 1).map(|(j, v)| (1, j, v))),
    )
}

/// Diagonal-norm SBP operators on one grid line.
#[derive(Clone, Debug)]
pub struct SbpSet<T> {
    pub order: usize,
    pub grid: Grid1D<T>,
    /// Diagonal of `H`.
    pub h: Vec<T>,
    pub q: Csr<T>,
    pub d1: Csr<T>,
    pub s: Csr<T>,
    pub d2: Csr<T>,
    pub m: Csr<T>,
    /// Diagonal of the boundary selector `B = diag(−1, 0, …, 0, 1)`.
    pub b: Vec<T>,
    pub theta: T,
    pub closure_width: usize,
}

impl<T: Real> SbpSet<T> {
    pub fn n(&self) -> usize {
        self.grid.n
    }
}

/// Builds and populates an [`SbpSet`]; `theta` comes from [`theta_for`].
pub fn build_sbp_set<T: Real>(order: usize, grid: Grid1D<T>) -> Result<SbpSet<T>, SbpError> {
    let (hn, q) = norm_and_q::<T>(order, grid.n)?;
    let n = grid.n;
    let step = grid.h;
    let h: Vec<T> = hn.iter().map(|&v| v * step).collect();
    let inv: Vec<T> = h.iter().map(|&v| T::one() / v).collect();
    let d1 = q.scale_rows(&inv);
    let s = boundary_derivative(order, &d1, step);
    let ones = vec![T::one(); n];
    let m = assemble_m(order, step, &d1, &h, &ones);
    let d2 = assemble_d2(&m, &s, &h, &ones);
    let mut b = vec![T::zero(); n];
    b[0] = -T::one();
    b[n - 1] = T::one();
    Ok(SbpSet {
        order,
        grid,
        h,
        q,
        d1,
        s,
        d2,
        m,
        b,
        theta: T::lit(theta_for(order, n)?),
        closure_width: closure_width(order)?,
    })
}

/// Variable-coefficient second-derivative operator `D2(b)`.
#[derive(Clone, Debug)]
pub struct VariableD2<T> {
    pub order: usize,
    pub grid: Grid1D<T>,
    pub b_values: Vec<T>,
    pub mb: Csr<T>,
    /// Diagonal of `B(b) = diag(−b_0, 0, …, 0, b_N)`.
    pub bb: Vec<T>,
    pub s: Csr<T>,
    pub d2: Csr<T>,
    pub sigma: T,
    pub b_m: T,
    /// Closure width `l` used for `b_m`.
    pub l: usize,
    pub rb: Csr<T>,
}

fn check_coefficient<T: Real>(b: &[T]) -> Result<(), SbpError> {
    for (index, &v) in b.iter().enumerate() {
        if !(v > T::zero()) {
            return Err(SbpError::NonPositiveCoefficient { index, value: v.f64() });
        }
    }
    Ok(())
}

/// Sparse `D2(b)` and `M(b)` without certification, for system assembly.
pub fn variable_d2_operator<T: Real>(set: &SbpSet<T>, b: &[T]) -> Result<(Csr<T>, Csr<T>), SbpError> {
    if b.len() != set.n() {
        return Err(SbpError::InvalidGrid(format!("coefficient length {} != {}", b.len(), set.n())));
    }
    check_coefficient(b)?;
    let m = assemble_m(set.order, set.grid.h, &set.d1, &set.h, b);
    let d2 = assemble_d2(&m, &set.s, &set.h, b);
    Ok((d2, m))
}

/// Builds `D2(b)` and certifies its borrowing constant for this `b`.
pub fn build_variable_d2<T: Real>(order: usize, grid: Grid1D<T>, b_values: Vec<T>) -> Result<VariableD2<T>, SbpError> {
    check_coefficient(&b_values)?;
    let set = build_sbp_set(order, grid)?;
    let (d2, mb) = variable_d2_operator(&set, &b_values)?;
    let n = set.n();
    let l = set.closure_width.max(1);
    let b_m = b_values[..l].iter().chain(&b_values[n - l..]).copied().fold(T::infinity(), T::min);
    let sigma = compute_borrowing(&mb, &bs_rows(&set.s), set.grid.h, b_m)?;
    let hb: Vec<T> = set.h.iter().zip(&b_values).map(|(&x, &y)| x * y).collect();
    let rb = mb.axpy(-T::one(), &set.d1.transpose().matmul(&set.d1.scale_rows(&hb)));
    let mut bb = vec![T::zero(); n];
    bb[0] = -b_values[0];
    bb[n - 1] = b_values[n - 1];
    Ok(VariableD2 { order, grid: set.grid, b_values, mb, bb, s: set.s, d2, sigma, b_m, l, rb })
}

fn psd_tol(norm: f64) -> f64 {
    1e-12 * norm.max(f64::MIN_POSITIVE)
}

/// Largest `γ` with `M − h·γ·weight·RᵀR ⪰ 0` (to `10⁻¹²·max|M|`), where `R`
/// holds the interface rows of `B·S`. Bisection, 60 iterations.
pub fn compute_borrowing<T: Real>(m: &Csr<T>, bs: &Csr<T>, h: T, weight: T) -> Result<T, SbpError> {
    let md = dense::to_array(m);
    let tol = psd_tol(dense::max_abs(&md));
    let lam0 = dense::min_sym_eigenvalue(&md);
    if lam0 < -tol {
        return Err(SbpError::NotPsdInput(lam0));
    }
    let r = dense::to_array(bs);
    let rtr = r.t().dot(&r);
    let scale = h.f64() * weight.f64();
    let ok = |g: f64| dense::min_sym_eigenvalue(&(&md - &(&rtr * (g * scale)))) >= -tol;
    let mut hi = 1.0;
    let mut guard = 0;
    while ok(hi) {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Ok(T::infinity());
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(T::lit(lo))
}

const REFERENCE_NODES: usize = 41;
const THETA_CAP: usize = 101;

/// Borrowing constant θ of the constant-coefficient operator on `n` nodes.
/// Grids larger than 101 nodes reuse the 101-node value; closures are
/// decoupled there and θ no longer depends on `n`. Results are cached.
pub fn theta_for(order: usize, n: usize) -> Result<f64, SbpError> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), f64>>> = OnceLock::new();
    check_order(order)?;
    let n = n.min(THETA_CAP);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().unwrap().get(&(order, n)) {
        return Ok(v);
    }
    let grid = Grid1D::<f64>::unit(n)?;
    let (hn, q) = norm_and_q::<f64>(order, grid.n)?;
    let h: Vec<f64> = hn.iter().map(|v| v * grid.h).collect();
    let inv: Vec<f64> = h.iter().map(|v| 1.0 / v).collect();
    let d1 = q.scale_rows(&inv);
    let s = boundary_derivative(order, &d1, grid.h);
    let m = assemble_m(order, grid.h, &d1, &h, &vec![1.0; grid.n]);
    let theta = compute_borrowing(&m, &bs_rows(&s), grid.h, 1.0)?;
    cache.lock().unwrap().insert((order, n), theta);
    Ok(theta)
}

/// Deterministic smooth positive coefficients `1 + Σ a_k sin(kπx + φ_k)`
/// with `Σ|a_k| < 0.8`.
pub fn random_smooth_coefficient(x: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(f64, f64)> = (1..=3).map(|_| (rng.gen_range(-0.26..0.26), rng.gen_range(0.0..6.3))).collect();
    let scale = rng.gen_range(0.5..3.0);
    x.iter()
        .map(|&t| {
            scale * (1.0 + terms.iter().enumerate().map(|(k, &(a, ph))| a * ((k + 1) as f64 * std::f64::consts::PI * t + ph).sin()).sum::<f64>())
        })
        .collect()
}

/// Family estimate of σ: minimum over `b ≡ 1` and 20 random smooth positive
/// coefficients of the per-instance borrowing constant.
pub fn sigma_family(order: usize) -> Result<f64, SbpError> {
    static CACHE: [OnceLock<Result<f64, SbpError>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let p = check_order(order)?;
    CACHE[p - 1]
        .get_or_init(|| {
            let grid = Grid1D::<f64>::unit(REFERENCE_NODES)?;
            let x = grid.nodes();
            let mut best = build_variable_d2(order, grid.clone(), vec![1.0; x.len()])?.sigma;
            for seed in 0..20 {
                let b = random_smooth_coefficient(&x, 1000 + seed);
                best = best.min(build_variable_d2(order, grid.clone(), b)?.sigma);
            }
            Ok(best)
        })
        .clone()
}

fn dense_min_eig<T: Real>(m: &Csr<T>) -> (f64, f64) {
    let a = dense::to_array(m);
    (dense::min_sym_eigenvalue(&a), dense::max_abs(&a))
}

fn monomials(x: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let f = x.iter().map(|&t| t.powi(k as i32)).collect();
    let df = x.iter().map(|&t| if k == 0 { 0.0 } else { k as f64 * t.powi(k as i32 - 1) }).collect();
    (f, df)
}

/// Checks every structural and accuracy invariant of a constant-coefficient set.
pub fn verify_sbp_identities<T: Real>(set: &SbpSet<T>) -> Certificate {
    let mut c = Certificate::new(format!("sbp order {} n {}", set.order, set.n()));
    let n = set.n();
    let p = set.order / 2;
    let r = set.closure_width;
    c.meta("order", set.order);
    c.meta("n", n);
    c.meta("closure_width", r);
    c.meta("theta", format!("{:.17e}", set.theta.f64()));
    for (j, &v) in set.h.iter().enumerate() {
        if !(v > T::zero()) {
            c.assert(format!("H_positive.entry_{j}"), false);
        }
    }
    c.assert("H_positive", set.h.iter().all(|&v| v > T::zero()));
    // Q + Qᵀ = B
    let mut qq = set.q.add(&set.q.transpose());
    qq = qq.axpy(-T::one(), &Csr::diag(&set.b));
    c.check("Q_plus_QT_equals_B", qq.max_abs().f64(), 1e-14);
    // H D1 = Q
    let hd1 = set.d1.scale_rows(&set.h);
    c.check("H_D1_equals_Q", hd1.axpy(-T::one(), &set.q).max_abs().f64(), 1e-13);
    // polynomial exactness of D1 on [0,1] coordinates
    let xs: Vec<f64> = set.grid.nodes().iter().map(|v| v.f64()).collect();
    let (x0, x1) = (xs[0], xs[n - 1]);
    let xi: Vec<f64> = xs.iter().map(|v| (v - x0) / (x1 - x0)).collect();
    let d1f = set.d1.cast::<f64>().scale(x1 - x0);
    let mut bnd_err: f64 = 0.0;
    let mut int_err: f64 = 0.0;
    for k in 0..=2 * p {
        let (f, df) = monomials(&xi, k);
        let g = d1f.matvec(&f);
        for j in 0..n {
            let e = (g[j] - df[j]).abs() / (k.max(1) as f64);
            let interior = j >= r && j + r < n;
            if k <= p {
                bnd_err = bnd_err.max(e);
            }
            if interior {
                int_err = int_err.max(e);
            }
        }
    }
    c.check("D1_exact_degree_p_all_nodes", bnd_err, 1e-10);
    c.check("D1_exact_degree_2p_interior", int_err, 1e-10);
    // quadrature
    let hq: Vec<f64> = set.h.iter().map(|v| v.f64() / (x1 - x0)).collect();
    let mut quad: f64 = 0.0;
    for k in 0..2 * p {
        let s: f64 = hq.iter().zip(&xi).map(|(w, x)| w * x.powi(k as i32)).sum();
        quad = quad.max((s - 1.0 / (k as f64 + 1.0)).abs());
    }
    c.check("H_quadrature", quad, 1e-10);
    // integration by parts with random vectors
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    let v: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    let du = set.d1.matvec(&u);
    let dv = set.d1.matvec(&v);
    let ibp: T = (0..n).map(|j| u[j] * set.h[j] * dv[j] + du[j] * set.h[j] * v[j]).sum::<T>()
        - (u[n - 1] * v[n - 1] - u[0] * v[0]);
    c.check("integration_by_parts", ibp.abs().f64(), 1e-12);
    // M
    c.check("M_symmetric", set.m.asymmetry().f64(), 1e-12 * set.m.max_abs().f64());
    let (lam, norm) = dense_min_eig(&set.m);
    c.check("M_psd", -lam, psd_tol(norm));
    let bs = bs_rows(&set.s);
    let deflated = set.m.axpy(-set.grid.h * set.theta, &bs.transpose().matmul(&bs));
    let (lam, _) = dense_min_eig(&deflated);
    c.check("M_borrowing_psd", -lam, psd_tol(norm));
    // D2 definition and quadratic exactness
    let hd2 = set.d2.scale_rows(&set.h);
    let rebuilt = set.s.scale_rows(&set.b).axpy(-T::one(), &set.m);
    c.check("M_equals_minus_HD2_plus_BS", hd2.axpy(-T::one(), &rebuilt).max_abs().f64(), 1e-10 * norm);
    let d2f = set.d2.cast::<f64>().scale((x1 - x0) * (x1 - x0));
    let (f2, _) = monomials(&xi, 2);
    let e2 = d2f.matvec(&f2).iter().map(|g| (g - 2.0).abs()).fold(0.0, f64::max);
    c.check("D2_exact_quadratic", e2, 1e-8);
    c
}

/// Checks the invariants of a variable-coefficient operator.
pub fn verify_variable_d2<T: Real>(op: &VariableD2<T>) -> Certificate {
    let mut c = Certificate::new(format!("variable d2 order {} n {}", op.order, op.grid.n));
    let n = op.grid.n;
    c.meta("order", op.order);
    c.meta("n", n);
    c.meta("l", op.l);
    c.meta("b_m", format!("{:.17e}", op.b_m.f64()));
    c.meta("sigma", format!("{:.17e}", op.sigma.f64()));
    c.check("Mb_symmetric", op.mb.asymmetry().f64(), 1e-12 * op.mb.max_abs().f64());
    let (lam, norm) = dense_min_eig(&op.mb);
    c.check("Mb_psd", -lam, psd_tol(norm));
    let bs = bs_rows(&op.s);
    let deflated = op.mb.axpy(-op.grid.h * op.sigma * op.b_m, &bs.transpose().matmul(&bs));
    let (lam2, _) = dense_min_eig(&deflated);
    c.check("Mb_borrowing_psd", -lam2, psd_tol(norm));
    c.check("Rb_symmetric", op.rb.asymmetry().f64(), 1e-12 * norm);
    let (lam3, _) = dense_min_eig(&op.rb);
    c.check("Rb_psd", -lam3, psd_tol(norm));
    // consistency floor with b = 1 + x, q = x on the unit-normalised grid
    let (x0, x1) = (op.grid.endpoints.0.f64(), op.grid.endpoints.1.f64());
    let xi: Vec<f64> = op.grid.nodes().iter().map(|v| (v.f64() - x0) / (x1 - x0)).collect();
    match Grid1D::<f64>::unit(n).and_then(|g| build_sbp_set(op.order, g)) {
        Ok(set) => {
            let b: Vec<f64> = xi.iter().map(|x| 1.0 + x).collect();
            let (d2, _) = variable_d2_operator(&set, &b).expect("positive coefficient");
            let e = d2.matvec(&xi).iter().map(|g| (g - 1.0).abs()).fold(0.0, f64::max);
            c.check("D2b_linear_consistency", e, 1e-9);
        }
        Err(_) => {
            c.assert("D2b_linear_consistency", false);
        }
    }
    c
}

/// Sparse triplet export, 17 significant digits.
pub fn triplet_text<T: Real>(m: &Csr<T>) -> String {
    let mut s = String::with_capacity(m.nnz() * 32);
    s.push_str(&format!("# {} {} {}\n", m.nrows, m.ncols, m.nnz()));
    for (i, j, v) in m.triplets() {
        s.push_str(&format!("{i} {j} {:.16e}\n", v.f64()));
    }
    s
}

/// Parses [`triplet_text`] output.
pub fn parse_triplets(text: &str) -> Result<Csr<f64>, String> {
    let mut dims = None;
    let mut trips = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let v: Vec<usize> = rest.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            if v.len() >= 2 {
                dims = Some((v[0], v[1]));
            }
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(format!("line {}: expected 'row col value'", ln + 1));
        }
        let i: usize = f[0].parse().map_err(|e| format!("line {}: {e}", ln + 1))?;
        let j: usize = f[1].parse().map_err(|e| format!("line {}: {e}", ln + 1))?;
        let v: f64 = f[2].parse().map_err(|e| format!("line {}: {e}", ln + 1))?;
        trips.push((i, j, v));
    }
    let (nr, nc) = dims.unwrap_or_else(|| {
        let r = trips.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let c = trips.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        (r, c)
    });
    Ok(Csr::from_triplets(nr, nc, trips))
}
