//! Classical RK4 for `w_tt = a(w, t)` written as a first-order system in `(w, w_t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::assembly::SemiDiscreteSystem;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeError {
    #[error("non-finite state at step {step} (t = {t}), largest magnitude at node {node}")]
    NanDetected { step: usize, t: f64, node: usize },
    #[error("dt = {dt:e} exceeds the stability guard {limit:e}")]
    DtExceedsGuard { dt: f64, limit: f64 },
    #[error("invalid time step: {0}")]
    InvalidStep(String),
    #[error("state length {got} does not match system size {expected}")]
    Dimension { expected: usize, got: usize },
}

/// Right side of a second-order system.
pub trait SecondOrderRhs<T> {
    fn len(&self) -> usize;
    /// Writes `a(w, t)` into `out`.
    fn accel(&self, w: &[T], t: f64, out: &mut [T]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<T: Real> SecondOrderRhs<T> for SemiDiscreteSystem<T> {
    fn len(&self) -> usize {
        self.n
    }

    fn accel(&self, w: &[T], t: f64, out: &mut [T]) {
        self.d.matvec_into(w, out);
        if self.solution.amp != 0.0 {
            let c = T::lit((self.solution.omega * t + self.solution.pt).cos());
            for (o, &f) in out.iter_mut().zip(&self.forcing_profile) {
                *o += f * c;
            }
        }
    }
}

/// Closure adapter, used for small surrogate problems.
pub struct FnRhs<F> {
    pub n: usize,
    pub f: F,
}

impl<T, F: Fn(&[T], f64, &mut [T])> SecondOrderRhs<T> for FnRhs<F> {
    fn len(&self) -> usize {
        self.n
    }
    fn accel(&self, w: &[T], t: f64, out: &mut [T]) {
        (self.f)(w, t, out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeState<T> {
    pub t: f64,
    pub w: Vec<T>,
    pub wt: Vec<T>,
}

impl<T: Real> TimeState<T> {
    pub fn zeros(n: usize) -> Self {
        TimeState { t: 0.0, w: vec![T::zero(); n], wt: vec![T::zero(); n] }
    }
}

/// RK4 stability interval on the imaginary axis is `2√2 ≈ 2.83`; for
/// `w_tt = D w` with real negative spectrum the step is `dt·√ρ ≤ 2.8`.
pub const RK4_LIMIT: f64 = 2.8;

pub fn stable_dt(rho: f64, cfl: f64) -> f64 {
    cfl * RK4_LIMIT / rho.sqrt()
}

/// Spectral radius of `D` by 50 steps of power iteration in the mass norm.
pub fn spectral_radius<T: Real>(sys: &SemiDiscreteSystem<T>, iters: usize) -> f64 {
    let n = sys.n;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut x: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    let wnorm = |v: &[T]| v.iter().zip(&sys.weights).map(|(&a, &w)| (a * a * w).f64()).sum::<f64>().sqrt();
    let mut est = 0.0;
    let mut y = vec![T::zero(); n];
    for _ in 0..iters {
        let nx = wnorm(&x);
        sys.d.matvec_into(&x, &mut y);
        let ny = wnorm(&y);
        if ny == 0.0 || nx == 0.0 {
            return est;
        }
        est = ny / nx;
        let s = T::lit(1.0 / ny);
        for (a, &b) in x.iter_mut().zip(&y) {
            *a = b * s;
        }
    }
    est
}

fn check_finite<T: Real>(w: &[T], wt: &[T], step: usize, t: f64) -> Result<(), TimeError> {
    if w.iter().chain(wt).all(|v| v.is_finite()) {
        return Ok(());
    }
    let n = w.len();
    let node = w
        .iter()
        .chain(wt)
        .enumerate()
        .map(|(i, v)| (i, if v.is_finite() { v.abs().f64() } else { f64::INFINITY }))
        .fold((0, -1.0), |m, v| if v.1 > m.1 { v } else { m })
        .0
        % n;
    Err(TimeError::NanDetected { step, t, node })
}

/// Integrates from `initial` to `t_end`; the last step is shortened to land
/// exactly. `guard` is the largest admissible `dt`. The observer sees the
/// initial state and every accepted step.
pub fn integrate<T: Real, R: SecondOrderRhs<T> + ?Sized>(
    rhs: &R,
    initial: TimeState<T>,
    dt: f64,
    t_end: f64,
    guard: Option<f64>,
    mut observer: impl FnMut(usize, &TimeState<T>),
) -> Result<TimeState<T>, TimeError> {
    let n = rhs.len();
    if initial.w.len() != n || initial.wt.len() != n {
        return Err(TimeError::Dimension { expected: n, got: initial.w.len() });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(TimeError::InvalidStep(format!("dt = {dt}")));
    }
    if let Some(limit) = guard {
        if dt > limit {
            return Err(TimeError::DtExceedsGuard { dt, limit });
        }
    }
    let mut s = initial;
    observer(0, &s);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    let mut tmp = vec![T::zero(); n];
    let (half, two, sixth) = (T::lit(0.5), T::lit(2.0), T::one() / T::lit(6.0));
    let mut step = 0;
    while s.t < t_end - 1e-12 * t_end.abs().max(1.0) {
        let h = dt.min(t_end - s.t);
        let th = T::lit(h);
        let t = s.t;
        // stage velocities are wt + c·h·k, stage positions w + c·h·(velocity)
        rhs.accel(&s.w, t, &mut k1);
        for i in 0..n {
            tmp[i] = s.w[i] + half * th * s.wt[i];
        }
        rhs.accel(&tmp, t + 0.5 * h, &mut k2);
        for i in 0..n {
            tmp[i] = s.w[i] + half * th * (s.wt[i] + half * th * k1[i]);
        }
        rhs.accel(&tmp, t + 0.5 * h, &mut k3);
        for i in 0..n {
            tmp[i] = s.w[i] + th * (s.wt[i] + half * th * k2[i]);
        }
        rhs.accel(&tmp, t + h, &mut k4);
        for i in 0..n {
            let v1 = s.wt[i];
            let v2 = s.wt[i] + half * th * k1[i];
            let v3 = s.wt[i] + half * th * k2[i];
            let v4 = s.wt[i] + th * k3[i];
            s.w[i] += th * sixth * (v1 + two * v2 + two * v3 + v4);
            s.wt[i] += th * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        step += 1;
        s.t = if h < dt { t_end } else { t + h };
        check_finite(&s.w, &s.wt, step, s.t)?;
        observer(step, &s);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_one_step_taylor() {
        let rhs = FnRhs { n: 1, f: |w: &[f64], _t: f64, out: &mut [f64]| out[0] = -w[0] };
        let dt = 0.1;
        let s = integrate(&rhs, TimeState { t: 0.0, w: vec![1.0], wt: vec![0.0] }, dt, dt, None, |_, _| {}).unwrap();
        let taylor = 1.0 - dt * dt / 2.0 + dt.powi(4) / 24.0;
        assert!((s.w[0] - taylor).abs() < 1e-12);
        assert!((s.w[0] - dt.cos()).abs() < dt.powi(5));
    }

    #[test]
    fn guard_refuses_large_dt() {
        let rhs = FnRhs { n: 1, f: |w: &[f64], _t: f64, out: &mut [f64]| out[0] = -w[0] };
        let e = integrate(&rhs, TimeState::zeros(1), 1.0, 1.0, Some(0.5), |_, _| {}).unwrap_err();
        assert!(matches!(e, TimeError::DtExceedsGuard { .. }));
    }
}
