//! The sh-rt Jacobi-like baseline: each pair update applies a shear `H(p,q,phi)`
//! (normality enhancement) followed by a Givens rotation `G(p,q,theta)`
//! (off-diagonal suppression) to every matrix of a real tuple.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tuple::{DiagonalizerResult, MatrixTuple};

pub type RMat = DMatrix<f64>;

/// Default cap on pair updates.
pub const DEFAULT_MAX_UPDATES: usize = 20_000;
/// Default relative objective change that stops the run.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

const TANH_CLAMP: f64 = 1.0 - 1e-12;
const DEGENERATE: f64 = 1e-300;

/// Accumulated transform and conjugated tuple.
#[derive(Debug, Clone)]
pub struct ShrtState {
    /// `S̆`, the product of all shears and rotations so far.
    pub s: RMat,
    /// `Ă_k = S̆^{-1} A_k S̆`, updated incrementally.
    pub a: Vec<RMat>,
    /// Pair updates performed.
    pub iteration: usize,
    /// `f_A(S̆)` after every update, starting with the initial value.
    pub f_history: Vec<f64>,
}

/// Parameters chosen by one pair update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairUpdate {
    pub p: usize,
    pub q: usize,
    /// Matrix index that drives the shear.
    pub l: usize,
    pub phi: f64,
    pub theta: f64,
}

fn real_off(m: &RMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                acc += m[(i, j)] * m[(i, j)];
            }
        }
    }
    acc
}

/// `A <- H^{-1} A H` with `H = I` except `h_pp = h_qq = cosh(phi)`, `h_pq = h_qp = sinh(phi)`.
fn apply_shear(m: &mut RMat, p: usize, q: usize, ch: f64, sh: f64) {
    let n = m.nrows();
    for i in 0..n {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = ch * x + sh * y;
        m[(i, q)] = sh * x + ch * y;
    }
    for j in 0..n {
        let (x, y) = (m[(p, j)], m[(q, j)]);
        m[(p, j)] = ch * x - sh * y;
        m[(q, j)] = -sh * x + ch * y;
    }
}

/// `A <- G^T A G` with `g_pp = g_qq = cos(theta)`, `g_pq = -sin(theta)`, `g_qp = sin(theta)`.
fn apply_rotation(m: &mut RMat, p: usize, q: usize, c: f64, s: f64) {
    let n = m.nrows();
    for i in 0..n {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * x + s * y;
        m[(i, q)] = -s * x + c * y;
    }
    for j in 0..n {
        let (x, y) = (m[(p, j)], m[(q, j)]);
        m[(p, j)] = c * x + s * y;
        m[(q, j)] = -s * x + c * y;
    }
}

/// Shear angle from the l-th matrix's (p, q) entries.
pub fn shear_angle(a: &RMat, p: usize, q: usize) -> f64 {
    let n = a.nrows();
    let d = a[(p, p)] - a[(q, q)];
    let e = a[(p, q)] - a[(q, p)];
    let mut kappa = 0.0;
    let mut xi = 0.0;
    for j in (0..n).filter(|&j| j != p && j != q) {
        kappa += a[(p, j)] * a[(q, j)] - a[(j, p)] * a[(j, q)];
        xi += a[(p, j)].powi(2) + a[(q, j)].powi(2) + a[(j, p)].powi(2) + a[(j, q)].powi(2);
    }
    let num = kappa - d * e;
    let den = 2.0 * (d * d + e * e) + xi;
    if num.abs() < DEGENERATE && den.abs() < DEGENERATE {
        return 0.0;
    }
    let ratio = if den == 0.0 { num.signum() } else { num / den };
    ratio.clamp(-TANH_CLAMP, TANH_CLAMP).atanh()
}

/// Rotation angle solving `tan(4 theta) = 2 Σ u_k v_k / Σ (u_k^2 - v_k^2)` with
/// `u_k = b_pp - b_qq`, `v_k = b_pq + b_qp`.
///
/// Of the stationary points, `atan2(num, den) / 4` is the one minimizing the
/// rotated off-diagonal mass. A numerator of exactly zero means `tan(4 theta) = 0`
/// and gives `theta = 0`.
pub fn rotation_angle(b: &[RMat], p: usize, q: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for m in b {
        let u = m[(p, p)] - m[(q, q)];
        let v = m[(p, q)] + m[(q, p)];
        num += 2.0 * u * v;
        den += u * u - v * v;
    }
    if num == 0.0 || (num.abs() < DEGENERATE && den.abs() < DEGENERATE) {
        return 0.0;
    }
    num.atan2(den) / 4.0
}

impl ShrtState {
    /// `S̆ = I`, `Ă_k = A_k`. Rejects tuples with imaginary entries.
    pub fn new(a: &MatrixTuple) -> Result<Self> {
        let n = a.n();
        let mut mats = Vec::with_capacity(a.k());
        for (k, m) in a.iter().enumerate() {
            if m.iter().any(|z| z.im != 0.0) {
                return Err(Error::ComplexInput { index: k });
            }
            mats.push(RMat::from_fn(n, n, |i, j| m[(i, j)].re));
        }
        let f0 = mats.iter().map(real_off).sum();
        Ok(Self {
            s: RMat::identity(n, n),
            a: mats,
            iteration: 0,
            f_history: vec![f0],
        })
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    /// Current `f_A(S̆)`.
    pub fn objective(&self) -> f64 {
        *self.f_history.last().expect("history starts non-empty")
    }

    /// Diagonals of the current `Ă_k`.
    pub fn lambdas(&self) -> Vec<Vec<Complex64>> {
        self.a
            .iter()
            .map(|m| m.diagonal().iter().map(|&v| linalg::c(v)).collect())
            .collect()
    }

    pub fn s_complex(&self) -> CMat {
        self.s.map(linalg::c)
    }

    /// One shear + rotation on the pair `(p, q)`, `p < q`.
    pub fn pair_update(&mut self, p: usize, q: usize) -> PairUpdate {
        assert!(p < q && q < self.n(), "need p < q < n");
        let mut l = 0;
        let mut widest = f64::NEG_INFINITY;
        for (k, m) in self.a.iter().enumerate() {
            let gap = (m[(p, p)] - m[(q, q)]).abs();
            if gap > widest {
                widest = gap;
                l = k;
            }
        }
        let phi = shear_angle(&self.a[l], p, q);
        if phi != 0.0 {
            let (ch, sh) = (phi.cosh(), phi.sinh());
            for m in &mut self.a {
                apply_shear(m, p, q, ch, sh);
            }
            let n = self.n();
            for i in 0..n {
                let (x, y) = (self.s[(i, p)], self.s[(i, q)]);
                self.s[(i, p)] = ch * x + sh * y;
                self.s[(i, q)] = sh * x + ch * y;
            }
        }
        let theta = rotation_angle(&self.a, p, q);
        if theta != 0.0 {
            let (c, s) = (theta.cos(), theta.sin());
            for m in &mut self.a {
                apply_rotation(m, p, q, c, s);
            }
            let n = self.n();
            for i in 0..n {
                let (x, y) = (self.s[(i, p)], self.s[(i, q)]);
                self.s[(i, p)] = c * x + s * y;
                self.s[(i, q)] = -s * x + c * y;
            }
        }
        self.iteration += 1;
        let f = self.a.iter().map(real_off).sum();
        self.f_history.push(f);
        PairUpdate {
            p,
            q,
            l,
            phi,
            theta,
        }
    }
}

/// Functional form of [`ShrtState::pair_update`].
pub fn shrt_pair_update(mut state: ShrtState, p: usize, q: usize) -> (ShrtState, PairUpdate) {
    let upd = state.pair_update(p, q);
    (state, upd)
}

/// Final state of an sh-rt run.
#[derive(Debug, Clone)]
pub struct ShrtRun {
    pub result: DiagonalizerResult,
    pub f_history: Vec<f64>,
    pub updates: usize,
    pub converged: bool,
}

/// Cyclic lexicographic sweeps until `max_updates` pair updates or a relative
/// objective change `<= rel_tol`.
pub fn shrt_run(a: &MatrixTuple, max_updates: usize, rel_tol: f64) -> Result<ShrtRun> {
    shrt_run_observed(a, max_updates, rel_tol, |_| {})
}

/// As [`shrt_run`], calling `observe` on the state before the first update and after each one.
pub fn shrt_run_observed<F>(
    a: &MatrixTuple,
    max_updates: usize,
    rel_tol: f64,
    mut observe: F,
) -> Result<ShrtRun>
where
    F: FnMut(&ShrtState),
{
    if !(rel_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must be nonnegative, got {rel_tol}"
        )));
    }
    let mut state = ShrtState::new(a)?;
    let n = state.n();
    observe(&state);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
        .collect();
    let mut converged = state.objective() == 0.0 || pairs.is_empty();
    let mut cursor = 0;
    while !converged && state.iteration < max_updates {
        let (p, q) = pairs[cursor];
        cursor = (cursor + 1) % pairs.len();
        let before = state.objective();
        state.pair_update(p, q);
        observe(&state);
        let after = state.objective();
        if (after - before).abs() <= rel_tol * after.abs() {
            converged = true;
        }
    }
    let s = state.s_complex();
    let cond_s = linalg::cond2(&s)?;
    Ok(ShrtRun {
        result: DiagonalizerResult {
            lambdas: state.lambdas(),
            off_value: state.objective(),
            cond_s,
            s,
        },
        updates: state.iteration,
        f_history: state.f_history,
        converged,
    })
}
