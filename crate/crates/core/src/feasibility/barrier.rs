//! Log-det barrier maximization of the smallest eigenvalue of an affine
//! block-diagonal pencil.
//!
//! For blocks `F_b(w) = C_b + Σ w_j A_bj` the solver follows the central path
//! of
//!
//! ```text
//! maximize t   subject to   F_b(w) − t·I ⪰ 0 for every block b
//! ```
//!
//! On the path `Z_b = μ·(F_b − tI)⁻¹` is dual feasible, so `t* ≤ t + μ·N`
//! with `N` the total block size. That bound is what turns a stalled search
//! into an `Out` answer.

use crate::symlin::{self, SymmetricMatrix};

/// One diagonal block: `constant + Σ terms[j].1 · w[terms[j].0]`.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub size: usize,
    pub constant: Vec<f64>,
    pub terms: Vec<(usize, Vec<f64>)>,
}

impl Block {
    pub fn value(&self, w: &[f64]) -> Vec<f64> {
        let mut m = self.constant.clone();
        for (j, a) in &self.terms {
            let x = w[*j];
            if x != 0.0 {
                for (mi, ai) in m.iter_mut().zip(a) {
                    *mi += x * ai;
                }
            }
        }
        m
    }

    fn shifted_value(&self, w: &[f64], t: f64) -> Vec<f64> {
        let mut m = self.value(w);
        for i in 0..self.size {
            m[i * self.size + i] -= t;
        }
        m
    }

    pub fn min_eigenvalue(&self, w: &[f64]) -> f64 {
        min_eig(&self.value(w), self.size)
    }
}

pub(crate) fn min_eig(m: &[f64], n: usize) -> f64 {
    if n == 1 {
        return m[0];
    }
    let s = SymmetricMatrix::new(n, m.to_vec()).expect("square block");
    symlin::eigh(&s).map(|e| e.eigenvalues[0]).unwrap_or(f64::NEG_INFINITY)
}

/// Affine map `w = offset + Σ_k v_k · basis[k]` from reduced to original variables.
#[derive(Clone, Debug)]
pub(crate) struct AffineMap {
    pub offset: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        AffineMap { offset: vec![0.0; n], basis }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut w = self.offset.clone();
        for (vk, b) in v.iter().zip(&self.basis) {
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi += vk * bi;
            }
        }
        w
    }

    /// Least-squares preimage (the basis is orthonormal).
    pub fn preimage(&self, w: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = w.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        self.basis.iter().map(|b| symlin::dot(b, &d)).collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            offset: self.apply(&inner.offset),
            basis: inner
                .basis
                .iter()
                .map(|b| {
                    let mut w = vec![0.0; self.offset.len()];
                    for (vk, base) in b.iter().zip(&self.basis) {
                        for (wi, bi) in w.iter_mut().zip(base) {
                            *wi += vk * bi;
                        }
                    }
                    w
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub nvars: usize,
    pub blocks: Vec<Block>,
}

impl Problem {
    pub fn total_size(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Smallest eigenvalue over all blocks at `w`.
    pub fn min_eigenvalue(&self, w: &[f64]) -> f64 {
        self.blocks.iter().map(|b| b.min_eigenvalue(w)).fold(f64::INFINITY, f64::min)
    }

    /// Substitutes `w = map(v)`.
    pub fn restrict(&self, map: &AffineMap) -> Problem {
        let nv = map.basis.len();
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let constant = b.value(&map.offset);
                let mut terms = Vec::new();
                for (k, dir) in map.basis.iter().enumerate() {
                    let mut m = vec![0.0; b.size * b.size];
                    let mut any = false;
                    for (j, a) in &b.terms {
                        let c = dir[*j];
                        if c != 0.0 {
                            any = true;
                            for (mi, ai) in m.iter_mut().zip(a) {
                                *mi += c * ai;
                            }
                        }
                    }
                    if any && m.iter().any(|v| *v != 0.0) {
                        terms.push((k, m));
                    }
                }
                Block { size: b.size, constant, terms }
            })
            .collect();
        Problem { nvars: nv, blocks }
    }

    /// Compresses block `b` to `Qᵀ F_b Q` for the orthonormal columns `q`.
    pub fn compress_block(block: &Block, q: &[Vec<f64>]) -> Option<Block> {
        let r = q.len();
        if r == 0 {
            return None;
        }
        let n = block.size;
        let compress = |m: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; r * r];
            for a in 0..r {
                let mut mq = vec![0.0; n];
                for i in 0..n {
                    mq[i] = (0..n).map(|j| m[i * n + j] * q[a][j]).sum();
                }
                for b2 in a..r {
                    let v = symlin::dot(&q[b2], &mq);
                    out[a * r + b2] = v;
                    out[b2 * r + a] = v;
                }
            }
            out
        };
        Some(Block {
            size: r,
            constant: compress(&block.constant),
            terms: block.terms.iter().map(|(j, a)| (*j, compress(a))).collect(),
        })
    }
}

/// Dense Cholesky factor (lower, row-major) or `None` when not positive definite.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !d.is_finite() || d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

fn chol_logdet(l: &[f64], n: usize) -> f64 {
    (0..n).map(|i| l[i * n + i].ln()).sum::<f64>() * 2.0
}

/// `A⁻¹` from the Cholesky factor of `A`.
fn chol_inverse(l: &[f64], n: usize) -> Vec<f64> {
    // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹
    let mut linv = vec![0.0; n * n];
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[i * n + k] * linv[k * n + c];
            }
            linv[i * n + c] = s / l[i * n + i];
        }
    }
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for k in i.max(j)..n {
                s += linv[k * n + i] * linv[k * n + j];
            }
            inv[i * n + j] = s;
            inv[j * n + i] = s;
        }
    }
    inv
}

fn matmul_sq(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// `tr(P·Q)` for square row-major matrices.
fn trace_prod(p: &[f64], q: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            s += p[a * n + b] * q[b * n + a];
        }
    }
    s
}

/// Solves the symmetric positive (semi)definite system `H x = rhs` with
/// diagonal scaling and a growing ridge when the factorization fails.
pub(crate) fn solve_spd(h: &[f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    let d: Vec<f64> = (0..n).map(|i| if h[i * n + i] > 0.0 { 1.0 / h[i * n + i].sqrt() } else { 1.0 }).collect();
    let mut scaled = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            scaled[i * n + j] = d[i] * h[i * n + j] * d[j];
        }
    }
    let mut ridge = 0.0;
    for _ in 0..12 {
        let mut m = scaled.clone();
        for i in 0..n {
            m[i * n + i] += ridge;
        }
        if let Some(l) = cholesky(&m, n) {
            let b: Vec<f64> = (0..n).map(|i| d[i] * rhs[i]).collect();
            let mut y = vec![0.0; n];
            for i in 0..n {
                let mut s = b[i];
                for k in 0..i {
                    s -= l[i * n + k] * y[k];
                }
                y[i] = s / l[i * n + i];
            }
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in (i + 1)..n {
                    s -= l[k * n + i] * x[k];
                }
                x[i] = s / l[i * n + i];
            }
            return Some(x.iter().zip(&d).map(|(xi, di)| xi * di).collect());
        }
        ridge = if ridge == 0.0 { 1e-14 } else { ridge * 100.0 };
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Stop as soon as a strictly feasible point (`t > 0`) appears or the gap
    /// bound proves infeasibility.
    Decide,
    /// Continue until `t` is within a quarter of the optimum: the returned
    /// point sits well inside the feasible region.
    Deep,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Settings {
    pub tol_feas: f64,
    pub out_threshold: f64,
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    StrictlyFeasible,
    ProvedInfeasible,
    Converged,
    Deep,
    IterationLimit,
    Stalled,
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub w: Vec<f64>,
    /// Achieved lower bound on the best smallest eigenvalue.
    pub t: f64,
    /// Upper bound on the best smallest eigenvalue.
    pub t_hi: f64,
    pub iterations: usize,
    pub stop: Stop,
}

struct Eval {
    phi: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

/// Barrier value only; `None` outside the domain.
fn barrier_value(p: &Problem, w: &[f64], t: f64, mu: f64) -> Option<f64> {
    let mut phi = -t / mu;
    for b in &p.blocks {
        let f = b.shifted_value(w, t);
        let l = cholesky(&f, b.size)?;
        phi -= chol_logdet(&l, b.size);
    }
    Some(phi)
}

fn evaluate(p: &Problem, w: &[f64], t: f64, mu: f64) -> Option<Eval> {
    let m = p.nvars + 1;
    let ti = p.nvars;
    let mut grad = vec![0.0; m];
    let mut hess = vec![0.0; m * m];
    let mut phi = -t / mu;
    grad[ti] = -1.0 / mu;
    for b in &p.blocks {
        let n = b.size;
        let f = b.shifted_value(w, t);
        let l = cholesky(&f, n)?;
        phi -= chol_logdet(&l, n);
        let g = chol_inverse(&l, n);
        let prods: Vec<(usize, Vec<f64>)> = b.terms.iter().map(|(j, a)| (*j, matmul_sq(&g, a, n))).collect();
        let trace_g: f64 = (0..n).map(|i| g[i * n + i]).sum();
        grad[ti] += trace_g;
        hess[ti * m + ti] += trace_prod(&g, &g, n);
        for (x, (j, pj)) in prods.iter().enumerate() {
            let tr: f64 = (0..n).map(|i| pj[i * n + i]).sum();
            grad[*j] -= tr;
            // tr(G·(−I)·G·A_j) = −tr(G·P_j)
            let cross = -trace_prod(&g, pj, n);
            hess[ti * m + *j] += cross;
            hess[*j * m + ti] += cross;
            for (k, pk) in &prods[x..] {
                let v = trace_prod(pj, pk, n);
                hess[*j * m + *k] += v;
                if k != j {
                    hess[*k * m + *j] += v;
                }
            }
        }
    }
    Some(Eval { phi, grad, hess })
}

/// Follows the central path from `start`.
pub(crate) fn maximize_min_eigenvalue(p: &Problem, start: &[f64], mode: Mode, s: &Settings) -> Outcome {
    let n = p.nvars;
    let total = p.total_size().max(1) as f64;
    let mut w = start.to_vec();
    let lam0 = p.min_eigenvalue(&w);
    if !lam0.is_finite() {
        return Outcome { w, t: f64::NEG_INFINITY, t_hi: f64::INFINITY, iterations: 0, stop: Stop::Stalled };
    }
    if mode == Mode::Decide && lam0 > 0.0 {
        return Outcome { w, t: lam0, t_hi: f64::INFINITY, iterations: 0, stop: Stop::StrictlyFeasible };
    }
    let mut t = lam0 - (1.0 + lam0.abs()).min(1.0).max(1e-3 * (1.0 + lam0.abs()));
    let mut mu = {
        // centre the initial point roughly: 1/μ ≈ tr(G)
        let mut tr = 0.0;
        for b in &p.blocks {
            let f = b.shifted_value(&w, t);
            if let Some(l) = cholesky(&f, b.size) {
                let g = chol_inverse(&l, b.size);
                tr += (0..b.size).map(|i| g[i * b.size + i]).sum::<f64>();
            }
        }
        if tr > 0.0 { 1.0 / tr } else { 1.0 }
    };
    let gap_target = 0.01 * s.tol_feas;
    let mut iterations = 0;
    let mut t_hi = f64::INFINITY;

    loop {
        // centering
        let mut decrement = f64::INFINITY;
        let mut stalled = false;
        for _ in 0..60 {
            if iterations >= s.max_iter {
                break;
            }
            iterations += 1;
            let Some(ev) = evaluate(p, &w, t, mu) else {
                stalled = true;
                break;
            };
            let neg: Vec<f64> = ev.grad.iter().map(|g| -g).collect();
            let Some(step) = solve_spd(&ev.hess, &neg, n + 1) else {
                stalled = true;
                break;
            };
            let slope: f64 = ev.grad.iter().zip(&step).map(|(g, d)| g * d).sum();
            decrement = (-slope).max(0.0).sqrt();
            if decrement < 1e-2 {
                break;
            }
            let mut alpha = if decrement > 0.25 { 1.0 / (1.0 + decrement) } else { 1.0 };
            let mut accepted = false;
            for _ in 0..60 {
                let wn: Vec<f64> = w.iter().zip(&step).map(|(x, d)| x + alpha * d).collect();
                let tn = t + alpha * step[n];
                if let Some(phi) = barrier_value(p, &wn, tn, mu) {
                    if phi <= ev.phi + 1e-4 * alpha * slope {
                        w = wn;
                        t = tn;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                stalled = true;
                break;
            }
            if mode == Mode::Decide && t > 0.0 {
                return Outcome { w, t, t_hi, iterations, stop: Stop::StrictlyFeasible };
            }
        }
        if decrement.is_finite() && decrement < 0.25 {
            t_hi = t_hi.min(t + mu * total * (1.0 + decrement));
        }
        if t_hi < -s.out_threshold {
            return Outcome { w, t, t_hi, iterations, stop: Stop::ProvedInfeasible };
        }
        if mode == Mode::Deep && t > 0.0 && t_hi - t <= 0.25 * t {
            return Outcome { w, t, t_hi, iterations, stop: Stop::Deep };
        }
        if stalled {
            return Outcome { w, t, t_hi, iterations, stop: Stop::Stalled };
        }
        if iterations >= s.max_iter {
            return Outcome { w, t, t_hi, iterations, stop: Stop::IterationLimit };
        }
        if mu * total <= gap_target {
            return Outcome { w, t, t_hi, iterations, stop: Stop::Converged };
        }
        mu *= 0.2;
    }
}
