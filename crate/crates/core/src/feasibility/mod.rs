//! Semidefinite feasibility and membership.
//!
//! `∃ y : L(y) ⪰ 0` is decided by maximizing the smallest eigenvalue `t` of
//! `L(y)` over the box `|yᵢ| ≤ λmax` with a log-det barrier method. A point
//! with `t ≥ −tol_feas` is a witness (`In`); a certified upper bound
//! `t* < −out_threshold` gives `Out`; anything in between is `Unknown`.
//!
//! Before the barrier runs, constant blocks are checked directly, identically
//! zero rows are dropped, and pairs of opposite `1×1` blocks (`ℓ ≥ 0`,
//! `−ℓ ≥ 0`) are eliminated as linear equalities. When the barrier stalls
//! near `t = 0`, a facial-reduction step restricts to the face spanned by
//! the near-kernel of the last iterate and retries.
//!
//! Bounding every auxiliary by `λmax` turns the open conditions produced by
//! the strict-positivity gadget into closed ones: `ℓ(x) > 0` is decided as
//! `ℓ(x) ≥ 1/λmax`.

pub(crate) mod barrier;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lmi::{Assignment, LinearMatrixPolynomial, SemidefRepresentation};
use crate::symlin::{self, SymmetricMatrix};
use barrier::{AffineMap, Block, Mode, Problem, Settings, Stop};

/// Tuning of the feasibility engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineConfig {
    /// Bound on every free variable, `|y| ≤ lambda_max`.
    pub lambda_max: f64,
    /// `In` requires a witness whose smallest eigenvalue is at least `-tol_feas`.
    pub tol_feas: f64,
    /// `Out` requires a proof that the best smallest eigenvalue is below `-out_threshold`.
    pub out_threshold: f64,
    /// Newton-step budget per attempt.
    pub max_iter: usize,
    /// Extra attempts from seeded random starts after a numerical stall.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            lambda_max: 1e6,
            tol_feas: 1e-7,
            out_threshold: 2e-7,
            max_iter: 5000,
            restarts: 5,
            seed: 0,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.lambda_max) {
            return Err(Error::InvalidInput("lambda_max must be positive".into()));
        }
        if !finite_pos(self.tol_feas) || !finite_pos(self.out_threshold) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.out_threshold <= self.tol_feas {
            return Err(Error::InvalidInput("out_threshold must exceed tol_feas".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        Ok(())
    }

    /// Smallest strictly positive `ℓ(x)` the strict-positivity gadget can certify.
    pub fn resolution(&self) -> f64 {
        1.0 / self.lambda_max
    }

    fn settings(&self) -> Settings {
        Settings { tol_feas: self.tol_feas, out_threshold: self.out_threshold, max_iter: self.max_iter }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerdictKind {
    In,
    Out,
    Unknown,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictKind::In => "In",
            VerdictKind::Out => "Out",
            VerdictKind::Unknown => "Unknown",
        })
    }
}

/// Answer of a feasibility or membership query.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Values of the free variables (for `In`).
    pub witness: Option<Assignment>,
    /// Smallest eigenvalue of the pencil at the witness (for `In`).
    pub margin: f64,
    /// Lower bound on the infeasibility, `-t*` (for `Out` and `Unknown`).
    pub residual: f64,
    pub iterations: usize,
}

impl Verdict {
    pub fn is_in(&self) -> bool {
        self.kind == VerdictKind::In
    }

    pub fn is_out(&self) -> bool {
        self.kind == VerdictKind::Out
    }

    fn inside(witness: Assignment, margin: f64, iterations: usize) -> Self {
        Verdict { kind: VerdictKind::In, witness: Some(witness), margin, residual: 0.0, iterations }
    }

    fn outside(residual: f64, iterations: usize) -> Self {
        Verdict { kind: VerdictKind::Out, witness: None, margin: f64::NAN, residual, iterations }
    }

    fn unknown(residual: f64, iterations: usize) -> Self {
        Verdict { kind: VerdictKind::Unknown, witness: None, margin: f64::NAN, residual, iterations }
    }
}

/// Splits the pencil into its connected diagonal blocks and appends the box
/// constraints `λmax ∓ yⱼ ≥ 0` as `1×1` blocks.
fn build_problem(l: &LinearMatrixPolynomial, lambda_max: f64) -> Problem {
    let k = l.dim();
    let n = l.vars().len();
    let mats: Vec<&SymmetricMatrix> = std::iter::once(l.constant_term()).chain(l.coeffs()).collect();
    let scale = mats.iter().flat_map(|m| m.as_slice()).map(|v| v.abs()).fold(0.0_f64, f64::max);
    let zero_tol = 1e-15 * scale;

    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if mats.iter().any(|m| m.get(i, j).abs() > zero_tol) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let sub = |m: &SymmetricMatrix, idx: &[usize]| -> Vec<f64> {
        let mut out = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                let v = m.get(i, j);
                out.push(if v.abs() > zero_tol { v } else { 0.0 });
            }
        }
        out
    };
    let mut blocks = Vec::new();
    for idx in &groups {
        let constant = sub(l.constant_term(), idx);
        let terms: Vec<(usize, Vec<f64>)> = l
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| (j, sub(c, idx)))
            .filter(|(_, m)| m.iter().any(|v| *v != 0.0))
            .collect();
        if idx.len() == 1 && constant[0] == 0.0 && terms.is_empty() {
            // identically zero row and column
            continue;
        }
        blocks.push(Block { size: idx.len(), constant, terms });
    }
    for j in 0..n {
        blocks.push(Block { size: 1, constant: vec![lambda_max], terms: vec![(j, vec![-1.0])] });
        blocks.push(Block { size: 1, constant: vec![lambda_max], terms: vec![(j, vec![1.0])] });
    }
    Problem { nvars: n, blocks }
}

/// Least-squares solution set of `Σⱼ rows[i].0[j]·wⱼ = rows[i].1` as an
/// affine map, together with the residual norm.
fn solve_affine_system(rows: &[(Vec<f64>, f64)], n: usize) -> (AffineMap, f64) {
    if n == 0 {
        let r = rows.iter().map(|(_, b)| b * b).sum::<f64>().sqrt();
        return (AffineMap { offset: Vec::new(), basis: Vec::new() }, r);
    }
    let mut gram = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for (a, b) in rows {
        for i in 0..n {
            rhs[i] += a[i] * b;
            for j in 0..n {
                gram[i * n + j] += a[i] * a[j];
            }
        }
    }
    let gram = SymmetricMatrix::new(n, gram).expect("square");
    let ev = symlin::eigh(&gram).expect("finite gram matrix");
    let top = ev.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let cut = 1e-12 * top.max(f64::MIN_POSITIVE);
    let mut offset = vec![0.0; n];
    let mut basis = Vec::new();
    for (k, lam) in ev.eigenvalues.iter().enumerate() {
        let v = ev.eigenvector(k);
        if *lam > cut {
            let c = symlin::dot(&v, &rhs) / lam;
            for (o, vi) in offset.iter_mut().zip(&v) {
                *o += c * vi;
            }
        } else {
            basis.push(v);
        }
    }
    let residual = rows
        .iter()
        .map(|(a, b)| {
            let r = symlin::dot(a, &offset) - b;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    (AffineMap { offset, basis }, residual)
}

enum Prepared {
    Ready { problem: Problem, map: AffineMap },
    Infeasible(f64),
}

/// Constant-block checks and elimination of opposite scalar pairs.
fn prepare(problem: Problem, cfg: &EngineConfig) -> Prepared {
    let n = problem.nvars;
    let mut blocks = Vec::with_capacity(problem.blocks.len());
    for b in problem.blocks {
        if b.terms.is_empty() {
            let lam = barrier::min_eig(&b.constant, b.size);
            if lam < -cfg.out_threshold {
                return Prepared::Infeasible(-lam);
            }
            if lam >= -0.5 * cfg.tol_feas {
                continue;
            }
        }
        blocks.push(b);
    }

    let dense_row = |b: &Block| -> (Vec<f64>, f64) {
        let mut a = vec![0.0; n];
        for (j, m) in &b.terms {
            a[*j] = m[0];
        }
        (a, b.constant[0])
    };
    let mut paired = vec![false; blocks.len()];
    let mut equations: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..blocks.len() {
        if blocks[i].size != 1 || paired[i] {
            continue;
        }
        let (ai, ci) = dense_row(&blocks[i]);
        let mag = ci.abs() + ai.iter().map(|v| v.abs()).sum::<f64>();
        if mag == 0.0 {
            continue;
        }
        for j in (i + 1)..blocks.len() {
            if blocks[j].size != 1 || paired[j] {
                continue;
            }
            let (aj, cj) = dense_row(&blocks[j]);
            let diff = (ci + cj).abs() + ai.iter().zip(&aj).map(|(x, y)| (x + y).abs()).sum::<f64>();
            if diff <= 1e-12 * mag {
                paired[i] = true;
                paired[j] = true;
                equations.push((ai.iter().map(|v| v / mag).collect(), -ci / mag));
                break;
            }
        }
    }
    if equations.is_empty() {
        return Prepared::Ready { problem: Problem { nvars: n, blocks }, map: AffineMap::identity(n) };
    }
    let (map, residual) = solve_affine_system(&equations, n);
    // max_w min_i −|aᵢ·w − bᵢ| ≤ −‖r‖₂/√m for the normalized rows
    let bound = residual / (equations.len() as f64).sqrt();
    if bound > cfg.out_threshold {
        return Prepared::Infeasible(bound);
    }
    if residual > 1e-11 {
        return Prepared::Ready { problem: Problem { nvars: n, blocks }, map: AffineMap::identity(n) };
    }
    let kept: Vec<Block> = blocks.into_iter().zip(&paired).filter(|(_, p)| !**p).map(|(b, _)| b).collect();
    let problem = Problem { nvars: n, blocks: kept }.restrict(&map);
    Prepared::Ready { problem, map }
}

/// One facial-reduction step at the point `v`: restricts to the affine set on
/// which the near-kernel of every block stays in the kernel, and compresses
/// each block to the complement of that kernel.
fn facial_reduction(problem: &Problem, v: &[f64], rel_tol: f64) -> Option<(Problem, AffineMap)> {
    let n = problem.nvars;
    let mut equations: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut complements: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut found = false;
    for b in &problem.blocks {
        let value = b.value(v);
        let m = SymmetricMatrix::new(b.size, value.clone()).ok()?;
        let ev = symlin::eigh(&m).ok()?;
        let scale = 1.0 + value.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut keep = Vec::new();
        for (k, lam) in ev.eigenvalues.iter().enumerate() {
            let q = ev.eigenvector(k);
            if *lam <= rel_tol * scale {
                found = true;
                // (C + Σ wⱼAⱼ)·q = 0, one equation per row
                for row in 0..b.size {
                    let mut a = vec![0.0; n];
                    for (j, mat) in &b.terms {
                        a[*j] = (0..b.size).map(|c| mat[row * b.size + c] * q[c]).sum();
                    }
                    let rhs = -(0..b.size).map(|c| b.constant[row * b.size + c] * q[c]).sum::<f64>();
                    equations.push((a, rhs));
                }
            } else {
                keep.push(q);
            }
        }
        complements.push(keep);
    }
    if !found {
        return None;
    }
    let (map, residual) = solve_affine_system(&equations, n);
    let size: f64 = equations.iter().map(|(a, b)| b.abs() + a.iter().map(|x| x.abs()).sum::<f64>()).sum();
    if residual > 1e-9 * (1.0 + size) {
        return None;
    }
    let restricted = problem.restrict(&map);
    let blocks = restricted
        .blocks
        .iter()
        .zip(&complements)
        .filter_map(|(b, q)| Problem::compress_block(b, q))
        .collect();
    Some((Problem { nvars: map.basis.len(), blocks }, map))
}

fn witness_from(l: &LinearMatrixPolynomial, w: &[f64]) -> Assignment {
    l.vars().iter().cloned().zip(w.iter().copied()).collect()
}

/// Smallest eigenvalue of the full pencil at `w`, the independent recheck
/// behind every `In`.
fn verified_margin(l: &LinearMatrixPolynomial, w: &[f64]) -> Option<f64> {
    if w.iter().any(|x| !x.is_finite()) {
        return None;
    }
    symlin::eigh(&l.evaluate_at(w)).ok().map(|e| e.eigenvalues[0])
}

fn seeded_start(cfg: &EngineConfig, attempt: usize, n: usize) -> Vec<f64> {
    if attempt == 0 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(attempt as u64));
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Decides `∃ y : L(y) ⪰ 0` over all variables of `L`, each bounded by `λmax`.
pub fn find_psd_point(l: &LinearMatrixPolynomial, cfg: &EngineConfig) -> Verdict {
    let n = l.vars().len();
    if n == 0 {
        let lam = verified_margin(l, &[]).unwrap_or(f64::NEG_INFINITY);
        return if lam >= -cfg.tol_feas {
            Verdict::inside(Assignment::new(), lam, 0)
        } else {
            Verdict::outside(-lam, 0)
        };
    }
    let (problem, map) = match prepare(build_problem(l, cfg.lambda_max), cfg) {
        Prepared::Infeasible(r) => return Verdict::outside(r, 0),
        Prepared::Ready { problem, map } => (problem, map),
    };
    let settings = cfg.settings();
    let accept = |w: Vec<f64>, iterations: usize| -> Option<Verdict> {
        let margin = verified_margin(l, &w)?;
        (margin >= -cfg.tol_feas).then(|| Verdict::inside(witness_from(l, &w), margin, iterations))
    };
    if problem.blocks.is_empty() {
        if let Some(v) = accept(map.apply(&vec![0.0; problem.nvars]), 0) {
            return v;
        }
    }

    let mut iterations = 0;
    let mut best_residual = 0.0_f64;
    for attempt in 0..=cfg.restarts {
        let start = map.preimage(&seeded_start(cfg, attempt, n));
        let out = barrier::maximize_min_eigenvalue(&problem, &start, Mode::Decide, &settings);
        iterations += out.iterations;
        best_residual = best_residual.max(-out.t_hi);
        match out.stop {
            Stop::StrictlyFeasible => {
                if let Some(v) = accept(map.apply(&out.w), iterations) {
                    return v;
                }
            }
            Stop::ProvedInfeasible => return Verdict::outside(-out.t_hi, iterations),
            _ => {}
        }
        if out.t >= -cfg.tol_feas {
            if let Some(v) = accept(map.apply(&out.w), iterations) {
                return v;
            }
        }
        if out.t > -1e3 * cfg.out_threshold {
            for rel in [1e-6, 1e-4] {
                if let Some(v) = reduce_and_retry(l, &problem, &map, &out.w, rel, cfg, &mut iterations) {
                    return v;
                }
            }
        }
        if out.t_hi < -cfg.out_threshold {
            return Verdict::outside(-out.t_hi, iterations);
        }
        if out.stop != Stop::Stalled {
            break;
        }
    }
    Verdict::unknown(best_residual.max(0.0), iterations)
}

fn reduce_and_retry(
    l: &LinearMatrixPolynomial,
    problem: &Problem,
    map: &AffineMap,
    v: &[f64],
    rel: f64,
    cfg: &EngineConfig,
    iterations: &mut usize,
) -> Option<Verdict> {
    let mut current = problem.clone();
    let mut current_map = map.clone();
    let mut point = v.to_vec();
    for _round in 0..3 {
        let (reduced, inner) = facial_reduction(&current, &point, rel)?;
        current_map = current_map.compose(&inner);
        let start = inner.preimage(&point);
        let out = if reduced.blocks.is_empty() {
            barrier::Outcome {
                w: start.clone(),
                t: 0.0,
                t_hi: 0.0,
                iterations: 0,
                stop: Stop::Converged,
            }
        } else {
            barrier::maximize_min_eigenvalue(&reduced, &start, Mode::Decide, &cfg.settings())
        };
        *iterations += out.iterations;
        let w = current_map.apply(&out.w);
        if let Some(margin) = verified_margin(l, &w) {
            if margin >= -cfg.tol_feas {
                return Some(Verdict::inside(witness_from(l, &w), margin, *iterations));
            }
        }
        if out.t < -1e3 * cfg.out_threshold {
            return None;
        }
        current = reduced;
        point = out.w;
    }
    None
}

/// Membership of `x` (over the visible variables) in the set denoted by `s`.
pub fn membership(s: &SemidefRepresentation, x: &Assignment, cfg: &EngineConfig) -> Result<Verdict> {
    if x.len() != s.visible().len() || s.visible().iter().any(|v| !x.contains_key(v)) {
        return Err(Error::VariableMismatch(format!(
            "point must assign exactly the visible variables {:?}",
            s.visible()
        )));
    }
    let fixed = s.pencil().substitute(x)?;
    if s.is_spectrahedron() {
        let lam = symlin::eigh(fixed.constant_term())?.eigenvalues[0];
        return Ok(if lam >= -cfg.tol_feas {
            Verdict::inside(Assignment::new(), lam, 0)
        } else {
            Verdict::outside(-lam, 0)
        });
    }
    Ok(find_psd_point(&fixed, cfg))
}

/// Positional variant of [`membership`].
pub fn membership_at(s: &SemidefRepresentation, x: &[f64], cfg: &EngineConfig) -> Result<Verdict> {
    membership(s, &s.point(x)?, cfg)
}

/// A point in the relative interior of the lifted spectrahedron of `s`,
/// over `visible ++ auxiliary`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorPoint {
    pub point: Assignment,
    /// Smallest eigenvalue of the (face-reduced) pencil at the point.
    pub margin: f64,
    /// Number of facial-reduction rounds that were needed.
    pub reductions: usize,
}

/// Finds a point in the relative interior of the lifted spectrahedron.
///
/// The smallest eigenvalue is pushed up with the barrier until the point is
/// well inside. If the best value is zero the set is lower dimensional, and
/// the search is repeated on the face cut out by the common kernel of the
/// final iterate.
pub fn interior_point(s: &SemidefRepresentation, cfg: &EngineConfig) -> Result<InteriorPoint> {
    let l = s.pencil();
    let n = l.vars().len();
    let as_point = |w: &[f64]| witness_from(l, w);
    if n == 0 {
        let lam = verified_margin(l, &[]).unwrap_or(f64::NEG_INFINITY);
        if lam >= -cfg.tol_feas {
            return Ok(InteriorPoint { point: Assignment::new(), margin: lam, reductions: 0 });
        }
        return Err(Error::EmptySet { margin: lam });
    }
    let (mut problem, mut map) = match prepare(build_problem(l, cfg.lambda_max), cfg) {
        Prepared::Infeasible(r) => return Err(Error::EmptySet { margin: -r }),
        Prepared::Ready { problem, map } => (problem, map),
    };
    let settings = cfg.settings();
    let mut point = map.preimage(&vec![0.0; n]);
    for reductions in 0..4 {
        if problem.blocks.is_empty() {
            let w = map.apply(&point);
            let margin = verified_margin(l, &w).unwrap_or(f64::NEG_INFINITY);
            return Ok(InteriorPoint { point: as_point(&w), margin, reductions });
        }
        let out = barrier::maximize_min_eigenvalue(&problem, &point, Mode::Deep, &settings);
        if out.t > cfg.tol_feas {
            return Ok(InteriorPoint { point: as_point(&map.apply(&out.w)), margin: out.t, reductions });
        }
        if out.t_hi < -cfg.out_threshold {
            return Err(Error::EmptySet { margin: out.t_hi });
        }
        let Some((reduced, inner)) = facial_reduction(&problem, &out.w, 1e-5) else {
            return Err(Error::EmptySet { margin: out.t });
        };
        point = inner.preimage(&out.w);
        map = map.compose(&inner);
        problem = reduced;
    }
    Err(Error::EmptySet { margin: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmi::{assignment, scalar_block, direct_sum, AffineFunctional};

    fn pencil(rows_const: [[f64; 2]; 2], var: &str, rows_var: [[f64; 2]; 2]) -> LinearMatrixPolynomial {
        LinearMatrixPolynomial::new(
            SymmetricMatrix::from_rows(&rows_const).unwrap(),
            vec![(var.to_string(), SymmetricMatrix::from_rows(&rows_var).unwrap())],
        )
        .unwrap()
    }

    fn disk() -> LinearMatrixPolynomial {
        LinearMatrixPolynomial::new(
            SymmetricMatrix::identity(2),
            vec![
                ("x1".into(), SymmetricMatrix::diag(&[-1.0, 1.0])),
                ("x2".into(), SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn engine_examples() {
        let cfg = EngineConfig::default();
        let feasible = pencil([[0.0, 1.0], [1.0, 1.0]], "lam", [[1.0, 0.0], [0.0, 0.0]]);
        let v = find_psd_point(&feasible, &cfg);
        assert!(v.is_in(), "{v:?}");
        assert!(v.margin >= -cfg.tol_feas);

        let infeasible = pencil([[0.0, 1.0], [1.0, 0.0]], "lam", [[1.0, 0.0], [0.0, 0.0]]);
        let v = find_psd_point(&infeasible, &cfg);
        assert!(v.is_out(), "{v:?}");
        assert!(v.residual >= cfg.out_threshold);

        let v = find_psd_point(&LinearMatrixPolynomial::constant(SymmetricMatrix::identity(3)), &cfg);
        assert!(v.is_in());
        assert_eq!(v.iterations, 0);
    }

    #[test]
    fn config_validation() {
        assert!(EngineConfig::default().validate().is_ok());
        let bad = EngineConfig { out_threshold: 1e-8, ..EngineConfig::default() };
        assert!(bad.validate().is_err());
        let bad = EngineConfig { lambda_max: 0.0, ..EngineConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn disk_membership() {
        let cfg = EngineConfig::default();
        let d = SemidefRepresentation::spectrahedron(disk());
        let v = membership(&d, &assignment(&[("x1", 0.0), ("x2", 0.0)]), &cfg).unwrap();
        assert!(v.is_in());
        assert!((v.margin - 1.0).abs() < 1e-12);
        let v = membership(&d, &assignment(&[("x1", 2.0), ("x2", 0.0)]), &cfg).unwrap();
        assert!(v.is_out());
        assert!(membership(&d, &assignment(&[("x1", 0.0)]), &cfg).is_err());
    }

    #[test]
    fn projected_disk_membership() {
        let cfg = EngineConfig::default();
        let shadow = SemidefRepresentation::new(disk(), vec!["x1".into()], vec!["x2".into()]).unwrap();
        for (x, inside) in [(0.0, true), (0.99, true), (1.0, true), (-1.0, true), (1.01, false), (-3.0, false)] {
            let v = membership(&shadow, &assignment(&[("x1", x)]), &cfg).unwrap();
            assert_eq!(v.is_in(), inside, "x1 = {x}: {v:?}");
            assert_eq!(v.is_out(), !inside, "x1 = {x}: {v:?}");
        }
    }

    #[test]
    fn interior_point_of_disk_is_central() {
        let cfg = EngineConfig::default();
        let ip = interior_point(&SemidefRepresentation::spectrahedron(disk()), &cfg).unwrap();
        let r = ip.point["x1"].hypot(ip.point["x2"]);
        // the best smallest eigenvalue is 1 − ‖x‖, maximal (= 1) at the origin
        assert!(r < 0.25, "{ip:?}");
        assert!(ip.margin > 0.75);
    }

    #[test]
    fn interior_point_of_interval() {
        let cfg = EngineConfig::default();
        let interval = direct_sum(&[
            scalar_block(&AffineFunctional::parse("x").unwrap()),
            scalar_block(&AffineFunctional::parse("1 - x").unwrap()),
        ])
        .unwrap();
        let ip = interior_point(&SemidefRepresentation::spectrahedron(interval), &cfg).unwrap();
        // min(x, 1 − x) peaks at x = 0.5 with value 0.5
        assert!((ip.point["x"] - 0.5).abs() < 0.2, "{ip:?}");
        assert!(ip.margin > 0.3 && ip.margin <= 0.5 + 1e-9);
    }

    #[test]
    fn interior_point_of_segment_uses_reduction() {
        let cfg = EngineConfig::default();
        let seg = direct_sum(&[
            scalar_block(&AffineFunctional::parse("x1").unwrap()),
            scalar_block(&AffineFunctional::parse("1 - x1").unwrap()),
            scalar_block(&AffineFunctional::parse("x2").unwrap()),
            scalar_block(&AffineFunctional::parse("-x2").unwrap()),
        ])
        .unwrap();
        let ip = interior_point(&SemidefRepresentation::spectrahedron(seg), &cfg).unwrap();
        assert!(ip.point["x1"] > 0.05 && ip.point["x1"] < 0.95, "{ip:?}");
        assert!(ip.point["x2"].abs() < 1e-12);
    }

    #[test]
    fn interior_point_of_empty_set_fails() {
        let cfg = EngineConfig::default();
        let empty = direct_sum(&[
            scalar_block(&AffineFunctional::parse("x - 1").unwrap()),
            scalar_block(&AffineFunctional::parse("-x").unwrap()),
        ])
        .unwrap();
        let err = interior_point(&SemidefRepresentation::spectrahedron(empty), &cfg).unwrap_err();
        assert!(matches!(err, Error::EmptySet { .. }));
    }

    #[test]
    fn seeded_runs_are_deterministic() {
        let cfg = EngineConfig { seed: 7, ..EngineConfig::default() };
        let p = pencil([[0.0, 1.0], [1.0, 0.25]], "lam", [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(find_psd_point(&p, &cfg), find_psd_point(&p, &cfg));
    }
}
