//! Brute-force ground truth taken straight from the definitions.
//!
//! Nothing here builds a pencil or calls the barrier: faces are read off
//! kernels, relative interiors are tested by pushing a point away from a
//! known interior point, and sets are sampled by rejection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lmi::{Assignment, LinearMatrixPolynomial};
use crate::symlin::{self, Matrix, Subspace, SymmetricMatrix};

/// Push distances tried by the `ε`-tests.
pub const DEFAULT_EPS_GRID: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Operator-norm bound on `(I − P_z)·P_x` for `ker A(x) ⊆ ker A(z)`.
pub const CONTAINMENT_TOL: f64 = 1e-6;

/// `A ⪰ 0` and `ker A ⊆ ker B`, tested as `B = B·A†·A`.
pub fn albert_criterion(a: &SymmetricMatrix, b: &Matrix) -> Result<bool> {
    if b.cols() != a.dim() {
        return Err(Error::InvalidInput(format!("B has {} columns, A is {}x{1}", b.cols(), a.dim())));
    }
    let ev = symlin::eigh(a)?;
    let scale = symlin::scale_of(a);
    if ev.eigenvalues.first().is_some_and(|l| *l < -1e-9 * (1.0 + scale)) {
        return Ok(false);
    }
    let a_pinv = symlin::pseudoinverse(a, symlin::default_tol(a))?;
    let proj = a_pinv.to_matrix().matmul(&a.to_matrix());
    let defect = b.sub(&b.matmul(&proj)).frobenius_norm();
    Ok(defect <= 1e-7 * (1.0 + b.frobenius_norm()))
}

fn pushed(x: &[f64], from: &[f64], eps: f64) -> Vec<f64> {
    x.iter().zip(from).map(|(xi, fi)| xi + eps * (xi - fi)).collect()
}

/// `x ∈ relint(S)`, given a point `z` already known to be in `relint(S)`:
/// `x ∈ S` and `x + ε(x − z) ∈ S` for some `ε` of the grid.
pub fn relint_member(member: impl Fn(&[f64]) -> bool, z: &[f64], x: &[f64], eps_grid: &[f64]) -> bool {
    member(x) && eps_grid.iter().any(|&e| member(&pushed(x, z, e)))
}

/// `y ∈ F_x`: some push of `x` away from `y` stays in `S`.
pub fn face_eps_characterization(
    member: impl Fn(&[f64]) -> bool,
    x: &[f64],
    y: &[f64],
    eps_grid: &[f64],
) -> bool {
    eps_grid.iter().any(|&e| member(&pushed(x, y, e)))
}

/// The subspace `ker A(x)`; the face of the spectrahedron through `x` is
/// `{ y ∈ S | ker A(x) ⊆ ker A(y) }`.
pub fn face_of_point(l: &LinearMatrixPolynomial, x: &Assignment, tol: f64) -> Result<Subspace> {
    let ax = l.evaluate(x)?;
    let lam = ax.min_eigenvalue()?;
    if lam < -tol {
        return Err(Error::InvalidInput(format!("point is outside the spectrahedron (min eigenvalue {lam:.3e})")));
    }
    symlin::kernel_basis(&ax, tol.max(symlin::default_tol(&ax)))
}

/// `x ∈ (T ↬ S)` for a spectrahedron `S = {A ⪰ 0}`, with `T` given by a
/// finite sample: `A(x) ⪰ 0` and `ker A(x) ⊆ ker A(z)` for some sampled `z`.
pub fn looparrow_member(
    samples: &[Assignment],
    l: &LinearMatrixPolynomial,
    x: &Assignment,
    tol: f64,
) -> Result<bool> {
    let kx = match face_of_point(l, x, tol) {
        Ok(k) => k,
        Err(Error::InvalidInput(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    if kx.dim() == 0 {
        return Ok(!samples.is_empty());
    }
    let px = kx.projector().to_matrix();
    for z in samples {
        let az = l.evaluate(z)?;
        let kz = symlin::kernel_basis(&az, tol.max(symlin::default_tol(&az)))?;
        let residual = Matrix::identity(px.rows()).sub(&kz.projector().to_matrix()).matmul(&px);
        if residual.spectral_norm() <= CONTAINMENT_TOL {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Up to `count` points of `{ x ∈ box | member(x) }`, drawn uniformly from
/// the box. Degenerate box sides (`lo == hi`) are allowed. Returns
/// `fallback` alone when no draw is accepted.
pub fn sample_set(
    member: impl Fn(&[f64]) -> bool,
    bounds: &[(f64, f64)],
    count: usize,
    seed: u64,
    fallback: Option<Vec<f64>>,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count.saturating_mul(20) {
        if out.len() == count {
            break;
        }
        let p: Vec<f64> =
            bounds.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo }).collect();
        if member(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        out.extend(fallback);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmi::assignment;
    use proptest::prelude::*;

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

    fn in_disk(p: &[f64]) -> bool {
        p[0].hypot(p[1]) <= 1.0 + 1e-12
    }

    fn in_square(p: &[f64]) -> bool {
        p.iter().all(|v| v.abs() <= 1.0 + 1e-12)
    }

    fn pt(x: f64, y: f64) -> Assignment {
        assignment(&[("x1", x), ("x2", y)])
    }

    #[test]
    fn albert_examples() {
        let b = Matrix::from_rows(&[[3.0, -1.0]]).unwrap();
        assert!(albert_criterion(&SymmetricMatrix::identity(2), &b).unwrap());
        let a = SymmetricMatrix::diag(&[1.0, 0.0]);
        assert!(!albert_criterion(&a, &Matrix::from_rows(&[[0.0, 1.0]]).unwrap()).unwrap());
        assert!(albert_criterion(&a, &Matrix::from_rows(&[[5.0, 0.0]]).unwrap()).unwrap());
        assert!(albert_criterion(&SymmetricMatrix::zeros(2), &Matrix::zeros(1, 2)).unwrap());
        assert!(!albert_criterion(&SymmetricMatrix::diag(&[-1.0, 1.0]), &Matrix::zeros(1, 2)).unwrap());
        assert!(albert_criterion(&a, &Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn relint_examples() {
        let g = DEFAULT_EPS_GRID;
        assert!(relint_member(in_disk, &[0.0, 0.0], &[0.5, 0.0], &g));
        assert!(!relint_member(in_disk, &[0.0, 0.0], &[1.0, 0.0], &g));
        assert!(!relint_member(in_disk, &[0.0, 0.0], &[1.5, 0.0], &g));
        let segment = |p: &[f64]| p[1] == 0.0 && (0.0..=1.0).contains(&p[0]);
        assert!(relint_member(segment, &[0.5, 0.0], &[0.3, 0.0], &g));
        assert!(!relint_member(segment, &[0.5, 0.0], &[0.0, 0.0], &g));
    }

    #[test]
    fn face_of_point_examples() {
        let l = disk();
        assert_eq!(face_of_point(&l, &pt(0.0, 0.0), 1e-9).unwrap().dim(), 0);
        let k = face_of_point(&l, &pt(1.0, 0.0), 1e-9).unwrap();
        assert!(k.is_contained_in(&Subspace::span(2, &[vec![1.0, 0.0]]).unwrap(), 1e-12));
        assert_eq!(k.dim(), 1);
        let k = face_of_point(&l, &pt(0.0, 1.0), 1e-9).unwrap();
        let expected = Subspace::span(2, &[vec![1.0, -1.0]]).unwrap();
        assert!(k.is_contained_in(&expected, 1e-12) && expected.is_contained_in(&k, 1e-12));
        assert!(matches!(face_of_point(&l, &pt(2.0, 0.0), 1e-9), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn looparrow_member_examples() {
        let l = disk();
        let bottom = [pt(0.0, -1.0)];
        assert!(looparrow_member(&bottom, &l, &pt(0.3, 0.2), 1e-9).unwrap());
        assert!(looparrow_member(&bottom, &l, &pt(0.0, -1.0), 1e-9).unwrap());
        assert!(!looparrow_member(&bottom, &l, &pt(1.0, 0.0), 1e-9).unwrap());
        assert!(!looparrow_member(&bottom, &l, &pt(1.2, 0.0), 1e-9).unwrap());
        assert!(!looparrow_member(&[], &l, &pt(0.0, 0.0), 1e-9).unwrap());
    }

    #[test]
    fn face_eps_examples() {
        let g = DEFAULT_EPS_GRID;
        assert!(face_eps_characterization(in_disk, &[0.0, 0.0], &[0.7, -0.7], &g));
        assert!(!face_eps_characterization(in_disk, &[1.0, 0.0], &[0.0, 0.0], &g));
        assert!(face_eps_characterization(in_square, &[1.0, 0.0], &[1.0, 1.0], &g));
        assert!(!face_eps_characterization(in_square, &[1.0, 0.0], &[0.0, 1.0], &g));
    }

    #[test]
    fn sampling_is_seeded_and_respects_membership() {
        let a = sample_set(in_disk, &[(-1.0, 1.0), (-1.0, 1.0)], 50, 3, None);
        let b = sample_set(in_disk, &[(-1.0, 1.0), (-1.0, 1.0)], 50, 3, None);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|p| in_disk(p)));
        let flat = sample_set(|p| p[1] == 0.0, &[(0.0, 1.0), (0.0, 0.0)], 10, 0, None);
        assert_eq!(flat.len(), 10);
        let none = sample_set(|_| false, &[(0.0, 1.0)], 10, 0, Some(vec![0.5]));
        assert_eq!(none, vec![vec![0.5]]);
    }

    proptest! {
        // ker A(x) ⊆ ker A(y) agrees with the ε-push test on boundary points of the disk
        #[test]
        fn disk_faces_match_push_test(theta in 0.0..std::f64::consts::TAU, r in 0.0..1.0f64, phi in 0.3..6.0f64) {
            let l = disk();
            let x = [theta.cos(), theta.sin()];
            let ys = [[r * (theta + phi).cos(), r * (theta + phi).sin()], x];
            for y in ys {
                let kx = face_of_point(&l, &pt(x[0], x[1]), 1e-9).unwrap();
                let ky = face_of_point(&l, &pt(y[0], y[1]), 1e-9).unwrap();
                let by_kernel = kx.is_contained_in(&ky, 1e-6);
                let by_push = face_eps_characterization(in_disk, &x, &y, &DEFAULT_EPS_GRID);
                prop_assert_eq!(by_kernel, by_push);
            }
        }
    }
}
