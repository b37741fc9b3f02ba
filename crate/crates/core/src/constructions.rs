//! Constructors for semidefinite representations.
//!
//! Every function returns a new [`SemidefRepresentation`] whose pencil is
//! assembled from the input pencils and a few fixed gadget blocks. Fresh
//! auxiliaries are drawn from a caller-owned [`FreshNames`] and skip any name
//! already used by the inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::feasibility::{self, EngineConfig};
use crate::lmi::{
    direct_sum, scalar_block, strict_pos_block, AffineFunctional, Assignment, FreshNames,
    LinearMatrixPolynomial, SemidefRepresentation,
};
use crate::oracle;
use crate::symlin::{self, Subspace, SymmetricMatrix};

/// Size bookkeeping for a constructed representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionReport {
    pub output_dim: usize,
    pub visible_count: usize,
    pub auxiliary_count: usize,
    pub provenance: String,
}

impl ConstructionReport {
    pub fn new(s: &SemidefRepresentation, provenance: impl Into<String>) -> Self {
        ConstructionReport {
            output_dim: s.pencil().dim(),
            visible_count: s.visible().len(),
            auxiliary_count: s.auxiliary().len(),
            provenance: provenance.into(),
        }
    }
}

impl fmt::Display for ConstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: dim {}, visible {}, auxiliary {}",
            self.provenance, self.output_dim, self.visible_count, self.auxiliary_count
        )
    }
}

fn names_in(ss: &[&SemidefRepresentation]) -> BTreeSet<String> {
    ss.iter().flat_map(|s| s.visible().iter().chain(s.auxiliary())).cloned().collect()
}

fn fresh(names: &mut FreshNames, taken: &BTreeSet<String>) -> String {
    loop {
        let n = names.next_name();
        if !taken.contains(&n) {
            return n;
        }
    }
}

/// Renames the auxiliaries of `s` to fresh names avoiding `taken`.
fn freshen_avoiding(
    s: &SemidefRepresentation,
    names: &mut FreshNames,
    taken: &mut BTreeSet<String>,
) -> Result<SemidefRepresentation> {
    let mapping: BTreeMap<String, String> = s
        .auxiliary()
        .iter()
        .map(|a| {
            let n = fresh(names, taken);
            taken.insert(n.clone());
            (a.clone(), n)
        })
        .collect();
    let pencil = s.pencil().rename_vars(&mapping)?;
    let aux = s.auxiliary().iter().map(|a| mapping[a].clone()).collect();
    SemidefRepresentation::new(pencil, s.visible().to_vec(), aux)
}

fn same_visible(a: &SemidefRepresentation, b: &SemidefRepresentation) -> Result<()> {
    let sa: BTreeSet<&String> = a.visible().iter().collect();
    let sb: BTreeSet<&String> = b.visible().iter().collect();
    if sa != sb || a.visible().len() != b.visible().len() {
        return Err(Error::VariableMismatch(format!(
            "visible variables differ: {:?} vs {:?}",
            a.visible(),
            b.visible()
        )));
    }
    Ok(())
}

fn check_functional(s: &SemidefRepresentation, l: &AffineFunctional) -> Result<()> {
    let known = names_in(&[s]);
    match l.vars().iter().find(|v| !known.contains(*v)) {
        Some(v) => Err(Error::VariableMismatch(format!("`{v}` is not a variable of the set"))),
        None => Ok(()),
    }
}

/// `S ∩ {ℓ = 0}`, the face exposed by `ℓ` when `ℓ ≥ 0` on `S`.
///
/// `ℓ` may also mention auxiliaries, which exposes a face of the lifted
/// spectrahedron.
pub fn exposed_face(s: &SemidefRepresentation, l: &AffineFunctional) -> Result<SemidefRepresentation> {
    check_functional(s, l)?;
    let pencil = direct_sum(&[s.pencil().clone(), scalar_block(l), scalar_block(&l.negated())])?;
    SemidefRepresentation::new(pencil, s.visible().to_vec(), s.auxiliary().to_vec())
}

/// `S ∩ {ℓ > 0}`, i.e. `S` minus the face exposed by `ℓ`.
pub fn remove_exposed_face(
    s: &SemidefRepresentation,
    l: &AffineFunctional,
    names: &mut FreshNames,
) -> Result<SemidefRepresentation> {
    check_functional(s, l)?;
    let lambda = fresh(names, &names_in(&[s]));
    let pencil = direct_sum(&[s.pencil().clone(), strict_pos_block(l, &lambda)?])?;
    let mut aux = s.auxiliary().to_vec();
    aux.push(lambda);
    SemidefRepresentation::new(pencil, s.visible().to_vec(), aux)
}

/// Sets entries that are negligible against `scale` to exactly zero.
fn clean(m: &SymmetricMatrix, scale: f64) -> SymmetricMatrix {
    let k = m.dim();
    let data = m.as_slice().iter().map(|v| if v.abs() <= 1e-12 * scale { 0.0 } else { *v }).collect();
    SymmetricMatrix::new(k, data).expect("square")
}

/// `relint(S)`.
///
/// With `A(w)` the lifted pencil and `z` a point in the relative interior of
/// the lifted spectrahedron, the output pencil is
///
/// `δ·A₀ + Σ wᵢAᵢ + (1 − δ)·B  ⊕  [[λ, 1], [1, δ]]  ⊕  [[λ, 1], [1, 1 − δ]]`
///
/// with `B = −Σ zᵢAᵢ`. Both strictness gadgets share one `λ`, so a `k×k`
/// pencil with `m` auxiliaries becomes a `(k+4)×(k+4)` pencil with `m+2`.
///
/// `z` is taken over `visible ++ auxiliary`; when absent it is computed with
/// [`feasibility::interior_point`]. A supplied `z` is checked against that
/// point with the `ε`-push test.
pub fn relative_interior(
    s: &SemidefRepresentation,
    z: Option<&Assignment>,
    cfg: &EngineConfig,
    names: &mut FreshNames,
) -> Result<SemidefRepresentation> {
    let lifted = s.lifted();
    let l = s.pencil();
    let computed = feasibility::interior_point(&lifted, cfg)?.point;
    let z = match z {
        None => computed,
        Some(z) => {
            check_relint_witness(l, z, &computed, cfg)?;
            z.clone()
        }
    };

    let mut b = SymmetricMatrix::zeros(l.dim());
    for (name, c) in l.terms() {
        b.axpy(-z[name], c);
    }
    let scale = 1.0 + symlin::scale_of(&b) + symlin::scale_of(l.constant_term());
    let b = clean(&b, scale);
    let delta_coeff = clean(&l.constant_term().sub(&b), scale);

    let taken = names_in(&[s]);
    let delta = fresh(names, &taken);
    let lambda = fresh(names, &taken);
    let mut terms: Vec<(String, SymmetricMatrix)> = l.terms().map(|(n, c)| (n.to_string(), c.clone())).collect();
    terms.push((delta.clone(), delta_coeff));
    let main = LinearMatrixPolynomial::new(b, terms)?;
    let d = AffineFunctional::new(0.0, [(delta.clone(), 1.0)])?;
    let pencil = direct_sum(&[
        main,
        strict_pos_block(&d, &lambda)?,
        strict_pos_block(&d.one_minus(), &lambda)?,
    ])?;
    let mut aux = s.auxiliary().to_vec();
    aux.push(delta);
    aux.push(lambda);
    SemidefRepresentation::new(pencil, s.visible().to_vec(), aux)
}

fn check_relint_witness(
    l: &LinearMatrixPolynomial,
    z: &Assignment,
    anchor: &Assignment,
    cfg: &EngineConfig,
) -> Result<()> {
    if z.len() != l.vars().len() || l.vars().iter().any(|v| !z.contains_key(v)) {
        return Err(Error::VariableMismatch(
            "relint witness must assign every visible and auxiliary variable".into(),
        ));
    }
    let member = |p: &[f64]| {
        l.evaluate_at(p).min_eigenvalue().map(|m| m >= -cfg.tol_feas).unwrap_or(false)
    };
    let zv: Vec<f64> = l.vars().iter().map(|v| z[v]).collect();
    let av: Vec<f64> = l.vars().iter().map(|v| anchor[v]).collect();
    if oracle::relint_member(member, &av, &zv, &oracle::DEFAULT_EPS_GRID) {
        Ok(())
    } else {
        Err(Error::InvalidWitness("point is not in the relative interior of the lifted set".into()))
    }
}

/// `{ x ∈ S | ker A(x) ⊆ W }` for a spectrahedron `S = {A ⪰ 0}`, via the block
/// `[[A(x), Bᵀ], [B, λ·I]]` where the rows of `B` are an orthonormal basis of
/// `W^⊥`.
pub fn kernel_containment(
    s: &SemidefRepresentation,
    w: &Subspace,
    names: &mut FreshNames,
) -> Result<SemidefRepresentation> {
    if !s.is_spectrahedron() {
        return Err(Error::UnsupportedInput(
            "kernel containment needs a spectrahedron; use looparrow for projected sets".into(),
        ));
    }
    let a = s.pencil();
    let k = a.dim();
    if w.ambient_dim() != k {
        return Err(Error::InvalidInput(format!(
            "subspace lives in dimension {}, pencil has dimension {k}",
            w.ambient_dim()
        )));
    }
    let rows = w.orthogonal_complement();
    let r = rows.dim();
    if r == 0 {
        return Ok(s.clone());
    }
    let n = k + r;
    let embed = |m: &SymmetricMatrix| {
        let mut out = SymmetricMatrix::zeros(n);
        for i in 0..k {
            for j in 0..k {
                out.set(i, j, m.get(i, j));
            }
        }
        out
    };
    let mut constant = embed(a.constant_term());
    for (i, row) in rows.basis().iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            constant.set(k + i, j, *v);
            constant.set(j, k + i, *v);
        }
    }
    let lambda = fresh(names, &names_in(&[s]));
    let mut terms: Vec<(String, SymmetricMatrix)> = a.terms().map(|(v, c)| (v.to_string(), embed(c))).collect();
    let mut lam = SymmetricMatrix::zeros(n);
    for i in k..n {
        lam.set(i, i, 1.0);
    }
    terms.push((lambda.clone(), lam));
    let pencil = LinearMatrixPolynomial::new(constant, terms)?;
    SemidefRepresentation::new(pencil, s.visible().to_vec(), vec![lambda])
}

/// `(T ↬ S)`: the union of the relative interiors of the faces of `S` that
/// meet `T`. Requires `T ⊆ S`, which is not checked.
pub fn looparrow(
    t: &SemidefRepresentation,
    s: &SemidefRepresentation,
    names: &mut FreshNames,
) -> Result<SemidefRepresentation> {
    same_visible(t, s)?;
    let mut taken = names_in(&[t, s]);
    let t = freshen_avoiding(t, names, &mut taken)?;
    if s.is_spectrahedron() {
        return looparrow_spectrahedron(&t, s, names, &mut taken);
    }
    // lift S, pull T back to the lift, and project the result
    let s_lift = s.lifted();
    let t_pencil = direct_sum(&[s.pencil().clone(), t.pencil().clone()])?;
    let t_lift = SemidefRepresentation::new(t_pencil, s_lift.visible().to_vec(), t.auxiliary().to_vec())?;
    let lifted = looparrow_spectrahedron(&t_lift, &s_lift, names, &mut taken)?;
    project(&lifted, s.visible())
}

fn looparrow_spectrahedron(
    t: &SemidefRepresentation,
    s: &SemidefRepresentation,
    names: &mut FreshNames,
    taken: &mut BTreeSet<String>,
) -> Result<SemidefRepresentation> {
    let a = s.pencil();
    let k = a.dim();
    let mut to_z = BTreeMap::new();
    for v in s.visible() {
        let z = fresh(names, taken);
        taken.insert(z.clone());
        to_z.insert(v.clone(), z);
    }
    let lambda = fresh(names, taken);
    taken.insert(lambda.clone());

    let az = a.rename_vars(&to_z)?;
    let lam_i = LinearMatrixPolynomial::new(SymmetricMatrix::zeros(k), vec![(lambda.clone(), SymmetricMatrix::identity(k))])?;
    let albert = LinearMatrixPolynomial::two_by_two(a, &az, &lam_i)?;
    let bt = t.pencil().rename_vars(&to_z)?;
    let pencil = direct_sum(&[albert, bt])?;

    let mut aux: Vec<String> = s.visible().iter().map(|v| to_z[v].clone()).collect();
    aux.extend(t.auxiliary().iter().cloned());
    aux.push(lambda);
    SemidefRepresentation::new(pencil, s.visible().to_vec(), aux)
}

/// `S₁ ∩ … ∩ Sₘ`, with the auxiliaries of each input renamed apart.
pub fn intersect(ss: &[SemidefRepresentation], names: &mut FreshNames) -> Result<SemidefRepresentation> {
    let first = ss.first().ok_or_else(|| Error::InvalidInput("intersection of no sets".into()))?;
    if ss.len() == 1 {
        return Ok(first.clone());
    }
    for s in &ss[1..] {
        same_visible(first, s)?;
    }
    let mut taken = names_in(&ss.iter().collect::<Vec<_>>());
    let mut pencils = Vec::with_capacity(ss.len());
    let mut aux = Vec::new();
    for s in ss {
        let f = freshen_avoiding(s, names, &mut taken)?;
        aux.extend(f.auxiliary().iter().cloned());
        pencils.push(f.pencil().clone());
    }
    SemidefRepresentation::new(direct_sum(&pencils)?, first.visible().to_vec(), aux)
}

/// Projection onto the variables in `keep`; the others become auxiliaries.
pub fn project(s: &SemidefRepresentation, keep: &[String]) -> Result<SemidefRepresentation> {
    if let Some(v) = keep.iter().find(|v| !s.visible().contains(v)) {
        return Err(Error::VariableMismatch(format!("`{v}` is not a visible variable")));
    }
    let mut aux: Vec<String> = s.visible().iter().filter(|v| !keep.contains(v)).cloned().collect();
    aux.extend(s.auxiliary().iter().cloned());
    SemidefRepresentation::new(s.pencil().clone(), keep.to_vec(), aux)
}

/// Closed convex hull of `S₁ ∪ S₂` for nonempty compact inputs.
///
/// With `x = u + v`, the output requires `t·S₁ ∋ u` and `(1 − t)·S₂ ∋ v`
/// through the perspective pencils, and `0 ≤ t ≤ 1`. `v` is eliminated as
/// `x − u`, so the auxiliaries are `u`, `t` and the renamed auxiliaries of
/// both inputs.
pub fn conv_union(
    s1: &SemidefRepresentation,
    s2: &SemidefRepresentation,
    names: &mut FreshNames,
) -> Result<SemidefRepresentation> {
    same_visible(s1, s2)?;
    let mut taken = names_in(&[s1, s2]);
    let s1 = freshen_avoiding(s1, names, &mut taken)?;
    let s2 = freshen_avoiding(s2, names, &mut taken)?;
    let mut to_u = BTreeMap::new();
    for v in s1.visible() {
        let u = fresh(names, &taken);
        taken.insert(u.clone());
        to_u.insert(v.clone(), u);
    }
    let t = fresh(names, &taken);

    let first = s1.pencil().rename_vars(&to_u)?.homogenize(&t)?;

    // (1 − t)·A₀ + Σ (xᵢ − uᵢ)·Aᵢ + Σ yⱼ·Bⱼ
    let a = s2.pencil();
    let mut terms: Vec<(String, SymmetricMatrix)> = Vec::new();
    for (name, c) in a.terms() {
        terms.push((name.to_string(), c.clone()));
        if let Some(u) = to_u.get(name) {
            terms.push((u.clone(), c.scaled(-1.0)));
        }
    }
    terms.push((t.clone(), a.constant_term().scaled(-1.0)));
    let second = LinearMatrixPolynomial::new(a.constant_term().clone(), terms)?;

    let tf = AffineFunctional::new(0.0, [(t.clone(), 1.0)])?;
    let pencil = direct_sum(&[first, second, scalar_block(&tf), scalar_block(&tf.one_minus())])?;

    let mut aux: Vec<String> = s1.visible().iter().map(|v| to_u[v].clone()).collect();
    aux.push(t);
    aux.extend(s1.auxiliary().iter().cloned());
    aux.extend(s2.auxiliary().iter().cloned());
    SemidefRepresentation::new(pencil, s1.visible().to_vec(), aux)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{membership_at, VerdictKind};

    fn xs() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    fn disk() -> SemidefRepresentation {
        let l = LinearMatrixPolynomial::new(
            SymmetricMatrix::identity(2),
            vec![
                ("x1".into(), SymmetricMatrix::diag(&[-1.0, 1.0])),
                ("x2".into(), SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()),
            ],
        )
        .unwrap();
        SemidefRepresentation::spectrahedron(l)
    }

    fn poly(exprs: &[&str], visible: &[String]) -> SemidefRepresentation {
        let blocks: Vec<_> = exprs.iter().map(|e| scalar_block(&AffineFunctional::parse(e).unwrap())).collect();
        SemidefRepresentation::spectrahedron_over(direct_sum(&blocks).unwrap(), visible).unwrap()
    }

    fn f(text: &str) -> AffineFunctional {
        AffineFunctional::parse(text).unwrap()
    }

    fn verdict(s: &SemidefRepresentation, x: &[f64]) -> VerdictKind {
        membership_at(s, x, &EngineConfig::default()).unwrap().kind
    }

    use VerdictKind::{In, Out};

    #[test]
    fn exposed_face_of_disk_is_a_point() {
        let face = exposed_face(&disk(), &f("1 - x1")).unwrap();
        assert_eq!(face.pencil().dim(), 4);
        assert_eq!(face.auxiliary().len(), 0);
        assert_eq!(verdict(&face, &[1.0, 0.0]), In);
        for p in [[0.0, 0.0], [0.9, 0.0], [1.0, 0.1], [1.0, -0.1]] {
            assert_eq!(verdict(&face, &p), Out, "{p:?}");
        }
    }

    #[test]
    fn exposed_face_trivial_functionals() {
        let same = exposed_face(&disk(), &AffineFunctional::constant_fn(0.0)).unwrap();
        assert_eq!(verdict(&same, &[0.5, 0.5]), In);
        assert_eq!(verdict(&same, &[1.5, 0.0]), Out);
        let none = exposed_face(&disk(), &AffineFunctional::constant_fn(1.0)).unwrap();
        assert_eq!(verdict(&none, &[0.0, 0.0]), Out);
        assert!(matches!(exposed_face(&disk(), &f("y")), Err(Error::VariableMismatch(_))));
    }

    #[test]
    fn removing_a_face() {
        let mut names = FreshNames::new();
        let s = remove_exposed_face(&disk(), &f("1 - x1"), &mut names).unwrap();
        assert_eq!(s.pencil().dim(), 4);
        assert_eq!(s.auxiliary().len(), 1);
        assert_eq!(verdict(&s, &[1.0, 0.0]), Out);
        assert_eq!(verdict(&s, &[0.5, 0.0]), In);
        assert_eq!(verdict(&s, &[0.0, 1.0]), In);

        let x = vec!["x".to_string()];
        let interval = poly(&["x", "1 - x"], &x);
        let half_open = remove_exposed_face(&interval, &f("x"), &mut names).unwrap();
        assert_eq!(verdict(&half_open, &[0.0]), Out);
        assert_eq!(verdict(&half_open, &[0.5]), In);
        assert_eq!(verdict(&half_open, &[1.0]), In);
    }

    #[test]
    fn strict_gadget_resolution() {
        let cfg = EngineConfig::default();
        let x = vec!["x".to_string()];
        let interval = poly(&["x", "1 - x"], &x);
        let s = remove_exposed_face(&interval, &f("x"), &mut FreshNames::new()).unwrap();
        for v in [10.0 / cfg.lambda_max, 1e-4, 1e-3, 0.3] {
            assert!(membership_at(&s, &[v], &cfg).unwrap().is_in(), "x = {v}");
        }
        for v in [0.0, -1e-6, -0.5] {
            let verdict = membership_at(&s, &[v], &cfg).unwrap();
            assert!(!verdict.is_in(), "x = {v}");
        }
    }

    #[test]
    fn relint_of_disk() {
        let mut names = FreshNames::new();
        let cfg = EngineConfig::default();
        let r = relative_interior(&disk(), None, &cfg, &mut names).unwrap();
        assert_eq!(r.pencil().dim(), 6);
        assert_eq!(r.auxiliary().len(), 2);
        assert_eq!(verdict(&r, &[0.0, 0.0]), In);
        assert_eq!(verdict(&r, &[0.9, 0.0]), In);
        assert_eq!(verdict(&r, &[1.0 - 1e-3, 0.0]), In);
        assert_eq!(verdict(&r, &[1.0, 0.0]), Out);
        assert_eq!(verdict(&r, &[0.0, -1.0]), Out);
    }

    #[test]
    fn relint_of_segment() {
        let mut names = FreshNames::new();
        let seg = poly(&["x1", "1 - x1", "x2", "-x2"], &xs());
        let r = relative_interior(&seg, None, &EngineConfig::default(), &mut names).unwrap();
        assert_eq!(verdict(&r, &[0.5, 0.0]), In);
        assert_eq!(verdict(&r, &[0.01, 0.0]), In);
        assert_eq!(verdict(&r, &[0.0, 0.0]), Out);
        assert_eq!(verdict(&r, &[1.0, 0.0]), Out);
        assert_eq!(verdict(&r, &[0.5, 0.1]), Out);
    }

    #[test]
    fn relint_with_supplied_witness() {
        let mut names = FreshNames::new();
        let cfg = EngineConfig::default();
        let z = crate::lmi::assignment(&[("x1", 0.2), ("x2", -0.1)]);
        let r = relative_interior(&disk(), Some(&z), &cfg, &mut names).unwrap();
        assert_eq!(verdict(&r, &[0.0, 0.9]), In);
        let bad = crate::lmi::assignment(&[("x1", 1.0), ("x2", 0.0)]);
        let err = relative_interior(&disk(), Some(&bad), &cfg, &mut names).unwrap_err();
        assert!(matches!(err, Error::InvalidWitness(_)));
        let outside = crate::lmi::assignment(&[("x1", 2.0), ("x2", 0.0)]);
        assert!(relative_interior(&disk(), Some(&outside), &cfg, &mut names).is_err());
    }

    #[test]
    fn relint_of_empty_set_fails() {
        let err = relative_interior(&SemidefRepresentation::empty(&xs()), None, &EngineConfig::default(), &mut FreshNames::new())
            .unwrap_err();
        assert!(matches!(err, Error::EmptySet { .. }));
    }

    #[test]
    fn relint_size_bookkeeping() {
        let mut names = FreshNames::new();
        let cfg = EngineConfig::default();
        let proj = project(&disk(), &["x1".to_string()]).unwrap();
        let r = relative_interior(&proj, None, &cfg, &mut names).unwrap();
        assert_eq!(r.pencil().dim(), 6);
        assert_eq!(r.auxiliary().len(), 3);
        assert_eq!(verdict(&r, &[0.999]), In);
        assert_eq!(verdict(&r, &[1.0]), Out);
    }

    #[test]
    fn kernel_containment_on_disk() {
        let mut names = FreshNames::new();
        let w = Subspace::span(2, &[vec![1.0, 0.0]]).unwrap();
        let s = kernel_containment(&disk(), &w, &mut names).unwrap();
        assert_eq!(s.pencil().dim(), 3);
        assert_eq!(verdict(&s, &[1.0, 0.0]), In);
        assert_eq!(verdict(&s, &[0.5, 0.5]), In);
        assert_eq!(verdict(&s, &[-1.0, 0.0]), Out);
        assert_eq!(verdict(&s, &[0.0, 1.0]), Out);

        let same = kernel_containment(&disk(), &Subspace::full(2), &mut names).unwrap();
        assert_eq!(same, disk());

        let open = kernel_containment(&disk(), &Subspace::zero(2), &mut names).unwrap();
        assert_eq!(verdict(&open, &[0.0, 0.0]), In);
        assert_eq!(verdict(&open, &[0.0, 1.0]), Out);
    }

    #[test]
    fn kernel_containment_errors() {
        let mut names = FreshNames::new();
        let w = Subspace::zero(3);
        assert!(matches!(kernel_containment(&disk(), &w, &mut names), Err(Error::InvalidInput(_))));
        let proj = project(&disk(), &["x1".to_string()]).unwrap();
        assert!(matches!(
            kernel_containment(&proj, &Subspace::zero(2), &mut names),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn looparrow_from_center_is_open_disk() {
        let mut names = FreshNames::new();
        let center = poly(&["x1", "-x1", "x2", "-x2"], &xs());
        let s = looparrow(&center, &disk(), &mut names).unwrap();
        // [[A, A(z)], [A(z), λI]] ⊕ T-pencil
        assert_eq!(s.pencil().dim(), 4 + 4);
        assert_eq!(s.auxiliary().len(), 2 + 1);
        assert_eq!(verdict(&s, &[0.0, 0.0]), In);
        assert_eq!(verdict(&s, &[0.6, -0.6]), In);
        assert_eq!(verdict(&s, &[1.0, 0.0]), Out);
        assert_eq!(verdict(&s, &[1.2, 0.0]), Out);
    }

    #[test]
    fn looparrow_of_set_with_itself() {
        let mut names = FreshNames::new();
        let s = looparrow(&disk(), &disk(), &mut names).unwrap();
        for p in [[0.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.6, 0.8]] {
            assert_eq!(verdict(&s, &p), In, "{p:?}");
        }
        assert_eq!(verdict(&s, &[1.1, 0.0]), Out);
        let none = looparrow(&SemidefRepresentation::empty(&xs()), &disk(), &mut names).unwrap();
        assert_eq!(verdict(&none, &[0.0, 0.0]), Out);
    }

    #[test]
    fn looparrow_rejects_mismatched_variables() {
        let other = poly(&["y"], &["y".to_string(), "x2".to_string()]);
        assert!(matches!(looparrow(&other, &disk(), &mut FreshNames::new()), Err(Error::VariableMismatch(_))));
    }

    #[test]
    fn intersections() {
        let mut names = FreshNames::new();
        assert_eq!(intersect(&[disk()], &mut names).unwrap(), disk());
        let upper = intersect(&[disk(), poly(&["x2"], &xs())], &mut names).unwrap();
        assert_eq!(verdict(&upper, &[0.0, 0.5]), In);
        assert_eq!(verdict(&upper, &[0.0, -0.5]), Out);

        let shifted = LinearMatrixPolynomial::new(
            SymmetricMatrix::diag(&[2.0, 0.0]),
            vec![
                ("x1".into(), SymmetricMatrix::diag(&[-1.0, 1.0])),
                ("x2".into(), SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()),
            ],
        )
        .unwrap();
        let lens = intersect(&[disk(), SemidefRepresentation::spectrahedron(shifted)], &mut names).unwrap();
        assert_eq!(verdict(&lens, &[0.5, 0.0]), In);
        assert_eq!(verdict(&lens, &[-0.5, 0.0]), Out);
        assert!(intersect(&[], &mut names).is_err());
    }

    #[test]
    fn intersect_renames_auxiliaries_apart() {
        let mut names = FreshNames::new();
        let a = project(&disk(), &["x1".to_string()]).unwrap();
        let b = project(&disk(), &["x1".to_string()]).unwrap();
        let both = intersect(&[a, b], &mut names).unwrap();
        assert_eq!(both.auxiliary().len(), 2);
        assert_ne!(both.auxiliary()[0], both.auxiliary()[1]);
    }

    #[test]
    fn projections() {
        let shadow = project(&disk(), &["x1".to_string()]).unwrap();
        assert_eq!(verdict(&shadow, &[-1.0]), In);
        assert_eq!(verdict(&shadow, &[1.0]), In);
        assert_eq!(verdict(&shadow, &[1.01]), Out);
        assert_eq!(project(&disk(), &xs()).unwrap(), disk());
        assert!(matches!(project(&disk(), &["y".to_string()]), Err(Error::VariableMismatch(_))));

        let wedge = poly(&["x1 - x2", "x2"], &xs());
        let ray = project(&wedge, &["x1".to_string()]).unwrap();
        assert_eq!(verdict(&ray, &[0.0]), In);
        assert_eq!(verdict(&ray, &[50.0]), In);
        assert_eq!(verdict(&ray, &[-0.1]), Out);
    }

    #[test]
    fn convex_hulls() {
        let mut names = FreshNames::new();
        let x = vec!["x".to_string()];
        let left = poly(&["-x", "x + 1"], &x);
        let right = poly(&["x", "1 - x"], &x);
        let hull = conv_union(&left, &right, &mut names).unwrap();
        for (p, v) in [(-1.0, In), (0.0, In), (0.7, In), (1.0, In), (1.05, Out), (-1.1, Out)] {
            assert_eq!(verdict(&hull, &[p]), v, "x = {p}");
        }
        let twice = conv_union(&disk(), &disk(), &mut names).unwrap();
        assert_eq!(verdict(&twice, &[0.6, 0.8]), In);
        assert_eq!(verdict(&twice, &[0.8, 0.8]), Out);
    }

    #[test]
    fn stadium_hull() {
        let mut names = FreshNames::new();
        let square = poly(&["1 - x1", "1 + x1", "x2", "1 - x2"], &xs());
        let stadium = conv_union(&disk(), &square, &mut names).unwrap();
        assert_eq!(verdict(&stadium, &[0.99, 0.99]), In);
        assert_eq!(verdict(&stadium, &[0.0, -1.01]), Out);
        assert_eq!(verdict(&stadium, &[0.0, -0.99]), In);
        assert_eq!(verdict(&stadium, &[1.0, 1.1]), Out);
    }

    /// Every coefficient of a constructed pencil is an input coefficient, its
    /// negative, or one of `0, ±1, ±½`.
    #[test]
    fn constructions_preserve_coefficients() {
        let mut names = FreshNames::new();
        let square = poly(&["1 - x1", "1 + x1", "x2", "1 - x2"], &xs());
        let tri = poly(&["-x2", "x2 - x1 + 1", "x2 + x1 + 1"], &xs());
        let allowed = |inputs: &[&SemidefRepresentation]| {
            let mut vals: Vec<f64> = vec![0.0, 1.0, -1.0, 0.5, -0.5];
            for s in inputs {
                let p = s.pencil();
                for m in std::iter::once(p.constant_term()).chain(p.coeffs()) {
                    for v in m.as_slice() {
                        vals.push(*v);
                        vals.push(-v);
                    }
                }
            }
            vals
        };
        let check = |out: &SemidefRepresentation, inputs: &[&SemidefRepresentation]| {
            let ok = allowed(inputs);
            let p = out.pencil();
            for m in std::iter::once(p.constant_term()).chain(p.coeffs()) {
                for v in m.as_slice() {
                    assert!(ok.iter().any(|a| a == v), "unexpected coefficient {v}");
                }
            }
        };
        let d = disk();
        check(&exposed_face(&d, &f("1 - x1")).unwrap(), &[&d]);
        check(&remove_exposed_face(&d, &f("1 - x1"), &mut names).unwrap(), &[&d]);
        let hull = conv_union(&d, &square, &mut names).unwrap();
        check(&hull, &[&d, &square]);
        check(&looparrow(&tri, &d, &mut names).unwrap(), &[&tri, &d]);
        check(&intersect(&[d.clone(), square.clone()], &mut names).unwrap(), &[&d, &square]);
        check(&project(&hull, &["x1".to_string()]).unwrap(), &[&hull]);
        check(&kernel_containment(&d, &Subspace::span(2, &[vec![1.0, 0.0]]).unwrap(), &mut names).unwrap(), &[&d]);
    }
}
