use proptest::prelude::*;

use sdrep::constructions::{looparrow, project, relative_interior};
use sdrep::feasibility::{membership, membership_at, EngineConfig, VerdictKind};
use sdrep::lmi::{direct_sum, scalar_block, AffineFunctional, FreshNames, LinearMatrixPolynomial, SemidefRepresentation};
use sdrep::symlin::SymmetricMatrix;

fn xy() -> Vec<String> {
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

/// The box `[a, b] × [c, d]` as a diagonal pencil.
fn rect(a: f64, b: f64, c: f64, d: f64) -> SemidefRepresentation {
    let rows = [
        AffineFunctional::new(-a, [("x1", 1.0)]).unwrap(),
        AffineFunctional::new(b, [("x1", -1.0)]).unwrap(),
        AffineFunctional::new(-c, [("x2", 1.0)]).unwrap(),
        AffineFunctional::new(d, [("x2", -1.0)]).unwrap(),
    ];
    let blocks: Vec<_> = rows.iter().map(scalar_block).collect();
    SemidefRepresentation::spectrahedron_over(direct_sum(&blocks).unwrap(), &xy()).unwrap()
}

/// The unit disk written as a projection: `x1 = u`, `(u, x2)` in the disk.
fn shadow_disk() -> SemidefRepresentation {
    let mut eq = Vec::new();
    for sign in [1.0, -1.0] {
        eq.push(scalar_block(&AffineFunctional::new(0.0, [("x1", sign), ("u", -sign)]).unwrap()));
    }
    let l = LinearMatrixPolynomial::new(
        SymmetricMatrix::identity(2),
        vec![
            ("u".into(), SymmetricMatrix::diag(&[-1.0, 1.0])),
            ("x2".into(), SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()),
        ],
    )
    .unwrap();
    eq.push(l);
    SemidefRepresentation::new(direct_sum(&eq).unwrap(), xy(), vec!["u".into()]).unwrap()
}

fn nested_interval() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    // lo ≤ inner_lo ≤ inner_hi ≤ hi inside [-1, 1]
    prop::collection::vec(-1.0f64..1.0, 4).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        (v[0], v[1], v[2], v[3])
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn in_verdicts_carry_a_checkable_witness(x in -1.3f64..1.3, y in -1.3f64..1.3) {
        let cfg = EngineConfig::default();
        let s = shadow_disk();
        let p = s.point(&[x, y]).unwrap();
        let v = membership(&s, &p, &cfg).unwrap();
        if v.is_in() {
            let mut full = p.clone();
            full.extend(v.witness.clone().unwrap());
            let lam = s.pencil().evaluate(&full).unwrap().min_eigenvalue().unwrap();
            prop_assert!(lam >= -cfg.tol_feas, "witness margin {lam}");
        }
        let r = x.hypot(y);
        if r < 0.999 {
            prop_assert_eq!(v.kind, VerdictKind::In);
        } else if r > 1.001 {
            prop_assert_eq!(v.kind, VerdictKind::Out);
        }
    }

    #[test]
    fn verdicts_are_deterministic(x in -1.2f64..1.2, y in -1.2f64..1.2, seed in 0u64..4) {
        let cfg = EngineConfig { seed, ..EngineConfig::default() };
        let r = relative_interior(&disk(), None, &cfg, &mut FreshNames::new()).unwrap();
        let a = membership_at(&r, &[x, y], &cfg).unwrap();
        let b = membership_at(&r, &[x, y], &cfg).unwrap();
        prop_assert_eq!(a.kind, b.kind);
        prop_assert_eq!(a.witness, b.witness);
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert_eq!(a.margin.to_bits(), b.margin.to_bits());
        prop_assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    }

    #[test]
    fn looparrow_is_monotone_in_its_first_argument(
        (a0, a1, b1, b0) in nested_interval(),
        (c0, c1, d1, d0) in nested_interval(),
        px in -1.1f64..1.1,
        py in -1.1f64..1.1,
    ) {
        let cfg = EngineConfig::default();
        let s = rect(-1.0, 1.0, -1.0, 1.0);
        let mut names = FreshNames::new();
        let small = looparrow(&rect(a1, b1, c1, d1), &s, &mut names).unwrap();
        let big = looparrow(&rect(a0, b0, c0, d0), &s, &mut names).unwrap();
        if membership_at(&small, &[px, py], &cfg).unwrap().is_in() {
            prop_assert_ne!(membership_at(&big, &[px, py], &cfg).unwrap().kind, VerdictKind::Out);
        }
    }

    #[test]
    fn relint_of_a_box_is_the_open_box(x in -1.2f64..1.2, y in -1.2f64..1.2) {
        let cfg = EngineConfig::default();
        let r = relative_interior(&rect(-1.0, 1.0, -0.5, 0.5), None, &cfg, &mut FreshNames::new()).unwrap();
        let v = membership_at(&r, &[x, y], &cfg).unwrap().kind;
        let gap = (1.0 - x.abs()).min(0.5 - y.abs());
        if gap > 1e-3 {
            prop_assert_eq!(v, VerdictKind::In);
        } else if gap <= 0.0 {
            prop_assert_eq!(v, VerdictKind::Out);
        }
    }
}

#[test]
fn projection_of_a_lifted_disk_is_the_disk() {
    let cfg = EngineConfig::default();
    let s = project(&shadow_disk(), &["x2".to_string()]).unwrap();
    assert_eq!(s.visible(), ["x2".to_string()]);
    for (y, expected) in [(0.0, VerdictKind::In), (1.0, VerdictKind::In), (-1.0, VerdictKind::In), (1.1, VerdictKind::Out)] {
        assert_eq!(membership_at(&s, &[y], &cfg).unwrap().kind, expected, "x2 = {y}");
    }
}

#[test]
fn relint_of_the_shadow_matches_relint_of_the_disk() {
    let cfg = EngineConfig::default();
    let a = relative_interior(&shadow_disk(), None, &cfg, &mut FreshNames::new()).unwrap();
    let b = relative_interior(&disk(), None, &cfg, &mut FreshNames::new()).unwrap();
    for p in [[0.0, 0.0], [0.5, -0.5], [0.0, 1.0], [0.6, 0.8], [0.9, 0.3], [1.0, 0.1]] {
        assert_eq!(
            membership_at(&a, &p, &cfg).unwrap().kind,
            membership_at(&b, &p, &cfg).unwrap().kind,
            "at {p:?}"
        );
    }
}
