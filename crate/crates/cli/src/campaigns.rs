//! Oracle-agreement campaigns behind `sdrep verify`.
//!
//! Each campaign pits a construction plus the feasibility engine against a
//! brute-force oracle on many points and reports one JSON object per
//! disagreement and one summary per case. An engine `Unknown` is counted,
//! never treated as agreement or disagreement. Points closer than
//! [`BAND`] to a boundary that the construction removes are excluded: there
//! the engine is below its resolution limit.

use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use sdrep::constructions;
use sdrep::feasibility::{self, find_psd_point, membership_at, EngineConfig, VerdictKind};
use sdrep::lmi::{
    direct_sum, scalar_block, AffineFunctional, Assignment, FreshNames, LinearMatrixPolynomial,
    SemidefRepresentation,
};
use sdrep::oracle;
use sdrep::symlin::{self, Matrix, Subspace, SymmetricMatrix};

use crate::grid::{sample, Bounds};

/// Half-width of the excluded band around removed boundary.
pub const BAND: f64 = 2e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Campaign {
    Albert,
    Relint,
    Facechar,
    Looparrow,
}

impl Campaign {
    pub const ALL: [Campaign; 4] = [Campaign::Albert, Campaign::Relint, Campaign::Facechar, Campaign::Looparrow];

    pub fn name(self) -> &'static str {
        match self {
            Campaign::Albert => "albert",
            Campaign::Relint => "relint",
            Campaign::Facechar => "facechar",
            Campaign::Looparrow => "looparrow",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Campaign::Facechar => 200,
            _ => 500,
        }
    }
}

impl FromStr for Campaign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Campaign::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown campaign `{s}` (expected albert, relint, facechar or looparrow)"))
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Pairs for `albert` and `facechar`, sampled points of `T` for `looparrow`.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Grid resolution for `relint` and `looparrow`.
    pub resolution: usize,
    pub cfg: EngineConfig,
}

impl Default for Options {
    fn default() -> Self {
        Options { samples: None, seed: 0, resolution: 101, cfg: EngineConfig::default() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tally {
    pub trials: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub unknowns: usize,
    pub excluded: usize,
}

impl Tally {
    fn add(&mut self, other: &Tally) {
        self.trials += other.trials;
        self.agreements += other.agreements;
        self.disagreements += other.disagreements;
        self.unknowns += other.unknowns;
        self.excluded += other.excluded;
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub campaign: Campaign,
    pub total: Tally,
    pub seconds: f64,
    /// JSON lines: disagreements, then one summary per case, then the total.
    pub lines: Vec<Value>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.total.disagreements == 0
    }
}

/// Outcome of one comparison.
enum Trial {
    Excluded,
    Compared { oracle: bool, engine: VerdictKind, point: Vec<f64> },
}

struct Case {
    name: String,
    trials: Vec<Trial>,
}

pub fn run(campaign: Campaign, opts: &Options) -> Result<Report, sdrep::Error> {
    let start = Instant::now();
    let samples = opts.samples.unwrap_or(campaign.default_samples());
    let cases = match campaign {
        Campaign::Albert => vec![albert(samples, opts)?],
        Campaign::Relint => relint(opts)?,
        Campaign::Facechar => facechar(samples, opts)?,
        Campaign::Looparrow => looparrow(samples, opts)?,
    };
    let mut lines = Vec::new();
    let mut summaries = Vec::new();
    let mut total = Tally::default();
    for case in &cases {
        let mut t = Tally::default();
        for trial in &case.trials {
            match trial {
                Trial::Excluded => t.excluded += 1,
                Trial::Compared { oracle, engine, point } => {
                    t.trials += 1;
                    match (engine, oracle) {
                        (VerdictKind::Unknown, _) => t.unknowns += 1,
                        (VerdictKind::In, true) | (VerdictKind::Out, false) => t.agreements += 1,
                        _ => {
                            t.disagreements += 1;
                            lines.push(json!({
                                "campaign": campaign.name(),
                                "case": case.name,
                                "disagreement": {"point": point, "oracle": oracle, "engine": engine.to_string()},
                            }));
                        }
                    }
                }
            }
        }
        summaries.push(summary(campaign.name(), &case.name, &t, None));
        total.add(&t);
    }
    lines.extend(summaries);
    let seconds = start.elapsed().as_secs_f64();
    lines.push(summary(campaign.name(), "total", &total, Some(seconds)));
    Ok(Report { campaign, total, seconds, lines })
}

fn summary(campaign: &str, case: &str, t: &Tally, seconds: Option<f64>) -> Value {
    let mut v = json!({
        "campaign": campaign,
        "case": case,
        "trials": t.trials,
        "agreements": t.agreements,
        "disagreements": t.disagreements,
        "unknowns": t.unknowns,
        "excluded": t.excluded,
    });
    if let Some(s) = seconds {
        v["seconds"] = json!(s);
    }
    v
}

// ---------------------------------------------------------------------------
// albert

/// A random `(A, B)` with `A ⪰ 0` of dimension at most 5 and forced rank
/// deficiency, `B` with at most 3 rows. About half the pairs satisfy
/// `ker A ⊆ ker B`; the others have `‖B·P_ker A‖₂ ≥ 1`.
pub fn albert_instance(rng: &mut impl Rng) -> (SymmetricMatrix, Matrix) {
    let k = rng.gen_range(1..=5);
    let rank = rng.gen_range(0..k);
    let m = rng.gen_range(1..=3);
    let q = random_orthogonal(rng, k);
    let mut a = SymmetricMatrix::zeros(k);
    for c in 0..rank {
        let lam = rng.gen_range(0.1..2.0);
        let v = q.column(c);
        for i in 0..k {
            for j in i..k {
                a.set(i, j, a.get(i, j) + lam * v[i] * v[j]);
            }
        }
    }
    let c = random_matrix(rng, m, k);
    let b = if rng.gen_bool(0.5) {
        c.matmul(&a.to_matrix())
    } else {
        let kernel = Subspace::span(k, &(rank..k).map(|i| q.column(i)).collect::<Vec<_>>()).expect("columns");
        let leak = c.matmul(&kernel.projector().to_matrix()).spectral_norm();
        if leak < 1.0 {
            scale_matrix(&c, 1.0 / leak.max(1e-3))
        } else {
            c
        }
    };
    (a, b)
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let data: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    Matrix::from_rows(&data).expect("rectangular")
}

fn scale_matrix(m: &Matrix, s: f64) -> Matrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j) * s);
        }
    }
    out
}

fn random_orthogonal(rng: &mut impl Rng, k: usize) -> Matrix {
    let g = random_matrix(rng, k, k);
    let sym = g.matmul(&g.transpose()).to_symmetric().expect("square");
    symlin::eigh(&sym).expect("finite").vectors
}

/// `[[A, Bᵀ], [B, λ·I]]` over the single variable `lambda`.
pub fn albert_pencil(a: &SymmetricMatrix, b: &Matrix) -> LinearMatrixPolynomial {
    let (k, m) = (a.dim(), b.rows());
    let mut c = SymmetricMatrix::zeros(k + m);
    for i in 0..k {
        for j in 0..k {
            c.set(i, j, a.get(i, j));
        }
    }
    for r in 0..m {
        for j in 0..k {
            c.set(k + r, j, b.get(r, j));
            c.set(j, k + r, b.get(r, j));
        }
    }
    let mut lam = SymmetricMatrix::zeros(k + m);
    for r in 0..m {
        lam.set(k + r, k + r, 1.0);
    }
    LinearMatrixPolynomial::new(c, vec![("lambda".to_string(), lam)]).expect("square blocks")
}

fn albert(samples: usize, opts: &Options) -> Result<Case, sdrep::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs: Vec<_> = (0..samples).map(|_| albert_instance(&mut rng)).collect();
    let trials = pairs
        .par_iter()
        .map(|(a, b)| {
            let oracle = oracle::albert_criterion(a, b)?;
            let engine = find_psd_point(&albert_pencil(a, b), &opts.cfg).kind;
            let point = a.as_slice().iter().chain(b.row(0)).copied().collect();
            Ok(Trial::Compared { oracle, engine, point })
        })
        .collect::<Result<Vec<_>, sdrep::Error>>()?;
    Ok(Case { name: "random-pairs".into(), trials })
}

// ---------------------------------------------------------------------------
// shared 2-D fixtures

fn xy() -> Vec<String> {
    vec!["x1".into(), "x2".into()]
}

pub fn disk() -> SemidefRepresentation {
    let l = LinearMatrixPolynomial::new(
        SymmetricMatrix::identity(2),
        vec![
            ("x1".into(), SymmetricMatrix::diag(&[-1.0, 1.0])),
            ("x2".into(), SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).expect("2x2")),
        ],
    )
    .expect("disk pencil");
    SemidefRepresentation::spectrahedron(l)
}

/// `{ x | eᵢ(x) ≥ 0 }` over `x1, x2`.
pub fn poly(exprs: &[&str]) -> SemidefRepresentation {
    let blocks: Vec<_> =
        exprs.iter().map(|e| scalar_block(&AffineFunctional::parse(e).expect("expression"))).collect();
    SemidefRepresentation::spectrahedron_over(direct_sum(&blocks).expect("blocks"), &xy()).expect("vars")
}

pub fn square() -> SemidefRepresentation {
    poly(&["1 - x1", "1 + x1", "1 - x2", "1 + x2"])
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

fn square_boundary_distance(p: [f64; 2]) -> f64 {
    let c = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
    (0..4).map(|i| segment_distance(p, c[i], c[(i + 1) % 4])).fold(f64::INFINITY, f64::min)
}

/// Boundary distance for the stadium `conv(D₂ ∪ [−1,1]×[0,1])`.
fn stadium_boundary_distance(p: [f64; 2]) -> f64 {
    let arc = if p[1] <= 0.0 {
        (p[0].hypot(p[1]) - 1.0).abs()
    } else {
        (p[0] - 1.0).hypot(p[1]).min((p[0] + 1.0).hypot(p[1]))
    };
    [
        segment_distance(p, [-1.0, 1.0], [1.0, 1.0]),
        segment_distance(p, [1.0, 0.0], [1.0, 1.0]),
        segment_distance(p, [-1.0, 0.0], [-1.0, 1.0]),
        arc,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

fn in_stadium_interior(p: [f64; 2]) -> bool {
    if p[1] >= 0.0 {
        p[0].abs() < 1.0 && p[1] < 1.0
    } else {
        p[0].hypot(p[1]) < 1.0
    }
}

fn lattice(bounds: Bounds, res: usize) -> Vec<[f64; 2]> {
    (0..res * res).map(|i| [sample(bounds.x, res, i % res), sample(bounds.y, res, i / res)]).collect()
}

fn engine_kind(s: &SemidefRepresentation, p: &[f64], cfg: &EngineConfig) -> Result<VerdictKind, sdrep::Error> {
    Ok(membership_at(s, p, cfg)?.kind)
}

fn member_fn<'a>(s: &'a SemidefRepresentation, cfg: &'a EngineConfig) -> impl Fn(&[f64]) -> bool + 'a {
    move |p| membership_at(s, p, cfg).map(|v| v.is_in()).unwrap_or(false)
}

fn on_grid(
    points: &[[f64; 2]],
    excluded: impl Fn([f64; 2]) -> bool + Sync,
    oracle: impl Fn([f64; 2]) -> Result<bool, sdrep::Error> + Sync,
    engine: impl Fn([f64; 2]) -> Result<VerdictKind, sdrep::Error> + Sync,
) -> Result<Vec<Trial>, sdrep::Error> {
    points
        .par_iter()
        .map(|&p| {
            if excluded(p) {
                return Ok(Trial::Excluded);
            }
            Ok(Trial::Compared { oracle: oracle(p)?, engine: engine(p)?, point: p.to_vec() })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// relint

fn relint(opts: &Options) -> Result<Vec<Case>, sdrep::Error> {
    let cfg = &opts.cfg;
    let res = opts.resolution;
    let segment = poly(&["x1", "1 - x1", "x2", "-x2"]);
    type Band = Box<dyn Fn([f64; 2]) -> bool + Sync>;
    let cases: Vec<(&str, SemidefRepresentation, Bounds, Band)> = vec![
        ("disk", disk(), Bounds::default(), Box::new(|p: [f64; 2]| (p[0].hypot(p[1]) - 1.0).abs() < BAND)),
        (
            "segment",
            segment,
            Bounds { x: (-0.5, 1.5), y: (-1.0, 1.0) },
            Box::new(|p: [f64; 2]| p[0].hypot(p[1]) < BAND || (p[0] - 1.0).hypot(p[1]) < BAND),
        ),
    ];
    let mut out = Vec::new();
    for (name, s, bounds, band) in cases {
        let z = feasibility::interior_point(&s, cfg)?.point;
        let zv: Vec<f64> = s.visible().iter().map(|v| z[v]).collect();
        let r = constructions::relative_interior(&s, None, cfg, &mut FreshNames::new())?;
        let member = member_fn(&s, cfg);
        let trials = on_grid(
            &lattice(bounds, res),
            band,
            |p| Ok(oracle::relint_member(&member, &zv, &p, &oracle::DEFAULT_EPS_GRID)),
            |p| engine_kind(&r, &p, cfg),
        )?;
        out.push(Case { name: name.into(), trials });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// facechar

fn facechar(samples: usize, opts: &Options) -> Result<Vec<Case>, sdrep::Error> {
    let cfg = &opts.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let tau = std::f64::consts::TAU;

    let mut disk_pairs = Vec::with_capacity(samples);
    while disk_pairs.len() < samples {
        let th: f64 = rng.gen_range(0.0..tau);
        let x = [th.cos(), th.sin()];
        let y = match rng.gen_range(0..4) {
            0 => x,
            1 => {
                let ph = th + rng.gen_range(0.1..tau - 0.1);
                [ph.cos(), ph.sin()]
            }
            _ => {
                let r = rng.gen_range(0.0f64..1.0).sqrt();
                let ph: f64 = rng.gen_range(0.0..tau);
                [r * ph.cos(), r * ph.sin()]
            }
        };
        if y != x && (y[0] - x[0]).hypot(y[1] - x[1]) < 0.05 {
            continue;
        }
        disk_pairs.push((x, y));
    }

    let mut square_pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let edge = rng.gen_range(0..4);
        let on_edge = |e: usize, t: f64| match e {
            0 => [1.0, t],
            1 => [-1.0, t],
            2 => [t, 1.0],
            _ => [t, -1.0],
        };
        let x = if rng.gen_bool(0.2) {
            on_edge(edge, if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        } else {
            on_edge(edge, rng.gen_range(-0.99..0.99))
        };
        let y = match rng.gen_range(0..5) {
            0 => x,
            1 | 2 => on_edge(edge, rng.gen_range(-1.0..=1.0)),
            _ => [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)],
        };
        square_pairs.push((x, y));
    }

    let mut out = Vec::new();
    for (name, s, pairs) in [("disk", disk(), disk_pairs), ("square", square(), square_pairs)] {
        let member = member_fn(&s, cfg);
        let l = s.pencil();
        let at = |p: [f64; 2]| -> Assignment { s.point(&p).expect("two coordinates") };
        let trials = pairs
            .iter()
            .map(|&(x, y)| {
                let by_push = oracle::face_eps_characterization(&member, &x, &y, &oracle::DEFAULT_EPS_GRID);
                let kx = oracle::face_of_point(l, &at(x), 1e-9)?;
                let ky = oracle::face_of_point(l, &at(y), 1e-9)?;
                let by_kernel = kx.is_contained_in(&ky, oracle::CONTAINMENT_TOL);
                let engine = if by_kernel { VerdictKind::In } else { VerdictKind::Out };
                Ok(Trial::Compared { oracle: by_push, engine, point: vec![x[0], x[1], y[0], y[1]] })
            })
            .collect::<Result<Vec<_>, sdrep::Error>>()?;
        out.push(Case { name: name.into(), trials });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// looparrow

/// Name, `T`, `S` and a sampling box for `T`.
type LoopCase = (&'static str, SemidefRepresentation, SemidefRepresentation, [(f64, f64); 2]);

fn looparrow(samples: usize, opts: &Options) -> Result<Vec<Case>, sdrep::Error> {
    let cfg = &opts.cfg;
    let res = opts.resolution;
    let mut out = Vec::new();

    let near_circle = |p: [f64; 2]| (p[0].hypot(p[1]) - 1.0).abs() < BAND;
    let disk_cases: [LoopCase; 4] = [
        ("center-disk", poly(&["x1", "-x1", "x2", "-x2"]), disk(), [(0.0, 0.0), (0.0, 0.0)]),
        ("triangle-disk", poly(&["-x2", "x2 - 2*x1 + 1", "x2 + 2*x1 + 1"]), disk(), [(-0.5, 0.5), (-1.0, 0.0)]),
        ("disk-disk", disk(), disk(), [(-1.0, 1.0), (-1.0, 1.0)]),
        ("edge-square", poly(&["x1 - 1", "1 - x1", "x2 + 0.5", "0.5 - x2"]), square(), [(1.0, 1.0), (-0.5, 0.5)]),
    ];
    for (i, (name, t, s, bbox)) in disk_cases.into_iter().enumerate() {
        let is_square = name == "edge-square";
        let bounds = if is_square { Bounds { x: (-1.25, 1.25), y: (-1.25, 1.25) } } else { Bounds::default() };
        let fallback = feasibility::interior_point(&t, cfg)
            .ok()
            .map(|ip| t.visible().iter().map(|v| ip.point[v]).collect::<Vec<f64>>());
        let pts = oracle::sample_set(member_fn(&t, cfg), &bbox, samples, opts.seed.wrapping_add(i as u64), fallback);
        let zs: Vec<Assignment> = pts.iter().map(|p| t.point(p).expect("two coordinates")).collect();
        let l = constructions::looparrow(&t, &s, &mut FreshNames::new())?;
        let band = move |p: [f64; 2]| {
            if is_square {
                let retained = p[0] == 1.0 && p[1].abs() <= 1.0 - BAND;
                square_boundary_distance(p) < BAND && !retained
            } else {
                near_circle(p)
            }
        };
        let trials = on_grid(
            &lattice(bounds, res),
            band,
            |p| oracle::looparrow_member(&zs, s.pencil(), &s.point(&p).expect("two coordinates"), 1e-9),
            |p| engine_kind(&l, &p, cfg),
        )?;
        out.push(Case { name: name.into(), trials });
    }

    // the stadium is not a spectrahedron; its face-retention set is known in closed form
    let mut names = FreshNames::new();
    let hull = constructions::conv_union(&disk(), &poly(&["1 - x1", "1 + x1", "x2", "1 - x2"]), &mut names)?;
    let t = constructions::intersect(&[hull.clone(), poly(&["-x2", "x2 - x1 + 1", "x2 + x1 + 1"])], &mut names)?;
    let l = constructions::looparrow(&t, &hull, &mut names)?;
    let retained = |p: [f64; 2]| (p == [0.0, -1.0]) || (p[0].abs() == 1.0 && (0.0..1.0).contains(&p[1]));
    let trials = on_grid(
        &lattice(Bounds { x: (-1.25, 1.25), y: (-1.25, 1.25) }, res),
        |p| stadium_boundary_distance(p) < BAND && !(retained(p) && p[1] <= 1.0 - BAND),
        |p| Ok(in_stadium_interior(p) || retained(p)),
        |p| engine_kind(&l, &p, cfg),
    )?;
    out.push(Case { name: "stadium".into(), trials });
    Ok(out)
}
