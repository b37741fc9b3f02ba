//! JSON set models.
//!
//! ```json
//! {
//!   "vars": ["x1", "x2"],
//!   "sets": {
//!     "disk": {"lmi": {"dim": 2, "A0": [[1, 0], [0, 1]],
//!                      "coeffs": {"x1": [[-1, 0], [0, 1]], "x2": [[0, 1], [1, 0]]}}},
//!     "open": {"relint": "disk"}
//!   }
//! }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use sdrep::constructions::{self, ConstructionReport};
use sdrep::feasibility::EngineConfig;
use sdrep::lmi::{direct_sum, scalar_block, AffineFunctional, FreshNames, LinearMatrixPolynomial, SemidefRepresentation};
use sdrep::symlin::{Subspace, SymmetricMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetModel {
    pub vars: Vec<String>,
    pub sets: BTreeMap<String, SetExpr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SetExpr {
    Lmi(LmiLeaf),
    /// Diagonal pencil: every expression is `≥ 0`.
    Poly(Vec<String>),
    Relint(String),
    ExposedFace(FaceArgs),
    RemoveFace(FaceArgs),
    KerSubset(KerArgs),
    Looparrow(LoopArgs),
    Intersect(Vec<String>),
    ConvUnion(Vec<String>),
    Project(ProjectArgs),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmiLeaf {
    pub dim: usize,
    #[serde(rename = "A0")]
    pub a0: Vec<Vec<f64>>,
    #[serde(default)]
    pub coeffs: BTreeMap<String, Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceArgs {
    pub s: String,
    pub l: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerArgs {
    pub s: String,
    /// Basis columns of `W`.
    pub w: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopArgs {
    pub t: String,
    pub s: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectArgs {
    pub s: String,
    pub keep: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("syntax error in expression of set `{set}`: {message}")]
    Expression { set: String, message: String },

    #[error("undefined reference `{0}`")]
    UndefinedReference(String),

    #[error("cycle through sets {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("dimension mismatch in set `{set}`: {message}")]
    DimensionMismatch { set: String, message: String },

    #[error("construction of set `{set}` failed: {source}")]
    Construction { set: String, source: sdrep::Error },
}

impl ModelError {
    /// Stable identifier of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::Syntax { .. } | ModelError::Expression { .. } => "syntax",
            ModelError::UndefinedReference(_) => "undefined-reference",
            ModelError::Cycle(_) => "cycle",
            ModelError::DimensionMismatch { .. } => "dimension-mismatch",
            ModelError::Construction { .. } => "construction",
        }
    }
}

/// A validated model with the warnings raised while reading it.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub model: SetModel,
    pub warnings: Vec<String>,
}

impl SetExpr {
    fn kind(&self) -> &'static str {
        match self {
            SetExpr::Lmi(_) => "lmi",
            SetExpr::Poly(_) => "poly",
            SetExpr::Relint(_) => "relint",
            SetExpr::ExposedFace(_) => "exposed_face",
            SetExpr::RemoveFace(_) => "remove_face",
            SetExpr::KerSubset(_) => "ker_subset",
            SetExpr::Looparrow(_) => "looparrow",
            SetExpr::Intersect(_) => "intersect",
            SetExpr::ConvUnion(_) => "conv_union",
            SetExpr::Project(_) => "project",
        }
    }

    fn references(&self) -> Vec<&str> {
        match self {
            SetExpr::Lmi(_) | SetExpr::Poly(_) => vec![],
            SetExpr::Relint(s) => vec![s],
            SetExpr::ExposedFace(f) | SetExpr::RemoveFace(f) => vec![&f.s],
            SetExpr::KerSubset(k) => vec![&k.s],
            SetExpr::Looparrow(l) => vec![&l.t, &l.s],
            SetExpr::Intersect(v) | SetExpr::ConvUnion(v) => v.iter().map(String::as_str).collect(),
            SetExpr::Project(p) => vec![&p.s],
        }
    }
}

pub fn parse_model(text: &str) -> Result<Parsed, ModelError> {
    let model: SetModel = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let warnings = model.validate()?;
    Ok(Parsed { model, warnings })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn check_square(set: &str, what: &str, rows: &[Vec<f64>], dim: usize) -> Result<(), ModelError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(ModelError::DimensionMismatch {
            set: set.to_string(),
            message: format!("{what} must be {dim}x{dim}"),
        });
    }
    Ok(())
}

fn is_asymmetric(rows: &[Vec<f64>]) -> bool {
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    SymmetricMatrix::is_asymmetric(rows.len(), &flat)
}

fn parse_functional(set: &str, text: &str) -> Result<AffineFunctional, ModelError> {
    AffineFunctional::parse(text)
        .map_err(|e| ModelError::Expression { set: set.to_string(), message: e.to_string() })
}

impl SetModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("models serialize")
    }

    /// Checks references, acyclicity and leaf shapes; returns warnings.
    pub fn validate(&self) -> Result<Vec<String>, ModelError> {
        let mut warnings = Vec::new();
        let known_var = |v: &str| {
            if self.vars.iter().any(|x| x == v) {
                Ok(())
            } else {
                Err(ModelError::UndefinedReference(v.to_string()))
            }
        };
        for (name, expr) in &self.sets {
            for r in expr.references() {
                if !self.sets.contains_key(r) {
                    return Err(ModelError::UndefinedReference(r.to_string()));
                }
            }
            match expr {
                SetExpr::Lmi(leaf) => {
                    check_square(name, "A0", &leaf.a0, leaf.dim)?;
                    if is_asymmetric(&leaf.a0) {
                        warnings.push(format!("set `{name}`: A0 is not symmetric and was symmetrized"));
                    }
                    for (v, m) in &leaf.coeffs {
                        known_var(v)?;
                        check_square(name, &format!("coefficient of `{v}`"), m, leaf.dim)?;
                        if is_asymmetric(m) {
                            warnings.push(format!(
                                "set `{name}`: coefficient of `{v}` is not symmetric and was symmetrized"
                            ));
                        }
                    }
                }
                SetExpr::Poly(exprs) => {
                    if exprs.is_empty() {
                        return Err(ModelError::DimensionMismatch {
                            set: name.clone(),
                            message: "poly needs at least one expression".into(),
                        });
                    }
                    for e in exprs {
                        for v in parse_functional(name, e)?.vars() {
                            known_var(v)?;
                        }
                    }
                }
                SetExpr::ExposedFace(f) | SetExpr::RemoveFace(f) => {
                    parse_functional(name, &f.l)?;
                }
                SetExpr::ConvUnion(v) if v.len() != 2 => {
                    return Err(ModelError::DimensionMismatch {
                        set: name.clone(),
                        message: "conv_union takes exactly two sets".into(),
                    });
                }
                SetExpr::Intersect(v) if v.is_empty() => {
                    return Err(ModelError::DimensionMismatch {
                        set: name.clone(),
                        message: "intersect needs at least one set".into(),
                    });
                }
                SetExpr::Project(p) => {
                    for v in &p.keep {
                        known_var(v)?;
                    }
                }
                _ => {}
            }
        }
        self.check_acyclic()?;
        Ok(warnings)
    }

    fn check_acyclic(&self) -> Result<(), ModelError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        fn visit<'a>(
            m: &'a SetModel,
            name: &'a str,
            marks: &mut HashMap<&'a str, Mark>,
            path: &mut Vec<&'a str>,
        ) -> Result<(), ModelError> {
            match marks.get(name) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Open) => {
                    let start = path.iter().position(|p| *p == name).unwrap_or(0);
                    let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(name.to_string());
                    return Err(ModelError::Cycle(cycle));
                }
                None => {}
            }
            marks.insert(name, Mark::Open);
            path.push(name);
            for r in m.sets[name].references() {
                visit(m, r, marks, path)?;
            }
            path.pop();
            marks.insert(name, Mark::Done);
            Ok(())
        }
        let mut marks = HashMap::new();
        for name in self.sets.keys() {
            visit(self, name, &mut marks, &mut Vec::new())?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&SetExpr, ModelError> {
        self.sets.get(name).ok_or_else(|| ModelError::UndefinedReference(name.to_string()))
    }
}

/// A set elaborated into a representation, with a record of how it was built.
#[derive(Clone, Debug)]
pub struct Built {
    pub sdr: SemidefRepresentation,
    pub tree: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub name: String,
    pub kind: &'static str,
    pub report: ConstructionReport,
    pub inputs: Vec<Provenance>,
}

impl Provenance {
    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let r = &self.report;
        writeln!(
            f,
            "{:indent$}{} = {} (dim {}, visible {}, auxiliary {})",
            "",
            self.name,
            self.kind,
            r.output_dim,
            r.visible_count,
            r.auxiliary_count,
            indent = 2 * depth
        )?;
        for i in &self.inputs {
            i.write(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// Lazily elaborates sets of a model, caching every intermediate result.
pub struct Elaborator<'m> {
    model: &'m SetModel,
    cfg: EngineConfig,
    names: FreshNames,
    cache: HashMap<String, Built>,
}

impl<'m> Elaborator<'m> {
    pub fn new(model: &'m SetModel, cfg: EngineConfig) -> Self {
        Elaborator { model, cfg, names: FreshNames::new(), cache: HashMap::new() }
    }

    pub fn build(&mut self, name: &str) -> Result<Built, ModelError> {
        if let Some(b) = self.cache.get(name) {
            return Ok(b.clone());
        }
        let expr = self.model.get(name)?.clone();
        let inputs: Vec<Built> = expr.references().iter().map(|r| self.build(r)).collect::<Result<_, _>>()?;
        let fail = |source: sdrep::Error| ModelError::Construction { set: name.to_string(), source };
        let vars = &self.model.vars;
        let sdr = match &expr {
            SetExpr::Lmi(leaf) => {
                let m = |rows: &[Vec<f64>]| SymmetricMatrix::from_rows(rows).map_err(fail);
                let terms = leaf
                    .coeffs
                    .iter()
                    .map(|(v, c)| Ok((v.clone(), m(c)?)))
                    .collect::<Result<Vec<_>, ModelError>>()?;
                let pencil = LinearMatrixPolynomial::new(m(&leaf.a0)?, terms).map_err(fail)?;
                SemidefRepresentation::spectrahedron_over(pencil, vars).map_err(fail)?
            }
            SetExpr::Poly(exprs) => {
                let blocks = exprs
                    .iter()
                    .map(|e| Ok(scalar_block(&parse_functional(name, e)?)))
                    .collect::<Result<Vec<_>, ModelError>>()?;
                let pencil = direct_sum(&blocks).map_err(fail)?;
                SemidefRepresentation::spectrahedron_over(pencil, vars).map_err(fail)?
            }
            SetExpr::Relint(_) => {
                constructions::relative_interior(&inputs[0].sdr, None, &self.cfg, &mut self.names).map_err(fail)?
            }
            SetExpr::ExposedFace(f) => {
                constructions::exposed_face(&inputs[0].sdr, &parse_functional(name, &f.l)?).map_err(fail)?
            }
            SetExpr::RemoveFace(f) => {
                let l = parse_functional(name, &f.l)?;
                constructions::remove_exposed_face(&inputs[0].sdr, &l, &mut self.names).map_err(fail)?
            }
            SetExpr::KerSubset(k) => {
                let dim = inputs[0].sdr.pencil().dim();
                if k.w.iter().any(|c| c.len() != dim) {
                    return Err(ModelError::DimensionMismatch {
                        set: name.to_string(),
                        message: format!("basis vectors of w must have length {dim}"),
                    });
                }
                let w = Subspace::span(dim, &k.w).map_err(fail)?;
                constructions::kernel_containment(&inputs[0].sdr, &w, &mut self.names).map_err(fail)?
            }
            SetExpr::Looparrow(_) => {
                constructions::looparrow(&inputs[0].sdr, &inputs[1].sdr, &mut self.names).map_err(fail)?
            }
            SetExpr::Intersect(_) => {
                let ss: Vec<_> = inputs.iter().map(|b| b.sdr.clone()).collect();
                constructions::intersect(&ss, &mut self.names).map_err(fail)?
            }
            SetExpr::ConvUnion(_) => {
                constructions::conv_union(&inputs[0].sdr, &inputs[1].sdr, &mut self.names).map_err(fail)?
            }
            SetExpr::Project(p) => constructions::project(&inputs[0].sdr, &p.keep).map_err(fail)?,
        };
        let tree = Provenance {
            name: name.to_string(),
            kind: expr.kind(),
            report: ConstructionReport::new(&sdr, format!("{} {}", expr.kind(), name)),
            inputs: inputs.into_iter().map(|b| b.tree).collect(),
        };
        let built = Built { sdr, tree };
        self.cache.insert(name.to_string(), built.clone());
        Ok(built)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = r#"{
      "vars": ["x1", "x2"],
      "sets": {
        "disk": {"lmi": {"dim": 2, "A0": [[1, 0], [0, 1]],
                         "coeffs": {"x1": [[-1, 0], [0, 1]], "x2": [[0, 1], [1, 0]]}}},
        "open": {"relint": "disk"},
        "half": {"poly": ["x2"]},
        "upper": {"intersect": ["disk", "half"]}
      }
    }"#;

    #[test]
    fn parses_disk_model() {
        let p = parse_model(DISK).unwrap();
        assert!(p.warnings.is_empty());
        assert_eq!(p.model.sets.len(), 4);
        assert!(matches!(p.model.sets["disk"], SetExpr::Lmi(_)));
    }

    #[test]
    fn round_trip() {
        let p = parse_model(DISK).unwrap();
        let again = parse_model(&p.model.to_json()).unwrap();
        assert_eq!(p.model, again.model);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_model("{\n  \"vars\": [\"x1\",\n  }").unwrap_err();
        match err {
            ModelError::Syntax { line, .. } => assert_eq!(line, 3),
            e => panic!("{e:?}"),
        }
        let err = parse_model(r#"{"vars": [], "sets": {"a": {"circle": 1}}}"#).unwrap_err();
        assert_eq!(err.code(), "syntax");
    }

    #[test]
    fn undefined_reference() {
        let err = parse_model(r#"{"vars": ["x"], "sets": {"a": {"relint": "foo"}}}"#).unwrap_err();
        assert_eq!(err, ModelError::UndefinedReference("foo".into()));
        assert_eq!(err.code(), "undefined-reference");
        let err = parse_model(r#"{"vars": ["x"], "sets": {"a": {"poly": ["y"]}}}"#).unwrap_err();
        assert_eq!(err.code(), "undefined-reference");
    }

    #[test]
    fn cycles_are_rejected() {
        let err = parse_model(
            r#"{"vars": ["x"], "sets": {"a": {"relint": "b"}, "b": {"intersect": ["a"]}}}"#,
        )
        .unwrap_err();
        assert_eq!(err.code(), "cycle");
    }

    #[test]
    fn dimension_mismatch() {
        let err = parse_model(
            r#"{"vars": ["x"], "sets": {"a": {"lmi": {"dim": 2, "A0": [[1, 0]], "coeffs": {}}}}}"#,
        )
        .unwrap_err();
        assert_eq!(err.code(), "dimension-mismatch");
    }

    #[test]
    fn asymmetric_input_is_symmetrized_with_warning() {
        let p = parse_model(
            r#"{"vars": ["x"], "sets": {"a": {"lmi": {"dim": 2, "A0": [[1, 2], [0, 1]], "coeffs": {}}}}}"#,
        )
        .unwrap();
        assert_eq!(p.warnings.len(), 1);
        let built = Elaborator::new(&p.model, EngineConfig::default()).build("a").unwrap();
        assert_eq!(built.sdr.pencil().constant_term().get(0, 1), 1.0);
    }

    #[test]
    fn elaboration_reports_sizes() {
        let p = parse_model(DISK).unwrap();
        let mut e = Elaborator::new(&p.model, EngineConfig::default());
        let open = e.build("open").unwrap();
        assert_eq!(open.tree.report.output_dim, 6);
        assert_eq!(open.tree.inputs.len(), 1);
        let upper = e.build("upper").unwrap();
        assert_eq!(upper.sdr.pencil().dim(), 3);
        assert!(upper.tree.to_string().contains("disk = lmi"));
    }
}
