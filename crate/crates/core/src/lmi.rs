//! Linear matrix polynomials, semidefinite representations and the small
//! gadget blocks the constructions are assembled from.
//!
//! Variables are identified by name everywhere. Composing two pencils unifies
//! variables with equal names, which is how constructions share the visible
//! coordinates between blocks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::symlin::SymmetricMatrix;

/// Values for named variables.
pub type Assignment = BTreeMap<String, f64>;

/// Builds an [`Assignment`] from `(name, value)` pairs.
pub fn assignment<S: AsRef<str>>(pairs: &[(S, f64)]) -> Assignment {
    pairs.iter().map(|(k, v)| (k.as_ref().to_string(), *v)).collect()
}

/// Deterministic generator of auxiliary variable names `_aux<n>`.
///
/// Constructions take it by `&mut` so that the counter is an explicit
/// input/output value of every call.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreshNames {
    counter: usize,
}

impl FreshNames {
    pub const PREFIX: &'static str = "_aux";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(counter: usize) -> Self {
        FreshNames { counter }
    }

    pub fn counter(&self) -> usize {
        self.counter
    }

    pub fn next_name(&mut self) -> String {
        let name = format!("{}{}", Self::PREFIX, self.counter);
        self.counter += 1;
        name
    }
}

/// `A(X) = A₀ + Σᵢ Xᵢ·Aᵢ` with symmetric `k×k` coefficients.
#[derive(Clone, PartialEq)]
pub struct LinearMatrixPolynomial {
    vars: Vec<String>,
    constant: SymmetricMatrix,
    coeffs: Vec<SymmetricMatrix>,
}

fn check_distinct(names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::VariableMismatch(format!("duplicate variable `{n}`")));
        }
    }
    Ok(())
}

impl LinearMatrixPolynomial {
    pub fn new(constant: SymmetricMatrix, terms: Vec<(String, SymmetricMatrix)>) -> Result<Self> {
        let k = constant.dim();
        if let Some((name, m)) = terms.iter().find(|(_, m)| m.dim() != k) {
            return Err(Error::InvalidInput(format!(
                "coefficient of `{name}` is {}x{0}, constant term is {k}x{k}",
                m.dim()
            )));
        }
        let (vars, coeffs): (Vec<_>, Vec<_>) = terms.into_iter().unzip();
        check_distinct(&vars)?;
        Ok(LinearMatrixPolynomial { vars, constant, coeffs })
    }

    /// A pencil without variables.
    pub fn constant(m: SymmetricMatrix) -> Self {
        LinearMatrixPolynomial { vars: Vec::new(), constant: m, coeffs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.constant.dim()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn constant_term(&self) -> &SymmetricMatrix {
        &self.constant
    }

    pub fn coeffs(&self) -> &[SymmetricMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, name: &str) -> Option<&SymmetricMatrix> {
        self.var_index(name).map(|i| &self.coeffs[i])
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &SymmetricMatrix)> {
        self.vars.iter().map(String::as_str).zip(&self.coeffs)
    }

    /// `A₀ + Σ xᵢAᵢ`; the point must name exactly the pencil's variables.
    pub fn evaluate(&self, point: &Assignment) -> Result<SymmetricMatrix> {
        if let Some(extra) = point.keys().find(|k| self.var_index(k).is_none()) {
            return Err(Error::VariableMismatch(format!("unknown variable `{extra}`")));
        }
        let values = self
            .vars
            .iter()
            .map(|v| {
                point
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::VariableMismatch(format!("missing value for `{v}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.evaluate_at(&values))
    }

    /// Evaluation with values aligned to [`vars`](Self::vars).
    pub fn evaluate_at(&self, values: &[f64]) -> SymmetricMatrix {
        assert_eq!(values.len(), self.vars.len(), "one value per variable");
        let mut m = self.constant.clone();
        for (c, x) in self.coeffs.iter().zip(values) {
            m.axpy(*x, c);
        }
        m
    }

    /// Fixes some variables to values, keeping the rest free. Names not in the
    /// pencil are rejected.
    pub fn substitute(&self, point: &Assignment) -> Result<Self> {
        if let Some(extra) = point.keys().find(|k| self.var_index(k).is_none()) {
            return Err(Error::VariableMismatch(format!("unknown variable `{extra}`")));
        }
        let mut constant = self.constant.clone();
        let mut terms = Vec::new();
        for (name, c) in self.terms() {
            match point.get(name) {
                Some(x) => constant.axpy(*x, c),
                None => terms.push((name.to_string(), c.clone())),
            }
        }
        LinearMatrixPolynomial::new(constant, terms)
    }

    /// Renames variables. Names absent from `mapping` keep their name; the
    /// result must still have distinct variables.
    pub fn rename_vars(&self, mapping: &BTreeMap<String, String>) -> Result<Self> {
        let vars: Vec<String> =
            self.vars.iter().map(|v| mapping.get(v).cloned().unwrap_or_else(|| v.clone())).collect();
        check_distinct(&vars).map_err(|_| {
            Error::VariableMismatch("renaming is not injective on the pencil variables".into())
        })?;
        Ok(LinearMatrixPolynomial { vars, constant: self.constant.clone(), coeffs: self.coeffs.clone() })
    }

    /// Re-expresses the pencil over `vars`, a superset of its variables, in
    /// that order. New variables get zero coefficients.
    pub fn embed_vars(&self, vars: &[String]) -> Result<Self> {
        check_distinct(vars)?;
        if let Some(missing) = self.vars.iter().find(|v| !vars.contains(v)) {
            return Err(Error::VariableMismatch(format!("embedding drops variable `{missing}`")));
        }
        let zero = SymmetricMatrix::zeros(self.dim());
        let coeffs = vars.iter().map(|v| self.coeff(v).cloned().unwrap_or_else(|| zero.clone())).collect();
        Ok(LinearMatrixPolynomial { vars: vars.to_vec(), constant: self.constant.clone(), coeffs })
    }

    /// Perspective `t·A₀ + Σ uᵢAᵢ` over the old variables plus `tname`.
    pub fn homogenize(&self, tname: &str) -> Result<Self> {
        if self.var_index(tname).is_some() {
            return Err(Error::VariableMismatch(format!("`{tname}` is already a variable")));
        }
        let mut terms: Vec<_> = self.terms().map(|(n, c)| (n.to_string(), c.clone())).collect();
        terms.push((tname.to_string(), self.constant.clone()));
        LinearMatrixPolynomial::new(SymmetricMatrix::zeros(self.dim()), terms)
    }

    /// Applies `M ↦ S·M·Sᵀ`-style block placement: returns the pencil whose
    /// value is `[[P, Q],[Q, R]]` for pencils `P, Q, R` of equal dimension.
    pub fn two_by_two(top_left: &Self, off_diag: &Self, bottom_right: &Self) -> Result<Self> {
        let k = top_left.dim();
        if off_diag.dim() != k || bottom_right.dim() != k {
            return Err(Error::InvalidInput("2x2 block assembly needs equal block dimensions".into()));
        }
        let vars = union_vars(&[top_left, off_diag, bottom_right]);
        let place = |p: &SymmetricMatrix, q: &SymmetricMatrix, r: &SymmetricMatrix| {
            let mut m = SymmetricMatrix::zeros(2 * k);
            for i in 0..k {
                for j in 0..k {
                    m.set(i, j, p.get(i, j));
                    m.set(k + i, k + j, r.get(i, j));
                    m.set(i, k + j, q.get(i, j));
                }
            }
            m
        };
        let zero = SymmetricMatrix::zeros(k);
        let pick = |l: &Self, v: &str| l.coeff(v).unwrap_or(&zero).clone();
        let constant = place(&top_left.constant, &off_diag.constant, &bottom_right.constant);
        let terms = vars
            .iter()
            .map(|v| (v.clone(), place(&pick(top_left, v), &pick(off_diag, v), &pick(bottom_right, v))))
            .collect();
        LinearMatrixPolynomial::new(constant, terms)
    }

    /// Adds `alpha · other` to this pencil (same dimension), unifying variables.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::InvalidInput("pencil dimensions differ".into()));
        }
        let vars = union_vars(&[self, other]);
        let mut constant = self.constant.clone();
        constant.axpy(alpha, &other.constant);
        let terms = vars
            .iter()
            .map(|v| {
                let mut c = self.coeff(v).cloned().unwrap_or_else(|| SymmetricMatrix::zeros(self.dim()));
                if let Some(o) = other.coeff(v) {
                    c.axpy(alpha, o);
                }
                (v.clone(), c)
            })
            .collect();
        LinearMatrixPolynomial::new(constant, terms)
    }

    /// Removes variables whose coefficient is exactly zero.
    pub fn prune_zero_vars(&self) -> Self {
        let (vars, coeffs) = self
            .vars
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (v.clone(), c.clone()))
            .unzip();
        LinearMatrixPolynomial { vars, constant: self.constant.clone(), coeffs }
    }
}

impl fmt::Debug for LinearMatrixPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("LinearMatrixPolynomial");
        d.field("dim", &self.dim()).field("A0", &self.constant);
        for (n, c) in self.terms() {
            d.field(n, c);
        }
        d.finish()
    }
}

fn union_vars(ls: &[&LinearMatrixPolynomial]) -> Vec<String> {
    let mut vars: Vec<String> = Vec::new();
    for l in ls {
        for v in l.vars() {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
    }
    vars
}

/// Block-diagonal pencil `L₁ ⊕ … ⊕ Lₘ` over the union of the variables, in
/// order of first appearance.
pub fn direct_sum(ls: &[LinearMatrixPolynomial]) -> Result<LinearMatrixPolynomial> {
    let first = ls.first().ok_or_else(|| Error::InvalidInput("direct sum of no pencils".into()))?;
    if ls.len() == 1 {
        return Ok(first.clone());
    }
    let refs: Vec<&LinearMatrixPolynomial> = ls.iter().collect();
    let vars = union_vars(&refs);
    let zero: Vec<SymmetricMatrix> = ls.iter().map(|l| SymmetricMatrix::zeros(l.dim())).collect();
    let constant = SymmetricMatrix::block_diag(&ls.iter().map(|l| &l.constant).collect::<Vec<_>>());
    let terms = vars
        .iter()
        .map(|v| {
            let parts: Vec<&SymmetricMatrix> =
                ls.iter().zip(&zero).map(|(l, z)| l.coeff(v).unwrap_or(z)).collect();
            (v.clone(), SymmetricMatrix::block_diag(&parts))
        })
        .collect();
    LinearMatrixPolynomial::new(constant, terms)
}

/// An affine functional `c + Σ gᵢ Xᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFunctional {
    vars: Vec<String>,
    constant: f64,
    gradient: Vec<f64>,
}

impl AffineFunctional {
    /// Builds `constant + Σ coef·var`, merging repeated variables.
    pub fn new<S: Into<String>>(constant: f64, terms: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let mut vars: Vec<String> = Vec::new();
        let mut gradient: Vec<f64> = Vec::new();
        for (name, c) in terms {
            let name = name.into();
            match vars.iter().position(|v| *v == name) {
                Some(i) => gradient[i] += c,
                None => {
                    vars.push(name);
                    gradient.push(c);
                }
            }
        }
        let f = AffineFunctional { vars, constant, gradient };
        if !f.constant.is_finite() || f.gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidInput("affine functional with non-finite coefficient".into()));
        }
        Ok(f)
    }

    pub fn constant_fn(c: f64) -> Self {
        AffineFunctional { vars: Vec::new(), constant: c, gradient: Vec::new() }
    }

    /// Parses expressions such as `1 - x1`, `0.5*x2 + 2`, `-x1 - x2 + 1`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_affine(text)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn coefficient(&self, var: &str) -> f64 {
        self.vars.iter().position(|v| v == var).map_or(0.0, |i| self.gradient[i])
    }

    /// Value at a point; extra names in the point are ignored.
    pub fn evaluate(&self, point: &Assignment) -> Result<f64> {
        let mut v = self.constant;
        for (name, g) in self.vars.iter().zip(&self.gradient) {
            let x = point
                .get(name)
                .ok_or_else(|| Error::VariableMismatch(format!("missing value for `{name}`")))?;
            v += g * x;
        }
        Ok(v)
    }

    pub fn negated(&self) -> Self {
        AffineFunctional {
            vars: self.vars.clone(),
            constant: -self.constant,
            gradient: self.gradient.iter().map(|g| -g).collect(),
        }
    }

    /// `1 - self`, used for the upper end of an interval.
    pub fn one_minus(&self) -> Self {
        let mut f = self.negated();
        f.constant += 1.0;
        f
    }

    pub fn rename_vars(&self, mapping: &BTreeMap<String, String>) -> Self {
        AffineFunctional {
            vars: self.vars.iter().map(|v| mapping.get(v).cloned().unwrap_or_else(|| v.clone())).collect(),
            constant: self.constant,
            gradient: self.gradient.clone(),
        }
    }
}

impl fmt::Display for AffineFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if self.constant != 0.0 || self.vars.is_empty() {
            write!(f, "{}", self.constant)?;
            wrote = true;
        }
        for (v, g) in self.vars.iter().zip(&self.gradient) {
            if *g == 0.0 {
                continue;
            }
            let sign = if *g < 0.0 { "-" } else { "+" };
            let mag = g.abs();
            match (wrote, mag == 1.0) {
                (false, true) if *g < 0.0 => write!(f, "-{v}")?,
                (false, true) => write!(f, "{v}")?,
                (false, false) => write!(f, "{g}*{v}")?,
                (true, true) => write!(f, " {sign} {v}")?,
                (true, false) => write!(f, " {sign} {mag}*{v}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad number `{s}` at column {}", start + 1)))?;
                out.push((start, Token::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unexpected character `{other}` at column {}",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

fn parse_affine(text: &str) -> Result<AffineFunctional> {
    let tokens = tokenize(text)?;
    let err = |pos: usize, what: &str| {
        Error::InvalidInput(format!("{what} at column {} in `{text}`", pos + 1))
    };
    let mut constant = 0.0;
    let mut terms: Vec<(String, f64)> = Vec::new();
    let mut i = 0;
    let mut first = true;
    if tokens.is_empty() {
        return Err(err(0, "empty expression"));
    }
    while i < tokens.len() {
        let mut sign = 1.0;
        match tokens[i].1 {
            Token::Plus => i += 1,
            Token::Minus => {
                sign = -1.0;
                i += 1;
            }
            _ if first => {}
            _ => return Err(err(tokens[i].0, "expected `+` or `-`")),
        }
        first = false;
        let Some((pos, tok)) = tokens.get(i).cloned() else {
            return Err(err(text.len(), "expression ends after a sign"));
        };
        i += 1;
        match tok {
            Token::Num(v) => {
                if matches!(tokens.get(i), Some((_, Token::Star))) {
                    match tokens.get(i + 1) {
                        Some((_, Token::Ident(name))) => {
                            terms.push((name.clone(), sign * v));
                            i += 2;
                        }
                        _ => return Err(err(tokens[i].0, "expected a variable after `*`")),
                    }
                } else if let Some((_, Token::Ident(name))) = tokens.get(i) {
                    // juxtaposition such as `2x1` tokenizes as number then identifier
                    terms.push((name.clone(), sign * v));
                    i += 1;
                } else {
                    constant += sign * v;
                }
            }
            Token::Ident(name) => {
                if matches!(tokens.get(i), Some((_, Token::Star))) {
                    match tokens.get(i + 1) {
                        Some((_, Token::Num(v))) => {
                            terms.push((name, sign * v));
                            i += 2;
                        }
                        _ => return Err(err(tokens[i].0, "expected a number after `*`")),
                    }
                } else {
                    terms.push((name, sign));
                }
            }
            _ => return Err(err(pos, "expected a number or variable")),
        }
    }
    AffineFunctional::new(constant, terms)
}

/// The `1×1` pencil whose value is `ℓ(x)`.
pub fn scalar_block(l: &AffineFunctional) -> LinearMatrixPolynomial {
    let terms = l
        .vars
        .iter()
        .zip(&l.gradient)
        .map(|(v, g)| (v.clone(), SymmetricMatrix::diag(&[*g])))
        .collect();
    LinearMatrixPolynomial::new(SymmetricMatrix::diag(&[l.constant]), terms).expect("distinct vars")
}

/// The `2×2` pencil `[[λ, 1], [1, ℓ(x)]]`. Some `λ` makes it PSD exactly when `ℓ(x) > 0`.
pub fn strict_pos_block(l: &AffineFunctional, lambda_name: &str) -> Result<LinearMatrixPolynomial> {
    if l.vars.iter().any(|v| v == lambda_name) {
        return Err(Error::VariableMismatch(format!("`{lambda_name}` already occurs in the functional")));
    }
    let constant = SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, l.constant]])?;
    let mut terms = vec![(lambda_name.to_string(), SymmetricMatrix::diag(&[1.0, 0.0]))];
    for (v, g) in l.vars.iter().zip(&l.gradient) {
        terms.push((v.clone(), SymmetricMatrix::diag(&[0.0, *g])));
    }
    LinearMatrixPolynomial::new(constant, terms)
}

/// A pencil over `visible ++ auxiliary` denoting the projection of its
/// spectrahedron onto the visible coordinates:
/// `{ x | ∃ y : A(x, y) ⪰ 0 }`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidefRepresentation {
    pencil: LinearMatrixPolynomial,
    visible: Vec<String>,
    auxiliary: Vec<String>,
}

impl SemidefRepresentation {
    /// The pencil may mention any subset of `visible ∪ auxiliary`; it is
    /// re-expressed over exactly `visible ++ auxiliary`.
    pub fn new(pencil: LinearMatrixPolynomial, visible: Vec<String>, auxiliary: Vec<String>) -> Result<Self> {
        let all: Vec<String> = visible.iter().chain(&auxiliary).cloned().collect();
        check_distinct(&all).map_err(|_| {
            Error::VariableMismatch("visible and auxiliary variables must be distinct".into())
        })?;
        let pencil = pencil.embed_vars(&all)?;
        Ok(SemidefRepresentation { pencil, visible, auxiliary })
    }

    /// A spectrahedron: every pencil variable is visible.
    pub fn spectrahedron(pencil: LinearMatrixPolynomial) -> Self {
        let visible = pencil.vars().to_vec();
        SemidefRepresentation { pencil, visible, auxiliary: Vec::new() }
    }

    /// A spectrahedron over `visible`, which may include variables the pencil ignores.
    pub fn spectrahedron_over(pencil: LinearMatrixPolynomial, visible: &[String]) -> Result<Self> {
        Self::new(pencil, visible.to_vec(), Vec::new())
    }

    /// The empty set, as the pencil `[-1]`.
    pub fn empty(visible: &[String]) -> Self {
        Self::new(LinearMatrixPolynomial::constant(SymmetricMatrix::diag(&[-1.0])), visible.to_vec(), vec![])
            .expect("distinct visible names")
    }

    pub fn pencil(&self) -> &LinearMatrixPolynomial {
        &self.pencil
    }

    pub fn visible(&self) -> &[String] {
        &self.visible
    }

    pub fn auxiliary(&self) -> &[String] {
        &self.auxiliary
    }

    pub fn is_spectrahedron(&self) -> bool {
        self.auxiliary.is_empty()
    }

    /// The lifted spectrahedron over `visible ++ auxiliary`.
    pub fn lifted(&self) -> SemidefRepresentation {
        SemidefRepresentation::spectrahedron(self.pencil.clone())
    }

    /// Renames every auxiliary variable to a fresh name.
    pub fn freshen(&self, names: &mut FreshNames) -> Result<Self> {
        let mapping: BTreeMap<String, String> =
            self.auxiliary.iter().map(|a| (a.clone(), names.next_name())).collect();
        let pencil = self.pencil.rename_vars(&mapping)?;
        let auxiliary = self.auxiliary.iter().map(|a| mapping[a].clone()).collect();
        Self::new(pencil, self.visible.clone(), auxiliary)
    }

    /// Point over visible variables from positional values.
    pub fn point(&self, values: &[f64]) -> Result<Assignment> {
        if values.len() != self.visible.len() {
            return Err(Error::VariableMismatch(format!(
                "expected {} coordinates, got {}",
                self.visible.len(),
                values.len()
            )));
        }
        Ok(self.visible.iter().cloned().zip(values.iter().copied()).collect())
    }
}
