//! Exact counting of images and incidences on finite sets, the finite-scale
//! coarse dimension statistic, empirical exponent fitting, and closed-form
//! exponent bounds.
//!
//! Counting is exact end to end: elements are hashed in canonical exact form
//! and no floating-point value ever participates in a membership test.
//! Floating point enters only downstream of counting — logarithms, fitted
//! slopes, and the bound formulas.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{format_rat, parse_rat, BasisVector, BigRat, TowerInt};
use crate::polyalg::{MultiPoly, PolyFamily, UniPoly};

#[derive(Debug, Error, PartialEq)]
pub enum ExpansionError {
    #[error("element kind mismatch: expected {expected}, got {got}")]
    KindMismatch {
        expected: ElementKind,
        got: ElementKind,
    },
    #[error("{kind} elements are not supported by {operation}")]
    UnsupportedKind {
        kind: ElementKind,
        operation: &'static str,
    },
    #[error(
        "tower-kind images require every family member to be a monomial x^(2^j); member {0} is not"
    )]
    NotMonomialPower(usize),
    #[error("arity mismatch: the polynomial has arity {poly} but the sets supply {supplied} coordinates")]
    ArityMismatch { poly: usize, supplied: usize },
    #[error("a {mode} surface needs arity {expected}, got {got}")]
    SurfaceArity {
        mode: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("size must be at least 1")]
    ZeroSize,
    #[error("scale must be a finite real greater than 1")]
    BadScale,
    #[error("an exponent fit needs at least 2 points")]
    TooFewPoints,
    #[error("repeated abscissa n = {0} in exponent fit")]
    RepeatedAbscissa(u64),
    #[error("fit points must have n, m >= 1")]
    NonpositivePoint,
    #[error("constant probe is degenerate")]
    DegenerateProbe,
    #[error("no probes supplied")]
    NoProbes,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("set line {line}: {msg}")]
    SetParse { line: usize, msg: String },
}

/// The three exact element kinds a [`FiniteSet`] can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Rational,
    Tower,
    Vector,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::Rational => "rational",
            ElementKind::Tower => "tower",
            ElementKind::Vector => "vector",
        })
    }
}

/// One exact element: a rational, a tower integer 2^(2^e), or a formal
/// basis-vector combination.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Rational(BigRat),
    Tower(TowerInt),
    Vector(BasisVector),
}

impl Element {
    pub fn kind(&self) -> ElementKind {
        match self {
            Element::Rational(_) => ElementKind::Rational,
            Element::Tower(_) => ElementKind::Tower,
            Element::Vector(_) => ElementKind::Vector,
        }
    }

    /// Parses one set-file line as the given kind, using the exact text
    /// forms: `p/q` or `p` for rationals, `T(e)` for towers, and
    /// comma-separated `i:m` pairs (or `0`) for vectors.
    pub fn parse(line: &str, kind: ElementKind) -> Result<Element, String> {
        let t = line.trim();
        match kind {
            ElementKind::Rational => parse_rat(t)
                .map(Element::Rational)
                .map_err(|e| e.to_string()),
            ElementKind::Tower => TowerInt::from_str(t)
                .map(Element::Tower)
                .map_err(|e| e.to_string()),
            ElementKind::Vector => BasisVector::from_str(t)
                .map(Element::Vector)
                .map_err(|e| e.to_string()),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Rational(r) => f.write_str(&format_rat(r)),
            Element::Tower(t) => write!(f, "{}", t),
            Element::Vector(v) => write!(f, "{}", v),
        }
    }
}

/// A finite set of exact elements of one homogeneous kind, deduplicated by
/// exact equality. This is the carrier for the sets A, B, D of the counting
/// operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSet {
    kind: ElementKind,
    elems: HashSet<Element>,
}

impl FiniteSet {
    pub fn new(kind: ElementKind) -> Self {
        FiniteSet {
            kind,
            elems: HashSet::new(),
        }
    }

    pub fn from_rationals(it: impl IntoIterator<Item = BigRat>) -> Self {
        FiniteSet {
            kind: ElementKind::Rational,
            elems: it.into_iter().map(Element::Rational).collect(),
        }
    }

    pub fn from_towers(it: impl IntoIterator<Item = TowerInt>) -> Self {
        FiniteSet {
            kind: ElementKind::Tower,
            elems: it.into_iter().map(Element::Tower).collect(),
        }
    }

    pub fn from_vectors(it: impl IntoIterator<Item = BasisVector>) -> Self {
        FiniteSet {
            kind: ElementKind::Vector,
            elems: it.into_iter().map(Element::Vector).collect(),
        }
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elems.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.elems.iter()
    }

    /// Inserts an element of the matching kind; `Ok(true)` when new.
    pub fn insert(&mut self, e: Element) -> Result<bool, ExpansionError> {
        if e.kind() != self.kind {
            return Err(ExpansionError::KindMismatch {
                expected: self.kind,
                got: e.kind(),
            });
        }
        Ok(self.elems.insert(e))
    }

    /// Elements in a deterministic (sorted) order, for reporting.
    pub fn sorted_elements(&self) -> Vec<&Element> {
        let mut v: Vec<&Element> = self.elems.iter().collect();
        v.sort();
        v
    }

    /// Borrows the rational elements, failing on any other kind.
    pub fn rationals(&self) -> Result<Vec<&BigRat>, ExpansionError> {
        if self.kind != ElementKind::Rational {
            return Err(ExpansionError::KindMismatch {
                expected: ElementKind::Rational,
                got: self.kind,
            });
        }
        Ok(self
            .elems
            .iter()
            .map(|e| match e {
                Element::Rational(r) => r,
                _ => unreachable!("kind homogeneous"),
            })
            .collect())
    }

    /// Borrows the tower elements, failing on any other kind.
    pub fn towers(&self) -> Result<Vec<TowerInt>, ExpansionError> {
        if self.kind != ElementKind::Tower {
            return Err(ExpansionError::KindMismatch {
                expected: ElementKind::Tower,
                got: self.kind,
            });
        }
        Ok(self
            .elems
            .iter()
            .map(|e| match e {
                Element::Tower(t) => *t,
                _ => unreachable!("kind homogeneous"),
            })
            .collect())
    }

    /// Parses a set file: one element per line, `#` comments and blank lines
    /// ignored. The kind is inferred from the first unambiguous element
    /// (`T(...)` → tower, a line with `:` → vector, otherwise rational).
    pub fn parse(text: &str) -> Result<FiniteSet, ExpansionError> {
        let mut kind = None;
        for raw in text.lines() {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if t.starts_with("T(") {
                kind = Some(ElementKind::Tower);
            } else if t.contains(':') {
                kind = Some(ElementKind::Vector);
            } else if kind.is_none() {
                kind = Some(ElementKind::Rational);
            }
            if kind != Some(ElementKind::Rational) {
                break;
            }
        }
        let kind = kind.ok_or(ExpansionError::SetParse {
            line: 0,
            msg: "no elements found".to_owned(),
        })?;
        let mut set = FiniteSet::new(kind);
        for (i, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let e = Element::parse(t, kind)
                .map_err(|msg| ExpansionError::SetParse { line: i + 1, msg })?;
            set.insert(e)?;
        }
        Ok(set)
    }

    /// Renders the set in file form: sorted, one element per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in self.sorted_elements() {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

/// A surface U for incidence counting: either the zero set of an implicit
/// F(x, d, y0) of arity 3, or the graph {(x, d, f(x, d))} of an arity-2
/// polynomial. Graph mode admits an O(|A||D|) count via hashed membership.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSpec {
    Implicit(MultiPoly),
    Graph(MultiPoly),
}

impl SurfaceSpec {
    pub fn implicit(f: MultiPoly) -> Result<Self, ExpansionError> {
        if f.arity() != 3 {
            return Err(ExpansionError::SurfaceArity {
                mode: "implicit",
                expected: 3,
                got: f.arity(),
            });
        }
        Ok(SurfaceSpec::Implicit(f))
    }

    pub fn graph(f: MultiPoly) -> Result<Self, ExpansionError> {
        if f.arity() != 2 {
            return Err(ExpansionError::SurfaceArity {
                mode: "graph",
                expected: 2,
                got: f.arity(),
            });
        }
        Ok(SurfaceSpec::Graph(f))
    }
}

/// The finite-scale coarse dimension of a set of `size` elements at scale
/// `scale`: log(size)/log(scale).
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseDim {
    pub value: f64,
    pub scale: f64,
    pub size: u128,
}

/// A least-squares power-law fit of image size against input size in
/// log-log coordinates; `slope` is the empirical growth exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Sum of squared residuals of log(m) against the fitted line.
    pub residual: f64,
    pub points: Vec<(u64, u64)>,
}

/// The scalar parameters of the bound formulas and the extractor budgets.
/// The absolute constants `c` and `c_prime` are configuration inputs with
/// placeholder default 1.0 — reported values must always be read alongside
/// the constants used.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundParams {
    pub eps: f64,
    pub eta: f64,
    pub eta0: f64,
    pub delta: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub k: u64,
    pub n: u64,
    /// The natural M; doubles as the candidate budget of the certificate
    /// extractor (0 means "no cap").
    pub cap_m: u64,
    pub m: u64,
    pub r: f64,
    pub t: f64,
    pub c: f64,
    pub c_prime: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            eps: 0.5,
            eta: 0.0,
            eta0: 0.0,
            delta: 0.0,
            gamma: 1.0,
            gamma_prime: 1.0,
            k: 1,
            n: 1,
            cap_m: 0,
            m: 1,
            r: 1.0,
            t: 0.0,
            c: 1.0,
            c_prime: 1.0,
        }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), ExpansionError> {
        let reals = [
            ("eps", self.eps),
            ("eta", self.eta),
            ("eta0", self.eta0),
            ("delta", self.delta),
            ("gamma", self.gamma),
            ("gamma_prime", self.gamma_prime),
            ("r", self.r),
            ("t", self.t),
            ("c", self.c),
            ("c_prime", self.c_prime),
        ];
        for (name, v) in reals {
            if !v.is_finite() {
                return Err(ExpansionError::InvalidParam(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if self.c <= 0.0 {
            return Err(ExpansionError::InvalidParam(format!(
                "c must be > 0, got {}",
                self.c
            )));
        }
        if self.c_prime <= 0.0 {
            return Err(ExpansionError::InvalidParam(format!(
                "c_prime must be > 0, got {}",
                self.c_prime
            )));
        }
        Ok(())
    }
}

/// When a family member is exactly the monomial x^(2^j), returns j.
fn power_of_two_exponent(f: &UniPoly) -> Option<u32> {
    let d = f.degree()?;
    if d == 0 || !d.is_power_of_two() {
        return None;
    }
    let monomial_ok = f.coeffs().iter().enumerate().all(|(k, c)| {
        if k == d {
            *c == crate::exactnum::rat_int(1)
        } else {
            c.is_zero()
        }
    });
    if monomial_ok {
        Some(d.trailing_zeros())
    } else {
        None
    }
}

/// Exact image cardinality |{f(a) : f in F, a in A}|.
///
/// Rational sets are evaluated directly. Tower sets are supported when every
/// family member is a monomial x^(2^j); then f(2^(2^e)) = 2^(2^(e+j)) and the
/// count runs on tower exponents alone, far beyond big-integer reach.
pub fn image_size(family: &PolyFamily, a: &FiniteSet) -> Result<u64, ExpansionError> {
    match a.kind() {
        ElementKind::Rational => {
            let points = a.rationals()?;
            let per_member: Vec<Vec<BigRat>> = family
                .members()
                .par_iter()
                .map(|f| points.iter().map(|p| f.eval(p)).collect())
                .collect();
            let mut values: HashSet<BigRat> = HashSet::new();
            for chunk in per_member {
                values.extend(chunk);
            }
            Ok(values.len() as u64)
        }
        ElementKind::Tower => {
            let mut shifts = Vec::with_capacity(family.len());
            for (i, f) in family.members().iter().enumerate() {
                shifts.push(power_of_two_exponent(f).ok_or(ExpansionError::NotMonomialPower(i))?);
            }
            let towers = a.towers()?;
            let values: HashSet<TowerInt> = towers
                .iter()
                .flat_map(|t| shifts.iter().map(move |j| t.tower_pow(*j)))
                .collect();
            Ok(values.len() as u64)
        }
        ElementKind::Vector => Err(ExpansionError::UnsupportedKind {
            kind: ElementKind::Vector,
            operation: "image_size",
        }),
    }
}

/// Exact image cardinality |{f(a, b_0, ..., b_{m-1})}| for a multivariate
/// polynomial over rational sets.
pub fn image_size_multi(
    f: &MultiPoly,
    a: &FiniteSet,
    bs: &[&FiniteSet],
) -> Result<u64, ExpansionError> {
    if f.arity() != 1 + bs.len() {
        return Err(ExpansionError::ArityMismatch {
            poly: f.arity(),
            supplied: 1 + bs.len(),
        });
    }
    let a_pts = a.rationals()?;
    let b_pts: Vec<Vec<&BigRat>> = bs.iter().map(|b| b.rationals()).collect::<Result<_, _>>()?;
    if a_pts.is_empty() || b_pts.iter().any(|v| v.is_empty()) {
        return Ok(0);
    }
    let per_a: Vec<Vec<BigRat>> = a_pts
        .par_iter()
        .map(|&av| {
            let mut out = Vec::new();
            let mut idx = vec![0usize; b_pts.len()];
            let mut point: Vec<BigRat> = Vec::with_capacity(f.arity());
            loop {
                point.clear();
                point.push(av.clone());
                for (k, &i) in idx.iter().enumerate() {
                    point.push(b_pts[k][i].clone());
                }
                out.push(f.eval(&point).expect("arity checked"));
                // Odometer over the b-coordinates.
                let mut c = 0;
                loop {
                    if c == idx.len() {
                        return out;
                    }
                    idx[c] += 1;
                    if idx[c] < b_pts[c].len() {
                        break;
                    }
                    idx[c] = 0;
                    c += 1;
                }
            }
        })
        .collect();
    let mut values: HashSet<BigRat> = HashSet::new();
    for chunk in per_a {
        values.extend(chunk);
    }
    Ok(values.len() as u64)
}

/// Exact incidence count |U ∩ (A×D×B)|: triples (a, d, b) with F(a,d,b) = 0
/// in implicit mode, or b = f(a,d) in graph mode. Graph mode indexes B once
/// and streams (a, d) in O(|A||D|).
pub fn incidence_surface(
    u: &SurfaceSpec,
    a: &FiniteSet,
    d: &FiniteSet,
    b: &FiniteSet,
) -> Result<u64, ExpansionError> {
    let a_pts = a.rationals()?;
    let d_pts = d.rationals()?;
    let b_pts = b.rationals()?;
    match u {
        SurfaceSpec::Graph(f) => {
            let b_index: HashSet<&BigRat> = b_pts.iter().copied().collect();
            let count = a_pts
                .par_iter()
                .map(|&av| {
                    d_pts
                        .iter()
                        .filter(|&&dv| {
                            let val = f.eval(&[av.clone(), dv.clone()]).expect("graph arity 2");
                            b_index.contains(&val)
                        })
                        .count() as u64
                })
                .sum();
            Ok(count)
        }
        SurfaceSpec::Implicit(big_f) => {
            let count = a_pts
                .par_iter()
                .map(|&av| {
                    let mut local = 0u64;
                    for &dv in &d_pts {
                        for &bv in &b_pts {
                            let val = big_f
                                .eval(&[av.clone(), dv.clone(), bv.clone()])
                                .expect("implicit arity 3");
                            if val.is_zero() {
                                local += 1;
                            }
                        }
                    }
                    local
                })
                .sum();
            Ok(count)
        }
    }
}

/// Coarse dimension at scale `xi`: log(size)/log(xi). Zero exactly when
/// `size == 1`.
pub fn coarse_dim(size: u128, xi: f64) -> Result<CoarseDim, ExpansionError> {
    if size == 0 {
        return Err(ExpansionError::ZeroSize);
    }
    if !(xi.is_finite() && xi > 1.0) {
        return Err(ExpansionError::BadScale);
    }
    Ok(CoarseDim {
        value: (size as f64).ln() / xi.ln(),
        scale: xi,
        size,
    })
}

/// Least-squares fit of log(m) against log(n); `slope` is the empirical
/// growth exponent 1 + eta.
pub fn fit_exponent(points: &[(u64, u64)]) -> Result<ExponentFit, ExpansionError> {
    if points.len() < 2 {
        return Err(ExpansionError::TooFewPoints);
    }
    let mut seen = HashSet::new();
    for &(n, m) in points {
        if n == 0 || m == 0 {
            return Err(ExpansionError::NonpositivePoint);
        }
        if !seen.insert(n) {
            return Err(ExpansionError::RepeatedAbscissa(n));
        }
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, m)| ((n as f64).ln(), (m as f64).ln()))
        .collect();
    let len = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual: f64 = logs
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        points: points.to_vec(),
    })
}

/// The unbalanced expansion exponent m^(-2) * 2^(-c'/eps).
///
/// Panics when m = 0 or eps, c_prime are not positive finite reals; the CLI
/// validates configuration before reaching this point.
pub fn eta_unbalanced_er(m: u64, eps: f64, c_prime: f64) -> f64 {
    assert!(m >= 1, "m must be >= 1");
    assert!(eps.is_finite() && eps > 0.0, "eps must be > 0");
    assert!(c_prime.is_finite() && c_prime > 0.0, "c_prime must be > 0");
    (m as f64).powi(-2) * 2f64.powf(-c_prime / eps)
}

/// The one-dimensional incidence exponent (1 + 1/eps)^(-1) * 2^(7 - 4/(c*eps)).
///
/// Panics when eps or c lies outside (0, 1]; the CLI validates first.
pub fn eta0_main1d(eps: f64, c: f64) -> f64 {
    assert!(
        eps.is_finite() && eps > 0.0 && eps <= 1.0,
        "eps must be in (0,1]"
    );
    assert!(c.is_finite() && c > 0.0 && c <= 1.0, "c must be in (0,1]");
    (1.0 + 1.0 / eps).recip() * 2f64.powf(7.0 - 4.0 / (c * eps))
}

/// The supremum of admissible delta: min(gamma'/k, 2^(-ceil(2kr/(c*gamma)) - 2)).
pub fn delta_jz(p: &BoundParams) -> Result<f64, ExpansionError> {
    let positives = [
        ("gamma", p.gamma),
        ("gamma_prime", p.gamma_prime),
        ("r", p.r),
        ("c", p.c),
    ];
    for (name, v) in positives {
        if !(v.is_finite() && v > 0.0) {
            return Err(ExpansionError::InvalidParam(format!(
                "{name} must be a positive finite real, got {v}"
            )));
        }
    }
    if p.k == 0 {
        return Err(ExpansionError::InvalidParam("k must be >= 1".to_owned()));
    }
    let first = p.gamma_prime / p.k as f64;
    let raw = 2.0 * p.k as f64 * p.r / (p.c * p.gamma);
    let exponent = raw.ceil() + 2.0;
    // 2^(-e): exact for in-range integer e, flushing to 0 beyond f64 range.
    let second = if exponent > 1100.0 {
        0.0
    } else {
        2f64.powi(-(exponent as i32))
    };
    Ok(first.min(second))
}

/// The 1-dimensional general-position surrogate: the largest fiber
/// |{a in A : p(a) = v}| over all probes p and values v.
pub fn gp_statistic(a: &FiniteSet, probes: &[UniPoly]) -> Result<u64, ExpansionError> {
    if probes.is_empty() {
        return Err(ExpansionError::NoProbes);
    }
    if probes.iter().any(|p| p.is_constant()) {
        return Err(ExpansionError::DegenerateProbe);
    }
    let points = a.rationals()?;
    let mut max_fiber = 0u64;
    for probe in probes {
        let mut fibers: HashMap<BigRat, u64> = HashMap::new();
        for &p in &points {
            *fibers.entry(probe.eval(p)).or_insert(0) += 1;
        }
        if let Some(m) = fibers.values().max() {
            max_fiber = max_fiber.max(*m);
        }
    }
    Ok(max_fiber)
}
