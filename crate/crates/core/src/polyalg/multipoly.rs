//! Sparse multivariate polynomials over exact rationals.
//!
//! A polynomial of arity n maps exponent vectors of length n to nonzero
//! rational coefficients. Variable 0 plays the distinguished role of `x`
//! throughout this crate; variables 1..n form the `y` block (or the
//! distance variable `d` for surfaces).

use crate::exactnum::{rat_int, BigRat};
use crate::polyalg::unipoly::UniPoly;
use crate::polyalg::PolyError;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Sparse exact multivariate polynomial with a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, BigRat>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: BigRat) -> Self {
        let mut p = MultiPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    /// The single variable `var` as a polynomial.
    pub fn var(arity: usize, var: usize) -> Self {
        assert!(var < arity, "variable index out of range");
        let mut exps = vec![0u32; arity];
        exps[var] = 1;
        let mut p = MultiPoly::zero(arity);
        p.terms.insert(exps, rat_int(1));
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates `(exponents, coefficient)` pairs in the map's order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRat)> {
        self.terms.iter()
    }

    /// Adds `c * x^exps` in place, removing the term if it cancels.
    pub fn add_term(&mut self, exps: Vec<u32>, c: BigRat) {
        debug_assert_eq!(exps.len(), self.arity);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Coefficient of the exact monomial `exps`.
    pub fn coeff(&self, exps: &[u32]) -> BigRat {
        self.terms.get(exps).cloned().unwrap_or_else(BigRat::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigRat {
        self.coeff(&vec![0u32; self.arity])
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.arity);
        }
        MultiPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = MultiPoly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea
                    .iter()
                    .zip(eb)
                    .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                    .collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::constant(self.arity, rat_int(1));
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[BigRat]) -> Result<BigRat, PolyError> {
        if point.len() != self.arity {
            return Err(PolyError::ArityMismatch {
                expected: self.arity,
                found: point.len(),
            });
        }
        let mut acc = BigRat::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term *= &point[v];
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Degree in a single variable (zero for the zero polynomial).
    pub fn degree_in(&self, var: usize) -> usize {
        self.terms
            .keys()
            .map(|e| e[var] as usize)
            .max()
            .unwrap_or(0)
    }

    /// Maximal total degree over the variable block `vars..arity`.
    pub fn block_degree(&self, vars: std::ops::Range<usize>) -> usize {
        self.terms
            .keys()
            .map(|e| e[vars.clone()].iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Splits the polynomial by the power of variable `var`: entry k of
    /// the result is the coefficient of var^k, with that variable's
    /// exponent cleared.
    pub fn coeffs_in(&self, var: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(var);
        let mut out = vec![MultiPoly::zero(self.arity); d + 1];
        for (exps, c) in &self.terms {
            let k = exps[var] as usize;
            let mut e = exps.clone();
            e[var] = 0;
            out[k].add_term(e, c.clone());
        }
        out
    }

    /// Reassembles a polynomial from `coeffs_in(var)` slices.
    pub fn from_coeffs_in(arity: usize, var: usize, slices: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::zero(arity);
        for (k, slice) in slices.iter().enumerate() {
            for (exps, c) in &slice.terms {
                let mut e = exps.clone();
                e[var] += k as u32;
                out.add_term(e, c.clone());
            }
        }
        out
    }

    /// Substitutes zero for every variable except `var`, producing a
    /// univariate polynomial in that variable.
    pub fn restrict_to(&self, var: usize) -> UniPoly {
        let mut coeffs = vec![BigRat::zero(); self.degree_in(var) + 1];
        for (exps, c) in &self.terms {
            if exps.iter().enumerate().all(|(v, &e)| v == var || e == 0) {
                coeffs[exps[var] as usize] = c.clone();
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// True when only variable `var` occurs.
    pub fn is_univariate_in(&self, var: usize) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().enumerate().all(|(v, &k)| v == var || k == 0))
    }

    /// Converts to a dense univariate polynomial when only `var` occurs.
    pub fn to_uni(&self, var: usize) -> Result<UniPoly, PolyError> {
        if !self.is_univariate_in(var) {
            return Err(PolyError::Degenerate("polynomial is not univariate".into()));
        }
        Ok(self.restrict_to(var))
    }

    /// Graded-lexicographic leading term: maximal total degree, ties
    /// broken by lexicographically largest exponent vector (earlier
    /// variables weigh more). Returns `None` for the zero polynomial.
    pub fn grlex_lead(&self) -> Option<(Vec<u32>, BigRat)> {
        self.terms
            .iter()
            .max_by(|(ea, _), (eb, _)| {
                let ta: u32 = ea.iter().copied().sum();
                let tb: u32 = eb.iter().copied().sum();
                ta.cmp(&tb).then_with(|| ea.cmp(eb))
            })
            .map(|(e, c)| (e.clone(), c.clone()))
    }

    /// The top-degree form with respect to the variable block
    /// `vars..arity`: all terms whose block degree is maximal.
    pub fn block_top_form(&self, vars: std::ops::Range<usize>) -> MultiPoly {
        let top = self.block_degree(vars.clone());
        let mut out = MultiPoly::zero(self.arity);
        for (exps, c) in &self.terms {
            let d: usize = exps[vars.clone()].iter().map(|&k| k as usize).sum();
            if d == top {
                out.add_term(exps.clone(), c.clone());
            }
        }
        out
    }

    /// Renders the polynomial with the given variable names, terms in
    /// descending graded-lexicographic order. The output re-parses to an
    /// equal polynomial.
    pub fn display_with(&self, names: &[&str]) -> String {
        assert!(names.len() >= self.arity, "not enough variable names");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Vec<u32>, &BigRat)> = self.terms.iter().collect();
        terms.sort_by(|(ea, _), (eb, _)| {
            let ta: u32 = ea.iter().copied().sum();
            let tb: u32 = eb.iter().copied().sum();
            tb.cmp(&ta).then_with(|| eb.cmp(ea))
        });
        let mut out = String::new();
        for (i, (exps, c)) in terms.iter().enumerate() {
            let neg = c < &&BigRat::zero();
            let mag = if neg { -(*c).clone() } else { (*c).clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || exps.iter().all(|&k| k == 0) {
                factors.push(mag.to_string());
            }
            for (v, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].to_string()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl std::fmt::Display for MultiPoly {
    /// Default rendering with the standard variable names x, y0, y1, ….
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = std::iter::once("x".to_string())
            .chain((0..self.arity.saturating_sub(1)).map(|i| format!("y{}", i)))
            .collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.display_with(&refs))
    }
}
