//! Dense univariate polynomials over exact rationals.

use crate::exactnum::{rat_int, BigRat};
use crate::polyalg::multipoly::MultiPoly;
use crate::polyalg::PolyError;
use num_traits::{One, Zero};
use std::fmt;

/// A univariate polynomial with exact rational coefficients, stored
/// densely from the constant term up. The coefficient vector never ends
/// in a zero, so the zero polynomial is the empty vector and equality is
/// structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UniPoly {
    coeffs: Vec<BigRat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRat) -> Self {
        UniPoly::from_coeffs(vec![c])
    }

    /// The identity polynomial x.
    pub fn x() -> Self {
        UniPoly::from_coeffs(vec![rat_int(0), rat_int(1)])
    }

    /// c * x^k.
    pub fn monomial(c: BigRat, k: usize) -> Self {
        let mut coeffs = vec![BigRat::zero(); k + 1];
        coeffs[k] = c;
        UniPoly::from_coeffs(coeffs)
    }

    /// Builds a polynomial from constant-first coefficients, trimming
    /// trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// Convenience constructor from machine integers, constant first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigRat {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRat::zero)
    }

    /// Constant-first coefficient view without trailing zeros.
    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading_coeff(&self) -> BigRat {
        self.coeffs.last().cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        UniPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigRat) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }

    pub fn pow(&self, mut n: u32) -> UniPoly {
        let mut base = self.clone();
        let mut acc = UniPoly::constant(rat_int(1));
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

    /// Horner evaluation at an exact rational point.
    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// The composition self(inner). Zero coefficients of the outer
    /// polynomial are skipped and the running power of `inner` advances by
    /// binary exponentiation across the gaps, so sparse outers (pure powers
    /// in particular) compose in O(log deg) multiplications.
    pub fn compose(&self, inner: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero();
        let mut cur = UniPoly::constant(rat_int(1));
        let mut cur_exp = 0usize;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k > cur_exp {
                cur = cur.mul(&inner.pow((k - cur_exp) as u32));
                cur_exp = k;
            }
            acc = acc.add(&cur.scale(c));
        }
        acc
    }

    /// Exact division with remainder: `self = q * div + r`, deg r < deg div.
    pub fn divmod(&self, div: &UniPoly) -> Result<(UniPoly, UniPoly), PolyError> {
        let d = div.degree().ok_or(PolyError::DivisionByZero)?;
        let lc = div.leading_coeff();
        let mut rem = self.coeffs.clone();
        let mut quo: Vec<BigRat> = Vec::new();
        while rem.len() > d {
            let k = rem.len() - 1 - d;
            let factor = rem.last().unwrap() / &lc;
            if quo.len() < k + 1 {
                quo.resize(k + 1, BigRat::zero());
            }
            for i in 0..=d {
                let delta = &factor * &div.coeffs[i];
                rem[k + i] -= delta;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
            quo[k] = factor;
            while rem.last().is_some_and(|c| c.is_zero()) && rem.len() > d {
                rem.pop();
            }
        }
        Ok((UniPoly::from_coeffs(quo), UniPoly::from_coeffs(rem)))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let out = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c * rat_int(i as i64 + 1))
            .collect();
        UniPoly::from_coeffs(out)
    }

    /// The translate self(x + a).
    pub fn shift_arg(&self, a: &BigRat) -> UniPoly {
        if a.is_zero() {
            return self.clone();
        }
        let inner = UniPoly::from_coeffs(vec![a.clone(), rat_int(1)]);
        self.compose(&inner)
    }

    /// The dilate self(a * x).
    pub fn scale_arg(&self, a: &BigRat) -> UniPoly {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut p = BigRat::one();
        for c in &self.coeffs {
            out.push(c * &p);
            p *= a;
        }
        UniPoly::from_coeffs(out)
    }

    /// Monic rescaling (divides by the leading coefficient). Zero stays
    /// zero.
    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let lc = self.leading_coeff();
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c / &lc).collect(),
        }
    }

    /// Embeds the polynomial into `arity` variables as a polynomial in
    /// variable `var`.
    pub fn to_multi(&self, arity: usize, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(arity);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut exps = vec![0u32; arity];
                exps[var] = k as u32;
                out.add_term(exps, c.clone());
            }
        }
        out
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_multi(1, 0).display_with(&["x"]))
    }
}
