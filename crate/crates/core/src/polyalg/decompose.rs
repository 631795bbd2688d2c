//! Univariate compositional decomposition over ℚ.
//!
//! `decompose_uni` finds every way to write `f = outer ∘ inner` with both
//! factors of degree ≥ 2, one representative per inner degree. In
//! characteristic zero the inner factor of a given degree is unique up to a
//! linear change of variable, so normalizing the inner to be monic with zero
//! constant term makes the representative canonical.
//!
//! The search per candidate degree is the classical two-step scheme: the top
//! coefficients of `f` pin down a unique monic inner candidate by a
//! triangular solve, and the candidate is validated by expanding `f` in its
//! `h`-adic digits, which must all be constants.

use crate::exactnum::{rat_int, BigRat};
use crate::polyalg::UniPoly;
use num_traits::Zero;

/// One two-factor split `f = outer ∘ inner`.
///
/// The inner factor is monic with zero constant term; `outer ∘ inner`
/// reproduces the decomposed polynomial exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub outer: UniPoly,
    pub inner: UniPoly,
}

/// The unique monic degree-`r` candidate `h` with `deg(F − h^m) < n − r`,
/// where `F` is monic of degree `n = r·m`. Coefficient `j` down from the top
/// of `F` depends on the unknowns `a_{r-1}, …, a_{r-j}` and is linear in
/// `a_{r-j}` with slope `m`, so the system solves top-down.
pub(crate) fn inner_candidate(f_monic: &UniPoly, r: usize, m: usize) -> UniPoly {
    let n = r * m;
    let mut coeffs = vec![BigRat::zero(); r + 1];
    coeffs[r] = rat_int(1);
    let m_rat = rat_int(m as i64);
    // hm tracks h^m for the current coefficients; a zero discrepancy leaves h
    // untouched, so the power is only recomputed after an actual update.
    let mut hm = UniPoly::from_coeffs(coeffs.clone()).pow(m as u32);
    for j in 1..=r {
        let discrepancy = f_monic.coeff(n - j) - hm.coeff(n - j);
        if !discrepancy.is_zero() {
            coeffs[r - j] = discrepancy / &m_rat;
            hm = UniPoly::from_coeffs(coeffs.clone()).pow(m as u32);
        }
    }
    UniPoly::from_coeffs(coeffs)
}

/// Digits of `f` base `h`: the unique expansion `f = Σ d_k·h^k` with
/// `deg d_k < deg h`, obtained by repeated division. When `h` is the monic
/// monomial `x^d` the digits are literal coefficient chunks, which keeps the
/// expansion linear for the pure-power inputs where the division chain would
/// be quadratic.
pub(crate) fn h_adic_digits(f: &UniPoly, h: &UniPoly) -> Vec<UniPoly> {
    let d = h.degree().filter(|&d| d > 0).expect("nonconstant divisor");
    if num_traits::One::is_one(&h.leading_coeff()) && h.coeffs()[..d].iter().all(|c| c.is_zero()) {
        let mut digits: Vec<UniPoly> = f
            .coeffs()
            .chunks(d)
            .map(|chunk| UniPoly::from_coeffs(chunk.to_vec()))
            .collect();
        if digits.is_empty() {
            digits.push(UniPoly::zero());
        }
        return digits;
    }
    let mut digits = Vec::new();
    let mut q = f.clone();
    while !q.is_zero() {
        let (next, rem) = q.divmod(h).expect("nonconstant divisor");
        digits.push(rem);
        q = next;
    }
    if digits.is_empty() {
        digits.push(UniPoly::zero());
    }
    digits
}

/// Splits `f` at inner degree `r` if possible: the outer part exists iff all
/// `h`-adic digits of `f` by the unique inner candidate are constants. The
/// returned inner is monic with zero constant term. Inner degrees 1 and
/// `deg f` always succeed (trivial splits); callers choose whether to keep
/// them.
pub(crate) fn split_at(f: &UniPoly, r: usize) -> Option<Decomposition> {
    let n = f.degree()?;
    if r == 0 || n == 0 || n % r != 0 {
        return None;
    }
    let m = n / r;
    let lc = f.leading_coeff();
    let f_monic = f.monic();
    let candidate = inner_candidate(&f_monic, r, m);
    let digits = h_adic_digits(&f_monic, &candidate);
    if digits.len() != m + 1 || digits.iter().any(|d| !d.is_constant()) {
        return None;
    }
    let outer_monic = UniPoly::from_coeffs(digits.iter().map(|d| d.coeff(0)).collect());
    // Shift the candidate's constant term into the outer factor and undo the
    // monic scaling of f: f = lc·(outer_monic ∘ candidate) and
    // candidate = inner + c, so f = (lc·outer_monic(t + c)) ∘ inner.
    let c = candidate.coeff(0);
    let inner = candidate.sub(&UniPoly::constant(c.clone()));
    let outer = outer_monic.shift_arg(&c).scale(&lc);
    debug_assert_eq!(outer.compose(&inner), *f);
    Some(Decomposition { outer, inner })
}

/// All proper two-factor decompositions of `f` (both factors of degree ≥ 2),
/// one representative per inner degree, sorted by inner degree descending.
/// Inputs of degree ≤ 1 have no proper split and return an empty list.
pub fn decompose_uni(f: &UniPoly) -> Vec<Decomposition> {
    let n = match f.degree() {
        Some(n) if n >= 4 => n,
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    for r in (2..=n / 2).rev() {
        if n % r == 0 {
            if let Some(d) = split_at(f, r) {
                out.push(d);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    #[test]
    fn biquadratic_splits_once() {
        // x⁴ + 2x² + 1 = (t² + 2t + 1) ∘ x²
        let f = UniPoly::from_ints(&[1, 0, 2, 0, 1]);
        let ds = decompose_uni(&f);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].inner, UniPoly::from_ints(&[0, 0, 1]));
        assert_eq!(ds[0].outer, UniPoly::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn monomial_splits_by_exponent() {
        // x⁶ splits through x³ and x², inner degree descending.
        let f = UniPoly::monomial(rat_int(1), 6);
        let ds = decompose_uni(&f);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0].inner, UniPoly::monomial(rat_int(1), 3));
        assert_eq!(ds[0].outer, UniPoly::monomial(rat_int(1), 2));
        assert_eq!(ds[1].inner, UniPoly::monomial(rat_int(1), 2));
        assert_eq!(ds[1].outer, UniPoly::monomial(rat_int(1), 3));
    }

    #[test]
    fn prime_degree_is_indecomposable() {
        // x⁵ + x: degree 5 admits no proper split.
        let f = UniPoly::from_ints(&[0, 1, 0, 0, 0, 1]);
        assert!(decompose_uni(&f).is_empty());
        assert!(decompose_uni(&UniPoly::x()).is_empty());
        assert!(decompose_uni(&UniPoly::constant(rat_int(3))).is_empty());
        assert!(decompose_uni(&UniPoly::zero()).is_empty());
    }

    #[test]
    fn normalization_is_linear_invariant() {
        // Composing through x² + 3x − 1 and through its monic zero-constant
        // form must yield the same inner representative.
        let g = UniPoly::from_ints(&[2, -1, 1]);
        let h = UniPoly::from_ints(&[-1, 3, 1]);
        let f = g.compose(&h);
        let ds = decompose_uni(&f);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].inner, UniPoly::from_ints(&[0, 3, 1]));
        assert_eq!(ds[0].outer.compose(&ds[0].inner), f);
    }

    #[test]
    fn rational_coefficients_and_nonmonic_outer() {
        // f = (3t² + 1/2) ∘ (x³ − 2x). The composition is even in x, so f
        // also splits through x²; the constructed split must come back
        // verbatim and the extra one must recompose.
        let g = UniPoly::from_coeffs(vec![rat(1, 2), rat(0, 1), rat(3, 1)]);
        let h = UniPoly::from_ints(&[0, -2, 0, 1]);
        let f = g.compose(&h);
        let ds = decompose_uni(&f);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0].inner, h);
        assert_eq!(ds[0].outer, g);
        assert_eq!(ds[1].inner, UniPoly::from_ints(&[0, 0, 1]));
        assert_eq!(ds[1].outer.compose(&ds[1].inner), f);
    }

    #[test]
    fn degree_eight_finds_nested_splits() {
        // f = ((x²+1)²)² decomposes at inner degrees 4 and 2.
        let h = UniPoly::from_ints(&[1, 0, 1]);
        let f = h.pow(2).pow(2);
        let ds = decompose_uni(&f);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0].inner.degree(), Some(4));
        assert_eq!(ds[1].inner.degree(), Some(2));
        for d in &ds {
            assert_eq!(d.outer.compose(&d.inner), f);
            assert_eq!(d.inner.coeff(0), rat_int(0));
            assert_eq!(d.inner.leading_coeff(), rat_int(1));
        }
    }

    fn arb_poly(min_deg: usize, max_deg: usize) -> impl Strategy<Value = UniPoly> {
        (min_deg..=max_deg).prop_flat_map(|d| {
            (
                proptest::collection::vec(-9i64..=9, d),
                prop_oneof![1i64..=9, -9i64..=-1],
            )
                .prop_map(move |(mut lower, lead)| {
                    lower.push(lead);
                    UniPoly::from_ints(&lower)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_round_trip(g in arb_poly(2, 5), h in arb_poly(2, 5)) {
            let f = g.compose(&h);
            let ds = decompose_uni(&f);
            let hit = ds.iter().any(|d| {
                d.inner.degree() == h.degree() && d.outer.compose(&d.inner) == f
            });
            prop_assert!(hit, "no split recovered for {} ∘ {}", g, h);
        }

        #[test]
        fn prop_all_outputs_recompose_and_normalize(f in arb_poly(4, 12)) {
            for d in decompose_uni(&f) {
                prop_assert_eq!(d.outer.compose(&d.inner), f.clone());
                prop_assert_eq!(d.inner.leading_coeff(), rat_int(1));
                prop_assert_eq!(d.inner.coeff(0), rat_int(0));
                let (dg, dh) = (d.outer.degree().unwrap(), d.inner.degree().unwrap());
                prop_assert!(dg >= 2 && dh >= 2);
            }
        }
    }
}
