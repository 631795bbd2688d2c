//! Detection of additive and multiplicative composite forms.
//!
//! `detect_addmul` decides whether `f(x, ȳ)` can be written as
//! `g(h(x) + s(ȳ))` (additive) or `g(h(x)·s(ȳ))` (multiplicative) with `g`,
//! `h` univariate and `s` a polynomial in the `ȳ` block alone, and returns an
//! exact witness when one exists. Additive forms are preferred when both
//! exist.
//!
//! The search is deterministic. For each candidate outer degree γ (a divisor
//! of both deg_x f and deg_ȳ f) the witness components are pinned down by
//! exact coefficient extractions — `h` from a triangular solve on the top
//! coefficients of `f(x, 0̄)` (additive) or a γ-th root of a coefficient
//! slice (multiplicative), `s` from the penultimate `h`-adic digit resp. a
//! γ-th root of the leading x-coefficient, and `g` by descending
//! elimination — and the candidate is accepted only if symbolic
//! recomposition reproduces `f` coefficient for coefficient. Uniqueness of
//! the normalized witness makes this complete: if a form exists, the
//! extractions find it.

use crate::exactnum::{rat_int, BigRat};
use crate::polyalg::decompose::inner_candidate;
use crate::polyalg::{CompositeKind, MultiPoly, PolyError, UniPoly};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Outcome of composite-form detection. In a witness, `s` is carried in the
/// same arity as the input with the `x` slot unused, so recomposition is
/// plain arithmetic in the input's ring.
#[derive(Debug, Clone, PartialEq)]
pub enum AddMulForm {
    /// `f = g(h(x) + s(ȳ))` with `h` monic, `h(0) = 0`, and `s(0̄) = 0`.
    Additive {
        g: UniPoly,
        h: UniPoly,
        s: MultiPoly,
    },
    /// `f = g(h(x)·s(ȳ))` with `h` monic and the graded-lex leading
    /// coefficient of `s` equal to 1. `h(0)` is free: no multiplicative
    /// rescaling can clear it.
    Multiplicative {
        g: UniPoly,
        h: UniPoly,
        s: MultiPoly,
    },
    /// Neither form exists.
    None,
}

impl AddMulForm {
    pub fn kind(&self) -> Option<CompositeKind> {
        match self {
            AddMulForm::Additive { .. } => Some(CompositeKind::Additive),
            AddMulForm::Multiplicative { .. } => Some(CompositeKind::Multiplicative),
            AddMulForm::None => None,
        }
    }

    /// Rebuilds the detected form symbolically; `None` for the none verdict.
    pub fn recompose(&self) -> Option<MultiPoly> {
        match self {
            AddMulForm::Additive { g, h, s } => {
                let w = h.to_multi(s.arity(), 0).add(s);
                Some(compose_outer(g, &w))
            }
            AddMulForm::Multiplicative { g, h, s } => {
                let w = h.to_multi(s.arity(), 0).mul(s);
                Some(compose_outer(g, &w))
            }
            AddMulForm::None => None,
        }
    }
}

/// Evaluates the univariate `g` at a multivariate argument by Horner's rule.
pub(crate) fn compose_outer(g: &UniPoly, w: &MultiPoly) -> MultiPoly {
    let arity = w.arity();
    let n = match g.degree() {
        Some(n) => n,
        None => return MultiPoly::zero(arity),
    };
    let mut acc = MultiPoly::constant(arity, g.coeff(n));
    for k in (0..n).rev() {
        acc = acc.mul(w);
        let c = g.coeff(k);
        if !c.is_zero() {
            acc = acc.add(&MultiPoly::constant(arity, c));
        }
    }
    acc
}

/// Long division in `x` over ℚ[ȳ] by a monic nonconstant univariate divisor.
fn divmod_in_x(f: &MultiPoly, h: &UniPoly) -> (MultiPoly, MultiPoly) {
    let arity = f.arity();
    let delta = h.degree().expect("nonconstant divisor");
    debug_assert!(h.leading_coeff().is_one());
    let mut slices = f.coeffs_in(0);
    if slices.len() <= delta {
        return (MultiPoly::zero(arity), f.clone());
    }
    let mut quot = vec![MultiPoly::zero(arity); slices.len() - delta];
    for e in (delta..slices.len()).rev() {
        let factor = std::mem::replace(&mut slices[e], MultiPoly::zero(arity));
        if factor.is_zero() {
            continue;
        }
        for (i, c) in h.coeffs().iter().enumerate().take(delta) {
            if !c.is_zero() {
                slices[e - delta + i] = slices[e - delta + i].sub(&factor.scale(c));
            }
        }
        quot[e - delta] = factor;
    }
    (
        MultiPoly::from_coeffs_in(arity, 0, &quot),
        MultiPoly::from_coeffs_in(arity, 0, &slices[..delta]),
    )
}

/// Digits of `f` base `h(x)`: `f = Σ d_k(x, ȳ)·h(x)^k` with `deg_x d_k < deg h`.
fn digits_in_x(f: &MultiPoly, h: &UniPoly) -> Vec<MultiPoly> {
    let mut digits = Vec::new();
    let mut q = f.clone();
    while !q.is_zero() {
        let (next, rem) = divmod_in_x(&q, h);
        digits.push(rem);
        q = next;
    }
    if digits.is_empty() {
        digits.push(MultiPoly::zero(f.arity()));
    }
    digits
}

/// Graded-lex comparison with earlier variables more significant, matching
/// [`MultiPoly::grlex_lead`].
fn grlex_less(a: &[u32], b: &[u32]) -> bool {
    let ta: u64 = a.iter().map(|&k| k as u64).sum();
    let tb: u64 = b.iter().map(|&k| k as u64).sum();
    (ta, a) < (tb, b)
}

/// Exact γ-th root of a polynomial whose graded-lex leading coefficient is 1.
/// Terms of the root are recovered one at a time in descending graded-lex
/// order: the coefficient of lead(s)^{γ−1}·μ in s^γ is linear in the unknown
/// coefficient at μ with slope γ, so each remainder's leading term determines
/// the next root term. Returns `None` when no polynomial root exists.
pub(crate) fn grlex_root(p: &MultiPoly, gamma: u32) -> Option<MultiPoly> {
    debug_assert!(gamma >= 1);
    let (lead, lead_c) = p.grlex_lead()?;
    if !lead_c.is_one() || lead.iter().any(|&e| e % gamma != 0) {
        return None;
    }
    let mu0: Vec<u32> = lead.iter().map(|&e| e / gamma).collect();
    let sigma: u64 = mu0.iter().map(|&k| k as u64).sum();
    let gamma_rat = rat_int(gamma as i64);
    let mut s = MultiPoly::zero(p.arity());
    s.add_term(mu0.clone(), rat_int(1));
    let mut last = mu0.clone();
    loop {
        let r = p.sub(&s.pow(gamma));
        if r.is_zero() {
            return Some(s);
        }
        let (re, rc) = r.grlex_lead().expect("nonzero");
        let mut mu = Vec::with_capacity(re.len());
        for (e, &m0) in re.iter().zip(&mu0) {
            mu.push(e.checked_sub(m0 * (gamma - 1))?);
        }
        let total: u64 = mu.iter().map(|&k| k as u64).sum();
        if total > sigma || !grlex_less(&mu, &last) {
            return None;
        }
        s.add_term(mu.clone(), rc / &gamma_rat);
        last = mu;
    }
}

/// Try `f = g(h(x) + s(ȳ))` with `deg g = gamma`, `deg h = delta`. The
/// leading x-coefficient of `f` must already be a constant.
fn try_additive(f: &MultiPoly, gamma: usize, delta: usize) -> Option<AddMulForm> {
    let arity = f.arity();
    // h from the restriction ȳ = 0̄: there f = g(h(x)), and the normalized
    // inner factor at degree delta is unique.
    let f0 = UniPoly::from_coeffs(
        f.coeffs_in(0)
            .iter()
            .map(|slice| slice.constant_term())
            .collect(),
    );
    if f0.degree() != Some(gamma * delta) {
        return None;
    }
    let candidate = inner_candidate(&f0.monic(), delta, gamma);
    let h = candidate.sub(&UniPoly::constant(candidate.coeff(0)));

    let digits = digits_in_x(f, &h);
    if digits.len() != gamma + 1 || digits.iter().any(|d| d.degree_in(0) > 0) {
        return None;
    }
    if !digits[gamma].is_constant() {
        return None;
    }
    let g_top = digits[gamma].constant_term();
    // Digit γ−1 is g_{γ−1} + γ·g_γ·s with s(0̄) = 0.
    let d1 = &digits[gamma - 1];
    let s = d1
        .sub(&MultiPoly::constant(arity, d1.constant_term()))
        .scale(&(rat_int(1) / (rat_int(gamma as i64) * &g_top)));
    // With s(0̄) = 0 every digit evaluates to its g-coefficient at ȳ = 0̄.
    let g = UniPoly::from_coeffs(digits.iter().map(|d| d.constant_term()).collect());

    let w = h.to_multi(arity, 0).add(&s);
    if compose_outer(&g, &w) == *f {
        Some(AddMulForm::Additive { g, h, s })
    } else {
        None
    }
}

/// Try `f = g(h(x)·s(ȳ))` with `deg g = gamma`, `deg h = delta`,
/// `deg s = sigma`.
fn try_multiplicative(
    f: &MultiPoly,
    gamma: usize,
    delta: usize,
    sigma: usize,
) -> Option<AddMulForm> {
    let arity = f.arity();
    let dx = gamma * delta;
    let slices = f.coeffs_in(0);
    // The x^{γδ} slice must be g_γ·s^γ.
    let l = slices.get(dx)?.clone();
    if l.block_degree(1..arity) != gamma * sigma {
        return None;
    }
    let (_, g_top) = l.grlex_lead()?;
    let s = grlex_root(&l.scale(&(rat_int(1) / &g_top)), gamma as u32)?;
    let mu0 = s.grlex_lead().expect("nonzero").0;

    // The coefficient of the ȳ-monomial γ·μ₀ across all of f is g_γ·h^γ:
    // only the k = γ term of Σ g_k h^k s^k reaches that ȳ-degree.
    let mut target: Vec<u32> = Vec::with_capacity(arity);
    for &e in &mu0 {
        target.push(e.checked_mul(gamma as u32)?);
    }
    let mut q_coeffs = Vec::with_capacity(dx + 1);
    for e in 0..=dx {
        let mut exps = target.clone();
        exps[0] = e as u32;
        q_coeffs.push(f.coeff(&exps) / &g_top);
    }
    let q = UniPoly::from_coeffs(q_coeffs);
    if q.degree() != Some(dx) {
        return None;
    }
    let h = grlex_root(&q.to_multi(1, 0), gamma as u32)?.restrict_to(0);

    // Descending elimination: at stage k the coefficient of x^{kδ}·ȳ^{kμ₀}
    // in the remainder is exactly g_k; ending at zero proves the form.
    let base = h.to_multi(arity, 0).mul(&s);
    let mut powers = vec![MultiPoly::constant(arity, rat_int(1))];
    for k in 1..=gamma {
        powers.push(powers[k - 1].mul(&base));
    }
    let mut r = f.clone();
    let mut g_coeffs = vec![BigRat::zero(); gamma + 1];
    for k in (0..=gamma).rev() {
        let mut exps: Vec<u32> = mu0.iter().map(|&e| e * k as u32).collect();
        exps[0] = (k * delta) as u32;
        let ck = r.coeff(&exps);
        if !ck.is_zero() {
            r = r.sub(&powers[k].scale(&ck));
            g_coeffs[k] = ck;
        }
    }
    if !r.is_zero() {
        return None;
    }
    let g = UniPoly::from_coeffs(g_coeffs);
    debug_assert_eq!(g.degree(), Some(gamma));
    Some(AddMulForm::Multiplicative { g, h, s })
}

/// Decides whether `f(x, ȳ)` is additive (`g(h(x)+s(ȳ))`) or multiplicative
/// (`g(h(x)·s(ȳ))`) and returns an exact normalized witness. Inputs constant
/// in `x` or in the `ȳ` block are rejected as degenerate. When both forms
/// exist the additive witness is returned.
pub fn detect_addmul(f: &MultiPoly) -> Result<AddMulForm, PolyError> {
    let arity = f.arity();
    if arity < 2 {
        return Err(PolyError::Degenerate(
            "detection needs at least one y variable".to_string(),
        ));
    }
    let dx = f.degree_in(0);
    let dy = f.block_degree(1..arity);
    if dx == 0 {
        return Err(PolyError::Degenerate("f is constant in x".to_string()));
    }
    if dy == 0 {
        return Err(PolyError::Degenerate("f is constant in ȳ".to_string()));
    }

    let mut gammas: Vec<usize> = (1..=dx.gcd(&dy))
        .filter(|g| dx.is_multiple_of(*g) && dy.is_multiple_of(*g))
        .collect();
    gammas.reverse();

    // Any additive form makes the leading x-coefficient the constant g_γ.
    let lc_x = &f.coeffs_in(0)[dx];
    if lc_x.is_constant() {
        for &gamma in &gammas {
            if let Some(form) = try_additive(f, gamma, dx / gamma) {
                return Ok(form);
            }
        }
    }
    for &gamma in &gammas {
        if let Some(form) = try_multiplicative(f, gamma, dx / gamma, dy / gamma) {
            return Ok(form);
        }
    }
    Ok(AddMulForm::None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::polyalg::parse_poly;
    use proptest::prelude::*;

    fn detect_text(text: &str, arity: usize) -> AddMulForm {
        detect_addmul(&parse_poly(text, arity).unwrap()).unwrap()
    }

    #[test]
    fn product_is_multiplicative_with_identity_outer() {
        match detect_text("x*y0", 2) {
            AddMulForm::Multiplicative { g, h, s } => {
                assert_eq!(g, UniPoly::x());
                assert_eq!(h, UniPoly::x());
                assert_eq!(s, parse_poly("y0", 2).unwrap());
            }
            other => panic!("expected multiplicative, got {:?}", other),
        }
    }

    #[test]
    fn shifted_cube_is_additive() {
        // (x + y0²)³ + 1 = g(h + s) with g = t³+1, h = x, s = y0².
        let f = parse_poly("(x + y0^2)^3 + 1", 2).unwrap();
        match detect_addmul(&f).unwrap() {
            AddMulForm::Additive { g, h, s } => {
                assert_eq!(g, UniPoly::from_ints(&[1, 0, 0, 1]));
                assert_eq!(h, UniPoly::x());
                assert_eq!(s, parse_poly("y0^2", 2).unwrap());
            }
            other => panic!("expected additive, got {:?}", other),
        }
    }

    #[test]
    fn symmetric_quadratic_is_neither() {
        assert_eq!(detect_text("x^2 + x*y0 + y0^2", 2), AddMulForm::None);
    }

    #[test]
    fn nonzero_constant_in_h_is_allowed_multiplicatively() {
        // (x+1)·y0 has no additive form, and its multiplicative h = x + 1
        // cannot be rescaled to zero constant term.
        match detect_text("(x + 1)*y0", 2) {
            AddMulForm::Multiplicative { g, h, s } => {
                assert_eq!(g, UniPoly::x());
                assert_eq!(h, UniPoly::from_ints(&[1, 1]));
                assert_eq!(s, parse_poly("y0", 2).unwrap());
            }
            other => panic!("expected multiplicative, got {:?}", other),
        }
        // A constant term on the outer factor is also recovered.
        match detect_text("x*y0 + 1", 2) {
            AddMulForm::Multiplicative { g, .. } => {
                assert_eq!(g, UniPoly::from_ints(&[1, 1]));
            }
            other => panic!("expected multiplicative, got {:?}", other),
        }
    }

    #[test]
    fn multivariate_additive_witness_is_normalized() {
        // g = t² + 5t + 7, h = x² + 3x, s = y0 + 2y1².
        let g = UniPoly::from_ints(&[7, 5, 1]);
        let h = UniPoly::from_ints(&[0, 3, 1]);
        let s = parse_poly("y0 + 2*y1^2", 3).unwrap();
        let f = compose_outer(&g, &h.to_multi(3, 0).add(&s));
        match detect_addmul(&f).unwrap() {
            AddMulForm::Additive {
                g: dg,
                h: dh,
                s: ds,
            } => {
                assert_eq!(dg, g);
                assert_eq!(dh, h);
                assert_eq!(ds, s);
            }
            other => panic!("expected additive, got {:?}", other),
        }
    }

    #[test]
    fn multivariate_multiplicative_witness_is_normalized() {
        // g = 2t² + t, h = x² + 1, s = y0·y1 + y0.
        let g = UniPoly::from_ints(&[0, 1, 2]);
        let h = UniPoly::from_ints(&[1, 0, 1]);
        let s = parse_poly("y0*y1 + y0", 3).unwrap();
        let f = compose_outer(&g, &h.to_multi(3, 0).mul(&s));
        match detect_addmul(&f).unwrap() {
            AddMulForm::Multiplicative {
                g: dg,
                h: dh,
                s: ds,
            } => {
                assert_eq!(dg, g);
                assert_eq!(dh, h);
                assert_eq!(ds, s);
            }
            other => panic!("expected multiplicative, got {:?}", other),
        }
    }

    #[test]
    fn degenerate_inputs_are_distinct_errors() {
        let in_x_only = parse_poly("x^2 + 1", 2).unwrap();
        assert!(matches!(
            detect_addmul(&in_x_only),
            Err(PolyError::Degenerate(_))
        ));
        let in_y_only = parse_poly("y0^2", 2).unwrap();
        assert!(matches!(
            detect_addmul(&in_y_only),
            Err(PolyError::Degenerate(_))
        ));
    }

    #[test]
    fn additive_preferred_over_multiplicative() {
        // (x + y0)² is additive; make sure the additive pass wins and the
        // witness recomposes.
        let f = parse_poly("(x + y0)^2", 2).unwrap();
        let form = detect_addmul(&f).unwrap();
        assert_eq!(form.kind(), Some(CompositeKind::Additive));
        assert_eq!(form.recompose().unwrap(), f);
    }

    #[test]
    fn scaled_forms_keep_exact_rational_witnesses() {
        // f = 3·(2x³ − x + 5·(y0² − y0))² − 1/2: additive after normalizing
        // the non-monic inner 2x³ − x.
        let g = UniPoly::from_coeffs(vec![rat(-1, 2), rat(0, 1), rat(3, 1)]);
        let inner = parse_poly("2*x^3 - x + 5*y0^2 - 5*y0", 2).unwrap();
        let f = compose_outer(&g, &inner);
        let form = detect_addmul(&f).unwrap();
        assert_eq!(form.kind(), Some(CompositeKind::Additive));
        match &form {
            AddMulForm::Additive { h, s, .. } => {
                assert_eq!(h.leading_coeff(), rat_int(1));
                assert_eq!(h.coeff(0), rat_int(0));
                assert_eq!(s.constant_term(), rat_int(0));
            }
            _ => unreachable!(),
        }
        assert_eq!(form.recompose().unwrap(), f);
    }

    #[test]
    fn root_extraction_handles_imperfect_powers() {
        let perfect = parse_poly("(x^2 + 2*x*y0 + 3)^3", 2).unwrap();
        let s = grlex_root(&perfect, 3).unwrap();
        assert_eq!(s, parse_poly("x^2 + 2*x*y0 + 3", 2).unwrap());
        let not_power = parse_poly("x^6 + y0", 2).unwrap();
        assert!(grlex_root(&not_power, 3).is_none());
        let wrong_lead = parse_poly("x^3 + x^2*y0^2", 2).unwrap();
        assert!(grlex_root(&wrong_lead, 3).is_none());
    }

    fn arb_uni(max_deg: usize) -> impl Strategy<Value = UniPoly> {
        (1..=max_deg).prop_flat_map(|d| {
            (
                proptest::collection::vec(-5i64..=5, d),
                prop_oneof![1i64..=5, -5i64..=-1],
            )
                .prop_map(move |(mut lower, lead)| {
                    lower.push(lead);
                    UniPoly::from_ints(&lower)
                })
        })
    }

    fn arb_s() -> impl Strategy<Value = MultiPoly> {
        // Nonconstant polynomial in y0 alone (arity 2), zero constant term.
        (
            1usize..=3,
            proptest::collection::vec(-5i64..=5, 3),
            1i64..=5,
        )
            .prop_map(|(d, lower, lead)| {
                let mut p = MultiPoly::zero(2);
                for (k, c) in lower.iter().take(d).enumerate() {
                    if k > 0 {
                        p.add_term(vec![0, k as u32], rat_int(*c));
                    }
                }
                p.add_term(vec![0, d as u32], rat_int(lead));
                p
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_additive_round_trip(g in arb_uni(3), h in arb_uni(3), s in arb_s()) {
            let f = compose_outer(&g, &h.to_multi(2, 0).add(&s));
            let form = detect_addmul(&f).unwrap();
            prop_assert_eq!(form.kind(), Some(CompositeKind::Additive));
            prop_assert_eq!(form.recompose().unwrap(), f);
        }

        #[test]
        fn prop_multiplicative_round_trip(g in arb_uni(3), h in arb_uni(3), s in arb_s()) {
            let f = compose_outer(&g, &h.to_multi(2, 0).mul(&s));
            let form = detect_addmul(&f).unwrap();
            prop_assert!(form.kind().is_some(), "missed a composite of {} through {}·s", g, h);
            prop_assert_eq!(form.recompose().unwrap(), f);
        }
    }
}
