//! Classification of polynomial families into translation and scaling
//! classes.
//!
//! Two members of a family belong to the same additive class when they
//! decompose through the same normalized inner polynomial with outer parts
//! that agree after a pre-translation `outer(t + a)`, and to the same
//! multiplicative class when the outers agree after a pre-scaling
//! `outer(a·t)`. A member can satisfy the relation through several inner
//! degrees at once, and those groupings need not be compatible, so
//! `classify_family` returns a partition built greedily: the largest
//! coherent class is extracted first, then the next largest among the
//! remaining members, and leftovers become singletons presented through
//! their smallest-degree inner factor.

use crate::exactnum::{rat_int, BigRat};
use crate::polyalg::decompose::split_at;
use crate::polyalg::{CompositeKind, PolyError, UniPoly};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::HashMap;

/// A finite family of nonconstant univariate polynomials with a uniform
/// degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFamily {
    members: Vec<UniPoly>,
    degree_bound: usize,
}

impl PolyFamily {
    /// Builds a family, rejecting empty input and constant members.
    pub fn new(members: Vec<UniPoly>) -> Result<Self, PolyError> {
        if members.is_empty() {
            return Err(PolyError::EmptyFamily);
        }
        let mut degree_bound = 0;
        for (index, f) in members.iter().enumerate() {
            match f.degree() {
                Some(d) if d >= 1 => degree_bound = degree_bound.max(d),
                _ => return Err(PolyError::ConstantMember { index }),
            }
        }
        Ok(PolyFamily {
            members,
            degree_bound,
        })
    }

    pub fn members(&self) -> &[UniPoly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty input
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }
}

/// One translation or scaling class: every member listed satisfies
/// `member = outer ∘ (inner + a)` (additive) or `member = outer ∘ (inner·a)`
/// (multiplicative) with its parameter `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyClass {
    pub kind: CompositeKind,
    pub inner: UniPoly,
    pub outer: UniPoly,
    pub members: Vec<(usize, BigRat)>,
}

impl FamilyClass {
    /// Rebuilds member `k` of this class from its certificate.
    pub fn recompose(&self, k: usize) -> UniPoly {
        let (_, a) = &self.members[k];
        let arg = match self.kind {
            CompositeKind::Additive => self.inner.add(&UniPoly::constant(a.clone())),
            CompositeKind::Multiplicative => self.inner.scale(a),
        };
        self.outer.compose(&arg)
    }
}

/// Verdict of the ε-structure test, with a largest class as witness when
/// either bound holds.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsVerdict {
    pub eps_additive: bool,
    pub eps_multiplicative: bool,
    pub witness: Option<FamilyClass>,
}

/// `x^e` for a signed exponent; `x` must be nonzero when `e < 0`. The
/// exponents seen here are Bézout coefficients bounded by the degree.
fn rat_pow_i(x: &BigRat, e: i64) -> BigRat {
    let mut mag = BigRat::one();
    for _ in 0..e.unsigned_abs() {
        mag *= x;
    }
    if e < 0 {
        mag.recip()
    } else {
        mag
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (d, u, v) = ext_gcd(b, a % b);
        (d, v, u - (a / b) * v)
    }
}

/// All rational ν with ν^n = x: zero, one, or two candidates.
fn rational_nth_roots(x: &BigRat, n: u32) -> Vec<BigRat> {
    if n == 1 {
        return vec![x.clone()];
    }
    if x.is_zero() {
        return vec![BigRat::zero()];
    }
    let (numer, denom) = (x.numer(), x.denom());
    if numer.is_negative() && n.is_multiple_of(2) {
        return Vec::new();
    }
    let a = numer.abs().nth_root(n);
    let b = denom.nth_root(n);
    if num_traits::pow(a.clone(), n as usize) != numer.abs()
        || num_traits::pow(b.clone(), n as usize) != *denom
    {
        return Vec::new();
    }
    let root = BigRat::new(a, b);
    if numer.is_negative() {
        vec![-root]
    } else if n.is_multiple_of(2) {
        vec![root.clone(), -root]
    } else {
        vec![root]
    }
}

/// Finds ν with `target(t) = base(ν·t)` when a rational one exists. The
/// support ratios pin down ν^g for g the gcd of the support exponents, and
/// each rational g-th root candidate is verified in full.
fn prescale_between(base: &UniPoly, target: &UniPoly) -> Option<BigRat> {
    let m = base.degree()?;
    if target.degree() != Some(m) {
        return None;
    }
    let support: Vec<usize> = (0..=m).filter(|&k| !base.coeff(k).is_zero()).collect();
    let target_support: Vec<usize> = (0..=m).filter(|&k| !target.coeff(k).is_zero()).collect();
    if support != target_support {
        return None;
    }
    let positive: Vec<usize> = support.iter().copied().filter(|&k| k > 0).collect();
    let mut g = positive[0] as i64;
    let mut rho = target.coeff(positive[0]) / base.coeff(positive[0]);
    for &k in &positive[1..] {
        let ratio = target.coeff(k) / base.coeff(k);
        let (d, u, v) = ext_gcd(g, k as i64);
        rho = rat_pow_i(&rho, u) * rat_pow_i(&ratio, v);
        g = d;
    }
    rational_nth_roots(&rho, g as u32)
        .into_iter()
        .find(|nu| base.scale_arg(nu) == *target)
}

/// A candidate class: a normalized inner, a canonical outer, and every
/// family member reachable from that pair with its parameter.
struct Candidate {
    inner: UniPoly,
    outer: UniPoly,
    members: Vec<(usize, BigRat)>,
}

/// Per-member splits at every divisor of the degree, trivial ones included.
fn member_splits(f: &UniPoly) -> Vec<(UniPoly, UniPoly)> {
    let n = f.degree().expect("nonconstant member");
    (1..=n)
        .filter(|r| n.is_multiple_of(*r))
        .filter_map(|r| split_at(f, r).map(|d| (d.inner, d.outer)))
        .collect()
}

/// Additive candidates: bucket by (inner, centered outer). Centering shifts
/// the outer so that its coefficient of t^{deg−1} vanishes, which fixes the
/// translation ambiguity; the discarded shift is the member's parameter.
fn additive_candidates(splits: &[(usize, Vec<(UniPoly, UniPoly)>)]) -> Vec<Candidate> {
    let mut buckets: HashMap<(UniPoly, UniPoly), Vec<(usize, BigRat)>> = HashMap::new();
    for (i, list) in splits {
        for (inner, outer) in list {
            let m = outer.degree().expect("nonconstant outer");
            let shift = -outer.coeff(m - 1) / (rat_int(m as i64) * outer.leading_coeff());
            let centered = outer.shift_arg(&shift);
            let a = -shift;
            buckets
                .entry((inner.clone(), centered))
                .or_default()
                .push((*i, a));
        }
    }
    let mut out: Vec<Candidate> = buckets
        .into_iter()
        .map(|((inner, outer), members)| Candidate {
            inner,
            outer,
            members,
        })
        .collect();
    out.sort_by_key(candidate_order_key);
    out
}

/// Multiplicative candidates: bucket by inner, then split each bucket into
/// pre-scaling equivalence classes. The canonical outer is the first
/// member's, rescaled to leading coefficient 1 when a rational rescaling
/// exists; parameters are the scale factors against that canonical outer.
fn multiplicative_candidates(splits: &[(usize, Vec<(UniPoly, UniPoly)>)]) -> Vec<Candidate> {
    let mut buckets: HashMap<UniPoly, Vec<(usize, UniPoly)>> = HashMap::new();
    for (i, list) in splits {
        for (inner, outer) in list {
            buckets
                .entry(inner.clone())
                .or_default()
                .push((*i, outer.clone()));
        }
    }
    let mut keys: Vec<UniPoly> = buckets.keys().cloned().collect();
    keys.sort();
    let mut out = Vec::new();
    for inner in keys {
        let entries = &buckets[&inner];
        // Group by pre-scaling equivalence against the first representative
        // of each group; the relation is transitive, so one pass suffices.
        let mut groups: Vec<(UniPoly, Vec<(usize, BigRat)>)> = Vec::new();
        for (i, outer) in entries {
            let mut placed = false;
            for (rep, members) in groups.iter_mut() {
                if let Some(nu) = prescale_between(rep, outer) {
                    members.push((*i, nu));
                    placed = true;
                    break;
                }
            }
            if !placed {
                groups.push((outer.clone(), vec![(*i, rat_int(1))]));
            }
        }
        for (rep, mut members) in groups {
            // Best-effort canonicalization to a monic outer. The parameters
            // rescale with it: rep(νt) monic means member = rep(a·inner)
            // becomes canonical(a/ν·inner).
            let m = rep.degree().expect("nonconstant outer");
            let target = rat_int(1) / rep.leading_coeff();
            let canonical = rational_nth_roots(&target, m as u32)
                .into_iter()
                .max() // prefer the positive root when both signs exist
                .map(|nu| {
                    for (_, a) in members.iter_mut() {
                        *a = &*a / &nu;
                    }
                    rep.scale_arg(&nu)
                })
                .unwrap_or(rep);
            out.push(Candidate {
                inner: inner.clone(),
                outer: canonical,
                members,
            });
        }
    }
    out.sort_by_key(candidate_order_key);
    out
}

/// Deterministic ordering of candidates before greedy extraction: earliest
/// first member, smallest inner degree, then displays as a total tiebreak.
fn candidate_order_key(c: &Candidate) -> (usize, usize, String, String) {
    (
        c.members.first().map_or(usize::MAX, |(i, _)| *i),
        c.inner.degree().unwrap_or(0),
        c.inner.to_string(),
        c.outer.to_string(),
    )
}

/// Greedy extraction of a partition from overlapping candidates. Every
/// member appears in at least one candidate (inner degree 1 always splits),
/// so the result is exhaustive.
fn greedy_partition(kind: CompositeKind, candidates: Vec<Candidate>, n: usize) -> Vec<FamilyClass> {
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    loop {
        let mut best: Option<(usize, Vec<(usize, BigRat)>)> = None;
        for (idx, c) in candidates.iter().enumerate() {
            let alive: Vec<(usize, BigRat)> = c
                .members
                .iter()
                .filter(|(i, _)| !assigned[*i])
                .cloned()
                .collect();
            if alive.len() >= 2 && best.as_ref().is_none_or(|(_, b)| alive.len() > b.len()) {
                best = Some((idx, alive));
            }
        }
        match best {
            Some((idx, alive)) => {
                for (i, _) in &alive {
                    assigned[*i] = true;
                }
                out.push(FamilyClass {
                    kind,
                    inner: candidates[idx].inner.clone(),
                    outer: candidates[idx].outer.clone(),
                    members: alive,
                });
            }
            None => break,
        }
    }
    // Remaining members become singletons through their first-sorted
    // candidate (smallest inner degree by the candidate ordering).
    for (i, done) in assigned.iter().enumerate().take(n) {
        if *done {
            continue;
        }
        let home = candidates
            .iter()
            .find_map(|c| {
                c.members
                    .iter()
                    .find(|(j, _)| *j == i)
                    .map(|(_, a)| (c, a.clone()))
            })
            .expect("every member has a trivial split");
        out.push(FamilyClass {
            kind,
            inner: home.0.inner.clone(),
            outer: home.0.outer.clone(),
            members: vec![(i, home.1)],
        });
    }
    out
}

/// Partitions the family into translation (additive) or scaling
/// (multiplicative) classes. Each class carries a certificate: member i
/// equals `outer ∘ (inner + a_i)` resp. `outer ∘ (inner·a_i)` exactly.
/// Classes appear largest first, then singletons by member index.
pub fn classify_family(family: &PolyFamily, kind: CompositeKind) -> Vec<FamilyClass> {
    let splits: Vec<(usize, Vec<(UniPoly, UniPoly)>)> = family
        .members()
        .par_iter()
        .enumerate()
        .map(|(i, f)| (i, member_splits(f)))
        .collect();
    let candidates = match kind {
        CompositeKind::Additive => additive_candidates(&splits),
        CompositeKind::Multiplicative => multiplicative_candidates(&splits),
    };
    let classes = greedy_partition(kind, candidates, family.len());
    debug_assert!(classes
        .iter()
        .all(|c| (0..c.members.len()).all(|k| c.recompose(k) == family.members()[c.members[k].0])));
    classes
}

/// Tests whether the family is ε-structured: some class (of either kind)
/// reaches size |F|^{1−ε}. The comparison runs in logs with 10⁻¹² slack
/// toward acceptance. Returns a largest passing class as witness.
pub fn eps_structured(family: &PolyFamily, eps: f64) -> Result<EpsVerdict, PolyError> {
    if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
        return Err(PolyError::InvalidEps(eps));
    }
    let threshold = (1.0 - eps) * (family.len() as f64).ln() - 1e-12;
    let pick = |kind: CompositeKind| -> FamilyClass {
        // Greedy extraction emits a largest class first.
        classify_family(family, kind)
            .into_iter()
            .next()
            .expect("nonempty family yields a nonempty partition")
    };
    let best_add = pick(CompositeKind::Additive);
    let best_mul = pick(CompositeKind::Multiplicative);
    let eps_additive = (best_add.members.len() as f64).ln() >= threshold;
    let eps_multiplicative = (best_mul.members.len() as f64).ln() >= threshold;
    let witness = match (eps_additive, eps_multiplicative) {
        (true, true) => {
            if best_mul.members.len() > best_add.members.len() {
                Some(best_mul)
            } else {
                Some(best_add)
            }
        }
        (true, false) => Some(best_add),
        (false, true) => Some(best_mul),
        (false, false) => None,
    };
    Ok(EpsVerdict {
        eps_additive,
        eps_multiplicative,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_uni;
    use proptest::prelude::*;

    fn family(texts: &[&str]) -> PolyFamily {
        PolyFamily::new(texts.iter().map(|t| parse_uni(t).unwrap()).collect()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_families() {
        assert!(matches!(
            PolyFamily::new(vec![]),
            Err(PolyError::EmptyFamily)
        ));
        assert!(matches!(
            PolyFamily::new(vec![UniPoly::x(), UniPoly::constant(rat_int(2))]),
            Err(PolyError::ConstantMember { index: 1 })
        ));
        let fam = family(&["x^2", "x^5 - x"]);
        assert_eq!(fam.degree_bound(), 5);
        assert_eq!(fam.len(), 2);
    }

    #[test]
    fn shifted_squares_form_one_class() {
        let fam = family(&["x^2", "(x + 1)^2", "(x + 2)^2"]);
        let classes = classify_family(&fam, CompositeKind::Additive);
        assert_eq!(classes.len(), 1);
        let c = &classes[0];
        assert_eq!(c.inner, UniPoly::x());
        assert_eq!(c.outer, parse_uni("x^2").unwrap());
        assert_eq!(
            c.members,
            vec![(0, rat_int(0)), (1, rat_int(1)), (2, rat_int(2)),]
        );
    }

    #[test]
    fn distinct_monomials_are_singletons() {
        let fam = family(&["x^2", "x^3"]);
        let classes = classify_family(&fam, CompositeKind::Additive);
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| c.members.len() == 1));
    }

    #[test]
    fn scaling_does_not_merge_translation_classes() {
        // 2t² and (t+1)²: outers 2t² and t² differ by scaling, not
        // translation, so the additive classification keeps them apart.
        let fam = family(&["2*x^2", "(x + 1)^2"]);
        let classes = classify_family(&fam, CompositeKind::Additive);
        assert_eq!(classes.len(), 2);
        let outers: Vec<String> = classes.iter().map(|c| c.outer.to_string()).collect();
        assert!(outers.contains(&"2*x^2".to_string()));
        assert!(outers.contains(&"x^2".to_string()));
    }

    #[test]
    fn multiplicative_class_through_shared_inner() {
        // f_a = 2·(a·t²)³ for a ∈ {1, 2}: one scaling class through t².
        let fam = family(&["2*x^6", "16*x^6"]);
        let classes = classify_family(&fam, CompositeKind::Multiplicative);
        assert_eq!(classes.len(), 1);
        let c = &classes[0];
        assert_eq!(c.inner, parse_uni("x^2").unwrap());
        assert_eq!(c.members.len(), 2);
        for k in 0..c.members.len() {
            assert_eq!(c.recompose(k), fam.members()[c.members[k].0]);
        }
    }

    #[test]
    fn multiplicative_roots_handle_signs() {
        let fam = family(&["x^3", "-x^3"]);
        let classes = classify_family(&fam, CompositeKind::Multiplicative);
        assert_eq!(classes.len(), 1, "ν = −1 relates t³ and −t³");
        let fam2 = family(&["x^2", "9*x^2"]);
        let classes2 = classify_family(&fam2, CompositeKind::Multiplicative);
        assert_eq!(classes2.len(), 1, "ν = 3 relates t² and 9t²");
        // {x², 2x²} still merges: through inner x² the outers t and 2t are
        // related by ν = 2 even though √2 is irrational.
        let fam3 = family(&["x^2", "2*x^2"]);
        let classes3 = classify_family(&fam3, CompositeKind::Multiplicative);
        assert_eq!(classes3.len(), 1, "linear outers relate scalar multiples");
        assert_eq!(classes3[0].members.len(), 2);
        // Shifting one member's constant breaks every route: at inner x² the
        // outers t and 2t + 1 would need ν = 2, but then the constants must
        // match; at inner x the outers t² and 2t² + 1 differ in support.
        let fam4 = family(&["x^2", "2*x^2 + 1"]);
        let classes4 = classify_family(&fam4, CompositeKind::Multiplicative);
        assert_eq!(classes4.len(), 2, "√2 is irrational");
    }

    #[test]
    fn classification_is_a_partition() {
        let fam = family(&["x^4", "(x + 1)^4", "x^4 + 1", "2*x^4", "(x^2 + x)^2", "x^6"]);
        for kind in [CompositeKind::Additive, CompositeKind::Multiplicative] {
            let classes = classify_family(&fam, kind);
            let mut seen = vec![false; fam.len()];
            for c in &classes {
                for (k, (i, _)) in c.members.iter().enumerate() {
                    assert!(!seen[*i], "member {} assigned twice", i);
                    seen[*i] = true;
                    assert_eq!(c.recompose(k), fam.members()[*i]);
                }
            }
            assert!(seen.iter().all(|&b| b), "partition must be exhaustive");
        }
    }

    #[test]
    fn eps_threshold_arithmetic() {
        // 8 members, largest additive class 4: passes at ε = 0.5, fails at 0.1.
        let fam = family(&[
            "x^2",
            "(x + 1)^2",
            "(x + 2)^2",
            "(x + 3)^2",
            "x^3",
            "x^5",
            "x^7 + x",
            "x^9 + x",
        ]);
        let at = |e: f64| eps_structured(&fam, e).unwrap();
        let v = at(0.5);
        assert!(v.eps_additive);
        assert_eq!(v.witness.as_ref().unwrap().members.len(), 4);
        assert!(!at(0.1).eps_additive);
        assert!(matches!(
            eps_structured(&fam, 0.0),
            Err(PolyError::InvalidEps(_))
        ));
        assert!(matches!(
            eps_structured(&fam, 1.0),
            Err(PolyError::InvalidEps(_))
        ));
    }

    #[test]
    fn singleton_family_is_always_structured() {
        let fam = family(&["x^4 + x"]);
        for e in [0.1, 0.5, 0.9] {
            let v = eps_structured(&fam, e).unwrap();
            assert!(v.eps_additive && v.eps_multiplicative);
            assert_eq!(v.witness.unwrap().members.len(), 1);
        }
    }

    #[test]
    fn doubling_monomials_are_unstructured() {
        // {x^{2^i}: 0 < i ≤ 8}: distinct degrees force singleton classes.
        let members: Vec<UniPoly> = (1..=8)
            .map(|i| UniPoly::monomial(rat_int(1), 1usize << i))
            .collect();
        let fam = PolyFamily::new(members).unwrap();
        for kind in [CompositeKind::Additive, CompositeKind::Multiplicative] {
            let classes = classify_family(&fam, kind);
            assert_eq!(classes.len(), 8);
            assert!(classes.iter().all(|c| c.members.len() == 1));
        }
        let v = eps_structured(&fam, 0.5).unwrap();
        assert!(!v.eps_additive && !v.eps_multiplicative);
        assert!(v.witness.is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_partition_and_certificates(
            shifts in proptest::collection::vec(-4i64..=4, 1..5),
            extra in proptest::collection::vec(2u32..=5, 0..3),
        ) {
            let mut members: Vec<UniPoly> = shifts
                .iter()
                .map(|&a| UniPoly::from_ints(&[a, 1]).pow(3))
                .collect();
            for &d in &extra {
                members.push(UniPoly::from_ints(&[0, 1, 1]).pow(d));
            }
            let fam = PolyFamily::new(members).unwrap();
            for kind in [CompositeKind::Additive, CompositeKind::Multiplicative] {
                let classes = classify_family(&fam, kind);
                let mut seen = vec![false; fam.len()];
                for c in &classes {
                    for (k, (i, _)) in c.members.iter().enumerate() {
                        prop_assert!(!seen[*i]);
                        seen[*i] = true;
                        prop_assert_eq!(c.recompose(k), fam.members()[*i].clone());
                    }
                }
                prop_assert!(seen.iter().all(|&b| b));
            }
        }

        #[test]
        fn prop_eps_monotone(e1 in 0.05f64..0.9, e2 in 0.05f64..0.9) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let fam = family(&["x^2", "(x + 1)^2", "x^3", "x^5"]);
            let vlo = eps_structured(&fam, lo).unwrap();
            let vhi = eps_structured(&fam, hi).unwrap();
            prop_assert!(!vlo.eps_additive || vhi.eps_additive);
            prop_assert!(!vlo.eps_multiplicative || vhi.eps_multiplicative);
        }
    }
}
