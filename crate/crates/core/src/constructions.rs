//! Generators for structured (non-expanding) instances: arithmetic and
//! geometric progressions, one-parameter translate/scaling families, span
//! instances over formal basis vectors with prescribed sumset growth, and
//! the monomial-power/tower pairing whose image stays linear in the family
//! size.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{BasisVector, BigRat, ExactError, TowerInt};
use crate::expansion::{coarse_dim, CoarseDim, Element, ElementKind, ExpansionError, FiniteSet};
use crate::polyalg::{CompositeKind, PolyError, PolyFamily, UniPoly};

#[derive(Debug, Error, PartialEq)]
pub enum ConstructionError {
    #[error("progression step must be nonzero")]
    ZeroStep,
    #[error("count must be at least 1")]
    ZeroCount,
    #[error("geometric start must be nonzero")]
    ZeroStart,
    #[error("geometric ratio must avoid 0, 1 and -1")]
    DegenerateRatio,
    #[error("g and h must both be nonconstant")]
    ConstantPart,
    #[error("family parameters must be rational, got {0} elements")]
    BadParamKind(ElementKind),
    #[error("scaling parameter 0 would produce a constant member")]
    ZeroScaleParam,
    #[error("span instances need N >= 4")]
    SpanTooSmall,
    #[error("iterated sumset budget exceeded: k*|S_N| = {need} > budget {budget}")]
    BudgetExceeded { need: u128, budget: u128 },
    #[error("exact sumset count overflowed 128 bits")]
    CountOverflow,
    #[error("dense polynomial family only materializes up to n = 16, got {0}")]
    DenseTooLarge(u32),
    #[error(transparent)]
    Family(#[from] PolyError),
    #[error(transparent)]
    Dim(#[from] ExpansionError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// The arithmetic progression {start + k*step : 0 <= k < n}, exactly n
/// distinct rationals.
pub fn gen_ap(start: &BigRat, step: &BigRat, n: u64) -> Result<FiniteSet, ConstructionError> {
    if step.is_zero() {
        return Err(ConstructionError::ZeroStep);
    }
    if n == 0 {
        return Err(ConstructionError::ZeroCount);
    }
    let mut cur = start.clone();
    let mut elems = Vec::with_capacity(n as usize);
    for _ in 0..n {
        elems.push(cur.clone());
        cur += step;
    }
    Ok(FiniteSet::from_rationals(elems))
}

/// The geometric progression {start * ratio^k : 0 <= k < n}, exactly n
/// distinct rationals (the ratio restrictions make collisions impossible).
pub fn gen_gp(start: &BigRat, ratio: &BigRat, n: u64) -> Result<FiniteSet, ConstructionError> {
    if start.is_zero() {
        return Err(ConstructionError::ZeroStart);
    }
    let one = BigRat::one();
    if ratio.is_zero() || *ratio == one || *ratio == -one {
        return Err(ConstructionError::DegenerateRatio);
    }
    let mut cur = start.clone();
    let mut elems = Vec::with_capacity(n as usize);
    for _ in 0..n {
        elems.push(cur.clone());
        cur *= ratio;
    }
    Ok(FiniteSet::from_rationals(elems))
}

/// The one-parameter family {h(g(t) + a)} (additive) or {h(g(t) * a)}
/// (multiplicative) over the rational parameters, deduplicated, in sorted
/// parameter order. Classifying the output always recovers a single class
/// containing every member.
pub fn gen_structured_family(
    kind: CompositeKind,
    g: &UniPoly,
    h: &UniPoly,
    params: &FiniteSet,
) -> Result<PolyFamily, ConstructionError> {
    if g.is_constant() || h.is_constant() {
        return Err(ConstructionError::ConstantPart);
    }
    if params.kind() != ElementKind::Rational {
        return Err(ConstructionError::BadParamKind(params.kind()));
    }
    let mut members = Vec::new();
    let mut seen: HashSet<UniPoly> = HashSet::new();
    for e in params.sorted_elements() {
        let a = match e {
            Element::Rational(r) => r,
            _ => unreachable!("kind checked"),
        };
        let inner = match kind {
            CompositeKind::Additive => g.add(&UniPoly::constant(a.clone())),
            CompositeKind::Multiplicative => {
                if a.is_zero() {
                    return Err(ConstructionError::ZeroScaleParam);
                }
                g.scale(a)
            }
        };
        let member = h.compose(&inner);
        if seen.insert(member.clone()) {
            members.push(member);
        }
    }
    Ok(PolyFamily::new(members)?)
}

/// A span instance: n_N independent axes, axis i carrying the integer
/// multiples of e_i up to the exact 2^i-th root of N, all sharing the zero
/// vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanInstance {
    /// The driving parameter N.
    pub big_n: u64,
    /// n_N = floor(log2 log2 N), the number of axes.
    pub levels: u32,
    /// interval_bounds[i] = floor(N^(2^-i)), computed as an exact integer
    /// 2^i-th root.
    pub interval_bounds: Vec<u64>,
    /// The union of the axis intervals as formal basis vectors.
    pub s_n: FiniteSet,
    /// Human-readable generator description.
    pub description: String,
}

/// Largest k >= 1 with 2^(2^k) <= n; defined for n >= 4.
fn floor_log2_log2(n: u64) -> u32 {
    let mut k = 1u32;
    while k < 6 && (1u128 << (1u32 << (k + 1))) <= n as u128 {
        k += 1;
    }
    k
}

/// Builds the span instance for N >= 4 (so that n_N >= 1).
pub fn gen_span(big_n: u64) -> Result<SpanInstance, ConstructionError> {
    if big_n < 4 {
        return Err(ConstructionError::SpanTooSmall);
    }
    let levels = floor_log2_log2(big_n);
    let mut interval_bounds = Vec::with_capacity(levels as usize);
    for i in 0..levels {
        let root_order = 1u32 << i;
        let b = if root_order == 1 {
            big_n
        } else {
            big_n.nth_root(root_order)
        };
        debug_assert!(
            (b as u128)
                .checked_pow(root_order)
                .map(|p| p <= big_n as u128)
                == Some(true)
                && ((b + 1) as u128)
                    .checked_pow(root_order)
                    .map(|p| p > big_n as u128)
                    .unwrap_or(true),
            "exact integer root"
        );
        interval_bounds.push(b);
    }
    let mut elems = vec![BasisVector::zero()];
    for (i, &b) in interval_bounds.iter().enumerate() {
        for m in 1..=b as i64 {
            elems.push(BasisVector::unit(i as u32, m));
            elems.push(BasisVector::unit(i as u32, -m));
        }
    }
    let s_n = FiniteSet::from_vectors(elems);
    let expected: u64 =
        interval_bounds.iter().map(|&b| 2 * b + 1).sum::<u64>() - (levels as u64 - 1);
    debug_assert_eq!(s_n.len() as u64, expected, "shared zero counted once");
    let description = format!("span(N={big_n}): n_N={levels}, interval bounds {interval_bounds:?}");
    Ok(SpanInstance {
        big_n,
        levels,
        interval_bounds,
        s_n,
        description,
    })
}

/// Exact size of the k-fold sumset S_N + ... + S_N together with its coarse
/// dimension at scale N.
///
/// A vector (m_0, ..., m_{n_N-1}) lies in the k-fold sumset exactly when
/// sum_i ceil(|m_i| / b_i) <= k: each axis needs at least that many summands
/// from its interval, and summands are interchangeable across axes. The
/// count is therefore a small convolution: on axis i there is one vector of
/// cost 0 and 2*b_i vectors of each cost j >= 1, and the total is the number
/// of cost-vectors with sum at most k. The enumeration oracle in the test
/// suite validates this closed form on small instances.
pub fn span_iterated_sumset(
    inst: &SpanInstance,
    k: u32,
    budget: u64,
) -> Result<(u128, CoarseDim), ConstructionError> {
    if k == 0 {
        return Err(ConstructionError::ZeroCount);
    }
    let need = k as u128 * inst.s_n.len() as u128;
    if need > budget as u128 {
        return Err(ConstructionError::BudgetExceeded {
            need,
            budget: budget as u128,
        });
    }
    let mut ways = vec![0u128; k as usize + 1];
    ways[0] = 1;
    for &b in &inst.interval_bounds {
        let weight = 2u128 * b as u128;
        let mut next = vec![0u128; k as usize + 1];
        for c in 0..=k as usize {
            if ways[c] == 0 {
                continue;
            }
            // cost 0 on this axis
            next[c] = next[c]
                .checked_add(ways[c])
                .ok_or(ConstructionError::CountOverflow)?;
            // cost j >= 1 on this axis: 2*b_i choices each
            for j in 1..=(k as usize - c) {
                let add = ways[c]
                    .checked_mul(weight)
                    .ok_or(ConstructionError::CountOverflow)?;
                next[c + j] = next[c + j]
                    .checked_add(add)
                    .ok_or(ConstructionError::CountOverflow)?;
            }
        }
        ways = next;
    }
    let mut total = 0u128;
    for c in ways {
        total = total
            .checked_add(c)
            .ok_or(ConstructionError::CountOverflow)?;
    }
    let dim = coarse_dim(total, inst.big_n as f64)?;
    Ok((total, dim))
}

/// The monomial-power family {x^(2^j) : 0 < j <= n} paired with the tower
/// set {2^(2^i) : 0 <= i <= n}. Its image has exactly 2n elements: linear in
/// the family size even though each member alone is maximally expanding.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleInstance {
    pub n: u32,
    /// Member j is the monomial x^(2^j); only the exponents are stored so
    /// the instance stays representable far beyond dense-polynomial reach.
    pub family_powers: Vec<u32>,
    /// The tower-kind evaluation set {T(i) : i <= n}.
    pub a: FiniteSet,
}

/// Builds the instance for n >= 1 (panics on n = 0).
pub fn gen_counterexample(n: u32) -> CounterexampleInstance {
    assert!(n >= 1, "counterexample needs n >= 1");
    CounterexampleInstance {
        n,
        family_powers: (1..=n).collect(),
        a: FiniteSet::from_towers((0..=n).map(TowerInt::new)),
    }
}

impl CounterexampleInstance {
    /// |F*A| along the tower-exponent path: x^(2^j) maps T(e) to T(e + j).
    pub fn image_size(&self) -> u64 {
        self.image_towers().len() as u64
    }

    /// The image as sorted tower integers.
    pub fn image_towers(&self) -> Vec<TowerInt> {
        let mut set: HashSet<TowerInt> = HashSet::new();
        for e in self.a.iter() {
            if let Element::Tower(t) = e {
                for &j in &self.family_powers {
                    set.insert(t.tower_pow(j));
                }
            }
        }
        let mut v: Vec<TowerInt> = set.into_iter().collect();
        v.sort();
        v
    }

    /// Cross-evaluation with expanded big integers: every tower value is
    /// materialized and raised through big-integer power. Only small n stay
    /// within big-integer reach.
    pub fn image_size_bigint(&self) -> Result<u64, ConstructionError> {
        let mut values: Vec<BigInt> = Vec::new();
        for e in self.a.iter() {
            if let Element::Tower(t) = e {
                let base = t.value()?;
                for &j in &self.family_powers {
                    values.push(num_traits::Pow::pow(&base, 1u32 << j));
                }
            }
        }
        values.sort();
        values.dedup();
        Ok(values.len() as u64)
    }

    /// The family as dense polynomials, for routing through the generic
    /// counters and classifiers; only sensible for small n.
    pub fn family(&self) -> Result<PolyFamily, ConstructionError> {
        if self.n > 16 {
            return Err(ConstructionError::DenseTooLarge(self.n));
        }
        let members = self
            .family_powers
            .iter()
            .map(|&j| UniPoly::monomial(crate::exactnum::rat_int(1), 1usize << j))
            .collect();
        Ok(PolyFamily::new(members)?)
    }
}
