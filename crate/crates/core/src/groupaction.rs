//! Finite group actions: a small catalog of concrete actions (cyclic
//! translation, affine maps of a prime line, Möbius maps of a projective
//! line, explicit permutation tables), exact incidence and stabilizer
//! statistics over them, approximate-subgroup certification by translate
//! covers, and a heuristic extractor producing certified
//! approximate-subgroup/non-expansion pairs from incidence data.
//!
//! Every certificate is re-verified from the raw sets; nothing trusts
//! search-time bookkeeping.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::expansion::BoundParams;

#[derive(Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("psl2 requires an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("invalid action parameter: {0}")]
    InvalidParam(String),
    #[error("permutation table error at line {line}: {msg}")]
    BadPermTable { line: usize, msg: String },
    #[error("expected a {expected}-side subset")]
    RoleMismatch { expected: &'static str },
    #[error("element does not belong to the action: {0}")]
    BadElement(String),
    #[error("subset parse error at line {line}: {msg}")]
    SetParse { line: usize, msg: String },
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("no incidences between S and A")]
    EmptyIncidence,
    #[error("budget exceeded: need {need}, budget {budget}")]
    BudgetExceeded { need: u128, budget: u128 },
}

/// A group element of one of the catalog actions. Elements are plain data;
/// all arithmetic goes through the owning [`GroupAction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElem {
    /// Residue in ℤ/n.
    Cyclic(u64),
    /// x ↦ ax + b over F_p with a ≠ 0.
    Affine { a: u64, b: u64 },
    /// Canonicalized 2×2 matrix [a, b, c, d] over F_p with det ≡ 1,
    /// representing {±M}.
    Mat([u64; 4]),
    /// Row index into a permutation table.
    Perm(u32),
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Cyclic(x) => write!(f, "{x}"),
            GroupElem::Affine { a, b } => write!(f, "{a},{b}"),
            GroupElem::Mat(m) => write!(f, "{},{},{},{}", m[0], m[1], m[2], m[3]),
            GroupElem::Perm(i) => write!(f, "{i}"),
        }
    }
}

/// A point of the acted-on domain. For the projective line over F_p the
/// value `p` denotes the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointElem {
    Cyclic(u64),
    Affine(u64),
    Proj(u64),
    Perm(u32),
}

impl fmt::Display for PointElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointElem::Cyclic(x) | PointElem::Affine(x) | PointElem::Proj(x) => write!(f, "{x}"),
            PointElem::Perm(x) => write!(f, "{x}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero");
    powmod(a, p - 2, p)
}

/// Canonical representative of {±M}: the first nonzero entry in row-major
/// order lies in 1..=(p−1)/2.
fn psl2_canon(p: u64, m: [u64; 4]) -> [u64; 4] {
    let m = m.map(|x| x % p);
    match m.iter().find(|&&x| x != 0) {
        Some(&e) if e > (p - 1) / 2 => m.map(|x| (p - x) % p),
        _ => m,
    }
}

fn psl2_det(p: u64, m: [u64; 4]) -> u64 {
    (mulmod(m[0], m[3], p) + p - mulmod(m[1], m[2], p)) % p
}

/// A validated permutation table: a finite group given by its action on
/// 0..points.
#[derive(Debug, Clone, PartialEq)]
pub struct PermTable {
    points: u32,
    perms: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
    identity: u32,
    inverse: Vec<u32>,
}

impl PermTable {
    fn compose(&self, g: u32, h: u32) -> Vec<u32> {
        let (pg, ph) = (&self.perms[g as usize], &self.perms[h as usize]);
        ph.iter().map(|&x| pg[x as usize]).collect()
    }
}

/// Constructor descriptors for [`make_action`]. The permutation variant
/// carries the table text so construction stays free of file handling.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionKind {
    CyclicAdd(u64),
    Agl1(u64),
    Psl2(u64),
    Perm(String),
}

/// One of the catalog group actions. All elements and points are validated
/// against the action before entering a subset.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupAction {
    /// ℤ/n acting on itself by addition.
    CyclicAdd { n: u64 },
    /// Affine maps x ↦ ax + b of F_p, a ≠ 0, p prime.
    Agl1 { p: u64 },
    /// PSL₂(F_p) acting on P¹(F_p) by Möbius maps, p an odd prime.
    Psl2 { p: u64 },
    /// An explicit permutation group acting on 0..points.
    Perm(PermTable),
}

/// Builds and validates an action.
pub fn make_action(kind: ActionKind) -> Result<GroupAction, GroupError> {
    match kind {
        ActionKind::CyclicAdd(n) => {
            if n == 0 {
                return Err(GroupError::InvalidParam("cyclic order must be >= 1".into()));
            }
            Ok(GroupAction::CyclicAdd { n })
        }
        ActionKind::Agl1(p) => {
            if !is_prime(p) {
                return Err(GroupError::NotPrime(p));
            }
            Ok(GroupAction::Agl1 { p })
        }
        ActionKind::Psl2(p) => {
            if !is_prime(p) {
                return Err(GroupError::NotPrime(p));
            }
            if p == 2 {
                return Err(GroupError::NotOddPrime(p));
            }
            Ok(GroupAction::Psl2 { p })
        }
        ActionKind::Perm(text) => Ok(GroupAction::Perm(parse_perm_table(&text)?)),
    }
}

/// Parses and fully validates a permutation table: header
/// `points m groupsize g`, then g lines each a permutation of 0..m−1. The
/// table must contain the identity and be closed under composition and
/// inverses.
fn parse_perm_table(text: &str) -> Result<PermTable, GroupError> {
    let err = |line: usize, msg: String| GroupError::BadPermTable { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty permutation file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (points, size) = match tokens.as_slice() {
        ["points", m, "groupsize", g] => {
            let m: u32 = m
                .parse()
                .map_err(|_| err(hline, format!("bad point count `{m}`")))?;
            let g: u32 = g
                .parse()
                .map_err(|_| err(hline, format!("bad group size `{g}`")))?;
            (m, g)
        }
        _ => {
            return Err(err(
                hline,
                "expected header `points <m> groupsize <g>`".into(),
            ))
        }
    };
    if points == 0 || size == 0 {
        return Err(err(hline, "points and groupsize must be positive".into()));
    }
    let mut perms: Vec<Vec<u32>> = Vec::with_capacity(size as usize);
    let mut perm_lines = Vec::with_capacity(size as usize);
    for _ in 0..size {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| err(hline, format!("expected {size} permutation lines")))?;
        let entries: Result<Vec<u32>, _> = line.split_whitespace().map(str::parse).collect();
        let entries =
            entries.map_err(|_| err(lno, "entries must be nonnegative integers".into()))?;
        if entries.len() != points as usize {
            return Err(err(
                lno,
                format!("expected {points} entries, got {}", entries.len()),
            ));
        }
        let mut seen = vec![false; points as usize];
        for &e in &entries {
            if e >= points || seen[e as usize] {
                return Err(err(lno, format!("not a permutation of 0..{points}")));
            }
            seen[e as usize] = true;
        }
        perms.push(entries);
        perm_lines.push(lno);
    }
    if let Some((lno, _)) = lines.next() {
        return Err(err(lno, "trailing content after permutation lines".into()));
    }
    let mut index = HashMap::new();
    for (i, p) in perms.iter().enumerate() {
        if index.insert(p.clone(), i as u32).is_some() {
            return Err(err(perm_lines[i], "duplicate permutation".into()));
        }
    }
    let id: Vec<u32> = (0..points).collect();
    let identity = *index
        .get(&id)
        .ok_or_else(|| err(hline, "table does not contain the identity".into()))?;
    let table = PermTable {
        points,
        perms,
        index,
        identity,
        inverse: Vec::new(),
    };
    let mut inverse = vec![u32::MAX; size as usize];
    for g in 0..size {
        for h in 0..size {
            if let Some(&c) = table.index.get(&table.compose(g, h)) {
                if c == identity && table.index[&table.compose(h, g)] == identity {
                    inverse[g as usize] = h;
                }
            } else {
                return Err(err(
                    perm_lines[g as usize],
                    "table is not closed under composition".into(),
                ));
            }
        }
        if inverse[g as usize] == u32::MAX {
            return Err(err(
                perm_lines[g as usize],
                "element has no inverse in the table".into(),
            ));
        }
    }
    Ok(PermTable { inverse, ..table })
}

impl GroupAction {
    /// Short display name for reports.
    pub fn name(&self) -> String {
        match self {
            GroupAction::CyclicAdd { n } => format!("cyclic({n})"),
            GroupAction::Agl1 { p } => format!("agl1({p})"),
            GroupAction::Psl2 { p } => format!("psl2({p})"),
            GroupAction::Perm(t) => format!("perm({} on {})", t.perms.len(), t.points),
        }
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            GroupAction::CyclicAdd { .. } => GroupElem::Cyclic(0),
            GroupAction::Agl1 { .. } => GroupElem::Affine { a: 1, b: 0 },
            GroupAction::Psl2 { .. } => GroupElem::Mat([1, 0, 0, 1]),
            GroupAction::Perm(t) => GroupElem::Perm(t.identity),
        }
    }

    /// Group multiplication. Panics when handed elements of a different
    /// action kind; subsets validate membership on construction.
    pub fn mul(&self, g: &GroupElem, h: &GroupElem) -> GroupElem {
        match (self, g, h) {
            (GroupAction::CyclicAdd { n }, GroupElem::Cyclic(x), GroupElem::Cyclic(y)) => {
                GroupElem::Cyclic((x + y) % n)
            }
            (
                GroupAction::Agl1 { p },
                GroupElem::Affine { a: a1, b: b1 },
                GroupElem::Affine { a: a2, b: b2 },
            ) => GroupElem::Affine {
                a: mulmod(*a1, *a2, *p),
                b: (mulmod(*a1, *b2, *p) + b1) % p,
            },
            (GroupAction::Psl2 { p }, GroupElem::Mat(m), GroupElem::Mat(k)) => {
                let prod = [
                    (mulmod(m[0], k[0], *p) + mulmod(m[1], k[2], *p)) % p,
                    (mulmod(m[0], k[1], *p) + mulmod(m[1], k[3], *p)) % p,
                    (mulmod(m[2], k[0], *p) + mulmod(m[3], k[2], *p)) % p,
                    (mulmod(m[2], k[1], *p) + mulmod(m[3], k[3], *p)) % p,
                ];
                GroupElem::Mat(psl2_canon(*p, prod))
            }
            (GroupAction::Perm(t), GroupElem::Perm(i), GroupElem::Perm(j)) => {
                let composed = t.compose(*i, *j);
                GroupElem::Perm(*t.index.get(&composed).expect("validated table is closed"))
            }
            _ => panic!("element does not belong to this action"),
        }
    }

    pub fn inv(&self, g: &GroupElem) -> GroupElem {
        match (self, g) {
            (GroupAction::CyclicAdd { n }, GroupElem::Cyclic(x)) => {
                GroupElem::Cyclic((n - x % n) % n)
            }
            (GroupAction::Agl1 { p }, GroupElem::Affine { a, b }) => {
                let ai = invmod(*a, *p);
                GroupElem::Affine {
                    a: ai,
                    b: (p - mulmod(ai, *b, *p)) % p,
                }
            }
            (GroupAction::Psl2 { p }, GroupElem::Mat(m)) => {
                let inv = [m[3], (p - m[1]) % p, (p - m[2]) % p, m[0]];
                GroupElem::Mat(psl2_canon(*p, inv))
            }
            (GroupAction::Perm(t), GroupElem::Perm(i)) => GroupElem::Perm(t.inverse[*i as usize]),
            _ => panic!("element does not belong to this action"),
        }
    }

    /// The action g·x.
    pub fn act(&self, g: &GroupElem, x: &PointElem) -> PointElem {
        match (self, g, x) {
            (GroupAction::CyclicAdd { n }, GroupElem::Cyclic(s), PointElem::Cyclic(x)) => {
                PointElem::Cyclic((s + x) % n)
            }
            (GroupAction::Agl1 { p }, GroupElem::Affine { a, b }, PointElem::Affine(x)) => {
                PointElem::Affine((mulmod(*a, *x, *p) + b) % p)
            }
            (GroupAction::Psl2 { p }, GroupElem::Mat(m), PointElem::Proj(z)) => {
                let p = *p;
                let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
                if *z == p {
                    // image of infinity is a/c
                    return if c == 0 {
                        PointElem::Proj(p)
                    } else {
                        PointElem::Proj(mulmod(a, invmod(c, p), p))
                    };
                }
                let den = (mulmod(c, *z, p) + d) % p;
                if den == 0 {
                    PointElem::Proj(p)
                } else {
                    let num = (mulmod(a, *z, p) + b) % p;
                    PointElem::Proj(mulmod(num, invmod(den, p), p))
                }
            }
            (GroupAction::Perm(t), GroupElem::Perm(i), PointElem::Perm(x)) => {
                PointElem::Perm(t.perms[*i as usize][*x as usize])
            }
            _ => panic!("element or point does not belong to this action"),
        }
    }

    pub fn group_size(&self) -> u64 {
        match self {
            GroupAction::CyclicAdd { n } => *n,
            GroupAction::Agl1 { p } => p * (p - 1),
            GroupAction::Psl2 { p } => p * (p * p - 1) / 2,
            GroupAction::Perm(t) => t.perms.len() as u64,
        }
    }

    pub fn point_count(&self) -> u64 {
        match self {
            GroupAction::CyclicAdd { n } => *n,
            GroupAction::Agl1 { p } => *p,
            GroupAction::Psl2 { p } => p + 1,
            GroupAction::Perm(t) => t.points as u64,
        }
    }

    /// Every group element, sorted.
    pub fn elements(&self) -> Vec<GroupElem> {
        let mut out = match self {
            GroupAction::CyclicAdd { n } => (0..*n).map(GroupElem::Cyclic).collect(),
            GroupAction::Agl1 { p } => {
                let mut v = Vec::with_capacity((p * (p - 1)) as usize);
                for a in 1..*p {
                    for b in 0..*p {
                        v.push(GroupElem::Affine { a, b });
                    }
                }
                v
            }
            GroupAction::Psl2 { p } => {
                let p = *p;
                let mut set = HashSet::new();
                // a ≠ 0: d determined by det = 1; a = 0: bc ≡ −1, d free.
                for a in 1..p {
                    let ai = invmod(a, p);
                    for b in 0..p {
                        for c in 0..p {
                            let d = mulmod(ai, (1 + mulmod(b, c, p)) % p, p);
                            set.insert(psl2_canon(p, [a, b, c, d]));
                        }
                    }
                }
                for b in 1..p {
                    let c = (p - invmod(b, p)) % p;
                    for d in 0..p {
                        set.insert(psl2_canon(p, [0, b, c, d]));
                    }
                }
                set.into_iter().map(GroupElem::Mat).collect()
            }
            GroupAction::Perm(t) => (0..t.perms.len() as u32).map(GroupElem::Perm).collect(),
        };
        out.sort();
        debug_assert_eq!(out.len() as u64, self.group_size());
        out
    }

    /// Every point, sorted.
    pub fn points(&self) -> Vec<PointElem> {
        match self {
            GroupAction::CyclicAdd { n } => (0..*n).map(PointElem::Cyclic).collect(),
            GroupAction::Agl1 { p } => (0..*p).map(PointElem::Affine).collect(),
            GroupAction::Psl2 { p } => (0..=*p).map(PointElem::Proj).collect(),
            GroupAction::Perm(t) => (0..t.points).map(PointElem::Perm).collect(),
        }
    }

    /// Validates an element against this action and returns its canonical
    /// form (residues reduced, matrices ±-normalized).
    pub fn validate_group(&self, g: &GroupElem) -> Result<GroupElem, GroupError> {
        let bad = || GroupError::BadElement(g.to_string());
        match (self, g) {
            (GroupAction::CyclicAdd { n }, GroupElem::Cyclic(x)) => Ok(GroupElem::Cyclic(x % n)),
            (GroupAction::Agl1 { p }, GroupElem::Affine { a, b }) => {
                if a % p == 0 {
                    return Err(bad());
                }
                Ok(GroupElem::Affine { a: a % p, b: b % p })
            }
            (GroupAction::Psl2 { p }, GroupElem::Mat(m)) => {
                let canon = psl2_canon(*p, *m);
                if psl2_det(*p, canon) != 1 || canon.iter().all(|&x| x == 0) {
                    return Err(bad());
                }
                Ok(GroupElem::Mat(canon))
            }
            (GroupAction::Perm(t), GroupElem::Perm(i)) => {
                if (*i as usize) < t.perms.len() {
                    Ok(*g)
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }

    /// Validates a point against this action (projective value p means the
    /// point at infinity).
    pub fn validate_point(&self, x: &PointElem) -> Result<PointElem, GroupError> {
        let bad = || GroupError::BadElement(x.to_string());
        match (self, x) {
            (GroupAction::CyclicAdd { n }, PointElem::Cyclic(v)) => Ok(PointElem::Cyclic(v % n)),
            (GroupAction::Agl1 { p }, PointElem::Affine(v)) => {
                if v < p {
                    Ok(*x)
                } else {
                    Err(bad())
                }
            }
            (GroupAction::Psl2 { p }, PointElem::Proj(v)) => {
                if v <= p {
                    Ok(*x)
                } else {
                    Err(bad())
                }
            }
            (GroupAction::Perm(t), PointElem::Perm(v)) => {
                if *v < t.points {
                    Ok(*x)
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }

    fn parse_group_elem(&self, line: &str) -> Result<GroupElem, String> {
        let ints = || -> Result<Vec<u64>, String> {
            line.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u64>().map_err(|_| format!("bad integer `{t}`")))
                .collect()
        };
        let fields = ints()?;
        let raw = match (self, fields.as_slice()) {
            (GroupAction::CyclicAdd { .. }, [x]) => GroupElem::Cyclic(*x),
            (GroupAction::Agl1 { .. }, [a, b]) => GroupElem::Affine { a: *a, b: *b },
            (GroupAction::Psl2 { .. }, [a, b, c, d]) => GroupElem::Mat([*a, *b, *c, *d]),
            (GroupAction::Perm(_), [i]) => {
                GroupElem::Perm(u32::try_from(*i).map_err(|_| "index too large".to_string())?)
            }
            _ => return Err("wrong number of fields for this action".into()),
        };
        self.validate_group(&raw).map_err(|e| e.to_string())
    }

    fn parse_point_elem(&self, line: &str) -> Result<PointElem, String> {
        if let GroupAction::Psl2 { p } = self {
            if line.trim() == "inf" {
                return Ok(PointElem::Proj(*p));
            }
        }
        let v: u64 = line
            .trim()
            .parse()
            .map_err(|_| format!("bad integer `{line}`"))?;
        let raw = match self {
            GroupAction::CyclicAdd { .. } => PointElem::Cyclic(v),
            GroupAction::Agl1 { .. } => PointElem::Affine(v),
            GroupAction::Psl2 { .. } => PointElem::Proj(v),
            GroupAction::Perm(_) => {
                PointElem::Perm(u32::try_from(v).map_err(|_| "index too large".to_string())?)
            }
        };
        self.validate_point(&raw).map_err(|e| e.to_string())
    }
}

/// An exact subset of either the group or the point domain of an action.
/// Group-side subsets carry a computed symmetric flag (S = S⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub enum ActionSubset {
    Group {
        elems: HashSet<GroupElem>,
        symmetric: bool,
    },
    Point {
        elems: HashSet<PointElem>,
    },
}

impl ActionSubset {
    /// Builds a group-side subset: validates and canonicalizes every
    /// element, deduplicates, and computes the symmetric flag exactly.
    pub fn group(
        act: &GroupAction,
        it: impl IntoIterator<Item = GroupElem>,
    ) -> Result<Self, GroupError> {
        let mut elems = HashSet::new();
        for g in it {
            elems.insert(act.validate_group(&g)?);
        }
        let symmetric = elems.iter().all(|g| elems.contains(&act.inv(g)));
        Ok(ActionSubset::Group { elems, symmetric })
    }

    /// Builds a point-side subset with validation and deduplication.
    pub fn points(
        act: &GroupAction,
        it: impl IntoIterator<Item = PointElem>,
    ) -> Result<Self, GroupError> {
        let mut elems = HashSet::new();
        for x in it {
            elems.insert(act.validate_point(&x)?);
        }
        Ok(ActionSubset::Point { elems })
    }

    /// Parses a group-side subset, one element per line (`#` comments and
    /// blank lines ignored): a residue for cyclic actions, `a,b` for affine
    /// maps, `a,b,c,d` for Möbius maps, a row index for permutation tables.
    pub fn parse_group(act: &GroupAction, text: &str) -> Result<Self, GroupError> {
        let mut elems = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let g = act
                .parse_group_elem(line)
                .map_err(|msg| GroupError::SetParse { line: i + 1, msg })?;
            elems.push(g);
        }
        ActionSubset::group(act, elems)
    }

    /// Parses a point-side subset, one point per line; `inf` denotes the
    /// projective point at infinity.
    pub fn parse_points(act: &GroupAction, text: &str) -> Result<Self, GroupError> {
        let mut elems = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let x = act
                .parse_point_elem(line)
                .map_err(|msg| GroupError::SetParse { line: i + 1, msg })?;
            elems.push(x);
        }
        ActionSubset::points(act, elems)
    }

    pub fn len(&self) -> usize {
        match self {
            ActionSubset::Group { elems, .. } => elems.len(),
            ActionSubset::Point { elems } => elems.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the subset is group-side and closed under inverses.
    pub fn symmetric(&self) -> bool {
        matches!(
            self,
            ActionSubset::Group {
                symmetric: true,
                ..
            }
        )
    }

    pub fn group_elems(&self) -> Result<&HashSet<GroupElem>, GroupError> {
        match self {
            ActionSubset::Group { elems, .. } => Ok(elems),
            ActionSubset::Point { .. } => Err(GroupError::RoleMismatch { expected: "group" }),
        }
    }

    pub fn point_elems(&self) -> Result<&HashSet<PointElem>, GroupError> {
        match self {
            ActionSubset::Point { elems } => Ok(elems),
            ActionSubset::Group { .. } => Err(GroupError::RoleMismatch { expected: "point" }),
        }
    }

    pub fn sorted_group(&self) -> Result<Vec<GroupElem>, GroupError> {
        let mut v: Vec<GroupElem> = self.group_elems()?.iter().copied().collect();
        v.sort();
        Ok(v)
    }

    pub fn sorted_points(&self) -> Result<Vec<PointElem>, GroupError> {
        let mut v: Vec<PointElem> = self.point_elems()?.iter().copied().collect();
        v.sort();
        Ok(v)
    }

    pub fn contains_group(&self, g: &GroupElem) -> bool {
        matches!(self, ActionSubset::Group { elems, .. } if elems.contains(g))
    }

    pub fn contains_point(&self, x: &PointElem) -> bool {
        matches!(self, ActionSubset::Point { elems } if elems.contains(x))
    }

    /// Sorted one-element-per-line text, matching the parse format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            ActionSubset::Group { .. } => {
                for g in self.sorted_group().expect("group side") {
                    out.push_str(&g.to_string());
                    out.push('\n');
                }
            }
            ActionSubset::Point { .. } => {
                for x in self.sorted_points().expect("point side") {
                    out.push_str(&x.to_string());
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Exact |{(s, a) ∈ S×A : s·a ∈ B}| by hashing B and scanning S×A in
/// parallel over S.
pub fn act_incidence(
    act: &GroupAction,
    s: &ActionSubset,
    a: &ActionSubset,
    b: &ActionSubset,
) -> Result<u64, GroupError> {
    let s_sorted = s.sorted_group()?;
    let a_sorted = a.sorted_points()?;
    let b_set = b.point_elems()?;
    Ok(s_sorted
        .par_iter()
        .map(|g| {
            a_sorted
                .iter()
                .filter(|x| b_set.contains(&act.act(g, x)))
                .count() as u64
        })
        .sum())
}

/// The elementwise product {g·h : g ∈ X, h ∈ Y} of two group-side subsets.
pub fn elementwise_product(
    act: &GroupAction,
    x: &ActionSubset,
    y: &ActionSubset,
) -> Result<ActionSubset, GroupError> {
    let xs = x.sorted_group()?;
    let ys = y.sorted_group()?;
    let products: Vec<HashSet<GroupElem>> = xs
        .par_iter()
        .map(|g| ys.iter().map(|h| act.mul(g, h)).collect())
        .collect();
    let mut elems = HashSet::new();
    for p in products {
        elems.extend(p);
    }
    ActionSubset::group(act, elems)
}

/// The image set {g·x : g ∈ S, x ∈ T} of a point-side subset under a
/// group-side subset.
pub fn act_image(
    act: &GroupAction,
    s: &ActionSubset,
    t: &ActionSubset,
) -> Result<ActionSubset, GroupError> {
    let ss = s.sorted_group()?;
    let ts = t.sorted_points()?;
    let images: Vec<HashSet<PointElem>> = ss
        .par_iter()
        .map(|g| ts.iter().map(|x| act.act(g, x)).collect())
        .collect();
    let mut elems = HashSet::new();
    for im in images {
        elems.extend(im);
    }
    ActionSubset::points(act, elems)
}

/// The k-fold product set S·S·…·S (k ≥ 1). A subset without the symmetric
/// flag is first symmetrized to S ∪ S⁻¹ ∪ {1}; a flagged-symmetric subset is
/// used as is, so k = 1 returns the symmetrization.
pub fn product_set(
    act: &GroupAction,
    s: &ActionSubset,
    k: u64,
) -> Result<ActionSubset, GroupError> {
    if k == 0 {
        return Err(GroupError::InvalidParam(
            "product power must be >= 1".into(),
        ));
    }
    let base = if s.symmetric() {
        s.clone()
    } else {
        let mut elems: HashSet<GroupElem> = s.group_elems()?.clone();
        let inverses: Vec<GroupElem> = elems.iter().map(|g| act.inv(g)).collect();
        elems.extend(inverses);
        elems.insert(act.identity());
        ActionSubset::group(act, elems)?
    };
    let mut cur = base.clone();
    for _ in 1..k {
        cur = elementwise_product(act, &cur, &base)?;
    }
    Ok(cur)
}

/// ⟨S⟩ approximated by powers of the symmetrization of S.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupApprox {
    pub set: ActionSubset,
    /// True when the power reached a fixpoint (the set is exactly ⟨S⟩).
    pub exact: bool,
    /// The power k with set = sym(S)^k.
    pub power: u64,
}

/// Iterates sym(S)^k up to k_max, stopping early at a fixpoint. The report
/// states whether the fixpoint (exact subgroup) was reached.
pub fn generate_subgroup(
    act: &GroupAction,
    s: &ActionSubset,
    k_max: u64,
) -> Result<SubgroupApprox, GroupError> {
    if s.is_empty() {
        return Err(GroupError::EmptySubset);
    }
    let base = product_set(act, s, 1)?;
    let mut cur = base.clone();
    let mut power = 1;
    while power < k_max.max(1) {
        let next = elementwise_product(act, &cur, &base)?;
        let stable = next.group_elems()?.len() == cur.group_elems()?.len();
        if stable {
            return Ok(SubgroupApprox {
                set: cur,
                exact: true,
                power,
            });
        }
        cur = next;
        power += 1;
    }
    // One more product decides whether the cap happened to be exact.
    let probe = elementwise_product(act, &cur, &base)?;
    let exact = probe.group_elems()?.len() == cur.group_elems()?.len();
    Ok(SubgroupApprox {
        set: cur,
        exact,
        power,
    })
}

/// Stabilizer statistics over all n-tuples of A: the count of tuples fixed
/// by some non-identity element of W, plus the full histogram of stabilizer
/// sizes |{w ∈ W : w fixes the tuple}| for threshold queries.
#[derive(Debug, Clone, PartialEq)]
pub struct StabReport {
    pub nontrivial: u64,
    pub tuples: u64,
    pub histogram: BTreeMap<u64, u64>,
}

impl StabReport {
    /// Number of tuples whose stabilizer within W has at least the given
    /// size.
    pub fn tuples_with_stab_at_least(&self, min_size: u64) -> u64 {
        self.histogram
            .range(min_size..)
            .map(|(_, count)| count)
            .sum()
    }
}

/// Exhaustive stabilizer scan over A^n. Fails when |A|^n exceeds the budget.
pub fn stab_count(
    act: &GroupAction,
    w: &ActionSubset,
    a: &ActionSubset,
    n: u64,
    budget: u64,
) -> Result<StabReport, GroupError> {
    if n == 0 {
        return Err(GroupError::InvalidParam("tuple length must be >= 1".into()));
    }
    let w_sorted = w.sorted_group()?;
    let a_sorted = a.sorted_points()?;
    let tuples = (a_sorted.len() as u128)
        .checked_pow(u32::try_from(n).map_err(|_| GroupError::InvalidParam("n too large".into()))?)
        .filter(|&t| t <= budget as u128)
        .ok_or(GroupError::BudgetExceeded {
            need: u128::MAX,
            budget: budget as u128,
        })?;
    if tuples > budget as u128 {
        return Err(GroupError::BudgetExceeded {
            need: tuples,
            budget: budget as u128,
        });
    }
    let identity = act.identity();
    // Parallelize over the first coordinate; each worker odometers the rest.
    let partial: Vec<(u64, BTreeMap<u64, u64>)> = a_sorted
        .par_iter()
        .map(|first| {
            let mut nontrivial = 0u64;
            let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
            let rest = n as usize - 1;
            let mut idx = vec![0usize; rest];
            loop {
                let mut size = 0u64;
                let mut has_nonidentity = false;
                'w: for g in &w_sorted {
                    if act.act(g, first) != *first {
                        continue 'w;
                    }
                    for &i in &idx {
                        let x = &a_sorted[i];
                        if act.act(g, x) != *x {
                            continue 'w;
                        }
                    }
                    size += 1;
                    if *g != identity {
                        has_nonidentity = true;
                    }
                }
                *histogram.entry(size).or_insert(0) += 1;
                if has_nonidentity {
                    nontrivial += 1;
                }
                // odometer
                let mut pos = 0;
                loop {
                    if pos == rest {
                        return (nontrivial, histogram);
                    }
                    idx[pos] += 1;
                    if idx[pos] < a_sorted.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        })
        .collect();
    let mut nontrivial = 0u64;
    let mut histogram = BTreeMap::new();
    for (nt, h) in partial {
        nontrivial += nt;
        for (k, v) in h {
            *histogram.entry(k).or_insert(0) += v;
        }
    }
    Ok(StabReport {
        nontrivial,
        tuples: tuples as u64,
        histogram,
    })
}

/// Certificate that H is an approximate subgroup: symmetry and identity
/// checks, and (when both hold) a translate cover H·H ⊆ cover·H with at most
/// K elements, re-verified from scratch. A failed search or failed checks
/// leave `cover` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxGroupCert {
    pub h: ActionSubset,
    pub k: u64,
    pub symmetric: bool,
    pub has_identity: bool,
    pub cover: Option<Vec<GroupElem>>,
}

impl ApproxGroupCert {
    pub fn passed(&self) -> bool {
        self.cover.is_some()
    }
}

/// Checks the approximate-subgroup conditions for H with cover size budget
/// K. The cover search is greedy over the sorted product set viewed
/// cyclically: repeatedly take the first uncovered element u and, among the
/// candidates x with u ∈ x·H, keep the one whose coverage (together with
/// ground already covered) runs furthest forward from u in the cyclic sorted
/// order of H·H — the interval strategy, applied verbatim to every action.
/// Ties fall to raw coverage, then the identity, then the smallest
/// candidate. Any found cover is re-verified element by element before
/// being recorded.
pub fn verify_approx_subgroup(
    act: &GroupAction,
    h: &ActionSubset,
    k: u64,
) -> Result<ApproxGroupCert, GroupError> {
    let elems = h.group_elems()?;
    if elems.is_empty() {
        return Err(GroupError::EmptySubset);
    }
    let symmetric = h.symmetric();
    let has_identity = elems.contains(&act.identity());
    let mut cert = ApproxGroupCert {
        h: h.clone(),
        k,
        symmetric,
        has_identity,
        cover: None,
    };
    if !symmetric || !has_identity {
        return Ok(cert);
    }
    let hh = elementwise_product(act, h, h)?;
    let hh_sorted = hh.sorted_group()?;
    let h_sorted = h.sorted_group()?;
    let position: HashMap<GroupElem, usize> =
        hh_sorted.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut covered = vec![false; hh_sorted.len()];
    let mut remaining = hh_sorted.len();
    let mut cover: Vec<GroupElem> = Vec::new();
    let identity = act.identity();
    while remaining > 0 {
        if cover.len() as u64 >= k {
            return Ok(cert);
        }
        let u_idx = covered.iter().position(|c| !c).expect("remaining > 0");
        let u = hh_sorted[u_idx];
        // candidates x with u ∈ x·H, i.e. x = u·h⁻¹
        let mut candidates: Vec<GroupElem> =
            h_sorted.iter().map(|v| act.mul(&u, &act.inv(v))).collect();
        candidates.sort();
        candidates.dedup();
        let mut best: Option<(usize, usize, GroupElem, Vec<usize>)> = None;
        for x in candidates {
            let spots: Vec<usize> = h_sorted
                .iter()
                .filter_map(|v| position.get(&act.mul(&x, v)).copied())
                .collect();
            let in_window: HashSet<usize> = spots.iter().copied().collect();
            let mut run = 0usize;
            while run < hh_sorted.len() {
                let i = (u_idx + run) % hh_sorted.len();
                if in_window.contains(&i) || covered[i] {
                    run += 1;
                } else {
                    break;
                }
            }
            let gain = spots.iter().filter(|&&i| !covered[i]).count();
            let better = match &best {
                None => true,
                Some((br, bg, bx, _)) => {
                    (run, gain, x == identity, std::cmp::Reverse(x))
                        > (*br, *bg, *bx == identity, std::cmp::Reverse(*bx))
                }
            };
            if better {
                best = Some((run, gain, x, spots));
            }
        }
        let (_, _, x, spots) = best.expect("u itself yields a candidate");
        for i in spots {
            if !covered[i] {
                covered[i] = true;
                remaining -= 1;
            }
        }
        cover.push(x);
    }
    // Re-verify from scratch: every product of H·H must land in cover·H.
    let mut union: HashSet<GroupElem> = HashSet::new();
    for x in &cover {
        for v in &h_sorted {
            union.insert(act.mul(x, v));
        }
    }
    let verified = cover.len() as u64 <= k
        && h_sorted
            .iter()
            .all(|g| h_sorted.iter().all(|v| union.contains(&act.mul(g, v))));
    if verified {
        cert.cover = Some(cover);
    }
    Ok(cert)
}

/// Recomputed cardinalities attached to a [`BsgResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BsgStats {
    pub h_size: u64,
    pub t_size: u64,
    /// |H ∩ h·S|.
    pub h_cap_hs: u64,
    /// |H * T|.
    pub ht_size: u64,
    /// Total incidences |{(s,a) ∈ S×A : s·a ∈ A}| of the input pair.
    pub incidences: u64,
}

/// Output of the extractor: the approximate subgroup H, the dense point set
/// T ⊆ A, the popular element h, and recomputed statistics, plus the grid
/// choices and score for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct BsgResult {
    pub h_set: ActionSubset,
    pub t_set: ActionSubset,
    pub h: GroupElem,
    pub stats: BsgStats,
    pub m_used: u64,
    pub quantile_used: f64,
    pub delta_min: f64,
}

const BSG_WORK_LIMIT: u128 = 1_000_000_000;
const BSG_QUANTILES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];

/// The m values tried for the top-m quotient set: 1, 2, 3 and the doubling
/// ladder {2^a, 3·2^a}, clipped to the cap with the cap itself included.
fn bsg_m_grid(cap: u64) -> Vec<u64> {
    let mut grid = vec![1u64, 2, 3];
    let mut a = 4u64;
    while a <= cap {
        grid.push(a);
        if 3 * (a / 2) <= cap {
            grid.push(3 * (a / 2));
        }
        a = a.saturating_mul(2);
    }
    grid.push(cap);
    grid.retain(|&m| m >= 1 && m <= cap);
    grid.sort_unstable();
    grid.dedup();
    grid
}

fn safe_ratio(ln_num: f64, ln_den: f64) -> f64 {
    if ln_den == 0.0 {
        if ln_num <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ln_num / ln_den
    }
}

/// Heuristic finitary extractor: ranks S by incidence degree into A, builds
/// quotient sets E = {s_i⁻¹·s_j} of the top-m elements over a small grid of
/// m and density quantiles for T, cubes E ∪ {1} ∪ E⁻¹ into H, and returns
/// the grid point minimizing the certified defect δ. Statistics are
/// recomputed from the final sets; no optimality is claimed.
pub fn bsg_extract(
    act: &GroupAction,
    s: &ActionSubset,
    a: &ActionSubset,
    params: &BoundParams,
) -> Result<BsgResult, GroupError> {
    let s_sorted = s.sorted_group()?;
    let a_sorted = a.sorted_points()?;
    if s_sorted.is_empty() || a_sorted.is_empty() {
        return Err(GroupError::EmptySubset);
    }
    let work = s_sorted.len() as u128 * a_sorted.len() as u128;
    if work > BSG_WORK_LIMIT {
        return Err(GroupError::BudgetExceeded {
            need: work,
            budget: BSG_WORK_LIMIT,
        });
    }
    let a_set = a.point_elems()?;
    // Incidence degrees on the group side and the point side.
    let s_degrees: Vec<u64> = s_sorted
        .par_iter()
        .map(|g| {
            a_sorted
                .iter()
                .filter(|x| a_set.contains(&act.act(g, x)))
                .count() as u64
        })
        .collect();
    let incidences: u64 = s_degrees.iter().sum();
    if incidences == 0 {
        return Err(GroupError::EmptyIncidence);
    }
    let p_degrees: Vec<u64> = a_sorted
        .par_iter()
        .map(|x| {
            s_sorted
                .iter()
                .filter(|g| a_set.contains(&act.act(g, x)))
                .count() as u64
        })
        .collect();
    let mut ranked: Vec<(u64, GroupElem)> = s_degrees
        .iter()
        .zip(&s_sorted)
        .map(|(&d, &g)| (d, g))
        .collect();
    ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let h_top = ranked[0].1;
    let mut sorted_pdeg = p_degrees.clone();
    sorted_pdeg.sort_unstable();
    let cap = if params.cap_m == 0 {
        s_sorted.len() as u64
    } else {
        params.cap_m.min(s_sorted.len() as u64)
    };
    let ln_a = (a_sorted.len() as f64).ln();
    let nt = params.n as f64 + params.t;
    let mut best: Option<(f64, u64, u64, f64, ActionSubset, ActionSubset)> = None;
    for m in bsg_m_grid(cap) {
        let top: Vec<GroupElem> = ranked.iter().take(m as usize).map(|(_, g)| *g).collect();
        let mut hp: HashSet<GroupElem> = HashSet::new();
        for gi in &top {
            let gi_inv = act.inv(gi);
            for gj in &top {
                let e = act.mul(&gi_inv, gj);
                hp.insert(act.inv(&e));
                hp.insert(e);
            }
        }
        hp.insert(act.identity());
        let h_prime = ActionSubset::group(act, hp)?;
        debug_assert!(h_prime.symmetric());
        let h_set = product_set(act, &h_prime, 3)?;
        let h_count = h_set.len() as u64;
        let c1 = (safe_ratio((h_count as f64).ln(), ln_a) - nt).max(0.0);
        let inter = s_sorted
            .iter()
            .filter(|v| h_set.contains_group(&act.mul(&h_top, v)))
            .count() as u64;
        let c4 = if inter == 0 {
            f64::INFINITY
        } else {
            safe_ratio((s_sorted.len() as f64 / inter as f64).ln(), ln_a).max(0.0)
        };
        for &q in &BSG_QUANTILES {
            let idx = (q * (sorted_pdeg.len() - 1) as f64).floor() as usize;
            let threshold = sorted_pdeg[idx.min(sorted_pdeg.len() - 1)];
            let t_elems: Vec<PointElem> = a_sorted
                .iter()
                .zip(&p_degrees)
                .filter(|(_, &d)| d >= threshold)
                .map(|(x, _)| *x)
                .collect();
            if t_elems.is_empty() {
                continue;
            }
            let t_set = ActionSubset::points(act, t_elems)?;
            let c2 = (1.0 - safe_ratio((t_set.len() as f64).ln(), ln_a)).max(0.0);
            let ht = act_image(act, &h_set, &t_set)?;
            let c3 = (safe_ratio((ht.len() as f64).ln(), ln_a) - 1.0).max(0.0);
            let delta = c1.max(c2).max(c3).max(c4);
            let candidate_key = (delta, h_count);
            let better = match &best {
                None => true,
                Some((bd, bh, _, _, _, _)) => candidate_key < (*bd, *bh),
            };
            if better {
                best = Some((delta, h_count, m, q, h_set.clone(), t_set));
            }
        }
    }
    let (delta_min, _, m_used, quantile_used, h_set, t_set) =
        best.expect("quantile 0 always yields a nonempty T");
    // Recompute every statistic from the final sets.
    let stats = BsgStats {
        h_size: h_set.len() as u64,
        t_size: t_set.len() as u64,
        h_cap_hs: s_sorted
            .iter()
            .filter(|v| h_set.contains_group(&act.mul(&h_top, v)))
            .count() as u64,
        ht_size: act_image(act, &h_set, &t_set)?.len() as u64,
        incidences,
    };
    Ok(BsgResult {
        h_set,
        t_set,
        h: h_top,
        stats,
        m_used,
        quantile_used,
        delta_min,
    })
}

/// One recomputed inequality of the certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct BsgCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Conjunction of the certificate inequalities with a per-check report.
#[derive(Debug, Clone, PartialEq)]
pub struct BsgReport {
    pub checks: Vec<BsgCheck>,
    pub pass: bool,
}

/// Relative guard band toward acceptance for the floating thresholds; left
/// sides are exact integers.
const BSG_GUARD: f64 = 1e-9;

/// Recomputes all cardinalities of a [`BsgResult`] from the raw sets and
/// evaluates |H| ≤ |A|^(n+t+δ), |T| ≥ |A|^(1−δ), |H*T| ≤ |A|^(1+δ) and
/// |H ∩ h·S| ≥ |A|^(−δ)·|S|, together with T ⊆ A.
pub fn verify_bsg(
    act: &GroupAction,
    result: &BsgResult,
    a: &ActionSubset,
    s: &ActionSubset,
    delta: f64,
    n: u64,
    t: f64,
) -> BsgReport {
    let a_set = a.point_elems().expect("A is point-side");
    let s_sorted = s.sorted_group().expect("S is group-side");
    let t_elems = result.t_set.point_elems().expect("T is point-side");
    let h_count = result.h_set.len() as f64;
    let t_count = result.t_set.len() as f64;
    let a_count = a_set.len() as f64;
    let outside = t_elems.iter().filter(|x| !a_set.contains(x)).count() as f64;
    let ht_count = act_image(act, &result.h_set, &result.t_set)
        .expect("H, T roles")
        .len() as f64;
    let inter = s_sorted
        .iter()
        .filter(|v| result.h_set.contains_group(&act.mul(&result.h, v)))
        .count() as f64;
    let up = |x: f64| x * (1.0 + BSG_GUARD);
    let down = |x: f64| x * (1.0 - BSG_GUARD);
    let checks = vec![
        BsgCheck {
            name: "T_subset_of_A".into(),
            lhs: outside,
            rhs: 0.0,
            ok: outside == 0.0,
        },
        BsgCheck {
            name: "H_size".into(),
            lhs: h_count,
            rhs: a_count.powf(n as f64 + t + delta),
            ok: h_count <= up(a_count.powf(n as f64 + t + delta)),
        },
        BsgCheck {
            name: "T_size".into(),
            lhs: t_count,
            rhs: a_count.powf(1.0 - delta),
            ok: t_count >= down(a_count.powf(1.0 - delta)),
        },
        BsgCheck {
            name: "HT_nonexpansion".into(),
            lhs: ht_count,
            rhs: a_count.powf(1.0 + delta),
            ok: ht_count <= up(a_count.powf(1.0 + delta)),
        },
        BsgCheck {
            name: "H_meets_hS".into(),
            lhs: inter,
            rhs: a_count.powf(-delta) * s_sorted.len() as f64,
            ok: inter >= down(a_count.powf(-delta) * s_sorted.len() as f64),
        },
    ];
    let pass = checks.iter().all(|c| c.ok);
    BsgReport { checks, pass }
}
