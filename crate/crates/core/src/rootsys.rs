//! Crystallographic root systems in their standard integer realizations, lower
//! ideals of the root poset, and the Weyl, Shi, Catalan and ideal-Shi
//! arrangements built from them.
//!
//! Positive roots are generated from the simple roots by root strings using
//! the Cartan matrix, then checked against the closed-form counts and the
//! reflection axioms. Realizations with half-integer coordinates (F4, E6–E8)
//! are doubled; scaling a root does not change its hyperplane.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{rat, Hyperplane, Rat};
use crate::lattice::{cone, Arrangement, LatticeError};

/// Largest positive-root count for lower-ideal enumeration.
pub const MAX_IDEAL_ROOTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("invalid type/rank combination {0}{1}")]
    InvalidTypeRank(RootType, usize),
    #[error("unknown root system type {0:?}")]
    UnknownType(String),
    #[error("{0} positive roots is too many for lower-ideal enumeration")]
    TooLarge(usize),
    #[error("the given subset is not a lower ideal")]
    NotALowerIdeal,
    #[error("root index {0} out of range")]
    RootIndexOutOfRange(usize),
    #[error("root system self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootType {
    A,
    B,
    C,
    D,
    G2,
    F4,
    E6,
    E7,
    E8,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootType::A => "A",
            RootType::B => "B",
            RootType::C => "C",
            RootType::D => "D",
            RootType::G2 => "G",
            RootType::F4 => "F",
            RootType::E6 | RootType::E7 | RootType::E8 => "E",
        };
        write!(f, "{s}")
    }
}

impl FromStr for RootType {
    type Err = RootError;

    fn from_str(s: &str) -> Result<Self, RootError> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "A" => RootType::A,
            "B" => RootType::B,
            "C" => RootType::C,
            "D" => RootType::D,
            "G" | "G2" => RootType::G2,
            "F" | "F4" => RootType::F4,
            "E6" => RootType::E6,
            "E7" => RootType::E7,
            "E8" => RootType::E8,
            _ => return Err(RootError::UnknownType(s.to_string())),
        })
    }
}

impl RootType {
    /// Resolves a bare `E` label by rank.
    pub fn parse_with_rank(s: &str, rank: usize) -> Result<Self, RootError> {
        if s.eq_ignore_ascii_case("E") {
            return match rank {
                6 => Ok(RootType::E6),
                7 => Ok(RootType::E7),
                8 => Ok(RootType::E8),
                _ => Err(RootError::InvalidTypeRank(RootType::E8, rank)),
            };
        }
        s.parse()
    }

    fn closed_form_count(self, rank: usize) -> usize {
        match self {
            RootType::A => rank * (rank + 1) / 2,
            RootType::B | RootType::C => rank * rank,
            RootType::D => rank * (rank - 1),
            RootType::G2 => 6,
            RootType::F4 => 24,
            RootType::E6 => 36,
            RootType::E7 => 63,
            RootType::E8 => 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystem {
    pub type_label: RootType,
    pub rank: usize,
    pub ambient_dim: usize,
    /// Positive roots in ambient coordinates, ordered by height then by
    /// simple-root coefficients (descending lexicographic).
    pub positive_roots: Vec<Vec<i64>>,
    /// Coefficients of each positive root in the simple roots.
    pub simple_coords: Vec<Vec<i64>>,
    /// Indices into `positive_roots` of the simple roots `α_1..α_ℓ`.
    pub simple_roots: Vec<usize>,
}

fn unit(n: usize, i: usize, c: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = c;
    v
}

fn diff(n: usize, i: usize, j: usize, c: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = c;
    v[j] = -c;
    v
}

fn simple_roots(t: RootType, rank: usize) -> Result<(usize, Vec<Vec<i64>>), RootError> {
    let bad = Err(RootError::InvalidTypeRank(t, rank));
    let chain = |n: usize, k: usize| (0..k).map(|i| diff(n, i, i + 1, 1)).collect::<Vec<_>>();
    Ok(match t {
        RootType::A => {
            if rank < 1 {
                return bad;
            }
            (rank + 1, chain(rank + 1, rank))
        }
        RootType::B | RootType::C => {
            if rank < 2 {
                return bad;
            }
            let mut s = chain(rank, rank - 1);
            s.push(unit(rank, rank - 1, if t == RootType::B { 1 } else { 2 }));
            (rank, s)
        }
        RootType::D => {
            if rank < 3 {
                return bad;
            }
            let mut s = chain(rank, rank - 1);
            let mut last = vec![0; rank];
            last[rank - 2] = 1;
            last[rank - 1] = 1;
            s.push(last);
            (rank, s)
        }
        RootType::G2 => {
            if rank != 2 {
                return bad;
            }
            (3, vec![vec![1, -1, 0], vec![-2, 1, 1]])
        }
        RootType::F4 => {
            if rank != 4 {
                return bad;
            }
            (
                4,
                vec![
                    diff(4, 1, 2, 2),
                    diff(4, 2, 3, 2),
                    unit(4, 3, 2),
                    vec![1, -1, -1, -1],
                ],
            )
        }
        RootType::E6 | RootType::E7 | RootType::E8 => {
            let want = match t {
                RootType::E6 => 6,
                RootType::E7 => 7,
                _ => 8,
            };
            if rank != want {
                return bad;
            }
            let mut s = vec![
                vec![1, -1, -1, -1, -1, -1, -1, 1],
                vec![2, 2, 0, 0, 0, 0, 0, 0],
            ];
            for i in 0..6 {
                s.push(diff(8, i + 1, i, 2));
            }
            s.truncate(rank);
            (8, s)
        }
    })
}

fn ip(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive roots of the given type and rank.
pub fn positive_roots(type_label: RootType, rank: usize) -> Result<RootSystem, RootError> {
    let (ambient_dim, simple) = simple_roots(type_label, rank)?;
    // cartan[j][i] = <α_j, α_i^∨>
    let cartan: Vec<Vec<i64>> = simple
        .iter()
        .map(|aj| {
            simple
                .iter()
                .map(|ai| 2 * ip(aj, ai) / ip(ai, ai))
                .collect()
        })
        .collect();

    let mut known: HashSet<Vec<i64>> = HashSet::new();
    let mut layers: Vec<Vec<Vec<i64>>> = vec![(0..rank).map(|i| unit(rank, i, 1)).collect()];
    known.extend(layers[0].iter().cloned());
    loop {
        let mut next: Vec<Vec<i64>> = Vec::new();
        for beta in layers.last().unwrap() {
            for i in 0..rank {
                if beta.iter().sum::<i64>() == 1 && beta[i] == 1 {
                    continue;
                }
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if known.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = (0..rank).map(|j| beta[j] * cartan[j][i]).sum();
                if p - pairing > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if known.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by(|a, b| b.cmp(a));
        layers.push(next);
    }
    let simple_coords: Vec<Vec<i64>> = layers.into_iter().flatten().collect();
    let positive: Vec<Vec<i64>> = simple_coords
        .iter()
        .map(|c| {
            (0..ambient_dim)
                .map(|k| c.iter().zip(&simple).map(|(ci, s)| ci * s[k]).sum())
                .collect()
        })
        .collect();
    let rs = RootSystem {
        type_label,
        rank,
        ambient_dim,
        positive_roots: positive,
        simple_coords,
        simple_roots: (0..rank).collect(),
    };
    rs.self_check()?;
    Ok(rs)
}

impl RootSystem {
    pub fn len(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive_roots.is_empty()
    }

    pub fn height(&self, i: usize) -> i64 {
        self.simple_coords[i].iter().sum()
    }

    fn self_check(&self) -> Result<(), RootError> {
        let fail = |m: String| Err(RootError::SelfCheck(m));
        let want = self.type_label.closed_form_count(self.rank);
        if self.len() != want {
            return fail(format!("{} positive roots, expected {want}", self.len()));
        }
        let index: HashMap<&Vec<i64>, usize> = self
            .positive_roots
            .iter()
            .enumerate()
            .map(|(i, r)| (r, i))
            .collect();
        for (b, beta) in self.positive_roots.iter().enumerate() {
            if self.simple_coords[b].iter().any(|&c| c < 0) {
                return fail(format!("root {b} is not a nonnegative combination"));
            }
            for alpha in &self.positive_roots {
                let num = 2 * ip(beta, alpha);
                let den = ip(alpha, alpha);
                if num % den != 0 {
                    return fail("non-integral Cartan pairing".into());
                }
                let c = num / den;
                let refl: Vec<i64> = beta.iter().zip(alpha).map(|(x, y)| x - c * y).collect();
                let neg: Vec<i64> = refl.iter().map(|x| -x).collect();
                if !index.contains_key(&refl) && !index.contains_key(&neg) {
                    return fail("reflection leaves the root system".into());
                }
            }
        }
        // every non-simple root minus some simple root is again positive
        let coords: HashSet<&Vec<i64>> = self.simple_coords.iter().collect();
        for c in &self.simple_coords {
            if c.iter().sum::<i64>() == 1 {
                continue;
            }
            let ok = (0..self.rank).any(|i| {
                let mut d = c.clone();
                d[i] -= 1;
                coords.contains(&d)
            });
            if !ok {
                return fail("indecomposable non-simple root".into());
            }
        }
        Ok(())
    }

    /// `β ≤ α` in the root poset: `α − β` is a nonnegative combination of
    /// simple roots.
    pub fn precedes(&self, beta: usize, alpha: usize) -> bool {
        self.simple_coords[alpha]
            .iter()
            .zip(&self.simple_coords[beta])
            .all(|(a, b)| a - b >= 0)
    }
}

/// A downward-closed set of positive roots, as sorted root indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LowerIdeal(Vec<usize>);

impl LowerIdeal {
    pub fn new(rs: &RootSystem, mut roots: Vec<usize>) -> Result<Self, RootError> {
        roots.sort_unstable();
        roots.dedup();
        if let Some(&bad) = roots.iter().find(|&&i| i >= rs.len()) {
            return Err(RootError::RootIndexOutOfRange(bad));
        }
        if !is_lower_ideal(rs, &roots) {
            return Err(RootError::NotALowerIdeal);
        }
        Ok(LowerIdeal(roots))
    }

    pub fn empty() -> Self {
        LowerIdeal(Vec::new())
    }

    pub fn all(rs: &RootSystem) -> Self {
        LowerIdeal((0..rs.len()).collect())
    }

    pub fn roots(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

/// Literal closure check: `α ∈ I`, `β ∈ Φ⁺`, `α − β ≥ 0` implies `β ∈ I`.
pub fn is_lower_ideal(rs: &RootSystem, subset: &[usize]) -> bool {
    let member: HashSet<usize> = subset.iter().copied().collect();
    subset
        .iter()
        .all(|&a| (0..rs.len()).all(|b| !rs.precedes(b, a) || member.contains(&b)))
}

/// All lower ideals, ordered by size and then lexicographically.
pub fn enumerate_lower_ideals(rs: &RootSystem) -> Result<Vec<LowerIdeal>, RootError> {
    if rs.len() > MAX_IDEAL_ROOTS {
        return Err(RootError::TooLarge(rs.len()));
    }
    // roots are listed by height, which is a linear extension of the poset
    fn walk(rs: &RootSystem, next: usize, chosen: &mut Vec<usize>, out: &mut Vec<LowerIdeal>) {
        if next == rs.len() {
            out.push(LowerIdeal(chosen.clone()));
            return;
        }
        walk(rs, next + 1, chosen, out);
        let below_ok = (0..next).all(|b| !rs.precedes(b, next) || chosen.contains(&b));
        if below_ok {
            chosen.push(next);
            walk(rs, next + 1, chosen, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    walk(rs, 0, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// `{H_α : α ∈ Φ⁺}`.
pub fn weyl_arrangement(rs: &RootSystem) -> Arrangement {
    let hs = rs
        .positive_roots
        .iter()
        .map(|r| Hyperplane::from_i64(r).expect("roots are nonzero"))
        .collect();
    Arrangement::new(rs.ambient_dim, hs).expect("positive roots are pairwise non-proportional")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Shi,
    Catalan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdealSign {
    Plus,
    Minus,
}

fn layers(rs: &RootSystem, ks: impl Fn(usize) -> Vec<i64>) -> Vec<(Vec<Rat>, Rat)> {
    let mut out = Vec::new();
    for (i, r) in rs.positive_roots.iter().enumerate() {
        let normal: Vec<Rat> = r.iter().map(|&x| rat(x, 1)).collect();
        for k in ks(i) {
            out.push((normal.clone(), rat(k, 1)));
        }
    }
    out
}

fn check_m(m: i64) -> Result<(), RootError> {
    if m < 1 {
        return Err(RootError::Lattice(LatticeError::InvariantViolation(
            format!("m must be a positive integer, got {m}"),
        )));
    }
    Ok(())
}

/// Coned Shi (`-m+1 ≤ k ≤ m`) or Catalan (`-m ≤ k ≤ m`) arrangement; the cone
/// coordinate is last.
pub fn build_family(rs: &RootSystem, family: Family, m: i64) -> Result<Arrangement, RootError> {
    check_m(m)?;
    let lo = match family {
        Family::Shi => -m + 1,
        Family::Catalan => -m,
    };
    let affine = layers(rs, |_| (lo..=m).collect());
    Ok(cone(&affine, rs.ambient_dim)?)
}

/// `Shi^m ∪ {cH_α^{-m} : α ∈ I}` (plus) or `Shi^m ∖ {cH_α^m : α ∈ I}` (minus).
pub fn ideal_shi(
    rs: &RootSystem,
    m: i64,
    ideal: &LowerIdeal,
    sign: IdealSign,
) -> Result<Arrangement, RootError> {
    check_m(m)?;
    if ideal.roots().iter().any(|&i| i >= rs.len()) || !is_lower_ideal(rs, ideal.roots()) {
        return Err(RootError::NotALowerIdeal);
    }
    let affine = match sign {
        IdealSign::Plus => layers(rs, |i| {
            let mut ks: Vec<i64> = (-m + 1..=m).collect();
            if ideal.contains(i) {
                ks.push(-m);
            }
            ks
        }),
        IdealSign::Minus => layers(rs, |i| {
            let top = if ideal.contains(i) { m - 1 } else { m };
            (-m + 1..=top).collect()
        }),
    };
    Ok(cone(&affine, rs.ambient_dim)?)
}
