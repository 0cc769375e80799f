use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactla::Rat;

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Sparse polynomial in `num_vars` variables with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        MultiPoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Rat) -> Self {
        Self::monomial(num_vars, vec![0; num_vars], c)
    }

    pub fn monomial(num_vars: usize, exps: Monomial, c: Rat) -> Self {
        assert_eq!(exps.len(), num_vars);
        let mut p = Self::zero(num_vars);
        p.add_term(exps, c);
        p
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::monomial(num_vars, e, Rat::one())
    }

    /// The linear form `Σ c_i x_i`.
    pub fn from_linear(coeffs: &[BigInt]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, Rat::from_integer(c.clone()));
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>() as usize)
            .max()
    }

    /// The common degree of all terms, if there is one.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.iter().sum::<u32>() as usize);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Remainder after substituting `x_p = -(Σ_{j≠p} α_j x_j) / α_p`, where
    /// `p` is the last nonzero coordinate of `alpha`. Zero iff the linear form
    /// divides `self`.
    pub fn reduce_mod_linear(&self, alpha: &[BigInt]) -> Self {
        let n = self.num_vars;
        let p = alpha
            .iter()
            .rposition(|x| !x.is_zero())
            .expect("nonzero form");
        let mut beta = Self::zero(n);
        let ap = Rat::from_integer(alpha[p].clone());
        for (j, a) in alpha.iter().enumerate() {
            if j != p && !a.is_zero() {
                let mut e = vec![0; n];
                e[j] = 1;
                beta.add_term(e, -Rat::from_integer(a.clone()) / &ap);
            }
        }
        let mut powers = vec![Self::constant(n, Rat::one())];
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let e = m[p] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul(&beta);
                powers.push(next);
            }
            let mut rest = m.clone();
            rest[p] = 0;
            let shifted = powers[e].mul(&Self::monomial(n, rest, c.clone()));
            out = out.add(&shifted);
        }
        out
    }
}

fn fmt_monomial(m: &[u32]) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("x{}", i + 1)
            } else {
                format!("x{}^{e}", i + 1)
            }
        })
        .collect();
    parts.join("*")
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = fmt_monomial(m);
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRecord {
    num_vars: usize,
    terms: Vec<(Monomial, String)>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRecord {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = PolyRecord::deserialize(d)?;
        let mut p = MultiPoly::zero(r.num_vars);
        for (m, c) in r.terms {
            if m.len() != r.num_vars {
                return Err(D::Error::custom("monomial length differs from num_vars"));
            }
            let c: Rat = c
                .parse()
                .map_err(|_| D::Error::custom(format!("bad rational {c:?}")))?;
            p.add_term(m, c);
        }
        Ok(p)
    }
}

/// A polynomial vector field `θ = Σ f_i ∂/∂x_i` with homogeneous components of
/// a common degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub components: Vec<MultiPoly>,
    pub degree: usize,
}

impl Derivation {
    pub fn new(components: Vec<MultiPoly>, degree: usize) -> Self {
        Derivation { components, degree }
    }

    /// `Σ x_i ∂/∂x_i`.
    pub fn euler(num_vars: usize) -> Self {
        Derivation {
            components: (0..num_vars).map(|i| MultiPoly::var(num_vars, i)).collect(),
            degree: 1,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.components.len()
    }

    /// `θ(α)` for a linear form `α`.
    pub fn apply(&self, alpha: &[BigInt]) -> MultiPoly {
        let mut out = MultiPoly::zero(self.num_vars());
        for (f, a) in self.components.iter().zip(alpha) {
            if !a.is_zero() {
                out = out.add(&f.scale(&Rat::from_integer(a.clone())));
            }
        }
        out
    }

    /// Components are homogeneous of the stated degree (zero allowed).
    pub fn is_homogeneous(&self) -> bool {
        self.components
            .iter()
            .all(|f| f.is_zero() || f.homogeneous_degree() == Some(self.degree))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(MultiPoly::is_zero)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| format!("({p})∂{}", i + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// All monomials of total degree `d` in `n` variables, in descending
/// lexicographic order.
pub fn monomials(n: usize, d: usize) -> Vec<Monomial> {
    fn rec(n: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d as u32, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `C(n + k, k)` as a `usize`.
pub fn binomial(n: usize, k: usize) -> usize {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n + k - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// `dim S_d` for `S = K[x_1..x_ℓ]`.
pub fn dim_s(ell: usize, d: i64) -> usize {
    if d < 0 || ell == 0 {
        return usize::from(d == 0);
    }
    binomial(d as usize, ell - 1)
}
