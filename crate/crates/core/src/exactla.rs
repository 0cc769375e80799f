//! Exact rational linear algebra and canonical forms for hyperplanes and flats.
//!
//! All matrices here are dense integer matrices. Rational input is cleared to
//! integers as early as possible; reduced row-echelon forms are kept with
//! primitive integer rows and positive leading entries, which makes them unique
//! per row space and usable directly as hash keys.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("all coefficients of the linear form are zero")]
    ZeroNormal,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty coefficient vector")]
    EmptyForm,
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_bigints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides out the gcd of the entries. Zero vectors are left untouched.
pub fn make_primitive(v: &mut [BigInt]) {
    let g = content(v);
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

fn first_nonzero(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

/// Clears denominators of a rational vector, giving a primitive integer vector
/// spanning the same line (sign preserved).
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut out: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    make_primitive(&mut out);
    out
}

/// A linear hyperplane `ker(normal · x)`, stored in canonical primitive form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    normal: Vec<BigInt>,
}

/// Canonical hyperplane for a rational coefficient vector.
pub fn canonical_hyperplane(coeffs: &[Rat]) -> Result<Hyperplane, ExactError> {
    Hyperplane::from_integers(clear_denominators(coeffs))
}

impl Hyperplane {
    /// Canonicalizes an integer normal: gcd 1 and first nonzero entry positive.
    pub fn from_integers(mut normal: Vec<BigInt>) -> Result<Self, ExactError> {
        if normal.is_empty() {
            return Err(ExactError::EmptyForm);
        }
        let lead = first_nonzero(&normal).ok_or(ExactError::ZeroNormal)?;
        make_primitive(&mut normal);
        if normal[lead].is_negative() {
            for x in normal.iter_mut() {
                *x = -&*x;
            }
        }
        Ok(Hyperplane { normal })
    }

    pub fn from_i64(normal: &[i64]) -> Result<Self, ExactError> {
        Self::from_integers(to_bigints(normal))
    }

    pub fn from_rationals(coeffs: &[Rat]) -> Result<Self, ExactError> {
        canonical_hyperplane(coeffs)
    }

    pub fn normal(&self) -> &[BigInt] {
        &self.normal
    }

    pub fn ambient_dim(&self) -> usize {
        self.normal.len()
    }

    /// Index of the first nonzero coordinate (the RREF pivot of the normal).
    pub fn pivot(&self) -> usize {
        first_nonzero(&self.normal).expect("canonical normal is nonzero")
    }

    /// Index of the last nonzero coordinate.
    pub fn last_pivot(&self) -> usize {
        self.normal
            .iter()
            .rposition(|x| !x.is_zero())
            .expect("canonical normal is nonzero")
    }

    pub fn to_flat(&self) -> Flat {
        Flat {
            rows: vec![self.normal.clone()],
            ambient_dim: self.ambient_dim(),
        }
    }

    /// Evaluates the defining form at an integer point.
    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        dot(&self.normal, point)
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.normal.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Incrementally maintained integer reduced row-echelon form.
///
/// Rows are primitive, have positive leading entries, are sorted by pivot
/// column, and every pivot column is zero in all other rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Echelon {
    cols: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<I>(cols: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = Vec<BigInt>>,
    {
        let mut e = Echelon::new(cols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.rows
    }

    /// Reduces `v` against the current rows; the result is zero iff `v` lies in
    /// the row space. The returned vector is a positive multiple of the true
    /// remainder, made primitive.
    pub fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        debug_assert_eq!(v.len(), self.cols);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let a = &row[p];
            let b = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x * a - &b * r;
            }
            make_primitive(&mut v);
        }
        v
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v.to_vec()).iter().all(Zero::is_zero)
    }

    /// Inserts a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, v: Vec<BigInt>) -> bool {
        let mut v = self.reduce(v);
        make_primitive(&mut v);
        let Some(p) = first_nonzero(&v) else {
            return false;
        };
        if v[p].is_negative() {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let a = v[p].clone();
            let b = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                *x = &*x * &a - &b * r;
            }
            make_primitive(row);
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        true
    }

    /// Basis of the right kernel `{x : rows · x = 0}`, one primitive integer
    /// vector per free column.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let lcm = self
            .rows
            .iter()
            .zip(&self.pivots)
            .fold(BigInt::one(), |acc, (r, &p)| acc.lcm(&r[p]));
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![BigInt::zero(); self.cols];
            v[f] = lcm.clone();
            for (r, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = -(&r[f] * (&lcm / &r[p]));
            }
            make_primitive(&mut v);
            out.push(v);
        }
        out
    }
}

pub fn rank(m: &[Vec<BigInt>], cols: usize) -> usize {
    Echelon::from_rows(cols, m.iter().cloned()).rank()
}

/// Basis of the right kernel of an integer matrix with `cols` columns.
pub fn kernel_basis(m: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    Echelon::from_rows(cols, m.iter().cloned()).kernel()
}

/// A linear subspace of `K^ℓ`, stored as the canonical integer RREF of the
/// linear forms vanishing on it. Equality of flats is equality of subspaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    rows: Vec<Vec<BigInt>>,
    ambient_dim: usize,
}

impl Flat {
    /// The whole space.
    pub fn ambient(ambient_dim: usize) -> Self {
        Flat {
            rows: Vec::new(),
            ambient_dim,
        }
    }

    pub fn from_rows<I>(ambient_dim: usize, rows: I) -> Result<Self, ExactError>
    where
        I: IntoIterator<Item = Vec<BigInt>>,
    {
        let mut e = Echelon::new(ambient_dim);
        for r in rows {
            if r.len() != ambient_dim {
                return Err(ExactError::DimensionMismatch {
                    expected: ambient_dim,
                    found: r.len(),
                });
            }
            e.insert(r);
        }
        Ok(Flat {
            rows: e.into_rows(),
            ambient_dim,
        })
    }

    pub fn from_echelon(e: Echelon) -> Self {
        let ambient_dim = e.cols();
        Flat {
            rows: e.into_rows(),
            ambient_dim,
        }
    }

    pub fn echelon(&self) -> Echelon {
        let pivots = self
            .rows
            .iter()
            .map(|r| first_nonzero(r).expect("rref rows are nonzero"))
            .collect();
        Echelon {
            cols: self.ambient_dim,
            rows: self.rows.clone(),
            pivots,
        }
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn codim(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim - self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| first_nonzero(r).expect("rref rows are nonzero"))
            .collect()
    }

    /// True iff the form vanishes on the whole flat.
    pub fn annihilated_by(&self, form: &[BigInt]) -> bool {
        self.echelon().contains(form)
    }

    /// True iff the flat lies inside the hyperplane.
    pub fn lies_in(&self, h: &Hyperplane) -> bool {
        self.annihilated_by(h.normal())
    }

    /// True iff `self ⊆ other` as subspaces.
    pub fn is_subspace_of(&self, other: &Flat) -> bool {
        let e = self.echelon();
        other.rows.iter().all(|r| e.contains(r))
    }

    pub fn intersect_hyperplane(&self, h: &Hyperplane) -> Flat {
        let mut e = self.echelon();
        e.insert(h.normal().to_vec());
        Flat::from_echelon(e)
    }
}

/// Intersection of two flats in the same ambient space.
pub fn intersect_flats(a: &Flat, b: &Flat) -> Result<Flat, ExactError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(ExactError::DimensionMismatch {
            expected: a.ambient_dim,
            found: b.ambient_dim,
        });
    }
    let mut e = a.echelon();
    for r in &b.rows {
        e.insert(r.clone());
    }
    Ok(Flat::from_echelon(e))
}

impl fmt::Display for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "V");
        }
        write!(f, "{{")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join(" "))?;
        }
        write!(f, "}}")
    }
}

// Integers travel as decimal strings so that no consumer loses precision.
impl serde::Serialize for Hyperplane {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.normal.iter().map(BigInt::to_string).collect();
        v.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Hyperplane {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = parse_int_strings::<D>(Vec::<String>::deserialize(d)?)?;
        Hyperplane::from_integers(v).map_err(serde::de::Error::custom)
    }
}

fn parse_int_strings<'de, D: serde::Deserializer<'de>>(
    v: Vec<String>,
) -> Result<Vec<BigInt>, D::Error> {
    v.iter()
        .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
        .collect()
}

#[derive(serde::Serialize, serde::Deserialize)]
struct FlatRecord {
    ambient_dim: usize,
    rows: Vec<Vec<String>>,
}

impl serde::Serialize for Flat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FlatRecord {
            ambient_dim: self.ambient_dim,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(BigInt::to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Flat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FlatRecord::deserialize(d)?;
        let rows = r
            .rows
            .into_iter()
            .map(parse_int_strings::<D>)
            .collect::<Result<Vec<_>, _>>()?;
        Flat::from_rows(r.ambient_dim, rows).map_err(serde::de::Error::custom)
    }
}
