use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer-coefficient polynomial in `t`, stored with `coeffs[k]` the
/// coefficient of `t^k`. Trailing zeros are trimmed so the zero polynomial has
/// no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CharPoly {
    coeffs: Vec<BigInt>,
}

impl CharPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        CharPoly { coeffs }
    }

    /// Coefficients listed from the constant term upward.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        CharPoly { coeffs: Vec::new() }
    }

    pub fn monomial(deg: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = BigInt::one();
        CharPoly { coeffs }
    }

    /// `t - root`.
    pub fn linear(root: i64) -> Self {
        Self::from_coeffs(vec![BigInt::from(-root), BigInt::one()])
    }

    /// `∏ (t - r)` over the given roots.
    pub fn from_roots<I: IntoIterator<Item = i64>>(roots: I) -> Self {
        roots
            .into_iter()
            .fold(Self::monomial(0), |acc, r| acc.mul(&Self::linear(r)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Coefficients from the leading term down to the constant term.
    pub fn coeffs_descending(&self) -> Vec<BigInt> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn from_descending(coeffs: Vec<BigInt>) -> Self {
        Self::from_coeffs(coeffs.into_iter().rev().collect())
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        CharPoly { coeffs }
    }

    /// Division by a monic divisor over the integers; `None` if the divisor is
    /// zero or not monic.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        if !divisor.is_monic() {
            return None;
        }
        let d = divisor.degree()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d].clone();
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * b;
            }
            quot[k] = c;
        }
        Some((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact divisibility by a monic polynomial.
    pub fn divisible_by(&self, divisor: &Self) -> bool {
        matches!(self.div_rem(divisor), Some((_, r)) if r.is_zero())
    }

    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        match self.div_rem(divisor)? {
            (q, r) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    /// All integer roots counted with multiplicity, provided the polynomial
    /// splits completely into monic integer linear factors. Returns `None`
    /// otherwise (including for the zero polynomial).
    pub fn integer_roots(&self) -> Option<Vec<i64>> {
        if !self.is_monic() {
            return None;
        }
        let mut p = self.clone();
        let mut roots = Vec::new();
        while p.coeffs.len() > 1 && p.coeffs[0].is_zero() {
            p.coeffs.remove(0);
            roots.push(0);
        }
        while p.degree()? > 0 {
            let c = p.coeffs[0].abs();
            let bound = c.to_u64()?;
            let mut found = false;
            // candidate roots divide the constant term
            let mut d = 1u64;
            while d * d <= bound {
                if bound % d == 0 {
                    for cand in [d, bound / d] {
                        for r in [cand as i64, -(cand as i64)] {
                            if p.eval(&BigInt::from(r)).is_zero() {
                                p = p.exact_div(&Self::linear(r))?;
                                roots.push(r);
                                found = true;
                                break;
                            }
                        }
                        if found {
                            break;
                        }
                    }
                }
                if found {
                    break;
                }
                d += 1;
            }
            if !found {
                return None;
            }
        }
        roots.sort_unstable();
        Some(roots)
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || k == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

// Serialized as a list of integer strings from the leading coefficient down.
impl Serialize for CharPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().rev().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CharPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_descending(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_roots() {
        let p = CharPoly::from_roots([0, 1, 2]);
        assert_eq!(p.to_string(), "t^3 - 3t^2 + 2t");
        assert_eq!(p.integer_roots(), Some(vec![0, 1, 2]));
        assert_eq!(CharPoly::monomial(2).integer_roots(), Some(vec![0, 0]));
        let g = CharPoly::from_i64(&[-3, 6, -4, 1]);
        assert_eq!(g.to_string(), "t^3 - 4t^2 + 6t - 3");
        assert_eq!(g.integer_roots(), None);
        assert_eq!(
            CharPoly::from_roots([-2, 3, 3]).integer_roots(),
            Some(vec![-2, 3, 3])
        );
    }

    #[test]
    fn division() {
        let chi = CharPoly::from_roots([1, 1, 1]);
        let (q, r) = chi.div_rem(&CharPoly::from_roots([1, 1])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, CharPoly::linear(1));
        // (t-1)(t-2) does not divide (t-1)(t^2-3t+3)
        let g = CharPoly::from_i64(&[-3, 6, -4, 1]);
        assert!(!g.divisible_by(&CharPoly::from_roots([1, 2])));
        assert!(CharPoly::monomial(2).divisible_by(&CharPoly::monomial(2)));
        assert!(CharPoly::from_roots([0, 1]).divisible_by(&CharPoly::monomial(1)));
        assert!(CharPoly::zero().divisible_by(&CharPoly::linear(4)));
    }

    #[test]
    fn serde_round_trip() {
        let p = CharPoly::from_roots([0, 1, 2]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1","-3","2","0"]"#);
        assert_eq!(serde_json::from_str::<CharPoly>(&s).unwrap(), p);
    }
}
