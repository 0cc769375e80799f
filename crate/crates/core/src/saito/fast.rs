//! Integer row reduction on `i128` with overflow detection, falling back to
//! the arbitrary-precision [`Echelon`] when entries grow too large.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::exactla::Echelon;

#[derive(Debug, Clone)]
struct Small {
    cols: usize,
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

impl Small {
    fn reduce(&self, v: &mut [i128]) -> Option<()> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let b = v[p];
            if b == 0 {
                continue;
            }
            let a = row[p];
            let g = a.gcd(&b);
            let (a, b) = (a / g, b / g);
            for (x, &r) in v.iter_mut().zip(row) {
                let lhs = x.checked_mul(a)?;
                *x = if r == 0 {
                    lhs
                } else {
                    lhs.checked_sub(b.checked_mul(r)?)?
                };
            }
            primitive(v);
        }
        Some(())
    }

    fn insert(&mut self, mut v: Vec<i128>) -> Option<bool> {
        self.reduce(&mut v)?;
        primitive(&mut v);
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return Some(false);
        };
        if v[p] < 0 {
            for x in v.iter_mut() {
                *x = x.checked_neg()?;
            }
        }
        for row in self.rows.iter_mut() {
            let b = row[p];
            if b == 0 {
                continue;
            }
            let a = v[p];
            let g = a.gcd(&b);
            let (a, b) = (a / g, b / g);
            for (x, &r) in row.iter_mut().zip(&v) {
                let lhs = x.checked_mul(a)?;
                *x = if r == 0 {
                    lhs
                } else {
                    lhs.checked_sub(b.checked_mul(r)?)?
                };
            }
            primitive(row);
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        Some(true)
    }

    fn kernel(&self) -> Option<Vec<Vec<i128>>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut lcm: i128 = 1;
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let g = lcm.gcd(&r[p]);
            lcm = (lcm / g).checked_mul(r[p])?;
        }
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0i128; self.cols];
            v[f] = lcm;
            for (r, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = -(r[f].checked_mul(lcm / r[p])?);
            }
            primitive(&mut v);
            out.push(v);
        }
        Some(out)
    }
}

/// Row echelon form that starts on machine integers and switches to
/// arbitrary precision on overflow. Results agree with [`Echelon`].
#[derive(Debug, Clone)]
pub struct HybridEchelon {
    cols: usize,
    small: Option<Small>,
    history: Vec<Vec<BigInt>>,
    big: Option<Echelon>,
}

impl HybridEchelon {
    pub fn new(cols: usize) -> Self {
        HybridEchelon {
            cols,
            small: Some(Small {
                cols,
                rows: Vec::new(),
                pivots: Vec::new(),
            }),
            history: Vec::new(),
            big: None,
        }
    }

    fn promote(&mut self) {
        let mut e = Echelon::new(self.cols);
        for r in self.history.drain(..) {
            e.insert(r);
        }
        self.small = None;
        self.big = Some(e);
    }

    pub fn insert(&mut self, v: Vec<BigInt>) -> bool {
        if let Some(small) = self.small.as_mut() {
            let conv: Option<Vec<i128>> = v
                .iter()
                .map(|x| x.to_i128().filter(|y| y.abs() < 1 << 100))
                .collect();
            if let Some(cv) = conv {
                let backup = small.clone();
                if let Some(grew) = small.insert(cv) {
                    if grew {
                        self.history.push(v);
                    }
                    return grew;
                }
                *small = backup;
            }
            self.promote();
        }
        self.big.as_mut().expect("promoted").insert(v)
    }

    pub fn rank(&self) -> usize {
        match (&self.small, &self.big) {
            (Some(s), _) => s.rows.len(),
            (_, Some(b)) => b.rank(),
            _ => unreachable!(),
        }
    }

    pub fn pivots(&self) -> Vec<usize> {
        match (&self.small, &self.big) {
            (Some(s), _) => s.pivots.clone(),
            (_, Some(b)) => b.pivots().to_vec(),
            _ => unreachable!(),
        }
    }

    pub fn kernel(&mut self) -> Vec<Vec<BigInt>> {
        if let Some(k) = self.small.as_ref().and_then(Small::kernel) {
            return k
                .into_iter()
                .map(|v| v.into_iter().map(BigInt::from).collect())
                .collect();
        }
        if self.small.is_some() {
            self.promote();
        }
        self.big.as_ref().expect("promoted").kernel()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{kernel_basis, rank, to_bigints};
    use proptest::prelude::*;

    #[test]
    fn overflow_falls_back() {
        let huge: BigInt = BigInt::from(1u8) << 120usize;
        let mut h = HybridEchelon::new(2);
        assert!(h.insert(vec![huge.clone(), BigInt::from(1)]));
        assert!(h.small.is_none());
        assert_eq!(h.kernel().len(), 1);
    }

    proptest! {
        #[test]
        fn agrees_with_bigint(cols in 1usize..6, m in prop::collection::vec(prop::collection::vec(-50i64..=50, 6), 0..6)) {
            let m: Vec<Vec<BigInt>> = m.iter().map(|r| to_bigints(&r[..cols])).collect();
            let mut h = HybridEchelon::new(cols);
            for r in &m {
                h.insert(r.clone());
            }
            prop_assert_eq!(h.rank(), rank(&m, cols));
            prop_assert_eq!(h.kernel(), kernel_basis(&m, cols));
        }
    }
}
