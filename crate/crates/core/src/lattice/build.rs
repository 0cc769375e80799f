use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Arrangement, CharPoly, LatticeCache, LatticeError, WHITNEY_MAX};
use crate::exactla::{Echelon, Flat};

/// Fixed-width bitset over hyperplane indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AtomSet(Vec<u64>);

impl AtomSet {
    pub fn with_capacity(n: usize) -> Self {
        AtomSet(vec![0; n.div_ceil(64)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| k * 64 + b)
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// One element of the intersection lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFlat {
    pub flat: Flat,
    /// Indices `i` with `flat ⊆ H_i`.
    pub atoms: AtomSet,
    pub mobius: i64,
}

/// The intersection lattice `L(A)`, ranked by codimension.
///
/// Flats are stored level by level; within a level they are sorted by their
/// canonical key, so indices are deterministic for a given arrangement order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionLattice {
    arrangement: Arrangement,
    flats: Vec<LatticeFlat>,
    level_start: Vec<usize>,
    #[serde(skip)]
    index: HashMap<Flat, usize>,
}

/// Builds `L(A)` level by level and fills in the Möbius function.
pub fn build_lattice(a: &Arrangement) -> IntersectionLattice {
    let n = a.len();
    let dim = a.ambient_dim();
    let ambient = LatticeFlat {
        flat: Flat::ambient(dim),
        atoms: AtomSet::with_capacity(n),
        mobius: 1,
    };
    let mut flats = vec![ambient];
    let mut level_start = vec![0, 1];
    for _ in 0..a.rank() {
        let prev = level_start[level_start.len() - 2]..level_start[level_start.len() - 1];
        let mut next: HashMap<Flat, ()> = HashMap::new();
        for x in &flats[prev] {
            for (i, h) in a.hyperplanes().iter().enumerate() {
                if x.atoms.contains(i) {
                    continue;
                }
                next.entry(x.flat.intersect_hyperplane(h)).or_insert(());
            }
        }
        let mut level: Vec<Flat> = next.into_keys().collect();
        level.sort();
        for f in level {
            let e = f.echelon();
            let mut atoms = AtomSet::with_capacity(n);
            for (i, h) in a.hyperplanes().iter().enumerate() {
                if e.contains(h.normal()) {
                    atoms.insert(i);
                }
            }
            flats.push(LatticeFlat {
                flat: f,
                atoms,
                mobius: 0,
            });
        }
        level_start.push(flats.len());
    }
    fill_mobius(&mut flats, &level_start);
    IntersectionLattice::assemble(a.clone(), flats, level_start)
}

fn fill_mobius(flats: &mut [LatticeFlat], level_start: &[usize]) {
    for k in 1..level_start.len() - 1 {
        for x in level_start[k]..level_start[k + 1] {
            let s: i64 = flats[..level_start[k]]
                .iter()
                .filter(|y| y.atoms.is_subset(&flats[x].atoms))
                .map(|y| y.mobius)
                .sum();
            flats[x].mobius = -s;
        }
    }
}

impl IntersectionLattice {
    fn assemble(
        arrangement: Arrangement,
        flats: Vec<LatticeFlat>,
        level_start: Vec<usize>,
    ) -> Self {
        let index = flats
            .iter()
            .enumerate()
            .map(|(i, f)| (f.flat.clone(), i))
            .collect();
        IntersectionLattice {
            arrangement,
            flats,
            level_start,
            index,
        }
    }

    /// Rebuilds the lookup index after deserialization.
    pub(crate) fn reindex(&mut self) {
        self.index = self
            .flats
            .iter()
            .enumerate()
            .map(|(i, f)| (f.flat.clone(), i))
            .collect();
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn flats(&self) -> &[LatticeFlat] {
        &self.flats
    }

    pub fn flat(&self, id: usize) -> &LatticeFlat {
        &self.flats[id]
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// Number of levels, `rank + 1`.
    pub fn num_levels(&self) -> usize {
        self.level_start.len() - 1
    }

    pub fn level(&self, k: usize) -> &[LatticeFlat] {
        &self.flats[self.level_start[k]..self.level_start[k + 1]]
    }

    pub fn level_ids(&self, k: usize) -> std::ops::Range<usize> {
        self.level_start[k]..self.level_start[k + 1]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.level_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn codim_of(&self, id: usize) -> usize {
        self.level_start.partition_point(|&s| s <= id) - 1
    }

    /// The center `∩_{H∈A} H`.
    pub fn top(&self) -> usize {
        self.flats.len() - 1
    }

    pub fn find(&self, f: &Flat) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// `χ(A;t) = Σ_X μ(X) t^{dim X}`.
    pub fn char_poly(&self) -> CharPoly {
        self.sum_over(|_| true)
    }

    /// `χ(A_X;t)`: the Möbius sum over the interval above `X`, which is the
    /// lattice of the localization at `X`.
    pub fn char_poly_of_localization(&self, id: usize) -> CharPoly {
        let atoms = &self.flats[id].atoms;
        self.sum_over(|y| y.atoms.is_subset(atoms))
    }

    fn sum_over(&self, keep: impl Fn(&LatticeFlat) -> bool) -> CharPoly {
        let dim = self.arrangement.ambient_dim();
        let mut coeffs = vec![BigInt::from(0); dim + 1];
        for (k, w) in self.level_start.windows(2).enumerate() {
            for y in &self.flats[w[0]..w[1]] {
                if keep(y) {
                    coeffs[dim - k] += y.mobius;
                }
            }
        }
        CharPoly::from_coeffs(coeffs)
    }

    /// Checks the structural invariants: flats equal the intersection of
    /// their atoms, level sizes, and the Möbius recursion.
    pub fn validate(&self) -> Result<(), LatticeError> {
        let a = &self.arrangement;
        let bad = |m: &str| Err(LatticeError::InvariantViolation(m.to_string()));
        if self.level_start.first() != Some(&0) || self.flats.is_empty() {
            return bad("lattice has no ambient flat");
        }
        if self.flats[0].flat != Flat::ambient(a.ambient_dim()) || self.flats[0].mobius != 1 {
            return bad("level 0 must be V with mobius 1");
        }
        if self.num_levels() != a.rank() + 1 {
            return bad("number of levels differs from rank + 1");
        }
        if self.num_levels() > 1 && self.level(1).len() != a.len() {
            return bad("level 1 size differs from |A|");
        }
        for (id, x) in self.flats.iter().enumerate() {
            let k = self.codim_of(id);
            if x.flat.codim() != k || x.flat.ambient_dim() != a.ambient_dim() {
                return bad("flat stored at the wrong level");
            }
            let closure = Echelon::from_rows(
                a.ambient_dim(),
                x.atoms.iter().map(|i| a.hyperplanes()[i].normal().to_vec()),
            );
            if Flat::from_echelon(closure) != x.flat {
                return bad("flat is not the intersection of its atoms");
            }
            if id > 0 {
                let s: i64 = self.flats[..self.level_start[k]]
                    .iter()
                    .filter(|y| y.atoms.is_subset(&x.atoms))
                    .map(|y| y.mobius)
                    .sum();
                if s + x.mobius != 0 {
                    return bad("Möbius recursion fails");
                }
            }
        }
        Ok(())
    }
}

/// `(χ(A;t), χ₀(A;t))`, the second component absent for the empty arrangement.
pub fn char_poly(a: &Arrangement) -> Result<(CharPoly, Option<CharPoly>), LatticeError> {
    let chi = LatticeCache::global().char_poly(a);
    reduce_char_poly(a, chi)
}

pub(crate) fn reduce_char_poly(
    a: &Arrangement,
    chi: CharPoly,
) -> Result<(CharPoly, Option<CharPoly>), LatticeError> {
    if a.is_empty() {
        return Ok((chi, None));
    }
    let chi0 = chi.exact_div(&CharPoly::linear(1)).ok_or_else(|| {
        LatticeError::InvariantViolation(format!(
            "t - 1 does not divide {chi} for a nonempty arrangement"
        ))
    })?;
    Ok((chi, Some(chi0)))
}

/// Subset-rank expansion `Σ_{B⊆A} (-1)^{|B|} t^{ℓ - rank B}`, independent of
/// the lattice construction.
pub fn char_poly_whitney(a: &Arrangement) -> Result<CharPoly, LatticeError> {
    if a.len() > WHITNEY_MAX {
        return Err(LatticeError::TooLarge(a.len()));
    }
    let dim = a.ambient_dim();
    let mut by_rank = vec![0i64; dim + 1];
    fn walk(a: &Arrangement, next: usize, span: &Echelon, size: usize, by_rank: &mut [i64]) {
        if next == a.len() {
            by_rank[span.rank()] += if size.is_multiple_of(2) { 1 } else { -1 };
            return;
        }
        walk(a, next + 1, span, size, by_rank);
        let mut with = span.clone();
        with.insert(a.hyperplanes()[next].normal().to_vec());
        walk(a, next + 1, &with, size + 1, by_rank);
    }
    walk(a, 0, &Echelon::new(dim), 0, &mut by_rank);
    let mut coeffs = vec![BigInt::from(0); dim + 1];
    for (r, c) in by_rank.iter().enumerate() {
        coeffs[dim - r] += *c;
    }
    Ok(CharPoly::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Arrangement;

    fn boolean(n: usize) -> Arrangement {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Arrangement::from_i64(n, &refs).unwrap()
    }

    fn braid3() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]).unwrap()
    }

    fn generic4() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).unwrap()
    }

    #[test]
    fn boolean_plane() {
        let l = build_lattice(&boolean(2));
        assert_eq!(l.level_sizes(), vec![1, 2, 1]);
        let mu: Vec<i64> = l.flats().iter().map(|f| f.mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 1]);
        l.validate().unwrap();
        assert_eq!(l.char_poly(), CharPoly::from_roots([1, 1]));
    }

    #[test]
    fn single_and_braid() {
        let a = Arrangement::from_i64(3, &[&[0, 1, 2]]).unwrap();
        let l = build_lattice(&a);
        let mu: Vec<i64> = l.flats().iter().map(|f| f.mobius).collect();
        assert_eq!(mu, vec![1, -1]);

        let l = build_lattice(&braid3());
        assert_eq!(l.level_sizes(), vec![1, 3, 1]);
        assert_eq!(l.flat(l.top()).mobius, 2);
        assert_eq!(l.char_poly(), CharPoly::from_roots([0, 1, 2]));
        l.validate().unwrap();
    }

    #[test]
    fn char_poly_examples() {
        let (chi, chi0) = char_poly(&Arrangement::empty(2)).unwrap();
        assert_eq!(chi, CharPoly::monomial(2));
        assert!(chi0.is_none());
        let (chi, chi0) = char_poly(&boolean(2)).unwrap();
        assert_eq!(chi.to_string(), "t^2 - 2t + 1");
        assert_eq!(chi0.unwrap().to_string(), "t - 1");
        let (chi, chi0) = char_poly(&braid3()).unwrap();
        assert_eq!(chi.to_string(), "t^3 - 3t^2 + 2t");
        assert_eq!(chi0.unwrap().to_string(), "t^2 - 2t");
    }

    #[test]
    fn whitney_examples() {
        assert_eq!(
            char_poly_whitney(&boolean(2)).unwrap().to_string(),
            "t^2 - 2t + 1"
        );
        assert_eq!(
            char_poly_whitney(&Arrangement::empty(3)).unwrap(),
            CharPoly::monomial(3)
        );
        // 16 subsets: ranks 0:1, 1:4, 2:6, 3:4+1 → t^3 - 4t^2 + 6t - 3
        assert_eq!(
            char_poly_whitney(&generic4()).unwrap().to_string(),
            "t^3 - 4t^2 + 6t - 3"
        );
        assert_eq!(
            build_lattice(&generic4()).char_poly(),
            char_poly_whitney(&generic4()).unwrap()
        );
    }

    #[test]
    fn whitney_too_large() {
        let rows: Vec<Vec<i64>> = (1..=21).map(|k| vec![1, k]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let a = Arrangement::from_i64(2, &refs).unwrap();
        assert_eq!(char_poly_whitney(&a), Err(LatticeError::TooLarge(21)));
    }

    #[test]
    fn localization_interval_matches() {
        let l = build_lattice(&braid3());
        assert_eq!(l.char_poly_of_localization(l.top()), l.char_poly());
        assert_eq!(l.char_poly_of_localization(0), CharPoly::monomial(3));
        assert_eq!(
            l.char_poly_of_localization(1),
            CharPoly::from_roots([0, 0, 1])
        );
    }
}
