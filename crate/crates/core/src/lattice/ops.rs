use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Arrangement, LatticeError};
use crate::exactla::{canonical_hyperplane, clear_denominators, ExactError, Flat, Hyperplane, Rat};

/// `A_X = {H ∈ A : X ⊆ H}`, in the original order.
pub fn localization(a: &Arrangement, x: &Flat) -> Result<Arrangement, LatticeError> {
    if !a.has_flat(x) {
        return Err(LatticeError::FlatNotInLattice(x.clone()));
    }
    let hs = a
        .atoms_of(x)
        .into_iter()
        .map(|i| a.hyperplanes()[i].clone())
        .collect();
    Arrangement::new(a.ambient_dim(), hs)
}

/// Coordinate data of a restriction `A^X`.
///
/// Points of `X` are parametrized by the non-pivot coordinates of the RREF of
/// `X`; for a single hyperplane this drops the first nonzero coordinate of its
/// canonical normal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    flat: Flat,
    free_coords: Vec<usize>,
    /// For each hyperplane of the source arrangement, its image index in `A^X`
    /// (absent for hyperplanes containing `X`).
    images: Vec<Option<usize>>,
}

impl Restriction {
    fn new(flat: Flat) -> Self {
        let pivots = flat.pivots();
        let free_coords = (0..flat.ambient_dim())
            .filter(|c| !pivots.contains(c))
            .collect();
        Restriction {
            flat,
            free_coords,
            images: Vec::new(),
        }
    }

    pub fn flat(&self) -> &Flat {
        &self.flat
    }

    /// Ambient coordinates kept as coordinates on the flat.
    pub fn free_coords(&self) -> &[usize] {
        &self.free_coords
    }

    pub fn image_of(&self, source_index: usize) -> Option<usize> {
        self.images.get(source_index).copied().flatten()
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.images
    }

    /// Restriction of a linear form on `V` to the flat, as an integer form in
    /// the flat's coordinates (a positive multiple of the exact restriction).
    pub fn restrict_form(&self, form: &[BigInt]) -> Vec<BigInt> {
        let rows = self.flat.rows();
        let pivots = self.flat.pivots();
        let l = rows
            .iter()
            .zip(&pivots)
            .fold(BigInt::one(), |acc, (r, &p)| acc.lcm(&r[p]));
        self.free_coords
            .iter()
            .map(|&j| {
                let mut b = &l * &form[j];
                for (r, &p) in rows.iter().zip(&pivots) {
                    if !form[p].is_zero() {
                        b -= &form[p] * &r[j] * (&l / &r[p]);
                    }
                }
                b
            })
            .collect()
    }

    /// A form on `V` whose restriction is `beta`.
    pub fn lift_form(&self, beta: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.flat.ambient_dim()];
        for (&j, b) in self.free_coords.iter().zip(beta) {
            out[j] = b.clone();
        }
        out
    }

    /// The flat of `V` corresponding to a flat of the restriction.
    pub fn pull_back(&self, y: &Flat) -> Flat {
        let rows = y
            .rows()
            .iter()
            .map(|r| self.lift_form(r))
            .chain(self.flat.rows().iter().cloned());
        Flat::from_rows(self.flat.ambient_dim(), rows).expect("lifted forms live in V")
    }
}

/// `A^H` for `H = A[h_index]`, deduplicated in source order.
pub fn restriction(
    a: &Arrangement,
    h_index: usize,
) -> Result<(Arrangement, Restriction), LatticeError> {
    let h = a.hyperplane(h_index)?;
    restrict_onto(a, h.to_flat())
}

/// `A^X = {X ∩ K : K ∈ A, X ⊄ K}` for a flat `X ∈ L(A)`.
pub fn restriction_to_flat(
    a: &Arrangement,
    x: &Flat,
) -> Result<(Arrangement, Restriction), LatticeError> {
    if !a.has_flat(x) {
        return Err(LatticeError::FlatNotInLattice(x.clone()));
    }
    restrict_onto(a, x.clone())
}

fn restrict_onto(a: &Arrangement, x: Flat) -> Result<(Arrangement, Restriction), LatticeError> {
    let mut r = Restriction::new(x);
    let dim = r.free_coords.len();
    let mut out: Vec<Hyperplane> = Vec::new();
    let mut images = Vec::with_capacity(a.len());
    for h in a.hyperplanes() {
        let beta = r.restrict_form(h.normal());
        if beta.iter().all(Zero::is_zero) {
            images.push(None);
            continue;
        }
        let img = Hyperplane::from_integers(beta)?;
        let idx = match out.iter().position(|g| g == &img) {
            Some(i) => i,
            None => {
                out.push(img);
                out.len() - 1
            }
        };
        images.push(Some(idx));
    }
    r.images = images;
    Ok((Arrangement::new(dim, out)?, r))
}

/// Coordinates on `V / (∩A)`: the canonical RREF rows of all normals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientMap {
    basis: Flat,
}

impl QuotientMap {
    pub fn basis(&self) -> &Flat {
        &self.basis
    }

    /// Coordinates of a form (in the span of the basis) with respect to the
    /// basis rows.
    pub fn coordinates(&self, form: &[BigInt]) -> Vec<Rat> {
        self.basis
            .rows()
            .iter()
            .zip(self.basis.pivots())
            .map(|(r, p)| Rat::new(form[p].clone(), r[p].clone()))
            .collect()
    }
}

/// The essential part of `A`: the induced arrangement on `V / (∩A)`, of
/// ambient dimension `rank(A)`.
pub fn essential_part(a: &Arrangement) -> Result<(Arrangement, QuotientMap), LatticeError> {
    let q = QuotientMap { basis: a.center() };
    let hs = a
        .hyperplanes()
        .iter()
        .map(|h| canonical_hyperplane(&q.coordinates(h.normal())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((Arrangement::new(a.rank(), hs)?, q))
}

/// Cone of affine hyperplanes `normal · x = constant` in `K^ℓ`: the central
/// arrangement `{normal · x - constant·z = 0} ∪ {z = 0}` in `K^{ℓ+1}`, with `z`
/// the last coordinate. Duplicates are merged.
pub fn cone(affine: &[(Vec<Rat>, Rat)], ambient_dim: usize) -> Result<Arrangement, LatticeError> {
    let mut hs = Vec::with_capacity(affine.len() + 1);
    for (normal, constant) in affine {
        if normal.len() != ambient_dim {
            return Err(ExactError::DimensionMismatch {
                expected: ambient_dim,
                found: normal.len(),
            }
            .into());
        }
        if normal.iter().all(Zero::is_zero) {
            return Err(ExactError::ZeroNormal.into());
        }
        let mut form: Vec<Rat> = normal.clone();
        form.push(-constant.clone());
        hs.push(Hyperplane::from_integers(clear_denominators(&form))?);
    }
    let mut z = vec![BigInt::zero(); ambient_dim + 1];
    z[ambient_dim] = BigInt::one();
    hs.push(Hyperplane::from_integers(z)?);
    Arrangement::from_hyperplanes_dedup(ambient_dim + 1, hs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, to_bigints};
    use crate::lattice::{char_poly, CharPoly};

    fn braid3() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]).unwrap()
    }

    fn flat(dim: usize, rows: &[&[i64]]) -> Flat {
        Flat::from_rows(dim, rows.iter().map(|r| to_bigints(r))).unwrap()
    }

    #[test]
    fn localization_examples() {
        let b = braid3();
        let x = flat(3, &[&[1, -1, 0], &[0, 1, -1]]);
        assert_eq!(localization(&b, &x).unwrap(), b);
        assert_eq!(
            localization(&b, &Flat::ambient(3)).unwrap(),
            Arrangement::empty(3)
        );
        let bool3 = Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let xy = flat(3, &[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(
            localization(&bool3, &xy).unwrap(),
            Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0]]).unwrap()
        );
        let bad = flat(3, &[&[1, 1, 1]]);
        assert!(matches!(
            localization(&b, &bad),
            Err(LatticeError::FlatNotInLattice(_))
        ));
    }

    #[test]
    fn restriction_examples() {
        let (r, map) = restriction(&braid3(), 0).unwrap();
        assert_eq!(r.ambient_dim(), 2);
        assert_eq!(r.len(), 1);
        assert_eq!(map.images(), &[None, Some(0), Some(0)]);
        assert_eq!(map.free_coords(), &[1, 2]);
        // x1 = x2 substituted into x1 - x3 gives x2 - x3
        assert_eq!(r.hyperplanes()[0], Hyperplane::from_i64(&[1, -1]).unwrap());

        let b2 = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let (r, _) = restriction(&b2, 0).unwrap();
        assert_eq!(r, Arrangement::from_i64(1, &[&[1]]).unwrap());

        let one = Arrangement::from_i64(4, &[&[1, 2, 3, 4]]).unwrap();
        let (r, _) = restriction(&one, 0).unwrap();
        assert_eq!(r, Arrangement::empty(3));
        assert!(matches!(
            restriction(&one, 1),
            Err(LatticeError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn pull_back_lands_in_hyperplane() {
        let a =
            Arrangement::from_i64(3, &[&[2, 1, 0], &[0, 1, 1], &[1, 1, 1], &[1, 0, 3]]).unwrap();
        let (r, map) = restriction(&a, 0).unwrap();
        for (i, g) in r.hyperplanes().iter().enumerate() {
            let y = map.pull_back(&g.to_flat());
            assert_eq!(y.codim(), 2);
            assert!(y.lies_in(&a.hyperplanes()[0]));
            assert!(a.has_flat(&y), "pullback of image {i} is a flat of A");
        }
    }

    #[test]
    fn essential_examples() {
        let (e, q) = essential_part(&braid3()).unwrap();
        assert_eq!(e.ambient_dim(), 2);
        assert_eq!(e.len(), 3);
        assert_eq!(q.basis().codim(), 2);
        assert_eq!(
            char_poly(&e).unwrap().0.shift(1),
            char_poly(&braid3()).unwrap().0
        );

        let b2 = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(essential_part(&b2).unwrap().0, b2);
        assert_eq!(
            essential_part(&Arrangement::empty(3)).unwrap().0,
            Arrangement::empty(0)
        );
        assert_eq!(
            char_poly(&Arrangement::empty(0)).unwrap().0,
            CharPoly::monomial(0)
        );
    }

    #[test]
    fn cone_examples() {
        let a = cone(&[(vec![rat(1, 1)], rat(1, 1))], 1).unwrap();
        assert_eq!(a, Arrangement::from_i64(2, &[&[1, -1], &[0, 1]]).unwrap());
        let b = cone(
            &[(vec![rat(1, 1)], rat(1, 1)), (vec![rat(1, 1)], rat(-1, 1))],
            1,
        )
        .unwrap();
        assert_eq!(
            b,
            Arrangement::from_i64(2, &[&[1, -1], &[1, 1], &[0, 1]]).unwrap()
        );
        let dup = cone(
            &[(vec![rat(2, 1)], rat(2, 1)), (vec![rat(1, 1)], rat(1, 1))],
            1,
        )
        .unwrap();
        assert_eq!(dup.len(), 2);
        assert!(matches!(
            cone(&[(vec![rat(0, 1)], rat(1, 1))], 1),
            Err(LatticeError::Exact(ExactError::ZeroNormal))
        ));
    }
}
