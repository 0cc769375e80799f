//! Named example arrangements and a seeded random corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactla::Hyperplane;
use crate::lattice::Arrangement;

/// Seed used by the shipped test corpus.
pub const CORPUS_SEED: u64 = 0x5eed_a77a;

/// Coordinate hyperplanes `x_i = 0`.
pub fn boolean(ell: usize) -> Arrangement {
    let hs = (0..ell)
        .map(|i| {
            let mut v = vec![0i64; ell];
            v[i] = 1;
            Hyperplane::from_i64(&v).unwrap()
        })
        .collect();
    Arrangement::new(ell, hs).unwrap()
}

/// `x_i - x_j = 0` for `i < j`, in `ℓ` coordinates.
pub fn braid(ell: usize) -> Arrangement {
    let mut hs = Vec::new();
    for i in 0..ell {
        for j in i + 1..ell {
            let mut v = vec![0i64; ell];
            v[i] = 1;
            v[j] = -1;
            hs.push(Hyperplane::from_i64(&v).unwrap());
        }
    }
    Arrangement::new(ell, hs).unwrap()
}

/// `x, y, z, x + y + z` in three dimensions.
pub fn generic4() -> Arrangement {
    Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).unwrap()
}

/// `boolean<ℓ>`, `braid<ℓ>` or `generic4`.
pub fn named(name: &str) -> Option<Arrangement> {
    if name == "generic4" {
        return Some(generic4());
    }
    let (prefix, n) = name.split_at(name.find(|c: char| c.is_ascii_digit())?);
    let n: usize = n.parse().ok()?;
    match prefix {
        "boolean" if n >= 1 => Some(boolean(n)),
        "braid" if n >= 2 => Some(braid(n)),
        _ => None,
    }
}

/// One random central arrangement with `ℓ ∈ [2, max_dim]`, between one and
/// `max_size` hyperplanes, and integer normals with entries in
/// `[-max_entry, max_entry]`. About half the entries are zero.
pub fn random_arrangement<R: Rng>(
    rng: &mut R,
    max_dim: usize,
    max_size: usize,
    max_entry: i64,
) -> Arrangement {
    let ell = rng.gen_range(2..=max_dim.max(2));
    let target = rng.gen_range(1..=max_size.max(1));
    let bound = if rng.gen_bool(0.5) { 1 } else { max_entry };
    let mut hs: Vec<Hyperplane> = Vec::new();
    let mut attempts = 0;
    while hs.len() < target && attempts < 200 {
        attempts += 1;
        let v: Vec<i64> = (0..ell)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    0
                } else {
                    let x = rng.gen_range(1..=bound);
                    if rng.gen_bool(0.5) {
                        x
                    } else {
                        -x
                    }
                }
            })
            .collect();
        if let Ok(h) = Hyperplane::from_i64(&v) {
            if !hs.contains(&h) {
                hs.push(h);
            }
        }
    }
    Arrangement::new(ell, hs).expect("distinct by construction")
}

/// Deterministic corpus of `count` random arrangements.
pub fn random_corpus(
    seed: u64,
    count: usize,
    max_dim: usize,
    max_size: usize,
    max_entry: i64,
) -> Vec<Arrangement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_arrangement(&mut rng, max_dim, max_size, max_entry))
        .collect()
}

/// The 200-arrangement corpus with `ℓ ≤ 4`, `|A| ≤ 8`, entries in `[-3, 3]`.
pub fn standard_corpus() -> Vec<Arrangement> {
    random_corpus(CORPUS_SEED, 200, 4, 8, 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_bounded() {
        let a = standard_corpus();
        assert_eq!(a, standard_corpus());
        assert_eq!(a.len(), 200);
        for x in &a {
            assert!((2..=4).contains(&x.ambient_dim()));
            assert!((1..=8).contains(&x.len()));
            for h in x.hyperplanes() {
                assert!(h.normal().iter().all(|c| c.magnitude() <= &3u32.into()));
            }
        }
    }

    #[test]
    fn named_examples() {
        assert_eq!(named("boolean3").unwrap().len(), 3);
        assert_eq!(named("braid4").unwrap().len(), 6);
        assert_eq!(named("generic4").unwrap().len(), 4);
        assert!(named("braid1").is_none());
        assert!(named("nothing").is_none());
    }
}
