use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use super::{build_lattice, Arrangement, ArrangementKey, CharPoly, IntersectionLattice};

/// Memo of intersection lattices keyed by the multiset of canonical normals.
///
/// The lattice handed out for an arrangement is built over its sorted copy
/// (`Arrangement::sorted`), so atom indices refer to that order. An optional
/// directory persists lattices as JSON named by arrangement digest; entries
/// read back are validated before use.
#[derive(Debug, Default)]
pub struct LatticeCache {
    lattices: Mutex<HashMap<ArrangementKey, Arc<IntersectionLattice>>>,
    polys: Mutex<HashMap<ArrangementKey, CharPoly>>,
    dir: Mutex<Option<PathBuf>>,
}

static GLOBAL: OnceLock<LatticeCache> = OnceLock::new();

impl LatticeCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache used by the free functions of this crate.
    pub fn global() -> &'static LatticeCache {
        GLOBAL.get_or_init(LatticeCache::new)
    }

    pub fn set_dir(&self, dir: Option<PathBuf>) {
        *self.dir.lock().unwrap() = dir;
    }

    pub fn dir(&self) -> Option<PathBuf> {
        self.dir.lock().unwrap().clone()
    }

    pub fn len(&self) -> usize {
        self.lattices.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.lattices.lock().unwrap().clear();
        self.polys.lock().unwrap().clear();
    }

    pub fn lattice(&self, a: &Arrangement) -> Arc<IntersectionLattice> {
        let key = a.key();
        if let Some(l) = self.lattices.lock().unwrap().get(&key) {
            return l.clone();
        }
        let sorted = a.sorted();
        let dir = self.dir();
        let built = dir
            .as_deref()
            .and_then(|d| load_entry(d, &sorted))
            .unwrap_or_else(|| {
                let l = build_lattice(&sorted);
                if let Some(d) = dir.as_deref() {
                    // a failed write only costs a rebuild next time
                    let _ = store_entry(d, &l);
                }
                l
            });
        let built = Arc::new(built);
        self.polys
            .lock()
            .unwrap()
            .entry(key.clone())
            .or_insert_with(|| built.char_poly());
        self.lattices
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(built)
            .clone()
    }

    pub fn char_poly(&self, a: &Arrangement) -> CharPoly {
        if let Some(p) = self.polys.lock().unwrap().get(&a.key()) {
            return p.clone();
        }
        self.lattice(a).char_poly()
    }
}

fn entry_path(dir: &Path, a: &Arrangement) -> PathBuf {
    dir.join(format!("{}.json", a.digest()))
}

fn load_entry(dir: &Path, sorted: &Arrangement) -> Option<IntersectionLattice> {
    let text = fs::read_to_string(entry_path(dir, sorted)).ok()?;
    let mut l: IntersectionLattice = serde_json::from_str(&text).ok()?;
    l.reindex();
    if l.arrangement() != sorted || l.validate().is_err() {
        return None;
    }
    Some(l)
}

fn store_entry(dir: &Path, l: &IntersectionLattice) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let path = entry_path(dir, l.arrangement());
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string(l)?)?;
    fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let a = Arrangement::from_i64(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]).unwrap();
        let c = LatticeCache::new();
        c.set_dir(Some(dir.path().to_path_buf()));
        let l1 = c.lattice(&a);
        let path = entry_path(dir.path(), &a.sorted());
        assert!(path.exists());

        let fresh = LatticeCache::new();
        fresh.set_dir(Some(dir.path().to_path_buf()));
        let l2 = fresh.lattice(&a);
        assert_eq!(*l1, *l2);
        assert_eq!(l2.find(&l2.flat(l2.top()).flat), Some(l2.top()));

        // tamper with a Möbius value: the entry must be rejected and rebuilt
        let text = fs::read_to_string(&path)
            .unwrap()
            .replacen("\"mobius\":2", "\"mobius\":5", 1);
        fs::write(&path, text).unwrap();
        let other = LatticeCache::new();
        other.set_dir(Some(dir.path().to_path_buf()));
        assert_eq!(other.lattice(&a).flat(l1.top()).mobius, 2);
    }

    #[test]
    fn keyed_by_multiset() {
        let c = LatticeCache::new();
        let a = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let b = Arrangement::from_i64(2, &[&[0, 1], &[1, 0]]).unwrap();
        c.lattice(&a);
        c.lattice(&b);
        assert_eq!(c.len(), 1);
    }
}
