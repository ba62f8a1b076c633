//! Verdict database shared by all searches of a run.
//!
//! Records are keyed by rank, object, size and the label set itself. Sets
//! are also filed under their orbit signature so that a set conjugate to a
//! known one can be recognized by an explicit automorphism.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induction::Verdict;
use crate::labels::LabelSet;
use crate::restrict::TreeNode;

const DB_FORMAT: &str = "idealfree-memo";
const DB_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MemoKey {
    pub rank: u8,
    pub object: u32,
    pub size: u16,
    /// The label set; its bitmask is the subset invariant.
    pub invariant: LabelSet,
}

impl MemoKey {
    pub fn new(node: &TreeNode, set: LabelSet) -> Self {
        MemoKey {
            rank: node.rank as u8,
            object: node.id as u32,
            size: set.len() as u16,
            invariant: set,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoRecord {
    pub verdict: Verdict,
    pub signature: Vec<u16>,
    /// Set under which the verdict was first recorded, if this entry was
    /// added as a conjugate of it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias_of: Option<LabelSet>,
}

/// What a database is valid for: the ordering policy and the restriction
/// tree it was built against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbMeta {
    pub ordering_policy: String,
    pub census_checksum: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoStats {
    pub exact_hits: u64,
    pub conjugate_hits: u64,
    pub misses: u64,
    /// Candidates that shared a signature but were not conjugate.
    pub confirm_failures: u64,
    pub inserts: u64,
}

#[derive(Default)]
struct Counters {
    exact_hits: AtomicU64,
    conjugate_hits: AtomicU64,
    misses: AtomicU64,
    confirm_failures: AtomicU64,
    inserts: AtomicU64,
}

type BucketKey = (u32, u16, Vec<u16>);

pub struct MemoDb {
    meta: DbMeta,
    records: DashMap<MemoKey, MemoRecord>,
    buckets: DashMap<BucketKey, Vec<LabelSet>>,
    counters: Counters,
}

impl std::fmt::Debug for MemoDb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MemoDb")
            .field("meta", &self.meta)
            .field("records", &self.records.len())
            .finish()
    }
}

impl MemoDb {
    pub fn new(meta: DbMeta) -> Self {
        MemoDb {
            meta,
            records: DashMap::new(),
            buckets: DashMap::new(),
            counters: Counters::default(),
        }
    }

    pub fn meta(&self) -> &DbMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn lookup(&self, key: &MemoKey) -> Option<MemoRecord> {
        match self.records.get(key) {
            Some(r) => {
                self.counters.exact_hits.fetch_add(1, Ordering::Relaxed);
                Some(r.clone())
            }
            None => {
                self.counters.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    /// Looks for a recorded set that some automorphism of `node` carries to
    /// `set`. Candidates are first filtered by orbit signature. A hit is
    /// stored as an alias so the next lookup of `set` is exact.
    pub fn lookup_conjugate(&self, node: &TreeNode, set: LabelSet) -> Option<MemoRecord> {
        let signature = node.orbits.signature(set);
        let bucket = (node.id as u32, set.len() as u16, signature);
        let candidates: Vec<LabelSet> = self
            .buckets
            .get(&bucket)?
            .iter()
            .copied()
            .filter(|&c| c != set)
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let elements = node.aut.elements()?;
        // one pass over the group: images of `set` that are candidates
        let wanted: HashSet<LabelSet> = candidates.iter().copied().collect();
        let Some(cand) = elements.iter().map(|g| g.apply(set)).find(|img| wanted.contains(img)) else {
            self.counters
                .confirm_failures
                .fetch_add(candidates.len() as u64, Ordering::Relaxed);
            return None;
        };
        let stored = self.records.get(&MemoKey::new(node, cand))?.clone();
        let alias = MemoRecord {
            verdict: stored.verdict,
            signature: stored.signature,
            alias_of: Some(stored.alias_of.unwrap_or(cand)),
        };
        self.records.insert(MemoKey::new(node, set), alias.clone());
        self.counters.conjugate_hits.fetch_add(1, Ordering::Relaxed);
        Some(alias)
    }

    /// Records a verdict for `set` in `node`. Last writer wins; concurrent
    /// writers always carry the same verdict.
    pub fn insert(&self, node: &TreeNode, set: LabelSet, verdict: Verdict) {
        let signature = node.orbits.signature(set);
        let key = MemoKey::new(node, set);
        self.insert_record(
            key,
            MemoRecord {
                verdict,
                signature,
                alias_of: None,
            },
        );
    }

    fn insert_record(&self, key: MemoKey, record: MemoRecord) {
        if record.alias_of.is_none() {
            let bucket = (key.object, key.size, record.signature.clone());
            let mut sets = self.buckets.entry(bucket).or_default();
            if !sets.contains(&key.invariant) {
                sets.push(key.invariant);
            }
        }
        self.records.insert(key, record);
        self.counters.inserts.fetch_add(1, Ordering::Relaxed);
    }

    pub fn stats(&self) -> MemoStats {
        let c = &self.counters;
        MemoStats {
            exact_hits: c.exact_hits.load(Ordering::Relaxed),
            conjugate_hits: c.conjugate_hits.load(Ordering::Relaxed),
            misses: c.misses.load(Ordering::Relaxed),
            confirm_failures: c.confirm_failures.load(Ordering::Relaxed),
            inserts: c.inserts.load(Ordering::Relaxed),
        }
    }

    /// All records in canonical order.
    pub fn records(&self) -> Vec<(MemoKey, MemoRecord)> {
        let mut out: Vec<(MemoKey, MemoRecord)> = self
            .records
            .iter()
            .map(|e| (*e.key(), e.value().clone()))
            .collect();
        out.sort_by_key(|(k, _)| (k.rank, k.object, k.size, k.invariant.bits()));
        out
    }

    /// Record counts per `(rank, object)`, split into free and not free.
    pub fn summary(&self) -> BTreeMap<(u8, u32), (usize, usize)> {
        let mut out: BTreeMap<(u8, u32), (usize, usize)> = BTreeMap::new();
        for e in self.records.iter() {
            let slot = out.entry((e.key().rank, e.key().object)).or_default();
            if e.value().verdict.is_free() {
                slot.0 += 1;
            } else {
                slot.1 += 1;
            }
        }
        out
    }

    /// Union of both record sets. Fails if the databases were built against
    /// different trees or disagree on any set.
    pub fn merge(&self, other: &MemoDb) -> Result<MemoDb> {
        if self.meta != other.meta {
            return Err(Error::Database(format!(
                "cannot merge databases built for {:?} and {:?}",
                self.meta, other.meta
            )));
        }
        let out = MemoDb::new(self.meta.clone());
        for (k, r) in self.records().into_iter().chain(other.records()) {
            if let Some(existing) = out.records.get(&k) {
                if !existing.verdict.same_outcome(&r.verdict) {
                    return Err(Error::Database(format!(
                        "conflicting verdicts for {k:?}: {:?} vs {:?}",
                        existing.verdict, r.verdict
                    )));
                }
                continue;
            }
            out.insert_record(k, r);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let file = DbFile {
            format: DB_FORMAT.into(),
            format_version: DB_FORMAT_VERSION,
            meta: self.meta.clone(),
            records: self
                .records()
                .into_iter()
                .map(|(key, record)| DbEntry { key, record })
                .collect(),
        };
        Ok(serde_json::to_vec_pretty(&file)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Loads a database file without checking what it was built against.
    pub fn load_any(path: &Path) -> Result<MemoDb> {
        let bytes = std::fs::read(path)?;
        let file: DbFile = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Database(format!("{}: {e}", path.display())))?;
        if file.format != DB_FORMAT || file.format_version != DB_FORMAT_VERSION {
            return Err(Error::Database(format!(
                "unsupported database format {} v{}",
                file.format, file.format_version
            )));
        }
        let db = MemoDb::new(file.meta);
        for e in file.records {
            if e.key.size as usize != e.key.invariant.len() {
                return Err(Error::Database(format!("corrupt record {:?}", e.key)));
            }
            db.insert_record(e.key, e.record);
        }
        db.counters.inserts.store(0, Ordering::Relaxed);
        Ok(db)
    }

    /// Loads a database and refuses it unless it matches `expected`.
    pub fn load(path: &Path, expected: &DbMeta) -> Result<MemoDb> {
        let db = Self::load_any(path)?;
        if db.meta.ordering_policy != expected.ordering_policy {
            return Err(Error::Database(format!(
                "database uses ordering policy {}, expected {}",
                db.meta.ordering_policy, expected.ordering_policy
            )));
        }
        if db.meta.census_checksum != expected.census_checksum {
            return Err(Error::Database(
                "database was built against a different restriction tree".into(),
            ));
        }
        Ok(db)
    }
}

#[derive(Serialize, Deserialize)]
struct DbEntry {
    key: MemoKey,
    record: MemoRecord,
}

#[derive(Serialize, Deserialize)]
struct DbFile {
    format: String,
    format_version: u32,
    meta: DbMeta,
    records: Vec<DbEntry>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induction::FailReason;
    use crate::restrict::{all_restrictions, RestrictionTree, TreeOptions};
    use crate::rootsys::{build_positive_roots, ExponentMultiset};

    fn tree(tag: &str) -> RestrictionTree {
        all_restrictions(&build_positive_roots(tag.parse().unwrap()).unwrap(), TreeOptions::default()).unwrap()
    }

    fn meta(t: &RestrictionTree) -> DbMeta {
        DbMeta {
            ordering_policy: t.policy.version().into(),
            census_checksum: t.checksum(),
        }
    }

    fn free(e: &[u32]) -> Verdict {
        Verdict::InductivelyFree {
            exponents: ExponentMultiset::new(e.to_vec()),
        }
    }

    #[test]
    fn exact_lookup() {
        let t = tree("A3");
        let db = MemoDb::new(meta(&t));
        let node = t.root();
        let a = LabelSet::from_bits(0b11);
        let b = LabelSet::singleton(2);
        assert!(db.lookup(&MemoKey::new(node, a)).is_none());
        db.insert(node, a, free(&[0, 1, 1]));
        db.insert(node, a, free(&[0, 1, 1]));
        assert_eq!(db.len(), 1);
        assert_eq!(db.lookup(&MemoKey::new(node, a)).unwrap().verdict, free(&[0, 1, 1]));
        assert!(db.lookup(&MemoKey::new(node, b)).is_none());
        let no = Verdict::NotInductivelyFree {
            reason: FailReason::Exhausted,
        };
        db.insert(node, b, no.clone());
        assert_eq!(db.lookup(&MemoKey::new(node, b)).unwrap().verdict, no);
        let s = db.stats();
        assert_eq!((s.exact_hits, s.misses, s.inserts), (2, 2, 3));
    }

    #[test]
    fn conjugate_lookup_confirms_with_an_automorphism() {
        let t = tree("A3");
        let node = t.root();
        let elements = node.aut.elements().unwrap();
        let db = MemoDb::new(meta(&t));
        let s = LabelSet::from(vec![0, 3]);
        db.insert(node, s, free(&[0, 1, 1]));
        for g in elements {
            let image = g.apply(s);
            let hit = db.lookup_conjugate(node, image);
            if image != s {
                assert_eq!(hit.unwrap().alias_of, Some(s));
                assert!(db.lookup(&MemoKey::new(node, image)).is_some());
            }
        }
    }

    #[test]
    fn signature_filter_and_confirmation() {
        // exhaustive over all subsets of the A3 object: sets that share a
        // signature with a stored set are hits exactly when conjugate
        let t = tree("A3");
        let node = t.root();
        let n = node.len();
        let elements = node.aut.elements().unwrap();
        let mut colliding = 0;
        for a in 0u128..1 << n {
            let db = MemoDb::new(meta(&t));
            let sa = LabelSet::from_bits(a);
            db.insert(node, sa, free(&[]));
            for b in 0u128..1 << n {
                let sb = LabelSet::from_bits(b);
                if sb == sa {
                    continue;
                }
                let conj = elements.iter().any(|g| g.apply(sa) == sb);
                let same_sig = node.orbits.signature(sa) == node.orbits.signature(sb);
                if conj {
                    assert!(same_sig);
                }
                if same_sig && !conj {
                    colliding += 1;
                }
                let before = db.stats().confirm_failures;
                let hit = db.lookup_conjugate(node, sb).is_some();
                assert_eq!(hit, conj);
                if !same_sig {
                    assert_eq!(db.stats().confirm_failures, before);
                }
            }
        }
        // A3 has one orbit, so equal sizes share a signature; some equal-size
        // sets are not conjugate (e.g. two orthogonal roots vs two at 60 degrees)
        assert!(colliding > 0);
    }

    #[test]
    fn merge_and_conflicts() {
        let t = tree("A3");
        let node = t.root();
        let d1 = MemoDb::new(meta(&t));
        let d2 = MemoDb::new(meta(&t));
        d1.insert(node, LabelSet::singleton(0), free(&[0, 0, 1]));
        d2.insert(node, LabelSet::singleton(1), free(&[0, 0, 1]));
        let empty = MemoDb::new(meta(&t));
        assert_eq!(d1.merge(&empty).unwrap().records(), d1.records());
        let m12 = d1.merge(&d2).unwrap();
        let m21 = d2.merge(&d1).unwrap();
        assert_eq!(m12.records(), m21.records());
        assert_eq!(m12.len(), 2);
        let bad = MemoDb::new(meta(&t));
        bad.insert(node, LabelSet::singleton(0), free(&[0, 1, 0]));
        bad.insert(
            node,
            LabelSet::singleton(0),
            Verdict::NotInductivelyFree {
                reason: FailReason::Exhausted,
            },
        );
        assert!(d1.merge(&bad).is_err());
        let other = MemoDb::new(meta(&tree("B3")));
        assert!(d1.merge(&other).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let t = tree("A3");
        let node = t.root();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.json");
        let empty = MemoDb::new(meta(&t));
        empty.save(&path).unwrap();
        assert!(MemoDb::load(&path, &meta(&t)).unwrap().is_empty());

        let db = MemoDb::new(meta(&t));
        for l in 0..6 {
            db.insert(node, LabelSet::singleton(l).with(5 - l), free(&[0, 1, 1]));
        }
        db.save(&path).unwrap();
        let back = MemoDb::load(&path, &meta(&t)).unwrap();
        assert_eq!(back.records(), db.records());
        assert_eq!(back.to_json().unwrap(), std::fs::read(&path).unwrap());

        let mut wrong = meta(&t);
        wrong.ordering_policy = "other/1".into();
        assert!(MemoDb::load(&path, &wrong).is_err());
        std::fs::write(&path, b"{not json").unwrap();
        assert!(MemoDb::load(&path, &meta(&t)).is_err());
    }
}
