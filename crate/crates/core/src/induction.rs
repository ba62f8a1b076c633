//! Search for induction tables.
//!
//! An arrangement `R` in a tree node is grown from the empty set one
//! hyperplane at a time. Adding `H` to `S` is allowed when the restriction
//! `S^H` is itself inductively free with exponents contained in those of
//! `S`; the new exponents then follow from addition-deletion.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charpoly::{integer_root_multiset, node_char_poly};
use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::memodb::{DbMeta, MemoDb, MemoKey, MemoStats};
use crate::restrict::{all_restrictions, RestrictionTree, TreeNode, TreeOptions};
use crate::rootsys::{
    build_positive_roots, dual_height_partition, enumerate_ideals, ideal_arrangement, CartanType,
    ExponentMultiset, Ideal,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailReason {
    /// No induction table exists.
    Exhausted,
    /// The characteristic polynomial has a non-integral or negative root.
    NonSplitCharpoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    InductivelyFree { exponents: ExponentMultiset },
    NotInductivelyFree { reason: FailReason },
}

impl Verdict {
    pub fn is_free(&self) -> bool {
        matches!(self, Verdict::InductivelyFree { .. })
    }

    pub fn exponents(&self) -> Option<&ExponentMultiset> {
        match self {
            Verdict::InductivelyFree { exponents } => Some(exponents),
            Verdict::NotInductivelyFree { .. } => None,
        }
    }

    /// Equal freeness and exponents; the reason for a negative verdict may
    /// differ between runs with different pruning settings.
    pub fn same_outcome(&self, other: &Verdict) -> bool {
        self.exponents() == other.exponents()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::InductivelyFree { exponents } => write!(f, "inductively free, exponents {exponents}"),
            Verdict::NotInductivelyFree { reason: FailReason::Exhausted } => {
                write!(f, "not inductively free (no induction table)")
            }
            Verdict::NotInductivelyFree {
                reason: FailReason::NonSplitCharpoly,
            } => write!(f, "not free (characteristic polynomial does not split)"),
        }
    }
}

/// Exact key of a label set: its bitmask.
pub type SubsetInvariant = u128;

pub fn subset_invariant(set: LabelSet) -> SubsetInvariant {
    set.bits()
}

/// Exponents after adding a hyperplane to an arrangement with exponents `e`
/// whose restriction has exponents `f`: the one value of `e` missing from
/// `f` goes up by one.
pub fn next_exponents(e: &ExponentMultiset, f: &ExponentMultiset) -> Result<ExponentMultiset> {
    match e.difference(f).as_deref() {
        Some(&[m]) => {
            let mut values = f.values().to_vec();
            values.push(m + 1);
            Ok(ExponentMultiset::new(values))
        }
        _ => Err(Error::Internal(format!(
            "{f} is not {e} with one value removed"
        ))),
    }
}

/// Possible sizes of `S^H` for the next addition: `|S| - m` over the
/// distinct exponents `m`.
pub fn candidate_restriction_sizes(e: &ExponentMultiset, size: usize) -> BTreeSet<usize> {
    e.distinct()
        .into_iter()
        .filter_map(|m| size.checked_sub(m as usize))
        .collect()
}

/// Exponents of `n` hyperplanes in rank at most 2, or of the empty
/// arrangement in any rank.
pub fn base_exponents(rank: usize, n: usize) -> Option<ExponentMultiset> {
    let mut values = vec![0u32; rank];
    match (rank, n) {
        (_, 0) => {}
        (1, 1) => values[0] = 1,
        (2, n) => {
            values[0] = 1;
            values[1] = n as u32 - 1;
        }
        _ => return None,
    }
    Some(ExponentMultiset::new(values))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Try further hyperplanes when a branch dead-ends.
    #[default]
    Backtrack,
    /// Commit to the first admissible hyperplane at every step.
    Greedy,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backtrack" => Ok(Strategy::Backtrack),
            "greedy" => Ok(Strategy::Greedy),
            _ => Err(Error::Config(format!("unknown strategy {s:?}"))),
        }
    }
}

/// Inclusive rank window; `min > max` disables it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankWindow {
    pub min: usize,
    pub max: usize,
}

impl RankWindow {
    pub const NONE: RankWindow = RankWindow { min: 1, max: 0 };

    pub fn contains(&self, rank: usize) -> bool {
        self.min <= rank && rank <= self.max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Ranks at which conjugate sets are looked up.
    pub conjugacy_ranks: RankWindow,
    /// Largest rank at which the characteristic polynomial is tested; 0
    /// turns the test off.
    pub charpoly_max_rank: usize,
    pub use_memo: bool,
    pub strategy: Strategy,
    pub certificates: bool,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            conjugacy_ranks: RankWindow { min: 4, max: 7 },
            charpoly_max_rank: 5,
            use_memo: true,
            strategy: Strategy::Backtrack,
            certificates: false,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SearchConfig {
    /// No database, no conjugacy, no pruning.
    pub fn plain() -> Self {
        SearchConfig {
            conjugacy_ranks: RankWindow::NONE,
            charpoly_max_rank: 0,
            use_memo: false,
            ..SearchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("worker count must be positive".into()));
        }
        if self.charpoly_max_rank > 8 {
            return Err(Error::Config("charpoly rank threshold must be at most 8".into()));
        }
        if self.conjugacy_ranks.min <= self.conjugacy_ranks.max
            && (self.conjugacy_ranks.min == 0 || self.conjugacy_ranks.max > 8)
        {
            return Err(Error::Config("conjugacy window must lie within 1..=8".into()));
        }
        Ok(())
    }
}

/// Induction table of one arrangement, with tables for the restrictions it
/// relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductionCertificate {
    pub rank: usize,
    pub object: usize,
    /// Normals of the arrangement in the object's coordinates.
    pub normals: Vec<Vec<i64>>,
    pub exponents: ExponentMultiset,
    pub steps: Vec<CertificateStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateStep {
    /// Normal of the hyperplane added.
    pub hyperplane: Vec<i64>,
    pub before: ExponentMultiset,
    /// Basis of the hyperplane; restricted normals are pairings with it.
    pub wall_basis: Vec<Vec<i64>>,
    pub restriction_object: Option<usize>,
    pub restriction_size: usize,
    pub restriction_exponents: ExponentMultiset,
    pub after: ExponentMultiset,
    /// Table of the restriction, absent when it has rank at most 2 or is
    /// empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<Arc<InductionCertificate>>,
}

/// Counters for one top-level search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub decide_calls: u64,
    pub memo_hits: u64,
    pub conjugate_hits: u64,
    pub charpoly_calls: u64,
    pub charpoly_prunes: u64,
    pub extend_calls: u64,
}

pub struct Outcome {
    pub verdict: Verdict,
    pub certificate: Option<Arc<InductionCertificate>>,
    pub stats: SearchStats,
}

pub struct Engine {
    tree: Arc<RestrictionTree>,
    db: Arc<MemoDb>,
    config: SearchConfig,
    certs: DashMap<(usize, LabelSet), Arc<InductionCertificate>>,
}

pub fn db_meta(tree: &RestrictionTree) -> DbMeta {
    DbMeta {
        ordering_policy: tree.policy.version().into(),
        census_checksum: tree.checksum(),
    }
}

type Steps = Vec<CertificateStep>;

impl Engine {
    pub fn new(tree: Arc<RestrictionTree>, db: Arc<MemoDb>, config: SearchConfig) -> Result<Self> {
        config.validate()?;
        if *db.meta() != db_meta(&tree) {
            return Err(Error::Database(
                "database does not belong to this restriction tree".into(),
            ));
        }
        Ok(Engine {
            tree,
            db,
            config,
            certs: DashMap::new(),
        })
    }

    /// Engine with a fresh tree and an empty database.
    pub fn for_type(ty: CartanType, config: SearchConfig) -> Result<Self> {
        let system = build_positive_roots(ty)?;
        let tree = Arc::new(all_restrictions(&system, TreeOptions::default())?);
        let db = Arc::new(MemoDb::new(db_meta(&tree)));
        Engine::new(tree, db, config)
    }

    pub fn tree(&self) -> &Arc<RestrictionTree> {
        &self.tree
    }

    pub fn db(&self) -> &Arc<MemoDb> {
        &self.db
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    /// Decides inductive freeness of `r` in the given node.
    pub fn decide(&self, node: usize, r: LabelSet) -> Result<Outcome> {
        let mut stats = SearchStats::default();
        let (verdict, certificate) = self.decide_inner(node, r, &mut stats)?;
        Ok(Outcome {
            verdict,
            certificate,
            stats,
        })
    }

    /// Extends `s`, already known to be inductively free with exponents
    /// `e`, to `r`. Returns the exponents of `r` on success.
    pub fn inductive_chain(
        &self,
        node: usize,
        r: LabelSet,
        s: LabelSet,
        e: &ExponentMultiset,
    ) -> Result<Option<ExponentMultiset>> {
        let n = self.node_checked(node, r)?;
        if !s.is_subset(r) || e.len() != n.rank || e.sum() != s.len() {
            return Err(Error::Internal(format!(
                "inconsistent chain start {s:?} with exponents {e} in {r:?}"
            )));
        }
        let mut stats = SearchStats::default();
        self.extend(n, r, s, e.clone(), &mut HashSet::new(), &mut stats, None)
    }

    fn node_checked(&self, node: usize, r: LabelSet) -> Result<&TreeNode> {
        let n = self
            .tree
            .nodes()
            .get(node)
            .ok_or_else(|| Error::Internal(format!("no object {node}")))?;
        if r.bound() > n.len() {
            return Err(Error::Internal(format!(
                "{r:?} is not a subset of the {} roots of object {node}",
                n.len()
            )));
        }
        Ok(n)
    }

    fn decide_inner(
        &self,
        node_id: usize,
        r: LabelSet,
        stats: &mut SearchStats,
    ) -> Result<(Verdict, Option<Arc<InductionCertificate>>)> {
        stats.decide_calls += 1;
        let node = self.node_checked(node_id, r)?;
        let cfg = &self.config;
        if cfg.certificates {
            if let Some(c) = self.certs.get(&(node_id, r)) {
                let v = Verdict::InductivelyFree {
                    exponents: c.exponents.clone(),
                };
                return Ok((v, Some(c.clone())));
            }
        }
        if cfg.use_memo {
            if let Some(rec) = self.db.lookup(&MemoKey::new(node, r)) {
                // a positive record carries no table, so it is recomputed
                // when tables are wanted
                if !(cfg.certificates && rec.verdict.is_free()) {
                    stats.memo_hits += 1;
                    return Ok((rec.verdict, None));
                }
            } else if !cfg.certificates && cfg.conjugacy_ranks.contains(node.rank) {
                if let Some(rec) = self.db.lookup_conjugate(node, r) {
                    stats.conjugate_hits += 1;
                    return Ok((rec.verdict, None));
                }
            }
        }
        let mut chi_roots = None;
        if node.rank <= cfg.charpoly_max_rank {
            stats.charpoly_calls += 1;
            let chi = node_char_poly(node, r)?;
            match integer_root_multiset(&chi) {
                Some(roots) => chi_roots = Some(roots),
                None => {
                    stats.charpoly_prunes += 1;
                    let v = Verdict::NotInductivelyFree {
                        reason: FailReason::NonSplitCharpoly,
                    };
                    if cfg.use_memo {
                        self.db.insert(node, r, v.clone());
                    }
                    return Ok((v, None));
                }
            }
        }

        let mut steps: Option<Steps> = cfg.certificates.then(Vec::new);
        let found = self.extend(
            node,
            r,
            LabelSet::EMPTY,
            ExponentMultiset::zeros(node.rank),
            &mut HashSet::new(),
            stats,
            steps.as_mut(),
        )?;
        let verdict = match &found {
            Some(exponents) => {
                if chi_roots.as_ref().is_some_and(|roots| roots != exponents) {
                    return Err(Error::Internal(format!(
                        "exponents {exponents} disagree with the characteristic polynomial of {r:?} in object {node_id}"
                    )));
                }
                Verdict::InductivelyFree {
                    exponents: exponents.clone(),
                }
            }
            None => Verdict::NotInductivelyFree {
                reason: FailReason::Exhausted,
            },
        };
        if cfg.use_memo {
            self.db.insert(node, r, verdict.clone());
        }
        let cert = match (found, steps) {
            (Some(exponents), Some(mut steps)) => {
                steps.reverse();
                let c = Arc::new(InductionCertificate {
                    rank: node.rank,
                    object: node_id,
                    normals: node.normals(r),
                    exponents,
                    steps,
                });
                self.certs.insert((node_id, r), c.clone());
                Some(c)
            }
            _ => None,
        };
        Ok((verdict, cert))
    }

    /// Depth-first extension of `s` towards `r`. Steps are appended in
    /// reverse order while unwinding.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        node: &TreeNode,
        r: LabelSet,
        s: LabelSet,
        e: ExponentMultiset,
        failed: &mut HashSet<LabelSet>,
        stats: &mut SearchStats,
        mut steps: Option<&mut Steps>,
    ) -> Result<Option<ExponentMultiset>> {
        if s == r {
            return Ok(Some(e));
        }
        // exponents of s are determined by s, so a dead end stays one
        if failed.contains(&s) {
            return Ok(None);
        }
        stats.extend_calls += 1;
        let sizes = candidate_restriction_sizes(&e, s.len());
        for h in r.difference(s).iter() {
            let (child, a) = if node.rank == 1 {
                (None, LabelSet::EMPTY)
            } else {
                let edge = self.tree.edge(node.id, h);
                (Some(edge), edge.map(s))
            };
            if !sizes.contains(&a.len()) {
                continue;
            }
            let child_rank = node.rank - 1;
            let (f, sub) = if child_rank <= 2 || a.is_empty() {
                let f = base_exponents(child_rank, a.len())
                    .ok_or_else(|| Error::Internal(format!("{} lines in rank {child_rank}", a.len())))?;
                (f, None)
            } else {
                let child_id = child.expect("rank above 1 has edges").child;
                match self.decide_inner(child_id, a, stats)? {
                    (Verdict::InductivelyFree { exponents }, sub) => (exponents, sub),
                    _ => continue,
                }
            };
            if !f.is_submultiset_of(&e) {
                continue;
            }
            let e_next = next_exponents(&e, &f)?;
            let done = self.extend(node, r, s.with(h), e_next.clone(), failed, stats, steps.as_deref_mut())?;
            match done {
                Some(exponents) => {
                    if let Some(st) = steps {
                        st.push(CertificateStep {
                            hyperplane: node.normals(LabelSet::singleton(h)).remove(0),
                            before: e,
                            wall_basis: child.map(|c| c.basis.clone()).unwrap_or_default(),
                            restriction_object: child.map(|c| c.child),
                            restriction_size: a.len(),
                            restriction_exponents: f,
                            after: e_next,
                            restriction: sub,
                        });
                    }
                    return Ok(Some(exponents));
                }
                None if self.config.strategy == Strategy::Greedy => return Ok(None),
                None => {}
            }
        }
        failed.insert(s);
        Ok(None)
    }

    /// Decides the arrangement of an ideal of the ambient system.
    pub fn check_ideal(&self, ideal: &Ideal) -> Result<Outcome> {
        let r = ideal_arrangement(ideal, &self.tree.root().system)?;
        self.decide(0, r)
    }

    /// Exponents predicted for an ideal: the dual height partition of its
    /// complement.
    pub fn predicted_exponents(&self, ideal: &Ideal) -> Result<ExponentMultiset> {
        let system = &self.tree.root().system;
        let r = ideal_arrangement(ideal, system)?;
        Ok(dual_height_partition(r, system, system.rank()))
    }

    /// Checks every ideal of the ambient system on a pool of
    /// `config.workers` threads.
    pub fn check_all_ideals(&self) -> Result<BatchReport> {
        let ideals = enumerate_ideals(&self.tree.root().system);
        self.check_ideals(&ideals)
    }

    pub fn check_ideals(&self, ideals: &[Ideal]) -> Result<BatchReport> {
        let start = Instant::now();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.workers)
            .stack_size(256 << 20)
            .build()
            .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
        let records: Vec<IdealRecord> = pool.install(|| {
            ideals
                .par_iter()
                .enumerate()
                .map(|(index, ideal)| self.record(index, ideal))
                .collect()
        });
        Ok(BatchReport::new(
            self.tree.ambient.map(|t| t.to_string()),
            records,
            self.db.stats(),
            start.elapsed().as_micros() as u64,
        ))
    }

    fn record(&self, index: usize, ideal: &Ideal) -> IdealRecord {
        let start = Instant::now();
        let system = &self.tree.root().system;
        let arrangement = system.all_labels().difference(ideal.members);
        let predicted = dual_height_partition(arrangement, system, system.rank());
        let mut rec = IdealRecord {
            index,
            ideal: ideal.members.to_vec(),
            arrangement_size: arrangement.len(),
            verdict: None,
            predicted,
            matches_prediction: false,
            wall_time_us: 0,
            stats: SearchStats::default(),
            error: None,
            certificate: None,
        };
        match self.check_ideal(ideal) {
            Ok(out) => {
                rec.matches_prediction = out.verdict.exponents() == Some(&rec.predicted);
                rec.verdict = Some(out.verdict);
                rec.stats = out.stats;
                rec.certificate = out.certificate;
            }
            Err(e) => rec.error = Some(e.to_string()),
        }
        rec.wall_time_us = start.elapsed().as_micros() as u64;
        rec
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdealRecord {
    pub index: usize,
    /// Labels of the ideal's roots.
    pub ideal: Vec<usize>,
    pub arrangement_size: usize,
    pub verdict: Option<Verdict>,
    pub predicted: ExponentMultiset,
    pub matches_prediction: bool,
    pub wall_time_us: u64,
    pub stats: SearchStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub certificate: Option<Arc<InductionCertificate>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchReport {
    pub type_tag: Option<String>,
    pub ideal_count: usize,
    /// Ideals whose arrangement has at least one hyperplane.
    pub nonempty_arrangement_count: usize,
    pub free_count: usize,
    pub not_free_count: usize,
    pub prediction_mismatches: usize,
    pub errors: usize,
    pub memo: MemoStats,
    pub wall_time_us: u64,
    pub records: Vec<IdealRecord>,
}

impl BatchReport {
    fn new(type_tag: Option<String>, records: Vec<IdealRecord>, memo: MemoStats, wall_time_us: u64) -> Self {
        let count = |f: &dyn Fn(&IdealRecord) -> bool| records.iter().filter(|r| f(r)).count();
        BatchReport {
            type_tag,
            ideal_count: records.len(),
            nonempty_arrangement_count: count(&|r| r.arrangement_size > 0),
            free_count: count(&|r| r.verdict.as_ref().is_some_and(Verdict::is_free)),
            not_free_count: count(&|r| r.verdict.as_ref().is_some_and(|v| !v.is_free())),
            prediction_mismatches: count(&|r| r.verdict.is_some() && !r.matches_prediction),
            errors: count(&|r| r.error.is_some()),
            memo,
            wall_time_us,
            records,
        }
    }

    /// Every ideal free with the predicted exponents.
    pub fn all_as_predicted(&self) -> bool {
        self.errors == 0 && self.not_free_count == 0 && self.prediction_mismatches == 0
    }

    /// Verdict per ideal, for comparing runs.
    pub fn verdicts(&self) -> Vec<(Vec<usize>, Option<Verdict>)> {
        self.records.iter().map(|r| (r.ideal.clone(), r.verdict.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::char_poly;
    use crate::rootsys::Root;

    fn ms(v: &[u32]) -> ExponentMultiset {
        ExponentMultiset::new(v.to_vec())
    }

    fn engine(tag: &str, config: SearchConfig) -> Engine {
        Engine::for_type(tag.parse().unwrap(), config).unwrap()
    }

    #[test]
    fn exponent_arithmetic() {
        assert_eq!(next_exponents(&ms(&[0, 1]), &ms(&[1])).unwrap(), ms(&[1, 1]));
        assert_eq!(next_exponents(&ms(&[0, 0, 0]), &ms(&[0, 0])).unwrap(), ms(&[0, 0, 1]));
        assert_eq!(next_exponents(&ms(&[1, 2, 2]), &ms(&[1, 2])).unwrap(), ms(&[1, 2, 3]));
        assert!(next_exponents(&ms(&[1, 2]), &ms(&[3])).is_err());
        assert!(next_exponents(&ms(&[1, 2, 3]), &ms(&[1])).is_err());

        let set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
        assert_eq!(candidate_restriction_sizes(&ms(&[0, 0]), 0), set(&[0]));
        assert_eq!(candidate_restriction_sizes(&ms(&[1, 2]), 3), set(&[1, 2]));
        assert_eq!(candidate_restriction_sizes(&ms(&[1, 1]), 2), set(&[1]));

        assert_eq!(subset_invariant(LabelSet::EMPTY), 0);
        assert_eq!(subset_invariant(LabelSet::from(vec![0, 1])), 3);
        assert_eq!(subset_invariant(LabelSet::from(vec![2])), 4);

        assert_eq!(base_exponents(2, 4), Some(ms(&[1, 3])));
        assert_eq!(base_exponents(2, 1), Some(ms(&[0, 1])));
        assert_eq!(base_exponents(1, 1), Some(ms(&[1])));
        assert_eq!(base_exponents(5, 0), Some(ExponentMultiset::zeros(5)));
        assert_eq!(base_exponents(3, 2), None);
    }

    #[test]
    fn small_verdicts() {
        let a2 = engine("A2", SearchConfig::default());
        let full = a2.tree().root().system.all_labels();
        assert_eq!(a2.decide(0, full).unwrap().verdict.exponents(), Some(&ms(&[1, 2])));
        assert_eq!(
            a2.decide(0, LabelSet::EMPTY).unwrap().verdict.exponents(),
            Some(&ms(&[0, 0]))
        );
        let g2 = engine("G2", SearchConfig::default());
        let empty_ideal = Ideal {
            members: LabelSet::EMPTY,
        };
        assert_eq!(g2.check_ideal(&empty_ideal).unwrap().verdict.exponents(), Some(&ms(&[1, 5])));
        let top = Ideal {
            members: g2.tree().root().system.all_labels(),
        };
        assert_eq!(g2.check_ideal(&top).unwrap().verdict.exponents(), Some(&ms(&[0, 0])));
        let a1 = engine("A1", SearchConfig::default());
        let report = a1.check_all_ideals().unwrap();
        assert_eq!(report.ideal_count, 2);
        assert!(report.all_as_predicted());
    }

    #[test]
    fn weyl_arrangements_are_free_with_their_exponents() {
        for (tag, exps) in [("A3", vec![1, 2, 3]), ("B3", vec![1, 3, 5]), ("D4", vec![1, 3, 3, 5]), ("F4", vec![1, 5, 7, 11])] {
            let e = engine(tag, SearchConfig::default());
            let v = e.decide(0, e.tree().root().system.all_labels()).unwrap().verdict;
            assert_eq!(v.exponents(), Some(&ms(&exps)), "{tag}");
        }
    }

    #[test]
    fn small_batches() {
        for (tag, count) in [("A3", 14), ("G2", 8), ("B3", 20)] {
            let report = engine(tag, SearchConfig::default()).check_all_ideals().unwrap();
            assert_eq!(report.ideal_count, count, "{tag}");
            assert!(report.all_as_predicted(), "{tag}");
        }
    }

    #[test]
    fn charpoly_pruning_catches_a_non_free_arrangement() {
        // A3 without two roots that sum to a third: chi does not split
        let e = engine("A3", SearchConfig::default());
        let sys = &e.tree().root().system;
        let drop = |v: &[i32]| sys.label_of(&Root(v.to_vec())).unwrap();
        let set = sys.all_labels().difference(LabelSet::from(vec![drop(&[1, 1, 0]), drop(&[0, 1, 1])]));
        let normals = e.tree().root().normals(set);
        let split = integer_root_multiset(&char_poly(3, &normals).unwrap());
        let out = e.decide(0, set).unwrap();
        assert_eq!(split.is_some(), out.verdict.is_free());
        let plain = engine("A3", SearchConfig::plain()).decide(0, set).unwrap();
        assert!(plain.verdict.same_outcome(&out.verdict));
    }

    #[test]
    fn exhaustive_subsets_agree_with_and_without_pruning() {
        // every subset of the A3 and B3 objects: free exactly when the plain
        // search finds a table, and exponents always match chi
        for tag in ["A3", "B3"] {
            let fast = engine(tag, SearchConfig::default());
            let plain = engine(tag, SearchConfig::plain());
            let n = fast.tree().root().len();
            for bits in 0u128..1 << n {
                let s = LabelSet::from_bits(bits);
                let a = fast.decide(0, s).unwrap().verdict;
                let b = plain.decide(0, s).unwrap().verdict;
                assert!(a.same_outcome(&b), "{tag} {s:?}: {a} vs {b}");
                if let Some(exps) = b.exponents() {
                    let chi = char_poly(3, &fast.tree().root().normals(s)).unwrap();
                    assert_eq!(integer_root_multiset(&chi).as_ref(), Some(exps));
                }
            }
        }
    }

    #[test]
    fn greedy_never_claims_more_than_backtracking() {
        let mut cfg = SearchConfig::plain();
        cfg.strategy = Strategy::Greedy;
        let greedy = engine("B3", cfg);
        let full = engine("B3", SearchConfig::plain());
        let n = full.tree().root().len();
        for bits in 0u128..1 << n {
            let s = LabelSet::from_bits(bits);
            let g = greedy.decide(0, s).unwrap().verdict;
            if g.is_free() {
                assert_eq!(g, full.decide(0, s).unwrap().verdict);
            }
        }
    }

    #[test]
    fn certificates_follow_the_search() {
        let cfg = SearchConfig {
            certificates: true,
            ..SearchConfig::default()
        };
        let e = engine("D4", cfg);
        let out = e.decide(0, e.tree().root().system.all_labels()).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(cert.steps.len(), 12);
        assert_eq!(cert.exponents, ms(&[1, 3, 3, 5]));
        let mut e_prev = ExponentMultiset::zeros(4);
        for st in &cert.steps {
            assert_eq!(st.before, e_prev);
            assert!(st.restriction_exponents.is_submultiset_of(&st.before));
            e_prev = st.after.clone();
        }
        assert_eq!(e_prev, cert.exponents);
        assert!(cert.steps.iter().any(|s| s.restriction.is_some()));
    }

    #[test]
    fn inductive_chain_contract() {
        let e = engine("A2", SearchConfig::default());
        let full = e.tree().root().system.all_labels();
        assert_eq!(
            e.inductive_chain(0, full, LabelSet::EMPTY, &ExponentMultiset::zeros(2)).unwrap(),
            Some(ms(&[1, 2]))
        );
        assert!(e
            .inductive_chain(0, LabelSet::singleton(0), LabelSet::singleton(1), &ms(&[0, 1]))
            .is_err());
        assert!(e.decide(0, LabelSet::singleton(7)).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = SearchConfig::default();
        c.workers = 0;
        assert!(c.validate().is_err());
        let mut c = SearchConfig::default();
        c.conjugacy_ranks = RankWindow { min: 0, max: 3 };
        assert!(c.validate().is_err());
        assert!(SearchConfig::plain().validate().is_ok());
        assert_eq!("greedy".parse::<Strategy>().unwrap(), Strategy::Greedy);
        assert!("other".parse::<Strategy>().is_err());
    }
}
