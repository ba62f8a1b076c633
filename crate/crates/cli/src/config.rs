use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use idealfree_core::induction::{RankWindow, SearchConfig, Strategy};
use idealfree_core::rootsys::OrderingPolicy;
use serde::Serialize;

/// Everything that determines a run; echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub type_tag: String,
    pub ordering_policy: String,
    pub conjugacy_ranks: Option<[usize; 2]>,
    pub charpoly_max_rank: usize,
    pub memo: bool,
    pub strategy: Strategy,
    pub workers: usize,
    pub database: Option<PathBuf>,
    pub certificates: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            conjugacy_ranks: match self.conjugacy_ranks {
                Some([min, max]) => RankWindow { min, max },
                None => RankWindow::NONE,
            },
            charpoly_max_rank: self.charpoly_max_rank,
            use_memo: self.memo,
            strategy: self.strategy,
            certificates: self.certificates.is_some(),
            workers: self.workers,
        }
    }

    pub fn ordering_policy() -> String {
        OrderingPolicy::default().version().to_string()
    }
}

/// `LO..HI`, `LO..=HI`, a single rank, or `none`.
pub fn parse_rank_window(s: &str) -> Result<Option<[usize; 2]>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("none") || s.is_empty() {
        return Ok(None);
    }
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().with_context(|| format!("bad rank window {s:?}"))?;
    let hi: usize = hi.trim().parse().with_context(|| format!("bad rank window {s:?}"))?;
    if lo == 0 || hi > 8 || lo > hi {
        bail!("rank window {s:?} must lie within 1..=8");
    }
    Ok(Some([lo, hi]))
}
