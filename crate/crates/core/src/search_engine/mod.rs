//! The scan over `n = 2 ..= max_n`.
//!
//! The cursor advances in blocks. For each block the residues `n! mod p` are
//! produced one row per prime, the quadratic-residue filter runs on every
//! column, and the outcomes are then walked in `n` order: rejections are
//! tallied, survivors are settled by exact arithmetic. Rows and columns are
//! independent, so both phases spread over the worker pool, and the in-order
//! walk keeps every result identical for any worker count.

mod checkpoint;

pub use checkpoint::{
    load_checkpoint, parse_checkpoint, render_checkpoint, save_checkpoint, CheckpointBody,
    VERSION_LINE,
};

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::conditions::verify_factorial;
use crate::error::{Error, Result};
use crate::exact_arith::{mul_mod, Natural};
use crate::factorial_engine::{
    factorial_exact_with_ceiling, FactorialState, PrimePool, DEFAULT_EXACT_CEILING,
    DEFAULT_POOL_SIZE,
};
use crate::qr_filter::{passes_residues, FilterOutcome};

pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 100_000;

const BLOCK_LEN: u64 = 4096;

/// The first `n` the scan looks at; 0! + 1 and 1! + 1 are both 2.
pub const FIRST_SCANNED_N: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Ceiling the prime pool is built for.
    pub max_n: u64,
    pub pool_size: usize,
    /// Last `n` scanned by this run, `max_n` when unset.
    pub stop_at: Option<u64>,
    pub checkpoint_path: Option<PathBuf>,
    /// Continue from the checkpoint at `checkpoint_path`.
    pub resume: bool,
    pub checkpoint_interval: u64,
    /// Survivors above this `n` are reported unresolved instead of computing
    /// their factorial.
    pub exact_verify_ceiling: u64,
    pub worker_count: usize,
}

impl SearchConfig {
    pub fn new(max_n: u64) -> Self {
        SearchConfig {
            max_n,
            pool_size: DEFAULT_POOL_SIZE,
            stop_at: None,
            checkpoint_path: None,
            resume: false,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            exact_verify_ceiling: DEFAULT_EXACT_CEILING,
            worker_count: 1,
        }
    }

    fn stop(&self) -> Result<u64> {
        let stop = self.stop_at.unwrap_or(self.max_n);
        if stop > self.max_n {
            return Err(Error::Domain(format!(
                "stop-at {stop} lies beyond max-n {}",
                self.max_n
            )));
        }
        Ok(stop)
    }
}

/// Something the scan wants reported, in increasing `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanEvent {
    Solution { n: u64, m: Natural },
    /// Passed the filter, not a solution.
    Survivor { n: u64 },
    /// Passed the filter, above the exact-verification ceiling.
    Unresolved { n: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchSummary {
    pub from_n: u64,
    /// `from_n - 1` when nothing was scanned.
    pub to_n: u64,
    pub solutions: Vec<(u64, Natural)>,
    /// Filter passes; each became a solution, a survivor or unresolved.
    pub survivors_exact_checked: u64,
    pub unresolved: Vec<u64>,
    pub rejections_by_prime: BTreeMap<u64, u64>,
    pub symbols_evaluated: u64,
    pub wall_time: Duration,
}

impl SearchSummary {
    pub fn scanned(&self) -> u64 {
        (self.to_n + 1).saturating_sub(self.from_n)
    }

    /// Appends a later segment of the same scan.
    pub fn merge(mut self, later: SearchSummary) -> SearchSummary {
        if later.scanned() > 0 {
            self.to_n = later.to_n;
        }
        self.solutions.extend(later.solutions);
        self.survivors_exact_checked += later.survivors_exact_checked;
        self.unresolved.extend(later.unresolved);
        for (p, c) in later.rejections_by_prime {
            *self.rejections_by_prime.entry(p).or_default() += c;
        }
        self.symbols_evaluated += later.symbols_evaluated;
        self.wall_time += later.wall_time;
        self
    }
}

/// Runs the scan, handing each event to `on_event` as soon as it is known.
pub fn run(
    config: &SearchConfig,
    mut on_event: impl FnMut(&ScanEvent) -> Result<()>,
) -> Result<SearchSummary> {
    let started = Instant::now();
    let stop = config.stop()?;
    if config.checkpoint_interval == 0 {
        return Err(Error::Domain("checkpoint interval must be positive".into()));
    }
    let pool = PrimePool::build(config.max_n, config.pool_size)?;
    let mut state = match (&config.checkpoint_path, config.resume) {
        (Some(path), true) => load_checkpoint(path, &pool)?,
        (None, true) => return Err(Error::Domain("resume needs a checkpoint path".into())),
        _ => FactorialState::start(&pool, false),
    };

    let from_n = (state.n() + 1).max(FIRST_SCANNED_N);
    let mut summary = SearchSummary {
        from_n,
        to_n: from_n - 1,
        rejections_by_prime: pool.primes().iter().map(|&p| (p, 0)).collect(),
        ..SearchSummary::default()
    };

    let workers = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;

    let mut rows = Vec::new();
    while state.n() < stop {
        let lo = state.n() + 1;
        let next_checkpoint = (state.n() / config.checkpoint_interval + 1) * config.checkpoint_interval;
        let hi = (lo + BLOCK_LEN - 1).min(stop).min(next_checkpoint);
        let len = (hi - lo + 1) as usize;

        let outcomes = workers.install(|| {
            fill_residue_rows(&mut rows, &state, &pool, lo, len);
            filter_columns(&rows, pool.primes(), len)
        });

        for (i, outcome) in outcomes.iter().enumerate() {
            let n = lo + i as u64;
            if n < FIRST_SCANNED_N {
                continue;
            }
            summary.to_n = n;
            summary.symbols_evaluated += outcome.symbols_evaluated as u64;
            if let Some(p) = outcome.rejecting_prime {
                *summary.rejections_by_prime.entry(p).or_default() += 1;
                continue;
            }
            summary.survivors_exact_checked += 1;
            let event = settle_survivor(n, config.exact_verify_ceiling)?;
            match &event {
                ScanEvent::Solution { n, m } => summary.solutions.push((*n, m.clone())),
                ScanEvent::Unresolved { n } => summary.unresolved.push(*n),
                ScanEvent::Survivor { .. } => {}
            }
            on_event(&event)?;
        }

        let last: Vec<u64> = rows.chunks(len).map(|row| row[len - 1]).collect();
        state.set_residues(hi, &last);

        if let Some(path) = &config.checkpoint_path {
            if hi == next_checkpoint && hi != stop {
                save_checkpoint(&state, &pool, path)?;
            }
        }
    }
    if let Some(path) = &config.checkpoint_path {
        save_checkpoint(&state, &pool, path)?;
    }

    summary.wall_time = started.elapsed();
    Ok(summary)
}

/// `rows[j * len + i] = (lo + i)! mod primes[j]`.
fn fill_residue_rows(rows: &mut Vec<u64>, state: &FactorialState, pool: &PrimePool, lo: u64, len: usize) {
    rows.clear();
    rows.resize(pool.len() * len, 0);
    rows.par_chunks_mut(len)
        .zip(pool.primes().par_iter().zip(state.residues().par_iter()))
        .for_each(|(row, (&p, &start))| {
            let mut r = start;
            let mut k = lo % p;
            for slot in row.iter_mut() {
                r = mul_mod(r, k, p);
                *slot = r;
                k += 1;
                if k == p {
                    k = 0;
                }
            }
        });
}

fn filter_columns(rows: &[u64], primes: &[u64], len: usize) -> Vec<FilterOutcome> {
    (0..len)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| passes_residues((0..primes.len()).map(|j| rows[j * len + i]), primes))
        .collect()
}

fn settle_survivor(n: u64, ceiling: u64) -> Result<ScanEvent> {
    if n > ceiling {
        return Ok(ScanEvent::Unresolved { n });
    }
    let factorial = factorial_exact_with_ceiling(n, ceiling)?;
    let report = verify_factorial(n, &factorial);
    Ok(match report.m {
        Some(m) => ScanEvent::Solution { n, m },
        None => ScanEvent::Survivor { n },
    })
}
