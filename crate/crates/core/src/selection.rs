//! Binary search over the value domain driven by ensemble counts.
//!
//! The search keeps a bracket `(v, u]` with `count(<= v) < k <= count(<= u)`
//! whenever counts are exact. Each run probes the midpoint `y`, one count
//! decides which half keeps the k-th smallest element, and for integer
//! domains the loop stops once `u = v + 1`, at which point `u` is the answer.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counting::{ensemble_count, repeated_count, MeasurementModel};
use crate::db::{Database, Domain, ValueKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectConfig {
    pub model: MeasurementModel,
    /// Readouts averaged per count; each one is an oracle query.
    pub trials: u32,
    /// Start the lower end at `min` instead of `min - 1`.
    ///
    /// This reproduces the original formulation, which returns `min + 1` when
    /// the k-th smallest element equals the domain minimum.
    pub paper_init: bool,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self {
            model: MeasurementModel::exact(),
            trials: 1,
            paper_init: false,
        }
    }
}

impl SelectConfig {
    pub fn with_model(model: MeasurementModel) -> Self {
        Self {
            model,
            ..Self::default()
        }
    }
}

/// One probe: bracket `(v, u]` on entry, midpoint `y`, measured readout
/// `alpha` and the count `c` derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Run {
    pub u: f64,
    pub v: f64,
    pub y: f64,
    pub alpha: f64,
    pub c: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub runs: Vec<Run>,
    pub queries: u64,
    pub result: f64,
    pub kind: ValueKind,
    /// Final bracket `(v, u]`.
    pub bracket: (f64, f64),
}

impl SelectionTrace {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderStatistic {
    Median,
    Minimum,
    Maximum,
}

impl OrderStatistic {
    /// 1-based rank among `n` elements; the median is the lower one, `ceil(n/2)`.
    pub fn rank(self, n: usize) -> usize {
        match self {
            Self::Median => n.div_ceil(2),
            Self::Minimum => 1,
            Self::Maximum => n,
        }
    }
}

pub fn pad_to_power_of_two(db: &Database) -> Database {
    db.pad_to_power_of_two()
}

fn check_rank(db: &Database, k: usize) -> Result<()> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    if k == 0 || k > db.original_n() {
        return Err(Error::RankOutOfRange {
            k,
            n: db.original_n(),
        });
    }
    Ok(())
}

/// k-th smallest element (1-based) of an integer-domain database.
pub fn select_kth(db: &Database, k: usize, config: &SelectConfig) -> Result<SelectionTrace> {
    select_kth_in(db, k, db.domain(), config)
}

/// As [`select_kth`], searching `bracket` instead of the declared domain.
pub fn select_kth_in(
    db: &Database,
    k: usize,
    bracket: Domain,
    config: &SelectConfig,
) -> Result<SelectionTrace> {
    if db.kind() != ValueKind::Integer || bracket.kind != ValueKind::Integer {
        return Err(Error::IntegerDomainRequired);
    }
    check_rank(db, k)?;
    let db = db.pad_for_register();

    let mut u = bracket.max;
    let mut v = if config.paper_init {
        bracket.min
    } else {
        bracket.min - 1.0
    };
    let mut runs = Vec::new();
    let mut queries = 0;
    while u - v > 1.0 {
        let y = ((u + v) / 2.0).floor();
        let model = config.model.fork(runs.len() as u64);
        let count = repeated_count(&db, y, &model, config.trials)?;
        queries += count.queries;
        runs.push(Run {
            u,
            v,
            y,
            alpha: count.alpha,
            c: count.c,
        });
        if (count.c as usize) < k {
            v = y;
        } else {
            u = y;
        }
    }
    Ok(SelectionTrace {
        runs,
        queries,
        result: u,
        kind: ValueKind::Integer,
        bracket: (v, u),
    })
}

/// Real-domain bisection for exactly `max_iters` probes; the result is the
/// last midpoint probed.
pub fn select_real(
    db: &Database,
    k: usize,
    config: &SelectConfig,
    max_iters: u32,
) -> Result<SelectionTrace> {
    select_real_in(db, k, db.domain(), config, max_iters)
}

pub fn select_real_in(
    db: &Database,
    k: usize,
    bracket: Domain,
    config: &SelectConfig,
    max_iters: u32,
) -> Result<SelectionTrace> {
    if db.kind() != ValueKind::Real {
        return Err(Error::RealDomainRequired);
    }
    check_rank(db, k)?;
    let db = db.pad_for_register();

    let mut u = bracket.max;
    let mut v = bracket.min;
    let mut y = u;
    let mut runs = Vec::with_capacity(max_iters as usize);
    let mut queries = 0;
    for iter in 0..max_iters.max(1) {
        y = (u + v) / 2.0;
        let model = config.model.fork(iter as u64);
        let count = repeated_count(&db, y, &model, config.trials)?;
        queries += count.queries;
        runs.push(Run {
            u,
            v,
            y,
            alpha: count.alpha,
            c: count.c,
        });
        if (count.c as usize) < k {
            v = y;
        } else {
            u = y;
        }
    }
    Ok(SelectionTrace {
        runs,
        queries,
        result: y,
        kind: ValueKind::Real,
        bracket: (v, u),
    })
}

pub fn order_statistic(
    db: &Database,
    which: OrderStatistic,
    config: &SelectConfig,
) -> Result<SelectionTrace> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    select_kth(db, which.rank(db.original_n()), config)
}

/// A bracket `[lo, hi]` with `count(<= lo) <= k <= count(<= hi)`, plus the
/// oracle queries spent finding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainEstimate {
    pub domain: Domain,
    pub attempts: usize,
    pub queries: u64,
}

/// Brackets the k-th smallest element without knowing the domain, by
/// probing sampled element values.
pub fn estimate_domain(
    db: &Database,
    k: usize,
    model: &MeasurementModel,
    max_attempts: usize,
) -> Result<DomainEstimate> {
    check_rank(db, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let values = distinct_values(db);
    let first = *values.choose(&mut rng).expect("nonempty");
    let second = if values.len() > 1 {
        loop {
            let v = *values.choose(&mut rng).expect("nonempty");
            if v != first {
                break v;
            }
        }
    } else {
        first
    };
    refine_bracket(db, k, model, (first, second), &mut rng, max_attempts)
}

fn distinct_values(db: &Database) -> Vec<f64> {
    let mut values = db.original_elements().to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// Bracket search from a given initial pair of element values.
///
/// The pair is ordered by measured count. While `k` falls below the lower
/// count a new lower value is drawn uniformly from the distinct values under
/// it; while `k` exceeds the upper count a new upper value is drawn from the
/// values above it. The initial pair is the first attempt.
pub fn refine_bracket(
    db: &Database,
    k: usize,
    model: &MeasurementModel,
    pair: (f64, f64),
    rng: &mut ChaCha8Rng,
    max_attempts: usize,
) -> Result<DomainEstimate> {
    check_rank(db, k)?;
    let padded = db.pad_for_register();
    let values = distinct_values(db);
    let k = k as u64;

    let mut probes = 0u64;
    let mut queries = 0u64;
    let mut count = |y: f64| -> Result<u64> {
        let r = ensemble_count(&padded, y, &model.fork(probes))?;
        probes += 1;
        queries += r.queries;
        Ok(r.c)
    };

    let (a, b) = pair;
    let (ca, cb) = (count(a)?, count(b)?);
    let ((mut lo, mut c_lo), (mut hi, mut c_hi)) = if ca <= cb {
        ((a, ca), (b, cb))
    } else {
        ((b, cb), (a, ca))
    };

    let mut attempts = 1;
    loop {
        if c_lo <= k && k <= c_hi {
            let domain = Domain::new(lo, hi, db.kind())?;
            return Ok(DomainEstimate {
                domain,
                attempts,
                queries,
            });
        }
        if attempts >= max_attempts {
            return Err(Error::BracketNotFound(attempts));
        }
        attempts += 1;
        if k < c_lo {
            let below: Vec<f64> = values.iter().copied().filter(|&x| x < lo).collect();
            lo = *below.choose(rng).ok_or(Error::BracketNotFound(attempts))?;
            c_lo = count(lo)?;
        } else {
            let above: Vec<f64> = values.iter().copied().filter(|&x| x > hi).collect();
            hi = *above.choose(rng).ok_or(Error::BracketNotFound(attempts))?;
            c_hi = count(hi)?;
        }
    }
}
