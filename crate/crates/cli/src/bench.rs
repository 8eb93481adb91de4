//! Query-complexity sweep: one CSV row per seeded selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ensemble_select::{
    classical_kth, generate_random, select_kth, Domain, MeasurementModel, NoiseMode, Result,
    SelectConfig,
};

use crate::ceil_log2;

pub const CSV_HEADER: &str = "n,domain_size,epsilon,trials,runs,queries,correct";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonSpec {
    Absolute(u32),
    /// `n + offset`.
    Offset(i32),
}

impl EpsilonSpec {
    pub fn resolve(self, n: u32) -> u32 {
        match self {
            Self::Absolute(e) => e.max(1),
            Self::Offset(off) => (n as i64 + off as i64).max(1) as u32,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub widths: Vec<u32>,
    pub domain_sizes: Vec<u64>,
    pub epsilons: Vec<EpsilonSpec>,
    pub trials: Vec<u32>,
    pub mode: NoiseMode,
    pub seeds: u64,
    pub base_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchRecord {
    pub n: u32,
    pub domain_size: u64,
    pub epsilon: u32,
    pub trials: u32,
    pub runs: u32,
    pub queries: u64,
    pub correct: bool,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.domain_size,
            self.epsilon,
            self.trials,
            self.runs,
            self.queries,
            self.correct
        )
    }

    pub fn within_bound(&self) -> bool {
        self.runs <= ceil_log2(self.domain_size)
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    n: u32,
    domain_size: u64,
    epsilon: u32,
    trials: u32,
    seed: u64,
}

fn run_point(p: Point, mode: NoiseMode) -> Result<BenchRecord> {
    let domain = Domain::integer(1, p.domain_size as i64)?;
    let count = 1usize << p.n;
    let db = generate_random(count, domain, p.seed, false)?;
    let k = ChaCha8Rng::seed_from_u64(p.seed ^ 0xa5a5_a5a5).gen_range(1..=count);
    let model = MeasurementModel {
        epsilon: Some(p.epsilon),
        mode,
        seed: p.seed,
    };
    let config = SelectConfig {
        model,
        trials: p.trials,
        paper_init: false,
    };
    let trace = select_kth(&db, k, &config)?;
    Ok(BenchRecord {
        n: p.n,
        domain_size: p.domain_size,
        epsilon: p.epsilon,
        trials: p.trials,
        runs: trace.runs.len() as u32,
        queries: trace.queries,
        correct: trace.result == classical_kth(&db, k)?,
    })
}

/// Runs every sweep point in parallel; records come back in sweep order.
pub fn run_sweep(sweep: &Sweep) -> Result<Vec<BenchRecord>> {
    let mut points = Vec::new();
    for &n in &sweep.widths {
        for &domain_size in &sweep.domain_sizes {
            for &eps in &sweep.epsilons {
                for &trials in &sweep.trials {
                    for s in 0..sweep.seeds {
                        points.push(Point {
                            n,
                            domain_size,
                            epsilon: eps.resolve(n),
                            trials,
                            seed: sweep.base_seed.wrapping_add(s),
                        });
                    }
                }
            }
        }
    }
    points
        .into_par_iter()
        .map(|p| run_point(p, sweep.mode))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: usize,
    pub correct: usize,
    pub bound_violations: usize,
    pub max_runs: u32,
}

impl Summary {
    pub fn of(records: &[BenchRecord]) -> Self {
        Self {
            rows: records.len(),
            correct: records.iter().filter(|r| r.correct).count(),
            bound_violations: records.iter().filter(|r| !r.within_bound()).count(),
            max_runs: records.iter().map(|r| r.runs).max().unwrap_or(0),
        }
    }

    pub fn correctness_rate(&self) -> f64 {
        if self.rows == 0 {
            1.0
        } else {
            self.correct as f64 / self.rows as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(widths: Vec<u32>, sizes: Vec<u64>, eps: Vec<EpsilonSpec>, mode: NoiseMode) -> Sweep {
        Sweep {
            widths,
            domain_sizes: sizes,
            epsilons: eps,
            trials: vec![1],
            mode,
            seeds: 8,
            base_seed: 1,
        }
    }

    #[test]
    fn sixteen_value_domain_needs_at_most_four_runs() {
        let s = sweep(
            vec![2, 3, 4],
            vec![16],
            vec![EpsilonSpec::Offset(2)],
            NoiseMode::Exact,
        );
        let records = run_sweep(&s).unwrap();
        assert_eq!(records.len(), 24);
        assert!(records.iter().all(|r| r.runs <= 4 && r.correct));
        assert!(records
            .iter()
            .all(|r| r.queries == r.runs as u64 * r.trials as u64));
    }

    #[test]
    fn fixed_domain_run_count_independent_of_size() {
        let s = sweep(
            (3..=10).collect(),
            vec![256],
            vec![EpsilonSpec::Offset(2)],
            NoiseMode::Exact,
        );
        let records = run_sweep(&s).unwrap();
        assert!(records.iter().all(|r| r.runs <= 8));
        assert_eq!(Summary::of(&records).correctness_rate(), 1.0);
    }

    #[test]
    fn high_accuracy_noise_is_always_correct() {
        let s = sweep(
            vec![3, 4, 5, 6],
            vec![64, 1024],
            vec![EpsilonSpec::Offset(0), EpsilonSpec::Offset(2)],
            NoiseMode::UniformNoise,
        );
        let records = run_sweep(&s).unwrap();
        let exact_eps: Vec<_> = records.iter().filter(|r| r.epsilon == r.n + 2).collect();
        assert!(!exact_eps.is_empty());
        assert!(exact_eps.iter().all(|r| r.correct));
    }

    #[test]
    fn sweep_is_deterministic() {
        let s = sweep(
            vec![3, 5],
            vec![100],
            vec![EpsilonSpec::Absolute(2)],
            NoiseMode::UniformNoise,
        );
        assert_eq!(run_sweep(&s).unwrap(), run_sweep(&s).unwrap());
    }

    #[test]
    fn csv_row_layout() {
        let r = BenchRecord {
            n: 3,
            domain_size: 16,
            epsilon: 5,
            trials: 1,
            runs: 4,
            queries: 4,
            correct: true,
        };
        assert_eq!(r.csv_row(), "3,16,5,1,4,4,true");
        assert_eq!(
            CSV_HEADER.split(',').count(),
            r.csv_row().split(',').count()
        );
    }
}
