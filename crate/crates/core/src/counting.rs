//! Ensemble counting: prepare the uniform superposition, apply the oracle
//! permutation, read the ancilla expectation through a bounded-accuracy
//! measurement model and convert it to a count.
//!
//! A readout with accuracy `epsilon` is within `2^(1 - epsilon)` of the true
//! expectation `alpha = (2C - 2^n) / 2^n`, so the count estimate
//! `2^(n-1) (1 + alpha)` is within `2^(n - epsilon)` of `C`.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::db::Database;
use crate::error::Result;
use crate::oracle::BooleanOracle;
use crate::qsim::StateVector;

static ORACLE_QUERIES: AtomicU64 = AtomicU64::new(0);

/// Total oracle queries issued by this process so far.
pub fn oracle_queries() -> u64 {
    ORACLE_QUERIES.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Emits the true expectation.
    #[default]
    Exact,
    /// Adds noise drawn uniformly from the open interval `(-2^(1-eps), 2^(1-eps))`.
    UniformNoise,
    /// Rounds to the nearest multiple of `2^(1-eps)`, ties to even.
    Quantized,
}

impl FromStr for NoiseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "noise" | "uniform" | "uniform_noise" => Ok(Self::UniformNoise),
            "quantized" => Ok(Self::Quantized),
            other => Err(format!(
                "unknown measurement mode `{other}` (expected exact, noise or quantized)"
            )),
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::UniformNoise => "noise",
            Self::Quantized => "quantized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeasurementModel {
    /// Measurement accuracy; `None` means `n + 2` for an `n`-qubit register.
    pub epsilon: Option<u32>,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl MeasurementModel {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn uniform(epsilon: u32, seed: u64) -> Self {
        Self {
            epsilon: Some(epsilon.max(1)),
            mode: NoiseMode::UniformNoise,
            seed,
        }
    }

    pub fn quantized(epsilon: u32) -> Self {
        Self {
            epsilon: Some(epsilon.max(1)),
            mode: NoiseMode::Quantized,
            seed: 0,
        }
    }

    pub fn epsilon_for(&self, n: u32) -> u32 {
        self.epsilon.unwrap_or(n + 2).max(1)
    }

    /// Half-width `2^(1-eps)` of the readout error interval.
    pub fn bound_for(&self, n: u32) -> f64 {
        (1.0 - self.epsilon_for(n) as f64).exp2()
    }

    /// Same model on an independent RNG stream identified by `stream`.
    pub fn fork(&self, stream: u64) -> Self {
        Self {
            seed: derive_seed(self.seed, stream),
            ..*self
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    pub c: u64,
    pub alpha: f64,
    pub alpha_true: f64,
    pub trials_used: u32,
    pub queries: u64,
}

/// Applies the model to a known true expectation.
pub fn sample_alpha(alpha_true: f64, n: u32, model: &MeasurementModel) -> f64 {
    let bound = model.bound_for(n);
    match model.mode {
        NoiseMode::Exact => alpha_true,
        NoiseMode::Quantized => (alpha_true / bound).round_ties_even() * bound,
        NoiseMode::UniformNoise => {
            let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
            loop {
                // gen_range is half-open; drop the closed endpoint.
                let noise = rng.gen_range(-bound..bound);
                if noise > -bound {
                    return alpha_true + noise;
                }
            }
        }
    }
}

pub fn measure_alpha(state: &StateVector, model: &MeasurementModel) -> f64 {
    sample_alpha(state.ancilla_expectation(), state.num_data_qubits(), model)
}

/// `round(2^(n-1) (1 + alpha))`, ties to even, clamped to `[0, 2^n]`.
pub fn alpha_to_count(alpha: f64, n: u32) -> u64 {
    let full = (n as f64).exp2();
    let raw = ((1.0 + alpha) * full / 2.0).round_ties_even();
    raw.clamp(0.0, full) as u64
}

/// `N_delta`: the least trial count with `2^(-eps) / sqrt(N) < 2^(-n)`.
pub fn required_trials(n: u32, epsilon: u32) -> u64 {
    if n <= epsilon {
        return 1;
    }
    let shift = 2 * (n - epsilon);
    1u64.checked_shl(shift)
        .map_or(u64::MAX, |v| v.saturating_add(1))
}

/// Post-oracle state `2^(-n/2) sum_j |j>|g_y(j)>` for the threshold oracle at `y`.
pub fn prepare_state(db: &Database, y: f64) -> Result<StateVector> {
    let oracle = BooleanOracle::threshold(db, y)?;
    let perm = oracle.to_permutation();
    StateVector::init(oracle.num_inputs())?
        .apply_hadamard_data()
        .apply_permutation(&perm)
}

/// One oracle query: prepare, apply `U_{g_y}`, measure once.
pub fn ensemble_count(db: &Database, y: f64, model: &MeasurementModel) -> Result<CountResult> {
    repeated_count(db, y, model, 1)
}

/// Averages `trials` independent readouts, each on its own stream derived
/// from `(model.seed, trial)`. Every trial counts as one oracle query.
pub fn repeated_count(
    db: &Database,
    y: f64,
    model: &MeasurementModel,
    trials: u32,
) -> Result<CountResult> {
    let trials = trials.max(1);
    let state = prepare_state(db, y)?;
    let n = state.num_data_qubits();
    let alpha_true = state.ancilla_expectation();
    ORACLE_QUERIES.fetch_add(trials as u64, Ordering::Relaxed);

    let alpha = match model.mode {
        NoiseMode::Exact | NoiseMode::Quantized => sample_alpha(alpha_true, n, model),
        NoiseMode::UniformNoise => {
            let sum: f64 = (0..trials as u64)
                .map(|t| sample_alpha(alpha_true, n, &model.fork(t)))
                .sum();
            sum / trials as f64
        }
    };
    Ok(CountResult {
        c: alpha_to_count(alpha, n),
        alpha,
        alpha_true,
        trials_used: trials,
        queries: trials as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::classical_count;

    fn paper_db() -> Database {
        Database::from_integers(&[5, 13, 6, 10, 9, 11, 3, 7], 1, 16).unwrap()
    }

    #[test]
    fn exact_alpha_for_worked_example() {
        let db = paper_db();
        let run1 = prepare_state(&db, 8.0).unwrap();
        assert_eq!(measure_alpha(&run1, &MeasurementModel::exact()), 0.0);
        let run2 = prepare_state(&db, 4.0).unwrap();
        assert!((measure_alpha(&run2, &MeasurementModel::exact()) + 0.75).abs() < 1e-12);
    }

    #[test]
    fn run_one_state_matches_displayed_ket() {
        let s = prepare_state(&paper_db(), 8.0).unwrap();
        assert_eq!(
            s.to_ket_string(),
            "1/sqrt(8)(|0>|1> + |1>|0> + |2>|1> + |3>|0> + |4>|0> + |5>|0> + |6>|1> + |7>|1>)"
        );
    }

    #[test]
    fn alpha_to_count_examples() {
        assert_eq!(alpha_to_count(0.0, 3), 4);
        for n in 1..10 {
            assert_eq!(alpha_to_count(-1.0, n), 0);
            assert_eq!(alpha_to_count(1.0, n), 1 << n);
        }
        assert_eq!(alpha_to_count(-0.74, 3), 1);
        // overshoot clamps
        assert_eq!(alpha_to_count(-1.2, 3), 0);
        assert_eq!(alpha_to_count(1.2, 3), 8);
        // ties to even: 4 * (1 + 0.125) = 4.5 -> 4, 4 * (1 + 0.375) = 5.5 -> 6
        assert_eq!(alpha_to_count(0.125, 3), 4);
        assert_eq!(alpha_to_count(0.375, 3), 6);
    }

    #[test]
    fn ensemble_count_examples() {
        let db = paper_db();
        let m = MeasurementModel::exact();
        let r = ensemble_count(&db, 8.0, &m).unwrap();
        assert_eq!(r.c, 4);
        assert_eq!(r.queries, 1);
        assert_eq!(r.trials_used, 1);
        assert_eq!(ensemble_count(&db, 6.0, &m).unwrap().c, 3);
        assert_eq!(ensemble_count(&db, 0.0, &m).unwrap().c, 0);
    }

    #[test]
    fn exact_counts_match_classical_over_domain() {
        let db = paper_db();
        for y in 0..=17 {
            let y = y as f64;
            let r = ensemble_count(&db, y, &MeasurementModel::exact()).unwrap();
            assert_eq!(r.c, classical_count(&db, y), "y={y}");
        }
    }

    #[test]
    fn uniform_noise_respects_bound() {
        let s = prepare_state(&paper_db(), 6.0).unwrap();
        let truth = s.ancilla_expectation();
        for seed in 0..2000 {
            let a = measure_alpha(&s, &MeasurementModel::uniform(3, seed));
            assert!((a - truth).abs() < 0.25, "seed {seed}: {a}");
        }
    }

    #[test]
    fn quantized_snaps_to_grid() {
        let m = MeasurementModel::quantized(3);
        assert_eq!(sample_alpha(-0.75, 3, &m), -0.75);
        assert_eq!(sample_alpha(0.3, 3, &m), 0.25);
        assert_eq!(sample_alpha(-0.4, 3, &m), -0.5);
        // 0.125 is a tie between 0 and 0.25; the even multiple is 0
        assert_eq!(sample_alpha(0.125, 3, &m), 0.0);
    }

    #[test]
    fn required_trials_examples() {
        assert_eq!(required_trials(8, 5), 65);
        assert_eq!(required_trials(5, 5), 1);
        assert_eq!(required_trials(3, 7), 1);
        assert_eq!(required_trials(10, 1), (1 << 18) + 1);
    }

    #[test]
    fn exact_repetition_equals_single_count() {
        let db = paper_db();
        let m = MeasurementModel::exact();
        let single = ensemble_count(&db, 9.0, &m).unwrap();
        let rep = repeated_count(&db, 9.0, &m, 17).unwrap();
        assert_eq!(rep.c, single.c);
        assert_eq!(rep.alpha, single.alpha);
        assert_eq!(rep.trials_used, 17);
        assert_eq!(rep.queries, 17);
    }

    #[test]
    fn determinism_under_fixed_seed() {
        let db = paper_db();
        let m = MeasurementModel::uniform(2, 77);
        let a = repeated_count(&db, 8.0, &m, 31).unwrap();
        let b = repeated_count(&db, 8.0, &m, 31).unwrap();
        assert_eq!(a, b);
        let c = repeated_count(&db, 8.0, &m.fork(1), 31).unwrap();
        assert_ne!(a.alpha, c.alpha);
    }

    #[test]
    fn query_counter_advances() {
        let before = oracle_queries();
        repeated_count(&paper_db(), 8.0, &MeasurementModel::exact(), 5).unwrap();
        assert!(oracle_queries() >= before + 5);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exact".parse::<NoiseMode>().unwrap(), NoiseMode::Exact);
        assert_eq!(
            "noise".parse::<NoiseMode>().unwrap(),
            NoiseMode::UniformNoise
        );
        assert_eq!(
            "quantized".parse::<NoiseMode>().unwrap(),
            NoiseMode::Quantized
        );
        assert!("gaussian".parse::<NoiseMode>().is_err());
    }

    #[test]
    fn default_epsilon_is_width_plus_two() {
        let m = MeasurementModel::exact();
        assert_eq!(m.epsilon_for(3), 5);
        assert_eq!(MeasurementModel::uniform(3, 0).epsilon_for(8), 3);
    }
}
