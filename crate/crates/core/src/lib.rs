//! Simulated ensemble counting and the domain binary search it drives.
//!
//! Each probe of the search asks how many database elements are `<= y`. The
//! answer comes from a small state-vector simulation: a uniform superposition
//! over the data register, a threshold oracle realized as a basis permutation
//! that writes `a_j <= y` into an ancilla, and a bounded-accuracy readout of
//! the ancilla expectation. Every answer can be checked against the classical
//! routines in [`db`].

pub mod counting;
pub mod db;
pub mod error;
pub mod oracle;
pub mod qsim;
pub mod selection;

pub use counting::{
    alpha_to_count, ensemble_count, measure_alpha, oracle_queries, repeated_count, required_trials,
    CountResult, MeasurementModel, NoiseMode,
};
pub use db::{
    classical_count, classical_kth, generate_random, load_database, save_database, Database,
    Domain, ValueKind,
};
pub use error::{Error, Result};
pub use oracle::{
    build_threshold_oracle, oracle_to_permutation, verify_permutation, BooleanOracle, Permutation,
};
pub use qsim::{StateVector, MAX_QUBITS};
pub use selection::{
    estimate_domain, order_statistic, pad_to_power_of_two, select_kth, select_kth_in, select_real,
    select_real_in, DomainEstimate, OrderStatistic, Run, SelectConfig, SelectionTrace,
};
