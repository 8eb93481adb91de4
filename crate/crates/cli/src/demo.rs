//! Replays the eight-element worked example and checks it against the
//! known trace.

use std::fmt::Write as _;

use ensemble_select::counting::prepare_state;
use ensemble_select::qsim::StateVector;
use ensemble_select::{select_kth, BooleanOracle, Database, Result, SelectConfig, SelectionTrace};

pub const DEMO_ELEMENTS: [i64; 8] = [5, 13, 6, 10, 9, 11, 3, 7];
pub const DEMO_DOMAIN: (i64, i64) = (1, 16);
pub const DEMO_K: usize = 4;

/// `(y, C)` per run, then the answer.
pub const GOLDEN_RUNS: [(i64, u64); 4] = [(8, 4), (4, 1), (6, 3), (7, 4)];
pub const GOLDEN_RESULT: i64 = 7;

pub fn demo_database() -> Database {
    Database::from_integers(&DEMO_ELEMENTS, DEMO_DOMAIN.0, DEMO_DOMAIN.1).expect("valid demo db")
}

pub struct DemoOutput {
    pub text: String,
    pub trace: SelectionTrace,
    /// First field that differs from the golden trace, if any.
    pub mismatch: Option<String>,
}

pub fn run_demo(config: &SelectConfig, show_oracle: bool) -> Result<DemoOutput> {
    let db = demo_database();
    let trace = select_kth(&db, DEMO_K, config)?;
    let n = db.register_width().expect("power of two");

    let mut out = String::new();
    let elements: Vec<String> = DEMO_ELEMENTS.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(
        out,
        "database: {{{}}}  D=[{}..{}]  k={}",
        elements.join(", "),
        DEMO_DOMAIN.0,
        DEMO_DOMAIN.1,
        DEMO_K
    );
    let _ = writeln!(
        out,
        "measurement: mode={} epsilon={} trials={}{}",
        config.model.mode,
        config.model.epsilon_for(n),
        config.trials,
        if config.paper_init { " init=paper" } else { "" }
    );
    let uniform = StateVector::init(n)?.apply_hadamard_data();
    for (i, run) in trace.runs.iter().enumerate() {
        let y = run.y as i64;
        let _ = writeln!(out);
        let _ = writeln!(out, "run {}: u={} v={}", i + 1, run.u as i64, run.v as i64);
        let _ = writeln!(out, "  H(|0>|0>) = {}", uniform.to_ket_string());
        let _ = writeln!(
            out,
            "  y = floor(({}+{})/2) = {y}",
            run.u as i64, run.v as i64
        );
        if show_oracle {
            let oracle = BooleanOracle::threshold(&db, run.y)?;
            let _ = writeln!(out, "  g_{y} truth table: {}", oracle.table_string());
            let _ = writeln!(out, "  U_g{y} permutation: {}", oracle.to_permutation());
        }
        let state = prepare_state(&db, run.y)?;
        let _ = writeln!(out, "  U_g{y}(...) = {}", state.to_ket_string());
        let _ = writeln!(
            out,
            "  alpha = {} -> C = {}",
            display_alpha(run.alpha),
            run.c
        );
        if (run.c as usize) < DEMO_K {
            let _ = writeln!(out, "  C < k: v := {y}");
        } else {
            let _ = writeln!(out, "  C >= k: u := {y}");
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "result: {} ({} runs, {} oracle queries)",
        trace.result as i64,
        trace.runs.len(),
        trace.queries
    );

    let mismatch = compare_golden(&trace);
    Ok(DemoOutput {
        text: out,
        trace,
        mismatch,
    })
}

// Strips roundoff such as -0.7500000000000002 so the printout is stable.
fn display_alpha(alpha: f64) -> f64 {
    let rounded = (alpha * 1e12).round() / 1e12;
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

pub fn compare_golden(trace: &SelectionTrace) -> Option<String> {
    for (i, &(y, c)) in GOLDEN_RUNS.iter().enumerate() {
        let Some(run) = trace.runs.get(i) else {
            return Some(format!(
                "run {}: missing (trace has {} runs)",
                i + 1,
                trace.runs.len()
            ));
        };
        if run.y as i64 != y {
            return Some(format!(
                "run {} field y: expected {y}, got {}",
                i + 1,
                run.y
            ));
        }
        if run.c != c {
            return Some(format!(
                "run {} field c: expected {c}, got {}",
                i + 1,
                run.c
            ));
        }
    }
    if trace.runs.len() != GOLDEN_RUNS.len() {
        return Some(format!(
            "runs: expected {}, got {}",
            GOLDEN_RUNS.len(),
            trace.runs.len()
        ));
    }
    if trace.result as i64 != GOLDEN_RESULT {
        return Some(format!(
            "result: expected {GOLDEN_RESULT}, got {}",
            trace.result
        ));
    }
    None
}
