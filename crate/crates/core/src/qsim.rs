//! Real-amplitude state vector for an `n`-qubit data register plus one ancilla.
//!
//! Basis states are laid out as `idx = 2 * j + b`, where `j` is the data
//! register value and `b` the ancilla bit, so the ancilla is the least
//! significant index bit. Every operation used by the counting scheme
//! (Walsh-Hadamard on the data register, basis permutations) is real, so
//! amplitudes are stored as `f64`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::oracle::Permutation;

/// Largest data-register width accepted by [`StateVector::init`].
pub const MAX_QUBITS: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: u32,
    amplitudes: Vec<f64>,
}

impl StateVector {
    /// `|0>|0>` on an `n`-qubit data register.
    pub fn init(n: u32) -> Result<Self> {
        check_width(n)?;
        let mut amplitudes = vec![0.0; 1usize << (n + 1)];
        amplitudes[0] = 1.0;
        Ok(Self { n, amplitudes })
    }

    /// Wraps raw amplitudes; the length must be `2^(n+1)`.
    ///
    /// Normalization is not enforced here, callers building test states are
    /// expected to normalize themselves.
    pub fn from_amplitudes(n: u32, amplitudes: Vec<f64>) -> Result<Self> {
        check_width(n)?;
        let expected = 1usize << (n + 1);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self { n, amplitudes })
    }

    pub fn num_data_qubits(&self) -> u32 {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, j: usize, ancilla: bool) -> f64 {
        self.amplitudes[2 * j + ancilla as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// n-fold Hadamard on the data register; the ancilla is left alone.
    pub fn apply_hadamard_data(mut self) -> Self {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let dim = self.amplitudes.len();
        // Data qubit q lives at index bit q + 1.
        for q in 0..self.n {
            let stride = 1usize << (q + 1);
            for block in (0..dim).step_by(2 * stride) {
                for idx in block..block + stride {
                    let a = self.amplitudes[idx];
                    let b = self.amplitudes[idx + stride];
                    self.amplitudes[idx] = (a + b) * scale;
                    self.amplitudes[idx + stride] = (a - b) * scale;
                }
            }
        }
        self
    }

    /// Moves the amplitude at `idx` to `perm[idx]`.
    pub fn apply_permutation(self, perm: &Permutation) -> Result<Self> {
        if perm.size() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: perm.size(),
            });
        }
        if !perm.is_bijection() {
            return Err(Error::NotBijective(perm.size()));
        }
        let mut out = vec![0.0; self.amplitudes.len()];
        for (idx, &image) in perm.map().iter().enumerate() {
            out[image] = self.amplitudes[idx];
        }
        Ok(Self {
            n: self.n,
            amplitudes: out,
        })
    }

    /// Noise-free ancilla readout `P(b=1) - P(b=0)`.
    pub fn ancilla_expectation(&self) -> f64 {
        self.amplitudes
            .chunks_exact(2)
            .map(|pair| pair[1] * pair[1] - pair[0] * pair[0])
            .sum()
    }

    /// Renders the state in ket notation, e.g. `1/2(|0>|1> + |1>|0> + ...)`.
    ///
    /// When every nonzero amplitude equals `1/sqrt(m)` for an integer `m` the
    /// common factor is pulled out; otherwise each term carries its own
    /// coefficient.
    pub fn to_ket_string(&self) -> String {
        const TOL: f64 = 1e-9;
        let terms: Vec<(usize, f64)> = self
            .amplitudes
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, a)| a.abs() > TOL)
            .collect();
        if terms.is_empty() {
            return "0".to_string();
        }
        let ket = |idx: usize| format!("|{}>|{}>", idx / 2, idx % 2);

        let first = terms[0].1;
        let uniform = terms.iter().all(|(_, a)| (a - first).abs() < TOL);
        if uniform && first > 0.0 {
            let m = (1.0 / (first * first)).round();
            if m >= 1.0 && (1.0 / m.sqrt() - first).abs() < TOL {
                let body = terms.iter().map(|&(i, _)| ket(i)).collect::<Vec<_>>();
                let m = m as u64;
                if m == 1 {
                    return body.join(" + ");
                }
                let root = (m as f64).sqrt().round() as u64;
                let factor = if root * root == m {
                    format!("1/{root}")
                } else {
                    format!("1/sqrt({m})")
                };
                return format!("{factor}({})", body.join(" + "));
            }
        }

        let mut out = String::new();
        for (pos, &(idx, a)) in terms.iter().enumerate() {
            if pos > 0 {
                out.push_str(if a < 0.0 { " - " } else { " + " });
            } else if a < 0.0 {
                out.push('-');
            }
            let _ = write!(out, "{:.6}{}", a.abs(), ket(idx));
        }
        out
    }
}

fn check_width(n: u32) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::RegisterSize { n, max: MAX_QUBITS });
    }
    Ok(())
}

/// Free-function form of [`StateVector::init`].
pub fn init_state(n: u32) -> Result<StateVector> {
    StateVector::init(n)
}

pub fn apply_hadamard_data(state: StateVector) -> StateVector {
    state.apply_hadamard_data()
}

pub fn apply_permutation(state: StateVector, perm: &Permutation) -> Result<StateVector> {
    state.apply_permutation(perm)
}

pub fn ancilla_expectation(state: &StateVector) -> f64 {
    state.ancilla_expectation()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < TOL, "{a:?} != {b:?}");
        }
    }

    /// Dense matrix for H on the data register, built from the definition
    /// `<j'|H^n|j> = (-1)^{popcount(j & j')} / sqrt(2^n)`.
    fn dense_hadamard(n: u32) -> Vec<Vec<f64>> {
        let dim = 1usize << (n + 1);
        let scale = (1usize << n) as f64;
        (0..dim)
            .map(|row| {
                (0..dim)
                    .map(|col| {
                        if row % 2 != col % 2 {
                            return 0.0;
                        }
                        let sign = if ((row / 2) & (col / 2)).count_ones() % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        sign / scale.sqrt()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn init_places_all_mass_on_zero() {
        assert_eq!(init_state(1).unwrap().amplitudes(), &[1.0, 0.0, 0.0, 0.0]);
        let s = init_state(3).unwrap();
        assert_eq!(s.dimension(), 16);
        assert_eq!(s.amplitudes()[0], 1.0);
        assert!(s.amplitudes()[1..].iter().all(|&a| a == 0.0));
    }

    #[test]
    fn init_rejects_bad_widths() {
        assert!(matches!(init_state(0), Err(Error::RegisterSize { .. })));
        assert!(matches!(init_state(21), Err(Error::RegisterSize { .. })));
        assert!(init_state(MAX_QUBITS).is_ok());
    }

    #[test]
    fn hadamard_gives_uniform_data_superposition() {
        let s = init_state(3).unwrap().apply_hadamard_data();
        let amp = 1.0 / 8f64.sqrt();
        assert!((amp - 0.353553).abs() < 1e-6);
        for (idx, a) in s.amplitudes().iter().enumerate() {
            let expected = if idx % 2 == 0 { amp } else { 0.0 };
            assert!((a - expected).abs() < TOL);
        }
        let s1 = init_state(1).unwrap().apply_hadamard_data();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(s1.amplitudes(), &[h, 0.0, h, 0.0]);
    }

    #[test]
    fn hadamard_matches_dense_matrix() {
        let n = 3;
        let m = dense_hadamard(n);
        let input: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let expected: Vec<f64> = m
            .iter()
            .map(|row| row.iter().zip(&input).map(|(a, b)| a * b).sum())
            .collect();
        let got = StateVector::from_amplitudes(n, input)
            .unwrap()
            .apply_hadamard_data();
        assert_close(got.amplitudes(), &expected);
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let s = init_state(2).unwrap();
        let back = s.clone().apply_hadamard_data().apply_hadamard_data();
        assert_close(back.amplitudes(), s.amplitudes());
    }

    #[test]
    fn identity_permutation_is_noop() {
        let s = init_state(2).unwrap().apply_hadamard_data();
        let id = Permutation::identity(8);
        assert_eq!(s.clone().apply_permutation(&id).unwrap(), s);
    }

    #[test]
    fn permutation_size_must_match() {
        let s = init_state(2).unwrap();
        let err = s.apply_permutation(&Permutation::identity(16)).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 8,
                found: 16
            }
        ));
    }

    #[test]
    fn non_bijective_permutation_is_rejected() {
        let s = init_state(1).unwrap();
        let err = s
            .apply_permutation(&Permutation::new(vec![0, 0, 1, 2]))
            .unwrap_err();
        assert!(matches!(err, Error::NotBijective(4)));
    }

    #[test]
    fn expectation_of_uniform_ancilla_zero_state() {
        let s = init_state(4).unwrap().apply_hadamard_data();
        assert!((s.ancilla_expectation() + 1.0).abs() < TOL);
    }

    #[test]
    fn ket_rendering() {
        let s = init_state(2).unwrap().apply_hadamard_data();
        assert_eq!(s.to_ket_string(), "1/2(|0>|0> + |1>|0> + |2>|0> + |3>|0>)");
        let s = init_state(3).unwrap().apply_hadamard_data();
        assert!(s.to_ket_string().starts_with("1/sqrt(8)(|0>|0> + |1>|0>"));
        assert_eq!(init_state(1).unwrap().to_ket_string(), "|0>|0>");
        let mixed = StateVector::from_amplitudes(1, vec![0.6, 0.0, -0.8, 0.0]).unwrap();
        assert_eq!(mixed.to_ket_string(), "0.600000|0>|0> - 0.800000|1>|0>");
    }
}
