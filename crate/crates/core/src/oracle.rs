//! Threshold oracles and their realization as basis-state permutations.
//!
//! An oracle `f: {0,1}^n -> {0,1}` acts on `|j>|b>` as `|j>|b XOR f(j)>`.
//! With the `idx = 2j + b` layout this is the index map
//! `2j + b -> 2j + (b ^ f(j))`, a bijective involution that never touches `j`.

use std::fmt;

use crate::db::Database;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BooleanOracle {
    n: u32,
    table: Vec<bool>,
    label: Option<f64>,
}

impl BooleanOracle {
    pub fn new(n: u32, table: Vec<bool>) -> Result<Self> {
        let expected = 1usize << n;
        if table.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: table.len(),
            });
        }
        Ok(Self {
            n,
            table,
            label: None,
        })
    }

    /// `table[j] = a_j <= y`. Comparison is exact, with no tolerance.
    pub fn threshold(db: &Database, y: f64) -> Result<Self> {
        let n = db.register_width().ok_or(Error::NotPowerOfTwo(db.len()))?;
        let table = db.elements().iter().map(|&a| a <= y).collect();
        Ok(Self {
            n,
            table,
            label: Some(y),
        })
    }

    pub fn num_inputs(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    /// Threshold `y` for oracles built by [`BooleanOracle::threshold`].
    pub fn label(&self) -> Option<f64> {
        self.label
    }

    pub fn eval(&self, j: usize) -> bool {
        self.table[j]
    }

    /// Number of satisfying inputs.
    pub fn popcount(&self) -> usize {
        self.table.iter().filter(|&&bit| bit).count()
    }

    pub fn to_permutation(&self) -> Permutation {
        let map = (0..2 * self.table.len())
            .map(|idx| idx ^ self.table[idx / 2] as usize)
            .collect();
        Permutation { map }
    }

    /// Truth table as a bit string, `f(0)` first.
    pub fn table_string(&self) -> String {
        self.table
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// A map on basis indices; `map[idx]` is the image of `idx`.
///
/// Construction does not check bijectivity; use [`verify_permutation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            map: (0..size).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, idx: usize) -> usize {
        self.map[idx]
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        for &image in &self.map {
            if image >= seen.len() || seen[image] {
                return false;
            }
            seen[image] = true;
        }
        true
    }

    pub fn is_involution(&self) -> bool {
        self.map
            .iter()
            .enumerate()
            .all(|(idx, &image)| image < self.map.len() && self.map[image] == idx)
    }

    pub fn compose(&self, other: &Permutation) -> Option<Permutation> {
        if self.size() != other.size() {
            return None;
        }
        Some(Permutation {
            map: other.map.iter().map(|&i| self.map[i]).collect(),
        })
    }

    /// Non-trivial cycles in order of their smallest element. Only meaningful
    /// for bijections.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut visited = vec![false; self.map.len()];
        let mut out = Vec::new();
        for start in 0..self.map.len() {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut cur = self.map[start];
            while cur != start && cur < self.map.len() && !visited[cur] {
                visited[cur] = true;
                cycle.push(cur);
                cur = self.map[cur];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }
}

/// Cycle notation, fixed points omitted; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            let body: Vec<String> = cycle.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

pub fn build_threshold_oracle(db: &Database, y: f64) -> Result<BooleanOracle> {
    BooleanOracle::threshold(db, y)
}

pub fn oracle_to_permutation(oracle: &BooleanOracle) -> Permutation {
    oracle.to_permutation()
}

pub fn verify_permutation(perm: &Permutation) -> bool {
    perm.is_bijection()
}
