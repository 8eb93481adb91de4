//! Database model, JSON persistence, random instances and the classical
//! brute-force reference used to check every simulated answer.
//!
//! Elements are held as `f64` for both value kinds. Integer-kind values are
//! validated to be integral and within `±2^53`, where `f64` is exact.

use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::error::{Error, Result};

const MAX_EXACT_INT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Integer,
    Real,
}

/// Closed value interval `[min, max]` the database elements are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub min: f64,
    pub max: f64,
    pub kind: ValueKind,
}

impl Domain {
    pub fn new(min: f64, max: f64, kind: ValueKind) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidDomain("bounds must be finite".into()));
        }
        if min > max {
            return Err(Error::InvalidDomain(format!("min {min} exceeds max {max}")));
        }
        if kind == ValueKind::Integer && (!is_exact_int(min) || !is_exact_int(max)) {
            return Err(Error::InvalidDomain(format!(
                "integer domain bounds must be integers, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max, kind })
    }

    pub fn integer(min: i64, max: i64) -> Result<Self> {
        Self::new(min as f64, max as f64, ValueKind::Integer)
    }

    pub fn real(min: f64, max: f64) -> Result<Self> {
        Self::new(min, max, ValueKind::Real)
    }

    /// `|D|` for integer domains (`max - min + 1`); `None` for real domains.
    pub fn size(&self) -> Option<u64> {
        match self.kind {
            ValueKind::Integer => Some((self.max - self.min) as u64 + 1),
            ValueKind::Real => None,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.min && value <= self.max
    }
}

fn is_exact_int(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() <= MAX_EXACT_INT
}

#[derive(Debug, Clone, PartialEq)]
pub struct Database {
    elements: Vec<f64>,
    domain: Domain,
    original_n: usize,
    padded: bool,
}

impl Database {
    /// Builds an unpadded database, validating every element against `domain`.
    pub fn new(elements: Vec<f64>, domain: Domain) -> Result<Self> {
        let original_n = elements.len();
        Self::from_parts(elements, domain, original_n, false)
    }

    pub fn from_parts(
        elements: Vec<f64>,
        domain: Domain,
        original_n: usize,
        padded: bool,
    ) -> Result<Self> {
        if elements.is_empty() || original_n == 0 {
            return Err(Error::EmptyDatabase);
        }
        if original_n > elements.len() {
            return Err(Error::MalformedFile(format!(
                "original_n {original_n} exceeds element count {}",
                elements.len()
            )));
        }
        for (index, &value) in elements.iter().enumerate() {
            let integral_ok = domain.kind == ValueKind::Real || is_exact_int(value);
            if !domain.contains(value) || !integral_ok {
                return Err(Error::OutsideDomain {
                    index,
                    value,
                    min: domain.min,
                    max: domain.max,
                });
            }
        }
        if padded && elements[original_n..].iter().any(|&v| v != domain.max) {
            return Err(Error::MalformedFile(
                "padding elements must equal the domain maximum".into(),
            ));
        }
        if !padded && original_n != elements.len() {
            return Err(Error::MalformedFile(
                "unpadded database must have original_n equal to its length".into(),
            ));
        }
        Ok(Self {
            elements,
            domain,
            original_n,
            padded,
        })
    }

    pub fn from_integers(values: &[i64], min: i64, max: i64) -> Result<Self> {
        Self::new(
            values.iter().map(|&v| v as f64).collect(),
            Domain::integer(min, max)?,
        )
    }

    /// All stored elements, padding included.
    pub fn elements(&self) -> &[f64] {
        &self.elements
    }

    /// The elements before any padding was appended.
    pub fn original_elements(&self) -> &[f64] {
        &self.elements[..self.original_n]
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn kind(&self) -> ValueKind {
        self.domain.kind
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn original_n(&self) -> usize {
        self.original_n
    }

    pub fn is_padded(&self) -> bool {
        self.padded
    }

    /// `Some(n)` when the stored length is exactly `2^n`.
    pub fn register_width(&self) -> Option<u32> {
        let len = self.elements.len();
        len.is_power_of_two().then(|| len.trailing_zeros())
    }

    /// Pads with copies of the domain maximum up to the next power of two.
    pub fn pad_to_power_of_two(&self) -> Database {
        let target = self.elements.len().next_power_of_two();
        if target == self.elements.len() {
            return self.clone();
        }
        let mut elements = self.elements.clone();
        elements.resize(target, self.domain.max);
        Database {
            elements,
            domain: self.domain,
            original_n: self.original_n,
            padded: true,
        }
    }

    /// Padding used by the simulator: a power of two of at least 2 elements,
    /// since the data register needs one qubit or more.
    pub fn pad_for_register(&self) -> Database {
        let mut db = self.pad_to_power_of_two();
        if db.elements.len() == 1 {
            db.elements.push(db.domain.max);
            db.padded = true;
        }
        db
    }

    /// Copy of this database carrying a different declared domain.
    pub fn with_domain(&self, domain: Domain) -> Result<Database> {
        Database::from_parts(self.elements.clone(), domain, self.original_n, self.padded)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatabaseFile {
    elements: Vec<Number>,
    domain: DomainFile,
    #[serde(default)]
    original_n: Option<usize>,
    #[serde(default)]
    padded: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    min: Number,
    max: Number,
    kind: ValueKind,
}

fn number_to_f64(n: &Number, kind: ValueKind, what: &str) -> Result<f64> {
    match kind {
        ValueKind::Integer => n
            .as_i64()
            .map(|v| v as f64)
            .filter(|v| v.abs() <= MAX_EXACT_INT)
            .ok_or_else(|| Error::MalformedFile(format!("{what}: {n} is not an integer"))),
        ValueKind::Real => n
            .as_f64()
            .ok_or_else(|| Error::MalformedFile(format!("{what}: {n} is not a number"))),
    }
}

fn f64_to_number(v: f64, kind: ValueKind) -> Number {
    match kind {
        ValueKind::Integer => Number::from(v as i64),
        // Finite by construction; `from_f64` only rejects NaN/inf.
        ValueKind::Real => Number::from_f64(v).expect("finite element"),
    }
}

/// Parses a database from its JSON text.
pub fn parse_database(text: &str) -> Result<Database> {
    let file: DatabaseFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedFile(e.to_string()))?;
    let kind = file.domain.kind;
    let min = number_to_f64(&file.domain.min, kind, "domain.min")?;
    let max = number_to_f64(&file.domain.max, kind, "domain.max")?;
    let domain = Domain::new(min, max, kind)?;
    let elements = file
        .elements
        .iter()
        .enumerate()
        .map(|(i, n)| number_to_f64(n, kind, &format!("elements[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if elements.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let original_n = file.original_n.unwrap_or(elements.len());
    Database::from_parts(elements, domain, original_n, file.padded)
}

pub fn to_json(db: &Database) -> String {
    let kind = db.kind();
    let file = DatabaseFile {
        elements: db
            .elements
            .iter()
            .map(|&v| f64_to_number(v, kind))
            .collect(),
        domain: DomainFile {
            min: f64_to_number(db.domain.min, kind),
            max: f64_to_number(db.domain.max, kind),
            kind,
        },
        original_n: Some(db.original_n),
        padded: db.padded,
    };
    serde_json::to_string_pretty(&file).expect("database serializes")
}

pub fn load_database(path: impl AsRef<Path>) -> Result<Database> {
    let text = fs::read_to_string(path)?;
    parse_database(&text)
}

pub fn save_database(db: &Database, path: impl AsRef<Path>) -> Result<()> {
    let mut text = to_json(db);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Uniform random database over `domain`, reproducible from `seed`.
///
/// With `distinct`, integer values are drawn without replacement; real values
/// are redrawn on collision.
pub fn generate_random(
    count: usize,
    domain: Domain,
    seed: u64,
    distinct: bool,
) -> Result<Database> {
    if count == 0 {
        return Err(Error::EmptyDatabase);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements = match domain.kind {
        ValueKind::Integer => {
            let lo = domain.min as i64;
            let hi = domain.max as i64;
            if distinct {
                let size = domain.size().unwrap_or(u64::MAX);
                if (count as u64) > size {
                    return Err(Error::DistinctInfeasible { count, size });
                }
                sample(&mut rng, size as usize, count)
                    .into_iter()
                    .map(|offset| (lo + offset as i64) as f64)
                    .collect()
            } else {
                (0..count).map(|_| rng.gen_range(lo..=hi) as f64).collect()
            }
        }
        ValueKind::Real => {
            let mut out: Vec<f64> = Vec::with_capacity(count);
            while out.len() < count {
                let v = if domain.min == domain.max {
                    domain.min
                } else {
                    rng.gen_range(domain.min..=domain.max)
                };
                if distinct && out.contains(&v) {
                    if domain.min == domain.max {
                        return Err(Error::DistinctInfeasible { count, size: 1 });
                    }
                    continue;
                }
                out.push(v);
            }
            out
        }
    };
    Database::new(elements, domain)
}

/// Number of stored elements (padding included) that are `<= y`.
pub fn classical_count(db: &Database, y: f64) -> u64 {
    db.elements().iter().filter(|&&a| a <= y).count() as u64
}

/// k-th smallest (1-based) of the unpadded elements, by sorting a copy.
pub fn classical_kth(db: &Database, k: usize) -> Result<f64> {
    let n = db.original_n();
    if k == 0 || k > n {
        return Err(Error::RankOutOfRange { k, n });
    }
    let mut sorted = db.original_elements().to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[k - 1])
}
