//! Command implementations behind the `ensel` binary.

pub mod bench;
pub mod demo;

use ensemble_select::{Error, ValueKind};
use serde_json::Value;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

/// Maps a library error to the process exit code.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::MalformedFile(_) => EXIT_INTERNAL,
        _ => EXIT_DOMAIN,
    }
}

/// JSON form of a domain value: integers for integer domains, floats otherwise.
pub fn value_json(v: f64, kind: ValueKind) -> Value {
    match kind {
        ValueKind::Integer => Value::from(v as i64),
        ValueKind::Real => Value::from(v),
    }
}

/// `log2` rounded up; the loop bound for an integer domain of `size` values.
pub fn ceil_log2(size: u64) -> u32 {
    if size <= 1 {
        0
    } else {
        u64::BITS - (size - 1).leading_zeros()
    }
}
