//! Residual bookkeeping shared by all checks.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::time::Duration;

#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Complex(f64, f64),
    Ints(Vec<i64>),
    Text(String),
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

impl From<Vec<i64>> for ParamValue {
    fn from(v: Vec<i64>) -> Self {
        ParamValue::Ints(v)
    }
}

/// What a check expects of its residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// The identity holds: residual at most the tolerance.
    Vanish,
    /// Negative control: residual strictly above the tolerance.
    Exceed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub name: String,
    pub parameters: Vec<(String, ParamValue)>,
    pub absolute: f64,
    pub relative: f64,
    pub tolerance: f64,
    pub expect: Expectation,
    pub pass: bool,
    /// Wall time, filled in by callers that have a clock.
    pub elapsed: Option<Duration>,
}

impl ResidualReport {
    pub fn new(name: impl Into<String>, residual: Residual, tolerance: f64) -> Self {
        Self::with_expectation(name, residual, tolerance, Expectation::Vanish)
    }

    pub fn with_expectation(
        name: impl Into<String>,
        residual: Residual,
        tolerance: f64,
        expect: Expectation,
    ) -> Self {
        // NaN fails both ways
        let pass = match expect {
            Expectation::Vanish => residual.relative <= tolerance,
            Expectation::Exceed => residual.relative > tolerance,
        };
        Self {
            name: name.into(),
            parameters: Vec::new(),
            absolute: residual.absolute,
            relative: residual.relative,
            tolerance,
            expect,
            pass,
            elapsed: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.parameters.push((key.to_string(), value.into()));
        self
    }
}

/// Running worst-case residual.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
}

impl Residual {
    pub const ZERO: Residual = Residual {
        absolute: 0.0,
        relative: 0.0,
    };

    pub fn new(absolute: f64, relative: f64) -> Self {
        Self { absolute, relative }
    }

    /// Keeps the larger of each component; NaN is sticky.
    pub fn absorb(&mut self, other: Residual) {
        self.absolute = worst(self.absolute, other.absolute);
        self.relative = worst(self.relative, other.relative);
    }

    pub fn max(mut self, other: Residual) -> Self {
        self.absorb(other);
        self
    }
}

fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        let r = Residual::new(f64::NAN, f64::NAN);
        assert!(!ResidualReport::new("x", r, 1.0).pass);
        assert!(!ResidualReport::with_expectation("x", r, 1.0, Expectation::Exceed).pass);
        let mut acc = Residual::ZERO;
        acc.absorb(r);
        acc.absorb(Residual::new(1.0, 1.0));
        assert!(acc.relative.is_nan());
    }

    #[test]
    fn negative_control_inverts_the_test() {
        let r = Residual::new(0.5, 0.5);
        assert!(!ResidualReport::new("x", r, 1e-3).pass);
        assert!(ResidualReport::with_expectation("x", r, 1e-3, Expectation::Exceed).pass);
    }
}
