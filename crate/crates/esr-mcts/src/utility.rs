//! Utility functions over cumulative return vectors, plus the min-max
//! scaling used when plotting utilities with very different ranges side by
//! side.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::returns::ReturnVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UtilityError {
    #[error("utility `{kind}` expects {expected} objectives, got {got}")]
    ArityMismatch {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("square root is undefined for shifted return {shifted} (return {value} + shift {shift}); raise the shift above the worst possible loss")]
    SqrtDomain { value: f64, shift: f64, shifted: f64 },
    #[error("unknown utility `{0}`")]
    UnknownKind(String),
    #[error("bad utility parameter `{0}`")]
    BadParam(String),
    #[error("cannot scale an empty series")]
    EmptySeries,
}

/// The built-in utility functions. All of them are nonlinear, which is the
/// whole point: they are applied to full-episode returns, never to individual
/// rewards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UtilityKind {
    /// `min(r0, floor(r1 / 2))`: items of the first kind are only useful in
    /// combination with two of the second.
    FishwoodMin,
    /// `max(0, r0)^2`: convex, rewards upside variance.
    RiskSeekingSq,
    /// `sqrt(r0 + shift)`: concave, penalises downside variance. The shift
    /// must keep the argument non-negative for every reachable return.
    RiskAverseSqrt,
    /// Product over all objectives.
    Product,
    /// `6.25 * max(0, r0) * max(0, r1)`.
    MomabScaledProduct,
    /// `r0^2 + r1^2`.
    QuadraticSum,
    /// `max(r0 / 2, r1 / 2)`.
    U1HalfMax,
    /// `r0 / 2 + r1^4`.
    U2Quartic,
    /// `min(r0 / 2, r1 / 4)`.
    U3MinQuarter,
    /// `r0^2 + r1^2` again, kept as a separate name so experiment configs
    /// can refer to the fourth entry of the utility sweep directly.
    U4QuadraticSum,
}

impl UtilityKind {
    pub const ALL: [UtilityKind; 10] = [
        UtilityKind::FishwoodMin,
        UtilityKind::RiskSeekingSq,
        UtilityKind::RiskAverseSqrt,
        UtilityKind::Product,
        UtilityKind::MomabScaledProduct,
        UtilityKind::QuadraticSum,
        UtilityKind::U1HalfMax,
        UtilityKind::U2Quartic,
        UtilityKind::U3MinQuarter,
        UtilityKind::U4QuadraticSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UtilityKind::FishwoodMin => "fishwood-min",
            UtilityKind::RiskSeekingSq => "risk-seeking-sq",
            UtilityKind::RiskAverseSqrt => "risk-averse-sqrt",
            UtilityKind::Product => "product",
            UtilityKind::MomabScaledProduct => "momab-scaled-product",
            UtilityKind::QuadraticSum => "quadratic-sum",
            UtilityKind::U1HalfMax => "u1-halfmax",
            UtilityKind::U2Quartic => "u2-quartic",
            UtilityKind::U3MinQuarter => "u3-min-quarter",
            UtilityKind::U4QuadraticSum => "u4-quadratic-sum",
        }
    }

    /// Number of objectives the function expects, or `None` when any
    /// length `>= 1` works (the plain product).
    pub fn arity(self) -> Option<usize> {
        match self {
            UtilityKind::RiskSeekingSq | UtilityKind::RiskAverseSqrt => Some(1),
            UtilityKind::Product => None,
            _ => Some(2),
        }
    }
}

pub const DEFAULT_SQRT_SHIFT: f64 = 150.0;

/// A utility kind plus its parameters. Parsed from CLI strings of the form
/// `name` or `name:param=value`, e.g. `risk-averse-sqrt:shift=150`.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilitySpec {
    kind: UtilityKind,
    params: BTreeMap<String, f64>,
}

impl UtilitySpec {
    pub fn new(kind: UtilityKind) -> Self {
        UtilitySpec {
            kind,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self, UtilityError> {
        let allowed: &[&str] = match self.kind {
            UtilityKind::RiskAverseSqrt => &["shift"],
            _ => &[],
        };
        if !allowed.contains(&name) {
            return Err(UtilityError::BadParam(format!(
                "`{}` takes no parameter `{name}`",
                self.kind.name()
            )));
        }
        self.params.insert(name.to_string(), value);
        Ok(self)
    }

    pub fn kind(&self) -> UtilityKind {
        self.kind
    }

    pub fn arity(&self) -> Option<usize> {
        self.kind.arity()
    }

    /// Shift applied inside `risk-averse-sqrt`.
    pub fn shift(&self) -> f64 {
        self.params
            .get("shift")
            .copied()
            .unwrap_or(DEFAULT_SQRT_SHIFT)
    }

    /// Evaluates the utility on a cumulative return vector.
    pub fn eval(&self, returns: &ReturnVector) -> Result<f64, UtilityError> {
        if let Some(expected) = self.arity() {
            if returns.len() != expected {
                return Err(UtilityError::ArityMismatch {
                    kind: self.kind.name(),
                    expected,
                    got: returns.len(),
                });
            }
        } else if returns.is_empty() {
            return Err(UtilityError::ArityMismatch {
                kind: self.kind.name(),
                expected: 1,
                got: 0,
            });
        }
        let r = returns.values();
        let u = match self.kind {
            UtilityKind::FishwoodMin => r[0].min((r[1] / 2.0).floor()),
            UtilityKind::RiskSeekingSq => {
                let x = r[0].max(0.0);
                x * x
            }
            UtilityKind::RiskAverseSqrt => {
                let shift = self.shift();
                let shifted = r[0] + shift;
                if shifted < 0.0 {
                    return Err(UtilityError::SqrtDomain {
                        value: r[0],
                        shift,
                        shifted,
                    });
                }
                shifted.sqrt()
            }
            UtilityKind::Product => r.iter().product(),
            UtilityKind::MomabScaledProduct => 6.25 * r[0].max(0.0) * r[1].max(0.0),
            UtilityKind::QuadraticSum | UtilityKind::U4QuadraticSum => r[0] * r[0] + r[1] * r[1],
            UtilityKind::U1HalfMax => (r[0] / 2.0).max(r[1] / 2.0),
            UtilityKind::U2Quartic => r[0] / 2.0 + r[1].powi(4),
            UtilityKind::U3MinQuarter => (r[0] / 2.0).min(r[1] / 4.0),
        };
        Ok(u)
    }
}

impl fmt::Display for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for (i, (key, value)) in self.params.iter().enumerate() {
            write!(f, "{}{key}={value}", if i == 0 { ":" } else { "," })?;
        }
        Ok(())
    }
}

impl FromStr for UtilitySpec {
    type Err = UtilityError;

    fn from_str(s: &str) -> Result<Self, UtilityError> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let normalised = name.trim().replace('_', "-");
        let kind = UtilityKind::ALL
            .into_iter()
            .find(|k| k.name() == normalised)
            .ok_or_else(|| UtilityError::UnknownKind(name.trim().to_string()))?;
        let mut spec = UtilitySpec::new(kind);
        if let Some(params) = params {
            for pair in params.split(',') {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| UtilityError::BadParam(pair.to_string()))?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| UtilityError::BadParam(pair.to_string()))?;
                spec = spec.with_param(key.trim(), value)?;
            }
        }
        Ok(spec)
    }
}

/// Rescales a series so its minimum maps to 0 and its maximum to 1. A
/// constant series maps to all 0.5.
pub fn min_max_scale(series: &[f64]) -> Result<Vec<f64>, UtilityError> {
    if series.is_empty() {
        return Err(UtilityError::EmptySeries);
    }
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(vec![0.5; series.len()]);
    }
    Ok(series.iter().map(|x| (x - min) / (max - min)).collect())
}
