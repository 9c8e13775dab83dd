//! The eight approximation targets.
//!
//! Piecewise targets use half-open branches [l, r) with the final interval
//! closed on the right, so the right-hand branch wins at every interior
//! breakpoint.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TargetKind {
    SinLow,
    SinHigh,
    Bl,
    Sqrt,
    DoubleExponential,
    MultiSqrt,
    PieceWise,
    SpectralBias,
}

/// One registered benchmark target on a finite interval.
#[derive(Debug, Clone)]
pub struct TargetFunction {
    pub name: &'static str,
    pub domain: (f64, f64),
    /// Interior branch boundaries of piecewise targets.
    pub breakpoints: Vec<f64>,
    kind: TargetKind,
}

pub const FUNCTION_NAMES: [&str; 8] = [
    "sin-low",
    "sin-high",
    "bl",
    "sqrt",
    "double-exponential",
    "multi-sqrt",
    "piece-wise",
    "spectral-bias",
];

pub fn get_function(name: &str) -> Result<TargetFunction> {
    let (kind, domain, breakpoints) = match name {
        "sin-low" => (TargetKind::SinLow, (-1.0, 1.0), vec![]),
        "sin-high" => (TargetKind::SinHigh, (-1.0, 1.0), vec![]),
        "bl" => (TargetKind::Bl, (0.0, 1.0), vec![]),
        "sqrt" => (TargetKind::Sqrt, (0.0, 1.0), vec![]),
        "double-exponential" => (TargetKind::DoubleExponential, (0.0, 1.0), vec![]),
        "multi-sqrt" => (TargetKind::MultiSqrt, (0.0, 1.0), vec![]),
        "piece-wise" => (TargetKind::PieceWise, (0.0, 2.0), vec![0.5, 1.5]),
        "spectral-bias" => (TargetKind::SpectralBias, (-1.0, 1.0), vec![0.0]),
        _ => {
            return Err(Error::UnknownName {
                name: name.to_string(),
                known: FUNCTION_NAMES.join(", "),
            })
        }
    };
    let name = FUNCTION_NAMES
        .iter()
        .find(|n| **n == name)
        .expect("matched above");
    Ok(TargetFunction { name, domain, breakpoints, kind })
}

impl TargetFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            TargetKind::SinLow => (4.0 * PI * x).sin(),
            TargetKind::SinHigh => (400.0 * PI * x).sin(),
            TargetKind::Bl => (-100.0 * x).exp(),
            TargetKind::Sqrt => x.sqrt(),
            TargetKind::DoubleExponential => {
                x * (1.0 - x) * (-x).exp() / (0.25 + (x - 0.5) * (x - 0.5))
            }
            TargetKind::MultiSqrt => x.sqrt() * (1.0 - x).powf(0.75),
            TargetKind::PieceWise => {
                if x < 0.5 {
                    (20.0 * PI * x).sin() + x * x
                } else if x < 1.5 {
                    0.5 * x * (-x).exp() + (5.0 * PI * x).sin().abs()
                } else {
                    (x - 1.0).ln() / 2.0f64.ln() - (2.0 * PI * x).cos()
                }
            }
            TargetKind::SpectralBias => {
                if x < 0.0 {
                    (1..=4).map(|k| (k as f64 * x).sin()).sum::<f64>() + 5.0
                } else {
                    (10.0 * x).cos()
                }
            }
        }
    }
}
