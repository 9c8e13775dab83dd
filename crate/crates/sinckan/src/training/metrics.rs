//! Evaluation metrics.

use crate::error::{Error, Result};

/// Root-mean-square error.
pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.len() != yhat.len() || y.is_empty() {
        return Err(Error::shape(
            "rmse",
            format!("lengths {} vs {} (need equal, nonzero)", y.len(), yhat.len()),
        ));
    }
    let acc: f64 = y
        .iter()
        .zip(yhat)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok((acc / y.len() as f64).sqrt())
}

/// Relative L2 error ||y - yhat|| / ||y||.
pub fn relative_l2(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.len() != yhat.len() || y.is_empty() {
        return Err(Error::shape(
            "relative_l2",
            format!("lengths {} vs {} (need equal, nonzero)", y.len(), yhat.len()),
        ));
    }
    let norm: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::domain("relative_l2", "reference norm is zero"));
    }
    let diff: f64 = y
        .iter()
        .zip(yhat)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum::<f64>()
        .sqrt();
    Ok(diff / norm)
}
