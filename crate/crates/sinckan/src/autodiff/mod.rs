//! Exact derivatives: nested forward-mode jets for input derivatives (orders
//! 0-2, per dimension) and a reverse-mode tape for parameter gradients.

mod check;
mod dual;
mod jet;
mod scalar;
mod tape;

pub use check::{check_gradient, check_gradient_with, LossFn};
pub use dual::Dual;
pub use jet::Jet;
pub use scalar::Scalar;
pub use tape::{param_gradient, GradTape, TapeParams, Var};

use std::cell::Cell;

use crate::error::{Error, Result};

thread_local! {
    /// Most recent domain violation hit by a derivative-carrying primitive.
    /// Read back by [`jet_eval`] to name the offending primitive when the
    /// result turns out non-finite.
    static LAST_DOMAIN_EVENT: Cell<Option<(&'static str, f64)>> = const { Cell::new(None) };
}

pub(crate) fn record_domain_event(primitive: &'static str, arg: f64) {
    LAST_DOMAIN_EVENT.with(|c| c.set(Some((primitive, arg))));
}

fn take_domain_event() -> Option<(&'static str, f64)> {
    LAST_DOMAIN_EVENT.with(|c| c.take())
}

/// Evaluate `f` at `x` with first and pure second partials for each tracked
/// dimension. `K` must equal `tracked.len()`; the remaining dimensions are
/// treated as constants.
pub fn jet_eval<const K: usize, F>(f: F, x: &[f64], tracked: &[usize]) -> Result<Jet<K>>
where
    F: FnOnce(&[Jet<K>]) -> Jet<K>,
{
    if tracked.len() != K {
        return Err(Error::shape(
            "jet_eval",
            format!("tracked {} dims but jet width is {K}", tracked.len()),
        ));
    }
    for &dim in tracked {
        if dim >= x.len() {
            return Err(Error::shape(
                "jet_eval",
                format!("tracked dim {dim} out of range for {}-d input", x.len()),
            ));
        }
    }
    take_domain_event();
    let mut args: Vec<Jet<K>> = x.iter().map(|&v| Jet::constant(v)).collect();
    for (slot, &dim) in tracked.iter().enumerate() {
        args[dim] = {
            let mut j = Jet::constant(x[dim]);
            j.d1[slot] = 1.0;
            j
        };
    }
    let out = f(&args);
    if !out.is_finite() {
        let detail = match take_domain_event() {
            Some((prim, arg)) => format!("{prim}({arg}) left its domain at x = {x:?}"),
            None => format!("non-finite jet produced at x = {x:?}: {out:?}"),
        };
        return Err(Error::non_finite("jet_eval", detail));
    }
    Ok(out)
}
