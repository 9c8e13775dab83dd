//! Finite-difference validation of analytic gradients.

use crate::error::Result;
use crate::networks::ParamStore;
use crate::training::rng::Rng;

/// A differentiable scalar loss over a parameter store.
pub trait LossFn {
    fn loss(&self, params: &ParamStore) -> Result<f64>;
    fn grad(&self, params: &ParamStore) -> Result<ParamStore>;
}

/// Maximum relative error between the analytic gradient and a central
/// finite difference over a random sample of at least 100 coordinates
/// (all coordinates when the store is smaller).
pub fn check_gradient(loss: &dyn LossFn, params: &ParamStore, step: f64) -> Result<f64> {
    check_gradient_with(loss, params, step, 128, 0x5EED)
}

pub fn check_gradient_with(
    loss: &dyn LossFn,
    params: &ParamStore,
    step: f64,
    max_coords: usize,
    seed: u64,
) -> Result<f64> {
    assert!(step > 0.0, "finite-difference step must be positive");
    let analytic = loss.grad(params)?;
    let total = params.param_count();
    let n_coords = max_coords.min(total);

    let mut rng = Rng::derive(seed, 0xC00D);
    let mut scratch = Vec::new();
    let coords = rng.sample_distinct(total, n_coords, &mut scratch);

    // flatten (array, element) addressing
    let array_names: Vec<String> = params.names().map(str::to_string).collect();
    let mut offsets = Vec::with_capacity(array_names.len());
    let mut acc = 0usize;
    for (_, arr) in params.iter() {
        offsets.push(acc);
        acc += arr.len();
    }

    let locate = |flat: usize| -> (usize, usize) {
        let mut arr_idx = offsets.len() - 1;
        for (i, &off) in offsets.iter().enumerate() {
            if flat < off {
                arr_idx = i - 1;
                break;
            }
        }
        (arr_idx, flat - offsets[arr_idx])
    };

    let mut worst = 0.0f64;
    let mut perturbed = params.clone();
    for flat in coords {
        let (ai, ei) = locate(flat);
        let name = &array_names[ai];
        let orig = params.get(name)?.data[ei];

        perturbed.get_mut(name)?.data[ei] = orig + step;
        let up = loss.loss(&perturbed)?;
        perturbed.get_mut(name)?.data[ei] = orig - step;
        let down = loss.loss(&perturbed)?;
        perturbed.get_mut(name)?.data[ei] = orig;

        let fd = (up - down) / (2.0 * step);
        let ad = analytic.get(name)?.data[ei];
        let rel = (ad - fd).abs() / (fd.abs() + 1e-10);
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::param_gradient;
    use crate::networks::Array;

    struct Quadratic;

    impl LossFn for Quadratic {
        fn loss(&self, p: &ParamStore) -> Result<f64> {
            Ok(p.iter().flat_map(|(_, a)| &a.data).map(|v| v * v).sum())
        }

        fn grad(&self, p: &ParamStore) -> Result<ParamStore> {
            param_gradient(p, |tape, leaves| {
                let mut loss = tape.leaf(0.0);
                for arr in &leaves.vars {
                    for &v in arr {
                        loss = loss + v.square();
                    }
                }
                loss
            })
        }
    }

    #[test]
    fn quadratic_checks_below_1e8() {
        let mut p = ParamStore::new();
        p.insert(
            "w",
            Array { shape: vec![150], data: (0..150).map(|i| (i as f64) * 0.01 - 0.7).collect() },
        );
        let worst = check_gradient(&Quadratic, &p, 1e-5).unwrap();
        assert!(worst <= 1e-8, "worst relative error {worst}");
    }
}
