//! Mini-batch index sampling.

use crate::error::{Error, Result};

use super::rng::Rng;

/// `batch` indices drawn uniformly without replacement from a dataset of
/// `dataset_size` points. Fresh draw per call (sampling is with replacement
/// across iterations), reproducible per seed.
pub fn sample_batch(
    dataset_size: usize,
    batch: usize,
    rng: &mut Rng,
    scratch: &mut Vec<usize>,
) -> Result<Vec<usize>> {
    if batch > dataset_size {
        return Err(Error::config(format!(
            "batch {batch} exceeds dataset size {dataset_size}"
        )));
    }
    if batch == 0 {
        return Err(Error::config("batch size must be positive"));
    }
    Ok(rng.sample_distinct(dataset_size, batch, scratch))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_batch_is_a_permutation() {
        let mut rng = Rng::seed_from(2);
        let mut scratch = Vec::new();
        let mut idx = sample_batch(100, 100, &mut rng, &mut scratch).unwrap();
        idx.sort_unstable();
        assert_eq!(idx, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn draws_are_reproducible_per_seed() {
        let mut scratch = Vec::new();
        let mut a = Rng::seed_from(9);
        let mut b = Rng::seed_from(9);
        for _ in 0..20 {
            assert_eq!(
                sample_batch(1000, 500, &mut a, &mut scratch).unwrap(),
                sample_batch(1000, 500, &mut b, &mut scratch).unwrap()
            );
        }
    }

    #[test]
    fn rejects_oversized_batches() {
        let mut rng = Rng::seed_from(1);
        let mut scratch = Vec::new();
        assert!(sample_batch(10, 11, &mut rng, &mut scratch).is_err());
    }

    #[test]
    fn coverage_is_uniform() {
        // over 10^4 draws of 500 from 1000, each index frequency stays
        // within 5 sigma of the binomial expectation
        let mut rng = Rng::seed_from(31);
        let mut scratch = Vec::new();
        let draws = 10_000usize;
        let mut counts = vec![0u32; 1000];
        for _ in 0..draws {
            for i in sample_batch(1000, 500, &mut rng, &mut scratch).unwrap() {
                counts[i] += 1;
            }
        }
        let p = 0.5;
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - mean).abs();
            assert!(dev <= 5.0 * sigma, "index {i}: count {c}, dev {dev:.1}");
        }
    }
}
