//! Tensor-product uniform grids.

use crate::error::{Error, Result};

/// A flat list of d-dimensional points (point-major layout).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn with_capacity(dim: usize, points: usize) -> Self {
        PointSet { dim, data: Vec::with_capacity(dim * points) }
    }

    pub fn push(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.dim);
        self.data.extend_from_slice(point);
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }
}

/// Uniform 1-D grid on [lo, hi] including both endpoints, with the final
/// point pinned to `hi` exactly.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::domain("make_grid", format!("need at least 2 points, got {count}")));
    }
    let step = (hi - lo) / (count - 1) as f64;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        out.push(if i == count - 1 { hi } else { lo + i as f64 * step });
    }
    Ok(out)
}

/// Tensor-product grid over `domain` with `counts` points per dimension,
/// endpoints included, deterministic ordering with the last dimension
/// varying fastest.
pub fn make_grid(domain: &[(f64, f64)], counts: &[usize]) -> Result<PointSet> {
    if domain.len() != counts.len() {
        return Err(Error::shape(
            "make_grid",
            format!("{} domain dims but {} counts", domain.len(), counts.len()),
        ));
    }
    let axes: Vec<Vec<f64>> = domain
        .iter()
        .zip(counts)
        .map(|(&(lo, hi), &n)| linspace(lo, hi, n))
        .collect::<Result<_>>()?;
    let total: usize = counts.iter().product();
    let dim = domain.len();
    let mut set = PointSet::with_capacity(dim, total);
    let mut idx = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    for _ in 0..total {
        for d in 0..dim {
            point[d] = axes[d][idx[d]];
        }
        set.push(&point);
        // odometer increment, last dimension fastest
        for d in (0..dim).rev() {
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_points_on_unit_interval() {
        let g = make_grid(&[(0.0, 1.0)], &[5]).unwrap();
        let pts: Vec<f64> = g.iter().map(|p| p[0]).collect();
        assert_eq!(pts, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn last_dimension_fastest() {
        let g = make_grid(&[(-1.0, 1.0), (0.0, 0.1)], &[3, 2]).unwrap();
        assert_eq!(g.len(), 6);
        let expect = [
            [-1.0, 0.0],
            [-1.0, 0.1],
            [0.0, 0.0],
            [0.0, 0.1],
            [1.0, 0.0],
            [1.0, 0.1],
        ];
        for (i, want) in expect.iter().enumerate() {
            assert_eq!(g.point(i), want.as_slice());
        }
    }

    #[test]
    fn thousand_point_spacing() {
        let g = linspace(0.0, 1.0, 1000).unwrap();
        assert_eq!(g[1] - g[0], 1.0 / 999.0);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[999], 1.0);
    }

    #[test]
    fn rejects_tiny_counts() {
        assert!(make_grid(&[(0.0, 1.0)], &[1]).is_err());
    }
}
