//! Architecture specifications and the layer-shape conventions the
//! parameter counts follow.

use serde::{Deserialize, Serialize};

use crate::bases::{HGrid, SincNodeSet, SplineGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchKind {
    Mlp,
    ModifiedMlp,
    Kan,
    #[serde(rename = "chebykan")]
    ChebyKan,
    #[serde(rename = "sinckan")]
    SincKan,
}

impl ArchKind {
    pub fn is_kan_family(self) -> bool {
        matches!(self, ArchKind::Kan | ArchKind::ChebyKan | ArchKind::SincKan)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipKind {
    /// Learnable affine skip, aggregated per layer: W1 in (in x out), w2 in (out).
    Linear,
    /// Per-edge w_b silu(x) + w_s phi(x).
    Silu,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// Normalized transformation gamma(x) = tanh(x).
    Tanh,
    /// Non-normalized psi(x) = log((x-a)/(b-x)); hidden layers clamp into (a, b).
    Log,
    /// Feed inputs raw.
    None,
}

fn default_depth() -> usize {
    2
}

fn default_skip() -> SkipKind {
    SkipKind::Linear
}

fn default_transform() -> TransformKind {
    TransformKind::Tanh
}

/// Everything needed to build one network deterministically.
///
/// Size conventions follow the reported parameter counts: `depth` counts
/// affine maps for the MLP family (so "10x100" means 10 affine maps, 9
/// hidden tanh layers) and KAN layers for the KAN family (so "8x8" means
/// in -> 8 -> out with two layers of learnable activations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub arch: ArchKind,
    pub in_dim: usize,
    pub out_dim: usize,
    #[serde(default = "default_depth")]
    pub depth: usize,
    pub width: usize,
    /// Basis size for the KAN family: spline basis count (KAN), polynomial
    /// degree (ChebyKAN), or Sinc N_degree (SincKAN; even degrees round up
    /// to the symmetric 2*floor(degree/2)+1 node count).
    #[serde(default)]
    pub degree: usize,
    /// Step-size set; SincKAN only.
    #[serde(default)]
    pub hgrid: Option<HGrid>,
    #[serde(default = "default_skip")]
    pub skip: SkipKind,
    #[serde(default = "default_transform")]
    pub transform: TransformKind,
    /// Per-input-dimension (a, b) for the first layer when transform = log.
    #[serde(default)]
    pub log_domain: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub seed: u64,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.in_dim == 0 || self.out_dim == 0 || self.width == 0 {
            return Err(Error::config("in_dim, out_dim, and width must be positive"));
        }
        if self.depth < 1 {
            return Err(Error::config("depth must be at least 1"));
        }
        match self.arch {
            ArchKind::SincKan => {
                if self.hgrid.is_none() {
                    return Err(Error::config("sinckan requires an hgrid"));
                }
                if self.degree == 0 {
                    return Err(Error::config("sinckan requires a positive degree"));
                }
            }
            ArchKind::Kan => {
                if self.degree < 4 {
                    return Err(Error::config("kan needs degree >= 4 (cubic spline basis count)"));
                }
            }
            ArchKind::ChebyKan => {
                if self.degree == 0 {
                    return Err(Error::config("chebykan requires a positive degree"));
                }
            }
            ArchKind::Mlp | ArchKind::ModifiedMlp => {}
        }
        if self.transform == TransformKind::Log {
            if let Some(dom) = &self.log_domain {
                if dom.len() != self.in_dim {
                    return Err(Error::config(format!(
                        "log_domain has {} entries for {} inputs",
                        dom.len(),
                        self.in_dim
                    )));
                }
                if dom.iter().any(|(a, b)| !(a < b)) {
                    return Err(Error::config("log_domain intervals must satisfy a < b"));
                }
            } else {
                return Err(Error::config("transform=log requires log_domain for the first layer"));
            }
        }
        Ok(())
    }

    /// Layer input/output sizes: `depth` maps from in_dim through width to
    /// out_dim.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.depth + 1);
        dims.push(self.in_dim);
        for _ in 0..self.depth - 1 {
            dims.push(self.width);
        }
        dims.push(self.out_dim);
        dims
    }

    /// Number of basis functions per edge for the KAN family.
    pub fn basis_count(&self) -> Result<usize> {
        match self.arch {
            ArchKind::Kan => Ok(self.degree),
            ArchKind::ChebyKan => Ok(self.degree + 1),
            ArchKind::SincKan => {
                let nodes = SincNodeSet::new(self.degree)?.count();
                let m = self.hgrid.as_ref().map(|h| h.m).unwrap_or(0);
                Ok(m * nodes)
            }
            _ => Err(Error::config("basis_count only applies to the KAN family")),
        }
    }

    pub fn node_set(&self) -> Result<SincNodeSet> {
        SincNodeSet::new(self.degree)
    }

    pub fn spline_grid(&self) -> Result<SplineGrid> {
        SplineGrid::new(self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{make_hgrid, HScheme};

    pub fn sinckan_spec(in_dim: usize, out_dim: usize, width: usize, degree: usize, h0: f64, m: usize) -> NetworkSpec {
        NetworkSpec {
            arch: ArchKind::SincKan,
            in_dim,
            out_dim,
            depth: 2,
            width,
            degree,
            hgrid: Some(make_hgrid(HScheme::Inverse, h0, m).unwrap()),
            skip: SkipKind::Linear,
            transform: TransformKind::Tanh,
            log_domain: None,
            seed: 0,
        }
    }

    #[test]
    fn layer_dims_follow_depth() {
        let spec = sinckan_spec(1, 1, 8, 33, 6.0, 6);
        assert_eq!(spec.layer_dims(), vec![1, 8, 1]);
        let mut deep = spec.clone();
        deep.depth = 4;
        assert_eq!(deep.layer_dims(), vec![1, 8, 8, 8, 1]);
    }

    #[test]
    fn validation_catches_missing_hgrid() {
        let mut spec = sinckan_spec(1, 1, 8, 33, 6.0, 6);
        spec.hgrid = None;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn log_transform_requires_domain() {
        let mut spec = sinckan_spec(1, 1, 8, 9, 2.0, 1);
        spec.transform = TransformKind::Log;
        assert!(spec.validate().is_err());
        spec.log_domain = Some(vec![(-1.0, 1.0)]);
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = sinckan_spec(2, 1, 8, 20, 2.0, 1);
        let json = serde_json::to_string(&spec).unwrap();
        let back: NetworkSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
