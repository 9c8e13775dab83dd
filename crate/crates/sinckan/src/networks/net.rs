//! Compiled network: validated spec plus the fixed evaluation helpers
//! (node sets, spline grids), parameter shapes, and initialization.

use crate::bases::{SincNodeSet, SplineGrid};
use crate::error::Result;
use crate::training::rng::Rng;

use super::spec::{ArchKind, NetworkSpec, SkipKind};
use super::store::{Array, ParamStore};

#[derive(Debug, Clone)]
pub struct Network {
    pub spec: NetworkSpec,
    pub dims: Vec<usize>,
    pub node_set: Option<SincNodeSet>,
    pub spline: Option<SplineGrid>,
}

impl Network {
    pub fn new(spec: &NetworkSpec) -> Result<Self> {
        spec.validate()?;
        let node_set = match spec.arch {
            ArchKind::SincKan => Some(spec.node_set()?),
            _ => None,
        };
        let spline = match spec.arch {
            ArchKind::Kan => Some(spec.spline_grid()?),
            _ => None,
        };
        Ok(Network { dims: spec.layer_dims(), spec: spec.clone(), node_set, spline })
    }

    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn layer_io(&self, l: usize) -> (usize, usize) {
        (self.dims[l], self.dims[l + 1])
    }

    /// Parameter array names and shapes in store order.
    pub fn shapes(&self) -> Vec<(String, Vec<usize>)> {
        let mut out = Vec::new();
        let layers = self.num_layers();
        match self.spec.arch {
            ArchKind::Mlp => {
                for l in 0..layers {
                    let (ni, no) = self.layer_io(l);
                    out.push((format!("l{l}.w"), vec![no, ni]));
                    out.push((format!("l{l}.b"), vec![no]));
                }
            }
            ArchKind::ModifiedMlp => {
                for l in 0..layers {
                    let (ni, no) = self.layer_io(l);
                    out.push((format!("l{l}.w"), vec![no, ni]));
                    out.push((format!("l{l}.b"), vec![no]));
                }
                let (in_dim, width) = (self.spec.in_dim, self.spec.width);
                out.push(("u.w".to_string(), vec![width, in_dim]));
                out.push(("u.b".to_string(), vec![width]));
                out.push(("v.w".to_string(), vec![width, in_dim]));
                out.push(("v.b".to_string(), vec![width]));
            }
            ArchKind::Kan => {
                for l in 0..layers {
                    let (ni, no) = self.layer_io(l);
                    out.push((format!("l{l}.c"), vec![no, ni, self.spec.degree]));
                    out.push((format!("l{l}.wb"), vec![no, ni]));
                    out.push((format!("l{l}.ws"), vec![no, ni]));
                }
            }
            ArchKind::ChebyKan => {
                for l in 0..layers {
                    let (ni, no) = self.layer_io(l);
                    out.push((format!("l{l}.c"), vec![no, ni, self.spec.degree + 1]));
                }
            }
            ArchKind::SincKan => {
                let nodes = self.node_set.as_ref().expect("validated").count();
                let m = self.spec.hgrid.as_ref().expect("validated").m;
                for l in 0..layers {
                    let (ni, no) = self.layer_io(l);
                    out.push((format!("l{l}.c"), vec![no, ni, m, nodes]));
                    match self.spec.skip {
                        SkipKind::Linear => {
                            out.push((format!("l{l}.w1"), vec![ni, no]));
                            out.push((format!("l{l}.w2"), vec![no]));
                        }
                        SkipKind::Silu => {
                            out.push((format!("l{l}.wb"), vec![no, ni]));
                            out.push((format!("l{l}.ws"), vec![no, ni]));
                        }
                        SkipKind::None => {}
                    }
                }
            }
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.shapes()
            .iter()
            .map(|(_, s)| s.iter().product::<usize>())
            .sum()
    }

    /// Deterministic initialization for a seed: Xavier-uniform affine
    /// weights with zero biases; KAN-family coefficients i.i.d. normal with
    /// std 0.1/sqrt(in * basis_count); skip weights Xavier, skip biases zero.
    pub fn init(&self, seed: u64) -> ParamStore {
        let mut rng = Rng::derive(seed, 0x1A17);
        let mut store = ParamStore::new();
        for (name, shape) in self.shapes() {
            let len: usize = shape.iter().product();
            let mut data = vec![0.0; len];
            let leaf = name.rsplit('.').next().unwrap_or("");
            match leaf {
                "w" | "w1" | "wb" | "ws" => {
                    // affine / skip weights: Xavier-uniform over fan-in + fan-out
                    let (fan_in, fan_out) = fans(&shape, &name);
                    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                    for v in &mut data {
                        *v = rng.uniform_in(-bound, bound);
                    }
                }
                "b" | "w2" => {} // biases start at zero
                "c" => {
                    let ni = shape[1];
                    let basis: usize = shape[2..].iter().product();
                    let std = 0.1 / ((ni * basis) as f64).sqrt();
                    for v in &mut data {
                        *v = std * rng.normal();
                    }
                }
                other => unreachable!("unknown parameter leaf {other}"),
            }
            store.insert(name, Array { shape, data });
        }
        store
    }
}

fn fans(shape: &[usize], name: &str) -> (usize, usize) {
    // "w1" is stored (in x out); everything else (out x in)
    if name.ends_with(".w1") {
        (shape[0], shape[1])
    } else {
        (shape[1], shape[0])
    }
}
