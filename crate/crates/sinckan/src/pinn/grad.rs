//! Parameter gradients of the physics-informed loss.
//!
//! The network runs forward in jet arithmetic (tracking input derivatives),
//! and the layer backward sweep runs in the same arithmetic: for every
//! parameter this produces the jet of its gradient, i.e. the gradient of
//! each derivative slot of the output. Pairing those jets with the
//! residual's slot cotangents (obtained by seeding dual numbers through the
//! residual operator) yields the loss gradient.

use crate::autodiff::{Dual, Jet, LossFn};
use crate::error::{Error, Result};
use crate::networks::{
    backward, forward_cached, EvalCache, GradSink, Network, ParamStore,
};
use crate::problems::{
    robin_value, slots_from_jet, ConstraintData, ConstraintKind, ConstraintSet, FieldSlots,
    PointSet, Problem, MAX_DIM,
};

use super::{pinn_loss, Field};

/// Slot indexing for cotangents: 0 = value, 1..=K first derivatives,
/// K+1..=2K pure second derivatives.
fn slot_count(k: usize) -> usize {
    1 + 2 * k
}

fn lift_with_seed(slots: &[FieldSlots<f64>], q: usize, s: usize, k: usize) -> Vec<FieldSlots<Dual>> {
    slots
        .iter()
        .enumerate()
        .map(|(qq, sl)| {
            let mut out = FieldSlots::<Dual>::zeroed();
            out.value = Dual::constant(sl.value);
            for d in 0..MAX_DIM {
                out.d1[d] = Dual::constant(sl.d1[d]);
                out.d2[d] = Dual::constant(sl.d2[d]);
            }
            if qq == q {
                if s == 0 {
                    out.value.d = 1.0;
                } else if s <= k {
                    out.d1[s - 1].d = 1.0;
                } else {
                    out.d2[s - 1 - k].d = 1.0;
                }
            }
            out
        })
        .collect()
}

/// Pair a jet-valued parameter gradient with a cotangent over slots.
fn pair<const K: usize>(tau: &[f64], g: &Jet<K>) -> f64 {
    let mut acc = tau[0] * g.v;
    for d in 0..K {
        acc += tau[1 + d] * g.d1[d] + tau[1 + K + d] * g.d2[d];
    }
    acc
}

struct Workspace<const K: usize> {
    jet_cache: EvalCache<Jet<K>>,
    jet_sink: GradSink<Jet<K>>,
    f64_cache: EvalCache<f64>,
    args: Vec<Jet<K>>,
}

impl<const K: usize> Workspace<K> {
    fn new(net: &Network) -> Self {
        Workspace {
            jet_cache: EvalCache::for_network(net),
            jet_sink: GradSink::zeros_for(net),
            f64_cache: EvalCache::for_network(net),
            args: vec![Jet::constant(0.0); net.spec.in_dim],
        }
    }

    fn seed_args(&mut self, point: &[f64]) {
        for (d, (&v, slot)) in point.iter().zip(self.args.iter_mut()).enumerate() {
            *slot = Jet::variable(v, d);
        }
    }
}

/// Run backward from output component `q` with a unit jet seed, then pair
/// the jet gradients against `tau` into the scalar sink.
fn backprop_component<const K: usize>(
    net: &Network,
    params: &ParamStore,
    ws: &mut Workspace<K>,
    q: usize,
    tau: &[f64],
    sink: &mut GradSink<f64>,
) {
    if tau.iter().all(|t| *t == 0.0) {
        return;
    }
    ws.jet_sink.reset();
    let mut seed = vec![Jet::<K>::constant(0.0); net.spec.out_dim];
    seed[q] = Jet::constant(1.0);
    backward(net, params, &mut ws.jet_cache, &seed, &mut ws.jet_sink);
    for (dst, src) in sink.arrays.iter_mut().zip(&ws.jet_sink.arrays) {
        for (d, g) in dst.iter_mut().zip(src) {
            *d += pair(tau, g);
        }
    }
}

/// Accumulate d(pinn loss)/d(params) over a residual batch and the full
/// constraint sets. Denominators match [`pinn_loss`]'s means exactly.
fn accumulate<const K: usize>(
    problem: &Problem,
    net: &Network,
    params: &ParamStore,
    residual_points: &PointSet,
    batch: &[usize],
    constraints: &[ConstraintSet],
    ws: &mut Workspace<K>,
    sink: &mut GradSink<f64>,
) -> Result<()> {
    let out_dim = problem.output_dim;
    let slots_n = slot_count(K);
    let n_r = batch.len() as f64;

    let mut tau = vec![vec![0.0f64; slots_n]; out_dim];
    for &i in batch {
        let point = residual_points.point(i);
        ws.seed_args(point);
        forward_cached(net, params, &ws.args.clone(), &mut ws.jet_cache, true)?;
        let slots: Vec<FieldSlots<f64>> =
            ws.jet_cache.output().iter().map(slots_from_jet).collect();
        let r = problem.residual_at::<f64>(point, &slots);
        for row in tau.iter_mut() {
            for v in row.iter_mut() {
                *v = 0.0;
            }
        }
        for (q, row) in tau.iter_mut().enumerate() {
            for (s, slot_tau) in row.iter_mut().enumerate() {
                let lifted = lift_with_seed(&slots, q, s, K);
                let dual_r = problem.residual_at::<Dual>(point, &lifted);
                for (c, rd) in dual_r.iter().enumerate() {
                    *slot_tau += 2.0 * r[c] / n_r * rd.d;
                }
            }
        }
        for q in 0..out_dim {
            let row = tau[q].clone();
            backprop_component(net, params, ws, q, &row, sink);
        }
    }

    // constraint term counts define the loss means
    let mut ic_terms = 0usize;
    let mut bc_terms = 0usize;
    for set in constraints {
        if set.kind == ConstraintKind::Initial {
            ic_terms += set.term_count(out_dim);
        } else {
            bc_terms += set.term_count(out_dim);
        }
    }

    for set in constraints {
        let n_bucket = if set.kind == ConstraintKind::Initial { ic_terms } else { bc_terms } as f64;
        match &set.data {
            ConstraintData::Values(targets) => {
                let mut seed = vec![0.0f64; out_dim];
                for (i, p) in set.points.iter().enumerate() {
                    forward_cached(net, params, p, &mut ws.f64_cache, true)?;
                    for q in 0..out_dim {
                        seed[q] = 2.0 * (ws.f64_cache.output()[q] - targets[i][q]) / n_bucket;
                    }
                    backward(net, params, &mut ws.f64_cache, &seed, sink);
                }
            }
            ConstraintData::Robin { coeff_u, coeff_d1, rhs, output } => {
                for p in set.points.iter() {
                    ws.seed_args(p);
                    forward_cached(net, params, &ws.args.clone(), &mut ws.jet_cache, true)?;
                    let slots: Vec<FieldSlots<f64>> =
                        ws.jet_cache.output().iter().map(slots_from_jet).collect();
                    let m = robin_value(&slots[*output], *coeff_u, coeff_d1, *rhs);
                    let mut row = vec![0.0f64; slots_n];
                    row[0] = 2.0 * m / n_bucket * coeff_u;
                    for d in 0..K {
                        row[1 + d] = 2.0 * m / n_bucket * coeff_d1[d];
                    }
                    backprop_component(net, params, ws, *output, &row, sink);
                }
            }
            ConstraintData::Periodic { partners, match_d1_dims } => {
                for (i, p) in set.points.iter().enumerate() {
                    ws.seed_args(p);
                    forward_cached(net, params, &ws.args.clone(), &mut ws.jet_cache, true)?;
                    let a: Vec<FieldSlots<f64>> =
                        ws.jet_cache.output().iter().map(slots_from_jet).collect();
                    // the partner pass overwrites the cache, so stash the
                    // mismatch cotangents first
                    let pb = partners.point(i);
                    let b = Field::Network { net, params }.slots(problem, pb)?;
                    let mut rows = vec![vec![0.0f64; slots_n]; out_dim];
                    for q in 0..out_dim {
                        rows[q][0] = 2.0 * (a[q].value - b[q].value) / n_bucket;
                        for &d in match_d1_dims {
                            rows[q][1 + d] = 2.0 * (a[q].d1[d] - b[q].d1[d]) / n_bucket;
                        }
                    }
                    for q in 0..out_dim {
                        let row = rows[q].clone();
                        backprop_component(net, params, ws, q, &row, sink);
                    }
                    // negated contributions at the partner point
                    ws.seed_args(pb);
                    forward_cached(net, params, &ws.args.clone(), &mut ws.jet_cache, true)?;
                    for q in 0..out_dim {
                        let row: Vec<f64> = rows[q].iter().map(|v| -v).collect();
                        backprop_component(net, params, ws, q, &row, sink);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Physics-informed loss over a fixed residual batch and constraint sets,
/// exposing value and gradient for training and for gradient checks.
pub struct PinnLossFn<'a> {
    pub problem: &'a Problem,
    pub net: &'a Network,
    pub residual_points: PointSet,
    pub constraints: Vec<ConstraintSet>,
}

impl<'a> PinnLossFn<'a> {
    pub fn grad_into(&self, params: &ParamStore, sink: &mut GradSink<f64>) -> Result<()> {
        let batch: Vec<usize> = (0..self.residual_points.len()).collect();
        self.grad_batch_into(params, &batch, sink)
    }

    pub fn grad_batch_into(
        &self,
        params: &ParamStore,
        batch: &[usize],
        sink: &mut GradSink<f64>,
    ) -> Result<()> {
        match self.problem.input_dim() {
            1 => {
                let mut ws = Workspace::<1>::new(self.net);
                accumulate::<1>(
                    self.problem,
                    self.net,
                    params,
                    &self.residual_points,
                    batch,
                    &self.constraints,
                    &mut ws,
                    sink,
                )
            }
            2 => {
                let mut ws = Workspace::<2>::new(self.net);
                accumulate::<2>(
                    self.problem,
                    self.net,
                    params,
                    &self.residual_points,
                    batch,
                    &self.constraints,
                    &mut ws,
                    sink,
                )
            }
            3 => {
                let mut ws = Workspace::<3>::new(self.net);
                accumulate::<3>(
                    self.problem,
                    self.net,
                    params,
                    &self.residual_points,
                    batch,
                    &self.constraints,
                    &mut ws,
                    sink,
                )
            }
            d => Err(Error::shape("pinn_grad", format!("unsupported input dim {d}"))),
        }
    }
}

impl<'a> LossFn for PinnLossFn<'a> {
    fn loss(&self, params: &ParamStore) -> Result<f64> {
        let field = Field::Network { net: self.net, params };
        Ok(pinn_loss(self.problem, field, &self.residual_points, &self.constraints)?.total)
    }

    fn grad(&self, params: &ParamStore) -> Result<ParamStore> {
        let mut sink = GradSink::zeros_for(self.net);
        self.grad_into(params, &mut sink)?;
        Ok(sink.to_store(self.net))
    }
}
