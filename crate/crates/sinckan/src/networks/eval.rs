//! Forward and backward passes for every architecture, generic over the
//! scalar type: `f64` for training and evaluation, jets for PDE residuals.
//!
//! The backward formulas are hand-derived per layer; running them in jet
//! arithmetic yields, for each parameter, the jet of its gradient (the
//! gradient of every derivative slot of the output), which is what the
//! physics-informed gradient assembly consumes.

use std::f64::consts::PI;

use crate::autodiff::Scalar;
use crate::bases::{
    bspline_basis_and_deriv_s, bspline_basis_s, chebyshev_features_and_deriv_s,
    chebyshev_features_s, HGrid, HScheme,
};
use crate::error::{Error, Result};

use super::net::Network;
use super::spec::{ArchKind, SkipKind, TransformKind};
use super::store::{Array, ParamStore};

/// Gradient accumulator aligned with the parameter store's array order.
#[derive(Debug, Clone)]
pub struct GradSink<S: Scalar> {
    pub arrays: Vec<Vec<S>>,
}

impl<S: Scalar> GradSink<S> {
    pub fn zeros_for(net: &Network) -> Self {
        GradSink {
            arrays: net
                .shapes()
                .iter()
                .map(|(_, shape)| vec![S::zero(); shape.iter().product()])
                .collect(),
        }
    }

    pub fn reset(&mut self) {
        for arr in &mut self.arrays {
            for v in arr.iter_mut() {
                *v = S::zero();
            }
        }
    }
}

impl GradSink<f64> {
    /// Materialize as a named store with the network's shapes.
    pub fn to_store(&self, net: &Network) -> ParamStore {
        let mut store = ParamStore::new();
        for ((name, shape), data) in net.shapes().into_iter().zip(&self.arrays) {
            store.insert(name, Array { shape, data: data.clone() });
        }
        store
    }
}

/// Forward-pass intermediates kept for the backward sweep, plus scratch.
#[derive(Debug, Clone)]
pub struct EvalCache<S: Scalar> {
    /// acts[0] is the input; acts[l+1] the output of layer l.
    pub acts: Vec<Vec<S>>,
    t: Vec<Vec<S>>,
    dt: Vec<Vec<S>>,
    basis: Vec<Vec<S>>,
    dbasis: Vec<Vec<S>>,
    edge: Vec<Vec<S>>,
    aux: Vec<Vec<S>>,
    daux: Vec<Vec<S>>,
    mm_u: Vec<S>,
    mm_v: Vec<S>,
    gates: Vec<Vec<S>>,
    with_grads: bool,
    // scratch
    delta: Vec<S>,
    delta_prev: Vec<S>,
    du_acc: Vec<S>,
    dv_acc: Vec<S>,
    basis_scratch: Vec<f64>,
}

impl<S: Scalar> EvalCache<S> {
    pub fn for_network(net: &Network) -> Self {
        let layers = net.num_layers();
        let mut acts = Vec::with_capacity(layers + 1);
        for l in 0..=layers {
            acts.push(vec![S::zero(); net.dims[l]]);
        }
        let basis_per_edge = match net.spec.arch {
            ArchKind::Kan => net.spec.degree,
            ArchKind::ChebyKan => net.spec.degree + 1,
            ArchKind::SincKan => {
                net.spec.hgrid.as_ref().map(|h| h.m).unwrap_or(0)
                    * net.node_set.map(|n| n.count()).unwrap_or(0)
            }
            _ => 0,
        };
        let mk = |f: &dyn Fn(usize) -> usize| -> Vec<Vec<S>> {
            (0..layers).map(|l| vec![S::zero(); f(l)]).collect()
        };
        let width = net.dims.iter().copied().max().unwrap_or(1);
        EvalCache {
            acts,
            t: mk(&|l| net.dims[l]),
            dt: mk(&|l| net.dims[l]),
            basis: mk(&|l| net.dims[l] * basis_per_edge),
            dbasis: mk(&|l| net.dims[l] * basis_per_edge),
            edge: mk(&|l| net.dims[l] * net.dims[l + 1]),
            aux: mk(&|l| net.dims[l]),
            daux: mk(&|l| net.dims[l]),
            mm_u: vec![S::zero(); net.spec.width],
            mm_v: vec![S::zero(); net.spec.width],
            gates: (0..layers).map(|_| vec![S::zero(); net.spec.width]).collect(),
            with_grads: false,
            delta: vec![S::zero(); width],
            delta_prev: vec![S::zero(); width],
            du_acc: vec![S::zero(); net.spec.width],
            dv_acc: vec![S::zero(); net.spec.width],
            basis_scratch: Vec::new(),
        }
    }

    pub fn output(&self) -> &[S] {
        self.acts.last().expect("cache always has an output slot")
    }
}

/// Four-accumulator dot product: breaks the floating add dependency chain
/// so the loop pipelines, with a fixed summation order for run-to-run
/// determinism.
#[inline]
fn dot4(a: &[f64], b: &[f64]) -> f64 {
    let (mut s0, mut s1, mut s2, mut s3) = (0.0f64, 0.0, 0.0, 0.0);
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (qa, qb) in ca.by_ref().zip(cb.by_ref()) {
        s0 += qa[0] * qb[0];
        s1 += qa[1] * qb[1];
        s2 += qa[2] * qb[2];
        s3 += qa[3] * qb[3];
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (s0 + s2) + (s1 + s3) + tail
}

/// sum_i coeffs[i] * vals[i], with the pipelined f64 path when the scalar
/// type carries no derivative slots.
#[inline]
fn weighted_sum<S: Scalar>(coeffs: &[f64], vals: &[S]) -> S {
    if let Some(v) = S::plain_slice(vals) {
        return S::constant(dot4(coeffs, v));
    }
    let mut acc = S::zero();
    for (c, v) in coeffs.iter().zip(vals) {
        acc += v.scale(*c);
    }
    acc
}

/// Number of parameter arrays per layer (modified MLP's u/v projections sit
/// after the layer blocks).
fn arrays_per_layer(net: &Network) -> usize {
    match net.spec.arch {
        ArchKind::Mlp | ArchKind::ModifiedMlp => 2,
        ArchKind::Kan => 3,
        ArchKind::ChebyKan => 1,
        ArchKind::SincKan => match net.spec.skip {
            SkipKind::Linear | SkipKind::Silu => 3,
            SkipKind::None => 1,
        },
    }
}

/// Verify a store matches the network layout so hot paths can use indexed
/// access afterwards.
pub fn check_layout(net: &Network, params: &ParamStore) -> Result<()> {
    let shapes = net.shapes();
    if params.num_arrays() != shapes.len() {
        return Err(Error::shape(
            "check_layout",
            format!("expected {} arrays, got {}", shapes.len(), params.num_arrays()),
        ));
    }
    for ((want_name, want_shape), (name, arr)) in shapes.iter().zip(params.iter()) {
        if want_name != name || *want_shape != arr.shape {
            return Err(Error::shape(
                "check_layout",
                format!("array {name} has shape {:?}, expected {want_name} {want_shape:?}", arr.shape),
            ));
        }
    }
    Ok(())
}

/// Single-point forward pass. Allocates a fresh cache; training loops use
/// [`forward_cached`] with a reused cache instead.
pub fn forward<S: Scalar>(net: &Network, params: &ParamStore, x: &[S]) -> Result<Vec<S>> {
    let mut cache = EvalCache::for_network(net);
    forward_cached(net, params, x, &mut cache, false)?;
    Ok(cache.output().to_vec())
}

/// Forward pass storing everything the backward sweep needs when
/// `with_grads` is set.
pub fn forward_cached<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    x: &[S],
    cache: &mut EvalCache<S>,
    with_grads: bool,
) -> Result<()> {
    if x.len() != net.spec.in_dim {
        return Err(Error::shape(
            "forward",
            format!("input has {} dims, spec says {}", x.len(), net.spec.in_dim),
        ));
    }
    cache.with_grads = with_grads;
    cache.acts[0].copy_from_slice(x);
    match net.spec.arch {
        ArchKind::Mlp => forward_mlp(net, params, cache),
        ArchKind::ModifiedMlp => forward_modified_mlp(net, params, cache),
        ArchKind::Kan => forward_kan(net, params, cache),
        ArchKind::ChebyKan => forward_chebykan(net, params, cache),
        ArchKind::SincKan => forward_sinckan(net, params, cache),
    }
}

/// Backward sweep for the most recent `forward_cached(.., with_grads=true)`
/// call, accumulating parameter gradients weighted by the output adjoint
/// `seed` into `sink`.
pub fn backward<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
    seed: &[S],
    sink: &mut GradSink<S>,
) {
    debug_assert!(cache.with_grads, "backward needs a with_grads forward pass");
    debug_assert_eq!(seed.len(), net.spec.out_dim);
    match net.spec.arch {
        ArchKind::Mlp => backward_mlp(net, params, cache, seed, sink),
        ArchKind::ModifiedMlp => backward_modified_mlp(net, params, cache, seed, sink),
        ArchKind::Kan => backward_kan(net, params, cache, seed, sink),
        ArchKind::ChebyKan => backward_chebykan(net, params, cache, seed, sink),
        ArchKind::SincKan => backward_sinckan(net, params, cache, seed, sink),
    }
}

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

fn affine_into<S: Scalar>(w: &[f64], b: Option<&[f64]>, input: &[S], out: &mut [S]) {
    let ni = input.len();
    for (q, slot) in out.iter_mut().enumerate() {
        let row = &w[q * ni..(q + 1) * ni];
        let bias = match b {
            Some(b) => S::constant(b[q]),
            None => S::zero(),
        };
        *slot = bias + weighted_sum(row, input);
    }
}

fn forward_mlp<S: Scalar>(net: &Network, params: &ParamStore, cache: &mut EvalCache<S>) -> Result<()> {
    let layers = net.num_layers();
    for l in 0..layers {
        let w = &params.array_at(2 * l).data;
        let b = &params.array_at(2 * l + 1).data;
        let (input, rest) = cache.acts.split_at_mut(l + 1);
        let input = &input[l];
        let out = &mut rest[0];
        affine_into(w, Some(b), input, out);
        if l < layers - 1 {
            for v in out.iter_mut() {
                *v = v.tanh();
            }
        }
    }
    Ok(())
}

fn backward_mlp<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
    seed: &[S],
    sink: &mut GradSink<S>,
) {
    let layers = net.num_layers();
    cache.delta.clear();
    cache.delta.extend_from_slice(seed);
    for l in (0..layers).rev() {
        let (ni, no) = net.layer_io(l);
        if l < layers - 1 {
            // output of layer l went through tanh; acts[l+1] is post-tanh
            for (d, a) in cache.delta.iter_mut().zip(&cache.acts[l + 1]) {
                *d = *d * (S::one() - *a * *a);
            }
        }
        let w = &params.array_at(2 * l).data;
        let input = &cache.acts[l];
        let (gw, gb) = {
            let (left, right) = sink.arrays.split_at_mut(2 * l + 1);
            (&mut left[2 * l], &mut right[0])
        };
        for q in 0..no {
            let d = cache.delta[q];
            gb[q] += d;
            let grow = &mut gw[q * ni..(q + 1) * ni];
            for (g, xv) in grow.iter_mut().zip(input) {
                *g += d * *xv;
            }
        }
        if l > 0 {
            cache.delta_prev.clear();
            cache.delta_prev.resize(ni, S::zero());
            for q in 0..no {
                let d = cache.delta[q];
                let row = &w[q * ni..(q + 1) * ni];
                for (dp, wv) in cache.delta_prev.iter_mut().zip(row) {
                    *dp += d.scale(*wv);
                }
            }
            std::mem::swap(&mut cache.delta, &mut cache.delta_prev);
        }
    }
}

// ---------------------------------------------------------------------------
// Modified MLP
// ---------------------------------------------------------------------------

fn forward_modified_mlp<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
) -> Result<()> {
    let layers = net.num_layers();
    let base = 2 * layers;
    let width = net.spec.width;

    // u/v feature projections from the raw input
    {
        let (uw, ub) = (&params.array_at(base).data, &params.array_at(base + 1).data);
        let (vw, vb) = (&params.array_at(base + 2).data, &params.array_at(base + 3).data);
        let input = cache.acts[0].clone();
        affine_into(uw, Some(ub), &input, &mut cache.mm_u);
        for v in cache.mm_u.iter_mut() {
            *v = v.tanh();
        }
        affine_into(vw, Some(vb), &input, &mut cache.mm_v);
        for v in cache.mm_v.iter_mut() {
            *v = v.tanh();
        }
    }

    // H1 = tanh(W0 x + b0)
    {
        let w = &params.array_at(0).data;
        let b = &params.array_at(1).data;
        let (input, rest) = cache.acts.split_at_mut(1);
        affine_into(w, Some(b), &input[0], &mut rest[0]);
        for v in rest[0].iter_mut() {
            *v = v.tanh();
        }
    }

    // gated layers
    for l in 1..layers - 1 {
        let w = &params.array_at(2 * l).data;
        let b = &params.array_at(2 * l + 1).data;
        let (head, rest) = cache.acts.split_at_mut(l + 1);
        let h = &head[l];
        let next = &mut rest[0];
        let gate = &mut cache.gates[l];
        affine_into(w, Some(b), h, gate);
        for g in gate.iter_mut() {
            *g = g.tanh();
        }
        for q in 0..width {
            let g = gate[q];
            next[q] = (S::one() - g) * cache.mm_u[q] + g * cache.mm_v[q];
        }
    }

    // output affine
    {
        let l = layers - 1;
        let w = &params.array_at(2 * l).data;
        let b = &params.array_at(2 * l + 1).data;
        let (head, rest) = cache.acts.split_at_mut(l + 1);
        affine_into(w, Some(b), &head[l], &mut rest[0]);
    }
    Ok(())
}

fn backward_modified_mlp<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
    seed: &[S],
    sink: &mut GradSink<S>,
) {
    let layers = net.num_layers();
    let width = net.spec.width;
    let base = 2 * layers;

    for v in cache.du_acc.iter_mut() {
        *v = S::zero();
    }
    for v in cache.dv_acc.iter_mut() {
        *v = S::zero();
    }

    // output affine
    cache.delta.clear();
    cache.delta.extend_from_slice(seed);
    {
        let l = layers - 1;
        let (ni, no) = net.layer_io(l);
        let w = &params.array_at(2 * l).data;
        let input = &cache.acts[l];
        for q in 0..no {
            let d = cache.delta[q];
            sink.arrays[2 * l + 1][q] += d;
            for p in 0..ni {
                sink.arrays[2 * l][q * ni + p] += d * input[p];
            }
        }
        cache.delta_prev.clear();
        cache.delta_prev.resize(ni, S::zero());
        for q in 0..no {
            let d = cache.delta[q];
            let row = &w[q * ni..(q + 1) * ni];
            for (dp, wv) in cache.delta_prev.iter_mut().zip(row) {
                *dp += d.scale(*wv);
            }
        }
        std::mem::swap(&mut cache.delta, &mut cache.delta_prev);
    }

    // gated layers in reverse: H_{l+1} = (1 - g) U + g V
    for l in (1..layers - 1).rev() {
        let w = &params.array_at(2 * l).data;
        let h = &cache.acts[l];
        let gate = &cache.gates[l];
        cache.delta_prev.clear();
        cache.delta_prev.resize(width, S::zero());
        for q in 0..width {
            let d = cache.delta[q];
            let g = gate[q];
            cache.du_acc[q] += d * (S::one() - g);
            cache.dv_acc[q] += d * g;
            // d loss / d z through the gate: delta_g * (1 - g^2)
            let dg = d * (cache.mm_v[q] - cache.mm_u[q]);
            let dz = dg * (S::one() - g * g);
            sink.arrays[2 * l + 1][q] += dz;
            for p in 0..width {
                sink.arrays[2 * l][q * width + p] += dz * h[p];
            }
            let row = &w[q * width..(q + 1) * width];
            for (dp, wv) in cache.delta_prev.iter_mut().zip(row) {
                *dp += dz.scale(*wv);
            }
        }
        std::mem::swap(&mut cache.delta, &mut cache.delta_prev);
    }

    // H1 = tanh(W0 x + b0)
    {
        let in_dim = net.spec.in_dim;
        let x = &cache.acts[0];
        let h1 = &cache.acts[1];
        for q in 0..width {
            let dz = cache.delta[q] * (S::one() - h1[q] * h1[q]);
            sink.arrays[1][q] += dz;
            for p in 0..in_dim {
                sink.arrays[0][q * in_dim + p] += dz * x[p];
            }
        }
    }

    // u/v projections: U = tanh(uw x + ub)
    {
        let in_dim = net.spec.in_dim;
        let x = &cache.acts[0];
        for q in 0..width {
            let dz = cache.du_acc[q] * (S::one() - cache.mm_u[q] * cache.mm_u[q]);
            sink.arrays[base + 1][q] += dz;
            for p in 0..in_dim {
                sink.arrays[base][q * in_dim + p] += dz * x[p];
            }
            let dz = cache.dv_acc[q] * (S::one() - cache.mm_v[q] * cache.mm_v[q]);
            sink.arrays[base + 3][q] += dz;
            for p in 0..in_dim {
                sink.arrays[base + 2][q * in_dim + p] += dz * x[p];
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Shared KAN-family helpers
// ---------------------------------------------------------------------------

fn silu_and_deriv<S: Scalar>(x: S) -> (S, S) {
    let v = x.value();
    if v > 40.0 {
        (x, S::one())
    } else if v < -40.0 {
        (S::zero(), S::zero())
    } else {
        let sig = S::one() / (S::one() + (-x).exp());
        (x * sig, sig + x * sig * (S::one() - sig))
    }
}

/// Clamp into [-1, 1] for spline bases: derivative 1 on [-1, 1), 0 beyond
/// (breakpoints take the right-hand branch).
fn clamp_unit<S: Scalar>(x: S) -> (S, S) {
    let v = x.value();
    if v < -1.0 {
        (S::constant(-1.0), S::zero())
    } else if v >= 1.0 {
        (S::one(), S::zero())
    } else {
        (x, S::one())
    }
}

// ---------------------------------------------------------------------------
// KAN (cubic spline edges with silu base term)
// ---------------------------------------------------------------------------

fn forward_kan<S: Scalar>(net: &Network, params: &ParamStore, cache: &mut EvalCache<S>) -> Result<()> {
    let layers = net.num_layers();
    let g = net.spec.degree;
    let grid = net.spline.as_ref().expect("kan has a spline grid");
    for l in 0..layers {
        let (ni, no) = net.layer_io(l);
        let c = &params.array_at(3 * l).data;
        let wb = &params.array_at(3 * l + 1).data;
        let ws = &params.array_at(3 * l + 2).data;
        let (head, rest) = cache.acts.split_at_mut(l + 1);
        let input = &head[l];
        let out = &mut rest[0];

        for p in 0..ni {
            let (t, dt) = clamp_unit(input[p]);
            cache.t[l][p] = t;
            cache.dt[l][p] = dt;
            let (s, ds) = silu_and_deriv(input[p]);
            cache.aux[l][p] = s;
            cache.daux[l][p] = ds;
            let brow = &mut cache.basis[l][p * g..(p + 1) * g];
            if cache.with_grads {
                let drow = &mut cache.dbasis[l][p * g..(p + 1) * g];
                bspline_basis_and_deriv_s(grid, t, brow, drow);
            } else {
                bspline_basis_s(grid, t, brow);
            }
        }

        for q in 0..no {
            let mut acc = S::zero();
            for p in 0..ni {
                let brow = &cache.basis[l][p * g..(p + 1) * g];
                let crow = &c[(q * ni + p) * g..(q * ni + p + 1) * g];
                let edge = weighted_sum(crow, brow);
                cache.edge[l][q * ni + p] = edge;
                acc += cache.aux[l][p].scale(wb[q * ni + p]) + edge.scale(ws[q * ni + p]);
            }
            out[q] = acc;
        }
    }
    Ok(())
}

fn backward_kan<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
    seed: &[S],
    sink: &mut GradSink<S>,
) {
    let layers = net.num_layers();
    let g = net.spec.degree;
    cache.delta.clear();
    cache.delta.extend_from_slice(seed);
    for l in (0..layers).rev() {
        let (ni, no) = net.layer_io(l);
        let c = &params.array_at(3 * l).data;
        let wb = &params.array_at(3 * l + 1).data;
        let ws = &params.array_at(3 * l + 2).data;
        cache.delta_prev.clear();
        cache.delta_prev.resize(ni, S::zero());
        for q in 0..no {
            let d = cache.delta[q];
            for p in 0..ni {
                let e = q * ni + p;
                sink.arrays[3 * l + 1][e] += d * cache.aux[l][p];
                sink.arrays[3 * l + 2][e] += d * cache.edge[l][e];
                let brow = &cache.basis[l][p * g..(p + 1) * g];
                let gc = &mut sink.arrays[3 * l][e * g..(e + 1) * g];
                let dws = d.scale(ws[e]);
                for (gcv, bv) in gc.iter_mut().zip(brow) {
                    *gcv += dws * *bv;
                }
                if l > 0 {
                    let crow = &c[e * g..(e + 1) * g];
                    let drow = &cache.dbasis[l][p * g..(p + 1) * g];
                    let dedge = weighted_sum(crow, drow);
                    cache.delta_prev[p] += d
                        * (cache.daux[l][p].scale(wb[e])
                            + dedge.scale(ws[e]) * cache.dt[l][p]);
                }
            }
        }
        std::mem::swap(&mut cache.delta, &mut cache.delta_prev);
    }
}

// ---------------------------------------------------------------------------
// ChebyKAN (tanh ahead of every layer)
// ---------------------------------------------------------------------------

fn forward_chebykan<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
) -> Result<()> {
    let layers = net.num_layers();
    let nb = net.spec.degree + 1;
    for l in 0..layers {
        let (ni, no) = net.layer_io(l);
        let c = &params.array_at(l).data;
        let (head, rest) = cache.acts.split_at_mut(l + 1);
        let input = &head[l];
        let out = &mut rest[0];
        for p in 0..ni {
            let t = input[p].tanh();
            cache.t[l][p] = t;
            cache.dt[l][p] = S::one() - t * t;
            let brow = &mut cache.basis[l][p * nb..(p + 1) * nb];
            if cache.with_grads {
                let drow = &mut cache.dbasis[l][p * nb..(p + 1) * nb];
                chebyshev_features_and_deriv_s(net.spec.degree, t, brow, drow);
            } else {
                chebyshev_features_s(net.spec.degree, t, brow);
            }
        }
        for q in 0..no {
            let mut acc = S::zero();
            for p in 0..ni {
                let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                let crow = &c[(q * ni + p) * nb..(q * ni + p + 1) * nb];
                acc += weighted_sum(crow, brow);
            }
            out[q] = acc;
        }
    }
    Ok(())
}

fn backward_chebykan<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
    seed: &[S],
    sink: &mut GradSink<S>,
) {
    let layers = net.num_layers();
    let nb = net.spec.degree + 1;
    cache.delta.clear();
    cache.delta.extend_from_slice(seed);
    for l in (0..layers).rev() {
        let (ni, no) = net.layer_io(l);
        let c = &params.array_at(l).data;
        cache.delta_prev.clear();
        cache.delta_prev.resize(ni, S::zero());
        for q in 0..no {
            let d = cache.delta[q];
            for p in 0..ni {
                let e = q * ni + p;
                let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                let gc = &mut sink.arrays[l][e * nb..(e + 1) * nb];
                for (gcv, bv) in gc.iter_mut().zip(brow) {
                    *gcv += d * *bv;
                }
                if l > 0 {
                    let crow = &c[e * nb..(e + 1) * nb];
                    let drow = &cache.dbasis[l][p * nb..(p + 1) * nb];
                    let dsum = weighted_sum(crow, drow);
                    cache.delta_prev[p] += d * dsum * cache.dt[l][p];
                }
            }
        }
        std::mem::swap(&mut cache.delta, &mut cache.delta_prev);
    }
}

// ---------------------------------------------------------------------------
// SincKAN
// ---------------------------------------------------------------------------

/// The per-layer input transform and its derivative. Hidden log layers clamp
/// into the interval; only the first layer rejects out-of-domain inputs.
fn sinckan_transform<S: Scalar>(
    kind: TransformKind,
    x: S,
    dom: (f64, f64),
    first_layer: bool,
) -> Result<(S, S)> {
    match kind {
        TransformKind::Tanh => {
            let t = x.tanh();
            Ok((t, S::one() - t * t))
        }
        TransformKind::None => Ok((x, S::one())),
        TransformKind::Log => {
            let (a, b) = dom;
            let v = x.value();
            if first_layer && !(a < v && v < b) {
                return Err(Error::domain(
                    "log_transform",
                    format!("x = {v} outside the open interval ({a}, {b})"),
                ));
            }
            let guard = 1e-6 * (b - a);
            let x = if v <= a + guard {
                return Ok((S::constant(((guard) / (b - a - guard)).ln()), S::zero()));
            } else if v >= b - guard {
                return Ok((S::constant(((b - a - guard) / guard).ln()), S::zero()));
            } else {
                x
            };
            let xa = x - S::constant(a);
            let bx = S::constant(b) - x;
            let t = xa.ln() - bx.ln();
            let dt = S::one() / xa + S::one() / bx;
            Ok((t, dt))
        }
    }
}

/// Sinc cardinal basis row for one transformed input: values (and, when
/// requested, derivatives w.r.t. the transformed coordinate) for every
/// (step size, node) pair. One sin/cos per step size serves all nodes via
/// sin(w - i pi) = (-1)^i sin(w).
fn sinc_basis_row<S: Scalar>(
    t: S,
    hgrid: &HGrid,
    half_width: i64,
    with_grads: bool,
    basis: &mut [S],
    dbasis: &mut [S],
    scratch: &mut Vec<f64>,
) {
    if let Some(b) = S::plain_slice_mut(basis) {
        let d = S::plain_slice_mut(dbasis).expect("same scalar type");
        sinc_basis_row_f64(t.value(), hgrid, half_width, with_grads, b, d, scratch);
        return;
    }
    let nodes = (2 * half_width + 1) as usize;
    for (j, &h) in hgrid.values.iter().enumerate() {
        let w = t.scale(PI / h);
        let s = w.sin();
        let c = w.cos();
        let row = j * nodes;
        for (slot, i) in (-half_width..=half_width).enumerate() {
            let u = w - S::constant(i as f64 * PI);
            let uv = u.value();
            let (b, dbu) = if uv.abs() < 1e-2 {
                // series branch: the quotient forms cancel near nodes
                let u2 = u * u;
                let b = S::one() + u2.scale(-1.0 / 6.0) + (u2 * u2).scale(1.0 / 120.0);
                let dbu = u * (S::constant(-1.0 / 3.0)
                    + u2.scale(1.0 / 30.0)
                    + (u2 * u2).scale(-1.0 / 840.0));
                (b, dbu)
            } else {
                let parity = if i % 2 == 0 { 1.0 } else { -1.0 };
                let inv = S::one() / u;
                let b = s.scale(parity) * inv;
                let dbu = (c.scale(parity) - b) * inv;
                (b, dbu)
            };
            basis[row + slot] = b;
            if with_grads {
                dbasis[row + slot] = dbu.scale(PI / h);
            }
        }
    }
}

/// Plain-float basis row: branch-free main loops over a node buffer so the
/// divisions and combines vectorize, with the rare near-node slots patched
/// by the same series the generic path uses. Formulas and evaluation order
/// match the generic path exactly.
fn sinc_basis_row_f64(
    t: f64,
    hgrid: &HGrid,
    half_width: i64,
    with_grads: bool,
    basis: &mut [f64],
    dbasis: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    let nodes = (2 * half_width + 1) as usize;
    scratch.clear();
    scratch.resize(2 * nodes, 0.0);
    let (ubuf, sgn) = scratch.split_at_mut(nodes);
    // inverse-scheme angles are integer multiples of the base angle, so one
    // sin/cos plus the addition recurrence covers every step size
    let recur = hgrid.scheme == HScheme::Inverse;
    let w1 = t * (PI * hgrid.h0);
    let (s1, c1) = if recur { w1.sin_cos() } else { (0.0, 0.0) };
    let (mut sr, mut cr) = (s1, c1);
    for (j, &h) in hgrid.values.iter().enumerate() {
        let (w, s, c) = if recur {
            if j > 0 {
                let ns = sr * c1 + cr * s1;
                let nc = cr * c1 - sr * s1;
                sr = ns;
                cr = nc;
            }
            ((j + 1) as f64 * w1, sr, cr)
        } else {
            let w = t * (PI / h);
            let (s, c) = w.sin_cos();
            (w, s, c)
        };
        let row = j * nodes;
        let mut parity = if half_width % 2 == 0 { 1.0 } else { -1.0 };
        for (slot, i) in (-half_width..=half_width).enumerate() {
            ubuf[slot] = w - i as f64 * PI;
            sgn[slot] = parity;
            parity = -parity;
        }
        let brow = &mut basis[row..row + nodes];
        if with_grads {
            let drow = &mut dbasis[row..row + nodes];
            let k = PI / h;
            for slot in 0..nodes {
                let inv = 1.0 / ubuf[slot];
                let b = (s * sgn[slot]) * inv;
                brow[slot] = b;
                drow[slot] = (c * sgn[slot] - b) * inv * k;
            }
            for slot in 0..nodes {
                let u = ubuf[slot];
                if u.abs() < 1e-2 {
                    let u2 = u * u;
                    brow[slot] = 1.0 + u2 * (-1.0 / 6.0) + (u2 * u2) * (1.0 / 120.0);
                    drow[slot] =
                        u * (-1.0 / 3.0 + u2 * (1.0 / 30.0) + (u2 * u2) * (-1.0 / 840.0)) * k;
                }
            }
        } else {
            for slot in 0..nodes {
                let inv = 1.0 / ubuf[slot];
                brow[slot] = (s * sgn[slot]) * inv;
            }
            for slot in 0..nodes {
                let u = ubuf[slot];
                if u.abs() < 1e-2 {
                    let u2 = u * u;
                    brow[slot] = 1.0 + u2 * (-1.0 / 6.0) + (u2 * u2) * (1.0 / 120.0);
                }
            }
        }
    }
}

fn sinckan_layer_domain(net: &Network, l: usize, p: usize) -> (f64, f64) {
    if l == 0 {
        net.spec
            .log_domain
            .as_ref()
            .map(|d| d[p])
            .unwrap_or((-1.05, 1.05))
    } else {
        // hidden layers see activations of unbounded scale; they are clamped
        // into this fixed interval ahead of the log map
        (-1.05, 1.05)
    }
}

fn forward_sinckan<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
) -> Result<()> {
    let layers = net.num_layers();
    let hgrid = net.spec.hgrid.as_ref().expect("validated");
    let nodes = net.node_set.expect("validated");
    let nb = hgrid.m * nodes.count();
    let per = arrays_per_layer(net);
    for l in 0..layers {
        let (ni, no) = net.layer_io(l);
        let c = &params.array_at(per * l).data;
        let (head, rest) = cache.acts.split_at_mut(l + 1);
        let input = &head[l];
        let out = &mut rest[0];

        for p in 0..ni {
            let (t, dt) = sinckan_transform(
                net.spec.transform,
                input[p],
                sinckan_layer_domain(net, l, p),
                l == 0,
            )?;
            cache.t[l][p] = t;
            cache.dt[l][p] = dt;
            let brow = &mut cache.basis[l][p * nb..(p + 1) * nb];
            let drow = &mut cache.dbasis[l][p * nb..(p + 1) * nb];
            let with_grads = cache.with_grads && l > 0;
            sinc_basis_row(
                t,
                hgrid,
                nodes.half_width,
                with_grads,
                brow,
                drow,
                &mut cache.basis_scratch,
            );
            if net.spec.skip == SkipKind::Silu {
                let (s, ds) = silu_and_deriv(input[p]);
                cache.aux[l][p] = s;
                cache.daux[l][p] = ds;
            }
        }

        match net.spec.skip {
            SkipKind::Linear => {
                let w1 = &params.array_at(per * l + 1).data;
                let w2 = &params.array_at(per * l + 2).data;
                for q in 0..no {
                    let mut acc = S::constant(w2[q]);
                    for p in 0..ni {
                        acc += input[p].scale(w1[p * no + q]);
                        let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                        let crow = &c[(q * ni + p) * nb..(q * ni + p + 1) * nb];
                        acc += weighted_sum(crow, brow);
                    }
                    out[q] = acc;
                }
            }
            SkipKind::None => {
                for q in 0..no {
                    let mut acc = S::zero();
                    for p in 0..ni {
                        let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                        let crow = &c[(q * ni + p) * nb..(q * ni + p + 1) * nb];
                        acc += weighted_sum(crow, brow);
                    }
                    out[q] = acc;
                }
            }
            SkipKind::Silu => {
                let wb = &params.array_at(per * l + 1).data;
                let ws = &params.array_at(per * l + 2).data;
                for q in 0..no {
                    let mut acc = S::zero();
                    for p in 0..ni {
                        let e = q * ni + p;
                        let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                        let crow = &c[e * nb..(e + 1) * nb];
                        let edge = weighted_sum(crow, brow);
                        cache.edge[l][e] = edge;
                        acc += cache.aux[l][p].scale(wb[e]) + edge.scale(ws[e]);
                    }
                    out[q] = acc;
                }
            }
        }
    }
    Ok(())
}

fn backward_sinckan<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    cache: &mut EvalCache<S>,
    seed: &[S],
    sink: &mut GradSink<S>,
) {
    let layers = net.num_layers();
    let hgrid = net.spec.hgrid.as_ref().expect("validated");
    let nb = hgrid.m * net.node_set.expect("validated").count();
    let per = arrays_per_layer(net);
    cache.delta.clear();
    cache.delta.extend_from_slice(seed);
    for l in (0..layers).rev() {
        let (ni, no) = net.layer_io(l);
        let c = &params.array_at(per * l).data;
        let input = &cache.acts[l];
        cache.delta_prev.clear();
        cache.delta_prev.resize(ni, S::zero());
        match net.spec.skip {
            SkipKind::Linear => {
                let w1 = &params.array_at(per * l + 1).data;
                for q in 0..no {
                    let d = cache.delta[q];
                    sink.arrays[per * l + 2][q] += d;
                    for p in 0..ni {
                        sink.arrays[per * l + 1][p * no + q] += d * input[p];
                        let e = q * ni + p;
                        let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                        let gc = &mut sink.arrays[per * l][e * nb..(e + 1) * nb];
                        for (gcv, bv) in gc.iter_mut().zip(brow) {
                            *gcv += d * *bv;
                        }
                        if l > 0 {
                            let crow = &c[e * nb..(e + 1) * nb];
                            let drow = &cache.dbasis[l][p * nb..(p + 1) * nb];
                            let dsum = weighted_sum(crow, drow);
                            cache.delta_prev[p] +=
                                d.scale(w1[p * no + q]) + d * dsum * cache.dt[l][p];
                        }
                    }
                }
            }
            SkipKind::None => {
                for q in 0..no {
                    let d = cache.delta[q];
                    for p in 0..ni {
                        let e = q * ni + p;
                        let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                        let gc = &mut sink.arrays[per * l][e * nb..(e + 1) * nb];
                        for (gcv, bv) in gc.iter_mut().zip(brow) {
                            *gcv += d * *bv;
                        }
                        if l > 0 {
                            let crow = &c[e * nb..(e + 1) * nb];
                            let drow = &cache.dbasis[l][p * nb..(p + 1) * nb];
                            let dsum = weighted_sum(crow, drow);
                            cache.delta_prev[p] += d * dsum * cache.dt[l][p];
                        }
                    }
                }
            }
            SkipKind::Silu => {
                let wb = &params.array_at(per * l + 1).data;
                let ws = &params.array_at(per * l + 2).data;
                for q in 0..no {
                    let d = cache.delta[q];
                    for p in 0..ni {
                        let e = q * ni + p;
                        sink.arrays[per * l + 1][e] += d * cache.aux[l][p];
                        sink.arrays[per * l + 2][e] += d * cache.edge[l][e];
                        let brow = &cache.basis[l][p * nb..(p + 1) * nb];
                        let gc = &mut sink.arrays[per * l][e * nb..(e + 1) * nb];
                        let dws = d.scale(ws[e]);
                        for (gcv, bv) in gc.iter_mut().zip(brow) {
                            *gcv += dws * *bv;
                        }
                        if l > 0 {
                            let crow = &c[e * nb..(e + 1) * nb];
                            let drow = &cache.dbasis[l][p * nb..(p + 1) * nb];
                            let dsum = weighted_sum(crow, drow);
                            cache.delta_prev[p] += d
                                * (cache.daux[l][p].scale(wb[e])
                                    + dsum.scale(ws[e]) * cache.dt[l][p]);
                        }
                    }
                }
            }
        }
        std::mem::swap(&mut cache.delta, &mut cache.delta_prev);
    }
}

/// Evaluate a single SincKAN layer of an existing network on its own: the
/// learnable-activation sum plus whichever skip the network is configured with.
pub fn sinckan_layer<S: Scalar>(
    net: &Network,
    params: &ParamStore,
    layer: usize,
    x: &[S],
) -> Result<Vec<S>> {
    if net.spec.arch != ArchKind::SincKan {
        return Err(Error::config("sinckan_layer requires a sinckan network"));
    }
    if layer >= net.num_layers() {
        return Err(Error::shape(
            "sinckan_layer",
            format!("layer {layer} out of range for {} layers", net.num_layers()),
        ));
    }
    let (ni, no) = net.layer_io(layer);
    if x.len() != ni {
        return Err(Error::shape(
            "sinckan_layer",
            format!("input has {} entries, layer expects {ni}", x.len()),
        ));
    }
    for xv in x {
        if !xv.value().is_finite() {
            return Err(Error::non_finite("sinckan_layer", "non-finite input"));
        }
    }
    let hgrid = net.spec.hgrid.as_ref().expect("validated");
    let nodes = net.node_set.expect("validated");
    let nb = hgrid.m * nodes.count();
    let per = arrays_per_layer(net);
    let c = &params.array_at(per * layer).data;

    let mut basis = vec![S::zero(); ni * nb];
    let mut dscratch = vec![S::zero(); nb];
    let mut fscratch = Vec::new();
    for p in 0..ni {
        let (t, _) = sinckan_transform(
            net.spec.transform,
            x[p],
            sinckan_layer_domain(net, layer, p),
            layer == 0,
        )?;
        sinc_basis_row(
            t,
            hgrid,
            nodes.half_width,
            false,
            &mut basis[p * nb..(p + 1) * nb],
            &mut dscratch,
            &mut fscratch,
        );
    }

    let mut out = vec![S::zero(); no];
    for q in 0..no {
        let mut acc = S::zero();
        for p in 0..ni {
            let brow = &basis[p * nb..(p + 1) * nb];
            let crow = &c[(q * ni + p) * nb..(q * ni + p + 1) * nb];
            let edge = weighted_sum(crow, brow);
            match net.spec.skip {
                SkipKind::Linear => acc += edge,
                SkipKind::None => acc += edge,
                SkipKind::Silu => {
                    let ws = &params.array_at(per * layer + 2).data;
                    let wb = &params.array_at(per * layer + 1).data;
                    let (s, _) = silu_and_deriv(x[p]);
                    acc += s.scale(wb[q * ni + p]) + edge.scale(ws[q * ni + p]);
                }
            }
        }
        if net.spec.skip == SkipKind::Linear {
            let w1 = &params.array_at(per * layer + 1).data;
            let w2 = &params.array_at(per * layer + 2).data;
            acc += S::constant(w2[q]);
            for p in 0..ni {
                acc += x[p].scale(w1[p * no + q]);
            }
        }
        out[q] = acc;
    }
    Ok(out)
}

/// Samples of the learned univariate edge function phi_{q,p} of one layer
/// over `xs`, excluding the aggregated skip term.
pub fn dump_activations(
    net: &Network,
    params: &ParamStore,
    layer: usize,
    edge: (usize, usize),
    xs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !net.spec.arch.is_kan_family() {
        return Err(Error::config("activation dumps exist only for the KAN family"));
    }
    if layer >= net.num_layers() {
        return Err(Error::shape(
            "dump_activations",
            format!("layer {layer} out of range for {} layers", net.num_layers()),
        ));
    }
    let (p, q) = edge;
    let (ni, no) = net.layer_io(layer);
    if p >= ni || q >= no {
        return Err(Error::shape(
            "dump_activations",
            format!("edge ({p}, {q}) out of range for layer of {ni} x {no}"),
        ));
    }
    let per = arrays_per_layer(net);
    let mut out = Vec::with_capacity(xs.len());
    match net.spec.arch {
        ArchKind::SincKan => {
            let hgrid = net.spec.hgrid.as_ref().expect("validated");
            let nodes = net.node_set.expect("validated");
            let nb = hgrid.m * nodes.count();
            let c = &params.array_at(per * layer).data;
            let crow = &c[(q * ni + p) * nb..(q * ni + p + 1) * nb];
            let mut basis = vec![0.0; nb];
            let mut dscratch = vec![0.0; nb];
            let mut fscratch = Vec::new();
            for &x in xs {
                let (t, _) = sinckan_transform(
                    net.spec.transform,
                    x,
                    sinckan_layer_domain(net, layer, p),
                    layer == 0,
                )?;
                sinc_basis_row(
                    t,
                    hgrid,
                    nodes.half_width,
                    false,
                    &mut basis,
                    &mut dscratch,
                    &mut fscratch,
                );
                let mut phi = 0.0;
                for (cv, bv) in crow.iter().zip(&basis) {
                    phi += cv * bv;
                }
                // per-edge scale from the silu skip applies to the sinc sum
                if net.spec.skip == SkipKind::Silu {
                    phi *= params.array_at(per * layer + 2).data[q * ni + p];
                }
                out.push((x, phi));
            }
        }
        ArchKind::Kan => {
            let g = net.spec.degree;
            let grid = net.spline.as_ref().expect("kan");
            let c = &params.array_at(3 * layer).data;
            let ws = &params.array_at(3 * layer + 2).data;
            let crow = &c[(q * ni + p) * g..(q * ni + p + 1) * g];
            let mut basis = vec![0.0; g];
            for &x in xs {
                let (t, _) = clamp_unit(x);
                bspline_basis_s(grid, t, &mut basis);
                let mut phi = 0.0;
                for (cv, bv) in crow.iter().zip(&basis) {
                    phi += cv * bv;
                }
                out.push((x, ws[q * ni + p] * phi));
            }
        }
        ArchKind::ChebyKan => {
            let nbas = net.spec.degree + 1;
            let c = &params.array_at(layer).data;
            let crow = &c[(q * ni + p) * nbas..(q * ni + p + 1) * nbas];
            let mut basis = vec![0.0; nbas];
            for &x in xs {
                let t = x.tanh();
                chebyshev_features_s(net.spec.degree, t, &mut basis);
                let mut phi = 0.0;
                for (cv, bv) in crow.iter().zip(&basis) {
                    phi += cv * bv;
                }
                out.push((x, phi));
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}
