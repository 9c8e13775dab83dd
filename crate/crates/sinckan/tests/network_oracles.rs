//! Independent oracles for the network forwards and backwards: direct
//! summations built from the public basis functions, hand-rolled reference
//! implementations, the reverse-mode tape, and finite differences.

use sinckan::autodiff::{check_gradient, param_gradient, Jet, LossFn};
use sinckan::bases::{bspline_basis, make_hgrid, sinc_series, HScheme, SincNodeSet};
use sinckan::networks::{
    backward, dump_activations, forward, forward_cached, init, sinckan_layer, ArchKind, EvalCache,
    GradSink, Network, NetworkSpec, ParamStore, SkipKind, TransformKind,
};
use sinckan::training::rng::Rng;
use sinckan::training::MseLoss;

fn sinckan_spec(in_dim: usize, out_dim: usize, width: usize, degree: usize, h0: f64, m: usize) -> NetworkSpec {
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

/// Direct summation of the SincKAN activation: skip + sum_j sum_i
/// c_{q,p,j,i} S(i, h_j)(tanh(x_p)), using only `bases` functions.
fn brute_force_sinckan_layer(
    params: &ParamStore,
    layer: usize,
    hs: &[f64],
    degree: usize,
    skip: SkipKind,
    x: &[f64],
    out_dim: usize,
) -> Vec<f64> {
    let nodes = SincNodeSet::new(degree).unwrap();
    let ni = x.len();
    let c = &params.get(&format!("l{layer}.c")).unwrap().data;
    let nb = hs.len() * nodes.count();
    let mut out = vec![0.0; out_dim];
    for q in 0..out_dim {
        let mut acc = 0.0;
        match skip {
            SkipKind::Linear => {
                let w1 = &params.get(&format!("l{layer}.w1")).unwrap().data;
                let w2 = &params.get(&format!("l{layer}.w2")).unwrap().data;
                acc += w2[q];
                for p in 0..ni {
                    acc += w1[p * out_dim + q] * x[p];
                }
            }
            SkipKind::None => {}
            SkipKind::Silu => unimplemented!("oracle covers linear/none skips"),
        }
        for p in 0..ni {
            let t = x[p].tanh();
            let mut slot = 0usize;
            for &h in hs {
                for i in nodes.nodes() {
                    acc += c[(q * ni + p) * nb + slot] * sinc_series(i, h, t);
                    slot += 1;
                }
            }
        }
        out[q] = acc;
    }
    out
}

#[test]
fn sinckan_layer_matches_brute_force_sum() {
    let spec = sinckan_spec(3, 2, 2, 9, 2.0, 3);
    let mut spec = spec;
    spec.depth = 1;
    spec.in_dim = 3;
    spec.out_dim = 2;
    let net = Network::new(&spec).unwrap();
    let params = net.init(7);
    let hs = spec.hgrid.as_ref().unwrap().values.clone();
    let mut rng = Rng::seed_from(3);
    for _ in 0..20 {
        let x: Vec<f64> = (0..3).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let got = sinckan_layer(&net, &params, 0, &x).unwrap();
        let want = brute_force_sinckan_layer(&params, 0, &hs, 9, SkipKind::Linear, &x, 2);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()), "{g} vs {w}");
        }
    }
}

#[test]
fn forward_composes_verified_layers() {
    let spec = sinckan_spec(1, 1, 8, 9, 2.0, 2);
    let net = Network::new(&spec).unwrap();
    let params = net.init(11);
    let mut rng = Rng::seed_from(5);
    for _ in 0..5 {
        let x = rng.uniform_in(-1.5, 1.5);
        let full = forward::<f64>(&net, &params, &[x]).unwrap();
        let hidden = sinckan_layer::<f64>(&net, &params, 0, &[x]).unwrap();
        let composed = sinckan_layer::<f64>(&net, &params, 1, &hidden).unwrap();
        assert!(
            (full[0] - composed[0]).abs() <= 1e-13 * (1.0 + composed[0].abs()),
            "{} vs {}",
            full[0],
            composed[0]
        );
    }
}

#[test]
fn zero_coefficients_degenerate_to_deep_affine() {
    let mut spec = sinckan_spec(1, 1, 4, 9, 2.0, 2);
    spec.depth = 3;
    let net = Network::new(&spec).unwrap();
    let mut params = net.init(2);
    for l in 0..3 {
        for v in &mut params.get_mut(&format!("l{l}.c")).unwrap().data {
            *v = 0.0;
        }
    }
    // reference affine composition
    let affine = |params: &ParamStore, l: usize, x: &[f64], no: usize| -> Vec<f64> {
        let ni = x.len();
        let w1 = &params.get(&format!("l{l}.w1")).unwrap().data;
        let w2 = &params.get(&format!("l{l}.w2")).unwrap().data;
        (0..no)
            .map(|q| w2[q] + (0..ni).map(|p| w1[p * no + q] * x[p]).sum::<f64>())
            .collect()
    };
    for &x in &[-1.2, -0.3, 0.0, 0.77, 2.0] {
        let got = forward::<f64>(&net, &params, &[x]).unwrap();
        let h1 = affine(&params, 0, &[x], 4);
        let h2 = affine(&params, 1, &h1, 4);
        let want = affine(&params, 2, &h2, 1);
        assert_eq!(got[0], want[0], "pure affine must be exact");
    }
}

#[test]
fn cardinal_coefficient_extracts_single_basis() {
    // W1 = 0, w2 = 0, single edge with C_{i=0, j=1} = 1:
    // output = S(0, h_1)(tanh x)
    let mut spec = sinckan_spec(1, 1, 1, 9, 2.0, 2);
    spec.depth = 1;
    let net = Network::new(&spec).unwrap();
    let mut params = net.init(0).zeros_like();
    let nodes = SincNodeSet::new(9).unwrap();
    let center = nodes.half_width as usize; // slot of i = 0 in the first h block
    params.get_mut("l0.c").unwrap().data[center] = 1.0;
    let h1 = spec.hgrid.as_ref().unwrap().values[0];

    let at0 = forward::<f64>(&net, &params, &[0.0]).unwrap();
    assert_eq!(at0[0], 1.0, "cardinal node at the origin");

    for &x in &[-1.1, -0.4, 0.2, 0.9, 3.0] {
        let got = forward::<f64>(&net, &params, &[x]).unwrap();
        let want = sinc_series(0, h1, x.tanh());
        assert!((got[0] - want).abs() <= 1e-14, "{x}: {} vs {want}", got[0]);
    }
}

#[test]
fn mlp_zero_params_output_zero() {
    let spec = NetworkSpec {
        arch: ArchKind::Mlp,
        in_dim: 2,
        out_dim: 3,
        depth: 4,
        width: 8,
        degree: 0,
        hgrid: None,
        skip: SkipKind::Linear,
        transform: TransformKind::Tanh,
        log_domain: None,
        seed: 0,
    };
    let net = Network::new(&spec).unwrap();
    let params = net.init(0).zeros_like();
    let out = forward::<f64>(&net, &params, &[0.7, -2.2]).unwrap();
    assert_eq!(out, vec![0.0, 0.0, 0.0]);
}

#[test]
fn chebykan_t1_layer_is_tanh() {
    let spec = NetworkSpec {
        arch: ArchKind::ChebyKan,
        in_dim: 1,
        out_dim: 1,
        depth: 1,
        width: 1,
        degree: 4,
        hgrid: None,
        skip: SkipKind::Linear,
        transform: TransformKind::Tanh,
        log_domain: None,
        seed: 0,
    };
    let net = Network::new(&spec).unwrap();
    let mut params = net.init(0).zeros_like();
    params.get_mut("l0.c").unwrap().data[1] = 1.0; // select T_1
    for &x in &[-2.0, -0.5, 0.0, 0.3, 1.7] {
        let out = forward::<f64>(&net, &params, &[x]).unwrap();
        assert_eq!(out[0], x.tanh());
    }
}

#[test]
fn kan_forward_matches_brute_force() {
    let spec = NetworkSpec {
        arch: ArchKind::Kan,
        in_dim: 2,
        out_dim: 2,
        depth: 2,
        width: 5,
        degree: 8,
        hgrid: None,
        skip: SkipKind::Linear,
        transform: TransformKind::Tanh,
        log_domain: None,
        seed: 0,
    };
    let net = Network::new(&spec).unwrap();
    let params = net.init(13);
    let grid = sinckan::bases::SplineGrid::new(8).unwrap();
    let silu = |x: f64| x / (1.0 + (-x).exp());
    let kan_layer = |l: usize, x: &[f64], no: usize| -> Vec<f64> {
        let ni = x.len();
        let c = &params.get(&format!("l{l}.c")).unwrap().data;
        let wb = &params.get(&format!("l{l}.wb")).unwrap().data;
        let ws = &params.get(&format!("l{l}.ws")).unwrap().data;
        (0..no)
            .map(|q| {
                (0..ni)
                    .map(|p| {
                        let t = x[p].clamp(-1.0, 1.0);
                        let basis = bspline_basis(&grid, t);
                        let spl: f64 =
                            basis.iter().enumerate().map(|(i, b)| c[(q * ni + p) * 8 + i] * b).sum();
                        wb[q * ni + p] * silu(x[p]) + ws[q * ni + p] * spl
                    })
                    .sum()
            })
            .collect()
    };
    let mut rng = Rng::seed_from(8);
    for _ in 0..10 {
        let x: Vec<f64> = (0..2).map(|_| rng.uniform_in(-1.5, 1.5)).collect();
        let got = forward::<f64>(&net, &params, &x).unwrap();
        let want = kan_layer(1, &kan_layer(0, &x, 5), 2);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()), "{g} vs {w}");
        }
    }
}

#[test]
fn modified_mlp_matches_reference_gating() {
    let spec = NetworkSpec {
        arch: ArchKind::ModifiedMlp,
        in_dim: 2,
        out_dim: 1,
        depth: 4,
        width: 3,
        degree: 0,
        hgrid: None,
        skip: SkipKind::Linear,
        transform: TransformKind::Tanh,
        log_domain: None,
        seed: 0,
    };
    let net = Network::new(&spec).unwrap();
    let params = net.init(21);
    let aff = |w: &[f64], b: &[f64], x: &[f64], no: usize| -> Vec<f64> {
        (0..no)
            .map(|q| b[q] + x.iter().enumerate().map(|(p, xv)| w[q * x.len() + p] * xv).sum::<f64>())
            .collect()
    };
    let tanhv = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(f64::tanh).collect() };
    let get = |name: &str| params.get(name).unwrap().data.clone();

    let x = vec![0.4, -1.1];
    let u = tanhv(aff(&get("u.w"), &get("u.b"), &x, 3));
    let v = tanhv(aff(&get("v.w"), &get("v.b"), &x, 3));
    let mut h = tanhv(aff(&get("l0.w"), &get("l0.b"), &x, 3));
    for l in 1..=2 {
        let g = tanhv(aff(&get(&format!("l{l}.w")), &get(&format!("l{l}.b")), &h, 3));
        h = (0..3).map(|q| (1.0 - g[q]) * u[q] + g[q] * v[q]).collect();
    }
    let want = aff(&get("l3.w"), &get("l3.b"), &h, 1);

    let got = forward::<f64>(&net, &params, &x).unwrap();
    assert!((got[0] - want[0]).abs() <= 1e-14 * (1.0 + want[0].abs()));
}

/// Gradient-check dataset: offset grid and a target with a linear ramp and
/// offset. A symmetric grid with an odd target produces analytically zero
/// gradient coordinates whose finite differences are pure roundoff, which
/// would make the relative-error statistic meaningless.
fn mse_points(n: usize) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..n)
        .map(|i| -1.0 + 2.0 * (i as f64 + 0.217) / n as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|x| 3.0 * (3.0 * x).sin() + 2.0 * x + 2.5).collect();
    (xs, ys)
}

/// The five gradient-check configurations. The KAN uses the minimal cubic
/// basis count (4, every basis spanning the whole interval) so that no
/// coefficient sits at a spline support edge where its gradient is below
/// the finite-difference noise floor.
fn grad_check_specs() -> Vec<NetworkSpec> {
    let base = NetworkSpec {
        arch: ArchKind::Mlp,
        in_dim: 1,
        out_dim: 1,
        depth: 3,
        width: 16,
        degree: 0,
        hgrid: None,
        skip: SkipKind::Linear,
        transform: TransformKind::Tanh,
        log_domain: None,
        seed: 0,
    };
    let mut specs = vec![base.clone()];
    let mut m = base.clone();
    m.arch = ArchKind::ModifiedMlp;
    m.depth = 4;
    m.width = 12;
    specs.push(m);
    let mut k = base.clone();
    k.arch = ArchKind::Kan;
    k.depth = 2;
    k.width = 6;
    k.degree = 4;
    specs.push(k);
    let mut c = base.clone();
    c.arch = ArchKind::ChebyKan;
    c.depth = 2;
    c.width = 6;
    c.degree = 8;
    specs.push(c);
    specs.push(sinckan_spec(1, 1, 8, 33, 6.0, 6));
    specs
}

#[test]
fn gradient_check_passes_for_all_architectures() {
    let (xs, ys) = mse_points(23);
    for spec in &grad_check_specs() {
        let net = Network::new(spec).unwrap();
        let loss = MseLoss { net: &net, xs: &xs, ys: &ys };
        for seed in [1, 2, 3] {
            let params = net.init(seed);
            let worst = check_gradient(&loss, &params, 1e-5).unwrap();
            assert!(worst <= 1e-5, "{:?} seed {seed}: max relative error {worst}", spec.arch);
        }
    }
}

/// The tape-based gradient of an independently written SincKAN loss (direct
/// Sinc-series sums on tape variables) must agree with the training
/// backward pass and with finite differences.
#[test]
fn tape_brute_force_matches_training_backward() {
    let spec = sinckan_spec(1, 1, 4, 9, 2.0, 2);
    let net = Network::new(&spec).unwrap();
    let params = net.init(3);
    let (xs, ys) = mse_points(5);
    let hs = spec.hgrid.as_ref().unwrap().values.clone();
    let nodes = SincNodeSet::new(9).unwrap();
    let nc = hs.len() * nodes.count();

    let tape_grads = param_gradient(&params, |tape, leaves| {
        // array order: l0.c, l0.w1, l0.w2, l1.c, l1.w1, l1.w2
        let l0c = &leaves.vars[0];
        let l0w1 = &leaves.vars[1];
        let l0w2 = &leaves.vars[2];
        let l1c = &leaves.vars[3];
        let l1w1 = &leaves.vars[4];
        let l1w2 = &leaves.vars[5];
        let mut loss = tape.leaf(0.0);
        for (&x, &y) in xs.iter().zip(&ys) {
            // layer 0: hidden_q = w2[q] + w1[0,q] x + sum c * S(i,h)(tanh x)
            let t0 = x.tanh();
            let mut hidden = Vec::with_capacity(4);
            for q in 0..4 {
                let mut acc = l0w2[q] + l0w1[q] * x;
                let mut slot = 0usize;
                for &h in &hs {
                    for i in nodes.nodes() {
                        let b = sinc_series(i, h, t0);
                        acc = acc + l0c[q * nc + slot] * b;
                        slot += 1;
                    }
                }
                hidden.push(acc);
            }
            // layer 1 with tape-level tanh and sinc primitives
            let mut out = l1w2[0];
            for (p, hp) in hidden.iter().enumerate() {
                out = out + l1w1[p] * *hp;
                let t = hp.tanh();
                let mut slot = 0usize;
                for &h in &hs {
                    for i in nodes.nodes() {
                        let u = (t / h - i as f64) * std::f64::consts::PI;
                        out = out + l1c[p * nc + slot] * u.sinc();
                        slot += 1;
                    }
                }
            }
            let r = out - y;
            loss = loss + r * r;
        }
        loss * (1.0 / xs.len() as f64)
    })
    .unwrap();

    let loss = MseLoss { net: &net, xs: &xs, ys: &ys };
    let fast_grads = loss.grad(&params).unwrap();
    for (name, arr) in tape_grads.iter() {
        let fast = fast_grads.get(name).unwrap();
        for (a, b) in arr.data.iter().zip(&fast.data) {
            assert!(
                (a - b).abs() <= 1e-10 * (1.0 + b.abs()),
                "{name}: tape {a} vs backward {b}"
            );
        }
    }
    // and against central finite differences, per the documented bound
    let worst = check_gradient(&loss, &params, 1e-5).unwrap();
    assert!(worst <= 1e-5, "fd check: {worst}");
}

#[test]
fn jet_forward_matches_finite_difference_derivatives() {
    for spec in [sinckan_spec(1, 1, 8, 9, 2.0, 1), {
        let mut s = sinckan_spec(1, 1, 8, 9, 2.0, 1);
        s.arch = ArchKind::Mlp;
        s.depth = 3;
        s.degree = 0;
        s.hgrid = None;
        s
    }] {
        let net = Network::new(&spec).unwrap();
        let params = net.init(5);
        let h = 1e-4;
        let eval = |x: f64| forward::<f64>(&net, &params, &[x]).unwrap()[0];
        let jet_at = |x: f64| forward::<Jet<1>>(&net, &params, &[Jet::variable(x, 0)]).unwrap()[0];
        for &x in &[-0.8, -0.1, 0.35, 0.9] {
            let j = jet_at(x);
            assert!((j.v - eval(x)).abs() < 1e-14);
            let fd1 = (eval(x + h) - eval(x - h)) / (2.0 * h);
            let fd2 = (eval(x + h) - 2.0 * eval(x) + eval(x - h)) / (h * h);
            assert!(
                (j.d1[0] - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()),
                "{:?} d1 at {x}: {} vs {fd1}",
                spec.arch,
                j.d1[0]
            );
            assert!(
                (j.d2[0] - fd2).abs() <= 1e-4 * (1.0 + fd2.abs()),
                "{:?} d2 at {x}: {} vs {fd2}",
                spec.arch,
                j.d2[0]
            );
            // mixed use: second jet derivative vs finite difference of the
            // first jet derivative
            let fd_of_d1 = (jet_at(x + h).d1[0] - jet_at(x - h).d1[0]) / (2.0 * h);
            assert!(
                (j.d2[0] - fd_of_d1).abs() <= 1e-4 * (1.0 + fd_of_d1.abs()),
                "{:?} mixed at {x}",
                spec.arch
            );
        }
    }
}

#[test]
fn jet_backward_gradient_of_derivative_slots_matches_fd() {
    // d(u_x)/dtheta and d(u_xx)/dtheta from backward-in-jets vs finite
    // differences of the jet forward; this is the machinery the
    // physics-informed gradients stand on
    let spec = sinckan_spec(1, 1, 6, 9, 2.0, 1);
    let net = Network::new(&spec).unwrap();
    let params = net.init(9);
    let x0 = 0.37;

    let mut cache: EvalCache<Jet<1>> = EvalCache::for_network(&net);
    let mut sink: GradSink<Jet<1>> = GradSink::zeros_for(&net);
    forward_cached(&net, &params, &[Jet::variable(x0, 0)], &mut cache, true).unwrap();
    backward(&net, &params, &mut cache, &[Jet::constant(1.0)], &mut sink);

    let names: Vec<String> = params.names().map(str::to_string).collect();
    let step = 1e-6;
    let mut rng = Rng::seed_from(17);
    for _ in 0..40 {
        let ai = rng.below(names.len());
        let len = params.get(&names[ai]).unwrap().data.len();
        let ei = rng.below(len);
        let mut up = params.clone();
        up.get_mut(&names[ai]).unwrap().data[ei] += step;
        let mut dn = params.clone();
        dn.get_mut(&names[ai]).unwrap().data[ei] -= step;
        let ju = forward::<Jet<1>>(&net, &up, &[Jet::variable(x0, 0)]).unwrap()[0];
        let jd = forward::<Jet<1>>(&net, &dn, &[Jet::variable(x0, 0)]).unwrap()[0];
        let got = sink.arrays[ai][ei];
        let fd_v = (ju.v - jd.v) / (2.0 * step);
        let fd_d1 = (ju.d1[0] - jd.d1[0]) / (2.0 * step);
        let fd_d2 = (ju.d2[0] - jd.d2[0]) / (2.0 * step);
        assert!((got.v - fd_v).abs() <= 1e-5 * (1.0 + fd_v.abs()), "value slot");
        assert!((got.d1[0] - fd_d1).abs() <= 1e-5 * (1.0 + fd_d1.abs()), "d1 slot");
        assert!((got.d2[0] - fd_d2).abs() <= 1e-4 * (1.0 + fd_d2.abs()), "d2 slot");
    }
}

#[test]
fn activation_dumps_match_direct_sums() {
    let spec = sinckan_spec(1, 1, 4, 9, 2.0, 2);
    let net = Network::new(&spec).unwrap();
    let xs: Vec<f64> = (0..40).map(|i| -2.0 + 4.0 * i as f64 / 39.0).collect();

    // zero coefficients -> all samples zero
    let zeroed = net.init(0).zeros_like();
    let dump = dump_activations(&net, &zeroed, 0, (0, 1), &xs).unwrap();
    assert!(dump.iter().all(|(_, phi)| *phi == 0.0));

    // cardinal setup -> S(0, h_1)(tanh x) pointwise
    let mut params = net.init(0).zeros_like();
    let nodes = SincNodeSet::new(9).unwrap();
    params.get_mut("l0.c").unwrap().data[nodes.half_width as usize] = 1.0;
    let h1 = spec.hgrid.as_ref().unwrap().values[0];
    let dump = dump_activations(&net, &params, 0, (0, 0), &xs).unwrap();
    for (x, phi) in dump {
        assert!((phi - sinc_series(0, h1, x.tanh())).abs() <= 1e-14);
    }

    // random edge -> matches the brute-force activation sum
    let params = net.init(23);
    let hs = spec.hgrid.as_ref().unwrap().values.clone();
    let nb = hs.len() * nodes.count();
    let (p, q) = (0usize, 2usize);
    let c = &params.get("l0.c").unwrap().data;
    let dump = dump_activations(&net, &params, 0, (p, q), &xs).unwrap();
    for (x, phi) in dump {
        let t = x.tanh();
        let mut want = 0.0;
        let mut slot = 0usize;
        for &h in &hs {
            for i in nodes.nodes() {
                want += c[(q * 1 + p) * nb + slot] * sinc_series(i, h, t);
                slot += 1;
            }
        }
        assert!((phi - want).abs() <= 1e-12 * (1.0 + want.abs()), "{phi} vs {want}");
    }

    // out-of-range edge indices error
    assert!(dump_activations(&net, &params, 0, (5, 0), &xs).is_err());
    assert!(dump_activations(&net, &params, 7, (0, 0), &xs).is_err());
    // MLPs have no univariate edge functions
    let mut mspec = spec.clone();
    mspec.arch = ArchKind::Mlp;
    mspec.degree = 0;
    mspec.hgrid = None;
    let mnet = Network::new(&mspec).unwrap();
    let mparams = init(&mspec).unwrap();
    assert!(dump_activations(&mnet, &mparams, 0, (0, 0), &xs).is_err());
}

#[test]
fn every_forward_is_finite_at_default_init() {
    for arch in [
        ArchKind::Mlp,
        ArchKind::ModifiedMlp,
        ArchKind::Kan,
        ArchKind::ChebyKan,
        ArchKind::SincKan,
    ] {
        let mut spec = sinckan_spec(2, 2, 8, 9, 2.0, 2);
        spec.arch = arch;
        spec.in_dim = 2;
        spec.out_dim = 2;
        if arch == ArchKind::Kan || arch == ArchKind::ChebyKan {
            spec.degree = 8;
        }
        if !matches!(arch, ArchKind::SincKan) {
            spec.hgrid = None;
        }
        if matches!(arch, ArchKind::Mlp | ArchKind::ModifiedMlp) {
            spec.depth = 3;
            spec.degree = 0;
        }
        let net = Network::new(&spec).unwrap();
        let params = net.init(31);
        let mut rng = Rng::seed_from(77);
        for _ in 0..50 {
            let x = [rng.uniform_in(-3.0, 3.0), rng.uniform_in(-3.0, 3.0)];
            let out = forward::<f64>(&net, &params, &x).unwrap();
            assert!(out.iter().all(|v| v.is_finite()), "{arch:?} at {x:?}");
            // determinism
            let again = forward::<f64>(&net, &params, &x).unwrap();
            assert_eq!(out, again);
        }
    }
}
