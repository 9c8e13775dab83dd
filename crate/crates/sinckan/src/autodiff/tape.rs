//! Reverse-mode tape for gradients of scalar losses with respect to a
//! [`ParamStore`].
//!
//! The tape records primitive operations on [`Var`] handles; replaying it
//! backward produces one adjoint per parameter leaf. Leaves never touched
//! during the forward pass keep adjoint 0 exactly.

use std::cell::RefCell;

use crate::bases::sinc_d012;
use crate::error::{Error, Result};
use crate::networks::{Array, ParamStore};

#[derive(Clone, Copy)]
struct Node {
    partials: [f64; 2],
    parents: [u32; 2],
}

/// Records primitive operations for one forward pass.
#[derive(Default)]
pub struct GradTape {
    nodes: RefCell<Vec<Node>>,
}

/// A recorded value: tape handle, node index, and the forward value.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t GradTape,
    idx: u32,
    pub val: f64,
}

/// Parameter leaves registered on a tape, array-aligned with the source
/// [`ParamStore`].
pub struct TapeParams<'t> {
    names: Vec<String>,
    shapes: Vec<Vec<usize>>,
    pub vars: Vec<Vec<Var<'t>>>,
}

impl GradTape {
    pub fn new() -> Self {
        GradTape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, partials: [f64; 2], parents: [u32; 2]) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len() as u32;
        nodes.push(Node { partials, parents });
        idx
    }

    /// A leaf variable (no parents contribute to it).
    pub fn leaf(&self, val: f64) -> Var<'_> {
        let idx = self.push([0.0, 0.0], [0, 0]);
        // self-parent with zero partial keeps the backward sweep branch-free
        self.nodes.borrow_mut()[idx as usize].parents = [idx, idx];
        Var { tape: self, idx, val }
    }

    /// Register every parameter element as a leaf, in store order.
    pub fn register<'t>(&'t self, params: &ParamStore) -> TapeParams<'t> {
        let mut names = Vec::new();
        let mut shapes = Vec::new();
        let mut vars = Vec::new();
        for (name, array) in params.iter() {
            names.push(name.to_string());
            shapes.push(array.shape.clone());
            vars.push(array.data.iter().map(|&v| self.leaf(v)).collect());
        }
        TapeParams { names, shapes, vars }
    }

    /// Replay the tape backward from `loss` and collect one adjoint per
    /// registered parameter leaf.
    pub fn gradient(&self, loss: Var<'_>, params: &TapeParams<'_>) -> Result<ParamStore> {
        if !loss.val.is_finite() {
            return Err(Error::non_finite(
                "param_gradient",
                format!("loss evaluated to {}", loss.val),
            ));
        }
        let nodes = self.nodes.borrow();
        let mut adjoint = vec![0.0f64; nodes.len()];
        adjoint[loss.idx as usize] = 1.0;
        for i in (0..nodes.len()).rev() {
            let a = adjoint[i];
            if a == 0.0 {
                continue;
            }
            let node = nodes[i];
            adjoint[node.parents[0] as usize] += node.partials[0] * a;
            adjoint[node.parents[1] as usize] += node.partials[1] * a;
        }
        let mut grads = ParamStore::new();
        for ((name, shape), vars) in params.names.iter().zip(&params.shapes).zip(&params.vars) {
            let data: Vec<f64> = vars.iter().map(|v| adjoint[v.idx as usize]).collect();
            grads.insert(name.clone(), Array { shape: clone_shape(shape), data });
        }
        Ok(grads)
    }
}

fn clone_shape(s: &[usize]) -> Vec<usize> {
    s.to_vec()
}

/// Gradient of a recorded scalar loss with respect to every array in
/// `params`. The returned store mirrors names and shapes.
pub fn param_gradient<F>(params: &ParamStore, f: F) -> Result<ParamStore>
where
    F: for<'t> FnOnce(&'t GradTape, &TapeParams<'t>) -> Var<'t>,
{
    let tape = GradTape::new();
    let leaves = tape.register(params);
    let loss = f(&tape, &leaves);
    tape.gradient(loss, &leaves)
}

impl<'t> Var<'t> {
    fn unary(self, val: f64, partial: f64) -> Var<'t> {
        let idx = self.tape.push([partial, 0.0], [self.idx, self.idx]);
        Var { tape: self.tape, idx, val }
    }

    fn binary(self, rhs: Var<'t>, val: f64, pa: f64, pb: f64) -> Var<'t> {
        let idx = self.tape.push([pa, pb], [self.idx, rhs.idx]);
        Var { tape: self.tape, idx, val }
    }

    pub fn sin(self) -> Var<'t> {
        let (s, c) = self.val.sin_cos();
        self.unary(s, c)
    }

    pub fn cos(self) -> Var<'t> {
        let (s, c) = self.val.sin_cos();
        self.unary(c, -s)
    }

    pub fn exp(self) -> Var<'t> {
        let e = self.val.exp();
        self.unary(e, e)
    }

    pub fn ln(self) -> Var<'t> {
        self.unary(self.val.ln(), 1.0 / self.val)
    }

    pub fn tanh(self) -> Var<'t> {
        let t = self.val.tanh();
        self.unary(t, 1.0 - t * t)
    }

    pub fn atanh(self) -> Var<'t> {
        self.unary(self.val.atanh(), 1.0 / (1.0 - self.val * self.val))
    }

    pub fn sqrt(self) -> Var<'t> {
        let r = self.val.sqrt();
        self.unary(r, 0.5 / r)
    }

    pub fn abs(self) -> Var<'t> {
        let s = if self.val < 0.0 { -1.0 } else { 1.0 };
        self.unary(self.val.abs(), s)
    }

    pub fn powi(self, n: i32) -> Var<'t> {
        self.unary(self.val.powi(n), f64::from(n) * self.val.powi(n - 1))
    }

    pub fn powf(self, p: f64) -> Var<'t> {
        self.unary(self.val.powf(p), p * self.val.powf(p - 1.0))
    }

    pub fn sinc(self) -> Var<'t> {
        let (s0, s1, _) = sinc_d012(self.val);
        self.unary(s0, s1)
    }

    pub fn silu(self) -> Var<'t> {
        if self.val > 40.0 {
            return self.unary(self.val, 1.0);
        }
        if self.val < -40.0 {
            return self.unary(0.0, 0.0);
        }
        let sig = 1.0 / (1.0 + (-self.val).exp());
        self.unary(self.val * sig, sig + self.val * sig * (1.0 - sig))
    }

    pub fn square(self) -> Var<'t> {
        self.unary(self.val * self.val, 2.0 * self.val)
    }
}

impl<'t> std::ops::Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Var<'t>) -> Var<'t> {
        self.binary(rhs, self.val + rhs.val, 1.0, 1.0)
    }
}

impl<'t> std::ops::Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Var<'t>) -> Var<'t> {
        self.binary(rhs, self.val - rhs.val, 1.0, -1.0)
    }
}

impl<'t> std::ops::Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Var<'t>) -> Var<'t> {
        self.binary(rhs, self.val * rhs.val, rhs.val, self.val)
    }
}

impl<'t> std::ops::Div for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: Var<'t>) -> Var<'t> {
        let q = self.val / rhs.val;
        self.binary(rhs, q, 1.0 / rhs.val, -q / rhs.val)
    }
}

impl<'t> std::ops::Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Var<'t> {
        self.unary(-self.val, -1.0)
    }
}

impl<'t> std::ops::Add<f64> for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: f64) -> Var<'t> {
        self.unary(self.val + rhs, 1.0)
    }
}

impl<'t> std::ops::Sub<f64> for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: f64) -> Var<'t> {
        self.unary(self.val - rhs, 1.0)
    }
}

impl<'t> std::ops::Mul<f64> for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: f64) -> Var<'t> {
        self.unary(self.val * rhs, rhs)
    }
}

impl<'t> std::ops::Div<f64> for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: f64) -> Var<'t> {
        self.unary(self.val / rhs, 1.0 / rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_store() -> ParamStore {
        let mut p = ParamStore::new();
        p.insert("w", Array { shape: vec![3], data: vec![1.0, -2.0, 0.5] });
        p.insert("w2", Array { shape: vec![2], data: vec![4.0, 5.0] });
        p
    }

    #[test]
    fn quadratic_gradient_is_2p() {
        let params = quadratic_store();
        let grads = param_gradient(&params, |tape, leaves| {
            let mut loss = tape.leaf(0.0);
            for arr in &leaves.vars {
                for &v in arr {
                    loss = loss + v.square();
                }
            }
            loss
        })
        .unwrap();
        assert_eq!(grads.get("w").unwrap().data, vec![2.0, -4.0, 1.0]);
        assert_eq!(grads.get("w2").unwrap().data, vec![8.0, 10.0]);
    }

    #[test]
    fn untouched_leaf_gets_exact_zero() {
        let params = quadratic_store();
        let grads = param_gradient(&params, |_tape, leaves| {
            // only "w" participates
            let w = &leaves.vars[0];
            w[0] * w[1] + w[2].sin()
        })
        .unwrap();
        assert_eq!(grads.get("w2").unwrap().data, vec![0.0, 0.0]);
        assert_eq!(grads.get("w").unwrap().data[0], -2.0);
    }

    #[test]
    fn non_finite_loss_is_reported_with_value() {
        let params = quadratic_store();
        let err = param_gradient(&params, |_tape, leaves| {
            let w = &leaves.vars[0];
            (w[0] - 1.0).ln() // ln(0) = -inf
        })
        .unwrap_err();
        assert!(err.to_string().contains("-inf"), "{err}");
    }

    #[test]
    fn chain_rule_mixed_expression() {
        // loss = exp(sin(w0) * w1) ; d/dw0 = cos(w0) * w1 * loss, d/dw1 = sin(w0) * loss
        let mut p = ParamStore::new();
        p.insert("w", Array { shape: vec![2], data: vec![0.8, 1.3] });
        let grads = param_gradient(&p, |_t, leaves| {
            let w = &leaves.vars[0];
            (w[0].sin() * w[1]).exp()
        })
        .unwrap();
        let loss = (0.8f64.sin() * 1.3).exp();
        let g = grads.get("w").unwrap();
        assert!((g.data[0] - 0.8f64.cos() * 1.3 * loss).abs() < 1e-12);
        assert!((g.data[1] - 0.8f64.sin() * loss).abs() < 1e-12);
    }
}
