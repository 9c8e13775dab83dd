//! The five architectures — SincKAN, spline KAN, ChebyKAN, MLP, modified
//! MLP — with deterministic initialization, a shared parameter store, and
//! forward/backward passes generic over the scalar type.

mod eval;
mod net;
mod spec;
mod store;

pub use eval::{
    backward, check_layout, dump_activations, forward, forward_cached, sinckan_layer, EvalCache,
    GradSink,
};
pub use net::Network;
pub use spec::{ArchKind, NetworkSpec, SkipKind, TransformKind};
pub use store::{Array, ParamStore};

use crate::error::Result;

/// Initialize parameters for a spec (deterministic in `spec.seed`).
pub fn init(spec: &NetworkSpec) -> Result<ParamStore> {
    let net = Network::new(spec)?;
    Ok(net.init(spec.seed))
}
