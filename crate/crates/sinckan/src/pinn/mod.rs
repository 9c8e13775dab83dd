//! Physics-informed loss assembly: residual evaluation via jets,
//! initial/boundary constraint losses, and the PIKAN training loop.

mod fit;
mod grad;

pub use fit::fit_pinn;
pub use grad::PinnLossFn;

use crate::autodiff::Jet;
use crate::error::{Error, Result};
use crate::networks::{forward, Network, ParamStore};
use crate::problems::{
    robin_value, slots_from_jet, ConstraintData, ConstraintKind, ConstraintSet, FieldSlots,
    PointSet, Problem,
};

/// Per-term loss breakdown with unit weights: total is the exact sum of the
/// three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinnLossBreakdown {
    pub l_r: f64,
    pub l_ic: f64,
    pub l_bc: f64,
    pub total: f64,
}

/// The field being constrained: a trained network or the problem's own
/// exact solution (the oracle used by self-checks and tests).
#[derive(Clone, Copy)]
pub enum Field<'a> {
    Network { net: &'a Network, params: &'a ParamStore },
    Exact,
}

impl<'a> Field<'a> {
    /// Value, first, and pure second derivatives of every output at `point`.
    pub fn slots(&self, problem: &Problem, point: &[f64]) -> Result<Vec<FieldSlots<f64>>> {
        match self {
            Field::Exact => Ok(problem.exact_slots(point)),
            Field::Network { net, params } => match problem.input_dim() {
                1 => network_slots::<1>(net, params, point),
                2 => network_slots::<2>(net, params, point),
                3 => network_slots::<3>(net, params, point),
                d => Err(Error::shape("pinn", format!("unsupported input dim {d}"))),
            },
        }
    }

    /// Output values only.
    pub fn values(&self, problem: &Problem, point: &[f64]) -> Result<Vec<f64>> {
        match self {
            Field::Exact => Ok(problem.eval_exact_stable(point)),
            Field::Network { net, params } => forward::<f64>(net, params, point),
        }
    }
}

fn network_slots<const K: usize>(
    net: &Network,
    params: &ParamStore,
    point: &[f64],
) -> Result<Vec<FieldSlots<f64>>> {
    let args: Vec<Jet<K>> = point
        .iter()
        .enumerate()
        .map(|(d, &v)| Jet::variable(v, d))
        .collect();
    let outs = forward::<Jet<K>>(net, params, &args)?;
    Ok(outs.iter().map(slots_from_jet).collect())
}

/// PDE residual components of a field at one interior point.
pub fn residual(problem: &Problem, field: Field<'_>, point: &[f64]) -> Result<Vec<f64>> {
    for (d, &(lo, hi)) in problem.domain.iter().enumerate() {
        let (mlo, mhi) = problem.residual_margins[d];
        if point[d] <= lo + mlo || point[d] >= hi - mhi {
            return Err(Error::domain(
                "residual",
                format!(
                    "point {point:?} is outside the open residual domain of {}",
                    problem.name
                ),
            ));
        }
    }
    let slots = field.slots(problem, point)?;
    Ok(problem.residual_at(point, &slots))
}

/// Mean-of-squares physics-informed loss over the given residual batch and
/// constraint sets (Robin terms evaluated through jets; periodic terms
/// match value and first derivative across the identified pair).
pub fn pinn_loss(
    problem: &Problem,
    field: Field<'_>,
    residual_points: &PointSet,
    constraints: &[ConstraintSet],
) -> Result<PinnLossBreakdown> {
    if residual_points.is_empty() {
        return Err(Error::config("pinn_loss requires a non-empty residual batch"));
    }
    let mut l_r = 0.0;
    for p in residual_points.iter() {
        let slots = field.slots(problem, p)?;
        for r in problem.residual_at(p, &slots) {
            l_r += r * r;
        }
    }
    l_r /= residual_points.len() as f64;

    let (mut ic_acc, mut ic_terms) = (0.0f64, 0usize);
    let (mut bc_acc, mut bc_terms) = (0.0f64, 0usize);
    for set in constraints {
        let (acc, terms): (&mut f64, &mut usize) = if set.kind == ConstraintKind::Initial {
            (&mut ic_acc, &mut ic_terms)
        } else {
            (&mut bc_acc, &mut bc_terms)
        };
        *terms += set.term_count(problem.output_dim);
        match &set.data {
            ConstraintData::Values(targets) => {
                for (i, p) in set.points.iter().enumerate() {
                    let got = field.values(problem, p)?;
                    for (q, &want) in targets[i].iter().enumerate() {
                        let d = got[q] - want;
                        *acc += d * d;
                    }
                }
            }
            ConstraintData::Robin { coeff_u, coeff_d1, rhs, output } => {
                for p in set.points.iter() {
                    let slots = field.slots(problem, p)?;
                    let b = robin_value(&slots[*output], *coeff_u, coeff_d1, *rhs);
                    *acc += b * b;
                }
            }
            ConstraintData::Periodic { partners, match_d1_dims } => {
                for (i, p) in set.points.iter().enumerate() {
                    let a = field.slots(problem, p)?;
                    let b = field.slots(problem, partners.point(i))?;
                    for q in 0..problem.output_dim {
                        let dv = a[q].value - b[q].value;
                        *acc += dv * dv;
                        for &d in match_d1_dims {
                            let dd = a[q].d1[d] - b[q].d1[d];
                            *acc += dd * dd;
                        }
                    }
                }
            }
        }
    }
    let l_ic = if ic_terms > 0 { ic_acc / ic_terms as f64 } else { 0.0 };
    let l_bc = if bc_terms > 0 { bc_acc / bc_terms as f64 } else { 0.0 };
    Ok(PinnLossBreakdown { l_r, l_ic, l_bc, total: l_r + l_ic + l_bc })
}

/// Plot-ready dump: one row per evaluation-grid point with coordinates,
/// exact values, predictions, and absolute errors per output.
pub fn predictions_csv(problem: &Problem, field: Field<'_>, counts: &[usize]) -> Result<String> {
    let grid = crate::problems::make_grid(&problem.domain, counts)?;
    let mut header: Vec<String> = problem.dim_names.iter().map(|s| s.to_string()).collect();
    for name in &problem.output_names {
        header.push(format!("{name}_exact"));
        header.push(format!("{name}_pred"));
        header.push(format!("{name}_abs_error"));
    }
    let mut out = header.join(",");
    out.push('\n');
    for p in grid.iter() {
        let exact = problem.eval_exact_stable(p);
        let pred = field.values(problem, p)?;
        let mut row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
        for q in 0..problem.output_dim {
            row.push(format!("{}", exact[q]));
            row.push(format!("{}", pred[q]));
            row.push(format!("{}", (exact[q] - pred[q]).abs()));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
