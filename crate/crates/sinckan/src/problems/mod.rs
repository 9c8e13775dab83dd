//! Benchmark registry: the eight approximation targets and the PDE problems,
//! each with domain, exact solution, residual operator, and constraints.

pub mod grid;
mod pdes;
mod targets;

pub use grid::{linspace, make_grid, PointSet};
pub use pdes::{
    get_problem, robin_value, slots_from_jet, ConstraintData, ConstraintKind, ConstraintSet,
    FieldSlots, Problem, ProblemKind, SelfTestReport, MAX_DIM, PROBLEM_NAMES,
};
pub use targets::{get_function, TargetFunction, FUNCTION_NAMES};
