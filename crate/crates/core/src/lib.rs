//! Numerical toolkit for limit theorems under sublinear expectations.
//!
//! A sublinear expectation is the upper envelope `E[X] = max_θ E_θ[X]` of a finite
//! family of discrete distributions. The crate evaluates nested (adapted)
//! versions of it exactly or on grids, and checks law-of-large-numbers and
//! central-limit rates against their explicit bounds.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clt;
pub mod engine;
pub mod estimators;
pub mod family;
pub mod gnormal;
pub mod harness;
pub mod lln;
pub mod normal;
pub mod polytope;
pub mod pwl;
pub mod quadrature;
pub mod report;
pub mod stein;

pub use family::{
    make_family, presets, DiscreteDistribution, FamilyError, FamilyStats, UncertaintyFamily,
};
pub use pwl::{HeatEval, PiecewiseLinearFn};
pub use report::RateReport;
