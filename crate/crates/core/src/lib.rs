//! Exact tight bounds on counterfactual probabilities.
//!
//! Given a finite-domain causal structure and conditional distributions on
//! the observables, this crate computes the range of every counterfactual
//! probability consistent with the data: the observables pin down linear
//! equality constraints on the latent response-function distribution, and a
//! two-phase simplex over exact rationals optimizes the query in both
//! directions. Both endpoints come with feasible witness distributions, so
//! the bounds are attained rather than merely valid. Closed-form bound
//! formulas for the binary instrumental-variables model are provided as
//! independent evaluators, and a synthetic-trial harness generates ground
//! truth for end-to-end validation.
//!
//! Everything is an immutable value and every operation is a pure function;
//! no tolerances enter anywhere between input parsing and decimal rendering.

pub mod bounds;
pub mod cli;
pub mod constraints;
pub mod datasets;
pub mod format;
pub mod iv;
mod linalg;
pub mod lp;
pub mod observed;
pub mod rational;
pub mod report;
pub mod synth;
pub mod rfm;

pub use rational::Rational;
