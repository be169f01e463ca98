//! Rigorous bounds for nonlinear optimization problems.

pub mod assembly;
pub mod expr;
pub mod geom;
pub mod graphgen;
pub mod interval;
pub mod lp;
pub mod prover;
pub mod taylor;
