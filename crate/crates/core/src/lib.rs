//! Decision procedure for the existential theory of the integers with
//! addition, order, and monadic predicates for k-th powers and for
//! images of integer-valued polynomials of degree at most 3.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod numtheory;
pub mod lrbs;
pub mod pell;
pub mod poly;
pub mod sexpr;
pub mod atoms;
pub mod formula;
pub mod power_solver;
pub mod poly_solver;
pub mod solver;
pub mod oracle;
pub mod encoder;
