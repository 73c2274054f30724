//! Divisibility of divisor classes and prime-to-p torsion on Jacobians of curves
//! whose special fiber is a nodal union of rational curves.

pub mod arith;
pub mod finite_field;
pub mod linalg;
pub mod torus;
pub mod dual_graph;
pub mod descent;
pub mod families;
pub mod oracle;
pub mod parse;
pub mod report;
