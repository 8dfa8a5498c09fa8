//! Z2-gain graphs, gain-sparsity and symmetric rigidity in normed planes.

pub mod gain_graph;
pub mod isomorphism;
pub mod sparsity;
pub mod catalog;
pub mod constructor;
pub mod moves;
pub mod linalg;
pub mod norm;
pub mod rational;
pub mod symrigidity;
pub mod colouring;
pub mod placement;
pub mod io;
