//! Exact verification of simplex equations in correspondences, the coloring
//! recursion, the Ising tetrahedron solution, its spectral weight matrix and
//! the twisted tetrahedron equation, together with brute-force 3D Ising
//! partition functions on small tori.

pub mod codes;
pub mod coloring;
pub mod correspondence;
pub mod error;
pub mod fourcube;
pub mod hypercube;
pub mod lattice;
pub mod recursion;
pub mod report;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use hypercube::FaceWord;
pub use scalar::{Laurent, Ring};
