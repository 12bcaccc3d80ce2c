//! Exactness certificates for Lasserre's SOS relaxation of polynomial
//! minimization under `n` equality constraints in `n` variables.

pub mod assumption;
pub mod certgen;
pub mod degbound;
pub mod gradpipe;
pub mod groebner;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod sdp;
pub mod univar;

pub use poly::{Monomial, Polynomial, QPoly};
pub use scalar::{Coeff, Quad};
