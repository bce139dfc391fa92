//! Pseudo-spectral tools for the dissipative KdV equation
//! `u_t + u_xxx + |D|^α u + u u_x = 0` on a periodic box.

pub mod acceptance;
pub mod error;
pub mod fit;
pub mod initial;
pub mod kernels;
pub mod linear;
pub mod oracle;
pub mod picard;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{make_grid, Grid, GridRef, Lp, NormPoint, RealField, SpectralField};
