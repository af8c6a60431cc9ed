//! Numerical checks for the logarithmic representation `ln Ψ` of a wave
//! function: hydrodynamic fields, the conformal map `Ψ = e^{M/2}`, winding
//! numbers of `Ψ` along complex paths, loop quantization and transport along
//! characteristics.

pub mod conformal;
pub mod contour;
pub mod madelung;
pub mod numerics;
pub mod quantization;
pub mod runner;
pub mod transport;
