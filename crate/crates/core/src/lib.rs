//! Solver toolkit for the generalized Tricomi equation
//! u_tt - t^ell A(x, d_x) u = f on the half-space t > 0.
//!
//! The central object is an integral transform that maps solutions
//! w(x, r; b) of the base equation w_rr - A w = 0 into solutions of the
//! degenerate equation, weighted by a hypergeometric kernel. The crate
//! provides:
//!
//! * [`params`]: the exponent ell and every derived constant,
//! * [`specfun`]: gamma and Gauss hypergeometric evaluation,
//! * [`kernel`]: the kernel E, its derivatives, and its PDE residual,
//! * [`wave`]: base-equation solutions in 1-3 space dimensions,
//! * [`transform`]: the operators K, K0, K1 and the Cauchy solver,
//! * [`verify`]: independent finite-difference and identity oracles,
//! * [`quad`] / [`ode`]: the underlying numerical machinery.

pub mod error;
pub mod interp;
pub mod kernel;
pub mod ode;
pub mod params;
pub mod quad;
pub mod specfun;
pub mod transform;
pub mod verify;
pub mod wave;

pub use error::{Error, Result};
pub use params::TricomiParams;
