//! Central finite-volume schemes and Fourier spectral tools for 1D
//! conservation laws.
//!
//! * [`mesh`]: grids, cell averages, minmod-limited reconstruction.
//! * [`flux`]: Burgers, linear advection, Euler, saturating diffusion.
//! * [`central`]: Nessyahu–Tadmor staggered and Kurganov–Tadmor semi-discrete solvers.
//! * [`spectral`]: Fourier projection, concentration-kernel edge detection,
//!   adaptive mollifier and filter.
//! * [`sv`]: Fourier Galerkin / spectral viscosity Burgers solver.
//! * [`oracles`]: exact solutions, error norms, convergence studies and the
//!   acceptance battery.

pub mod central;
pub mod config;
pub mod error;
pub mod flux;
pub mod mesh;
pub mod oracles;
pub mod quadrature;
pub mod run;
pub mod spectral;
pub mod sv;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
