//! Semiclassical soliton ensembles for the three-wave resonant interaction equations.

pub mod app;
pub mod dd;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod quad;
pub mod recon;
pub mod sim;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
