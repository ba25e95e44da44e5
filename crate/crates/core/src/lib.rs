//! Exact and semianalytic transient of a stationary scattering wave after an
//! instantaneous change of a potential-step height, plus an open-boundary
//! Crank–Nicolson grid simulation to compare against.

pub mod composer;
pub mod error;
pub mod faddeeva;
pub mod gridsim;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod quad;
pub mod run;
pub mod transient;

pub use error::{Error, Result};
pub use model::{Incidence, MomentumSet, Potential, Scenario, Side};
pub use num_complex::Complex64;
