//! Finite-volume and random-choice solvers for scalar conservation laws
//! whose flux has a single inflection point, with nonclassical shocks
//! selected by a kinetic function.
//!
//! The reconstruction scheme in [`schemes`] transports isolated
//! nonclassical shocks exactly while remaining conservative; [`glimm`]
//! provides a random-choice reference built on the exact Riemann solver in
//! [`riemann`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod flux;
pub mod glimm;
pub mod kinetics;
pub mod presets;
pub mod quadrature;
pub mod riemann;
mod roots;
pub mod schemes;

pub use error::{Error, Result};
pub use flux::{Convexity, EntropyPair, FluxKind, FluxSpec, Monotonicity};
pub use kinetics::{KineticFunction, Kinetics};
pub use riemann::{RiemannSolver, Wave, WaveFan, WaveKind};
pub use schemes::{Boundary, GridState, InitialData, SchemeConfig, SchemeKind};
