//! Vacuum radiation-pressure linear response of a one-dimensional cavity
//! formed by two mirrors.
//!
//! The crate evaluates the motional susceptibilities of the cavity, the
//! static Casimir force and energy, the quasistatic stiffness, viscosity and
//! inertia coefficients, time-domain motional forces for prescribed mirror
//! trajectories, and a rigid-body model of the inertia of a stressed cavity.
//!
//! Conventions: `f(t) = ∫ f[ω] e^{-iωt} dω/2π`, so causal response functions
//! are analytic in the upper half of the complex frequency plane. Forces are
//! positive along increasing coordinate; mirror 1 sits at the lower
//! coordinate.

pub mod cavity;
pub mod error;
pub mod mirror;
pub mod output;
pub mod quadrature;
pub mod quasistatic;
pub mod rigid_body;
pub mod spectral;
pub mod time_domain;
pub mod units;

pub use cavity::{CavityConfig, Mirror};
pub use error::{Error, Result};
pub use mirror::{MirrorKind, MirrorModel, ReflectivityTable};
pub use units::UnitSystem;
