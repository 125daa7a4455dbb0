//! Reduced Hamiltonian model of a relativistic charged particle moving near an
//! infinite straight wire whose current is `I0 + k·I1(t)`.
//!
//! The conserved angular momentum `L` and axial momentum `pz` reduce the
//! Lorentz force equation to a planar system in `(r, p_r)`. This crate
//! provides:
//!
//! - [`model`]: parameters, the reduced vector field, the Hamiltonian, the
//!   equilibrium and reconstruction of the full 3D motion.
//! - [`potential`]: the retarded vector potential of a periodic zero-mean
//!   current modulation and its cylinder-function profiles.
//! - [`integrator`]: an adaptive Runge-Kutta integrator with dense output and
//!   section-crossing events.
//! - [`periodmap`]: turning points and the energy-period map `T(H)`.
//! - [`melnikov`]: harmonic and subharmonic Melnikov functions.
//! - [`orbitfinder`]: Newton shooting on the stroboscopic map with Floquet
//!   classification.
//! - [`verify`]: grid corroboration of the sign claims behind the
//!   monotonicity of `T(H)`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod integrator;
pub mod interp;
pub mod melnikov;
pub mod model;
pub mod orbitfinder;
pub mod periodmap;
pub mod potential;
pub mod quad;
pub mod roots;
pub mod verify;

pub use error::{Error, Result};
pub use model::{DerivedParams, Equilibrium, FieldModel, PhysParams, Profile, RadialState};
