//! Discontinuous piecewise-linear discretization of the elastic Helmholtz
//! operator with interior penalties on jumps and traction jumps.

mod assembly;
mod load;
mod norms;
mod params;
pub mod quadrature;
mod space;

pub use assembly::{assemble_system, assemble_system_with, BoundaryAlpha};
pub use load::{
    apply_weighted_mass, assemble_boundary_load, assemble_load_function, assemble_load_mode, assemble_load_per_element,
    DEFAULT_LOAD_DEGREE,
};
pub use norms::{energy_error, energy_norm_1h, energy_norms, evaluate_field, l2_error, l2_norm, EnergyNorms};
pub use params::PhysicalParams;
pub use space::{DgSpace, DgVector, DOFS_PER_ELEMENT};
