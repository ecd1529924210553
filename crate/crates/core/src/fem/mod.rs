//! Finite-element solver for the rod by alternating minimization: an
//! equilibrium solve at frozen damage, then a constrained damage solve at
//! frozen displacements, until the pair stops changing.

pub mod mesh;
pub mod model;
pub mod multipliers;
pub mod path;
pub mod projection;

pub use mesh::Mesh1D;
pub use model::{element_stiffness, DamageSolve, FemModel, OMEGA_MIN, SEED_REDUCTION};
pub use multipliers::{recover_multipliers, Multipliers};
pub use path::{
    default_schedule, energy_mismatch, mesh_study, run_load_path, FemState, LoadPath, PathOptions,
    DEFAULT_ELEMENTS, DEFAULT_STEPS,
};
