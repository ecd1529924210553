//! Analytic and finite-element solvers for the graded damage model in one
//! dimension: the tensile rod, the rigid block on a damageable interface and
//! the independent quadrature oracles that check them.

pub mod block;
pub mod error;
pub mod exec;
pub mod fem;
pub mod material;
pub mod oracle;
pub mod profile;
pub mod rod;

pub use block::{Block, BlockPhase, BlockState, BlockStation, ElasticLimits, Phase4Form};
pub use error::{GdlError, Result};
pub use exec::Strategy;
pub use material::{
    Constitutive, ConstitutiveVariant, Degradation, DimensionlessGroups, MaterialSpec, SnapBack,
    Threshold,
};
pub use oracle::{BracketConfig, QuadratureConfig};
pub use profile::{FieldKind, FieldProfile};
pub use rod::{Rod, RodState};
