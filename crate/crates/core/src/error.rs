use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GdlError {
    #[error("damage value {value} outside admissible domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("invalid material data: {0}")]
    InvalidSpec(String),

    #[error("degenerate material: {0}")]
    DegenerateMaterial(String),

    #[error("{0} diverges at d_m = 1")]
    Divergent(&'static str),

    #[error("constitutive variant not supported here: {0}")]
    UnsupportedVariant(String),

    #[error("driving variable {value} outside the {phase} range [{lo}, {hi}]")]
    Phase {
        phase: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("process zone collapsed: crack length {c} reached the block width {length}")]
    Collapse { c: f64, length: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("inconsistent multiplier field: end residual {residual:e} exceeds {limit:e}")]
    Inconsistency { residual: f64, limit: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, GdlError>;

pub(crate) fn check_damage(d: f64) -> Result<()> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(GdlError::Domain {
            value: d,
            lo: 0.0,
            hi: 1.0,
        })
    }
}
