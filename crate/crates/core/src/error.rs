use crate::numerics::NumericsError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid potential: {0}")]
    Validation(alloc::string::String),
    #[error("metric g = C_1ij is degenerate (|det g| = {det:e})")]
    DegenerateMetric { det: f64 },
    #[error("point is not semi-simple (eigenvalue gap {gap:e} below {threshold:e})")]
    NotSemisimple { gap: f64, threshold: f64 },
    #[error("multiplication by the Euler field is not diagonalisable (eigenvector residual {residual:e})")]
    DefectiveU { residual: f64 },
    #[error("idempotent normalisation failed (|c| = {scale:e})")]
    DegenerateIdempotent { scale: f64 },
    #[error("canonical frame jumps between stencil points (eigenvalue shift {shift:e}, gap {gap:e})")]
    FrameDiscontinuity { shift: f64, gap: f64 },
    #[error("spec is not in normal form: {0}")]
    NotNormalForm(&'static str),
    #[error("Newton line search exhausted its damping at iteration {iteration}")]
    NonPositiveIterate { iteration: usize },
}
