use thiserror::Error;

pub type Result<T> = std::result::Result<T, KerrError>;

/// A phase-space location attached to certification failures.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WorstPoint {
    pub r: f64,
    pub xi: [f64; 3],
}

impl std::fmt::Display for WorstPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "r={:.6}, xi=({:.6}, {:.6}, {:.6})",
            self.r, self.xi[0], self.xi[1], self.xi[2]
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KerrError {
    #[error("spin |a|={a} is not below the mass m={m}")]
    ExtremalOrSuper { a: f64, m: f64 },
    #[error("mass must be positive, got {0}")]
    NonpositiveMass(f64),
    #[error("coordinate point is in the {found} chart, expected {expected}")]
    ChartMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("Boyer-Lindquist chart is singular at r={r} (Delta={delta})")]
    HorizonSingular { r: f64, delta: f64 },
    #[error("modifier blend fails the spacelike condition: {reason} (r={r}, theta={theta}, margin={margin:e})")]
    BlendInfeasible {
        reason: String,
        r: f64,
        theta: f64,
        margin: f64,
    },
    #[error("critical point structure of the potential is inconsistent: {0}")]
    ClassificationAmbiguous(String),
    #[error("frequency triplet ({xi_tau}, {xi_phi}, {lambda}) violates the admissibility bound")]
    InadmissibleFrequency {
        xi_tau: f64,
        xi_phi: f64,
        lambda: f64,
    },
    #[error("no regime contains ({xi_tau}, {xi_phi}, {lambda}) with positive margin")]
    CoverGap {
        xi_tau: f64,
        xi_phi: f64,
        lambda: f64,
    },
    #[error("constant search failed: {0}")]
    ConstantSearchFailed(String),
    #[error("bulk positivity fails at {at}: margin {margin:e} ({what})")]
    PositivityFailure {
        what: String,
        at: WorstPoint,
        margin: f64,
    },
    #[error("boundary sign condition fails at {at}: {what} ({margin:e})")]
    BoundarySignFailure {
        what: String,
        at: WorstPoint,
        margin: f64,
    },
    #[error("r={r} is not outside the event horizon r+={r_plus}")]
    BelowHorizon { r: f64, r_plus: f64 },
    #[error("CFL number {cfl} exceeds {limit}")]
    CflViolation { cfl: f64, limit: f64 },
    #[error("non-finite field at step {step}")]
    NonFinite { step: usize },
    #[error("scattering integration did not converge: residual {residual:e}")]
    StiffFailure { residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
