use thiserror::Error;

/// Unified error type for the whole engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("density piece is not absolutely integrable on ({lo}, {hi}): {what}")]
    NonIntegrablePiece { lo: f64, hi: f64, what: String },

    #[error("integrand undefined at atom location {at}: one-sided limits differ and no point value supplied")]
    UndefinedAtAtom { at: f64 },

    #[error("piece has no one-sided limit at {at}")]
    OscillatoryPiece { at: f64 },

    #[error("lambda-representative is an indeterminate form at {at}")]
    IndeterminateForm { at: f64 },

    #[error("function is not of bounded variation: {reason}")]
    NotBV { reason: String },

    #[error("u*A is not of bounded variation, so u is outside the pairing class: {reason}")]
    NotInBVA { reason: String },

    #[error("u is not in the summability class X: {reason}")]
    NotInClassX { reason: String },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("bad catalog parameters: {0}")]
    BadParams(String),

    #[error("quadrature failed to reach tolerance {tol:e}: estimated error {err:e} after {evals} evaluations")]
    QuadratureFailure { tol: f64, err: f64, evals: usize },

    #[error("integrand is not integrable: {0}")]
    NotIntegrable(String),

    #[error("no closed-form trace available: {0}")]
    NoClosedForm(String),

    #[error("coarea hypothesis fails at level t = {t}: exceptional set carries mass {mass}")]
    HypothesisFailed { t: f64, mass: f64 },

    #[error("point {at} lies in the exceptional set of level t = {t}")]
    ExceptionalPoint { at: f64, t: f64 },

    #[error("grid shapes do not match: {0}")]
    ShapeMismatch(String),

    #[error("iteration budget exceeded after {iters} iterations (best energy {best})")]
    BudgetExceeded { iters: usize, best: f64 },

    #[error("field has no finite essential supremum")]
    UnboundedField,

    #[error("invalid construction: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
