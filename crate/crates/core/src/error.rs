use thiserror::Error;

/// Errors raised while evaluating potentials, metrics and derived loci.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A potential produced a non-finite value on a finite-difference stencil.
    #[error("non-finite value {value} at stencil point {point:?}")]
    NonFiniteEvaluation { point: Vec<f64>, value: f64 },

    /// A state lies outside the domain of the model.
    #[error("state outside domain: {0}")]
    Domain(String),

    /// A model parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The metric determinant is below the degeneracy threshold.
    #[error("degenerate metric: det = {det:e} (|det|/scale^k = {relative:e})")]
    Degenerate { det: f64, relative: f64 },

    /// A matrix that must be symmetric is not.
    #[error("asymmetric {what}: entry ({i}, {j}) = {a:e} vs ({j}, {i}) = {b:e}")]
    Asymmetric {
        what: &'static str,
        i: usize,
        j: usize,
        a: f64,
        b: f64,
    },

    /// Curvature was requested from a metric without derivative data.
    #[error("metric carries no first derivatives; curvature is undefined")]
    MissingDerivatives,

    /// A closed form is evaluated where its denominator vanishes.
    #[error("{what} diverges: denominator {denominator:e}")]
    Divergent {
        what: &'static str,
        denominator: f64,
    },

    /// Two independent formulas for the same quantity disagree.
    #[error("{what}: {first:e} vs {second:e}")]
    FormulaMismatch {
        what: &'static str,
        first: f64,
        second: f64,
    },

    /// The extent of reaction leaves some mole number negative.
    #[error("extent {xi} infeasible: negative moles for {species:?}")]
    InfeasibleExtent { xi: f64, species: Vec<String> },

    /// The model has no spinodal or critical point (ideal gas).
    #[error("{0}")]
    NoCriticalBehaviour(&'static str),

    /// A response function is undefined at a mechanically unstable state.
    #[error("mechanically unstable state: (dp/dv)_T = {dp_dv:e}")]
    MechanicallyUnstable { dp_dv: f64 },

    /// An iterative solve failed to converge.
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
}

impl Error {
    /// `true` for errors caused by evaluating outside a model's domain.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::NonFiniteEvaluation { .. }
                | Error::Degenerate { .. }
                | Error::Divergent { .. }
                | Error::InfeasibleExtent { .. }
                | Error::MechanicallyUnstable { .. }
                | Error::NoCriticalBehaviour(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
