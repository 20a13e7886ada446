use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A covariance whose smallest eigenvalue is below the conditioning floor.
    #[error("matrix is ill-conditioned: smallest eigenvalue {min_eigenvalue:e}")]
    Conditioning { min_eigenvalue: f64 },

    #[error("generators {first} and {second} coincide")]
    DegenerateGenerators { first: usize, second: usize },

    #[error("agent at ({x}, {y}) lies inside or on obstacle {obstacle}")]
    AgentInObstacle { obstacle: usize, x: f64, y: f64 },

    #[error("polygon has {vertices} vertices, need at least 3")]
    DegeneratePolygon { vertices: usize },

    #[error("cell of agent {agent} is empty")]
    EmptyCell { agent: usize },

    #[error("density mass {mass:e} on cell is numerically zero")]
    MassUnderflow { mass: f64 },

    #[error("need at least {components} points to fit {components} components, got {points}")]
    InsufficientData { points: usize, components: usize },

    #[error("mixture density is zero at point {index}")]
    ZeroDensity { index: usize },

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    #[error("invariant violated at t = {t}: {message}")]
    InvariantViolation { t: f64, message: String },

    #[error("scenario field `{field}`: {message}")]
    Scenario { field: String, message: String },
}

impl Error {
    pub(crate) fn scenario(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.into(),
            message: message.into(),
        }
    }
}
