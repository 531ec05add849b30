use thiserror::Error;

/// Errors raised while constructing or evaluating similarity solutions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("sonic singularity: ODE denominator vanishes at (xi={xi}, u={u}) away from a critical point")]
    SonicSingularity { xi: f64, u: f64 },

    #[error("indeterminate slope at xi=0 with U={u} != 0")]
    OriginIndeterminate { u: f64 },

    #[error("(xi={xi}, u={u}) is a critical point; the slope there is not given by the ODE quotient")]
    AtCriticalPoint { xi: f64, u: f64 },

    #[error("integration failed to reach the node: stalled at (xi={xi}, u={u})")]
    NodeNotReached { xi: f64, u: f64 },

    #[error("limiting speed U* = {u_star} is not negative; construction is not admissible here")]
    AssumptionViolated { u_star: f64 },

    #[error("no crossing of the slow sonic line found in (0, {hi})")]
    NoSonicCrossing { hi: f64 },

    #[error("argument {xi} outside domain ({lo}, {hi})")]
    Domain { xi: f64, lo: f64, hi: f64 },

    #[error("no sign change found while bracketing {0}")]
    NoBracket(String),

    #[error("shock candidate at xi={xi} violates the 2-shock entropy condition")]
    EntropyViolation { xi: f64 },

    #[error("sign or monotonicity violation in density branch `{0}`")]
    SignViolation(&'static str),

    #[error("tail of {what} decays like |xi|^(-{fitted:.3}); expected an inverse-square envelope")]
    TailDivergence { what: &'static str, fitted: f64 },

    #[error("weak jump: (U+ - xi_s)^2 <= a^2, the shock state is not compressive")]
    WeakJump,

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("evaluation at the collapse point (t,r) = (0,0)")]
    OriginAtCollapse,

    #[error("step size underflow near x = {x}")]
    StepSizeUnderflow { x: f64 },

    #[error("positivity lost in finite-volume update at cell {cell}, t = {t}")]
    PositivityLoss { cell: usize, t: f64 },

    #[error("CFL violation: computed dt = {dt}, stable limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("test function does not vanish at r=0; momentum form requires the C^1_0 class")]
    ClassViolation,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
