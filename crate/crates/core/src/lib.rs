//! Converging-diverging radial similarity solutions of the multi-dimensional
//! isothermal Euler system.
//!
//! The crate constructs the self-similar flow `rho = sgn(t)|t|^beta
//! Omega(r/t)`, `u = U(r/t)` in which a continuous wave focuses at the
//! origin at `t = 0`, the density amplitude blows up there like `r^beta`,
//! and an entropy-admissible 2-shock reflects outward along `r = xi_s t`.
//! It then certifies numerically that the assembled fields form a radial
//! weak solution: Rankine-Hugoniot residuals along the shock, continuity of
//! mass and momentum moments across collapse, decay of the small-radius
//! fluxes, quadrature of the weak forms against a battery of test
//! functions, and an independent finite-volume evolution cross-check.

pub mod branch;
pub mod density;
pub mod error;
pub mod export;
pub mod flow;
pub mod fv;
pub mod num;
pub mod similarity;
pub mod velocity;
pub mod weak;

pub use branch::{Branch, Node, Tail, TailSide};
pub use density::{build_density, DensityProfile};
pub use error::{Error, Result};
pub use flow::{PathTrace, SimilaritySolution, Termination, TraceEvent, TraceKind};
pub use similarity::{
    classify_region, critical_points, mirror, ode_rhs_log_omega, ode_rhs_u, CriticalPointData,
    PhasePoint, RegionInfo, SimilarityParams,
};
pub use velocity::{
    build_velocity, hugoniot, ustar_bound, BuildOptions, ShockData, ShockFamily, VelocityProfile,
};
pub use weak::{verify, TestFunction, VerificationConfig, VerificationReport};
