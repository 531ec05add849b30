//! Small numerical kernels shared by the construction and verification code:
//! an embedded Runge-Kutta pair, adaptive Gauss-Kronrod quadrature,
//! Gauss-Legendre rules, and bracketed root finding.

pub mod quad;
pub mod rk;
pub mod root;
