//! Special functions and numerical kernels: truncated Taylor arithmetic,
//! adaptive quadrature, Gamma-type functions, the Gauss hypergeometric
//! function and the closed-form antiderivatives behind the MGF expressions.

pub mod antideriv;
pub mod gamma;
pub mod hyp2f1;
pub mod jet;
pub mod quad;

pub use antideriv::{beta1, beta2, psi1};
pub use gamma::{gamma, ln_gamma, upper_incomplete_gamma};
pub use hyp2f1::{hyp2f1, hyp2f1_taylor};
pub use jet::{Jet, Scalar, MAX_ORDER};
pub use quad::{integrate, try_integrate, Integral, QuadratureSettings};
