//! Elliptic integrals of the second kind and the tabulated arc-length path.

mod carlson;
mod ellint;
mod interp;
pub mod quadrature;

pub use carlson::{carlson_rd, carlson_rf, DUPLICATION_TOL};
pub use ellint::{ellint_e_complete, ellint_e_incomplete, EllipticParam};
pub(crate) use ellint::e_incomplete_unchecked;
pub use interp::{
    build_sigma_interpolant, SigmaInterpolant, CERT_OVERSAMPLE, MAX_INTERP_ERROR, MIN_GRID,
};
pub use quadrature::oracle_e;
