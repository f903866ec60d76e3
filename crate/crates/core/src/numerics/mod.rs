//! Special functions and generic numerical routines.

pub mod minimize;
pub mod quadrature;
pub mod root;
pub mod special;

pub use minimize::{minimize_best, minimize_local, minimize_scalar, Bounds, MinimizeConfig, Minimum};
pub use quadrature::{gauss_expectation, gauss_expectation_pw, integrate, QuadratureSpec};
pub use root::{find_root, scan_root, Bracket, DEFAULT_ROOT_TOL};
pub use special::{erf, erfc, erfcinv, erfinv, ln_erfc, ln_erfc_diff, ln_sum_exp, norm_pdf, norm_sf};
