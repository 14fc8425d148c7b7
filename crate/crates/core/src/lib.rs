//! Exact symbolic engine for the multiparameter quantum group `GL_qq(n)`,
//! its quantum flag algebra, and the representations of the dual algebra
//! `U_qq(sl(n))` on normal-ordered flag monomials.
//!
//! Layers, bottom-up:
//! - [`coeff`]: exact scalars (Laurent polynomials in `q`, `q_ij` over
//!   powers of `lambda = q - 1/q`, exponents affine in weight labels)
//! - [`ncpoly`]: noncommutative polynomials, rewrite rules, normal forms
//! - [`qmatrix`]: the quantum matrix algebra, minors, coproduct checks
//! - [`yflag`]: the flag algebra on the `Y_ij`
//! - [`rep`]: the representation engine and its verification suites
//! - [`parse`]: text syntax for coefficients and polynomials

pub mod coeff;
pub mod error;
pub mod ncpoly;
pub mod parse;
pub mod qmatrix;
pub mod rep;
pub mod report;
pub mod yflag;

pub use coeff::{coeff_eq, qbracket, qint, specialize, Coefficient, ExponentForm, HalfInt, ParamMonomial, ParamSymbol, Substitution};
pub use error::Error;
pub use ncpoly::{confluence_check, normal_form, q_factor, GenSymbol, NCPoly, PresetAlgebra, RewriteRule, Word};
pub use report::{Check, Report, Status};
