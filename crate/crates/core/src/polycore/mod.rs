//! Exact arithmetic: rationals, Gaussian rationals, multivariate
//! polynomials, polynomial matrices, resultants and univariate gcds.

mod gauss;
mod matrix;
mod poly;
mod rational;
mod resultant;
mod unipoly;

pub use gauss::GaussRational;
pub use matrix::{rank, PolyMatrix};
pub use poly::{ExponentVec, MultiPoly, Vars};
pub use rational::Rational;
pub(crate) use rational::parse_decimal;
pub use resultant::{sylvester_matrix, sylvester_resultant};
pub use unipoly::{univariate_gcd, UniPoly};
