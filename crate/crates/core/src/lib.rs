//! Exact-arithmetic laboratory for growth and incidence experiments on
//! finite sets.
//!
//! The crate is organized around five loosely coupled modules:
//!
//! * [`exactnum`] — the scalar domains every counter runs on: arbitrary
//!   precision rationals, double-exponential "tower" integers with exact
//!   power laws, and sparse integer combinations of formal basis vectors.
//! * [`polyalg`] — dense univariate and sparse multivariate polynomials
//!   over the rationals, compositional decomposition, detection of
//!   additive/multiplicative composite forms, and classification of
//!   polynomial families into translation/scaling classes.
//! * [`expansion`] — exact image and incidence counters together with the
//!   logarithmic summary statistics (coarse dimension, fitted exponents)
//!   and the closed-form threshold constants used to judge them.
//! * [`constructions`] — generators for the structured inputs the
//!   counters are pointed at: progressions, structured one-parameter
//!   families, span-style instances with prescribed growth, and the
//!   monomial-power/tower pairing with a two-point image.
//! * [`groupaction`] — a small catalog of finite group actions, product
//!   sets, stabilizer statistics, approximate-subgroup certificates, and
//!   a heuristic extractor for high-incidence substructure.
//!
//! Everything that feeds a verdict is computed exactly (big integers and
//! rationals); floating point appears only in final logarithmic summaries.

pub mod constructions;
pub mod exactnum;
pub mod expansion;
pub mod groupaction;
#[doc(hidden)]
pub mod oracles;
pub mod polyalg;
