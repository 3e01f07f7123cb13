//! Exact exterior algebra and isotropic Grassmann cones over the rationals.

pub mod error;
pub mod cones;
pub mod counterexamples;
pub mod exterior;
pub mod ideal_lab;
pub mod igcp;
pub mod io;
pub mod linalg;
pub mod quadratic;

pub use error::{Error, ParseError, Result};
pub use exterior::{Covector, IndexSet, Label, MultiVector};
pub use linalg::Rational;
pub use quadratic::{BasisKind, HyperbolicBasis, HyperbolicTuple, QuadraticSpace, Subspace};
