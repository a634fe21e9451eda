//! Tables of polynomials driven by a four-term contiguous relation
//! P_{m,n} + A P_{m-1,n} + B P_{m,n-1} + C P_{m-1,n-1} = 0, their complex
//! zeros, and the curve Im(C/(AB)) = 0, Re(C/(AB)) >= 1 on which those zeros
//! live.
//!
//! Core math is generic over the floating scalar via [`Real`]; concrete
//! aliases for the common instantiations sit at the crate root. Root finding
//! evaluates through an exact dyadic big-integer representation of each
//! polynomial, so zero sets stay faithful even when the table's coefficients
//! outgrow what an f64 mantissa can hold.

pub mod analysis;
pub mod combin;
pub mod error;
pub mod exact;
pub mod locus;
pub mod persist;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod svg;
pub mod table;

pub use error::{Error, Result};
pub use exact::ExactPoly;
pub use locus::{Bbox, CurvePolyline, LocusFunction, Membership, ThreeTermCurve};
pub use poly::{shifted_derivative_expansion, Poly};
pub use roots::{find_roots, find_roots_exact, polish_root, RootConfig, RootSet};
pub use scalar::Real;
pub use table::{
    build_h_table, build_r_table, build_table, collapse_sequences, q_closed_form, q_series_oracle,
    CoefficientTriple, NumeratorSpec, PolyTable, TableKind,
};

pub type Poly64 = Poly<f64>;
pub type Poly32 = Poly<f32>;
pub type RootSet64 = RootSet<f64>;
pub type PolyTable64 = PolyTable<f64>;
pub type CoefficientTriple64 = CoefficientTriple<f64>;
