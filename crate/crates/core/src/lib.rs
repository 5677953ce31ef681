//! Exact differential-linear analysis of (n,n)-functions over GF(2^n).
//!
//! * [`field`]: GF(2^n) arithmetic with Conway-polynomial defaults.
//! * [`functions`]: power maps, quadratic and cubic families, point
//!   modifications and generalized cyclotomic mappings as lookup tables.
//! * [`spectra`]: DLCT/DLU and the supporting DDT, LAT and BCT tables.
//! * [`kloosterman`]: binary Kloosterman sums and the Dillon-exponent DLCT predictor.
//! * [`theorems`]: checkers comparing closed forms and bounds with measured tables.
//! * [`tables`]: reference values for reproducible tables.

pub mod field;
pub mod functions;
pub mod kloosterman;
pub mod spectra;
pub mod tables;
pub mod theorems;

pub use field::{Element, Field, FieldError, FieldInfo};
pub use functions::{build, Construction, FunctionError, FunctionTable};
pub use spectra::{Method, SpectrumHistogram};
