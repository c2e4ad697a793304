//! Extended Cauchy (EC) codes, hierarchical codes built from them, and an
//! error-and-erasure decoder for both.

pub mod cauchy;
pub mod codec;
pub mod gf;
pub mod hier;
pub mod matrix;
pub mod oracle;

pub use cauchy::{CauchyParams, CodeError, EcCode, GrsCondition, GrsVerdict};
pub use codec::{decode, encode, DecodeError, DecodeOptions, Decoded, Symbol};
pub use gf::{Elem, Field, FieldError, Poly};
pub use hier::{
    BlockOutcome, BlockSpec, BlockStatus, ConfigError, GlobalOptions, HierCode, HierConfig,
    HierError, StripeDecoded,
};
pub use matrix::{LinearSolution, Matrix, MatrixError};
pub use oracle::{brute_force_decode, min_distance, OracleError};
