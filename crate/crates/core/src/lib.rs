//! Complete thin Schreier families `A_ξ` for ordinals below ε₀.

pub mod cbindex;
pub mod cli;
pub mod error;
pub mod families;
pub mod finset;
pub mod ordinal;
pub mod ramsey;
pub mod schreier;
pub mod stream;

pub use error::{Error, Result};
pub use finset::FinSet;
pub use ordinal::Ordinal;
pub use stream::Stream;
