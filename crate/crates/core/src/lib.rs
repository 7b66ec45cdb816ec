pub mod cayley;
pub mod error;
pub mod perm;
pub mod subset;
pub mod tree;

pub use error::{Error, Result};
pub use perm::{Parity, Permutation};
pub use subset::Subset;
pub mod certificate;
pub mod dlx;
pub mod verify;
pub mod search;
pub mod johnson;
pub mod constructions;

