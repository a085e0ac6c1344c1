//! Approximate Subset Sum and Partition in near-linear time.

pub mod approx;
pub mod color;
pub mod density;
pub mod error;
pub mod intset;
pub mod level;
pub mod ntt;
pub mod oracle;
pub mod reduction;
pub mod sumset;
pub mod witness;

pub use error::{Error, Result};
pub use intset::IntSet;
