pub mod clifford;
pub mod error;
pub mod oracle;
pub mod pauli;
pub mod shadows;
pub mod stabilizer;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
