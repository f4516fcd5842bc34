pub mod bregman;
pub mod error;
pub mod functions;
pub mod kernels;
pub mod left;
pub mod numerics;
pub mod phi;
pub mod report;
pub mod right;
pub mod setvalued;
pub mod smoothness;
pub mod verify;

pub use error::{Error, Result};
