#![no_std]
extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bounds;
mod conv;
pub mod dist;
pub mod error;
pub mod exactnum;
pub mod hiprec;
pub mod partition;
pub mod support;

pub use error::{Error, Result};
