#![allow(dead_code)]
pub mod oracles;

pub use siegel_core::sampling::*;
