pub mod error;
pub mod model;
pub mod offline;
pub mod online;
pub mod rng;
pub mod truthful;
pub mod analysis;
pub mod harness;
pub mod io;
