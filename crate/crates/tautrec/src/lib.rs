//! File formats and the command-line front end for `tautrec-core`.

pub mod cli;
pub mod format;
pub mod store;
pub mod verify;
