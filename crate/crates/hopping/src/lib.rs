//! Parallel drivers, checkpoints, file formats and the command-line tool built
//! on `hopping-core`.

pub mod checkpoint;
pub mod cli;
pub mod driver;
pub mod formats;
pub mod manifest;
