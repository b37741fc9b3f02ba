//! Model files, rasters and verification campaigns for the `sdrep` binary.

pub mod campaigns;
pub mod grid;
pub mod model;
