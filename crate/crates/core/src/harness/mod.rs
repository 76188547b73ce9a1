//! Phantoms, validation reports, file formats, configuration and the
//! acceptance checks shared by the test suite and the command line.

pub mod phantom;
pub mod report;
pub mod acceptance;
pub mod io;
pub mod config;
pub mod cli;
