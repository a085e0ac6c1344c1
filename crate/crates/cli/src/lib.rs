//! Front end for the `ssapprox` binary: file formats, generators, solving,
//! oracle checks, benchmarks and the self-test.

pub mod bench;
pub mod config;
pub mod format;
pub mod generate;
pub mod run;
pub mod selftest;
