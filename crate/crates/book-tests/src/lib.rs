//! Runs every Rust snippet in the book as a doctest, so `cargo test` fails
//! whenever the guide drifts from the library. One module per chapter keeps
//! failures attributable to the file they came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/grids-and-spectra.md")]
pub mod grids_and_spectra {}

#[doc = include_str!("../../../book/src/the-medium.md")]
pub mod the_medium {}

#[doc = include_str!("../../../book/src/propagation.md")]
pub mod propagation {}

#[doc = include_str!("../../../book/src/scenes-and-analysis.md")]
pub mod scenes_and_analysis {}

#[doc = include_str!("../../../book/src/negative-lens.md")]
pub mod negative_lens {}

#[doc = include_str!("../../../book/src/experiments-cli.md")]
pub mod experiments_cli {}
