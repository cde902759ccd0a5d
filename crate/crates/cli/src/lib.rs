//! Support code for the `accessred` command-line tool: file formats and
//! parallel verification on top of `accessred-core`.

pub mod formats;
pub mod parallel;
