//! File formats and command plumbing for the `gainflock` binary.

pub mod commands;
pub mod formats;
