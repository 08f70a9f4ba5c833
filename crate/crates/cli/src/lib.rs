//! Harness around `isi_core`: run configuration and the verification suite
//! behind `isi verify`.

pub mod config;
pub mod verify;
