#![allow(dead_code)]

pub mod graphs;
pub mod matrix;
pub mod query;

use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}
