//! Exact combinatorics of tamely ramified Bruhat–Tits theory for classical
//! groups: root data and their Galois actions, apartment arithmetic, Galois
//! types, Iwahori–Weyl groups and admissible sets, a truncated loop-group
//! simulator, and SVG figures.

#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod apartment;
pub mod error;
pub mod figures;
pub mod galois_types;
pub mod iwahori_weyl;
pub mod lattice;
pub mod loop_sim;
pub mod rootdata;

pub use error::{Error, Result};
pub use lattice::AbelianGroup;
pub use rootdata::{build_root_datum, GammaData, GroupLabel, RootDatum, WeylElement};
