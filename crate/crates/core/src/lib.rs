//! Bigraded Betti numbers of two-parameter persistence modules over prime
//! fields.
//!
//! Modules live on a finite grid `[0,s1] x [0,s2]` and are constant beyond it.
//! Betti numbers are computed twice: from the zigzag barcodes of small
//! frames around each grade ([`betti::betti_theorem`]), and from an explicit
//! free resolution ([`resolution::betti_resolution`]).

pub mod betti;
pub mod generators;
pub mod grid;
pub mod io;
pub mod iso;
pub mod linalg;
pub mod random;
pub mod resolution;
pub mod zigzag;

pub use betti::{betti_theorem, crosscheck, BettiError, BettiTable, CrosscheckReport};
pub use grid::{free_module, Grade, GradeMultiset, GridBuilder, GridError, GridModule};
pub use linalg::{DenseMatrix, LinalgError, PrimeField};
pub use resolution::{betti_resolution, resolve, Resolution, ResolutionError};
pub use zigzag::{Barcode, Direction, Interval, ZigzagModule};
