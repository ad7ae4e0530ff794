//! Jacobi fields of centered Lévy processes on a truncated, discretized
//! extended Fock space.
//!
//! The pipeline runs from a finite jump measure to orthogonal-polynomial
//! recurrences ([`orthopoly`]), through the block structure of the extended
//! Fock space ([`fock`]), to the creation, neutral and annihilation operators
//! ([`jacobi`]). [`levy_moments`] supplies independent ground truth from the
//! cumulants, and [`meixner`] recognizes the gamma/Pascal/Meixner family.

pub mod cli;
pub mod error;
pub mod fock;
pub mod jacobi;
pub mod levy_moments;
pub mod measures;
pub mod meixner;
pub mod orthopoly;

pub use error::{Error, Result};
pub use fock::{inner_product, partitions, BlockTensor, ExtendedFockVector, FockSpace, MultiIndex};
pub use jacobi::{FieldOperator, OperatorKind};
pub use measures::{gauss_laguerre_gamma, GridSpace, JumpMeasure, TestFunction};
pub use orthopoly::{stieltjes, stieltjes_exhausting, RecurrenceTable};
