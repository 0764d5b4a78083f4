#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod chevalley;
pub mod coxeter;
pub mod element;
pub mod error;
pub mod exact;
pub mod fd;
pub mod involution;
pub mod laxflow;
pub mod rootsystem;
pub mod toda;

pub use error::{Error, Result};
pub use rootsystem::{CartanVector, ExtendedDiagram, NodePermutation, Root, RootSystem, Series};
pub use chevalley::ChevalleyAlgebra;
pub use element::{AlgebraElement, ExactElement, FloatElement, Scalar};
