//! Exact machinery for integer complexity.
//!
//! The complexity of a natural number is the least number of 1s needed to
//! write it using addition, multiplication, and parentheses. This crate
//! builds dense complexity tables, compares defects `c - 3*log3(n)` without
//! floating point, analyzes the multiplicative/additive structure of minimal
//! representations (solid numbers, good factorizations, leaders, stability),
//! constructs the sets of numbers whose defect lies below a given threshold,
//! and counts how those sets grow.

pub mod classify;
pub mod count;
pub mod defect;
pub mod error;
pub mod expr;
pub mod report;
pub mod structure;
pub mod table;

pub use defect::{defect_gap, DefectThreshold, DefectValue};
pub use error::Error;
pub use table::{e_rank, e_selfridge, ComplexityTable};

pub type Result<T> = std::result::Result<T, Error>;
