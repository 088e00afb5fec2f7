//! Block and wildcard-pattern frequencies, normality defects and joint tables
//! of double sequences.
//!
//! Frequencies divide by the number of windows, `N − k + 1`.

mod counting;
mod defect;
mod joint;
mod pattern;

pub use counting::{block_frequencies, count_stream, BlockCounter, EmpiricalMeasure, MAX_DENSE_TABLE};
pub use defect::{
    normality_defect, normality_defect_of, simple_normality_defect, write_table_csv, MAX_DEFECT_BLOCKS,
};
pub use joint::{joint_block_frequencies, JointTable};
pub use pattern::{pattern_frequency, running_frequency_series, PatternCounter, WildcardPattern};

use thiserror::Error;

use crate::measures::MeasureError;
use crate::Symbol;

#[derive(Debug, Error)]
pub enum EmpiricsError {
    #[error("block length must be at least 1")]
    ZeroLength,
    #[error("prefix of length {got} is shorter than the window span {need}")]
    PrefixTooShort { need: u64, got: u64 },
    #[error("table for base {base} and length {k} does not fit in 64-bit keys")]
    TableTooLarge { base: u64, k: usize },
    #[error("too many blocks to enumerate: {0}")]
    TooManyBlocks(f64),
    #[error("sequences have different lengths {x} and {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("symbol {0} is not in the alphabet")]
    SymbolOutsideAlphabet(Symbol),
    #[error("tables differ in shape and cannot be merged")]
    ShapeMismatch,
    #[error("pattern offsets must start at 0 and increase strictly")]
    BadPattern,
    #[error("joint tables need finite alphabets or a cap")]
    InfiniteAlphabet,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
