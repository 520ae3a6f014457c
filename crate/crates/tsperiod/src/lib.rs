//! Monthly time-series analysis toolkit: descriptive statistics, hypothesis
//! tests, structural breaks, decompositions and cycle detection.

pub mod cycles;
pub mod decomposition;
pub mod descriptive;
pub mod distribution;
pub mod error;
pub mod fixture;
pub mod hypothesis;
pub mod numeric;
pub mod report;
pub mod series;
pub mod spectral;
pub mod stationarity;
pub mod structural;

pub use error::{Error, ErrorKind, Result};
pub use hypothesis::{PBound, TestResult};
pub use series::{MonthlySeries, SeriesBundle};
