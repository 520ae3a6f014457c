//! The bundled monthly PMN/PMA/TotalMD application counts, May 1976 to December 2020.

use crate::series::{ingest_csv, SeriesBundle};

pub const FDA_MD_CSV: &str = include_str!("../data/fda_md.csv");
pub const START_YEAR: i32 = 1976;
pub const START_MONTH: u32 = 5;

pub fn load() -> SeriesBundle {
    ingest_csv(FDA_MD_CSV, START_YEAR, START_MONTH, 12).expect("bundled fixture is valid")
}
