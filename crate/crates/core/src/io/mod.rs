//! File formats and batch harnesses: configuration ingestion, barrier mesh
//! export and the randomized sweep.

pub mod config;
pub mod mesh;
pub mod sweep;

/// Scientific notation with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}
