//! Number formatting shared by every CSV writer.

/// Seventeen significant digits in scientific notation; round-trips any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
