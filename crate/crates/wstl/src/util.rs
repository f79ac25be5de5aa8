//! Small shared helpers.

/// Formats with 6 significant digits, locale-independent, plain decimal
/// notation for desk-scale magnitudes.
pub(crate) fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0.0
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-9..=15).contains(&exponent) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Rounds to 6 significant digits (for JSON output fields).
pub(crate) fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let exponent = x.abs().log10().floor();
    let factor = 10f64.powf(5.0 - exponent);
    (x * factor).round() / factor
}
