//! Stable float formatting for every file the tool writes.

use serde_json::Value;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest text that reads back as `round12(x)`. Magnitudes below 1e-6
/// use exponent notation.
pub fn fmt_float(x: f64) -> String {
    let r = round12(x);
    if r != 0.0 && r.abs() < 1e-6 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// JSON number rounded to 12 significant digits.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

/// JSON number, or `null` when undefined.
pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// CSV cell, empty when undefined.
pub fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}
