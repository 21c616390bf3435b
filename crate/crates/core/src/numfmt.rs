//! Deterministic numeric formatting for emitted reports and CLI output.
//!
//! Values are rounded to 12 significant digits before serialization, so
//! repeated runs with the same inputs produce byte-identical documents and
//! platform-specific last-bit noise never reaches the output.

/// Number of significant digits carried by all emitted values.
pub const OUTPUT_SIG_DIGITS: u32 = 12;

/// Rounds to `digits` significant digits. Zero, infinities and NaN pass
/// through unchanged.
pub fn round_sig(value: f64, digits: u32) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let formatted = format!("{value:.*e}", digits.saturating_sub(1) as usize);
    formatted.parse().expect("scientific notation round-trips")
}

/// Shortest decimal representation of the 12-significant-digit rounding.
pub fn format_sig(value: f64) -> String {
    let rounded = round_sig(value, OUTPUT_SIG_DIGITS);
    let mut out = format!("{rounded}");
    // `{}` on f64 never prints a trailing ".0" for integral values, which
    // would make 2.0 and 2 collide across CSV readers; keep them distinct.
    if !out.contains('.') && !out.contains('e') && !out.contains("inf") && !out.contains("NaN") {
        out.push_str(".0");
    }
    out
}

/// Recursively rounds every floating-point number inside a JSON document.
/// Integer-typed numbers are left untouched.
pub fn round_json_floats(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("checked is_f64");
                if let Some(rounded) =
                    serde_json::Number::from_f64(round_sig(x, OUTPUT_SIG_DIGITS))
                {
                    *n = rounded;
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}
