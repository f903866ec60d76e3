//! Canonical number formatting shared by every output format.

use serde_json::Value;

pub const SIG_DIGITS: usize = 9;

/// `x` rounded to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest text of the rounded value that parses back to it; plain decimal
/// unless the magnitude is tiny or huge. No locale.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    if r.abs() < 1e-4 || r.abs() >= 1e15 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// JSON number of the rounded value; NaN and infinities become null.
pub fn jnum(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

pub fn parse_num(s: &str) -> Option<f64> {
    match s.trim() {
        "NaN" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(0.1044797546386718), "0.104479755");
        assert_eq!(num(-4.182938591e-6), "-4.18293859e-6");
        assert_eq!(num(123456789012.0), "123456789000");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn text_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.5e-7, -7.123456789e-12, 0.9999, 3.0e20] {
            let s = num(x);
            assert_eq!(num(parse_num(&s).unwrap()), s);
            assert_eq!(jnum(parse_num(&s).unwrap()), jnum(x));
        }
        assert!(parse_num("NaN").unwrap().is_nan());
        assert!(jnum(f64::NAN).is_null());
    }
}
