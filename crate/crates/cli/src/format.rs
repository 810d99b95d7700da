use serde_json::value::RawValue;

/// Fixed 10-decimal rendering used for every probability and mean.
pub fn fixed10(x: f64) -> String {
    let s = format!("{x:.10}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        // no "-0.0000000000"
        return s.trim_start_matches('-').to_string();
    }
    s
}

/// JSON number emitted verbatim with 10 decimals.
pub fn raw10(x: f64) -> Box<RawValue> {
    raw(fixed10(x))
}

pub fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

/// `digits` significant digits, trailing zeros trimmed. Plain decimal for
/// moderate exponents, `1.5e-17` style otherwise.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits_only: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };

    if !(-5..digits as i32).contains(&exp) {
        let m = trim_fraction(mantissa.trim_start_matches('-'));
        return format!("{sign}{m}e{exp}");
    }
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits_only)
    } else {
        let split = exp as usize + 1;
        format!("{}.{}", &digits_only[..split], &digits_only[split..])
    };
    format!("{sign}{}", trim_fraction(&body))
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.75f64.sqrt(), 12), "0.866025403784");
        assert_eq!(significant(0.75, 12), "0.75");
        assert_eq!(significant(0.5, 12), "0.5");
        assert_eq!(significant(1.0, 12), "1");
        assert_eq!(significant(0.0, 12), "0");
        assert_eq!(significant(-0.0, 12), "0");
        assert_eq!(significant(-0.125, 12), "-0.125");
        assert_eq!(significant(0.000123456789012345, 12), "0.000123456789012");
        assert_eq!(significant(6.123233995736766e-17, 12), "6.12323399574e-17");
        assert_eq!(significant(123.5, 12), "123.5");
    }

    #[test]
    fn fixed_ten() {
        assert_eq!(fixed10(8.0 / 23.0), "0.3478260870");
        assert_eq!(fixed10(-1e-13), "0.0000000000");
        assert_eq!(fixed10(-0.5), "-0.5000000000");
        assert_eq!(raw10(0.25).get(), "0.2500000000");
    }
}
