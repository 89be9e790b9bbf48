//! Number formatting shared by the text and CSV writers.

/// Formats `x` with 9 significant digits, in the style of C's `%.9g`.
pub fn sig9(x: f64) -> String {
    sig(x, 9)
}

/// `%.<digits>g` formatting: shortest of fixed or scientific, trailing zeros trimmed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    // Round once in scientific form so the exponent reflects the rounded value.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
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
    fn matches_c_style() {
        assert_eq!(sig9(1.40887), "1.40887");
        assert_eq!(sig9(-0.041666666666666664), "-0.0416666667");
        assert_eq!(sig9(0.00104241), "0.00104241");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(1.5e-5), "1.5e-05");
        assert_eq!(sig9(123456789012.0), "1.23456789e+11");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(999999999.6), "1e+09");
        assert_eq!(sig(1.23456, 3), "1.23");
    }
}
