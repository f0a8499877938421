//! Number formatting shared by every CSV and text output.

/// `x` with 9 significant digits, in the style of C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// [`sig9`] for present values, empty for missing ones.
pub fn opt9(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig9(0.5), "0.5");
        assert_eq!(sig9(3.0 / 7.0), "0.428571429");
        assert_eq!(sig9(0.2 + 0.1), "0.3");
        assert_eq!(sig9(-21.5495637), "-21.5495637");
        assert_eq!(sig9(1.5e-7), "1.5e-07");
        assert_eq!(sig9(0.000123456789), "0.000123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e+09");
        assert_eq!(sig9(100.0), "100");
        assert_eq!(sig9(0.0), "0");
    }
}
