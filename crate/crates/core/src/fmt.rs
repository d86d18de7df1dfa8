//! `%.{p}g`-style number formatting for CSV output.

/// Formats `x` to `sig` significant digits like C's `%g`: fixed notation for
/// decimal exponents in `[-4, sig)`, scientific otherwise, trailing zeros removed.
pub fn fmt_g(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

/// 12 significant digits, the CSV default.
pub fn g12(x: f64) -> String {
    fmt_g(x, 12)
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
    fn matches_c_printf() {
        // reference strings from printf("%.12g")
        let cases = [
            (0.0, "0"),
            (-0.0, "-0"),
            (9.9999999999995e-05, "0.0001"),
            (1.0, "1"),
            (2.0, "2"),
            (-1.5, "-1.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (1.7320508075688772, "1.73205080757"),
            (0.45689339367277605, "0.456893393673"),
            (1.0e-5, "1e-05"),
            (1.234e-5, "1.234e-05"),
            (1.0e-4, "0.0001"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (999999999999.5, "1e+12"),
            (std::f64::consts::TAU, "6.28318530718"),
            (f64::INFINITY, "inf"),
        ];
        for (x, want) in cases {
            assert_eq!(g12(x), want, "{x}");
        }
    }

    #[test]
    fn low_precision() {
        assert_eq!(fmt_g(0.000123456, 3), "0.000123");
        assert_eq!(fmt_g(99.96, 3), "100");
        assert_eq!(fmt_g(12345.0, 3), "1.23e+04");
    }
}
