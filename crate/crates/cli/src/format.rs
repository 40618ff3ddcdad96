//! Number formatting for tables and CSV.

/// Six significant digits; fixed notation for moderate magnitudes.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        trim_zeros(&format!("{:.*}", (5 - mag).max(0) as usize, v)).to_string()
    } else {
        let s = format!("{v:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Shortest round-trip form in exponent notation, independent of locale.
pub fn csv_float(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(sig6(5.951_234_5e-7), "5.95123e-7");
        assert_eq!(sig6(60.0), "60");
        assert_eq!(sig6(1.666_666_666), "1.66667");
        assert_eq!(sig6(-6.225_43), "-6.22543");
        assert_eq!(sig6(123_456.7), "123457");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(3e-5), "3e-5");
    }

    #[test]
    fn csv_round_trips() {
        for v in [5.95e-7, 3.0, 1.0 / 3.0, 1e-300] {
            assert_eq!(csv_float(v).parse::<f64>().unwrap(), v);
        }
    }
}
