//! Deterministic number formatting for reports and CSV files.

/// Shortest string that parses back to exactly `x`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        let mut buf = ryu::Buffer::new();
        let s = buf.format_finite(x);
        s.strip_suffix(".0").unwrap_or(s).to_string()
    }
}

/// Joins a row of numbers with commas.
pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn integers_drop_the_fraction() {
        assert_eq!(num(2.0), "2");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-300), "1e-300");
        assert_eq!(num(f64::NAN), "NaN");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back: f64 = num(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
