/// Largest denominator tried when annotating a probability.
const MAX_DEN: u64 = 64;
const MATCH_TOL: f64 = 1e-12;

/// `n/d` with the smallest `d ≤ 64` such that `|x − n/d| < 1e-12`.
pub fn rational(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    (1..=MAX_DEN).find_map(|d| {
        let n = (x * d as f64).round();
        if (x - n / d as f64).abs() >= MATCH_TOL {
            return None;
        }
        Some(if d == 1 {
            format!("{n:.0}")
        } else {
            format!("{n:.0}/{d}")
        })
    })
}

/// Twelve significant digits, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.abs() < MATCH_TOL {
        return format!("{x:.3e}");
    }
    let digits = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `sig12` with the rational annotation when there is one.
pub fn annotated(x: f64) -> String {
    match rational(x) {
        Some(r) => format!("{} ({r})", sig12(x)),
        None => sig12(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(rational(1.0 / 12.0).as_deref(), Some("1/12"));
        assert_eq!(rational(0.75).as_deref(), Some("3/4"));
        assert_eq!(rational(1.0).as_deref(), Some("1"));
        assert_eq!(rational(0.0).as_deref(), Some("0"));
        assert_eq!(rational(1e-20).as_deref(), Some("0"));
        assert_eq!(rational(std::f64::consts::FRAC_1_SQRT_2), None);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(1.0 / 12.0), "0.0833333333333");
        assert_eq!(sig12(0.75), "0.75");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(5.0 / 12.0), "0.416666666667");
        assert_eq!(annotated(1.0 / 3.0), "0.333333333333 (1/3)");
    }
}
