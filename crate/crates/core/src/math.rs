//! Small float helpers that `core` does not provide.

/// `base^exp` for an integer exponent that may be far outside `i32`.
///
/// Underflows to `0.0` and overflows to `inf`, never panics.
pub fn powi(base: f64, exp: i128) -> f64 {
    if exp == 0 {
        return 1.0;
    }
    libm::pow(base, exp as f64)
}

pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Relative comparison used across the suites: `|a-b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    let scale = abs(a).max(abs(b)).max(1.0);
    abs(a - b) <= tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_handles_huge_exponents() {
        assert_eq!(powi(2.0, 10), 1024.0);
        assert_eq!(powi(2.0, -3), 0.125);
        assert_eq!(powi(2.0, -(1i128 << 80)), 0.0);
        assert!(powi(2.0, 1i128 << 80).is_infinite());
    }
}
