//! 4th-order central differences for matrix- and scalar-valued maps.
//!
//! ```text
//! f'(x)  ~ (f(x-2h) - 8 f(x-h) + 8 f(x+h) - f(x+2h)) / (12 h)
//! f''(x) ~ (-f(x-2h) + 16 f(x-h) - 30 f(x) + 16 f(x+h) - f(x+2h)) / (12 h^2)
//! ```

use vessel_core::C64;

/// First derivative; `f` may fail (outside the validity window), in which
/// case the error is passed through.
pub fn d1<T, E, F>(f: F, x: f64, h: f64) -> Result<T, E>
where
    F: Fn(f64) -> Result<T, E>,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<C64, Output = T>,
{
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    let c = C64::new(1.0 / (12.0 * h), 0.0);
    Ok((m2 - p2 + (p1 - m1) * C64::new(8.0, 0.0)) * c)
}

/// Second derivative from the 5-point stencil.
pub fn d2<T, E, F>(f: F, x: f64, h: f64) -> Result<T, E>
where
    F: Fn(f64) -> Result<T, E>,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<C64, Output = T>,
{
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let f0 = f(x)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    let c = C64::new(1.0 / (12.0 * h * h), 0.0);
    Ok(((m1 + p1) * C64::new(16.0, 0.0) - (m2 + p2) - f0 * C64::new(30.0, 0.0)) * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fourth_order_on_exponential() {
        let f = |x: f64| -> Result<C64, ()> { Ok(C64::new(0.0, 1.3 * x).exp()) };
        let got = d1(f, 0.4, 1e-3).unwrap();
        let expected = C64::new(0.0, 1.3) * C64::new(0.0, 1.3 * 0.4).exp();
        assert_abs_diff_eq!((got - expected).norm(), 0.0, epsilon = 1e-12);

        let got2 = d2(f, 0.4, 1e-3).unwrap();
        let expected2 = expected * C64::new(0.0, 1.3);
        assert_abs_diff_eq!((got2 - expected2).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn halving_h_divides_error_by_sixteen() {
        // Truncation-dominated regime: the d1 error must drop ~16x.
        let f = |x: f64| -> Result<C64, ()> { Ok(C64::new((2.0 * x).sin(), 0.0)) };
        let exact = C64::new(2.0 * (2.0f64 * 0.3).cos(), 0.0);
        let e1 = (d1(f, 0.3, 0.1).unwrap() - exact).norm();
        let e2 = (d1(f, 0.3, 0.05).unwrap() - exact).norm();
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn error_passthrough() {
        let f = |x: f64| -> Result<C64, &'static str> {
            if x > 0.35 { Err("edge") } else { Ok(C64::new(x, 0.0)) }
        };
        assert_eq!(d1(f, 0.35, 0.01), Err("edge"));
    }
}
