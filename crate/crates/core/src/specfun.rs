//! Special-function kernel: generalized Laguerre polynomials, the terminating
//! confluent hypergeometric series and the log-gamma function.
//!
//! The Laguerre order is real because the radial exponent `β = √(m′² + …)`
//! is irrational for generic parameters, so every factorial of a non-integer
//! argument is carried as a gamma function.

use crate::error::{ensure_finite, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Degree and order of a generalized Laguerre polynomial `L_n^(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyOrder {
    pub n: u32,
    pub alpha: f64,
}

impl PolyOrder {
    pub fn new(n: u32, alpha: f64) -> Result<Self> {
        ensure_finite(alpha, "alpha")?;
        if alpha <= -1.0 {
            return Err(Error::InvalidOrder(format!(
                "Laguerre order alpha = {alpha} must exceed -1"
            )));
        }
        Ok(Self { n, alpha })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        laguerre(self.n, self.alpha, x)
    }
}

/// Generalized Laguerre polynomial `L_n^(α)(x)` for `x ≥ 0`, evaluated by
/// the three-term upward recurrence
/// `(k+1) L_{k+1} = (2k+1+α−x) L_k − (k+α) L_{k−1}`.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> Result<f64> {
    ensure_finite(alpha, "alpha")?;
    ensure_finite(x, "x")?;
    if alpha <= -1.0 {
        return Err(Error::InvalidOrder(format!(
            "Laguerre order alpha = {alpha} must exceed -1"
        )));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "Laguerre argument x = {x} must be non-negative"
        )));
    }
    Ok(laguerre_unchecked(n, alpha, x))
}

#[inline]
pub(crate) fn laguerre_unchecked(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + alpha - x;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + alpha - x) * curr - (k + alpha) * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// Terminating Kummer function `F(a, b; x)` with `a = −n`, summed as the
/// finite series `Σ_{k=0}^{n} (−n)_k / (b)_k · x^k / k!`.
pub fn kummer_poly(a: f64, b: f64, x: f64) -> Result<f64> {
    ensure_finite(a, "a")?;
    ensure_finite(b, "b")?;
    ensure_finite(x, "x")?;
    if a > 0.0 || a.fract() != 0.0 {
        return Err(Error::NotPolynomial(a));
    }
    if b <= 0.0 {
        return Err(Error::Domain(format!(
            "lower parameter b = {b} must be positive"
        )));
    }
    let n = (-a) as u64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let k = k as f64;
        term *= (a + k) / (b + k) * x / (k + 1.0);
        sum += term;
    }
    Ok(sum)
}

/// Natural logarithm of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn log_gamma(x: f64) -> Result<f64> {
    ensure_finite(x, "x")?;
    if x <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos sum in its accurate range.
        return log_gamma_unchecked(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `ln(Γ(n+α+1) / (n! Γ(α+1)))`, the coefficient linking `L_n^(α)` to
/// `F(−n, α+1; x)`.
pub fn log_laguerre_kummer_ratio(n: u32, alpha: f64) -> Result<f64> {
    PolyOrder::new(n, alpha)?;
    let n = f64::from(n);
    Ok(log_gamma_unchecked(n + alpha + 1.0)
        - log_gamma_unchecked(n + 1.0)
        - log_gamma_unchecked(alpha + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit series `Σ (−1)^k C(n+α, n−k) x^k / k!` with the binomial
    /// built as an exact product. Returns the sum and `Σ |term|`.
    fn laguerre_series(n: u32, alpha: f64, x: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for k in 0..=n {
            let mut term = 1.0;
            for j in 1..=(n - k) {
                term *= (alpha + f64::from(k) + f64::from(j)) / f64::from(j);
            }
            for j in 1..=k {
                term *= x / f64::from(j);
            }
            abs_sum += term;
            sum += if k % 2 == 0 { term } else { -term };
        }
        (sum, abs_sum)
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 0.7, 3.2).unwrap(), 1.0);
        assert!((laguerre(1, 0.5, 2.0).unwrap() + 0.5).abs() < 1e-15);
        // (x² − 4x + 2)/2 at x = 1
        let oracle = (1.0f64 - 4.0 + 2.0) / 2.0;
        assert!((laguerre(2, 0.0, 1.0).unwrap() - oracle).abs() < 1e-15);
        assert!((laguerre_series(2, 0.0, 1.0).0 - oracle).abs() < 1e-15);
    }

    #[test]
    fn laguerre_matches_series_oracle() {
        for &alpha in &[0.0, 0.5, 3f64.sqrt(), 4.2] {
            for n in 0..=20 {
                for &x in &[0.0, 0.3, 1.7, 4.0, 9.5] {
                    let rec = laguerre(n, alpha, x).unwrap();
                    let (ser, abs_sum) = laguerre_series(n, alpha, x);
                    assert!(
                        (rec - ser).abs() <= 1e-13 * abs_sum.max(1.0),
                        "n={n} alpha={alpha} x={x}: {rec} vs {ser}"
                    );
                }
            }
        }
    }

    #[test]
    fn laguerre_high_degree_frozen() {
        // Reference values from 40-digit arithmetic.
        let cases = [
            (200, 0.5, 500.0, 5.863_983_593_418_487e106),
            (200, 0.0, 10.0, 10.240_506_141_399_556),
            (50, 2.5, 30.0, -602_368.506_098_844),
            (100, 1.732_050_807_568_877_2, 200.0, -2.672_091_006_770_796_4e41),
            (20, 0.5, 3.0, 0.034_191_506_551_266_69),
        ];
        for (n, alpha, x, want) in cases {
            let got = laguerre(n, alpha, x).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel <= 1e-12, "L_{n}^({alpha})({x}) = {got}, want {want}, rel {rel}");
        }
    }

    #[test]
    fn laguerre_rejects_bad_input() {
        assert!(matches!(laguerre(3, -1.0, 1.0), Err(Error::InvalidOrder(_))));
        assert!(matches!(laguerre(3, -1.5, 1.0), Err(Error::InvalidOrder(_))));
        assert!(matches!(laguerre(3, 0.0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(laguerre(3, 0.0, f64::NAN), Err(Error::NonFinite(_))));
        assert!(matches!(laguerre(3, f64::INFINITY, 1.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_poly(0.0, 2.3, 5.0).unwrap(), 1.0);
        assert!((kummer_poly(-1.0, 2.0, 3.0).unwrap() + 0.5).abs() < 1e-15);
        for &x in &[0.0, 0.5, 2.0, 7.25] {
            let f = kummer_poly(-1.0, 2.0, x).unwrap();
            assert!((f - 0.5 * (2.0 - x)).abs() < 1e-15);
            let via_laguerre = laguerre(1, 1.0, x).unwrap() / 2.0;
            assert!((f - via_laguerre).abs() < 1e-15);
        }
    }

    #[test]
    fn kummer_rejects_non_polynomial() {
        assert!(matches!(kummer_poly(-1.5, 2.0, 1.0), Err(Error::NotPolynomial(_))));
        assert!(matches!(kummer_poly(2.0, 2.0, 1.0), Err(Error::NotPolynomial(_))));
        assert!(matches!(kummer_poly(-2.0, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn laguerre_kummer_identity() {
        for &alpha in &[0.0, 0.5, 1.0, 3f64.sqrt(), 5.5] {
            for n in 0..=20u32 {
                let coeff = log_laguerre_kummer_ratio(n, alpha).unwrap().exp();
                for &x in &[0.1, 1.0, 2.5, 6.0] {
                    let l = laguerre(n, alpha, x).unwrap();
                    let f = kummer_poly(-f64::from(n), alpha + 1.0, x).unwrap();
                    // cancellation in the Kummer sum sets the error scale
                    let mut term = 1.0f64;
                    let mut abs_sum = 1.0;
                    for k in 0..n {
                        let k = f64::from(k);
                        term *= (k - f64::from(n)) / (alpha + 1.0 + k) * x / (k + 1.0);
                        abs_sum += term.abs();
                    }
                    let tol = 1e-13 * coeff * abs_sum.max(1.0);
                    assert!(
                        (l - coeff * f).abs() <= tol,
                        "n={n} alpha={alpha} x={x}: {l} vs {}",
                        coeff * f
                    );
                }
            }
        }
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-15);
        let half = log_gamma(0.5).unwrap();
        assert!((half - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!((half - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        // ln(10!) = ln 3628800
        assert!((log_gamma(11.0).unwrap() - 3_628_800f64.ln()).abs() < 1e-13);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn log_gamma_against_statrs() {
        for i in 1..400 {
            let x = 0.013 * f64::from(i) * f64::from(i);
            let want = statrs::function::gamma::ln_gamma(x);
            let got = log_gamma(x).unwrap();
            let tol = 1e-13 * want.abs().max(1.0);
            assert!((got - want).abs() <= tol, "x={x}: {got} vs {want}");
        }
    }
}
