//! Compactly supported piecewise polynomials with closed-form Fourier
//! transforms, plus separable n-dimensional combinations of them.
//!
//! These back the built-in scaling and wavelet functions: every built-in is a
//! sum of tensor products of one-dimensional piecewise polynomials, so both
//! pointwise evaluation and f̂(ξ) = ∫ f(t) e^{−i t·ξ} dt come in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One polynomial piece on a half-open interval [lo, hi).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    /// Coefficients in increasing degree: c0 + c1 t + c2 t² + …
    pub coeffs: Vec<f64>,
}

/// Piecewise polynomial on the line, zero outside its pieces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PiecewisePoly {
    pub pieces: Vec<Piece>,
}

impl PiecewisePoly {
    pub fn new(pieces: Vec<(f64, f64, Vec<f64>)>) -> Self {
        PiecewisePoly {
            pieces: pieces
                .into_iter()
                .map(|(lo, hi, coeffs)| Piece { lo, hi, coeffs })
                .collect(),
        }
    }

    /// Indicator of [lo, hi).
    pub fn indicator(lo: f64, hi: f64) -> Self {
        Self::new(vec![(lo, hi, vec![1.0])])
    }

    /// Pointwise value; half-open intervals make it right-continuous at breaks.
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for p in &self.pieces {
            if t >= p.lo && t < p.hi {
                let mut pow = 1.0;
                for &c in &p.coeffs {
                    acc += c * pow;
                    pow *= t;
                }
            }
        }
        acc
    }

    /// Closed-form transform ∫ f(t) e^{−i t u} dt.
    pub fn fourier(&self, u: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.pieces {
            for (deg, &c) in p.coeffs.iter().enumerate() {
                if c != 0.0 {
                    acc += c * monomial_segment_ft(p.lo, p.hi, deg as u32, u);
                }
            }
        }
        acc
    }

    pub fn support(&self) -> (f64, f64) {
        let lo = self.pieces.iter().map(|p| p.lo).fold(f64::INFINITY, f64::min);
        let hi = self.pieces.iter().map(|p| p.hi).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// ∫_a^b tⁿ e^{−i t u} dt, stable for all u.
///
/// For |u| away from zero this uses the integration-by-parts recursion; near
/// zero it switches to the Taylor series in u, which converges fast because
/// the built-ins keep |a|, |b| ≤ O(1).
pub fn monomial_segment_ft(a: f64, b: f64, n: u32, u: f64) -> Complex64 {
    let scale = a.abs().max(b.abs()).max(1.0);
    if (u * scale).abs() < 0.5 {
        // Σ_q (−iu)^q (b^{n+q+1} − a^{n+q+1}) / (q! (n+q+1))
        let mut acc = Complex64::new(0.0, 0.0);
        let mut iq = Complex64::new(1.0, 0.0); // (−iu)^q / q!
        for q in 0..30u32 {
            let p = (n + q + 1) as f64;
            let term = iq * ((b.powf(p) - a.powf(p)) / p);
            acc += term;
            if term.norm() < 1e-18 * (1.0 + acc.norm()) && q > 4 {
                break;
            }
            iq *= Complex64::new(0.0, -u) / (q as f64 + 1.0);
        }
        acc
    } else {
        let iu = Complex64::new(0.0, u);
        let ea = Complex64::new(0.0, -a * u).exp();
        let eb = Complex64::new(0.0, -b * u).exp();
        // I_0 = (e^{−iau} − e^{−ibu}) / (iu); I_n = (aⁿe^{−iau} − bⁿe^{−ibu})/(iu) + n/(iu)·I_{n−1}
        let mut acc = (ea - eb) / iu;
        for m in 1..=n {
            acc = (a.powi(m as i32) * ea - b.powi(m as i32) * eb) / iu + (m as f64) / iu * acc;
        }
        acc
    }
}

/// Sum of tensor products of one-dimensional piecewise polynomials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableFn {
    /// Each term is a list of n per-axis factors; the function is
    /// Σ_terms Π_axis factor(t_axis).
    pub terms: Vec<Vec<PiecewisePoly>>,
}

impl SeparableFn {
    pub fn one_dim(p: PiecewisePoly) -> Self {
        SeparableFn { terms: vec![vec![p]] }
    }

    pub fn product(factors: Vec<PiecewisePoly>) -> Self {
        SeparableFn { terms: vec![factors] }
    }

    pub fn sum(terms: Vec<Vec<PiecewisePoly>>) -> Self {
        SeparableFn { terms }
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map(|t| t.len()).unwrap_or(0)
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|fs| fs.iter().zip(t).map(|(f, &x)| f.eval(x)).product::<f64>())
            .sum()
    }

    /// f̂(ξ) — product of axis transforms, summed over terms.
    pub fn fourier(&self, xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|fs| {
                fs.iter()
                    .zip(xi)
                    .map(|(f, &u)| f.fourier(u))
                    .product::<Complex64>()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn indicator_values_and_breaks() {
        let chi = PiecewisePoly::indicator(0.0, 1.0);
        assert_eq!(chi.eval(0.5), 1.0);
        assert_eq!(chi.eval(0.0), 1.0);
        assert_eq!(chi.eval(1.0), 0.0);
        assert_eq!(chi.eval(-0.2), 0.0);
    }

    #[test]
    fn indicator_transform_matches_sinc_form() {
        let chi = PiecewisePoly::indicator(0.0, 1.0);
        for &u in &[0.3, PI, -PI, 7.0, 40.0] {
            let got = chi.fourier(u);
            let want =
                (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -u).exp()) / Complex64::new(0.0, u);
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!((chi.fourier(0.0) - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        // Continuity through the series branch near zero.
        assert!((chi.fourier(1e-9) - chi.fourier(0.0)).norm() < 1e-8);
    }

    #[test]
    fn series_and_recursion_agree_at_crossover() {
        // Check both branches return the same value around |u|·scale = 0.5.
        for n in 0..4u32 {
            for &u in &[0.49, 0.5, 0.51, -0.49, -0.51] {
                let series = {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut iq = Complex64::new(1.0, 0.0);
                    for q in 0..40u32 {
                        let p = (n + q + 1) as f64;
                        acc += iq * (1.0f64.powf(p) - 0.0) / p;
                        iq *= Complex64::new(0.0, -u) / (q as f64 + 1.0);
                    }
                    acc
                };
                let got = monomial_segment_ft(0.0, 1.0, n, u);
                assert_abs_diff_eq!((got - series).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn quadrature_cross_check() {
        // Riemann-midpoint the oscillatory integral finely as a dumb oracle.
        let p = PiecewisePoly::new(vec![(0.0, 0.5, vec![-1.0, 6.0]), (0.5, 1.0, vec![-5.0, 6.0])]);
        for &u in &[0.0, 2.3, -9.7, 31.0] {
            let steps = 200_000;
            let mut acc = Complex64::new(0.0, 0.0);
            let dt = 1.0 / steps as f64;
            for i in 0..steps {
                let t = (i as f64 + 0.5) * dt;
                acc += p.eval(t) * Complex64::new(0.0, -t * u).exp() * dt;
            }
            assert_abs_diff_eq!((p.fourier(u) - acc).norm(), 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn separable_eval_and_fourier() {
        let f = SeparableFn::product(vec![
            PiecewisePoly::indicator(0.0, 1.0),
            PiecewisePoly::indicator(0.0, 1.0),
        ]);
        assert_eq!(f.eval(&[0.3, 0.9]), 1.0);
        assert_eq!(f.eval(&[0.3, 1.0]), 0.0);
        assert_abs_diff_eq!((f.fourier(&[0.0, 0.0]) - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
    }
}
