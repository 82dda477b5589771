//! Matrix-valued trigonometric polynomials G(ξ) = Σ_k C_k e^{−i k·ξ}.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: Vec<i64>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Finitely supported matrix trigonometric polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigMatrixPoly {
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<TrigTerm>,
}

impl TrigMatrixPoly {
    pub fn new(rows: usize, cols: usize, mut terms: Vec<TrigTerm>) -> Result<Self> {
        for t in &terms {
            if t.re.len() != rows
                || t.im.len() != rows
                || t.re.iter().any(|r| r.len() != cols)
                || t.im.iter().any(|r| r.len() != cols)
            {
                return Err(Error::Invalid("trig poly term has wrong shape".into()));
            }
        }
        terms.sort_by(|a, b| a.k.cmp(&b.k));
        Ok(TrigMatrixPoly { rows, cols, terms })
    }

    /// Real-coefficient constructor: one (k, matrix) pair per tap.
    pub fn from_real_taps(rows: usize, cols: usize, taps: Vec<(Vec<i64>, Vec<Vec<f64>>)>) -> Result<Self> {
        let terms = taps
            .into_iter()
            .map(|(k, re)| TrigTerm {
                k,
                im: vec![vec![0.0; cols]; rows],
                re,
            })
            .collect();
        Self::new(rows, cols, terms)
    }

    /// Evaluate G(ξ) = Σ_k C_k e^{−i k·ξ}.
    pub fn eval(&self, xi: &[f64]) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(self.rows, self.cols, Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let phase: f64 = t.k.iter().zip(xi).map(|(&k, &x)| k as f64 * x).sum();
            let e = Complex64::new(0.0, -phase).exp();
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out[(i, j)] += Complex64::new(t.re[i][j], t.im[i][j]) * e;
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map(|t| t.k.len()).unwrap_or(0)
    }
}
