//! Integer dilation matrices and lattice cosets.
//!
//! A dilation scheme bundles the dilation matrix `D` acting on the time
//! domain, its transpose `Mt = Dᵀ` acting on frequencies, the subband count
//! `M = |det D|`, and an ordered set of coset representatives of `ℤⁿ/Mt·ℤⁿ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DilationScheme {
    /// Dilation matrix D (n×n, integer, all eigenvalue moduli > 1).
    pub d: Vec<Vec<i64>>,
    /// Frequency dilation Mt = Dᵀ.
    pub mt: Vec<Vec<i64>>,
    /// Subband count M = |det D|.
    pub m: usize,
    /// Coset representatives of ℤⁿ/Mt·ℤⁿ; the zero vector comes first.
    pub cosets: Vec<Vec<i64>>,
}

impl DilationScheme {
    pub fn new(d_rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = d_rows.len();
        if n == 0 || d_rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotDilation("matrix is not square".into()));
        }
        let d = DMatrix::from_fn(n, n, |i, j| d_rows[i][j] as f64);
        let det = d.determinant().round() as i64;
        if det.unsigned_abs() < 2 {
            return Err(Error::NotDilation(format!("|det| = {} < 2", det.abs())));
        }
        let eigs = d.complex_eigenvalues();
        if eigs.iter().any(|l| l.norm() <= 1.0 + 1e-9) {
            return Err(Error::NotDilation(
                "an eigenvalue has modulus <= 1".into(),
            ));
        }
        let mt_rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| d_rows[j][i]).collect())
            .collect();
        let cosets = coset_representatives(&mt_rows)?;
        Ok(DilationScheme {
            d: d_rows,
            mt: mt_rows,
            m: det.unsigned_abs() as usize,
            cosets,
        })
    }

    /// One-dimensional dyadic scheme D = (factor).
    pub fn scalar(factor: i64) -> Result<Self> {
        Self::new(vec![vec![factor]])
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    fn int_pow(rows: &[Vec<i64>], j: u32) -> DMatrix<f64> {
        let n = rows.len();
        let base = DMatrix::from_fn(n, n, |i, k| rows[i][k] as f64);
        let mut acc = DMatrix::identity(n, n);
        for _ in 0..j {
            acc = &acc * &base;
        }
        acc
    }

    /// Mt^j for any integer j (negative powers via inverse).
    pub fn mt_pow(&self, j: i32) -> DMatrix<f64> {
        if j >= 0 {
            Self::int_pow(&self.mt, j as u32)
        } else {
            Self::int_pow(&self.mt, (-j) as u32)
                .try_inverse()
                .expect("dilation matrix is invertible")
        }
    }

    /// D^j for any integer j.
    pub fn d_pow(&self, j: i32) -> DMatrix<f64> {
        if j >= 0 {
            Self::int_pow(&self.d, j as u32)
        } else {
            Self::int_pow(&self.d, (-j) as u32)
                .try_inverse()
                .expect("dilation matrix is invertible")
        }
    }

    /// Exact integer Mt^j for j ≥ 0.
    pub fn mt_pow_int(&self, j: u32) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut acc: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|k| (i == k) as i64).collect())
            .collect();
        for _ in 0..j {
            let mut next = vec![vec![0i64; n]; n];
            for i in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        next[i][k] += acc[i][l] * self.mt[l][k];
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// Apply an integer matrix to an integer vector.
    pub fn apply_int(mat: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
        mat.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Apply Mt^j (j any sign) to a real vector.
    pub fn mt_apply(&self, j: i32, v: &[f64]) -> Vec<f64> {
        let m = self.mt_pow(j);
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|k| m[(i, k)] * v[k]).sum())
            .collect()
    }
}

/// Coset representatives of ℤⁿ/Mt·ℤⁿ: the integer points of Mt·[0,1)ⁿ.
///
/// Deterministic ordering: the zero vector first, the rest sorted by their
/// coordinates read last-to-first (so in 2-D: (0,0),(1,0),(0,1),(1,1) for 2I).
pub fn coset_representatives(mt_rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = mt_rows.len();
    if n == 0 || mt_rows.iter().any(|r| r.len() != n) {
        return Err(Error::NotDilation("matrix is not square".into()));
    }
    let mt = DMatrix::from_fn(n, n, |i, j| mt_rows[i][j] as f64);
    let det = mt.determinant().round() as i64;
    let m = det.unsigned_abs();
    if m < 2 {
        return Err(Error::NotDilation(format!("|det| = {m} < 2")));
    }
    let inv = mt
        .try_inverse()
        .ok_or_else(|| Error::NotDilation("singular matrix".into()))?;

    // Bounding box of the parallelepiped Mt·[0,1)ⁿ from its corners.
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for corner in 0..(1usize << n) {
        let x: Vec<f64> = (0..n).map(|i| ((corner >> i) & 1) as f64).collect();
        for i in 0..n {
            let v: f64 = (0..n).map(|k| mt_rows[i][k] as f64 * x[k]).sum();
            lo[i] = lo[i].min(v.floor() as i64 - 1);
            hi[i] = hi[i].max(v.ceil() as i64 + 1);
        }
    }

    // Rational coordinates Mt⁻¹k have denominator det, so a margin of
    // 1/(2|det|) separates membership decisions exactly.
    let margin = 0.5 / m as f64;
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut cursor = lo.clone();
    'outer: loop {
        let y: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|k| inv[(i, k)] * cursor[k] as f64).sum())
            .collect();
        if y.iter().all(|&v| v > -margin && v < 1.0 - margin) {
            found.push(cursor.clone());
        }
        for i in 0..n {
            cursor[i] += 1;
            if cursor[i] <= hi[i] {
                continue 'outer;
            }
            cursor[i] = lo[i];
        }
        break;
    }

    if found.len() != m as usize {
        return Err(Error::NotDilation(format!(
            "expected {m} coset representatives, found {}",
            found.len()
        )));
    }
    found.sort_by(|a, b| {
        let ka: Vec<i64> = a.iter().rev().cloned().collect();
        let kb: Vec<i64> = b.iter().rev().cloned().collect();
        ka.cmp(&kb)
    });
    let zero_pos = found
        .iter()
        .position(|p| p.iter().all(|&c| c == 0))
        .expect("zero vector is always a representative");
    found.swap(0, zero_pos);
    Ok(found)
}
