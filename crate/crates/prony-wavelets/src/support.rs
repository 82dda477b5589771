//! Half-open integer support boxes and their dilated lattice point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::DilationScheme;

/// Half-open box lo ≤ k < hi per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl SupportBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Invalid("box dimensions mismatch".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::Invalid("box must satisfy lo < hi".into()));
        }
        Ok(SupportBox { lo, hi })
    }

    /// Cube [a, b)ⁿ.
    pub fn cube(n: usize, a: i64, b: i64) -> Result<Self> {
        Self::new(vec![a; n], vec![b; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&lo, &hi))| v >= lo && v < hi)
    }

    /// Integer points of the box itself.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut out = Vec::new();
        let mut cursor = self.lo.clone();
        'outer: loop {
            out.push(cursor.clone());
            for i in (0..n).rev() {
                cursor[i] += 1;
                if cursor[i] < self.hi[i] {
                    continue 'outer;
                }
                cursor[i] = self.lo[i];
            }
            break;
        }
        out
    }

    /// Integer points of D^j·box, i.e. {k ∈ ℤⁿ : D^{−j} k ∈ box}.
    pub fn dilated_points(&self, scheme: &DilationScheme, level: u32) -> Vec<Vec<i64>> {
        if level == 0 {
            return self.points();
        }
        let n = self.dim();
        let dj = scheme.d_pow(level as i32);
        let dji = scheme.d_pow(-(level as i32));
        // Bounding box of the dilated parallelepiped from its corners.
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for corner in 0..(1usize << n) {
            let x: Vec<f64> = (0..n)
                .map(|i| {
                    if (corner >> i) & 1 == 1 {
                        self.hi[i] as f64
                    } else {
                        self.lo[i] as f64
                    }
                })
                .collect();
            for i in 0..n {
                let v: f64 = (0..n).map(|k| dj[(i, k)] * x[k]).sum();
                lo[i] = lo[i].min(v.floor() as i64 - 1);
                hi[i] = hi[i].max(v.ceil() as i64 + 1);
            }
        }
        let mut out = Vec::new();
        let mut cursor = lo.clone();
        'outer: loop {
            let y: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|k| dji[(i, k)] * cursor[k] as f64).sum())
                .collect();
            // D^{−j}k is a dyadic-denominator rational for integer dilations,
            // so a small symmetric margin decides membership safely.
            let inside = y
                .iter()
                .enumerate()
                .all(|(i, &v)| v >= self.lo[i] as f64 - 1e-9 && v < self.hi[i] as f64 - 1e-9);
            if inside {
                out.push(cursor.clone());
            }
            for i in (0..n).rev() {
                cursor[i] += 1;
                if cursor[i] <= hi[i] {
                    continue 'outer;
                }
                cursor[i] = lo[i];
            }
            break;
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_of_small_box() {
        let b = SupportBox::cube(1, 0, 3).unwrap();
        assert_eq!(b.points(), vec![vec![0], vec![1], vec![2]]);
        assert!(b.contains(&[2]));
        assert!(!b.contains(&[3]));
    }

    #[test]
    fn dilated_dyadic_box() {
        let scheme = DilationScheme::scalar(2).unwrap();
        let b = SupportBox::cube(1, 0, 4).unwrap();
        let pts = b.dilated_points(&scheme, 1);
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], vec![0]);
        assert_eq!(pts[7], vec![7]);
    }

    #[test]
    fn dilated_rotational_box_has_determinant_scaling() {
        let scheme = DilationScheme::new(vec![vec![0, -2], vec![1, 0]]).unwrap();
        let b = SupportBox::cube(2, 0, 4).unwrap();
        // |det D| = 2 per level.
        assert_eq!(b.dilated_points(&scheme, 0).len(), 16);
        assert_eq!(b.dilated_points(&scheme, 1).len(), 32);
        assert_eq!(b.dilated_points(&scheme, 2).len(), 64);
    }

    #[test]
    fn invalid_boxes_rejected() {
        assert!(SupportBox::new(vec![0], vec![0]).is_err());
        assert!(SupportBox::new(vec![0, 0], vec![1]).is_err());
    }
}
