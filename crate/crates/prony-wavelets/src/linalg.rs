//! Thin complex linear-algebra helpers over nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn sigma_min(m: &CMat) -> f64 {
    singular_values(m).last().cloned().unwrap_or(0.0)
}

/// 2-norm condition number; infinite when the matrix is numerically singular.
pub fn condition(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

/// Right singular vector for the smallest singular value (null-space proxy).
///
/// Wide inputs are zero-padded to square first: the thin SVD of a wide matrix
/// omits exactly the right singular vectors spanning the null space.
pub fn smallest_right_singular_vector(m: &CMat) -> CVec {
    let m = if m.nrows() < m.ncols() {
        let mut padded = CMat::zeros(m.ncols(), m.ncols());
        padded.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let idx = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .expect("nonempty singular values");
    vt.row(idx).conjugate().transpose()
}

/// Solve the square system A x = b by LU; returns None when singular.
pub fn solve(a: &CMat, b: &CVec) -> Option<CVec> {
    a.clone().lu().solve(b)
}

/// Least-squares solution of A x ≈ b via SVD.
pub fn lstsq(a: &CMat, b: &CVec) -> CVec {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-14).expect("SVD solve")
}

/// Roots of a complex polynomial c0 + c1 z + … + cd z^d via the companion
/// matrix's Schur form.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    // Trim tiny leading (highest-degree) coefficients.
    let max_mag = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if max_mag == 0.0 {
        return vec![];
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() < 1e-12 * max_mag {
        deg -= 1;
    }
    if deg == 0 {
        return vec![];
    }
    let lead = coeffs[deg];
    if deg == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut comp = CMat::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let (_, t) = comp.schur().unpack();
    (0..deg).map(|i| t[(i, i)]).collect()
}
