//! Shared test oracles: numerical Fourier integration of time-domain signals,
//! independent of the closed-form transform path under test.

use num_complex::Complex64;
use prony_wavelets::bank::WaveletBank;
use prony_wavelets::signal::{eval_signal_time, SparseWaveletSignal};

/// Adaptive Simpson quadrature for complex-valued integrands.
fn adaptive_simpson<F: Fn(f64) -> Complex64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, m: f64, b: f64) -> Complex64 {
        (f(a) + 4.0 * f(m) + f(b)) * ((b - a) / 6.0)
    }
    fn rec<F: Fn(f64) -> Complex64 + Copy>(
        f: F,
        a: f64,
        m: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let left = simpson(&f, a, lm, m);
        let right = simpson(&f, m, rm, b);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() < 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, lm, m, left, tol / 2.0, depth - 1)
                + rec(f, m, rm, b, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    rec(f, a, m, b, simpson(&f, a, m, b), tol, depth)
}

/// ∫ f(t) e^{−i t ξ} dt for a one-dimensional signal, integrating piecewise
/// over quarter-integer cells so all dyadic breakpoints (down to level 1)
/// land on panel edges.
pub fn quadrature_ft_1d(
    signal: &SparseWaveletSignal,
    bank: &WaveletBank,
    xi: f64,
    lo: f64,
    hi: f64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut a = lo;
    while a < hi - 1e-12 {
        let b = (a + 0.25).min(hi);
        acc += adaptive_simpson(
            |t| {
                let v = eval_signal_time(signal, bank, &[t]).expect("time eval");
                v * Complex64::new(0.0, -t * xi).exp()
            },
            a,
            b,
            1e-11,
            18,
        );
        a = b;
    }
    acc
}

/// Gauss–Legendre nodes/weights on [-1, 1], 12 points.
const GL12: [(f64, f64); 12] = [
    (-0.9815606342467192, 0.04717533638651183),
    (-0.9041172563704749, 0.10693932599531843),
    (-0.7699026741943047, 0.16007832854334622),
    (-0.5873179542866175, 0.20316742672306592),
    (-0.3678314989981802, 0.23349253653835481),
    (-0.1252334085114689, 0.24914704581340277),
    (0.1252334085114689, 0.24914704581340277),
    (0.3678314989981802, 0.23349253653835481),
    (0.5873179542866175, 0.20316742672306592),
    (0.7699026741943047, 0.16007832854334622),
    (0.9041172563704749, 0.10693932599531843),
    (0.9815606342467192, 0.04717533638651183),
];

/// Tensor Gauss–Legendre transform for two-dimensional signals, on half-cell
/// panels so the piecewise-constant breakpoints align with panel edges.
pub fn quadrature_ft_2d(
    signal: &SparseWaveletSignal,
    bank: &WaveletBank,
    xi: &[f64; 2],
    lo: f64,
    hi: f64,
) -> Complex64 {
    let step = 0.5;
    let cells = ((hi - lo) / step).round() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..cells {
        let a1 = lo + i as f64 * step;
        for j in 0..cells {
            let a2 = lo + j as f64 * step;
            for &(x1, w1) in &GL12 {
                let t1 = a1 + step * 0.5 * (x1 + 1.0);
                for &(x2, w2) in &GL12 {
                    let t2 = a2 + step * 0.5 * (x2 + 1.0);
                    let v = eval_signal_time(signal, bank, &[t1, t2]).expect("time eval");
                    if v != 0.0 {
                        let phase = -(t1 * xi[0] + t2 * xi[1]);
                        acc += v * Complex64::new(0.0, phase).exp()
                            * (w1 * w2 * step * step * 0.25);
                    }
                }
            }
        }
    }
    acc
}
