//! Sparse wavelet signals and their forward measurements.
//!
//! A signal of J levels is
//!     f = Σ_k a₀ᵀ(k) Φ(·−k) + Σ_{j<J} Σ_{m} Σ_k b_{m,j}ᵀ(k) M^j Ψ_m(D^j·−k),
//! and its transform evaluates through the 2π-periodic coefficient symbols:
//!     f̂(ξ) = â₀ᵀ(ξ) Φ̂(ξ) + Σ_j Σ_m b̂_{m,j}ᵀ(Mt^{−j}ξ) Ψ̂_m(Mt^{−j}ξ).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bank::{TimeComponent, WaveletBank};
use crate::error::{Error, Result};
use crate::linalg::CVec;
use crate::sampling::{SamplingPlan, SparsityVector};
use crate::support::SupportBox;

/// Finite map lattice point → coefficient vector (length r).
pub type CoeffMap = BTreeMap<Vec<i64>, Vec<Complex64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseWaveletSignal {
    pub dim: usize,
    pub r: usize,
    /// Number of wavelet levels J.
    pub levels: usize,
    /// Number of subbands M of the generating scheme.
    pub subbands: usize,
    pub a0: CoeffMap,
    /// b[j][m−1] holds the level-j coefficients of wavelet m.
    pub b: Vec<Vec<CoeffMap>>,
}

impl SparseWaveletSignal {
    pub fn zero(dim: usize, r: usize, levels: usize, subbands: usize) -> Self {
        SparseWaveletSignal {
            dim,
            r,
            levels,
            subbands,
            a0: BTreeMap::new(),
            b: vec![vec![BTreeMap::new(); subbands - 1]; levels],
        }
    }

    /// Insert a scaling coefficient, dropping exact zeros.
    pub fn set_a0(&mut self, k: Vec<i64>, v: Vec<Complex64>) {
        if v.iter().any(|c| c.norm() > 0.0) {
            self.a0.insert(k, v);
        }
    }

    /// Insert a wavelet coefficient for (m, j), dropping exact zeros.
    pub fn set_b(&mut self, m: usize, j: usize, k: Vec<i64>, v: Vec<Complex64>) {
        if v.iter().any(|c| c.norm() > 0.0) {
            self.b[j][m - 1].insert(k, v);
        }
    }

    pub fn b_map(&self, m: usize, j: usize) -> &CoeffMap {
        &self.b[j][m - 1]
    }

    /// Sparsity bounds of the stored supports: s_j as defined per level.
    pub fn check_sparsity(&self, s: &SparsityVector) -> Result<()> {
        if s.levels() != self.levels {
            return Err(Error::Invalid(format!(
                "signal has {} levels, sparsity vector {}",
                self.levels,
                s.levels()
            )));
        }
        for (j, &sj) in s.0.iter().enumerate() {
            for m in 1..self.subbands {
                if self.b_map(m, j).len() > sj {
                    return Err(Error::Invalid(format!(
                        "level {j} wavelet {m} has {} atoms > s_{j} = {sj}",
                        self.b_map(m, j).len()
                    )));
                }
            }
        }
        if self.a0.len() > s.0[0] {
            return Err(Error::Invalid(format!(
                "scaling part has {} atoms > s_0 = {}",
                self.a0.len(),
                s.0[0]
            )));
        }
        Ok(())
    }

    /// Largest imaginary component across stored coefficients.
    pub fn max_imag(&self) -> f64 {
        let scan = |m: &CoeffMap| {
            m.values()
                .flat_map(|v| v.iter().map(|c| c.im.abs()))
                .fold(0.0f64, f64::max)
        };
        let mut worst = scan(&self.a0);
        for level in &self.b {
            for map in level {
                worst = worst.max(scan(map));
            }
        }
        worst
    }

    /// Drop imaginary parts (used after reconstruction of real signals).
    pub fn take_real(&mut self) {
        let clean = |m: &mut CoeffMap| {
            for v in m.values_mut() {
                for c in v.iter_mut() {
                    *c = Complex64::new(c.re, 0.0);
                }
            }
        };
        clean(&mut self.a0);
        for level in &mut self.b {
            for map in level {
                clean(map);
            }
        }
    }
}

/// Σ_k c(k) e^{−i k·ξ} over a stored support; 2π-periodic in each coordinate.
pub fn coeff_symbol(map: &CoeffMap, r: usize, xi: &[f64]) -> CVec {
    let mut acc = CVec::zeros(r);
    for (k, v) in map {
        let phase: f64 = k.iter().zip(xi).map(|(&kk, &x)| kk as f64 * x).sum();
        let e = Complex64::new(0.0, -phase).exp();
        for i in 0..r {
            acc[i] += v[i] * e;
        }
    }
    acc
}

/// f̂(ξ) for a sparse signal under a bank.
pub fn fourier_measure(signal: &SparseWaveletSignal, bank: &WaveletBank, xi: &[f64]) -> Result<Complex64> {
    let mut acc = coeff_symbol(&signal.a0, signal.r, xi).dot(&bank.phi_hat(xi)?);
    for j in 0..signal.levels {
        let arg = bank.scheme.mt_apply(-(j as i32), xi);
        for m in 1..signal.subbands {
            let sym = coeff_symbol(signal.b_map(m, j), signal.r, &arg);
            if sym.iter().any(|c| c.norm() > 0.0) {
                acc += sym.dot(&bank.psi_hat(m, &arg)?);
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct MeasurementSet {
    pub frequencies: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
    pub bank_id: String,
    pub bank_variant: Option<String>,
    /// Hash of the plan the measurements were taken on; empty for external sets.
    pub plan_hash: String,
}

impl MeasurementSet {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Batch f̂ over a plan's deduplicated frequency set.
pub fn measure_on_plan(
    signal: &SparseWaveletSignal,
    bank: &WaveletBank,
    plan: &SamplingPlan,
) -> Result<MeasurementSet> {
    let mut values = Vec::with_capacity(plan.omega.len());
    for point in &plan.omega {
        values.push(fourier_measure(signal, bank, &point.xi)?);
    }
    Ok(MeasurementSet {
        frequencies: plan.omega_frequencies(),
        values,
        bank_id: bank.id.clone(),
        bank_variant: bank.variant.clone(),
        plan_hash: plan.hash.clone(),
    })
}

/// Batch f̂ over an arbitrary frequency list (no plan hash).
pub fn measure_on_frequencies(
    signal: &SparseWaveletSignal,
    bank: &WaveletBank,
    freqs: &[Vec<f64>],
) -> Result<MeasurementSet> {
    let mut values = Vec::with_capacity(freqs.len());
    for xi in freqs {
        values.push(fourier_measure(signal, bank, xi)?);
    }
    Ok(MeasurementSet {
        frequencies: freqs.to_vec(),
        values,
        bank_id: bank.id.clone(),
        bank_variant: bank.variant.clone(),
        plan_hash: String::new(),
    })
}

/// Pointwise time-domain value (real part of the coefficient sum).
pub fn eval_signal_time(signal: &SparseWaveletSignal, bank: &WaveletBank, t: &[f64]) -> Result<f64> {
    if !bank.has_time_evaluators() {
        return Err(Error::TimeEvalUnavailable(bank.id.clone()));
    }
    let mut acc = 0.0;
    for (k, v) in &signal.a0 {
        let shifted: Vec<f64> = t.iter().zip(k).map(|(&x, &kk)| x - kk as f64).collect();
        for l in 0..signal.r {
            let val = bank.eval_time(TimeComponent::Phi(l + 1), &shifted)?;
            if val != 0.0 {
                acc += v[l].re * val;
            }
        }
    }
    for j in 0..signal.levels {
        let dj = bank.scheme.d_pow(j as i32);
        let mj = (bank.scheme.m as f64).powi(j as i32);
        let n = signal.dim;
        let dt: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|c| dj[(i, c)] * t[c]).sum())
            .collect();
        for m in 1..signal.subbands {
            for (k, v) in signal.b_map(m, j) {
                let shifted: Vec<f64> = dt.iter().zip(k).map(|(&x, &kk)| x - kk as f64).collect();
                for l in 0..signal.r {
                    let val = bank.eval_time(TimeComponent::Psi(m, l + 1), &shifted)?;
                    if val != 0.0 {
                        acc += v[l].re * mj * val;
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// Uniform draw from [−1,1] with the middle (−0.1, 0.1) removed.
fn draw_amplitude<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    if u < 0.5 {
        -1.0 + u * 1.8
    } else {
        0.1 + (u - 0.5) * 1.8
    }
}

/// Random s-sparse signal with supports in the (per-level dilated) box.
pub fn random_signal(
    bank: &WaveletBank,
    s: &SparsityVector,
    support: &SupportBox,
    seed: u64,
) -> Result<SparseWaveletSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = bank.r;
    let big_m = bank.scheme.m;
    let mut signal = SparseWaveletSignal::zero(bank.dim(), r, s.levels(), big_m);

    let pick = |sites: &[Vec<i64>], count: usize, rng: &mut ChaCha8Rng| -> Result<Vec<Vec<i64>>> {
        if sites.len() < count {
            return Err(Error::Invalid(format!(
                "support box too small: {} sites for {count} atoms",
                sites.len()
            )));
        }
        let mut idx: Vec<usize> = (0..sites.len()).collect();
        let mut chosen = Vec::with_capacity(count);
        for i in 0..count {
            let pos = rng.gen_range(i..idx.len());
            idx.swap(i, pos);
            chosen.push(sites[idx[i]].clone());
        }
        Ok(chosen)
    };

    let base_sites = support.points();
    for k in pick(&base_sites, s.0[0], &mut rng)? {
        let v: Vec<Complex64> = (0..r)
            .map(|_| Complex64::new(draw_amplitude(&mut rng), 0.0))
            .collect();
        signal.set_a0(k, v);
    }
    for (j, &sj) in s.0.iter().enumerate() {
        let sites = support.dilated_points(&bank.scheme, j as u32);
        for m in 1..big_m {
            for k in pick(&sites, sj, &mut rng)? {
                let v: Vec<Complex64> = (0..r)
                    .map(|_| Complex64::new(draw_amplitude(&mut rng), 0.0))
                    .collect();
                signal.set_b(m, j, k, v);
            }
        }
    }
    Ok(signal)
}

/// Random coefficients on prescribed supports: a0_sites for the scaling part
/// and b_sites[j][m−1] per wavelet map. Draw order is deterministic.
pub fn random_signal_on_supports(
    bank: &WaveletBank,
    a0_sites: &[Vec<i64>],
    b_sites: &[Vec<Vec<Vec<i64>>>],
    seed: u64,
) -> SparseWaveletSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = bank.r;
    let levels = b_sites.len();
    let mut signal = SparseWaveletSignal::zero(bank.dim(), r, levels, bank.scheme.m);
    for k in a0_sites {
        let v: Vec<Complex64> = (0..r)
            .map(|_| Complex64::new(draw_amplitude(&mut rng), 0.0))
            .collect();
        signal.set_a0(k.clone(), v);
    }
    for (j, per_m) in b_sites.iter().enumerate() {
        for (mi, sites) in per_m.iter().enumerate() {
            for k in sites {
                let v: Vec<Complex64> = (0..r)
                    .map(|_| Complex64::new(draw_amplitude(&mut rng), 0.0))
                    .collect();
                signal.set_b(mi + 1, j, k.clone(), v);
            }
        }
    }
    signal
}

/// Relative l² distance over the union support of all coefficients.
pub fn rel_coeff_error(truth: &SparseWaveletSignal, got: &SparseWaveletSignal) -> f64 {
    fn acc_maps(a: &CoeffMap, b: &CoeffMap, r: usize, num: &mut f64, den: &mut f64) {
        let keys: std::collections::BTreeSet<&Vec<i64>> = a.keys().chain(b.keys()).collect();
        let zero = vec![Complex64::new(0.0, 0.0); r];
        for k in keys {
            let va = a.get(k).unwrap_or(&zero);
            let vb = b.get(k).unwrap_or(&zero);
            for i in 0..r {
                *num += (va[i] - vb[i]).norm_sqr();
                *den += va[i].norm_sqr();
            }
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    acc_maps(&truth.a0, &got.a0, truth.r, &mut num, &mut den);
    for j in 0..truth.levels {
        for m in 1..truth.subbands {
            let empty = BTreeMap::new();
            let other = if j < got.levels { got.b_map(m, j) } else { &empty };
            acc_maps(truth.b_map(m, j), other, truth.r, &mut num, &mut den);
        }
    }
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}
