//! Multiwavelet banks: scaling/wavelet evaluators in the Fourier domain,
//! refinement masks, full-rank shift selection, and numerical verification.
//!
//! A bank carries a dilation scheme, multiplicity r, the M masks G₀…G_{M−1}
//! (r×r trigonometric polynomials), and evaluators for Φ̂ and Ψ̂_m. Built-in
//! banks install closed forms; banks defined by masks alone fall back to the
//! truncated product
//!     Φ̂(ξ) ≈ [Π_{i=1}^{depth} G₀(Mt^{−i} ξ)] · v₀,
//! where v₀ is the eigenvector of G₀(0) for eigenvalue 1, scaled so its first
//! nonzero entry is 1, and Ψ̂_m(ξ) = G_m(Mt⁻¹ξ) Φ̂(Mt⁻¹ξ).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::pwpoly::SeparableFn;
use crate::scheme::DilationScheme;
use crate::trigpoly::TrigMatrixPoly;

pub const DEFAULT_PRODUCT_DEPTH: u32 = 40;
pub const DEFAULT_RANK_TOL: f64 = 1e-6;
pub const DEFAULT_LAMBDA_RADIUS: i64 = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveletBank {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variant: Option<String>,
    pub scheme: DilationScheme,
    /// Multiplicity r (number of scaling functions).
    pub r: usize,
    /// Masks G₀…G_{M−1}, each r×r.
    pub masks: Vec<TrigMatrixPoly>,
    /// Closed-form scaling functions (r components), when known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<Vec<SeparableFn>>,
    /// Closed-form wavelet functions, (M−1) × r components, when known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psi: Option<Vec<Vec<SeparableFn>>>,
    /// Truncation depth for the product-based Φ̂ fallback.
    pub product_depth: u32,
}

/// Which time-domain component to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeComponent {
    /// φ_l, 1-based l ≤ r.
    Phi(usize),
    /// ψ_{m,l}, wavelet index 1 ≤ m ≤ M−1 and component 1 ≤ l ≤ r.
    Psi(usize, usize),
}

impl WaveletBank {
    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }

    pub fn subbands(&self) -> usize {
        self.scheme.m
    }

    fn check(&self) -> Result<()> {
        if self.masks.len() != self.scheme.m {
            return Err(Error::Invalid(format!(
                "bank has {} masks, scheme needs {}",
                self.masks.len(),
                self.scheme.m
            )));
        }
        for g in &self.masks {
            if g.rows != self.r || g.cols != self.r {
                return Err(Error::Invalid("mask shape is not r x r".into()));
            }
        }
        Ok(())
    }

    pub fn validate(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    /// Φ̂(ξ) as a complex r-vector.
    pub fn phi_hat(&self, xi: &[f64]) -> Result<CVec> {
        if let Some(phi) = &self.phi {
            return Ok(CVec::from_iterator(
                self.r,
                phi.iter().map(|f| f.fourier(xi)),
            ));
        }
        self.phi_hat_product(xi, self.product_depth)
    }

    /// Truncated-product evaluation of Φ̂ from the refinement mask alone.
    pub fn phi_hat_product(&self, xi: &[f64], depth: u32) -> Result<CVec> {
        let v0 = self.refinement_eigenvector()?;
        let mut acc = CMat::identity(self.r, self.r);
        for i in 1..=depth {
            let arg = self.scheme.mt_apply(-(i as i32), xi);
            acc *= self.masks[0].eval(&arg);
        }
        Ok(acc * v0)
    }

    /// Eigenvector of G₀(0) for eigenvalue 1, first nonzero entry scaled to 1.
    pub fn refinement_eigenvector(&self) -> Result<CVec> {
        let zero = vec![0.0; self.dim()];
        let g0 = self.masks[0].eval(&zero);
        let shifted = &g0 - CMat::identity(self.r, self.r);
        if linalg::sigma_min(&shifted) > 1e-9 {
            return Err(Error::NonRefinable(
                "G0(0) has no eigenvalue within 1e-9 of 1".into(),
            ));
        }
        let mut v = linalg::smallest_right_singular_vector(&shifted);
        let first = v
            .iter()
            .find(|c| c.norm() > 1e-9)
            .cloned()
            .ok_or_else(|| Error::NonRefinable("null eigenvector".into()))?;
        v /= first;
        Ok(v)
    }

    /// Ψ̂_m(ξ), 1 ≤ m ≤ M−1.
    pub fn psi_hat(&self, m: usize, xi: &[f64]) -> Result<CVec> {
        if m < 1 || m >= self.scheme.m {
            return Err(Error::Invalid(format!(
                "wavelet index m={m} out of range 1..{}",
                self.scheme.m - 1
            )));
        }
        if let Some(psi) = &self.psi {
            return Ok(CVec::from_iterator(
                self.r,
                psi[m - 1].iter().map(|f| f.fourier(xi)),
            ));
        }
        self.psi_hat_from_mask(m, xi)
    }

    /// Mask route: Ψ̂_m(ξ) = G_m(Mt⁻¹ξ) Φ̂(Mt⁻¹ξ).
    pub fn psi_hat_from_mask(&self, m: usize, xi: &[f64]) -> Result<CVec> {
        let half = self.scheme.mt_apply(-1, xi);
        Ok(self.masks[m].eval(&half) * self.phi_hat(&half)?)
    }

    /// Time-domain evaluation of a named component.
    pub fn eval_time(&self, which: TimeComponent, t: &[f64]) -> Result<f64> {
        match which {
            TimeComponent::Phi(l) => {
                let phi = self
                    .phi
                    .as_ref()
                    .ok_or_else(|| Error::TimeEvalUnavailable(self.id.clone()))?;
                if l < 1 || l > self.r {
                    return Err(Error::Invalid(format!("phi component {l} out of range")));
                }
                Ok(phi[l - 1].eval(t))
            }
            TimeComponent::Psi(m, l) => {
                let psi = self
                    .psi
                    .as_ref()
                    .ok_or_else(|| Error::TimeEvalUnavailable(self.id.clone()))?;
                if m < 1 || m >= self.scheme.m || l < 1 || l > self.r {
                    return Err(Error::Invalid(format!("psi component ({m},{l}) out of range")));
                }
                Ok(psi[m - 1][l - 1].eval(t))
            }
        }
    }

    pub fn has_time_evaluators(&self) -> bool {
        self.phi.is_some() && self.psi.is_some()
    }
}

/// A set Λ(ξ) of r integer shifts making (Φ̂(ξ+2πk))_{k∈Λ} full rank.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LambdaSet {
    pub anchor: Vec<f64>,
    pub shifts: Vec<Vec<i64>>,
    /// Smallest singular value of the r×r matrix with columns Φ̂(anchor+2πk).
    pub conditioning: f64,
}

/// Integer vectors with ‖k‖∞ ≤ radius, ordered by (‖k‖∞, lexicographic).
pub fn shift_scan_order(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut all: Vec<Vec<i64>> = Vec::new();
    let mut cursor = vec![-radius; n];
    'outer: loop {
        all.push(cursor.clone());
        for i in (0..n).rev() {
            cursor[i] += 1;
            if cursor[i] <= radius {
                continue 'outer;
            }
            cursor[i] = -radius;
        }
        break;
    }
    all.sort_by(|a, b| {
        let na = a.iter().map(|v| v.abs()).max().unwrap_or(0);
        let nb = b.iter().map(|v| v.abs()).max().unwrap_or(0);
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
    all
}

/// Greedy full-rank shift selection at anchor ξ.
///
/// Scans shifts in the deterministic order above and keeps a shift whenever
/// the augmented column matrix retains σ_min > τ_rank, stopping at r columns.
pub fn select_lambda(
    bank: &WaveletBank,
    xi: &[f64],
    radius: i64,
    tau_rank: f64,
) -> Result<LambdaSet> {
    select_lambda_filtered(bank, xi, radius, tau_rank, |_| true)
}

/// Same scan restricted to shifts allowed by `admit` (used when a plan must
/// stay inside an externally given frequency set).
pub fn select_lambda_filtered<F: Fn(&[i64]) -> bool>(
    bank: &WaveletBank,
    xi: &[f64],
    radius: i64,
    tau_rank: f64,
    admit: F,
) -> Result<LambdaSet> {
    let n = bank.dim();
    let mut shifts: Vec<Vec<i64>> = Vec::new();
    let mut cols: Vec<CVec> = Vec::new();
    for k in shift_scan_order(n, radius) {
        if !admit(&k) {
            continue;
        }
        let arg: Vec<f64> = xi
            .iter()
            .zip(&k)
            .map(|(&x, &kk)| x + 2.0 * std::f64::consts::PI * kk as f64)
            .collect();
        let col = bank.phi_hat(&arg)?;
        let mut mat = CMat::zeros(bank.r, cols.len() + 1);
        for (j, c) in cols.iter().enumerate() {
            mat.set_column(j, c);
        }
        mat.set_column(cols.len(), &col);
        let smin = linalg::sigma_min(&mat);
        if smin > tau_rank {
            shifts.push(k);
            cols.push(col);
            if shifts.len() == bank.r {
                return Ok(LambdaSet {
                    anchor: xi.to_vec(),
                    shifts,
                    conditioning: smin,
                });
            }
        }
    }
    Err(Error::LambdaExhausted {
        anchor: xi.to_vec(),
        radius,
        found: shifts.len(),
        needed: bank.r,
    })
}

/// The Mr×Mr block matrix with block (m, m') = G_m(ξ + 2π Mt⁻¹ p_{m'}).
pub fn mask_block_matrix(bank: &WaveletBank, xi: &[f64]) -> CMat {
    let m = bank.scheme.m;
    let r = bank.r;
    let mut big = CMat::zeros(m * r, m * r);
    for (mp, p) in bank.scheme.cosets.iter().enumerate() {
        let pf: Vec<f64> = p.iter().map(|&v| v as f64).collect();
        let shift = bank.scheme.mt_apply(-1, &pf);
        let arg: Vec<f64> = xi
            .iter()
            .zip(&shift)
            .map(|(&x, &s)| x + 2.0 * std::f64::consts::PI * s)
            .collect();
        for mi in 0..m {
            let block = bank.masks[mi].eval(&arg);
            for i in 0..r {
                for j in 0..r {
                    big[(mi * r + i, mp * r + j)] = block[(i, j)];
                }
            }
        }
    }
    big
}

/// Per-point residuals of the defining relations of a bank.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankCheckRow {
    pub xi: Vec<f64>,
    /// ‖Φ̂(ξ) − G₀(Mt⁻¹ξ)Φ̂(Mt⁻¹ξ)‖
    pub refinement: f64,
    /// ‖Ψ̂_m(ξ) − G_m(Mt⁻¹ξ)Φ̂(Mt⁻¹ξ)‖ per m ≥ 1
    pub wavelet: Vec<f64>,
    /// ‖Σ_{m'} G₀(·)G_m(·)^{*T}‖ per m ≥ 1 over the coset shifts
    pub orthogonality: Vec<f64>,
    /// σ_min of the Mr×Mr mask block matrix at ξ
    pub sigma_min: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankReport {
    pub bank: String,
    pub rows: Vec<BankCheckRow>,
    pub max_refinement: f64,
    pub max_wavelet: f64,
    pub max_orthogonality: f64,
    pub min_sigma: f64,
    pub tau: f64,
    pub tau_rank: f64,
    pub pass: bool,
}

/// Evaluate refinement, wavelet, orthogonality and rank conditions on a grid.
pub fn verify_bank(
    bank: &WaveletBank,
    grid: &[Vec<f64>],
    tau: f64,
    tau_rank: f64,
) -> Result<BankReport> {
    bank.check()?;
    let m = bank.scheme.m;
    let mut rows = Vec::with_capacity(grid.len());
    for xi in grid {
        let half = bank.scheme.mt_apply(-1, xi);
        let phi_half = bank.phi_hat(&half)?;
        let refinement = (bank.phi_hat(xi)? - bank.masks[0].eval(&half) * &phi_half).norm();
        let mut wavelet = Vec::with_capacity(m - 1);
        for mi in 1..m {
            wavelet.push((bank.psi_hat(mi, xi)? - bank.masks[mi].eval(&half) * &phi_half).norm());
        }
        // Orthogonality of G₀ against each G_m over the coset shifts.
        let mut orthogonality = Vec::with_capacity(m - 1);
        let shifted_args: Vec<Vec<f64>> = bank
            .scheme
            .cosets
            .iter()
            .map(|p| {
                let pf: Vec<f64> = p.iter().map(|&v| v as f64).collect();
                let s = bank.scheme.mt_apply(-1, &pf);
                xi.iter()
                    .zip(&s)
                    .map(|(&x, &sv)| x + 2.0 * std::f64::consts::PI * sv)
                    .collect()
            })
            .collect();
        for mi in 1..m {
            let mut acc = CMat::zeros(bank.r, bank.r);
            for arg in &shifted_args {
                let g0 = bank.masks[0].eval(arg);
                let gm = bank.masks[mi].eval(arg);
                acc += g0 * gm.adjoint();
            }
            orthogonality.push(acc.norm());
        }
        let sigma_min = linalg::sigma_min(&mask_block_matrix(bank, xi));
        rows.push(BankCheckRow {
            xi: xi.clone(),
            refinement,
            wavelet,
            orthogonality,
            sigma_min,
        });
    }
    let max_refinement = rows.iter().map(|r| r.refinement).fold(0.0, f64::max);
    let max_wavelet = rows
        .iter()
        .flat_map(|r| r.wavelet.iter().cloned())
        .fold(0.0, f64::max);
    let max_orthogonality = rows
        .iter()
        .flat_map(|r| r.orthogonality.iter().cloned())
        .fold(0.0, f64::max);
    let min_sigma = rows.iter().map(|r| r.sigma_min).fold(f64::INFINITY, f64::min);
    let pass = max_refinement < tau
        && max_wavelet < tau
        && max_orthogonality < tau
        && min_sigma > tau_rank;
    Ok(BankReport {
        bank: bank.id.clone(),
        rows,
        max_refinement,
        max_wavelet,
        max_orthogonality,
        min_sigma,
        tau,
        tau_rank,
        pass,
    })
}

/// Uniform verification grid on [0, 2π)ⁿ with `count` points per axis.
pub fn verification_grid(n: usize, count: usize) -> Vec<Vec<f64>> {
    let step = 2.0 * std::f64::consts::PI / count as f64;
    let mut grid = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        grid.push(idx.iter().map(|&i| i as f64 * step).collect());
        for i in (0..n).rev() {
            idx[i] += 1;
            if idx[i] < count {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    grid
}

pub(crate) fn cmat_from_columns(r: usize, cols: &[CVec]) -> CMat {
    let mut m = CMat::zeros(r, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}
