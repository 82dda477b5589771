//! Level-by-level reconstruction from Fourier measurements on a plan's Ω.
//!
//! For j = J−1 down to 0:
//!   1. per (γ, m'): solve A(j,γ,m') from
//!        A · (Φ̂(Mt⁻¹η + 2πk))_{k∈Λ} = (f̂_j at the group's frequencies),
//!   2. per γ: unmix (âᵀ, b̂₁ᵀ, …, b̂_{M−1}ᵀ) · G(π Mt^{−j−1} γ) = (A(j,γ,·)),
//!   3. per m: Prony on {b̂_{m,j}(π Mt^{−j} γ)}_{γ∈Γ_j} with direction
//!      π Mt^{−j} h and the level-j dilated support box,
//!   4. peel f̂_{j−1}(ξ) = f̂_j(ξ) − Σ_m b̂_{m,j}ᵀ(Mt^{−j}ξ) Ψ̂_m(Mt^{−j}ξ).
//! The scaling part a₀ comes from one more Prony pass over the â₀ values at
//! π γ, γ ∈ Γ₀, and the assembled signal is re-measured as a final gate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bank::{cmat_from_columns, mask_block_matrix, WaveletBank};
use crate::error::{Error, Result};
use crate::linalg::{self, CVec};
use crate::prony::{recover_on_candidates, MatchMode, PronyInput};
use crate::sampling::{GroupPlan, SamplingPlan};
use crate::signal::{coeff_symbol, fourier_measure, MeasurementSet, SparseWaveletSignal};
use crate::support::SupportBox;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// σ_min floor for Λ matrices and the mask block matrix; its reciprocal
    /// bounds acceptable condition numbers in the group solves.
    pub rank_tol: f64,
    /// Relative singular-value threshold for Hankel rank detection.
    pub hankel_rank_tol: f64,
    /// Circular-distance tolerance for strict node→lattice matching.
    pub phase_tol: f64,
    /// Amplitudes below this are pruned after the Vandermonde fit.
    pub amp_tol: f64,
    /// Relative mismatch allowed when the result is re-measured on Ω.
    pub verify_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-6,
            hankel_rank_tol: 1e-8,
            phase_tol: 1e-6,
            amp_tol: 1e-10,
            verify_tol: 1e-6,
        }
    }
}

/// Intermediate products of one level, kept for inspection and tests.
#[derive(Debug, Clone)]
pub struct LevelIntermediate {
    pub level: usize,
    /// (γ numerator, m') → solved row A(j,γ,m').
    pub a_rows: Vec<((i64, usize), CVec)>,
    /// γ numerator → (â_j, [b̂_{1,j}, …, b̂_{M−1,j}]) at π Mt^{−j} γ.
    pub symbols: Vec<(i64, (CVec, Vec<CVec>))>,
    /// Measurement values on Ω after peeling this level.
    pub peeled: Vec<Complex64>,
    pub group_max_condition: f64,
    pub unmix_min_sigma: f64,
    pub prony_residual: f64,
    pub gap_warning: bool,
    pub max_phase_mismatch: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReconDiagnostics {
    pub remeasure_mismatch: f64,
    pub imag_dust: f64,
    pub per_level_peel_norm: Vec<f64>,
    pub max_phase_mismatch: f64,
    pub gap_warnings: usize,
}

/// Solve one (j, γ, m') group for the row vector A; also returns the
/// condition number of the Φ̂ column matrix.
pub fn solve_group(
    group: &GroupPlan,
    bank: &WaveletBank,
    current: &[Complex64],
    rank_tol: f64,
) -> Result<(CVec, f64)> {
    let anchor = &group.lambda.anchor;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut cols = Vec::with_capacity(group.lambda.shifts.len());
    for k in &group.lambda.shifts {
        let arg: Vec<f64> = anchor
            .iter()
            .zip(k)
            .map(|(&x, &kk)| x + two_pi * kk as f64)
            .collect();
        cols.push(bank.phi_hat(&arg)?);
    }
    let v = cmat_from_columns(bank.r, &cols);
    let cond = linalg::condition(&v);
    if !cond.is_finite() || cond > 1.0 / rank_tol {
        return Err(Error::IllConditioned {
            level: group.level,
            gamma: group.gamma_nu,
            m_prime: group.m_prime,
            cond,
        });
    }
    let y = CVec::from_iterator(
        group.freq_idx.len(),
        group.freq_idx.iter().map(|&i| current[i]),
    );
    // A·V = y  ⇔  Vᵀ Aᵀ = yᵀ.
    let row = linalg::solve(&v.transpose(), &y).ok_or(Error::IllConditioned {
        level: group.level,
        gamma: group.gamma_nu,
        m_prime: group.m_prime,
        cond,
    })?;
    Ok((row, cond))
}

/// Unmix the concatenated rows (A(j,γ,0), …, A(j,γ,M−1)) into the scaling and
/// wavelet symbols at π Mt^{−j} γ.
pub fn unmix_masks(
    level: usize,
    gamma_nu: i64,
    a_cat: &CVec,
    bank: &WaveletBank,
    plan: &SamplingPlan,
    rank_tol: f64,
) -> Result<(CVec, Vec<CVec>, f64)> {
    let r = bank.r;
    let m = bank.scheme.m;
    let pi = std::f64::consts::PI;
    let gamma: Vec<f64> = plan.h.0.iter().map(|&hv| gamma_nu as f64 / 2.0 * hv).collect();
    let pi_gamma: Vec<f64> = gamma.iter().map(|&g| pi * g).collect();
    let arg = bank.scheme.mt_apply(-(level as i32) - 1, &pi_gamma);
    let g_big = mask_block_matrix(bank, &arg);
    let sigma_min = linalg::sigma_min(&g_big);
    if sigma_min < rank_tol {
        return Err(Error::MaskSingular {
            level,
            gamma: gamma_nu,
            sigma_min,
        });
    }
    // x · G = A  ⇔  Gᵀ xᵀ = Aᵀ.
    let x = linalg::solve(&g_big.transpose(), a_cat).ok_or(Error::MaskSingular {
        level,
        gamma: gamma_nu,
        sigma_min,
    })?;
    let a_hat = CVec::from_iterator(r, (0..r).map(|i| x[i]));
    let b_hats: Vec<CVec> = (1..m)
        .map(|mi| CVec::from_iterator(r, (0..r).map(|i| x[mi * r + i])))
        .collect();
    Ok((a_hat, b_hats, sigma_min))
}

fn align_measurements(meas: &MeasurementSet, plan: &SamplingPlan) -> Result<Vec<Complex64>> {
    if !meas.plan_hash.is_empty() && meas.plan_hash != plan.hash {
        return Err(Error::PlanHashMismatch {
            got: meas.plan_hash.clone(),
            expected: plan.hash.clone(),
        });
    }
    let close = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .all(|(&x, &y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())))
    };
    let mut out = Vec::with_capacity(plan.omega.len());
    for point in &plan.omega {
        let found = meas
            .frequencies
            .iter()
            .position(|f| close(f, &point.xi))
            .ok_or_else(|| Error::MissingFrequency { xi: point.xi.clone() })?;
        out.push(meas.values[found]);
    }
    Ok(out)
}

/// Strict reconstruction; errors on any numerical inconsistency.
pub fn reconstruct(
    meas: &MeasurementSet,
    plan: &SamplingPlan,
    bank: &WaveletBank,
    support: &SupportBox,
    tol: &Tolerances,
) -> Result<SparseWaveletSignal> {
    let (signal, _, _) = reconstruct_traced(meas, plan, bank, support, tol, MatchMode::Strict)?;
    Ok(signal)
}

/// Reconstruction with the per-level intermediates and diagnostics exposed.
pub fn reconstruct_traced(
    meas: &MeasurementSet,
    plan: &SamplingPlan,
    bank: &WaveletBank,
    support: &SupportBox,
    tol: &Tolerances,
    mode: MatchMode,
) -> Result<(SparseWaveletSignal, Vec<LevelIntermediate>, ReconDiagnostics)> {
    if support.dim() != bank.dim() {
        return Err(Error::Invalid("support box dimension mismatch".into()));
    }
    let levels = plan.s.levels();
    let big_m = bank.scheme.m;
    let r = bank.r;
    let pi = std::f64::consts::PI;
    let mut current = align_measurements(meas, plan)?;
    let original = current.clone();
    let mut signal = SparseWaveletSignal::zero(bank.dim(), r, levels, big_m);
    let mut trace: Vec<LevelIntermediate> = Vec::with_capacity(levels);
    let mut diag = ReconDiagnostics::default();
    let mut a0_samples: Option<Vec<CVec>> = None;

    for j in (0..levels).rev() {
        let level_plan = &plan.levels[j];
        let s_j = plan.s.0[j];
        let mut a_rows: Vec<((i64, usize), CVec)> = Vec::new();
        let mut symbols: Vec<(i64, (CVec, Vec<CVec>))> = Vec::new();
        let mut group_max_condition = 0.0f64;
        let mut unmix_min_sigma = f64::INFINITY;
        // b̂ samples per wavelet index, ordered by γ numerator.
        let mut b_samples: Vec<Vec<CVec>> = vec![Vec::with_capacity(2 * s_j); big_m - 1];
        for &nu in &level_plan.gamma_nus {
            let mut a_cat = CVec::zeros(big_m * r);
            for mp in 0..big_m {
                let group = level_plan
                    .groups
                    .iter()
                    .find(|g| g.gamma_nu == nu && g.m_prime == mp)
                    .ok_or_else(|| Error::Invalid("plan group missing".into()))?;
                let (row, cond) = solve_group(group, bank, &current, tol.rank_tol)?;
                group_max_condition = group_max_condition.max(cond);
                for i in 0..r {
                    a_cat[mp * r + i] = row[i];
                }
                a_rows.push(((nu, mp), row));
            }
            let (a_hat, b_hats, sigma) =
                unmix_masks(j, nu, &a_cat, bank, plan, tol.rank_tol)?;
            unmix_min_sigma = unmix_min_sigma.min(sigma);
            for (mi, b) in b_hats.iter().enumerate() {
                b_samples[mi].push(b.clone());
            }
            symbols.push((nu, (a_hat, b_hats)));
        }
        if j == 0 {
            a0_samples = Some(symbols.iter().map(|(_, (a, _))| a.clone()).collect());
        }

        // Prony per wavelet index on the level's dilated support lattice.
        let direction = {
            let v = bank.scheme.mt_apply(-(j as i32), &plan.h.0);
            v.into_iter().map(|x| pi * x).collect::<Vec<f64>>()
        };
        let candidates = support.dilated_points(&bank.scheme, j as u32);
        let mut prony_residual = 0.0f64;
        let mut gap_warning = false;
        let mut max_phase_mismatch = 0.0f64;
        for m in 1..big_m {
            let input = PronyInput::new(
                b_samples[m - 1].clone(),
                direction.clone(),
                s_j,
                support.clone(),
            )?;
            let out = recover_on_candidates(
                &input,
                &candidates,
                tol.hankel_rank_tol,
                tol.phase_tol,
                tol.amp_tol,
                mode,
            )?;
            prony_residual = prony_residual.max(out.residual);
            gap_warning |= out.gap_warning;
            max_phase_mismatch = max_phase_mismatch.max(out.max_phase_mismatch);
            for (k, amp) in out.locations.into_iter().zip(out.amplitudes) {
                signal.set_b(m, j, k, amp.iter().cloned().collect());
            }
        }
        diag.gap_warnings += gap_warning as usize;
        diag.max_phase_mismatch = diag.max_phase_mismatch.max(max_phase_mismatch);

        // Peel this level's wavelet contribution from every measurement.
        let mut peel_norm = 0.0f64;
        for (idx, point) in plan.omega.iter().enumerate() {
            let arg = bank.scheme.mt_apply(-(j as i32), &point.xi);
            let mut delta = Complex64::new(0.0, 0.0);
            for m in 1..big_m {
                let sym = coeff_symbol(signal.b_map(m, j), r, &arg);
                if sym.iter().any(|c| c.norm() > 0.0) {
                    delta += sym.dot(&bank.psi_hat(m, &arg)?);
                }
            }
            current[idx] -= delta;
            peel_norm += delta.norm_sqr();
        }
        diag.per_level_peel_norm.push(peel_norm.sqrt());

        trace.push(LevelIntermediate {
            level: j,
            a_rows,
            symbols,
            peeled: current.clone(),
            group_max_condition,
            unmix_min_sigma,
            prony_residual,
            gap_warning,
            max_phase_mismatch,
        });
    }

    // Scaling part from the â₀ samples on Γ₀.
    let a0_samples = a0_samples.ok_or_else(|| Error::Invalid("no levels in plan".into()))?;
    let direction: Vec<f64> = plan.h.0.iter().map(|&hv| pi * hv).collect();
    let input = PronyInput::new(a0_samples, direction, plan.s.0[0], support.clone())?;
    let out = recover_on_candidates(
        &input,
        &support.points(),
        tol.hankel_rank_tol,
        tol.phase_tol,
        tol.amp_tol,
        mode,
    )?;
    diag.max_phase_mismatch = diag.max_phase_mismatch.max(out.max_phase_mismatch);
    for (k, amp) in out.locations.into_iter().zip(out.amplitudes) {
        signal.set_a0(k, amp.iter().cloned().collect());
    }

    // Real signals come back with imaginary dust only; drop it when tiny.
    let scale = meas.max_abs().max(1e-300);
    diag.imag_dust = signal.max_imag();
    if diag.imag_dust < 1e-7 * scale.max(1.0) {
        signal.take_real();
    }

    // Final gate: re-measure the assembled signal on Ω.
    let mut mismatch = 0.0f64;
    for (point, &orig) in plan.omega.iter().zip(&original) {
        let re = fourier_measure(&signal, bank, &point.xi)?;
        mismatch = mismatch.max((re - orig).norm());
    }
    diag.remeasure_mismatch = mismatch / scale;
    if mode == MatchMode::Strict && diag.remeasure_mismatch > tol.verify_tol {
        return Err(Error::VerifyMismatch {
            mismatch: diag.remeasure_mismatch,
            tol: tol.verify_tol,
            per_level: diag.per_level_peel_norm.clone(),
        });
    }
    Ok((signal, trace, diag))
}
