//! Recovery of sparse trigonometric polynomials from 2s equispaced samples.
//!
//! Samples arrive on the half-integer progression ν = −s+½, …, s−½ along a
//! phase direction d: w_ν = Σ_k c_k z_k^ν with z_k = e^{−i k·d}. Re-indexing
//! by m = ν + s − ½ absorbs the half-integer shift into the amplitudes, the
//! annihilating filter of the Hankel matrix of w recovers the nodes, each
//! node snaps to the unique lattice point of the support box with matching
//! phase, and one least-squares Vandermonde fit per component restores the
//! amplitudes (built directly from the matched phases, so no fractional
//! powers of the nodes ever appear).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::support::SupportBox;

pub const DEFAULT_HANKEL_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_PHASE_TOL: f64 = 1e-6;
pub const DEFAULT_AMP_TOL: f64 = 1e-10;
const ZERO_SAMPLE_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct PronyInput {
    /// 2s samples, vector-valued (length r), indexed by ν ascending.
    pub samples: Vec<CVec>,
    /// Phase direction d; node of lattice point k is e^{−i k·d}.
    pub direction: Vec<f64>,
    pub sparsity: usize,
    pub support: SupportBox,
}

impl PronyInput {
    pub fn new(samples: Vec<CVec>, direction: Vec<f64>, sparsity: usize, support: SupportBox) -> Result<Self> {
        if sparsity == 0 || samples.len() != 2 * sparsity {
            return Err(Error::Invalid(format!(
                "need exactly 2s samples (s={sparsity}, got {})",
                samples.len()
            )));
        }
        if direction.len() != support.dim() {
            return Err(Error::Invalid("direction and box dimensions differ".into()));
        }
        Ok(PronyInput {
            samples,
            direction,
            sparsity,
            support,
        })
    }

    /// Half-integer indices ν of the samples, ascending.
    pub fn indices(&self) -> Vec<f64> {
        let s = self.sparsity as i64;
        (0..2 * s).map(|q| (-2 * s + 1 + 2 * q) as f64 / 2.0).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PronyOutput {
    /// Recovered lattice locations, sorted lexicographically.
    pub locations: Vec<Vec<i64>>,
    /// Amplitude vectors aligned with locations (length-r each).
    #[serde(skip)]
    pub amplitudes: Vec<CVec>,
    /// Unit-circle nodes e^{−i k·d} of the recovered locations.
    #[serde(skip)]
    pub roots: Vec<Complex64>,
    /// Largest per-component residual of the final Vandermonde fit.
    pub residual: f64,
    /// Set when the Hankel spectral gap was smaller than 10.
    pub gap_warning: bool,
    /// Worst circular distance from an estimated node to its lattice match.
    pub max_phase_mismatch: f64,
}

#[derive(Debug, Clone)]
pub struct NodeEstimate {
    pub nodes: Vec<Complex64>,
    pub gap_warning: bool,
}

/// Node extraction from 2s scalar samples via the annihilating filter.
///
/// The numerical rank of the s×(s+1) Hankel matrix (singular values above
/// τ_rank·σ_max) sets the effective sparsity ŝ; the filter coefficients form
/// the null vector of the (2s−ŝ)×(ŝ+1) Hankel system and the nodes are the
/// companion-matrix roots, projected radially onto the unit circle.
pub fn prony_nodes(w: &[Complex64], s: usize, tau_rank: f64) -> Result<NodeEstimate> {
    if s == 0 || w.len() != 2 * s {
        return Err(Error::Invalid(format!(
            "need exactly 2s samples (s={s}, got {})",
            w.len()
        )));
    }
    if w.iter().all(|c| c.norm() < ZERO_SAMPLE_TOL) {
        return Ok(NodeEstimate {
            nodes: vec![],
            gap_warning: false,
        });
    }
    let hankel = CMat::from_fn(s, s + 1, |i, j| w[i + j]);
    let mut sv = linalg::singular_values(&hankel);
    sv.retain(|v| v.is_finite());
    let smax = sv.first().cloned().unwrap_or(0.0);
    let mut rank = sv.iter().filter(|&&v| v > tau_rank * smax).count();
    rank = rank.min(s);
    if rank == 0 {
        return Ok(NodeEstimate {
            nodes: vec![],
            gap_warning: false,
        });
    }
    let gap_warning = if rank < sv.len() {
        sv[rank - 1] / sv[rank].max(f64::MIN_POSITIVE) < 10.0
    } else {
        false
    };
    // Annihilating filter: Σ_l q_l w_{i+l} = 0 for i = 0..2s−rank−1.
    let rows = 2 * s - rank;
    let system = CMat::from_fn(rows, rank + 1, |i, l| w[i + l]);
    let q = linalg::smallest_right_singular_vector(&system);
    let coeffs: Vec<Complex64> = q.iter().cloned().collect();
    let mut nodes = linalg::polynomial_roots(&coeffs);
    for z in nodes.iter_mut() {
        let norm = z.norm();
        if norm > 0.0 {
            *z /= norm;
        }
    }
    nodes.retain(|z| z.norm() > 0.5);
    // Clustered nodes leave the annihilator badly conditioned, so companion
    // roots alone can be several digits short; a few variable-projection
    // Gauss–Newton steps on the phases restore them to sample precision.
    polish_phases(w, &mut nodes);
    Ok(NodeEstimate { nodes, gap_warning })
}

/// Refine unit-circle node phases by Gauss–Newton on the least-squares fit
/// Σ_k c_k z_k^m ≈ w_m, eliminating the amplitudes at each step.
fn polish_phases(w: &[Complex64], nodes: &mut [Complex64]) {
    let count = nodes.len();
    if count == 0 || w.len() < 2 * count {
        return;
    }
    let m = w.len();
    let mut phases: Vec<f64> = nodes.iter().map(|z| z.arg()).collect();
    let wvec = CVec::from_iterator(m, w.iter().cloned());
    let mut best = (f64::INFINITY, phases.clone());
    for _ in 0..6 {
        let v = CMat::from_fn(m, count, |row, col| {
            Complex64::new(0.0, phases[col] * row as f64).exp()
        });
        let c = linalg::lstsq(&v, &wvec);
        let resid = &v * &c - &wvec;
        let rnorm = resid.norm();
        if rnorm < best.0 {
            best = (rnorm, phases.clone());
        }
        // Real Gauss–Newton step: residual ∂/∂φ_k = i·m·c_k·e^{i φ_k m}.
        let mut a = nalgebra::DMatrix::<f64>::zeros(2 * m, count);
        let mut b = nalgebra::DVector::<f64>::zeros(2 * m);
        for row in 0..m {
            for col in 0..count {
                let d = Complex64::new(0.0, 1.0)
                    * (row as f64)
                    * c[col]
                    * Complex64::new(0.0, phases[col] * row as f64).exp();
                a[(row, col)] = d.re;
                a[(row + m, col)] = d.im;
            }
            b[row] = -resid[row].re;
            b[row + m] = -resid[row].im;
        }
        let svd = a.svd(true, true);
        let delta = match svd.solve(&b, 1e-12) {
            Ok(d) => d,
            Err(_) => break,
        };
        let step: f64 = delta.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (p, d) in phases.iter_mut().zip(delta.iter()) {
            *p += d;
        }
        if step < 1e-15 {
            best = (0.0, phases.clone());
            break;
        }
    }
    // Keep the refined phases only when they did not make the fit worse.
    let v = CMat::from_fn(m, count, |row, col| {
        Complex64::new(0.0, phases[col] * row as f64).exp()
    });
    let c = linalg::lstsq(&v, &wvec);
    let final_resid = (&v * &c - &wvec).norm();
    let chosen = if final_resid <= best.0 { phases } else { best.1 };
    for (z, p) in nodes.iter_mut().zip(chosen) {
        *z = Complex64::new(0.0, p).exp();
    }
}

fn wrap_to_pi(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

fn lattice_phases(direction: &[f64], candidates: &[Vec<i64>]) -> Vec<(Vec<i64>, f64)> {
    candidates
        .iter()
        .map(|k| {
            let dot: f64 = k.iter().zip(direction).map(|(&kk, &d)| kk as f64 * d).sum();
            (k.clone(), -dot)
        })
        .collect()
}

fn best_two(
    node: Complex64,
    candidates: &[(Vec<i64>, f64)],
) -> ((usize, f64), (usize, f64)) {
    let alpha = node.arg();
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = (usize::MAX, f64::INFINITY);
    for (i, (_, theta)) in candidates.iter().enumerate() {
        let dist = wrap_to_pi(alpha - theta).abs();
        if dist < best.1 {
            second = best;
            best = (i, dist);
        } else if dist < second.1 {
            second = (i, dist);
        }
    }
    (best, second)
}

/// Strict lattice matching: the nearest phase must fall within τ_phase and
/// the runner-up must stay beyond 2·τ_phase.
pub fn nodes_to_lattice(
    nodes: &[Complex64],
    direction: &[f64],
    support: &SupportBox,
    tau_phase: f64,
) -> Result<Vec<Vec<i64>>> {
    nodes_to_candidates(nodes, direction, &support.points(), tau_phase)
}

/// Strict matching against an explicit candidate lattice (for per-level
/// dilated supports).
pub fn nodes_to_candidates(
    nodes: &[Complex64],
    direction: &[f64],
    lattice: &[Vec<i64>],
    tau_phase: f64,
) -> Result<Vec<Vec<i64>>> {
    let candidates = lattice_phases(direction, lattice);
    let mut out = Vec::with_capacity(nodes.len());
    for &z in nodes {
        let (best, second) = best_two(z, &candidates);
        if best.1 >= tau_phase {
            return Err(Error::NodeOffLattice {
                phase: z.arg(),
                tol: tau_phase,
                dist: best.1,
                closest: candidates
                    .get(best.0)
                    .map(|(k, _)| k.clone())
                    .unwrap_or_default(),
            });
        }
        if second.1 <= 2.0 * tau_phase {
            return Err(Error::LatticeAmbiguous {
                phase: z.arg(),
                first: candidates[best.0].0.clone(),
                second: candidates[second.0].0.clone(),
            });
        }
        out.push(candidates[best.0].0.clone());
    }
    Ok(out)
}

/// Rounding matcher: always snaps to the phase-nearest lattice point and
/// reports the distances; duplicates are merged by the caller.
pub fn nodes_to_lattice_rounded(
    nodes: &[Complex64],
    direction: &[f64],
    lattice: &[Vec<i64>],
) -> (Vec<Vec<i64>>, f64) {
    let candidates = lattice_phases(direction, lattice);
    let mut out = Vec::with_capacity(nodes.len());
    let mut worst = 0.0f64;
    for &z in nodes {
        let (best, _) = best_two(z, &candidates);
        if best.0 != usize::MAX {
            out.push(candidates[best.0].0.clone());
            worst = worst.max(best.1);
        }
    }
    (out, worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    /// Reject off-lattice or ambiguous nodes (noiseless contract).
    Strict,
    /// Snap every node to the nearest lattice phase (noisy data).
    Rounded,
}

/// Full vector-valued recovery: per-component node extraction, union support,
/// joint least-squares amplitude fit on the union.
pub fn recover_sparse_trig(
    input: &PronyInput,
    tau_rank: f64,
    tau_phase: f64,
    tau_amp: f64,
) -> Result<PronyOutput> {
    recover_with_mode(input, tau_rank, tau_phase, tau_amp, MatchMode::Strict)
}

pub fn recover_with_mode(
    input: &PronyInput,
    tau_rank: f64,
    tau_phase: f64,
    tau_amp: f64,
    mode: MatchMode,
) -> Result<PronyOutput> {
    recover_on_candidates(
        input,
        &input.support.points(),
        tau_rank,
        tau_phase,
        tau_amp,
        mode,
    )
}

/// Recovery against an explicit candidate lattice (per-level dilated boxes).
pub fn recover_on_candidates(
    input: &PronyInput,
    lattice: &[Vec<i64>],
    tau_rank: f64,
    tau_phase: f64,
    tau_amp: f64,
    mode: MatchMode,
) -> Result<PronyOutput> {
    let s = input.sparsity;
    let r = input.samples[0].len();
    let mut union: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
    let mut gap_warning = false;
    let mut max_phase_mismatch = 0.0f64;

    for comp in 0..r {
        let w: Vec<Complex64> = input.samples.iter().map(|v| v[comp]).collect();
        let est = prony_nodes(&w, s, tau_rank)?;
        gap_warning |= est.gap_warning;
        match mode {
            MatchMode::Strict => {
                let ks = nodes_to_candidates(&est.nodes, &input.direction, lattice, tau_phase)?;
                union.extend(ks);
            }
            MatchMode::Rounded => {
                let (ks, worst) =
                    nodes_to_lattice_rounded(&est.nodes, &input.direction, lattice);
                max_phase_mismatch = max_phase_mismatch.max(worst);
                union.extend(ks);
            }
        }
    }
    if mode == MatchMode::Strict && union.len() > s {
        return Err(Error::SparsityExceeded {
            got: union.len(),
            limit: s,
        });
    }
    let locations: Vec<Vec<i64>> = union.into_iter().collect();
    if locations.is_empty() {
        return Ok(PronyOutput {
            locations,
            amplitudes: vec![],
            roots: vec![],
            residual: 0.0,
            gap_warning,
            max_phase_mismatch,
        });
    }

    // Vandermonde fit on the matched support: entry e^{−i (k·d) ν} built from
    // the known phases, with ν the original half-integer indices.
    let indices = input.indices();
    let phases: Vec<f64> = locations
        .iter()
        .map(|k| {
            k.iter()
                .zip(&input.direction)
                .map(|(&kk, &d)| kk as f64 * d)
                .sum::<f64>()
        })
        .collect();
    let vmat = CMat::from_fn(indices.len(), locations.len(), |row, col| {
        Complex64::new(0.0, -phases[col] * indices[row]).exp()
    });
    let mut amplitudes: Vec<CVec> = vec![CVec::zeros(r); locations.len()];
    let mut residual = 0.0f64;
    for comp in 0..r {
        let w = CVec::from_iterator(indices.len(), input.samples.iter().map(|v| v[comp]));
        let coef = linalg::lstsq(&vmat, &w);
        residual = residual.max((&vmat * &coef - &w).norm());
        for (loc, c) in coef.iter().enumerate() {
            amplitudes[loc][comp] = *c;
        }
    }

    // Prune locations whose amplitude vector is below τ_amp.
    let mut kept_locations = Vec::new();
    let mut kept_amplitudes = Vec::new();
    for (k, a) in locations.into_iter().zip(amplitudes) {
        if a.norm() > tau_amp {
            kept_locations.push(k);
            kept_amplitudes.push(a);
        }
    }
    let roots: Vec<Complex64> = kept_locations
        .iter()
        .map(|k| {
            let dot: f64 = k.iter().zip(&input.direction).map(|(&kk, &d)| kk as f64 * d).sum();
            Complex64::new(0.0, -dot).exp()
        })
        .collect();
    Ok(PronyOutput {
        locations: kept_locations,
        amplitudes: kept_amplitudes,
        roots,
        residual,
        gap_warning,
        max_phase_mismatch,
    })
}
