//! Deterministic sampling design.
//!
//! Per level j the sampler takes the 2s_j half-integer multiples
//! Γ_j = {(−s_j+½)h, …, (s_j−½)h} of the shift vector h and, for every coset
//! representative p_{m'}, anchors a full-rank shift set Λ at
//! Mt⁻¹η_j(γ,m') = π Mt^{−j−1}γ + 2π Mt⁻¹p_{m'}. The sampled frequencies of
//! the group are π γ + 2π (Mt^j p_{m'} + Mt^{j+1} k), k ∈ Λ, and the plan's
//! Ω is their union, deduplicated exactly on the integer representation
//! (ν, z) of ω = (ν/2)πh + 2πz.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bank::{select_lambda_filtered, LambdaSet, WaveletBank};
use crate::error::{Error, Result};
use crate::scheme::DilationScheme;
use crate::support::SupportBox;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityVector(pub Vec<usize>);

impl SparsityVector {
    pub fn new(s: Vec<usize>) -> Result<Self> {
        if s.is_empty() || s.iter().any(|&v| v == 0) {
            return Err(Error::Invalid("sparsity vector needs J >= 1 and s_j >= 1".into()));
        }
        Ok(SparsityVector(s))
    }

    pub fn levels(&self) -> usize {
        self.0.len()
    }

    pub fn max(&self) -> usize {
        *self.0.iter().max().unwrap()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftVector(pub Vec<f64>);

impl ShiftVector {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() || h.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::Invalid("shift vector entries must be nonzero finite".into()));
        }
        Ok(ShiftVector(h))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Γ_j as explicit vectors, ordered by the half-integer multiplier.
pub fn build_gamma(s_j: usize, h: &ShiftVector) -> Vec<Vec<f64>> {
    gamma_numerators(s_j)
        .into_iter()
        .map(|nu| h.0.iter().map(|&hi| nu as f64 / 2.0 * hi).collect())
        .collect()
}

/// Odd numerators ν with γ = (ν/2)h, ν = −2s_j+1, −2s_j+3, …, 2s_j−1.
pub fn gamma_numerators(s_j: usize) -> Vec<i64> {
    let s = s_j as i64;
    (0..2 * s).map(|q| -2 * s + 1 + 2 * q).collect()
}

/// One sampled frequency, kept in exact integer form: ω = (ν/2)πh + 2πz.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaKey {
    pub nu: i64,
    pub z: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaPoint {
    pub key: OmegaKey,
    pub xi: Vec<f64>,
}

/// One (j, γ, m') sampling group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupPlan {
    pub level: usize,
    /// Odd numerator of γ = (ν/2)h.
    pub gamma_nu: i64,
    pub m_prime: usize,
    /// η_j(γ, m') = π Mt^{−j} γ + 2π p_{m'}.
    pub eta: Vec<f64>,
    /// Λ anchor Mt⁻¹η_j(γ, m').
    pub lambda: LambdaSet,
    /// Indices into the plan's omega list, aligned with lambda.shifts.
    pub freq_idx: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelPlan {
    pub level: usize,
    pub gamma_nus: Vec<i64>,
    pub groups: Vec<GroupPlan>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub bank_id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bank_variant: Option<String>,
    pub scheme: DilationScheme,
    pub r: usize,
    pub s: SparsityVector,
    pub h: ShiftVector,
    pub radius: i64,
    pub tau_rank: f64,
    pub levels: Vec<LevelPlan>,
    pub omega: Vec<OmegaPoint>,
    /// Σ_j 2 s_j M r, the group count before deduplication.
    pub raw_count: usize,
    #[serde(default)]
    pub hash: String,
}

impl SamplingPlan {
    pub fn omega_frequencies(&self) -> Vec<Vec<f64>> {
        self.omega.iter().map(|p| p.xi.clone()).collect()
    }

    pub fn dedup_count(&self) -> usize {
        self.omega.len()
    }

    /// Bound 2 M r (s₀+…+s_{J−1}) on the sampling-set size.
    pub fn cardinality_bound(&self) -> usize {
        2 * self.scheme.m * self.r * self.s.total()
    }

    /// Stable content hash over everything except the hash field itself.
    pub fn compute_hash(&self) -> String {
        let mut clone = self.clone();
        clone.hash = String::new();
        let bytes = serde_json::to_vec(&clone).expect("plan serializes");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn omega_xi(h: &ShiftVector, key: &OmegaKey) -> Vec<f64> {
    h.0.iter()
        .zip(&key.z)
        .map(|(&hi, &zi)| key.nu as f64 / 2.0 * std::f64::consts::PI * hi + 2.0 * std::f64::consts::PI * zi as f64)
        .collect()
}

/// Build the deterministic sampling plan for a bank.
pub fn build_plan(
    bank: &WaveletBank,
    s: &SparsityVector,
    h: &ShiftVector,
    radius: i64,
    tau_rank: f64,
) -> Result<SamplingPlan> {
    build_plan_impl(bank, s, h, radius, tau_rank, None)
}

/// Build a plan whose frequencies all lie in `allowed` (matched to 1e−9,
/// scale-relative). Used to consume externally prescribed sampling sets.
pub fn build_plan_within(
    bank: &WaveletBank,
    s: &SparsityVector,
    h: &ShiftVector,
    radius: i64,
    tau_rank: f64,
    allowed: &[Vec<f64>],
) -> Result<SamplingPlan> {
    build_plan_impl(bank, s, h, radius, tau_rank, Some(allowed))
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(&x, &y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())))
}

fn build_plan_impl(
    bank: &WaveletBank,
    s: &SparsityVector,
    h: &ShiftVector,
    radius: i64,
    tau_rank: f64,
    allowed: Option<&[Vec<f64>]>,
) -> Result<SamplingPlan> {
    let n = bank.dim();
    if h.dim() != n {
        return Err(Error::Invalid(format!(
            "shift vector has dimension {}, bank needs {n}",
            h.dim()
        )));
    }
    let scheme = &bank.scheme;
    let big_m = scheme.m;
    let pi = std::f64::consts::PI;

    let mut omega: Vec<OmegaPoint> = Vec::new();
    let mut levels: Vec<LevelPlan> = Vec::new();

    for (j, &sj) in s.0.iter().enumerate() {
        let gamma_nus = gamma_numerators(sj);
        let mut groups = Vec::new();
        let mt_j = scheme.mt_pow_int(j as u32);
        let mt_j1 = scheme.mt_pow_int(j as u32 + 1);
        for &nu in &gamma_nus {
            let gamma: Vec<f64> = h.0.iter().map(|&hi| nu as f64 / 2.0 * hi).collect();
            for (mp, p) in scheme.cosets.iter().enumerate() {
                // η_j(γ, m') = π Mt^{−j} γ + 2π p_{m'}
                let mtmj_gamma = scheme.mt_apply(-(j as i32), &gamma);
                let eta: Vec<f64> = mtmj_gamma
                    .iter()
                    .zip(p)
                    .map(|(&a, &pv)| pi * a + 2.0 * pi * pv as f64)
                    .collect();
                let anchor = scheme.mt_apply(-1, &eta);
                // Integer offset of a candidate shift k: z = Mt^j p + Mt^{j+1} k.
                let base = DilationScheme::apply_int(&mt_j, p);
                let offset_of = |k: &[i64]| -> Vec<i64> {
                    let mk = DilationScheme::apply_int(&mt_j1, k);
                    base.iter().zip(&mk).map(|(&b, &m)| b + m).collect()
                };
                let lambda = match allowed {
                    None => select_lambda_filtered(bank, &anchor, radius, tau_rank, |_| true)?,
                    Some(set) => select_lambda_filtered(bank, &anchor, radius, tau_rank, |k| {
                        let key = OmegaKey { nu, z: offset_of(k) };
                        let xi = omega_xi(h, &key);
                        set.iter().any(|w| close(w, &xi))
                    })?,
                };
                let mut freq_idx = Vec::with_capacity(lambda.shifts.len());
                for k in &lambda.shifts {
                    let key = OmegaKey { nu, z: offset_of(k) };
                    let idx = match omega.iter().position(|o| o.key == key) {
                        Some(i) => i,
                        None => {
                            let xi = omega_xi(h, &key);
                            omega.push(OmegaPoint { key, xi });
                            omega.len() - 1
                        }
                    };
                    freq_idx.push(idx);
                }
                groups.push(GroupPlan {
                    level: j,
                    gamma_nu: nu,
                    m_prime: mp,
                    eta,
                    lambda,
                    freq_idx,
                });
            }
        }
        levels.push(LevelPlan {
            level: j,
            gamma_nus,
            groups,
        });
    }

    // Deterministic omega order: sort by (ν, z) and remap group indices.
    let mut order: Vec<usize> = (0..omega.len()).collect();
    order.sort_by(|&a, &b| {
        (omega[a].key.nu, &omega[a].key.z).cmp(&(omega[b].key.nu, &omega[b].key.z))
    });
    let mut rank = vec![0usize; omega.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        rank[old_idx] = new_idx;
    }
    let omega: Vec<OmegaPoint> = order.iter().map(|&i| omega[i].clone()).collect();
    for lp in &mut levels {
        for g in &mut lp.groups {
            for idx in &mut g.freq_idx {
                *idx = rank[*idx];
            }
        }
    }

    let raw_count = 2 * big_m * bank.r * s.total();
    let mut plan = SamplingPlan {
        bank_id: bank.id.clone(),
        bank_variant: bank.variant.clone(),
        scheme: scheme.clone(),
        r: bank.r,
        s: s.clone(),
        h: h.clone(),
        radius,
        tau_rank,
        levels,
        omega,
        raw_count,
        hash: String::new(),
    };
    debug_assert!(plan.dedup_count() <= plan.cardinality_bound());
    plan.hash = plan.compute_hash();
    Ok(plan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftMode {
    Heuristic,
    Box,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShiftReport {
    pub mode: ShiftMode,
    pub pass: bool,
    /// Box mode: the product Σ_i (hi_i − lo_i)·h_i. Heuristic: smallest phase gap.
    pub statistic: f64,
    pub detail: String,
}

/// Box criterion: 0 < Σ_i (b_i − a_i) h_i ≤ 2 guarantees distinct node phases
/// for supports inside the box at every level.
pub fn validate_shift_box(h: &ShiftVector, support: &SupportBox) -> ShiftReport {
    let stat: f64 = h
        .0
        .iter()
        .zip(support.lo.iter().zip(&support.hi))
        .map(|(&hv, (&lo, &hi))| (hi - lo) as f64 * hv)
        .sum();
    let pass = stat > 0.0 && stat <= 2.0;
    ShiftReport {
        mode: ShiftMode::Box,
        pass,
        statistic: stat,
        detail: format!("(b-a)·Σh = {stat:.12}"),
    }
}

/// Finite proxy for rational independence: the phases −π k·h mod 2π over
/// ‖k‖∞ ≤ radius must stay pairwise separated by more than tau_phase.
pub fn validate_shift_heuristic(h: &ShiftVector, radius: i64, tau_phase: f64) -> ShiftReport {
    let n = h.dim();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut phases = Vec::new();
    let mut cursor = vec![-radius; n];
    'outer: loop {
        let dot: f64 = cursor.iter().zip(&h.0).map(|(&k, &hv)| k as f64 * hv).sum();
        let mut ph = (-std::f64::consts::PI * dot) % two_pi;
        if ph < 0.0 {
            ph += two_pi;
        }
        phases.push(ph);
        for i in (0..n).rev() {
            cursor[i] += 1;
            if cursor[i] <= radius {
                continue 'outer;
            }
            cursor[i] = -radius;
        }
        break;
    }
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut min_gap = f64::INFINITY;
    for w in phases.windows(2) {
        min_gap = min_gap.min(w[1] - w[0]);
    }
    if let (Some(&first), Some(&last)) = (phases.first(), phases.last()) {
        min_gap = min_gap.min(first + two_pi - last);
    }
    let pass = min_gap > tau_phase;
    ShiftReport {
        mode: ShiftMode::Heuristic,
        pass,
        statistic: min_gap,
        detail: format!("min phase gap {min_gap:.3e} over radius {radius}"),
    }
}

pub const DEFAULT_COLLISION_RADIUS: i64 = 64;
pub const DEFAULT_COLLISION_PHASE_TOL: f64 = 1e-9;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banks::{make_bank, BankId};
    use approx::assert_abs_diff_eq;

    fn sqrt2_64() -> ShiftVector {
        ShiftVector::new(vec![2f64.sqrt() / 64.0]).unwrap()
    }

    #[test]
    fn gamma_progression() {
        let h = ShiftVector::new(vec![0.5]).unwrap();
        let g1 = build_gamma(1, &h);
        assert_eq!(g1, vec![vec![-0.25], vec![0.25]]);
        let g2 = build_gamma(2, &h);
        assert_eq!(
            g2,
            vec![vec![-0.75], vec![-0.25], vec![0.25], vec![0.75]]
        );
    }

    #[test]
    fn plan_1d_respects_cardinality_bound_and_matches_published_set() {
        let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
        let s = SparsityVector::new(vec![2, 2]).unwrap();
        let plan = build_plan(&bank, &s, &sqrt2_64(), 5, 1e-6).unwrap();
        assert_eq!(plan.cardinality_bound(), 32);
        assert!(plan.dedup_count() <= 32);
        // Greedy scan picks shift −1 everywhere here, giving integer offsets
        // {0, ±1, ±2, −4} over the four γ: 24 distinct frequencies.
        assert_eq!(plan.dedup_count(), 24);
        let mut offsets: Vec<i64> = plan.omega.iter().map(|o| o.key.z[0]).collect();
        offsets.sort();
        offsets.dedup();
        assert_eq!(offsets, vec![-4, -2, -1, 0, 1, 2]);
        let nus: std::collections::BTreeSet<i64> = plan.omega.iter().map(|o| o.key.nu).collect();
        assert_eq!(nus.into_iter().collect::<Vec<_>>(), vec![-3, -1, 1, 3]);
    }

    #[test]
    fn plan_is_deterministic() {
        let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
        let s = SparsityVector::new(vec![2, 2]).unwrap();
        let a = build_plan(&bank, &s, &sqrt2_64(), 5, 1e-6).unwrap();
        let b = build_plan(&bank, &s, &sqrt2_64(), 5, 1e-6).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.hash, b.hash);
    }

    #[test]
    fn scalar_bound_instance() {
        // J=1, s=(1) with a scalar bank: at most 2·M·r·1 = 4 points.
        let bank = make_bank(&BankId::parse("haar2d", None)).unwrap();
        let s = SparsityVector::new(vec![1]).unwrap();
        let h = ShiftVector::new(vec![2f64.sqrt() / 64.0, 3f64.sqrt() / 64.0]).unwrap();
        let plan = build_plan(&bank, &s, &h, 5, 1e-6).unwrap();
        assert!(plan.dedup_count() <= 4);
    }

    #[test]
    fn omega_points_lie_on_half_integer_lattice() {
        let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
        let s = SparsityVector::new(vec![2, 2]).unwrap();
        let h = sqrt2_64();
        let plan = build_plan(&bank, &s, &h, 5, 1e-6).unwrap();
        let smax = s.max() as i64;
        for o in &plan.omega {
            assert!(o.key.nu.abs() <= 2 * smax - 1);
            assert_eq!(o.key.nu.rem_euclid(2), 1);
            let expect = o.key.nu as f64 / 2.0 * std::f64::consts::PI * h.0[0]
                + 2.0 * std::f64::consts::PI * o.key.z[0] as f64;
            assert_abs_diff_eq!(o.xi[0], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn box_validation_boundary() {
        let h = ShiftVector::new(vec![2.0]).unwrap();
        let b = SupportBox::cube(1, 0, 1).unwrap();
        assert!(validate_shift_box(&h, &b).pass);
        let h2 = ShiftVector::new(vec![2.0 + 1e-9]).unwrap();
        assert!(!validate_shift_box(&h2, &b).pass);
    }

    #[test]
    fn heuristic_rejects_rational_shift() {
        let h = ShiftVector::new(vec![1.0]).unwrap();
        let rep = validate_shift_heuristic(&h, 64, 1e-9);
        assert!(!rep.pass);
        let good = validate_shift_heuristic(&sqrt2_64(), 64, 1e-9);
        assert!(good.pass);
    }

    #[test]
    fn corollary_box_example() {
        // h = √2/64 with box [0,16): 16·√2/64 ≈ 0.3536 passes.
        let rep = validate_shift_box(&sqrt2_64(), &SupportBox::cube(1, 0, 16).unwrap());
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.statistic, 16.0 * 2f64.sqrt() / 64.0, epsilon = 1e-15);
    }
}
