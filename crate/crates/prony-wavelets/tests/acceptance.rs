//! Acceptance suite: one test per shipping criterion, each printing a single
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prony_wavelets::bank::{verification_grid, verify_bank};
use prony_wavelets::banks::{make_bank, BankId};
use prony_wavelets::cli::noise_sweep;
use prony_wavelets::io::parse_vector;
use prony_wavelets::linalg::CVec;
use prony_wavelets::noise::{add_noise, reconstruct_robust, NoiseSpec};
use prony_wavelets::prony::{recover_sparse_trig, PronyInput};
use prony_wavelets::recon::{reconstruct, Tolerances};
use prony_wavelets::sampling::{
    build_plan, build_plan_within, validate_shift_box, validate_shift_heuristic, ShiftVector,
    SparsityVector,
};
use prony_wavelets::signal::{
    fourier_measure, measure_on_frequencies, measure_on_plan, random_signal,
    random_signal_on_supports, rel_coeff_error, SparseWaveletSignal,
};
use prony_wavelets::support::SupportBox;
use prony_wavelets::WaveletBank;

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion} {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// The 24-point reference sampling set: −(√2/128)nπ + 2kπ for n = ±1, ±3 and
/// k ∈ {0, ±1, ±2, 4}.
fn reference_set_1d() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &n in &[1i64, -1, 3, -3] {
        for &k in &[0i64, 1, -1, 2, -2, 4] {
            out.push(vec![
                -(2f64.sqrt() / 128.0) * n as f64 * PI + 2.0 * PI * k as f64,
            ]);
        }
    }
    out
}

/// The 16-point reference 2-D set: ((√2/64)n + 2k, (√3/64)n + 2l)π for
/// n = ±1, ±3 and k, l ∈ {0, 1}.
fn reference_set_2d() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &n in &[1i64, -1, 3, -3] {
        for &k in &[0i64, 1] {
            for &l in &[0i64, 1] {
                out.push(vec![
                    (2f64.sqrt() / 64.0 * n as f64 + 2.0 * k as f64) * PI,
                    (3f64.sqrt() / 64.0 * n as f64 + 2.0 * l as f64) * PI,
                ]);
            }
        }
    }
    out
}

fn reference_signal_1d(bank: &WaveletBank, seed: u64) -> SparseWaveletSignal {
    random_signal_on_supports(
        bank,
        &[vec![2], vec![4]],
        &[vec![vec![vec![1], vec![5]]], vec![vec![vec![6], vec![12]]]],
        seed,
    )
}

fn supports_of(signal: &SparseWaveletSignal) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
    (
        signal.a0.keys().map(|k| k[0]).collect(),
        signal.b_map(1, 0).keys().map(|k| k[0]).collect(),
        signal.b_map(1, 1).keys().map(|k| k[0]).collect(),
    )
}

#[test]
fn criterion_1_reference_1d_exact_recovery() {
    let start = Instant::now();
    let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
    let s = SparsityVector::new(vec![2, 2]).unwrap();
    let h = ShiftVector::new(vec![2f64.sqrt() / 64.0]).unwrap();
    let reference = reference_set_1d();
    let plan = build_plan_within(&bank, &s, &h, 5, 1e-6, &reference).unwrap();
    let truth = reference_signal_1d(&bank, 2026);
    let meas = measure_on_frequencies(&truth, &bank, &reference).unwrap();
    let support = SupportBox::cube(1, 0, 16).unwrap();
    let got = reconstruct(&meas, &plan, &bank, &support, &Tolerances::default()).unwrap();
    let elapsed = start.elapsed();

    let (a0, b0, b1) = supports_of(&got);
    let err = rel_coeff_error(&truth, &got);
    let pass = a0 == vec![2, 4]
        && b0 == vec![1, 5]
        && b1 == vec![6, 12]
        && err < 1e-8
        && elapsed.as_secs_f64() < 1.0;
    verdict(
        1,
        pass,
        &format!(
            "supports a0={a0:?} b(1,0)={b0:?} b(1,1)={b1:?}, rel err {err:.2e}, {:.3}s",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_cardinality_bound() {
    // 50 random (s, h, bank) configurations never exceed 2·M·r·Σ s_j.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut bound_ok = true;
    for trial in 0..50 {
        let (bank, n) = if trial % 2 == 0 {
            (make_bank(&BankId::parse("alpert1d", None)).unwrap(), 1)
        } else {
            (make_bank(&BankId::parse("haar2d", None)).unwrap(), 2)
        };
        let levels = rng.gen_range(1..=3);
        let s =
            SparsityVector::new((0..levels).map(|_| rng.gen_range(1..=4)).collect()).unwrap();
        let h = ShiftVector::new(
            (0..n)
                .map(|i| {
                    let base = [2f64, 3.0, 5.0][i];
                    base.sqrt() / 64.0 * rng.gen_range(0.5..2.0)
                })
                .collect(),
        )
        .unwrap();
        let plan = build_plan(&bank, &s, &h, 5, 1e-6).unwrap();
        if plan.dedup_count() > plan.cardinality_bound() {
            bound_ok = false;
        }
    }

    // Reference configuration: the deduplicated set size against the stated
    // count of 28 (the printed 4×6 set and the greedy shift rule both give 24;
    // asserted as specified).
    let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
    let s = SparsityVector::new(vec![2, 2]).unwrap();
    let h = ShiftVector::new(vec![2f64.sqrt() / 64.0]).unwrap();
    let plan = build_plan(&bank, &s, &h, 5, 1e-6).unwrap();
    let dedup = plan.dedup_count();
    let pass = bound_ok && dedup <= 32 && dedup == 28;
    verdict(
        2,
        pass,
        &format!(
            "bound held on 50/50 random configurations: {bound_ok}; reference config dedup #omega = {dedup} (raw {}, bound {}, required == 28)",
            plan.raw_count,
            plan.cardinality_bound()
        ),
    );
    assert!(bound_ok, "cardinality bound violated");
    assert!(dedup <= 32);
    assert_eq!(
        dedup, 28,
        "deduplicated reference-set cardinality is {dedup}; the sampler's deterministic \
         shift rule yields the 24-point set (matching the reference set's own 4 x 6 layout), \
         so the stated 28 is unattainable"
    );
}

#[test]
fn criterion_3_sparse_trig_recovery_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(1..=2usize);
        let s = rng.gen_range(1..=8usize);
        let h: Vec<f64> = [2f64.sqrt() / 64.0, 3f64.sqrt() / 64.0][..n].to_vec();
        let support = SupportBox::cube(n, -32, 32).unwrap();
        // Distinct supports, amplitudes in ±[0.1, 1].
        let mut sites: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
        while sites.len() < s {
            sites.insert((0..n).map(|_| rng.gen_range(-32..32)).collect());
        }
        let atoms: Vec<(Vec<i64>, Complex64)> = sites
            .into_iter()
            .map(|k| {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                (k, Complex64::new(sign * rng.gen_range(0.1..1.0), 0.0))
            })
            .collect();
        // Samples on Θ_s: P((ν)h) with half-integer ν.
        let samples: Vec<CVec> = (0..2 * s)
            .map(|q| {
                let nu = (-(2.0 * s as f64) + 1.0 + 2.0 * q as f64) / 2.0;
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, c) in &atoms {
                    let dot: f64 = k.iter().zip(&h).map(|(&kk, &hv)| kk as f64 * hv).sum();
                    acc += c * Complex64::new(0.0, -dot * nu).exp();
                }
                CVec::from_vec(vec![acc])
            })
            .collect();
        let input = PronyInput::new(samples, h, s, support).unwrap();
        match recover_sparse_trig(&input, 1e-8, 1e-6, 1e-10) {
            Ok(out) => {
                let want: Vec<Vec<i64>> = atoms.iter().map(|(k, _)| k.clone()).collect();
                if out.locations != want {
                    failures += 1;
                    continue;
                }
                for ((_, c), a) in atoms.iter().zip(&out.amplitudes) {
                    worst = worst.max((a[0] - c).norm());
                }
                if atoms
                    .iter()
                    .zip(&out.amplitudes)
                    .any(|((_, c), a)| (a[0] - c).norm() > 1e-8)
                {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures == 0 && elapsed < 10.0;
    verdict(
        3,
        pass,
        &format!("500 instances, {failures} failures, worst amplitude error {worst:.2e}, {elapsed:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_bank_verification() {
    let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
    let grid = verification_grid(1, 64);
    let report = verify_bank(&bank, &grid, 1e-8, 1e-3).unwrap();
    let pass = report.pass
        && report.max_refinement < 1e-8
        && report.max_wavelet < 1e-8
        && report.max_orthogonality < 1e-8
        && report.min_sigma > 1e-3;
    verdict(
        4,
        pass,
        &format!(
            "refinement {:.2e}, wavelet {:.2e}, orthogonality {:.2e}, sigma_min {:.3}",
            report.max_refinement, report.max_wavelet, report.max_orthogonality, report.min_sigma
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_round_trip_500_signals() {
    let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
    let s = SparsityVector::new(vec![2, 2]).unwrap();
    let h = ShiftVector::new(vec![2f64.sqrt() / 64.0]).unwrap();
    let plan = build_plan(&bank, &s, &h, 5, 1e-6).unwrap();
    let support = SupportBox::cube(1, 0, 16).unwrap();
    let tol = Tolerances::default();
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for seed in 0..500u64 {
        let truth = random_signal(&bank, &s, &support, seed).unwrap();
        let meas = measure_on_plan(&truth, &bank, &plan).unwrap();
        match reconstruct(&meas, &plan, &bank, &support, &tol) {
            Ok(got) => {
                let err = rel_coeff_error(&truth, &got);
                worst = worst.max(err);
                if err > 1e-8 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let pass = failures == 0;
    verdict(
        5,
        pass,
        &format!("500 seeds, {failures} failures, worst relative error {worst:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_noise_experiment() {
    let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
    let s = SparsityVector::new(vec![2, 2]).unwrap();
    let h = ShiftVector::new(vec![2f64.sqrt() / 64.0]).unwrap();
    let reference = reference_set_1d();
    let plan = build_plan_within(&bank, &s, &h, 5, 1e-6, &reference).unwrap();
    let support = SupportBox::cube(1, 0, 16).unwrap();
    let tol = Tolerances::default();

    // Single reference-pattern instance at 50 dB with nearest-integer rounding.
    let truth = reference_signal_1d(&bank, 2026);
    let clean = measure_on_plan(&truth, &bank, &plan).unwrap();
    let noisy = add_noise(&clean, &NoiseSpec { snr_db: 50.0, seed: 7 }).unwrap();
    let (_, report) =
        reconstruct_robust(&noisy, &plan, &bank, &support, &tol, Some(&truth)).unwrap();
    let matches = report.support_match.as_ref().unwrap();
    let single_ok = matches.iter().all(|m| m.exact);

    // Support-recovery rate over the 20–80 dB sweep, 100 seeds per point,
    // same sparsity pattern class.
    let pattern = (
        vec![vec![2i64], vec![4]],
        vec![vec![vec![vec![1i64], vec![5]]], vec![vec![vec![6i64], vec![12]]]],
    );
    let snrs: Vec<f64> = (0..13).map(|i| 20.0 + 5.0 * i as f64).collect();
    let rows = noise_sweep(&plan, &bank, &support, &snrs, 100, 77, Some(&pattern)).unwrap();
    let rates: Vec<f64> = rows.iter().map(|r| r.success_rate).collect();

    // One-sided two-proportion test at 95% confidence: flag a significant
    // decrease between consecutive sweep points.
    let n = 100.0;
    let mut monotone_ok = true;
    for w in rates.windows(2) {
        let (p1, p2) = (w[0], w[1]);
        if p2 >= p1 {
            continue;
        }
        let pooled = (p1 + p2) / 2.0;
        let se = (pooled * (1.0 - pooled) * (2.0 / n)).sqrt();
        if se == 0.0 || (p2 - p1) / se < -1.645 {
            monotone_ok = false;
        }
    }

    // Context beyond the asserted sweep: where rounding starts to succeed.
    let high_snrs = vec![90.0, 100.0, 110.0];
    let high_rows = noise_sweep(&plan, &bank, &support, &high_snrs, 50, 78, Some(&pattern)).unwrap();
    let high: Vec<(f64, f64)> = high_rows.iter().map(|r| (r.snr_db, r.success_rate)).collect();

    let pass = single_ok && monotone_ok;
    verdict(
        6,
        pass,
        &format!(
            "50 dB single instance exact supports: {single_ok} ({:?}); sweep rates 20–80 dB {rates:?} monotone: {monotone_ok}; context rates {high:?}",
            matches
                .iter()
                .map(|m| format!("{} {}/{} (got {})", m.label, m.hits, m.truth_size, m.recovered_size))
                .collect::<Vec<_>>()
        ),
    );
    assert!(
        monotone_ok,
        "support-recovery rate decreased significantly along the SNR sweep: {rates:?}"
    );
    assert!(
        single_ok,
        "nearest-integer rounding did not recover the reference supports at 50 dB; \
         the four-sample node estimates carry ~60x more phase error than the rounding \
         threshold at this noise level (support recovery sets in near 90-110 dB: {high:?})"
    );
}

#[test]
fn criterion_7_reference_2d_round_trip() {
    let s = SparsityVector::new(vec![2]).unwrap();
    let h = ShiftVector::new(vec![2f64.sqrt() / 32.0, 3f64.sqrt() / 32.0]).unwrap();
    let reference = reference_set_2d();
    let support = SupportBox::cube(2, 0, 6).unwrap();
    let a0_sites = vec![vec![1i64, 0], vec![2, 3]];
    let b_sites = vec![vec![vec![vec![2i64, 1], vec![3, 5]]]];

    // Default separable variant: exact round trip required.
    let bank = make_bank(&BankId::parse("haar2d", Some("t2"))).unwrap();
    let plan = build_plan_within(&bank, &s, &h, 5, 1e-6, &reference).unwrap();
    let truth = random_signal_on_supports(&bank, &a0_sites, &b_sites, 909);
    let meas = measure_on_frequencies(&truth, &bank, &reference).unwrap();
    let got = reconstruct(&meas, &plan, &bank, &support, &Tolerances::default()).unwrap();
    let err = rel_coeff_error(&truth, &got);
    let a0_ok = got.a0.keys().cloned().collect::<Vec<_>>() == a0_sites;
    let b_ok = got.b_map(1, 0).keys().cloned().collect::<Vec<_>>() == b_sites[0][0];

    // Mixed-argument variant: recorded without a pass threshold.
    let verbatim = make_bank(&BankId::parse("haar2d", Some("verbatim"))).unwrap();
    let vplan = build_plan_within(&verbatim, &s, &h, 5, 1e-6, &reference).unwrap();
    let vtruth = random_signal_on_supports(&verbatim, &a0_sites, &b_sites, 909);
    let vmeas = measure_on_frequencies(&vtruth, &verbatim, &reference).unwrap();
    let verbatim_outcome =
        match reconstruct(&vmeas, &vplan, &verbatim, &support, &Tolerances::default()) {
            Ok(vgot) => format!("rel err {:.2e}", rel_coeff_error(&vtruth, &vgot)),
            Err(e) => format!("error: {e}"),
        };

    let pass = err < 1e-8 && a0_ok && b_ok;
    verdict(
        7,
        pass,
        &format!(
            "variant t2 rel err {err:.2e}, supports exact: {}; variant verbatim recorded: {verbatim_outcome}",
            a0_ok && b_ok
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_shift_validator() {
    // Boundary of the support-box criterion: equality passes, +1e−9 fails.
    let b = SupportBox::cube(1, 0, 1).unwrap();
    let at_boundary = validate_shift_box(&ShiftVector::new(vec![2.0]).unwrap(), &b);
    let above = validate_shift_box(&ShiftVector::new(vec![2.0 + 1e-9]).unwrap(), &b);
    // Rational shift must fail the collision heuristic.
    let rational = validate_shift_heuristic(&ShiftVector::new(vec![1.0]).unwrap(), 64, 1e-9);
    let irrational = validate_shift_heuristic(
        &ShiftVector::new(parse_vector("sqrt2/64").unwrap()).unwrap(),
        64,
        1e-9,
    );
    let pass = at_boundary.pass && !above.pass && !rational.pass && irrational.pass;
    verdict(
        8,
        pass,
        &format!(
            "boundary pass: {}, boundary+1e-9 fail: {}, rational h=1 fail: {}, sqrt2/64 pass: {}",
            at_boundary.pass, !above.pass, !rational.pass, irrational.pass
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_quadrature_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut worst = 0.0f64;

    let bank = make_bank(&BankId::parse("alpert1d", None)).unwrap();
    let s = SparsityVector::new(vec![2, 2]).unwrap();
    let support = SupportBox::cube(1, 0, 16).unwrap();
    let sig = random_signal(&bank, &s, &support, 5150).unwrap();
    for _ in 0..12 {
        let xi = rng.gen_range(-40.0..40.0);
        let closed = fourier_measure(&sig, &bank, &[xi]).unwrap();
        let quad = common::quadrature_ft_1d(&sig, &bank, xi, 0.0, 17.0);
        worst = worst.max((closed - quad).norm());
    }

    let bank2 = make_bank(&BankId::parse("haar2d", None)).unwrap();
    let s2 = SparsityVector::new(vec![2]).unwrap();
    let support2 = SupportBox::cube(2, 0, 6).unwrap();
    let sig2 = random_signal(&bank2, &s2, &support2, 5151).unwrap();
    for _ in 0..8 {
        let xi = [rng.gen_range(-12.0..12.0), rng.gen_range(-12.0..12.0)];
        let closed = fourier_measure(&sig2, &bank2, &xi).unwrap();
        let quad = common::quadrature_ft_2d(&sig2, &bank2, &xi, 0.0, 7.0);
        worst = worst.max((closed - quad).norm());
    }

    let pass = worst < 1e-7;
    verdict(
        9,
        pass,
        &format!("20 random frequencies, worst |closed-form − quadrature| = {worst:.2e}"),
    );
    assert!(pass);
}
