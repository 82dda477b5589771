//! Command-line front end.
//!
//! Subcommands cover the full pipeline: `plan` builds the sampling set,
//! `synth` draws a sparse signal, `measure` evaluates (optionally noisy)
//! Fourier measurements, `reconstruct` inverts them, `prony` runs the bare
//! sparse-trigonometric solver, `noise-sweep` estimates support-recovery
//! rates, `export-plot` writes plot-ready CSV and `verify-bank` checks the
//! defining relations of a bank. Every command prints one machine-readable
//! JSON summary line on success. Exit codes: 0 ok, 2 validation error,
//! 3 numerical failure, 64 usage.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bank::{verification_grid, verify_bank, WaveletBank};
use crate::banks::{builtin_banks, make_bank, BankId};
use crate::error::{Error, Result};
use crate::io;
use crate::noise::{add_noise, error_report, reconstruct_robust, NoiseSpec};
use crate::prony::{recover_sparse_trig, PronyInput};
use crate::recon::{reconstruct, Tolerances};
use crate::sampling::{
    build_plan, build_plan_within, validate_shift_box, validate_shift_heuristic, SamplingPlan,
    ShiftVector, SparsityVector,
};
use crate::signal::{
    eval_signal_time, fourier_measure, measure_on_plan, random_signal, random_signal_on_supports,
    rel_coeff_error, SparseWaveletSignal,
};
use crate::support::SupportBox;

#[derive(Parser)]
#[command(
    name = "prony-wavelets",
    about = "Sparse multiwavelet signal recovery from deterministic Fourier samples",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TolArgs {
    /// σ_min floor for rank decisions (Λ selection, mask matrix, solves).
    #[arg(long, default_value_t = 1e-6)]
    tau_rank: f64,
    /// Relative Hankel singular-value threshold.
    #[arg(long, default_value_t = 1e-8)]
    tau_hankel: f64,
    /// Node-to-lattice circular distance tolerance (radians).
    #[arg(long, default_value_t = 1e-6)]
    tau_phase: f64,
    /// Amplitude pruning threshold.
    #[arg(long, default_value_t = 1e-10)]
    tau_amp: f64,
    /// Relative re-measurement mismatch allowed after reconstruction.
    #[arg(long, default_value_t = 1e-6)]
    epsilon_verify: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rank_tol: self.tau_rank,
            hankel_rank_tol: self.tau_hankel,
            phase_tol: self.tau_phase,
            amp_tol: self.tau_amp,
            verify_tol: self.epsilon_verify,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in banks.
    Banks,
    /// Build a deterministic sampling plan.
    Plan {
        #[arg(long)]
        bank: String,
        #[arg(long)]
        variant: Option<String>,
        /// Per-level sparsities, e.g. 2,2.
        #[arg(long)]
        sparsity: String,
        /// Shift vector entries, e.g. sqrt2/64 or 0.0220970869 (comma-separated).
        #[arg(long)]
        h: String,
        /// Search radius for full-rank shift selection.
        #[arg(long, default_value_t = 5)]
        radius: i64,
        #[arg(long, default_value_t = 1e-6)]
        tau_rank: f64,
        /// Restrict plan frequencies to those of an existing measurement CSV.
        #[arg(long)]
        within: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a random sparse signal compatible with a plan.
    Synth {
        #[arg(long)]
        plan: PathBuf,
        /// Support box, e.g. 0:16 (cube) or 0:16,0:8.
        #[arg(long, name = "box")]
        support: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Prescribed supports, e.g. "a0:2,4;b1,0:1,5;b1,1:6,12" (random
        /// amplitudes on fixed positions).
        #[arg(long)]
        supports: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure a signal on a plan's frequency set, optionally with noise.
    Measure {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        /// Target SNR in dB (max-ratio definition); omit for noiseless.
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        noise_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a sparse signal from measurements on a plan.
    Reconstruct {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long, name = "box")]
        support: String,
        /// Round node phases to the nearest lattice point instead of
        /// rejecting off-lattice nodes (for noisy data).
        #[arg(long)]
        robust: bool,
        /// Ground-truth signal for support/error reporting.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Where to write the error report (requires --truth).
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a sparse trigonometric polynomial from 2s samples.
    Prony {
        /// CSV with columns re0,im0[,re1,im1,…], one row per sample.
        #[arg(long)]
        samples: PathBuf,
        /// Phase direction entries, e.g. pi*sqrt2/64 (comma-separated).
        #[arg(long)]
        direction: String,
        #[arg(long)]
        sparsity: usize,
        #[arg(long, name = "box")]
        support: String,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo support-recovery rates over an SNR sweep.
    NoiseSweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, name = "box")]
        support: String,
        /// Sweep lo:hi:step in dB, e.g. 20:80:5.
        #[arg(long)]
        snr: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed sparsity pattern (see synth --supports); random when absent.
        #[arg(long)]
        supports: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export plot-ready CSV data.
    ExportPlot {
        /// time | spectrum | measurements
        #[arg(long)]
        what: String,
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        bank: Option<String>,
        #[arg(long)]
        variant: Option<String>,
        #[arg(long)]
        signal: PathBuf,
        /// start:stop:count grid (time or spectrum export).
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a bank's refinement, wavelet, orthogonality and rank relations.
    VerifyBank {
        #[arg(long)]
        bank: String,
        #[arg(long)]
        variant: Option<String>,
        /// Grid points per axis; defaults to 64 in 1-D and 8 per axis in 2-D.
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tau: f64,
        #[arg(long, default_value_t = 1e-6)]
        tau_rank: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by the binary and the CLI tests.
pub fn cli_dispatch<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn bank_from_plan(plan: &SamplingPlan) -> Result<WaveletBank> {
    make_bank(&BankId {
        name: plan.bank_id.clone(),
        variant: plan.bank_variant.clone(),
    })
}

fn run(cmd: Command) -> Result<serde_json::Value> {
    match cmd {
        Command::Banks => {
            let list: Vec<serde_json::Value> = builtin_banks()
                .into_iter()
                .map(|(name, r, n, m, variants)| {
                    json!({"name": name, "r": r, "n": n, "M": m, "variants": variants})
                })
                .collect();
            for b in &list {
                println!(
                    "{:10} r={} n={} M={} variants={}",
                    b["name"].as_str().unwrap(),
                    b["r"],
                    b["n"],
                    b["M"],
                    b["variants"]
                );
            }
            Ok(json!({"cmd": "banks", "banks": list}))
        }
        Command::Plan {
            bank,
            variant,
            sparsity,
            h,
            radius,
            tau_rank,
            within,
            out,
        } => {
            let bank = make_bank(&BankId::parse(&bank, variant.as_deref()))?;
            let s = SparsityVector::new(io::parse_sparsity(&sparsity)?)?;
            let h = ShiftVector::new(io::parse_vector(&h)?)?;
            let heur = validate_shift_heuristic(&h, 64, 1e-9);
            if !heur.pass {
                eprintln!("warning: shift vector fails the collision heuristic ({})", heur.detail);
            }
            let plan = match within {
                None => build_plan(&bank, &s, &h, radius, tau_rank)?,
                Some(path) => {
                    let meas = io::read_measurements(&path)?;
                    build_plan_within(&bank, &s, &h, radius, tau_rank, &meas.frequencies)?
                }
            };
            io::write_plan(&out, &plan)?;
            Ok(json!({
                "cmd": "plan",
                "bank": plan.bank_id,
                "omega": plan.dedup_count(),
                "raw": plan.raw_count,
                "bound": plan.cardinality_bound(),
                "hash": plan.hash,
                "shift_heuristic_pass": heur.pass,
            }))
        }
        Command::Synth {
            plan,
            support,
            seed,
            supports,
            out,
        } => {
            let plan = io::read_plan(&plan)?;
            let bank = bank_from_plan(&plan)?;
            let support = io::parse_box(&support, bank.dim())?;
            let box_check = validate_shift_box(&plan.h, &support);
            if !box_check.pass {
                return Err(Error::Invalid(format!(
                    "shift vector fails the support-box criterion: {}",
                    box_check.detail
                )));
            }
            let signal = match supports {
                None => random_signal(&bank, &plan.s, &support, seed)?,
                Some(spec) => {
                    let (a0, b) =
                        io::parse_supports(&spec, bank.dim(), plan.s.levels(), bank.subbands())?;
                    let sig = random_signal_on_supports(&bank, &a0, &b, seed);
                    sig.check_sparsity(&plan.s)?;
                    sig
                }
            };
            io::write_signal(&out, &signal)?;
            let atoms: usize = signal.a0.len()
                + (0..signal.levels)
                    .map(|j| (1..signal.subbands).map(|m| signal.b_map(m, j).len()).sum::<usize>())
                    .sum::<usize>();
            Ok(json!({"cmd": "synth", "seed": seed, "atoms": atoms}))
        }
        Command::Measure {
            plan,
            signal,
            snr,
            noise_seed,
            out,
        } => {
            let plan = io::read_plan(&plan)?;
            let bank = bank_from_plan(&plan)?;
            let (signal, complex) = io::read_signal(&signal)?;
            let mut meas = measure_on_plan(&signal, &bank, &plan)?;
            let noisy = snr.is_some();
            if let Some(snr_db) = snr {
                meas = add_noise(&meas, &NoiseSpec { snr_db, seed: noise_seed })?;
            }
            io::write_measurements(&out, &meas)?;
            Ok(json!({
                "cmd": "measure",
                "count": meas.values.len(),
                "noisy": noisy,
                "complex_coefficients": complex,
            }))
        }
        Command::Reconstruct {
            plan,
            measurements,
            support,
            robust,
            truth,
            report,
            tol,
            out,
        } => {
            let plan = io::read_plan(&plan)?;
            let bank = bank_from_plan(&plan)?;
            let meas = io::read_measurements(&measurements)?;
            let support = io::parse_box(&support, bank.dim())?;
            let box_check = validate_shift_box(&plan.h, &support);
            if !box_check.pass {
                return Err(Error::Invalid(format!(
                    "shift vector fails the support-box criterion: {}",
                    box_check.detail
                )));
            }
            let tolerances = tol.tolerances();
            let truth_sig: Option<SparseWaveletSignal> = match &truth {
                Some(p) => Some(io::read_signal(p)?.0),
                None => None,
            };
            let (signal, mismatch, support_rows) = if robust {
                let (sig, rep) = reconstruct_robust(
                    &meas,
                    &plan,
                    &bank,
                    &support,
                    &tolerances,
                    truth_sig.as_ref(),
                )?;
                let rows = rep
                    .support_match
                    .as_ref()
                    .map(|m| serde_json::to_value(m).unwrap());
                (sig, rep.diagnostics.remeasure_mismatch, rows)
            } else {
                let sig = reconstruct(&meas, &plan, &bank, &support, &tolerances)?;
                (sig, 0.0, None)
            };
            io::write_signal(&out, &signal)?;
            let mut summary = json!({
                "cmd": "reconstruct",
                "robust": robust,
                "atoms": signal.a0.len()
                    + (0..signal.levels)
                        .map(|j| (1..signal.subbands).map(|m| signal.b_map(m, j).len()).sum::<usize>())
                        .sum::<usize>(),
            });
            if robust {
                summary["remeasure_mismatch"] = json!(mismatch);
            }
            if let Some(rows) = support_rows {
                summary["support_match"] = rows;
            }
            if let (Some(truth_sig), Some(report_path)) = (truth_sig.as_ref(), report) {
                let grid: Vec<Vec<f64>> = if bank.dim() == 1 && bank.has_time_evaluators() {
                    (0..1024).map(|i| vec![i as f64 * (16.0 / 1024.0)]).collect()
                } else {
                    Vec::new()
                };
                let rep = error_report(truth_sig, &signal, &bank, &grid)?;
                let mut f = std::fs::File::create(&report_path)?;
                serde_json::to_writer_pretty(&mut f, &rep)?;
                summary["rel_coeff_error"] = json!(rep.overall_rel_coeff_error);
            } else if let Some(truth_sig) = truth_sig.as_ref() {
                summary["rel_coeff_error"] = json!(rel_coeff_error(truth_sig, &signal));
            }
            Ok(summary)
        }
        Command::Prony {
            samples,
            direction,
            sparsity,
            support,
            tol,
            out,
        } => {
            let direction = io::parse_vector(&direction)?;
            let support = io::parse_box(&support, direction.len())?;
            let rows = read_sample_rows(&samples)?;
            let sample_vecs: Vec<crate::linalg::CVec> = rows
                .iter()
                .map(|r| crate::linalg::CVec::from_vec(r.clone()))
                .collect();
            let input = PronyInput::new(sample_vecs, direction, sparsity, support)?;
            let output = recover_sparse_trig(
                &input,
                tol.tau_hankel,
                tol.tau_phase,
                tol.tau_amp,
            )?;
            let dto = json!({
                "locations": output.locations,
                "amplitudes": output
                    .amplitudes
                    .iter()
                    .map(|a| {
                        json!({
                            "re": a.iter().map(|c| c.re).collect::<Vec<_>>(),
                            "im": a.iter().map(|c| c.im).collect::<Vec<_>>(),
                        })
                    })
                    .collect::<Vec<_>>(),
                "roots": output
                    .roots
                    .iter()
                    .map(|z| json!({"re": z.re, "im": z.im}))
                    .collect::<Vec<_>>(),
                "residual": output.residual,
                "gap_warning": output.gap_warning,
            });
            let mut f = std::fs::File::create(&out)?;
            serde_json::to_writer_pretty(&mut f, &dto)?;
            Ok(json!({
                "cmd": "prony",
                "support_size": output.locations.len(),
                "residual": output.residual,
                "gap_warning": output.gap_warning,
            }))
        }
        Command::NoiseSweep {
            plan,
            support,
            snr,
            trials,
            seed,
            supports,
            out,
        } => {
            let plan = io::read_plan(&plan)?;
            let bank = bank_from_plan(&plan)?;
            let support = io::parse_box(&support, bank.dim())?;
            let snrs = io::parse_sweep(&snr)?;
            let pattern = match supports {
                Some(spec) => Some(io::parse_supports(
                    &spec,
                    bank.dim(),
                    plan.s.levels(),
                    bank.subbands(),
                )?),
                None => None,
            };
            let rows = noise_sweep(&plan, &bank, &support, &snrs, trials, seed, pattern.as_ref())?;
            let mut f = std::fs::File::create(&out)?;
            use std::io::Write as _;
            writeln!(f, "snr_db,trials,support_success_rate,mean_rel_coeff_error,mean_phase_mismatch")?;
            for row in &rows {
                writeln!(
                    f,
                    "{},{},{},{},{}",
                    io::fmt_f64(row.snr_db),
                    row.trials,
                    io::fmt_f64(row.success_rate),
                    io::fmt_f64(row.mean_rel_err),
                    io::fmt_f64(row.mean_phase_mismatch)
                )?;
            }
            Ok(json!({
                "cmd": "noise-sweep",
                "points": rows.len(),
                "trials": trials,
                "rates": rows.iter().map(|r| r.success_rate).collect::<Vec<_>>(),
            }))
        }
        Command::ExportPlot {
            what,
            plan,
            bank,
            variant,
            signal,
            grid,
            out,
        } => {
            let (signal, _) = io::read_signal(&signal)?;
            let bank = match (bank, &plan) {
                (Some(name), _) => make_bank(&BankId::parse(&name, variant.as_deref()))?,
                (None, Some(p)) => bank_from_plan(&io::read_plan(p)?)?,
                (None, None) => {
                    return Err(Error::Invalid("export-plot needs --bank or --plan".into()))
                }
            };
            let mut f = std::fs::File::create(&out)?;
            use std::io::Write as _;
            let rows = match what.as_str() {
                "time" => {
                    if bank.dim() != 1 {
                        return Err(Error::Invalid("time export is one-dimensional".into()));
                    }
                    let grid = io::parse_grid(
                        grid.as_deref()
                            .ok_or_else(|| Error::Invalid("time export needs --grid".into()))?,
                    )?;
                    writeln!(f, "t,f")?;
                    for &t in &grid {
                        let v = eval_signal_time(&signal, &bank, &[t])?;
                        writeln!(f, "{},{}", io::fmt_f64(t), io::fmt_f64(v))?;
                    }
                    grid.len()
                }
                "spectrum" => {
                    if bank.dim() != 1 {
                        return Err(Error::Invalid("spectrum export is one-dimensional".into()));
                    }
                    let grid = io::parse_grid(
                        grid.as_deref()
                            .ok_or_else(|| Error::Invalid("spectrum export needs --grid".into()))?,
                    )?;
                    writeln!(f, "xi,magnitude,re,im")?;
                    for &xi in &grid {
                        let v = fourier_measure(&signal, &bank, &[xi])?;
                        writeln!(
                            f,
                            "{},{},{},{}",
                            io::fmt_f64(xi),
                            io::fmt_f64(v.norm()),
                            io::fmt_f64(v.re),
                            io::fmt_f64(v.im)
                        )?;
                    }
                    grid.len()
                }
                "measurements" => {
                    let plan = io::read_plan(
                        plan.as_ref()
                            .ok_or_else(|| Error::Invalid("measurements export needs --plan".into()))?,
                    )?;
                    let meas = measure_on_plan(&signal, &bank, &plan)?;
                    let n = bank.dim();
                    let mut header: Vec<String> = (1..=n).map(|i| format!("xi_{i}")).collect();
                    header.push("magnitude".into());
                    writeln!(f, "{}", header.join(","))?;
                    for (xi, v) in meas.frequencies.iter().zip(&meas.values) {
                        let mut row: Vec<String> = xi.iter().map(|&x| io::fmt_f64(x)).collect();
                        row.push(io::fmt_f64(v.norm()));
                        writeln!(f, "{}", row.join(","))?;
                    }
                    meas.values.len()
                }
                other => {
                    return Err(Error::Invalid(format!(
                        "unknown export kind {other} (time|spectrum|measurements)"
                    )))
                }
            };
            Ok(json!({"cmd": "export-plot", "what": what, "rows": rows}))
        }
        Command::VerifyBank {
            bank,
            variant,
            grid_points,
            tau,
            tau_rank,
            out,
        } => {
            let bank = make_bank(&BankId::parse(&bank, variant.as_deref()))?;
            let per_axis = grid_points.unwrap_or(if bank.dim() == 1 { 64 } else { 8 });
            let grid = verification_grid(bank.dim(), per_axis);
            let report = verify_bank(&bank, &grid, tau, tau_rank)?;
            if let Some(path) = out {
                let mut f = std::fs::File::create(&path)?;
                serde_json::to_writer_pretty(&mut f, &report)?;
            }
            let summary = json!({
                "cmd": "verify-bank",
                "bank": report.bank,
                "pass": report.pass,
                "max_refinement": report.max_refinement,
                "max_wavelet": report.max_wavelet,
                "max_orthogonality": report.max_orthogonality,
                "min_sigma": report.min_sigma,
            });
            if report.pass {
                Ok(summary)
            } else {
                println!("{summary}");
                Err(Error::NonRefinable(format!(
                    "bank {} fails verification (max residual {:.3e}, min sigma {:.3e})",
                    report.bank,
                    report
                        .max_refinement
                        .max(report.max_wavelet)
                        .max(report.max_orthogonality),
                    report.min_sigma
                )))
            }
        }
    }
}

fn read_sample_rows(path: &Path) -> Result<Vec<Vec<num_complex::Complex64>>> {
    let data = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut header_seen = false;
    for line in data.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        let nums: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad sample row: {e}")))?;
        if nums.len() % 2 != 0 || nums.is_empty() {
            return Err(Error::Parse("sample rows need re,im pairs".into()));
        }
        rows.push(
            nums.chunks(2)
                .map(|p| num_complex::Complex64::new(p[0], p[1]))
                .collect(),
        );
    }
    Ok(rows)
}

pub struct SweepRow {
    pub snr_db: f64,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_rel_err: f64,
    pub mean_phase_mismatch: f64,
}

type SupportPattern = (Vec<Vec<i64>>, Vec<Vec<Vec<Vec<i64>>>>);

/// Monte-Carlo robust-reconstruction sweep; trials run in parallel on a pool
/// sized by PRONY_WAVELETS_THREADS (all cores when unset).
pub fn noise_sweep(
    plan: &SamplingPlan,
    bank: &WaveletBank,
    support: &SupportBox,
    snrs: &[f64],
    trials: usize,
    seed: u64,
    pattern: Option<&SupportPattern>,
) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    let pool = thread_pool()?;
    let tol = Tolerances::default();
    let rows: Result<Vec<SweepRow>> = pool.install(|| {
        snrs.iter()
            .map(|&snr_db| {
                let outcomes: Result<Vec<(bool, f64, f64)>> = (0..trials)
                    .into_par_iter()
                    .map(|trial| {
                        let sig_seed = seed
                            .wrapping_add(trial as u64)
                            .wrapping_mul(0x9e3779b97f4a7c15);
                        let truth = match pattern {
                            Some((a0, b)) => random_signal_on_supports(bank, a0, b, sig_seed),
                            None => random_signal(bank, &plan.s, support, sig_seed)?,
                        };
                        let clean = measure_on_plan(&truth, bank, plan)?;
                        let noisy = add_noise(
                            &clean,
                            &NoiseSpec {
                                snr_db,
                                seed: sig_seed ^ 0x5bf0_3635,
                            },
                        )?;
                        let (got, report) =
                            reconstruct_robust(&noisy, plan, bank, support, &tol, Some(&truth))?;
                        let exact = report
                            .support_match
                            .as_ref()
                            .map(|m| m.iter().all(|x| x.exact))
                            .unwrap_or(false);
                        Ok((
                            exact,
                            rel_coeff_error(&truth, &got),
                            report.max_phase_mismatch,
                        ))
                    })
                    .collect();
                let outcomes = outcomes?;
                let successes = outcomes.iter().filter(|o| o.0).count();
                let mean_rel_err =
                    outcomes.iter().map(|o| o.1).sum::<f64>() / trials.max(1) as f64;
                let mean_phase =
                    outcomes.iter().map(|o| o.2).sum::<f64>() / trials.max(1) as f64;
                Ok(SweepRow {
                    snr_db,
                    trials,
                    success_rate: successes as f64 / trials.max(1) as f64,
                    mean_rel_err,
                    mean_phase_mismatch: mean_phase,
                })
            })
            .collect()
    });
    rows
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PRONY_WAVELETS_THREADS") {
        let threads: usize = v
            .parse()
            .map_err(|_| Error::Invalid(format!("PRONY_WAVELETS_THREADS={v} is not a number")))?;
        builder = builder.num_threads(threads.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}
