//! File formats and parsing helpers.
//!
//! Signals are JSON ({J, r, n, m, a0: [{k, v}], b: [{m, j, k, v}]}, with an
//! optional `vi` imaginary part per entry), plans are JSON-serialized as is,
//! measurements are CSV with one frequency column per dimension followed by
//! re and im, written with 17 significant digits so doubles round-trip.
//! Metadata rides in `#`-prefixed comment lines at the top of the CSV.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SamplingPlan;
use crate::signal::{MeasurementSet, SparseWaveletSignal};
use crate::support::SupportBox;

/// 17 significant digits: round-trip safe for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CoeffEntry {
    k: Vec<i64>,
    v: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    vi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WaveletEntry {
    m: usize,
    j: usize,
    k: Vec<i64>,
    v: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    vi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalDto {
    #[serde(rename = "J")]
    pub levels: usize,
    pub r: usize,
    pub n: usize,
    /// Subband count M of the generating scheme.
    pub m: usize,
    a0: Vec<CoeffEntry>,
    b: Vec<WaveletEntry>,
}

fn pack(k: &[i64], v: &[Complex64]) -> (Vec<i64>, Vec<f64>, Option<Vec<f64>>) {
    let re: Vec<f64> = v.iter().map(|c| c.re).collect();
    let im: Vec<f64> = v.iter().map(|c| c.im).collect();
    let vi = if im.iter().any(|&x| x != 0.0) {
        Some(im)
    } else {
        None
    };
    (k.to_vec(), re, vi)
}

fn unpack(v: &[f64], vi: Option<&Vec<f64>>, r: usize) -> Result<(Vec<Complex64>, bool)> {
    if v.len() != r || vi.map_or(false, |x| x.len() != r) {
        return Err(Error::Parse(format!("coefficient vector length != r = {r}")));
    }
    let mut complex = false;
    let out = (0..r)
        .map(|i| {
            let im = vi.map_or(0.0, |x| x[i]);
            complex |= im != 0.0;
            Complex64::new(v[i], im)
        })
        .collect();
    Ok((out, complex))
}

pub fn signal_to_dto(signal: &SparseWaveletSignal) -> SignalDto {
    let a0 = signal
        .a0
        .iter()
        .map(|(k, v)| {
            let (k, v, vi) = pack(k, v);
            CoeffEntry { k, v, vi }
        })
        .collect();
    let mut b = Vec::new();
    for j in 0..signal.levels {
        for m in 1..signal.subbands {
            for (k, v) in signal.b_map(m, j) {
                let (k, v, vi) = pack(k, v);
                b.push(WaveletEntry { m, j, k, v, vi });
            }
        }
    }
    SignalDto {
        levels: signal.levels,
        r: signal.r,
        n: signal.dim,
        m: signal.subbands,
        a0,
        b,
    }
}

/// Returns the signal and whether any coefficient carried an imaginary part
/// (accepted, surfaced to callers for flagging).
pub fn signal_from_dto(dto: &SignalDto) -> Result<(SparseWaveletSignal, bool)> {
    if dto.m < 2 {
        return Err(Error::Parse("subband count m must be >= 2".into()));
    }
    let mut signal = SparseWaveletSignal::zero(dto.n, dto.r, dto.levels, dto.m);
    let mut complex = false;
    for e in &dto.a0 {
        if e.k.len() != dto.n {
            return Err(Error::Parse("a0 lattice point has wrong dimension".into()));
        }
        let (v, c) = unpack(&e.v, e.vi.as_ref(), dto.r)?;
        complex |= c;
        signal.set_a0(e.k.clone(), v);
    }
    for e in &dto.b {
        if e.m == 0 || e.m >= dto.m || e.j >= dto.levels || e.k.len() != dto.n {
            return Err(Error::Parse(format!(
                "wavelet entry (m={}, j={}) out of range",
                e.m, e.j
            )));
        }
        let (v, c) = unpack(&e.v, e.vi.as_ref(), dto.r)?;
        complex |= c;
        signal.set_b(e.m, e.j, e.k.clone(), v);
    }
    Ok((signal, complex))
}

pub fn write_signal(path: &Path, signal: &SparseWaveletSignal) -> Result<()> {
    let dto = signal_to_dto(signal);
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &dto)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_signal(path: &Path) -> Result<(SparseWaveletSignal, bool)> {
    let data = std::fs::read_to_string(path)?;
    let dto: SignalDto = serde_json::from_str(&data)?;
    signal_from_dto(&dto)
}

pub fn write_plan(path: &Path, plan: &SamplingPlan) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, plan)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_plan(path: &Path) -> Result<SamplingPlan> {
    let data = std::fs::read_to_string(path)?;
    let plan: SamplingPlan = serde_json::from_str(&data)?;
    Ok(plan)
}

pub fn write_measurements(path: &Path, m: &MeasurementSet) -> Result<()> {
    let n = m.frequencies.first().map(|f| f.len()).unwrap_or(0);
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "# bank={}", m.bank_id)?;
    if let Some(v) = &m.bank_variant {
        writeln!(f, "# variant={v}")?;
    }
    writeln!(f, "# plan_hash={}", m.plan_hash)?;
    let mut header: Vec<String> = (1..=n).map(|i| format!("xi_{i}")).collect();
    header.push("re".into());
    header.push("im".into());
    writeln!(f, "{}", header.join(","))?;
    for (xi, v) in m.frequencies.iter().zip(&m.values) {
        let mut row: Vec<String> = xi.iter().map(|&x| fmt_f64(x)).collect();
        row.push(fmt_f64(v.re));
        row.push(fmt_f64(v.im));
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_measurements(path: &Path) -> Result<MeasurementSet> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut bank_id = String::new();
    let mut variant = None;
    let mut plan_hash = String::new();
    let mut frequencies = Vec::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("bank=") {
                bank_id = v.to_string();
            } else if let Some(v) = rest.strip_prefix("variant=") {
                variant = Some(v.to_string());
            } else if let Some(v) = rest.strip_prefix("plan_hash=") {
                plan_hash = v.to_string();
            }
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 3 {
            return Err(Error::Parse(format!("measurement row too short: {line}")));
        }
        let nums: Vec<f64> = cells
            .iter()
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad number in measurements: {e}")))?;
        let n = nums.len() - 2;
        frequencies.push(nums[..n].to_vec());
        values.push(Complex64::new(nums[n], nums[n + 1]));
    }
    Ok(MeasurementSet {
        frequencies,
        values,
        bank_id,
        bank_variant: variant,
        plan_hash,
    })
}

/// Shift entries: decimal literals or `sqrtP/Q` tokens (√P / Q), optionally
/// scaled by a leading `pi*`.
pub fn parse_shift_entry(tok: &str) -> Result<f64> {
    let tok = tok.trim();
    let (pi_scale, rest) = match tok.strip_prefix("pi*") {
        Some(r) => (std::f64::consts::PI, r),
        None => (1.0, tok),
    };
    if let Some(rest) = rest.strip_prefix("sqrt") {
        let (p, q) = match rest.split_once('/') {
            Some((p, q)) => (p, Some(q)),
            None => (rest, None),
        };
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad sqrt token: {tok}")))?;
        let q: f64 = match q {
            Some(q) => q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad sqrt token: {tok}")))?,
            None => 1.0,
        };
        if p < 0.0 || q == 0.0 {
            return Err(Error::Parse(format!("bad sqrt token: {tok}")));
        }
        return Ok(pi_scale * p.sqrt() / q);
    }
    rest.parse::<f64>()
        .map(|v| pi_scale * v)
        .map_err(|_| Error::Parse(format!("bad shift entry: {tok}")))
}

pub fn parse_vector(spec: &str) -> Result<Vec<f64>> {
    spec.split(',').map(parse_shift_entry).collect()
}

/// "2,2" → sparsity per level.
pub fn parse_sparsity(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad sparsity entry: {t}")))
        })
        .collect()
}

/// "0:16" (cube) or "0:16,−2:2" (per coordinate).
pub fn parse_box(spec: &str, dim: usize) -> Result<SupportBox> {
    let parts: Vec<&str> = spec.split(',').collect();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in &parts {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad box range: {part}")))?;
        lo.push(
            a.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad box bound: {a}")))?,
        );
        hi.push(
            b.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad box bound: {b}")))?,
        );
    }
    if parts.len() == 1 && dim > 1 {
        lo = vec![lo[0]; dim];
        hi = vec![hi[0]; dim];
    }
    if lo.len() != dim {
        return Err(Error::Parse(format!(
            "box has {} ranges, expected {dim}",
            parts.len()
        )));
    }
    SupportBox::new(lo, hi)
}

/// "start:stop:count" → `count` uniform points on [start, stop].
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad grid spec: {spec}")));
    }
    let start: f64 = parse_shift_entry(parts[0])?;
    let stop: f64 = parse_shift_entry(parts[1])?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid count: {}", parts[2])))?;
    if count < 2 {
        return Err(Error::Parse("grid needs at least two points".into()));
    }
    let step = (stop - start) / (count as f64 - 1.0);
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// "lo:hi:step" inclusive sweep, e.g. 20:80:5.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad sweep spec: {spec}")));
    }
    let lo: f64 = parse_shift_entry(parts[0])?;
    let hi: f64 = parse_shift_entry(parts[1])?;
    let step: f64 = parse_shift_entry(parts[2])?;
    if step <= 0.0 || hi < lo {
        return Err(Error::Parse(format!("bad sweep spec: {spec}")));
    }
    let mut out = Vec::new();
    let mut v = lo;
    while v <= hi + 1e-12 {
        out.push(v);
        v += step;
    }
    Ok(out)
}

/// Support grammar for prescribed sparsity patterns:
/// `a0:2,4;b1,0:1,5;b1,1:6,12` in 1-D, sites as `(k1 k2)` tuples in n-D,
/// e.g. `a0:(1 0),(2 3);b1,0:(2 1),(3 5)`.
pub fn parse_supports(
    spec: &str,
    dim: usize,
    levels: usize,
    subbands: usize,
) -> Result<(Vec<Vec<i64>>, Vec<Vec<Vec<Vec<i64>>>>)> {
    let mut a0 = Vec::new();
    let mut b = vec![vec![Vec::new(); subbands - 1]; levels];
    for group in spec.split(';') {
        let group = group.trim();
        if group.is_empty() {
            continue;
        }
        let (label, sites) = group
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad support group: {group}")))?;
        let parsed = parse_sites(sites, dim)?;
        let label = label.trim();
        if label == "a0" {
            a0 = parsed;
        } else if let Some(rest) = label.strip_prefix('b') {
            let (m, j) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad wavelet label: {label}")))?;
            let m: usize = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad wavelet index: {label}")))?;
            let j: usize = j
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad level index: {label}")))?;
            if m == 0 || m >= subbands || j >= levels {
                return Err(Error::Parse(format!("wavelet label out of range: {label}")));
            }
            b[j][m - 1] = parsed;
        } else {
            return Err(Error::Parse(format!("unknown support label: {label}")));
        }
    }
    Ok((a0, b))
}

fn parse_sites(spec: &str, dim: usize) -> Result<Vec<Vec<i64>>> {
    let spec = spec.trim();
    if dim == 1 {
        return spec
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map(|v| vec![v])
                    .map_err(|_| Error::Parse(format!("bad site: {t}")))
            })
            .collect();
    }
    let mut out = Vec::new();
    for tuple in spec.split("),") {
        let tuple = tuple.trim().trim_start_matches('(').trim_end_matches(')');
        let coords: Vec<i64> = tuple
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad site coordinate: {t}")))
            })
            .collect::<Result<_>>()?;
        if coords.len() != dim {
            return Err(Error::Parse(format!("site has wrong dimension: ({tuple})")));
        }
        out.push(coords);
    }
    Ok(out)
}
