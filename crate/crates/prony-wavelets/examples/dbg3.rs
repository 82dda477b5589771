// debug criterion 3 failures
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use prony_wavelets::linalg::CVec;
use prony_wavelets::prony::{recover_sparse_trig, PronyInput};
use prony_wavelets::support::SupportBox;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut err_kinds: std::collections::BTreeMap<String, usize> = Default::default();
    let mut mismatches = 0;
    for trial in 0..500 {
        let n = rng.gen_range(1..=2usize);
        let s = rng.gen_range(1..=8usize);
        let h: Vec<f64> = [2f64.sqrt() / 64.0, 3f64.sqrt() / 64.0][..n].to_vec();
        let support = SupportBox::cube(n, -32, 32).unwrap();
        let mut sites: std::collections::BTreeSet<Vec<i64>> = Default::default();
        while sites.len() < s {
            sites.insert((0..n).map(|_| rng.gen_range(-32..32)).collect());
        }
        let atoms: Vec<(Vec<i64>, Complex64)> = sites.into_iter().map(|k| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (k, Complex64::new(sign * rng.gen_range(0.1..1.0), 0.0))
        }).collect();
        let samples: Vec<CVec> = (0..2 * s).map(|q| {
            let nu = (-(2.0 * s as f64) + 1.0 + 2.0 * q as f64) / 2.0;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in &atoms {
                let dot: f64 = k.iter().zip(&h).map(|(&kk, &hv)| kk as f64 * hv).sum();
                acc += c * Complex64::new(0.0, -dot * nu).exp();
            }
            CVec::from_vec(vec![acc])
        }).collect();
        let input = PronyInput::new(samples, h.clone(), s, support).unwrap();
        match recover_sparse_trig(&input, 1e-8, 1e-6, 1e-10) {
            Ok(out) => {
                let want: Vec<Vec<i64>> = atoms.iter().map(|(k, _)| k.clone()).collect();
                if out.locations != want {
                    mismatches += 1;
                    if mismatches <= 3 {
                        eprintln!("trial {trial} n={n} s={s}: want {want:?} got {:?}", out.locations);
                    }
                }
            }
            Err(e) => {
                let kind = format!("{e}").chars().take(30).collect::<String>();
                *err_kinds.entry(kind).or_default() += 1;
                if err_kinds.values().sum::<usize>() <= 3 {
                    eprintln!("trial {trial} n={n} s={s}: {e}");
                }
            }
        }
    }
    eprintln!("mismatches: {mismatches}, errors: {err_kinds:?}");
}
