//! Built-in verified banks.
//!
//! `alpert1d`: the r = 2 dyadic bank of piecewise-linear Alpert functions
//!     φ₁ = χ_{[0,1)},  φ₂ = 2√3 (t − ½) χ_{[0,1)},
//!     ψ₁ = (6t−1) χ_{[0,½)} + (6t−5) χ_{[½,1)},
//!     ψ₂ = 2√3 (2t−½) χ_{[0,½)} − 2√3 (2t−3/2) χ_{[½,1)}.
//! Its two-tap masks solve the refinement and wavelet relations exactly;
//! `verify_bank` holds at machine precision with σ_min(G) = 1.
//!
//! `haar2d`: the scalar bank for D = [[0,−2],[1,0]] with φ = χ_{[0,1)²}.
//! The wavelet has two published variants (the printed formula mixes its
//! arguments); `t2` is the separable Haar-type wavelet
//!     ψ = χ_{[0,1)}(t₁) (χ_{[0,½)}(t₂) − χ_{[½,1)}(t₂)),
//! which satisfies the mask relations exactly. `verbatim` keeps the printed
//! mixed-argument formula restricted to the unit square; it has no exact
//! masks, so the bank reuses the t2 masks and verification records the
//! mismatch instead of asserting it away.

use serde::{Deserialize, Serialize};

use crate::bank::{WaveletBank, DEFAULT_PRODUCT_DEPTH};
use crate::error::{Error, Result};
use crate::pwpoly::{PiecewisePoly, SeparableFn};
use crate::scheme::DilationScheme;
use crate::trigpoly::TrigMatrixPoly;

pub const SQRT3: f64 = 1.7320508075688772;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankId {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variant: Option<String>,
}

impl BankId {
    pub fn parse(name: &str, variant: Option<&str>) -> BankId {
        BankId {
            name: name.to_string(),
            variant: variant.map(|v| v.to_string()),
        }
    }
}

/// Names and shapes of the built-in banks, for listings.
pub fn builtin_banks() -> Vec<(&'static str, usize, usize, usize, &'static [&'static str])> {
    // (name, r, n, M, variants)
    vec![
        ("alpert1d", 2, 1, 2, &[]),
        ("haar2d", 1, 2, 2, &["t2", "verbatim"]),
    ]
}

pub fn make_bank(id: &BankId) -> Result<WaveletBank> {
    match id.name.as_str() {
        "alpert1d" => {
            if id.variant.is_some() {
                return Err(Error::UnknownBank(format!(
                    "alpert1d has no variants (got {:?})",
                    id.variant
                )));
            }
            alpert1d()
        }
        "haar2d" => haar2d(id.variant.as_deref().unwrap_or("t2")),
        other => Err(Error::UnknownBank(other.to_string())),
    }
}

fn alpert1d() -> Result<WaveletBank> {
    let scheme = DilationScheme::scalar(2)?;
    let s = SQRT3;
    // Two-tap masks: G(ξ) = C0 + C1 e^{−iξ}.
    let g0 = TrigMatrixPoly::from_real_taps(
        2,
        2,
        vec![
            (vec![0], vec![vec![0.5, 0.0], vec![-s / 4.0, 0.25]]),
            (vec![1], vec![vec![0.5, 0.0], vec![s / 4.0, 0.25]]),
        ],
    )?;
    let g1 = TrigMatrixPoly::from_real_taps(
        2,
        2,
        vec![
            (vec![0], vec![vec![0.25, s / 4.0], vec![0.0, 0.5]]),
            (vec![1], vec![vec![-0.25, s / 4.0], vec![0.0, -0.5]]),
        ],
    )?;
    let phi = vec![
        SeparableFn::one_dim(PiecewisePoly::indicator(0.0, 1.0)),
        SeparableFn::one_dim(PiecewisePoly::new(vec![(0.0, 1.0, vec![-s, 2.0 * s])])),
    ];
    let psi = vec![vec![
        SeparableFn::one_dim(PiecewisePoly::new(vec![
            (0.0, 0.5, vec![-1.0, 6.0]),
            (0.5, 1.0, vec![-5.0, 6.0]),
        ])),
        SeparableFn::one_dim(PiecewisePoly::new(vec![
            (0.0, 0.5, vec![-s, 4.0 * s]),
            (0.5, 1.0, vec![3.0 * s, -4.0 * s]),
        ])),
    ]];
    WaveletBank {
        id: "alpert1d".into(),
        variant: None,
        scheme,
        r: 2,
        masks: vec![g0, g1],
        phi: Some(phi),
        psi: Some(psi),
        product_depth: DEFAULT_PRODUCT_DEPTH,
    }
    .validate()
}

fn haar2d(variant: &str) -> Result<WaveletBank> {
    let scheme = DilationScheme::new(vec![vec![0, -2], vec![1, 0]])?;
    // φ = χ_{[0,1)²} satisfies φ = φ(D·−(−1,0)) + φ(D·−(−2,0)) in L², giving
    // the two-tap masks below (taps at k = (−1,0) and (−2,0)).
    let g0 = TrigMatrixPoly::from_real_taps(
        1,
        1,
        vec![
            (vec![-1, 0], vec![vec![0.5]]),
            (vec![-2, 0], vec![vec![0.5]]),
        ],
    )?;
    let g1 = TrigMatrixPoly::from_real_taps(
        1,
        1,
        vec![
            (vec![-1, 0], vec![vec![0.5]]),
            (vec![-2, 0], vec![vec![-0.5]]),
        ],
    )?;
    let chi01 = || PiecewisePoly::indicator(0.0, 1.0);
    let phi = vec![SeparableFn::product(vec![chi01(), chi01()])];
    let psi_fn = match variant {
        "t2" => SeparableFn::product(vec![
            chi01(),
            PiecewisePoly::new(vec![(0.0, 0.5, vec![1.0]), (0.5, 1.0, vec![-1.0])]),
        ]),
        // The mixed-argument formula χ_{[0,1)}(t₁)(χ_{[0,½)}(t₁) − χ_{[½,1)}(t₂))
        // is not integrable on ℝ²; this keeps it restricted to the unit square.
        "verbatim" => SeparableFn::sum(vec![
            vec![PiecewisePoly::indicator(0.0, 0.5), chi01()],
            vec![
                PiecewisePoly::new(vec![(0.0, 1.0, vec![-1.0])]),
                PiecewisePoly::indicator(0.5, 1.0),
            ],
        ]),
        other => {
            return Err(Error::UnknownBank(format!(
                "haar2d variant {other} (expected t2 or verbatim)"
            )))
        }
    };
    WaveletBank {
        id: "haar2d".into(),
        variant: Some(variant.to_string()),
        scheme,
        r: 1,
        masks: vec![g0, g1],
        phi: Some(phi),
        psi: Some(vec![vec![psi_fn]]),
        product_depth: DEFAULT_PRODUCT_DEPTH,
    }
    .validate()
}
