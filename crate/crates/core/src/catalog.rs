//! Named states: cat states, the |M4⟩ singlet combination and its
//! post-measurement residuals, and the four-ququart AME state.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::tensor::{PureState, C64};

/// Smallest and largest party count accepted for `CatN`.
pub const CAT_PARTIES: std::ops::RangeInclusive<usize> = 2..=8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogId {
    /// (|00⟩+|11⟩)/√2
    C2,
    /// (|000⟩+|111⟩)/√2
    C3,
    /// (|0…0⟩+|1…1⟩)/√2 on `n` qubits
    CatN(usize),
    /// ½(|0000⟩+|0111⟩+|1001⟩+|1110⟩)
    PsiExample,
    M4,
    M4Bar,
    /// (|10⟩+|01⟩)/√2
    PhiPlus,
    /// (|10⟩−|01⟩)/√2
    PhiMinus,
    Plus,
    Minus,
    /// (|011⟩+ω|101⟩+ω²|110⟩)/√3
    Residual0,
    /// (|100⟩+ω|010⟩+ω²|001⟩)/√3
    Residual1,
    /// Four parties of dimension 4, every pair maximally mixed.
    Ame44,
}

impl CatalogId {
    pub const FIXED: [CatalogId; 12] = [
        CatalogId::C2,
        CatalogId::C3,
        CatalogId::PsiExample,
        CatalogId::M4,
        CatalogId::M4Bar,
        CatalogId::PhiPlus,
        CatalogId::PhiMinus,
        CatalogId::Plus,
        CatalogId::Minus,
        CatalogId::Residual0,
        CatalogId::Residual1,
        CatalogId::Ame44,
    ];
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogId::C2 => write!(f, "C2"),
            CatalogId::C3 => write!(f, "C3"),
            CatalogId::CatN(n) => write!(f, "CAT_N({n})"),
            CatalogId::PsiExample => write!(f, "PSI_EXAMPLE"),
            CatalogId::M4 => write!(f, "M4"),
            CatalogId::M4Bar => write!(f, "M4_BAR"),
            CatalogId::PhiPlus => write!(f, "PHI_PLUS"),
            CatalogId::PhiMinus => write!(f, "PHI_MINUS"),
            CatalogId::Plus => write!(f, "PLUS"),
            CatalogId::Minus => write!(f, "MINUS"),
            CatalogId::Residual0 => write!(f, "RESIDUAL_0"),
            CatalogId::Residual1 => write!(f, "RESIDUAL_1"),
            CatalogId::Ame44 => write!(f, "AME44"),
        }
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    /// Accepts the display names case-insensitively, plus `CAT_N:n`,
    /// `CAT_N=n`, `CATn` and `Cn` for cat states.
    fn from_str(s: &str) -> Result<Self> {
        let tag = s.trim().to_ascii_uppercase();
        let fixed = CatalogId::FIXED.iter().find(|id| id.to_string() == tag);
        if let Some(id) = fixed {
            return Ok(*id);
        }
        let n = tag
            .strip_prefix("CAT_N(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| tag.strip_prefix("CAT_N:"))
            .or_else(|| tag.strip_prefix("CAT_N="))
            .or_else(|| tag.strip_prefix("CAT"))
            .or_else(|| tag.strip_prefix('C'));
        match n.map(str::parse::<usize>) {
            Some(Ok(n)) => Ok(CatalogId::CatN(n)),
            _ => Err(Error::Parse(format!("unknown catalog tag `{s}`"))),
        }
    }
}

/// `ω = e^{2πi/3}`.
pub fn omega() -> C64 {
    C64::new((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin())
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn make(id: CatalogId) -> Result<PureState> {
    let w = omega();
    let w2 = w * w;
    match id {
        CatalogId::C2 => make(CatalogId::CatN(2)),
        CatalogId::C3 => make(CatalogId::CatN(3)),
        CatalogId::CatN(n) => {
            if !CAT_PARTIES.contains(&n) {
                return Err(domain(format!("cat state needs 2..=8 qubits, got {n}")));
            }
            PureState::from_terms(
                vec![2; n],
                &[
                    (re(FRAC_1_SQRT_2), &vec![0; n]),
                    (re(FRAC_1_SQRT_2), &vec![1; n]),
                ],
            )
        }
        CatalogId::PsiExample => PureState::from_terms(
            vec![2; 4],
            &[
                (re(0.5), &[0, 0, 0, 0]),
                (re(0.5), &[0, 1, 1, 1]),
                (re(0.5), &[1, 0, 0, 1]),
                (re(0.5), &[1, 1, 1, 0]),
            ],
        ),
        CatalogId::M4 => {
            let k = 1.0 / 6f64.sqrt();
            PureState::from_terms(
                vec![2; 4],
                &[
                    (re(k), &[0, 0, 1, 1]),
                    (re(k), &[1, 1, 0, 0]),
                    (w * k, &[1, 0, 1, 0]),
                    (w * k, &[0, 1, 0, 1]),
                    (w2 * k, &[1, 0, 0, 1]),
                    (w2 * k, &[0, 1, 1, 0]),
                ],
            )
        }
        CatalogId::M4Bar => Ok(make(CatalogId::M4)?.conjugate()),
        CatalogId::PhiPlus => PureState::from_terms(
            vec![2, 2],
            &[(re(FRAC_1_SQRT_2), &[1, 0]), (re(FRAC_1_SQRT_2), &[0, 1])],
        ),
        CatalogId::PhiMinus => PureState::from_terms(
            vec![2, 2],
            &[(re(FRAC_1_SQRT_2), &[1, 0]), (re(-FRAC_1_SQRT_2), &[0, 1])],
        ),
        CatalogId::Plus => PureState::from_real(vec![2], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        CatalogId::Minus => PureState::from_real(vec![2], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
        CatalogId::Residual0 => {
            let k = 1.0 / 3f64.sqrt();
            PureState::from_terms(
                vec![2; 3],
                &[
                    (re(k), &[0, 1, 1]),
                    (w * k, &[1, 0, 1]),
                    (w2 * k, &[1, 1, 0]),
                ],
            )
        }
        CatalogId::Residual1 => {
            let k = 1.0 / 3f64.sqrt();
            PureState::from_terms(
                vec![2; 3],
                &[
                    (re(k), &[1, 0, 0]),
                    (w * k, &[0, 1, 0]),
                    (w2 * k, &[0, 0, 1]),
                ],
            )
        }
        CatalogId::Ame44 => {
            let mut amps = vec![re(0.0); 256];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            let diagonal = i == j && j == k && k == l;
                            // 1-based labels as in the usual (1,2,3,4) notation
                            if diagonal || even_permutation(&[i + 1, j + 1, k + 1, l + 1]) {
                                amps[((i * 4 + j) * 4 + k) * 4 + l] = re(0.25);
                            }
                        }
                    }
                }
            }
            PureState::new(vec![4; 4], amps)
        }
    }
}

/// True iff `p` is an even permutation of `(1, 2, 3, 4)`.
pub fn even_permutation(p: &[usize; 4]) -> bool {
    let mut sorted = *p;
    sorted.sort_unstable();
    if sorted != [1, 2, 3, 4] {
        return false;
    }
    let inversions = (0..4)
        .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
        .filter(|&(a, b)| p[a] > p[b])
        .count();
    inversions % 2 == 0
}
