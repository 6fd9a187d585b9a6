//! Quasi-morphisms on braid groups: exponent sum, pairwise linking numbers
//! and the closure signature.

mod seifert;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::braids::BraidWord;
use crate::error::{Error, Result};
use crate::qmcore::{Meta, QMValue};

pub use seifert::{seifert_matrix, signature, symmetric_signature, SeifertData};

/// Exponent sum.
pub fn writhe(b: &BraidWord) -> i64 {
    b.letters.iter().map(|l| l.signum() as i64).sum()
}

/// Linking number of strands `i < j` (1-based) of a pure braid: half the
/// signed count of their mutual crossings.
pub fn linking(b: &BraidWord, i: usize, j: usize) -> Result<i64> {
    if !(1 <= i && i < j && j <= b.strands) {
        return Err(Error::InvalidArgument(format!("linking needs 1 <= i < j <= {}, got ({i}, {j})", b.strands)));
    }
    if !b.is_pure() {
        return Err(Error::NotPure);
    }
    let (i, j) = (i - 1, j - 1);
    let mut order: Vec<usize> = (0..b.strands).collect();
    let mut twice = 0i64;
    for &l in &b.letters {
        let p = l.unsigned_abs() as usize;
        let pair = (order[p - 1].min(order[p]), order[p - 1].max(order[p]));
        if pair == (i, j) {
            twice += l.signum() as i64;
        }
        order.swap(p - 1, p);
    }
    Ok(twice / 2)
}

/// Registry of braid quasi-morphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BraidQm {
    Writhe,
    /// Strands `i < j`, 1-based.
    Linking(usize, usize),
    Signature,
}

impl BraidQm {
    pub fn evaluate(&self, b: &BraidWord) -> Result<i64> {
        match *self {
            BraidQm::Writhe => Ok(writhe(b)),
            BraidQm::Linking(i, j) => linking(b, i, j),
            BraidQm::Signature => Ok(signature(b)),
        }
    }

    /// Fewest strands the functional makes sense on.
    pub fn min_strands(&self) -> usize {
        match *self {
            BraidQm::Linking(_, j) => j,
            _ => 2,
        }
    }

    /// Whether the functional is a homomorphism on pure braids.
    pub fn is_homomorphism(&self) -> bool {
        !matches!(self, BraidQm::Signature)
    }
}

impl fmt::Display for BraidQm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BraidQm::Writhe => write!(f, "writhe"),
            BraidQm::Linking(i, j) => write!(f, "linking:{i}:{j}"),
            BraidQm::Signature => write!(f, "signature"),
        }
    }
}

impl FromStr for BraidQm {
    type Err = Error;

    /// `writhe`, `signature`, `linking` (strands 1 and 2) or `linking:i:j`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["writhe"] => Ok(BraidQm::Writhe),
            ["signature"] => Ok(BraidQm::Signature),
            ["linking"] => Ok(BraidQm::Linking(1, 2)),
            ["linking", i, j] => {
                let parse =
                    |t: &str| t.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad strand index {t:?}")));
                let (i, j) = (parse(i)?, parse(j)?);
                if !(1 <= i && i < j) {
                    return Err(Error::InvalidArgument(format!("linking needs 1 <= i < j, got {i}:{j}")));
                }
                Ok(BraidQm::Linking(i, j))
            }
            _ => Err(Error::InvalidArgument(format!("unknown braid quasi-morphism {s:?}"))),
        }
    }
}

/// `qm(b^k)/k` for `k = k_max` with the Cauchy-difference bias estimate.
pub fn homogenize_braid_qm(qm: BraidQm, b: &BraidWord, k_max: u32) -> Result<QMValue<f64>> {
    if k_max == 0 || !k_max.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("k_max must be a power of two, got {k_max}")));
    }
    let at = |k: u32| qm.evaluate(&b.power(k)).map(|v| v as f64 / k as f64);
    let value = at(k_max)?;
    let bias = if k_max == 1 { 0.0 } else { (value - at(k_max / 2)?).abs() };
    let meta = Meta { invariant: qm.to_string(), scenario: b.to_string(), k_max: Some(k_max), ..Meta::default() };
    Ok(QMValue { value, stderr: 0.0, bias_estimate: bias, meta })
}
