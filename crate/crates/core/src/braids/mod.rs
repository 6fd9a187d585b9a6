//! Braid words and extraction of the braid traced by a configuration.

mod extract;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::Point;
use crate::scalar::Real;

pub use extract::{
    braid_from_knots, braid_from_loop, braid_from_loop_axis, loop_knots, pair_winding, DELTA_SEP, MAX_AXIS_RETRIES,
    RETRY_AXIS_TURNS,
};

/// A word in the Artin generators on `strands` strands.
///
/// Letter `±i` stands for `σ_i^{±1}`, `1 ≤ i < strands`; it exchanges the
/// strands in positions `i` and `i + 1` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands < 2 {
            return Err(Error::InvalidArgument(format!("braids need at least 2 strands, got {strands}")));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize >= strands) {
            return Err(Error::InvalidArgument(format!("generator {bad} out of range for {strands} strands")));
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Self {
        BraidWord { strands: strands.max(2), letters: Vec::new() }
    }

    /// `σ_i^{±1}` as a one-letter word.
    pub fn generator(strands: usize, letter: i32) -> Result<Self> {
        BraidWord::new(strands, vec![letter])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `perm[p]` is the (0-based) strand found at position `p` at the end.
    pub fn permutation(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.strands).collect();
        for &l in &self.letters {
            let p = l.unsigned_abs() as usize;
            order.swap(p - 1, p);
        }
        order
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(i, &s)| i == s)
    }

    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord> {
        self.same_strands(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn power(&self, k: u32) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.repeat(k as usize) }
    }

    /// Cancels adjacent `σ_i σ_i⁻¹` pairs until none remain.
    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        BraidWord { strands: self.strands, letters: out }
    }

    fn same_strands(&self, other: &BraidWord) -> Result<()> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch { left: self.strands, right: other.strands });
        }
        Ok(())
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

/// Braid group operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BraidOp {
    Concat,
    Inverse,
    Power(u32),
}

/// Applies a braid operation; `Concat` takes one or more operands.
pub fn braid_op(op: BraidOp, args: &[BraidWord]) -> Result<BraidWord> {
    match (op, args) {
        (BraidOp::Concat, [first, rest @ ..]) => rest.iter().try_fold(first.clone(), |acc, b| acc.concat(b)),
        (BraidOp::Inverse, [b]) => Ok(b.inverse()),
        (BraidOp::Power(k), [b]) => Ok(b.power(k)),
        _ => Err(Error::InvalidArgument(format!("{op:?} does not accept {} operand(s)", args.len()))),
    }
}

/// `n` labelled points of the disk, pairwise more than [`DELTA_SEP`] apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration<T> {
    pub points: Vec<Point<T>>,
}

impl<T: Real> Configuration<T> {
    pub fn new(points: Vec<Point<T>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument("a configuration needs at least 2 points".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.in_disk()) {
            return Err(Error::PointOutsideDisk { x: p.x.as_f64(), y: p.y.as_f64() });
        }
        let c = Configuration { points };
        if let Some((i, j, d)) = c.closest_pair() {
            if !(d > T::lit(DELTA_SEP)) {
                return Err(Error::CollisionDetected { i, j, distance: d.as_f64() });
            }
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closest pair `(i, j, distance)` with `i < j`.
    pub fn closest_pair(&self) -> Option<(usize, usize, T)> {
        let mut best: Option<(usize, usize, T)> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.points[i].distance(self.points[j]);
                if best.is_none_or(|(_, _, b)| d < b) {
                    best = Some((i, j, d));
                }
            }
        }
        best
    }

    pub fn min_separation(&self) -> T {
        self.closest_pair().map_or(T::infinity(), |(_, _, d)| d)
    }
}

/// Base point `z_i = ((2i - n - 1)/(n + 1), 0)`, `i = 1..n`.
pub fn base_configuration<T: Real>(n: usize) -> Result<Configuration<T>> {
    if !(2..=8).contains(&n) {
        return Err(Error::InvalidArgument(format!("strand count must be in 2..=8, got {n}")));
    }
    let points = (1..=n)
        .map(|i| {
            let x = (2.0 * i as f64 - n as f64 - 1.0) / (n as f64 + 1.0);
            Point::new(T::lit(x), T::zero())
        })
        .collect();
    Configuration::new(points)
}
