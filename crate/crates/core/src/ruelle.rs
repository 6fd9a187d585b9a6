//! Winding of the first Jacobian column and the Ruelle invariant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{evaluate_path, uniform_grid, IsotopySpec, Point};
use crate::qmcore::{Meta, QMValue};
use crate::quadrature::DiskQuadrature;
use crate::scalar::{angle_turns, pairwise_sum, wrap_turns, Real};

/// Time intervals per concatenation segment before refinement.
pub const BASE_INTERVALS: usize = 64;
/// Grid doublings attempted before giving up.
pub const MAX_DOUBLINGS: u32 = 12;

/// Unwound angle of the first column of `dg_t(x)`, in turns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleTrace<T> {
    pub x: Point<T>,
    pub winding: T,
    /// Per-interval increments, each below 1/4 turn in absolute value.
    pub increments: Vec<T>,
}

/// Increments of the angle of a sampled nonzero vector path.
pub fn vector_increments<T: Real>(vectors: &[Point<T>]) -> Vec<T> {
    vectors.windows(2).map(|w| wrap_turns(angle_turns(w[1].x, w[1].y) - angle_turns(w[0].x, w[0].y))).collect()
}

/// Total unwound winding of a sampled vector path, in turns.
pub fn vector_winding<T: Real>(vectors: &[Point<T>]) -> T {
    pairwise_sum(&vector_increments(vectors))
}

/// `Ang_α(x)`: variation of the angle of the first column of `dg_t(x)`.
///
/// The time grid is doubled until every increment is below 1/4 turn and
/// the winding agrees with the next coarser admissible grid, which guards
/// against whole turns hiding between samples.
pub fn ang<T: Real>(alpha: &IsotopySpec<T>, x: Point<T>) -> Result<AngleTrace<T>> {
    let quarter = T::lit(0.25);
    let agree = T::lit(1e-9);
    let mut intervals = BASE_INTERVALS * alpha.segment_count().clamp(1, 64);
    let mut coarse: Option<T> = None;
    for _ in 0..=MAX_DOUBLINGS {
        let path = evaluate_path(alpha, x, &uniform_grid::<T>(intervals))?;
        let columns: Vec<Point<T>> = path.jacobians.iter().map(|j| j.first_column()).collect();
        let increments = vector_increments(&columns);
        if increments.iter().all(|d| d.abs() < quarter) {
            let winding = pairwise_sum(&increments);
            if coarse.is_some_and(|c| (c - winding).abs() <= agree * (T::one() + winding.abs())) {
                return Ok(AngleTrace { x, winding, increments });
            }
            coarse = Some(winding);
        } else {
            coarse = None;
        }
        intervals *= 2;
    }
    Err(Error::RefinementLimitExceeded { doublings: MAX_DOUBLINGS })
}

/// `r(α) = ∫_D Ang_α ω` on the given product rule.
///
/// `meta.quad_gap` records the change against the rule with half the nodes
/// in each direction.
pub fn ruelle_raw<T: Real>(alpha: &IsotopySpec<T>, quad: &DiskQuadrature) -> Result<QMValue<T>> {
    quad.validate()?;
    alpha.validate()?;
    let value = integrate(alpha, quad)?;
    let half = quad.halved();
    let gap = if half.validate().is_ok() { Some((value - integrate(alpha, &half)?).abs().as_f64()) } else { None };
    let meta = Meta {
        invariant: "ruelle".into(),
        scenario: alpha.to_string(),
        samples: quad.node_count(),
        quad_gap: gap,
        ..Meta::default()
    };
    Ok(QMValue::exact(value, meta))
}

fn integrate<T: Real>(alpha: &IsotopySpec<T>, quad: &DiskQuadrature) -> Result<T> {
    let terms: Vec<T> =
        quad.nodes::<T>().into_par_iter().map(|(p, w)| ang(alpha, p).map(|a| a.winding * w)).collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}
