use std::cmp::Ordering;

use crate::braids::{base_configuration, BraidWord, Configuration};
use crate::error::{Error, Result};
use crate::flow::{path_frames, uniform_grid, IsotopySpec, Point};
use crate::scalar::{angle_turns, wrap_turns, Real};

/// Minimal strand separation along the loop.
pub const DELTA_SEP: f64 = 1e-4;
/// Axis rotation per retry of a degenerate projection, in turns.
pub const RETRY_AXIS_TURNS: f64 = 1e-3;
pub const MAX_AXIS_RETRIES: u32 = 8;

const BASE_INTERVALS: usize = 64;
const MAX_PATH_DOUBLINGS: u32 = 10;
/// Midpoint deviation allowed per pair, relative to the pair distance.
const MIDPOINT_RATIO: f64 = 0.2;
const MIN_REL_SPEED: f64 = 1e-12;
const TIE_WINDOW: f64 = 1e-12;

/// Pure braid of the loop `z → x`, `g_t(x)`, `g_1(x) → z`, read off the
/// x-axis projection.
pub fn braid_from_loop<T: Real>(alpha: &IsotopySpec<T>, x: &Configuration<T>) -> Result<BraidWord> {
    braid_from_loop_axis(alpha, x, T::zero())
}

/// As [`braid_from_loop`], projecting onto the axis at angle `axis_turns`.
pub fn braid_from_loop_axis<T: Real>(alpha: &IsotopySpec<T>, x: &Configuration<T>, axis_turns: T) -> Result<BraidWord> {
    let knots = loop_knots(alpha, x)?;
    braid_from_knots(&knots, axis_turns)
}

/// Knots of the piecewise-linear loop; `knots[k][i]` is strand `i` at knot
/// `k`. The first and last knots are the base configuration.
///
/// The flow part is sampled on a uniform grid, doubled until the midpoint of
/// every interval deviates from the chord by at most a fifth of each pair
/// distance, measured on the difference vectors.
pub fn loop_knots<T: Real>(alpha: &IsotopySpec<T>, x: &Configuration<T>) -> Result<Vec<Vec<Point<T>>>> {
    alpha.validate()?;
    let n = x.len();
    let z = base_configuration::<T>(n)?;
    let mut intervals = BASE_INTERVALS * alpha.segment_count().clamp(1, 64);
    for _ in 0..=MAX_PATH_DOUBLINGS {
        let grid = uniform_grid::<T>(2 * intervals);
        let strands = x
            .points
            .iter()
            .map(|&p| path_frames(alpha, p, &grid).map(|fs| fs.into_iter().map(|f| f.point).collect()))
            .collect::<Result<Vec<Vec<Point<T>>>>>()?;
        if chords_resolve(&strands, intervals) {
            let mut knots = Vec::with_capacity(grid.len() + 2);
            knots.push(z.points.clone());
            for k in 0..grid.len() {
                knots.push(strands.iter().map(|s| s[k]).collect());
            }
            knots.push(z.points);
            return Ok(knots);
        }
        intervals *= 2;
    }
    Err(Error::RefinementLimitExceeded { doublings: MAX_PATH_DOUBLINGS })
}

fn chords_resolve<T: Real>(strands: &[Vec<Point<T>>], intervals: usize) -> bool {
    let ratio = T::lit(MIDPOINT_RATIO);
    let half = T::lit(0.5);
    for m in 0..intervals {
        for i in 0..strands.len() {
            for j in i + 1..strands.len() {
                let d = |k: usize| strands[j][k] - strands[i][k];
                let (d0, dm, d1) = (d(2 * m), d(2 * m + 1), d(2 * m + 2));
                let dev = (dm - (d0 + d1) * half).norm();
                if dev > ratio * d0.norm().min(d1.norm()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Braid of a closed piecewise-linear loop of configurations.
///
/// Checks the exact closest approach of every pair on every segment, then
/// reads crossings off the projection, retrying with a slightly rotated
/// axis when the projection is degenerate.
pub fn braid_from_knots<T: Real>(knots: &[Vec<Point<T>>], axis_turns: T) -> Result<BraidWord> {
    let n = knots.first().map_or(0, |k| k.len());
    if n < 2 || knots.len() < 2 || knots.iter().any(|k| k.len() != n) {
        return Err(Error::InvalidArgument("loop needs at least 2 knots of equal size >= 2".into()));
    }
    check_separation(knots)?;
    for retry in 0..=MAX_AXIS_RETRIES {
        let axis = axis_turns + T::lit(retry as f64 * RETRY_AXIS_TURNS);
        if let Some(letters) = project(knots, axis) {
            return Ok(BraidWord { strands: n, letters }.free_reduce());
        }
    }
    Err(Error::ProjectionDegenerate { retries: MAX_AXIS_RETRIES })
}

fn check_separation<T: Real>(knots: &[Vec<Point<T>>]) -> Result<()> {
    let sep = T::lit(DELTA_SEP);
    let n = knots[0].len();
    for w in knots.windows(2) {
        for i in 0..n {
            for j in i + 1..n {
                let d0 = w[0][j] - w[0][i];
                let d1 = w[1][j] - w[1][i];
                let dist = segment_distance_to_origin(d0, d1);
                if !(dist > sep) {
                    return Err(Error::CollisionDetected { i, j, distance: dist.as_f64() });
                }
            }
        }
    }
    Ok(())
}

fn segment_distance_to_origin<T: Real>(a: Point<T>, b: Point<T>) -> T {
    let e = b - a;
    let len2 = e.norm_sq();
    if len2 == T::zero() {
        return a.norm();
    }
    let s = (-a.dot(e) / len2).max(T::zero()).min(T::one());
    (a + e * s).norm()
}

/// Generic tie-breaking offsets, one per strand: square roots of distinct
/// primes, free of small rational relations.
fn tie_weight(i: usize) -> f64 {
    const PRIMES: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    PRIMES[i % 8].sqrt() + (i / 8) as f64 * std::f64::consts::E
}

struct Event<T> {
    s: T,
    kappa: T,
    a: usize,
    b: usize,
}

/// Letters of the projected loop, or `None` when the projection is
/// degenerate. Exact ties are resolved by shifting strand `i` by `ε w_i`
/// along the axis for an infinitesimal `ε`.
fn project<T: Real>(knots: &[Vec<Point<T>>], axis_turns: T) -> Option<Vec<i32>> {
    let n = knots[0].len();
    let e = Point::polar(T::one(), axis_turns);
    let u = |p: Point<T>| p.x * e.x + p.y * e.y;
    let v = |p: Point<T>| p.y * e.x - p.x * e.y;
    let w: Vec<T> = (0..n).map(|i| T::lit(tie_weight(i))).collect();
    let lex = |du: T, dw: T| {
        if du != T::zero() {
            du > T::zero()
        } else {
            dw > T::zero()
        }
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ua, ub) = (u(knots[0][a]), u(knots[0][b]));
        ua.partial_cmp(&ub).unwrap_or(Ordering::Equal).then(w[a].partial_cmp(&w[b]).unwrap_or(Ordering::Equal))
    });
    let mut pos = vec![0usize; n];
    for (p, &s) in order.iter().enumerate() {
        pos[s] = p;
    }

    let mut letters = Vec::new();
    let window = T::lit(TIE_WINDOW);
    for seg in knots.windows(2) {
        let mut events = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let d0 = u(seg[0][a]) - u(seg[0][b]);
                let d1 = u(seg[1][a]) - u(seg[1][b]);
                let dw = w[a] - w[b];
                if lex(d0, dw) == lex(d1, dw) {
                    continue;
                }
                let rel = d1 - d0;
                if rel.abs() < T::lit(MIN_REL_SPEED) {
                    return None;
                }
                let s = (-d0 / rel).max(T::zero()).min(T::one());
                events.push(Event { s, kappa: -dw / rel, a, b });
            }
        }
        events.sort_by(|x, y| x.s.partial_cmp(&y.s).unwrap_or(Ordering::Equal));
        // Near-simultaneous crossings are ordered by the symbolic offset.
        let mut start = 0;
        while start < events.len() {
            let mut end = start + 1;
            while end < events.len() && events[end].s - events[end - 1].s <= window {
                end += 1;
            }
            let group = &mut events[start..end];
            group.sort_by(|x, y| x.kappa.partial_cmp(&y.kappa).unwrap_or(Ordering::Equal));
            let shares = |x: &Event<T>, y: &Event<T>| x.a == y.a || x.a == y.b || x.b == y.a || x.b == y.b;
            if group.windows(2).any(|g| g[0].kappa == g[1].kappa && shares(&g[0], &g[1])) {
                return None;
            }
            start = end;
        }
        for ev in &events {
            let (pa, pb) = (pos[ev.a], pos[ev.b]);
            if pa.abs_diff(pb) != 1 {
                return None;
            }
            let left = pa.min(pb);
            let (l, r) = (order[left], order[left + 1]);
            let at = |k: usize| v(Point::lerp(seg[0][k], seg[1][k], ev.s));
            let sign = if at(l) < at(r) { 1 } else { -1 };
            letters.push(sign * (left as i32 + 1));
            order.swap(left, left + 1);
            pos[l] = left + 1;
            pos[r] = left;
        }
    }
    Some(letters)
}

/// Winding in turns of `x_j - x_i` along the closed piecewise-linear loop.
pub fn pair_winding<T: Real>(knots: &[Vec<Point<T>>], i: usize, j: usize) -> T {
    let mut total = T::zero();
    for w in knots.windows(2) {
        let d0 = w[0][j] - w[0][i];
        let d1 = w[1][j] - w[1][i];
        total = total + wrap_turns(angle_turns(d1.x, d1.y) - angle_turns(d0.x, d0.y));
    }
    total
}
