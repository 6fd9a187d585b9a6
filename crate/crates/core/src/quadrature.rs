//! Gauss-Legendre rules and the product rule on the unit disk.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::Point;
use crate::scalar::Real;

/// Nodes and weights of a rule.
pub type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss-Legendre nodes and weights on `[0, 1]`, computed in `f64` and
/// cached per order.
pub fn gauss_legendre_unit(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(n).or_insert_with(|| Arc::new(compute_rule(n))).clone()
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // Map [-1, 1] -> [0, 1].
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with an `n`-point Gauss-Legendre rule.
pub fn integrate_interval<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, n: usize) -> T {
    let rule = gauss_legendre_unit(n);
    let (nodes, weights) = (&rule.0, &rule.1);
    let len = b - a;
    nodes.iter().zip(weights).map(|(&s, &w)| T::lit(w) * f(a + len * T::lit(s))).fold(T::zero(), |acc, v| acc + v) * len
}

/// Product rule on the unit disk: Gauss-Legendre in `r²` times a uniform
/// midpoint rule in the angle. Weights sum to the disk area `π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskQuadrature {
    pub nr: usize,
    pub ntheta: usize,
}

impl Default for DiskQuadrature {
    fn default() -> Self {
        DiskQuadrature { nr: 32, ntheta: 128 }
    }
}

impl DiskQuadrature {
    pub fn new(nr: usize, ntheta: usize) -> Result<Self> {
        let q = DiskQuadrature { nr, ntheta };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nr == 0 || self.ntheta == 0 || self.nr * self.ntheta < 16 {
            return Err(Error::InvalidArgument(format!(
                "disk quadrature needs at least 16 nodes, got {}x{}",
                self.nr, self.ntheta
            )));
        }
        Ok(())
    }

    /// The rule with half the nodes in each direction (at least one).
    pub fn halved(&self) -> Self {
        DiskQuadrature { nr: (self.nr / 2).max(1), ntheta: (self.ntheta / 2).max(1) }
    }

    pub fn node_count(&self) -> usize {
        self.nr * self.ntheta
    }

    /// Nodes and weights, radial index major.
    pub fn nodes<T: Real>(&self) -> Vec<(Point<T>, T)> {
        let rule = gauss_legendre_unit(self.nr);
        let (s, w) = (&rule.0, &rule.1);
        let dtheta = 1.0 / self.ntheta as f64;
        let mut out = Vec::with_capacity(self.node_count());
        for (si, wi) in s.iter().zip(w) {
            let r = T::lit(si.sqrt());
            let weight = T::lit(wi * std::f64::consts::PI * dtheta);
            for j in 0..self.ntheta {
                let turns = T::lit((j as f64 + 0.5) * dtheta);
                out.push((Point::polar(r, turns), weight));
            }
        }
        out
    }
}
