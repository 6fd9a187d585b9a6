//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

pub mod seifert_oracle;

/// Composite Gauss-Legendre (5 points) over `[a, b]` split into `pieces`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    const X: [f64; 5] =
        [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let h = (b - a) / pieces as f64;
    let mut total = 0.0;
    for p in 0..pieces {
        let c = a + (p as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            total += w * f(c + 0.5 * h * x);
        }
    }
    total * 0.5 * h
}

/// A compact bump profile written out independently of the library:
/// `A (1 - (r/s)²)⁴` for `r < s`.
#[derive(Clone, Copy, Debug)]
pub struct Bump {
    pub amp: f64,
    pub support: f64,
}

impl Bump {
    pub fn f(&self, r: f64) -> f64 {
        if r >= self.support {
            0.0
        } else {
            let v = r / self.support;
            self.amp * (1.0 - v * v).powi(4)
        }
    }

    pub fn df(&self, r: f64) -> f64 {
        if r >= self.support {
            0.0
        } else {
            let v = r / self.support;
            -8.0 * self.amp * v * (1.0 - v * v).powi(3) / self.support
        }
    }
}

/// Ruelle value of the twist by `k f`: the angular mean of the first
/// Jacobian column winding at radius `r` is `k f + atan(π r k f')/(2π)`.
pub fn ruelle_twist(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, k: f64) -> f64 {
    integrate(|r| 2.0 * PI * r * (k * f(r) + (PI * r * k * df(r)).atan() / (2.0 * PI)), 0.0, 1.0, 400)
}

/// `∫∫_{D×D} f(max(|x|, |y|))`, the homogenized pairwise linking of a twist.
pub fn twist_pair_linking(f: impl Fn(f64) -> f64 + Copy) -> f64 {
    let inner = |r2: f64| PI * r2 * r2 * f(r2) + integrate(|r1| 2.0 * PI * r1 * f(r1), r2, 1.0, 100);
    integrate(|r2| 2.0 * PI * r2 * inner(r2), 0.0, 1.0, 100)
}

/// `∫_D H ω` for a radial `H`.
pub fn radial_area_integral(h: impl Fn(f64) -> f64) -> f64 {
    integrate(|r| 2.0 * PI * r * h(r), 0.0, 1.0, 400)
}

/// `H(r) = ∫_r^1 2π s f(s) ds`.
pub fn twist_hamiltonian(f: impl Fn(f64) -> f64 + Copy, r: f64) -> f64 {
    integrate(|s| 2.0 * PI * s * f(s), r, 1.0, 200)
}

/// Unwound winding in turns of a sampled planar vector path.
pub fn unwind(vectors: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for w in vectors.windows(2) {
        let a0 = w[0].1.atan2(w[0].0);
        let a1 = w[1].1.atan2(w[1].0);
        let mut d = (a1 - a0) / (2.0 * PI);
        d -= d.round();
        total += d;
    }
    total
}

/// A spread of built-in specs covering every leaf kind and combinator.
pub fn builtin_specs() -> Vec<(&'static str, sympd::IsotopySpec64)> {
    use sympd::{HamiltonianFamily, IsotopySpec, TwistProfile};
    let twist = IsotopySpec::twist(TwistProfile::compact(0.7, 0.8));
    let btwist = IsotopySpec::twist(TwistProfile::boundary_rotating(0.3, 0.4));
    let radial = IsotopySpec::hamiltonian(HamiltonianFamily::Radial { profile: TwistProfile::compact(0.5, 0.9) }, 1.0);
    let bump = IsotopySpec::hamiltonian(
        HamiltonianFamily::Bump { amplitude: 1.5, cx: 0.2, cy: -0.1, radius: 0.6, modulation: 0.3 },
        0.8,
    );
    let wave = IsotopySpec::hamiltonian(HamiltonianFamily::Wave { a: 1.0, b: 0.3 }, 0.5);
    vec![
        ("rigid", IsotopySpec::rigid(0.37)),
        ("twist", twist.clone()),
        ("btwist", btwist.clone()),
        ("radial", radial),
        ("bump", bump.clone()),
        ("wave", wave.clone()),
        ("product", bump.clone().compose(btwist.clone())),
        ("concat", wave.then_after(twist.clone())),
        ("inverse", bump.inverse()),
        ("power", twist.pow(3)),
    ]
}

/// Signature of a real symmetric matrix from cyclic Jacobi eigenvalues.
pub fn jacobi_signature(m: &[Vec<f64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].powi(2))
            .sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = c * rp[k] - s * rq[k];
                    a[q][k] = s * rp[k] + c * rq[k];
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            if a[i][i] > 1e-9 {
                1
            } else if a[i][i] < -1e-9 {
                -1
            } else {
                0
            }
        })
        .sum()
}
