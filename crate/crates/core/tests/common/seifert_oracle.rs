//! Seifert matrices from an explicit embedding of the closed braid and its
//! Bennequin surface, with entries computed as Gauss linking numbers of
//! piecewise-linear curves.
//!
//! Strand level `k` is the unit circle at height `k`, bounding the disk
//! `D_k`. Letter `j` at angle `φ_j` is a half-twisted band between the rims
//! of `D_i` and `D_{i+1}`, bulging outward along one edge and inward along
//! the other; which edge bulges out is the crossing handedness.

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct V3(pub f64, pub f64, pub f64);

impl V3 {
    fn add(self, o: V3) -> V3 {
        V3(self.0 + o.0, self.1 + o.1, self.2 + o.2)
    }
    fn sub(self, o: V3) -> V3 {
        V3(self.0 - o.0, self.1 - o.1, self.2 - o.2)
    }
    fn scale(self, s: f64) -> V3 {
        V3(self.0 * s, self.1 * s, self.2 * s)
    }
    fn dot(self, o: V3) -> f64 {
        self.0 * o.0 + self.1 * o.1 + self.2 * o.2
    }
    fn cross(self, o: V3) -> V3 {
        V3(self.1 * o.2 - self.2 * o.1, self.2 * o.0 - self.0 * o.2, self.0 * o.1 - self.1 * o.0)
    }
    fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
    fn unit(self) -> V3 {
        self.scale(1.0 / self.norm())
    }
}

fn cyl(r: f64, phi: f64, z: f64) -> V3 {
    V3(r * phi.cos(), r * phi.sin(), z)
}

const BULGE: f64 = 0.15;
const INNER: f64 = 0.6;
const PUSH: f64 = 0.02;
const BAND_STEPS: usize = 64;
const ARC_STEP: f64 = 0.03;

/// Embedded Bennequin surface of the closure of a braid word.
pub struct Surface {
    letters: Vec<i32>,
    /// `+1` or `-1`: whether positive letters bulge their rising edge
    /// outward.
    handedness: f64,
    delta: f64,
}

impl Surface {
    fn with_handedness(letters: &[i32], handedness: f64) -> Self {
        let l = letters.len().max(1) as f64;
        Surface { letters: letters.to_vec(), handedness, delta: (0.5 * PI / l).min(0.3) }
    }

    /// Handedness fixed so that positive letters are positive crossings:
    /// the closure of `σ₁²` has linking number `+1`.
    pub fn new(letters: &[i32]) -> Self {
        let hopf = Surface::with_handedness(&[1, 1], 1.0);
        let comps = hopf.boundary_components();
        let lk = gauss_linking(&comps[0], &comps[1]);
        let handedness = if lk > 0.0 { 1.0 } else { -1.0 };
        Surface::with_handedness(letters, handedness)
    }

    fn angle(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64 + 0.5) / self.letters.len() as f64
    }

    fn level(&self, j: usize) -> f64 {
        self.letters[j].unsigned_abs() as f64
    }

    /// Outward bulge sign of the rising edge of band `j`.
    fn bulge(&self, j: usize) -> f64 {
        self.handedness * self.letters[j].signum() as f64
    }

    /// Rising edge `A(u)`: from the rim of the lower disk at `φ - δ` to the
    /// rim of the upper disk at `φ + δ`.
    fn rising(&self, j: usize, u: f64) -> V3 {
        let b = self.bulge(j) * BULGE * (PI * u).sin();
        cyl(1.0 + b, self.angle(j) - self.delta + 2.0 * self.delta * u, self.level(j) + u)
    }

    /// Falling edge `B(u)`: from the lower rim at `φ + δ` to the upper rim
    /// at `φ - δ`, bulging opposite to the rising edge.
    fn falling(&self, j: usize, u: f64) -> V3 {
        let b = self.bulge(j) * BULGE * (PI * u).sin();
        cyl(1.0 - b, self.angle(j) + self.delta - 2.0 * self.delta * u, self.level(j) + u)
    }

    fn band(&self, j: usize, u: f64, v: f64) -> V3 {
        self.rising(j, u).scale(1.0 - v).add(self.falling(j, u).scale(v))
    }

    fn band_normal(&self, j: usize, u: f64) -> V3 {
        let e = 1e-6;
        let du = self.band(j, (u + e).min(1.0), 0.5).sub(self.band(j, (u - e).max(0.0), 0.5));
        let dv = self.falling(j, u).sub(self.rising(j, u));
        du.cross(dv).unit()
    }

    /// Boundary of the surface, one closed polygon per link component.
    pub fn boundary_components(&self) -> Vec<Vec<V3>> {
        let n = self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(1) + 1;
        let mut seen = vec![false; n + 1];
        let mut comps = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut poly = Vec::new();
            let mut level = start;
            loop {
                seen[level] = true;
                let mut phi = 0.0;
                for j in 0..self.letters.len() {
                    let i = self.letters[j].unsigned_abs() as usize;
                    if level != i && level != i + 1 {
                        continue;
                    }
                    push_arc(&mut poly, 1.0, phi, self.angle(j) - self.delta, level as f64);
                    if level == i {
                        poly.extend((0..=BAND_STEPS).map(|s| self.rising(j, s as f64 / BAND_STEPS as f64)));
                        level = i + 1;
                    } else {
                        poly.extend((0..=BAND_STEPS).rev().map(|s| self.falling(j, s as f64 / BAND_STEPS as f64)));
                        level = i;
                    }
                    phi = self.angle(j) + self.delta;
                }
                push_arc(&mut poly, 1.0, phi, 2.0 * PI, level as f64);
                if level == start {
                    break;
                }
            }
            comps.push(poly);
        }
        comps
    }

    /// Homology basis: letters `j < k` of equal index with none between.
    pub fn loops(&self) -> Vec<(usize, usize)> {
        let x = &self.letters;
        (0..x.len()).filter_map(|j| (j + 1..x.len()).find(|&k| x[k].abs() == x[j].abs()).map(|k| (j, k))).collect()
    }

    /// Loop up band `j`, across the upper disk, down band `k` and back
    /// across the lower disk, with the positive normal at each vertex.
    fn basis_curve(&self, j: usize, k: usize) -> Vec<(V3, V3)> {
        let up = V3(0.0, 0.0, 1.0);
        let lo = self.level(j);
        let hi = lo + 1.0;
        let rim = self.delta.cos();
        let mut pts: Vec<(V3, V3)> = Vec::new();
        let junction = |s: &Self, b: usize, u: f64| (s.band(b, u, 0.5), s.band_normal(b, u).add(up).unit());
        // Up band j.
        pts.push(junction(self, j, 0.0));
        for s in 1..BAND_STEPS {
            let u = s as f64 / BAND_STEPS as f64;
            pts.push((self.band(j, u, 0.5), self.band_normal(j, u)));
        }
        pts.push(junction(self, j, 1.0));
        // Across the upper disk.
        let mut disk = Vec::new();
        disk.push(cyl(0.5 * (rim + INNER), self.angle(j), hi));
        push_arc(&mut disk, INNER, self.angle(j), self.angle(k), hi);
        disk.push(cyl(0.5 * (rim + INNER), self.angle(k), hi));
        pts.extend(disk.into_iter().map(|p| (p, up)));
        // Down band k.
        pts.push(junction(self, k, 1.0));
        for s in (1..BAND_STEPS).rev() {
            let u = s as f64 / BAND_STEPS as f64;
            pts.push((self.band(k, u, 0.5), self.band_normal(k, u)));
        }
        pts.push(junction(self, k, 0.0));
        // Back across the lower disk.
        let mut disk = Vec::new();
        disk.push(cyl(0.5 * (rim + INNER), self.angle(k), lo));
        push_arc(&mut disk, INNER, self.angle(k), self.angle(j), lo);
        disk.push(cyl(0.5 * (rim + INNER), self.angle(j), lo));
        pts.extend(disk.into_iter().map(|p| (p, up)));
        pts
    }

    /// `V[a][b] = lk(a⁺, b)` for the basis loops, as real numbers.
    pub fn seifert_matrix(&self) -> Vec<Vec<f64>> {
        let loops = self.loops();
        let curves: Vec<Vec<(V3, V3)>> = loops.iter().map(|&(j, k)| self.basis_curve(j, k)).collect();
        let plain: Vec<Vec<V3>> = curves.iter().map(|c| c.iter().map(|p| p.0).collect()).collect();
        let pushed: Vec<Vec<V3>> =
            curves.iter().map(|c| c.iter().map(|(p, n)| p.add(n.scale(PUSH))).collect()).collect();
        (0..loops.len()).map(|a| (0..loops.len()).map(|b| gauss_linking(&pushed[a], &plain[b])).collect()).collect()
    }
}

/// Appends an arc at radius `r`, height `z`, from angle `a` to `b`.
fn push_arc(out: &mut Vec<V3>, r: f64, a: f64, b: f64, z: f64) {
    let steps = (((b - a).abs() / ARC_STEP).ceil() as usize).max(1);
    for s in 0..=steps {
        out.push(cyl(r, a + (b - a) * s as f64 / steps as f64, z));
    }
}

/// Linking number of two closed polygons, summing exact segment-pair solid
/// angles.
pub fn gauss_linking(a: &[V3], b: &[V3]) -> f64 {
    let mut total = 0.0;
    for i in 0..a.len() {
        let (p1, p2) = (a[i], a[(i + 1) % a.len()]);
        if p1 == p2 {
            continue;
        }
        for j in 0..b.len() {
            let (p3, p4) = (b[j], b[(j + 1) % b.len()]);
            if p3 == p4 {
                continue;
            }
            total += segment_solid_angle(p1, p2, p3, p4);
        }
    }
    total / (4.0 * PI)
}

fn segment_solid_angle(p1: V3, p2: V3, p3: V3, p4: V3) -> f64 {
    let r13 = p3.sub(p1);
    let r14 = p4.sub(p1);
    let r23 = p3.sub(p2);
    let r24 = p4.sub(p2);
    let face = |a: V3, b: V3| {
        let c = a.cross(b);
        let n = c.norm();
        if n < 1e-300 {
            V3(0.0, 0.0, 0.0)
        } else {
            c.scale(1.0 / n)
        }
    };
    let n1 = face(r13, r14);
    let n2 = face(r14, r24);
    let n3 = face(r24, r23);
    let n4 = face(r23, r13);
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(n1.dot(n2)) + asin(n2.dot(n3)) + asin(n3.dot(n4)) + asin(n4.dot(n1));
    let orient = p4.sub(p3).cross(p2.sub(p1)).dot(r13);
    if orient > 0.0 {
        omega
    } else if orient < 0.0 {
        -omega
    } else {
        0.0
    }
}
