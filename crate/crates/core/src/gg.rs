//! Gambaudo-Ghys quasi-morphisms: averages of a braid quasi-morphism over
//! the configuration space, estimated by Monte Carlo.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braidqm::BraidQm;
use crate::braids::{braid_from_loop, Configuration};
use crate::error::{Error, Result};
use crate::flow::{mix_seed, sample_point, stream_rng, IsotopySpec};
use crate::qmcore::{homogenize, Meta, QMFunctional, QMValue};
use crate::scalar::{pairwise_sum, Real};

/// Rejected draws allowed per sample before giving up on it.
const MAX_ATTEMPTS: u64 = 64;
/// Largest tolerated fraction of rejected draws.
pub const MAX_REJECTION_RATE: f64 = 0.1;

/// Parameters of a Gambaudo-Ghys estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GgConfig {
    pub qm: BraidQm,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub k_max: u32,
}

impl Default for GgConfig {
    fn default() -> Self {
        GgConfig { qm: BraidQm::Writhe, n: 2, samples: 1000, seed: 0, k_max: 1 }
    }
}

impl GgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=8).contains(&self.n) {
            return Err(Error::InvalidArgument(format!("gg.n must be in 2..=8, got {}", self.n)));
        }
        if self.samples < 16 {
            return Err(Error::InvalidArgument(format!("gg.samples must be >= 16, got {}", self.samples)));
        }
        if self.qm.min_strands() > self.n {
            return Err(Error::InvalidArgument(format!(
                "{} needs at least {} strands",
                self.qm,
                self.qm.min_strands()
            )));
        }
        Ok(())
    }
}

/// Draws configuration number `index`, retrying on collisions; returns the
/// integrand and the number of rejected draws.
fn sample_value<T: Real>(cfg: &GgConfig, alpha: &IsotopySpec<T>, index: u64) -> Result<(T, usize)> {
    let stream = mix_seed(cfg.seed, index);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream_rng(stream, attempt);
        let points = (0..cfg.n).map(|_| sample_point::<T, _>(&mut rng)).collect();
        let braid = Configuration::new(points).and_then(|x| braid_from_loop(alpha, &x));
        match braid {
            Ok(b) => return Ok((T::lit(cfg.qm.evaluate(&b)? as f64), attempt as usize)),
            Err(Error::CollisionDetected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ExcessiveRejection { rejected: MAX_ATTEMPTS as usize, draws: MAX_ATTEMPTS as usize })
}

/// `Γ̂_n(qm)(α) = ∫_{X_n} qm(γ(α; x)) dx` over ordered configurations, with
/// `X_n` of volume `πⁿ`.
pub fn gamma_hat<T: Real>(
    qm: BraidQm,
    n: usize,
    alpha: &IsotopySpec<T>,
    samples: usize,
    seed: u64,
) -> Result<QMValue<T>> {
    let cfg = GgConfig { qm, n, samples, seed, k_max: 1 };
    cfg.validate()?;
    alpha.validate()?;
    let draws: Vec<(T, usize)> =
        (0..samples as u64).into_par_iter().map(|i| sample_value(&cfg, alpha, i)).collect::<Result<_>>()?;
    let rejected: usize = draws.iter().map(|d| d.1).sum();
    let total = samples + rejected;
    if rejected as f64 > MAX_REJECTION_RATE * total as f64 {
        return Err(Error::ExcessiveRejection { rejected, draws: total });
    }
    let values: Vec<T> = draws.into_iter().map(|d| d.0).collect();
    let nf = T::from_usize_lossy(samples);
    let mean = pairwise_sum(&values) / nf;
    let sq: Vec<T> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (nf - T::one());
    let volume = T::PI().powi(n as i32);
    let meta = Meta {
        invariant: format!("gg({qm},{n})"),
        scenario: alpha.to_string(),
        seed: Some(seed),
        samples,
        rejected,
        ..Meta::default()
    };
    Ok(QMValue { value: mean * volume, stderr: volume * (var / nf).sqrt(), bias_estimate: T::zero(), meta })
}

/// Homogenization `Γ̃_n` of [`gamma_hat`]; every power uses the same seed.
pub fn gamma_tilde<T: Real>(
    qm: BraidQm,
    n: usize,
    alpha: &IsotopySpec<T>,
    samples: usize,
    seed: u64,
    k_max: u32,
) -> Result<QMValue<T>> {
    let cfg = GgConfig { qm, n, samples, seed, k_max };
    cfg.validate()?;
    homogenize(&QMFunctional::Gg(cfg), alpha, k_max)
}
