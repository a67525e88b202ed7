use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{DesignKind, ScenarioConfig};
use super::{design_seed, replicate_seed};
use crate::design::{Dataset, ModelSet, Parametrization};
use crate::error::Result;

/// One simulated data set: `y = X_T β*_T + ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub x: DMatrix<f64>,
    pub support: ModelSet,
    /// Aligned with the sorted support.
    pub beta: Vec<f64>,
    pub noise: DVector<f64>,
    pub y: DVector<f64>,
}

impl Trial {
    pub fn mean(&self) -> DVector<f64> {
        true_mean(&self.x, &self.support, &self.beta)
    }

    pub fn dataset(&self) -> Result<Dataset> {
        Dataset::new(self.x.clone(), self.y.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DesignDraw {
    pub x: DMatrix<f64>,
    pub support: ModelSet,
    pub beta: Vec<f64>,
}

pub(crate) fn true_mean(x: &DMatrix<f64>, support: &ModelSet, beta: &[f64]) -> DVector<f64> {
    let mut mu = DVector::zeros(x.nrows());
    for (j, b) in support.iter().zip(beta) {
        mu.axpy(*b, &x.column(j), 1.0);
    }
    mu
}

fn gaussian(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub(crate) fn draw_design(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> DesignDraw {
    let (n, p, t) = (cfg.n, cfg.p, cfg.t);
    let base = cfg.base_columns();
    let mut x = match cfg.design_kind {
        DesignKind::IidGaussian | DesignKind::DuplicatedSpurious { .. } => {
            let mut x = DMatrix::zeros(n, p);
            x.columns_mut(0, base).copy_from(&gaussian(n, base, rng));
            x
        }
        DesignKind::Ar1 { rho } => {
            let z = gaussian(n, p, rng);
            let w = (1.0 - rho * rho).sqrt();
            let mut x = z.clone();
            for j in 1..p {
                let prev = x.column(j - 1).into_owned();
                x.set_column(j, &(prev * rho + z.column(j) * w));
            }
            x
        }
        DesignKind::Orthogonal => {
            let mut g = gaussian(n, p, rng);
            if cfg.mode == Parametrization::Practical {
                for mut c in g.column_iter_mut() {
                    let m = c.mean();
                    c.add_scalar_mut(-m);
                }
            }
            g.qr().q() * (n as f64).sqrt()
        }
    };
    let mut order: Vec<usize> = (0..base).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(usize, f64)> = order[..t]
        .iter()
        .enumerate()
        .map(|(k, &j)| (j, cfg.beta_pattern.coefficient(k)))
        .collect();
    pairs.sort_by_key(|p| p.0);
    let support = ModelSet::from_indices(pairs.iter().map(|p| p.0));
    if let DesignKind::DuplicatedSpurious { copies } = cfg.design_kind {
        let spurious: Vec<usize> = (0..base).filter(|&j| !support.contains(j)).collect();
        for k in 0..copies {
            let src = x.column(spurious[k % spurious.len()]).into_owned();
            x.set_column(base + k, &src);
        }
    }
    DesignDraw {
        x,
        support,
        beta: pairs.into_iter().map(|p| p.1).collect(),
    }
}

pub(crate) fn draw_noise(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let sd = cfg.sigma2.sqrt();
    DVector::from_fn(cfg.n, |_, _| sd * rng.sample::<f64, _>(StandardNormal))
}

pub(crate) fn fixed_draw(cfg: &ScenarioConfig) -> DesignDraw {
    draw_design(
        cfg,
        &mut ChaCha8Rng::seed_from_u64(design_seed(cfg.master_seed)),
    )
}

/// Replicate `index` of the scenario; a pure function of `(config, index)`.
pub fn generate_trial(cfg: &ScenarioConfig, index: u64) -> Result<Trial> {
    cfg.validate()?;
    let fixed = cfg.fixed_design.then(|| fixed_draw(cfg));
    Ok(trial_from(cfg, fixed.as_ref(), index))
}

pub(crate) fn trial_from(cfg: &ScenarioConfig, fixed: Option<&DesignDraw>, index: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(cfg.master_seed, index));
    let draw = match fixed {
        Some(d) => d.clone(),
        None => draw_design(cfg, &mut rng),
    };
    let noise = draw_noise(cfg, &mut rng);
    let y = true_mean(&draw.x, &draw.support, &draw.beta) + &noise;
    Trial {
        x: draw.x,
        support: draw.support,
        beta: draw.beta,
        noise,
        y,
    }
}
