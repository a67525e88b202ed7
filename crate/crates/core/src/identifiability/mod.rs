//! Separation quantities `δ(T‖J)`, `δ(T,s)`, `δ(T)`, restricted eigenvalues,
//! and checks of the inequalities that link them.

mod kappa;

pub use kappa::{
    kappa, kappa_profile, kappa_uniform, sparse_min_eigenvalue, KappaEstimate, DEFAULT_RESTARTS,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::{ModelSet, Parametrization, StandardizedDesign};
use crate::error::{Error, Result};
use crate::linalg;
use crate::subsets;

/// True support `T`, coefficients `β*_T` and `θ*_T = Dβ*_T`, and `σ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    support: ModelSet,
    beta_star: Vec<f64>,
    theta_star: Vec<f64>,
    sigma2: f64,
}

impl TruthSpec {
    /// `beta` is aligned with the sorted `support`.
    pub fn new(
        design: &StandardizedDesign,
        support: ModelSet,
        beta: Vec<f64>,
        sigma2: f64,
    ) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidData("true support must be nonempty".into()));
        }
        if support.len() != beta.len() {
            return Err(Error::InvalidData(
                "support and coefficients differ in length".into(),
            ));
        }
        if support.max_index().is_some_and(|m| m >= design.p()) {
            return Err(Error::InvalidData(
                "support exceeds the number of predictors".into(),
            ));
        }
        if beta.iter().any(|b| !b.is_finite() || *b == 0.0) {
            return Err(Error::InvalidData(
                "true coefficients must be finite and nonzero".into(),
            ));
        }
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::InvalidData("sigma2 must be nonnegative".into()));
        }
        let theta_star = support
            .iter()
            .zip(&beta)
            .map(|(j, b)| b * design.scales()[j])
            .collect();
        Ok(Self {
            support,
            beta_star: beta,
            theta_star,
            sigma2,
        })
    }

    pub fn support(&self) -> &ModelSet {
        &self.support
    }

    pub fn beta_star(&self) -> &[f64] {
        &self.beta_star
    }

    pub fn theta_star(&self) -> &[f64] {
        &self.theta_star
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn t(&self) -> usize {
        self.support.len()
    }

    /// `θ*_min = min_j |θ*_j|`.
    pub fn theta_min(&self) -> f64 {
        self.theta_star
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// `β*` over all `p` coordinates.
    pub fn beta_full(&self, p: usize) -> Vec<f64> {
        let mut b = vec![0.0; p];
        for (j, v) in self.support.iter().zip(&self.beta_star) {
            b[j] = *v;
        }
        b
    }

    /// `μ₀ = X₀_T θ*_T`.
    pub fn mean(&self, design: &StandardizedDesign) -> DVector<f64> {
        design.columns(&self.support) * DVector::from_column_slice(&self.theta_star)
    }
}

fn projection_residual_sq(design: &StandardizedDesign, mu0: &DVector<f64>, j: &[usize]) -> f64 {
    let basis = linalg::span_basis(&linalg::select_columns(design.x0(), j));
    linalg::residual_sq(&basis, mu0)
}

/// `δ(T‖J) = ‖(I − H₀_J) X₀_T θ*_T‖²`.
pub fn delta_pair(design: &StandardizedDesign, truth: &TruthSpec, j: &ModelSet) -> Result<f64> {
    if j.max_index().is_some_and(|m| m >= design.p()) {
        return Err(Error::InvalidData(
            "model exceeds the number of predictors".into(),
        ));
    }
    let xj = design.columns(j);
    let basis = linalg::full_rank_basis(&xj).ok_or_else(|| Error::RankDeficient(j.clone()))?;
    Ok(linalg::residual_sq(&basis, &truth.mean(design)))
}

/// `2σ² min_β KL` between the true law and the model on `J`, computed on
/// the raw design (with an intercept column in practical mode).
pub fn kl_separation(design: &StandardizedDesign, truth: &TruthSpec, j: &ModelSet) -> Result<f64> {
    let sigma2 = if truth.sigma2() > 0.0 {
        truth.sigma2()
    } else {
        1.0
    };
    let raw_t = design.raw_columns(truth.support());
    let mu = raw_t * DVector::from_column_slice(truth.beta_star());
    let raw_j = design.raw_columns(j);
    let ext = match design.mode() {
        Parametrization::Practical => {
            let mut m = DMatrix::from_element(design.n(), j.len() + 1, 1.0);
            m.columns_mut(1, j.len()).copy_from(&raw_j);
            m
        }
        Parametrization::Formal => raw_j,
    };
    let resid = if ext.ncols() == 0 {
        mu.clone()
    } else {
        let coef = ext
            .clone()
            .svd(true, true)
            .solve(&mu, 1e-12)
            .map_err(|e| Error::InvalidData(e.to_string()))?;
        &mu - ext * coef
    };
    let kl = resid.norm_squared() / (2.0 * sigma2);
    Ok(2.0 * sigma2 * kl)
}

fn guarded_t(truth: &TruthSpec, design: &StandardizedDesign, s: usize) -> Result<()> {
    let (p, t) = (design.p(), truth.t());
    if s < t || s > p {
        return Err(Error::Domain(format!("s must lie in {t}..={p}, got {s}")));
    }
    subsets::guard(
        subsets::count_up_to(p - t, s - t) * t as u128,
        subsets::SUBSET_LIMIT,
    )
}

/// `δ(T,s) = min_{j∈T, J⊇T, |J|≤s} δ(T‖J∖{j})`, by enumeration.
pub fn delta_scaled(design: &StandardizedDesign, truth: &TruthSpec, s: usize) -> Result<f64> {
    guarded_t(truth, design, s)?;
    Ok(*delta_scaled_by_extra(design, truth, s - truth.t())
        .iter()
        .fold(&f64::INFINITY, |a, b| if b < a { b } else { a }))
}

/// `δ(T,s)` for every `s` in `t..=p` from one enumeration.
pub fn delta_scaled_profile(design: &StandardizedDesign, truth: &TruthSpec) -> Result<Vec<f64>> {
    let (p, t) = (design.p(), truth.t());
    guarded_t(truth, design, p)?;
    let by_extra = delta_scaled_by_extra(design, truth, p - t);
    let mut run = f64::INFINITY;
    Ok(by_extra
        .into_iter()
        .map(|v| {
            run = run.min(v);
            run
        })
        .collect())
}

/// Minimum over `|J∖T| = k` for each `k ≤ max_extra`.
fn delta_scaled_by_extra(
    design: &StandardizedDesign,
    truth: &TruthSpec,
    max_extra: usize,
) -> Vec<f64> {
    let mu0 = truth.mean(design);
    let t_set = truth.support();
    let outside: Vec<usize> = (0..design.p()).filter(|&i| !t_set.contains(i)).collect();
    let mut mins = vec![f64::INFINITY; max_extra + 1];
    subsets::for_each_up_to(&outside, max_extra, |extra| {
        let mut j: Vec<usize> = t_set.iter().chain(extra.iter().copied()).collect();
        j.sort_unstable();
        for drop in t_set.iter() {
            let reduced: Vec<usize> = j.iter().copied().filter(|&i| i != drop).collect();
            let v = projection_residual_sq(design, &mu0, &reduced);
            if v < mins[extra.len()] {
                mins[extra.len()] = v;
            }
        }
    });
    mins
}

/// `δ(T‖J)` for every `J ⊉ T` with `|J| ≤ t`.
pub fn delta_pairwise(
    design: &StandardizedDesign,
    truth: &TruthSpec,
) -> Result<Vec<(ModelSet, f64)>> {
    let (p, t) = (design.p(), truth.t());
    subsets::guard(subsets::count_up_to(p, t), subsets::SUBSET_LIMIT)?;
    let mu0 = truth.mean(design);
    let all: Vec<usize> = (0..p).collect();
    let mut out = Vec::new();
    subsets::for_each_up_to(&all, t, |j| {
        let m = ModelSet::from_indices(j.iter().copied());
        if !truth.support().is_subset(&m) {
            let v = projection_residual_sq(design, &mu0, j);
            out.push((m, v));
        }
    });
    Ok(out)
}

/// `δ(T) = min_{J⊉T, |J|≤t} δ(T‖J)`.
pub fn delta_identifiability(design: &StandardizedDesign, truth: &TruthSpec) -> Result<f64> {
    Ok(delta_pairwise(design, truth)?
        .into_iter()
        .map(|(_, v)| v)
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionFlags {
    /// `δ(T‖J)` equals `2σ² min KL` computed on the raw design.
    pub kl_identity: bool,
    /// `δ(T‖J) ≥ λ_min(Σ_{J∪T}) ‖θ*_{T∖J}‖²`.
    pub eigen_lower_bound: bool,
    /// `κ²(t,c) ≤ (⌊c⌋+1) κ²((⌊c⌋+1)t, 0)` for `c = 1, 3`.
    pub spread_bound: bool,
    /// `κ²(T,3) θ*²_min ≤ δ(T,t)`.
    pub kappa_support_vs_delta: bool,
    /// `κ²(t,3) θ*²_min ≤ 4 δ(T,4t)`.
    pub kappa_uniform_vs_delta: bool,
    /// `δ(T,p) ≤ δ(T)`.
    pub delta_scaled_vs_identifiability: bool,
    /// `δ(T,s)` non-increasing in `s`.
    pub delta_monotone: bool,
    /// `κ(T,c)` non-increasing in `c`, `κ(s,3)` non-increasing in `s`.
    pub kappa_monotone: bool,
}

impl PropositionFlags {
    pub fn all(&self) -> bool {
        self.kl_identity
            && self.eigen_lower_bound
            && self.spread_bound
            && self.kappa_support_vs_delta
            && self.kappa_uniform_vs_delta
            && self.delta_scaled_vs_identifiability
            && self.delta_monotone
            && self.kappa_monotone
    }

    pub fn named(&self) -> [(&'static str, bool); 8] {
        [
            ("kl_identity", self.kl_identity),
            ("eigen_lower_bound", self.eigen_lower_bound),
            ("spread_bound", self.spread_bound),
            ("kappa_support_vs_delta", self.kappa_support_vs_delta),
            ("kappa_uniform_vs_delta", self.kappa_uniform_vs_delta),
            (
                "delta_scaled_vs_identifiability",
                self.delta_scaled_vs_identifiability,
            ),
            ("delta_monotone", self.delta_monotone),
            ("kappa_monotone", self.kappa_monotone),
        ]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub model: ModelSet,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaledDelta {
    pub s: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeKappa {
    pub c: f64,
    pub kappa_sq: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentifiabilityReport {
    pub support: ModelSet,
    pub theta_min: f64,
    pub delta_pairwise: Vec<DeltaEntry>,
    pub delta_scaled: Vec<ScaledDelta>,
    /// `δ(T)`.
    pub delta_identifiability: f64,
    /// `κ²(T,3)`.
    pub kappa_support: KappaEstimate,
    /// `κ²(t,3)`.
    pub kappa_uniform: KappaEstimate,
    /// `κ²(T,c)` over a grid of `c`.
    pub kappa_cone_profile: Vec<ConeKappa>,
    pub flags: PropositionFlags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnoseOptions {
    /// Restarts for `κ(T,c)`.
    pub restarts: usize,
    /// Restarts per set inside the uniform minimum.
    pub uniform_restarts: usize,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            uniform_restarts: 16,
        }
    }
}

const CONE_GRID: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.0];

fn leq(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * a.abs().max(b.abs()) + 1e-12
}

/// Computes every separation quantity and checks the inequalities between
/// them. Restricted eigenvalues enter through their estimates, which are
/// upper bounds, so the checks on their small side are strict.
pub fn diagnose(
    design: &StandardizedDesign,
    truth: &TruthSpec,
    opts: &DiagnoseOptions,
) -> Result<IdentifiabilityReport> {
    let (p, t) = (design.p(), truth.t());
    let gram = design.gram();
    let pairwise = delta_pairwise(design, truth)?;
    let scaled_profile = delta_scaled_profile(design, truth)?;
    let delta_t = pairwise.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let theta_min = truth.theta_min();
    let mu_scale = truth.mean(design).norm_squared().max(1.0);

    let mut kl_identity = true;
    let mut eigen_lower_bound = true;
    for (j, d) in &pairwise {
        let kl = kl_separation(design, truth, j)?;
        kl_identity &= (d - kl).abs() <= 1e-8 * mu_scale;
        let union = j.union(truth.support());
        let lam = linalg::min_eigenvalue(&linalg::select_square(&gram, union.as_slice())).max(0.0);
        let missing: f64 = truth
            .support()
            .iter()
            .zip(truth.theta_star())
            .filter(|(i, _)| !j.contains(*i))
            .map(|(_, th)| th * th)
            .sum();
        eigen_lower_bound &= leq(lam * missing, *d);
    }

    let independent: Vec<f64> = (t..=p)
        .map(|s| delta_scaled(design, truth, s))
        .collect::<Result<_>>()?;
    let delta_monotone = independent.windows(2).all(|w| leq(w[1], w[0]))
        && independent
            .iter()
            .zip(&scaled_profile)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
    let delta_p = independent[p - t];

    let cone = kappa_profile(design, truth.support(), &CONE_GRID, opts.restarts)?;
    let kappa_support = cone[CONE_GRID.len() - 1].clone();
    let kappa_uniform3 = kappa_uniform(design, t, 3.0, opts.uniform_restarts)?;
    let kappa_uniform1 = kappa_uniform(design, t, 1.0, opts.uniform_restarts)?;

    let spread3 = sparse_min_eigenvalue(design, 4 * t)?;
    let spread1 = sparse_min_eigenvalue(design, 2 * t)?;
    let spread_bound =
        leq(kappa_uniform3.value, 4.0 * spread3) && leq(kappa_uniform1.value, 2.0 * spread1);

    let delta_4t = independent[(4 * t).min(p) - t];
    let kappa_support_vs_delta = leq(kappa_support.value * theta_min * theta_min, independent[0]);
    let kappa_uniform_vs_delta = leq(kappa_uniform3.value * theta_min * theta_min, 4.0 * delta_4t);

    let mut kappa_monotone = cone.windows(2).all(|w| leq(w[1].value, w[0].value));
    kappa_monotone &= leq(kappa_uniform3.value, kappa_support.value);
    kappa_monotone &= leq(kappa_uniform3.value, kappa_uniform1.value);
    if t > 1 {
        let smaller = kappa_uniform(design, t - 1, 3.0, opts.uniform_restarts)?;
        kappa_monotone &= leq(kappa_uniform3.value, smaller.value);
    }

    let flags = PropositionFlags {
        kl_identity,
        eigen_lower_bound,
        spread_bound,
        kappa_support_vs_delta,
        kappa_uniform_vs_delta,
        delta_scaled_vs_identifiability: leq(delta_p, delta_t),
        delta_monotone,
        kappa_monotone,
    };
    Ok(IdentifiabilityReport {
        support: truth.support().clone(),
        theta_min,
        delta_pairwise: pairwise
            .into_iter()
            .map(|(model, delta)| DeltaEntry { model, delta })
            .collect(),
        delta_scaled: scaled_profile
            .iter()
            .enumerate()
            .map(|(k, &delta)| ScaledDelta { s: t + k, delta })
            .collect(),
        delta_identifiability: delta_t,
        kappa_support,
        kappa_uniform: kappa_uniform3,
        kappa_cone_profile: CONE_GRID
            .iter()
            .zip(&cone)
            .map(|(&c, k)| ConeKappa {
                c,
                kappa_sq: k.value,
            })
            .collect(),
        flags,
    })
}

pub fn check_propositions(
    design: &StandardizedDesign,
    truth: &TruthSpec,
) -> Result<PropositionFlags> {
    Ok(diagnose(design, truth, &DiagnoseOptions::default())?.flags)
}
