//! Lasso by cyclic coordinate descent, thresholded screening, penalties,
//! event `𝒜`, and the oracle inequalities that hold on it.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::design::{ModelSet, StandardizedDesign};
use crate::error::{Error, Result};
use crate::identifiability;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    pub tol: f64,
    /// Maximum number of full coordinate sweeps.
    pub max_iter: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

/// Minimiser of `‖y₀ − X₀θ‖² + 2 r_L |θ|₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit {
    pub theta_hat: Vec<f64>,
    pub beta_hat: Vec<f64>,
    pub penalty: f64,
    pub kkt_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LassoFit {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                kkt_gap: self.kkt_gap,
            })
        }
    }

    pub fn support(&self) -> ModelSet {
        ModelSet::from_indices((0..self.theta_hat.len()).filter(|&j| self.theta_hat[j] != 0.0))
    }
}

fn soft(z: f64, r: f64) -> f64 {
    if z > r {
        z - r
    } else if z < -r {
        z + r
    } else {
        0.0
    }
}

fn check_penalty(r_l: f64) -> Result<()> {
    if r_l.is_finite() && r_l > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "lasso penalty must be positive, got {r_l}"
        )))
    }
}

fn residual_of(design: &StandardizedDesign, theta: &[f64]) -> DVector<f64> {
    design.y0() - design.x0() * DVector::from_column_slice(theta)
}

/// Largest violation of the subgradient conditions at `theta`.
pub fn kkt_gap(design: &StandardizedDesign, theta: &[f64], r_l: f64) -> f64 {
    let res = residual_of(design, theta);
    gap_from_residual(design, theta, &res, r_l)
}

fn gap_from_residual(
    design: &StandardizedDesign,
    theta: &[f64],
    res: &DVector<f64>,
    r_l: f64,
) -> f64 {
    let mut gap: f64 = 0.0;
    for (j, &th) in theta.iter().enumerate() {
        let c = design.x0().column(j).dot(res);
        let v = if th != 0.0 {
            (c - r_l * th.signum()).abs()
        } else {
            c.abs() - r_l
        };
        gap = gap.max(v);
    }
    gap
}

/// `‖y₀ − X₀θ‖² + 2 r_L |θ|₁`.
pub fn lasso_objective(design: &StandardizedDesign, theta: &[f64], r_l: f64) -> f64 {
    residual_of(design, theta).norm_squared()
        + 2.0 * r_l * theta.iter().map(|t| t.abs()).sum::<f64>()
}

pub fn solve_lasso(design: &StandardizedDesign, r_l: f64, opts: &LassoOptions) -> Result<LassoFit> {
    solve_lasso_warm(design, r_l, &vec![0.0; design.p()], opts)
}

pub fn solve_lasso_warm(
    design: &StandardizedDesign,
    r_l: f64,
    start: &[f64],
    opts: &LassoOptions,
) -> Result<LassoFit> {
    check_penalty(r_l)?;
    if !(opts.tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    if start.len() != design.p() {
        return Err(Error::Domain("warm start has the wrong length".into()));
    }
    let x0 = design.x0();
    let mut theta = start.to_vec();
    let mut res = residual_of(design, &theta);
    let mut gap = gap_from_residual(design, &theta, &res, r_l);
    let mut sweeps = 0;
    while gap > opts.tol && sweeps < opts.max_iter {
        sweeps += 1;
        for j in 0..theta.len() {
            let col = x0.column(j);
            let z = col.dot(&res) + theta[j];
            let new = soft(z, r_l);
            let step = new - theta[j];
            if step != 0.0 {
                res.axpy(-step, &col, 1.0);
                theta[j] = new;
            }
        }
        if sweeps % 64 == 0 {
            res = residual_of(design, &theta);
        }
        gap = gap_from_residual(design, &theta, &res, r_l);
        if gap <= opts.tol {
            // Confirm against a freshly computed residual.
            res = residual_of(design, &theta);
            gap = gap_from_residual(design, &theta, &res, r_l);
        }
    }
    Ok(LassoFit {
        beta_hat: theta
            .iter()
            .zip(design.scales())
            .map(|(t, s)| t / s)
            .collect(),
        theta_hat: theta,
        penalty: r_l,
        kkt_gap: gap,
        iterations: sweeps,
        converged: gap <= opts.tol,
    })
}

/// Solves over a penalty grid from largest to smallest with warm starts.
/// Results are returned in the order of `penalties`.
pub fn lasso_path(
    design: &StandardizedDesign,
    penalties: &[f64],
    opts: &LassoOptions,
) -> Result<Vec<LassoFit>> {
    let mut order: Vec<usize> = (0..penalties.len()).collect();
    order.sort_by(|&a, &b| penalties[b].total_cmp(&penalties[a]));
    let mut out: Vec<Option<LassoFit>> = vec![None; penalties.len()];
    let mut start = vec![0.0; design.p()];
    for i in order {
        let fit = solve_lasso_warm(design, penalties[i], &start, opts)?;
        start.clone_from(&fit.theta_hat);
        out[i] = Some(fit);
    }
    Ok(out
        .into_iter()
        .map(|f| f.expect("every grid point solved"))
        .collect())
}

/// Two-stage thresholding of the lasso coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenResult {
    pub s0: ModelSet,
    pub s1: ModelSet,
    pub a0: f64,
    pub a1: f64,
}

pub fn screen(fit: &LassoFit) -> Result<ScreenResult> {
    if !fit.converged {
        return Err(Error::NotConverged {
            iterations: fit.iterations,
            kkt_gap: fit.kkt_gap,
        });
    }
    Ok(screen_coefficients(&fit.theta_hat, fit.penalty))
}

/// `S₀ = {|θ̂_j| ≥ 6r_L}`, `S₁ = {|θ̂_j| ≥ 6r_L (|S₀| ∨ 1)^{1/2}}`.
pub fn screen_coefficients(theta: &[f64], r_l: f64) -> ScreenResult {
    let a0 = 6.0 * r_l;
    let s0 = ModelSet::from_indices((0..theta.len()).filter(|&j| theta[j].abs() >= a0));
    let a1 = a0 * (s0.len().max(1) as f64).sqrt();
    let s1 = ModelSet::from_indices(s0.iter().filter(|&j| theta[j].abs() >= a1));
    ScreenResult { s0, s1, a0, a1 }
}

/// GIC penalty `r`, lasso penalty `r_L`, and the `a`, `σ²` they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyPair {
    pub r: f64,
    pub r_l: f64,
    pub a: Option<f64>,
    pub sigma2: Option<f64>,
}

impl PenaltyPair {
    /// User-chosen penalties with no `a` or `σ²` attached.
    pub fn explicit(r: f64, r_l: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain(format!(
                "GIC penalty must be nonnegative, got {r}"
            )));
        }
        check_penalty(r_l)?;
        Ok(Self {
            r,
            r_l,
            a: None,
            sigma2: None,
        })
    }
}

/// `r = 4σ² ln(p)/a` and `r_L = 2√r`.
pub fn default_penalties(p: usize, sigma2: f64, a: f64) -> Result<PenaltyPair> {
    if p < 2 {
        return Err(Error::Domain("default penalties need p >= 2".into()));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("a must lie in (0, 1), got {a}")));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Domain(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    let r = 4.0 * sigma2 * (p as f64).ln() / a;
    Ok(PenaltyPair {
        r,
        r_l: 2.0 * r.sqrt(),
        a: Some(a),
        sigma2: Some(sigma2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventAWitness {
    pub holds: bool,
    pub max_corr: f64,
    pub threshold: f64,
}

/// `𝒜 = ∩_j {2|x₀ⱼᵀε| ≤ r_L}`.
pub fn event_a(
    design: &StandardizedDesign,
    epsilon: &DVector<f64>,
    r_l: f64,
) -> Result<EventAWitness> {
    if epsilon.len() != design.n() {
        return Err(Error::InvalidData(
            "noise vector length differs from n".into(),
        ));
    }
    let max_corr = design
        .x0()
        .column_iter()
        .map(|c| 2.0 * c.dot(epsilon).abs())
        .fold(0.0, f64::max);
    Ok(EventAWitness {
        holds: max_corr <= r_l,
        max_corr,
        threshold: r_l,
    })
}

/// Outcome of the oracle inequalities for one lasso fit against a reference
/// coefficient vector `β` with support `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub support_size: usize,
    /// `κ²(J, 3)` used on the right-hand sides.
    pub kappa_sq: f64,
    pub pred_err: f64,
    pub approx_err: f64,
    pub delta_l1: f64,
    pub delta_l1_support: f64,
    pub delta_l2_support: f64,
    /// `‖μ₀ − μ_β̂‖ ≤ ‖μ₀ − μ_β‖ + 3 r_L |J|^{1/2} / κ`.
    pub prediction: bool,
    /// `r_L|Δ| ≤ 2‖μ₀ − μ_β‖² + 8 r_L²|J|/κ²`, when `|Δ| ≤ 4|Δ_J|`.
    pub l1_cone: Option<bool>,
    /// `|Δ| ≤ 8 r_L |J| / κ²`, when `μ₀ = μ_β`.
    pub l1_exact: Option<bool>,
    /// `‖μ_β̂ − μ_β‖² ≤ 9 r_L² |J| / κ²`, when `μ₀ = μ_β`.
    pub pred_exact: Option<bool>,
    /// `‖Δ_J‖ ≤ 3 r_L |J|^{1/2}/κ²` and `|Δ_J| ≤ 3 r_L|J|/κ²`, when `μ₀ = μ_β`.
    pub support_l2: Option<bool>,
    pub support_l1: Option<bool>,
}

impl OracleReport {
    /// Whether every applicable inequality holds.
    pub fn all_hold(&self) -> bool {
        self.prediction
            && [
                self.l1_cone,
                self.l1_exact,
                self.pred_exact,
                self.support_l2,
                self.support_l1,
            ]
            .iter()
            .all(|f| f.unwrap_or(true))
    }
}

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + 1e-9) + 1e-9
}

/// Checks the oracle inequalities; `κ²(J_β, 3)` is estimated here.
pub fn verify_oracle_inequalities(
    design: &StandardizedDesign,
    fit: &LassoFit,
    reference_beta: &[f64],
    mu0: &DVector<f64>,
) -> Result<OracleReport> {
    let support =
        ModelSet::from_indices((0..reference_beta.len()).filter(|&j| reference_beta[j] != 0.0));
    let kappa_sq = if support.is_empty() {
        1.0
    } else {
        identifiability::kappa(design, &support, 3.0, identifiability::DEFAULT_RESTARTS)?.value
    };
    verify_oracle_inequalities_with(design, fit, reference_beta, mu0, kappa_sq)
}

/// As [`verify_oracle_inequalities`] with a supplied `κ²(J_β, 3)`.
pub fn verify_oracle_inequalities_with(
    design: &StandardizedDesign,
    fit: &LassoFit,
    reference_beta: &[f64],
    mu0: &DVector<f64>,
    kappa_sq: f64,
) -> Result<OracleReport> {
    let p = design.p();
    if reference_beta.len() != p || fit.theta_hat.len() != p {
        return Err(Error::InvalidData(
            "coefficient vectors must have length p".into(),
        ));
    }
    if mu0.len() != design.n() {
        return Err(Error::InvalidData(
            "mean vector length differs from n".into(),
        ));
    }
    let theta_ref: Vec<f64> = reference_beta
        .iter()
        .zip(design.scales())
        .map(|(b, s)| b * s)
        .collect();
    let support = ModelSet::from_indices((0..p).filter(|&j| theta_ref[j] != 0.0));
    let j = support.len() as f64;
    if !support.is_empty() && !(kappa_sq > 0.0) {
        return Err(Error::KappaDegenerate);
    }
    // With an empty support every κ-dependent term is multiplied by zero.
    let inv_k2 = if support.is_empty() {
        0.0
    } else {
        1.0 / kappa_sq
    };
    let mu_ref = design.x0() * DVector::from_column_slice(&theta_ref);
    let mu_hat = design.x0() * DVector::from_column_slice(&fit.theta_hat);
    let pred_err = (mu0 - &mu_hat).norm();
    let approx_err = (mu0 - &mu_ref).norm();
    let delta: Vec<f64> = fit
        .theta_hat
        .iter()
        .zip(&theta_ref)
        .map(|(a, b)| a - b)
        .collect();
    let delta_l1: f64 = delta.iter().map(|d| d.abs()).sum();
    let delta_l1_support: f64 = support.iter().map(|k| delta[k].abs()).sum();
    let delta_l2_support = support
        .iter()
        .map(|k| delta[k] * delta[k])
        .sum::<f64>()
        .sqrt();
    let r_l = fit.penalty;

    let prediction = le(pred_err, approx_err + 3.0 * r_l * j.sqrt() * inv_k2.sqrt());
    let l1_cone = (delta_l1 <= 4.0 * delta_l1_support).then(|| {
        le(
            r_l * delta_l1,
            2.0 * approx_err * approx_err + 8.0 * r_l * r_l * j * inv_k2,
        )
    });
    let exact = approx_err <= 1e-10 * mu0.norm().max(1.0);
    let l1_exact = exact.then(|| le(delta_l1, 8.0 * r_l * j * inv_k2));
    let pred_exact = exact.then(|| {
        le(
            (&mu_hat - &mu_ref).norm_squared(),
            9.0 * r_l * r_l * j * inv_k2,
        )
    });
    let support_l2 = exact.then(|| le(delta_l2_support, 3.0 * r_l * j.sqrt() * inv_k2));
    let support_l1 = exact.then(|| le(delta_l1_support, 3.0 * r_l * j * inv_k2));
    Ok(OracleReport {
        support_size: support.len(),
        kappa_sq,
        pred_err,
        approx_err,
        delta_l1,
        delta_l1_support,
        delta_l2_support,
        prediction,
        l1_cone,
        l1_exact,
        pred_exact,
        support_l2,
        support_l1,
    })
}
