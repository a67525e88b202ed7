use serde::{Deserialize, Serialize};

use crate::design::Parametrization;
use crate::error::{Error, Result};
use crate::lasso::{self, PenaltyPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    IidGaussian,
    Ar1 {
        rho: f64,
    },
    /// `copies` extra columns, each an exact copy of a spurious column.
    DuplicatedSpurious {
        copies: usize,
    },
    /// Orthogonal columns of norm `√n`, centered in practical mode.
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaPattern {
    Constant {
        b: f64,
    },
    /// `b, b·ratio, b·ratio², …` in the order the support was drawn.
    Decaying {
        b: f64,
        ratio: f64,
    },
}

impl BetaPattern {
    pub fn coefficient(&self, k: usize) -> f64 {
        match *self {
            BetaPattern::Constant { b } => b,
            BetaPattern::Decaying { b, ratio } => b * ratio.powi(k as i32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyRule {
    /// `r = 4σ² ln(p)/a`, `r_L = 2√r`.
    Corollary1 {
        a: f64,
    },
    Explicit {
        r: f64,
        r_l: f64,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    Sos,
    Os,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub p: usize,
    pub t: usize,
    pub design_kind: DesignKind,
    pub beta_pattern: BetaPattern,
    pub sigma2: f64,
    #[serde(default)]
    pub mode: Parametrization,
    pub penalty_rule: PenaltyRule,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub algorithm: Algorithm,
    /// Draw `X`, `T` and `β*` once and reuse them in every replicate.
    #[serde(default)]
    pub fixed_design: bool,
    #[serde(default)]
    pub compare_exhaustive: bool,
    /// The `a` fed to the bound ledger; defaults to the penalty rule's `a`, else 0.5.
    #[serde(default)]
    pub bound_a: Option<f64>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.t == 0 {
            return bad("t must be at least 1");
        }
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1");
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return bad("sigma2 must be nonnegative");
        }
        let base = match self.design_kind {
            DesignKind::DuplicatedSpurious { copies } => {
                if copies == 0 || copies >= self.p {
                    return bad("copies must lie in 1..p");
                }
                self.p - copies
            }
            _ => self.p,
        };
        if self.t >= base {
            return bad("t must be smaller than the number of distinct predictors");
        }
        match self.design_kind {
            DesignKind::Ar1 { rho } if !(0.0..1.0).contains(&rho) => {
                return bad("rho must lie in [0,1)")
            }
            DesignKind::Orthogonal if self.p + self.mode.offset() > self.n => {
                return bad("orthogonal designs need p <= n (p < n in practical mode)")
            }
            _ => {}
        }
        let (b, ratio) = match self.beta_pattern {
            BetaPattern::Constant { b } => (b, 1.0),
            BetaPattern::Decaying { b, ratio } => (b, ratio),
        };
        if !(b.is_finite() && b != 0.0 && ratio.is_finite() && ratio != 0.0) {
            return bad("beta pattern must give finite nonzero coefficients");
        }
        if let Some(a) = self.bound_a {
            if !(a > 0.0 && a < 1.0) {
                return bad("bound_a must lie in (0,1)");
            }
        }
        self.penalties().map(|_| ())
    }

    pub fn penalties(&self) -> Result<PenaltyPair> {
        match self.penalty_rule {
            PenaltyRule::Corollary1 { a } => lasso::default_penalties(self.p, self.sigma2, a)
                .map_err(|e| Error::InvalidConfig(e.to_string())),
            PenaltyRule::Explicit { r, r_l } => {
                PenaltyPair::explicit(r, r_l).map_err(|e| Error::InvalidConfig(e.to_string()))
            }
        }
    }

    pub fn ledger_a(&self) -> f64 {
        match (self.bound_a, self.penalty_rule) {
            (Some(a), _) => a,
            (None, PenaltyRule::Corollary1 { a }) => a,
            _ => 0.5,
        }
    }

    /// Number of columns that are not duplicates.
    pub fn base_columns(&self) -> usize {
        match self.design_kind {
            DesignKind::DuplicatedSpurious { copies } => self.p - copies,
            _ => self.p,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: ScenarioConfig = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }
}
