//! Ordering by squared t statistics, the nested-family GIC path, exhaustive
//! GIC, and the composed SOS and OS pipelines.

use std::cmp::Ordering as CmpOrdering;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::design::{self, Dataset, LsFit, ModelSet, Parametrization, StandardizedDesign};
use crate::error::{Error, Result};
use crate::lasso::{self, LassoFit, LassoOptions, PenaltyPair, ScreenResult};
use crate::linalg;
use crate::subsets;

/// Predictors sorted by decreasing score, ties by ascending index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ordering {
    /// 0-based indices, most important first.
    pub sequence: Vec<usize>,
    /// `t²` aligned with `sequence`, or the drop in RSS when `saturated`.
    pub scores: Vec<f64>,
    /// The model fits exactly and the RSS differences were used instead of `t²`.
    pub saturated: bool,
}

impl Ordering {
    pub fn empty() -> Self {
        Self {
            sequence: Vec::new(),
            scores: Vec::new(),
            saturated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn prefix(&self, k: usize) -> ModelSet {
        ModelSet::from_indices(self.sequence[..k].iter().copied())
    }

    fn from_scores(indices: &[usize], scores: Vec<f64>, saturated: bool) -> Self {
        let mut order: Vec<usize> = (0..indices.len()).collect();
        order.sort_by(|&a, &b| match scores[b].total_cmp(&scores[a]) {
            CmpOrdering::Equal => indices[a].cmp(&indices[b]),
            o => o,
        });
        Self {
            sequence: order.iter().map(|&k| indices[k]).collect(),
            scores: order.iter().map(|&k| scores[k]).collect(),
            saturated,
        }
    }
}

pub fn order_by_t(design: &StandardizedDesign, s1: &ModelSet) -> Result<Ordering> {
    if s1.is_empty() {
        return Ok(Ordering::empty());
    }
    match design::ls_fit(design, s1) {
        Ok(fit) => Ok(Ordering::from_scores(s1.as_slice(), fit.t_squared, false)),
        Err(Error::DegenerateResidual(_)) => {
            // Exact fit: R_{S₁∖{j}} − R_{S₁} still orders the predictors.
            let base = design::rss(design, s1)?;
            let drops = s1
                .iter()
                .map(|j| design::rss(design, &s1.without(j)).map(|r| r - base))
                .collect::<Result<Vec<_>>>()?;
            Ok(Ordering::from_scores(s1.as_slice(), drops, true))
        }
        Err(e) => Err(e),
    }
}

/// GIC over the nested family `∅ ⊂ {j₁} ⊂ … ⊂ S₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GicPath {
    pub rss_path: Vec<f64>,
    pub gic_path: Vec<f64>,
    pub selected_size: usize,
    pub penalty: f64,
}

impl GicPath {
    pub fn selected(&self, ordering: &Ordering) -> ModelSet {
        ordering.prefix(self.selected_size)
    }
}

/// Smallest index attaining the minimum.
fn first_argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..v.len() {
        if v[k] < v[best] {
            best = k;
        }
    }
    best
}

pub fn gic_path(design: &StandardizedDesign, ordering: &Ordering, r: f64) -> Result<GicPath> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!(
            "GIC penalty must be nonnegative, got {r}"
        )));
    }
    let y0 = design.y0();
    let mut rss_path = vec![y0.norm_squared()];
    if !ordering.is_empty() {
        if let Some(&j) = ordering.sequence.iter().find(|&&j| j >= design.p()) {
            return Err(Error::InvalidData(format!(
                "predictor {} out of range",
                j + 1
            )));
        }
        let xo = linalg::select_columns(design.x0(), &ordering.sequence);
        let as_set = || ModelSet::from_indices(ordering.sequence.iter().copied());
        if linalg::full_rank_basis(&xo).is_none() {
            return Err(Error::RankDeficient(as_set()));
        }
        // One QR of the ordered columns; each prefix drops (q_kᵀy₀)².
        let q = xo.qr().q();
        let mut current = rss_path[0];
        for k in 0..ordering.len() {
            let c = q.column(k).dot(y0);
            current = (current - c * c).max(0.0);
            rss_path.push(current);
        }
    }
    let gic_path: Vec<f64> = rss_path
        .iter()
        .enumerate()
        .map(|(k, v)| v + k as f64 * r)
        .collect();
    let selected_size = first_argmin(&gic_path);
    Ok(GicPath {
        rss_path,
        gic_path,
        selected_size,
        penalty: r,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveSelection {
    pub model: ModelSet,
    pub gic: f64,
    pub evaluated: u64,
    pub skipped_rank_deficient: u64,
}

/// Minimiser of `R_J + r|J|` over all `|J| ≤ max_size`; ties go to the
/// smaller set, then the lexicographically smaller one.
pub fn exhaustive_gic(
    design: &StandardizedDesign,
    r: f64,
    max_size: usize,
) -> Result<ExhaustiveSelection> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!(
            "GIC penalty must be nonnegative, got {r}"
        )));
    }
    let p = design.p();
    let max_size = max_size.min(p).min(design.n_effective());
    subsets::guard(subsets::count_up_to(p, max_size), subsets::SUBSET_LIMIT)?;
    let mut search = Exhaustive {
        design,
        r,
        max_size,
        basis: Vec::new(),
        chosen: Vec::new(),
        best: (design.y0().norm_squared(), Vec::new()),
        evaluated: 1,
        skipped: 0,
    };
    search.descend(0, design.y0().norm_squared());
    Ok(ExhaustiveSelection {
        model: ModelSet::from_indices(search.best.1.iter().copied()),
        gic: search.best.0,
        evaluated: search.evaluated,
        skipped_rank_deficient: search.skipped,
    })
}

struct Exhaustive<'a> {
    design: &'a StandardizedDesign,
    r: f64,
    max_size: usize,
    basis: Vec<DVector<f64>>,
    chosen: Vec<usize>,
    best: (f64, Vec<usize>),
    evaluated: u64,
    skipped: u64,
}

impl Exhaustive<'_> {
    fn better(&self, gic: f64, set: &[usize]) -> bool {
        let (bg, bs) = &self.best;
        gic < *bg || (gic == *bg && (set.len(), set) < (bs.len(), bs.as_slice()))
    }

    /// Visits every extension of `chosen` by indices `≥ from`.
    fn descend(&mut self, from: usize, rss: f64) {
        if self.chosen.len() == self.max_size {
            return;
        }
        let p = self.design.p();
        for j in from..p {
            let mut v = self.design.x0().column(j).into_owned();
            // Two passes of Gram–Schmidt keep the basis orthonormal.
            for _ in 0..2 {
                for q in &self.basis {
                    let c = q.dot(&v);
                    v.axpy(-c, q, 1.0);
                }
            }
            let norm = v.norm();
            if norm < linalg::RANK_TOL {
                let room = self.max_size - self.chosen.len() - 1;
                self.skipped += subsets::count_up_to(p - j - 1, room) as u64;
                continue;
            }
            v /= norm;
            let c = v.dot(self.design.y0());
            let child_rss = (rss - c * c).max(0.0);
            self.chosen.push(j);
            self.evaluated += 1;
            let gic = child_rss + self.r * self.chosen.len() as f64;
            if self.better(gic, &self.chosen) {
                self.best = (gic, self.chosen.clone());
            }
            self.basis.push(v);
            self.descend(j + 1, child_rss);
            self.basis.pop();
            self.chosen.pop();
        }
    }
}

/// Everything the SOS and OS pipelines produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub mode: Parametrization,
    /// `None` for OS, where `S₁ = F`.
    pub lasso: Option<LassoFit>,
    pub screen: Option<ScreenResult>,
    pub ordering: Ordering,
    pub path: GicPath,
    pub selected: ModelSet,
    pub refit: LsFit,
    pub intercept: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelectOptions {
    pub lasso: LassoOptions,
}

pub fn run_sos(
    data: &Dataset,
    mode: Parametrization,
    penalties: &PenaltyPair,
    opts: &SelectOptions,
) -> Result<SelectionOutcome> {
    run_sos_on(&design::standardize(data, mode)?, penalties, opts)
}

pub fn run_sos_on(
    design: &StandardizedDesign,
    penalties: &PenaltyPair,
    opts: &SelectOptions,
) -> Result<SelectionOutcome> {
    let fit = lasso::solve_lasso(design, penalties.r_l, &opts.lasso)?.require_converged()?;
    let scr = lasso::screen(&fit)?;
    let n_eff = design.n_effective();
    if scr.s1.len() >= n_eff {
        return Err(Error::ScreenTooLarge {
            size: scr.s1.len(),
            n_effective: n_eff,
        });
    }
    let ordering = order_by_t(design, &scr.s1)?;
    finish(design, Some(fit), Some(scr), ordering, penalties.r)
}

pub fn run_os(
    data: &Dataset,
    mode: Parametrization,
    r: f64,
    opts: &SelectOptions,
) -> Result<SelectionOutcome> {
    run_os_on(&design::standardize(data, mode)?, r, opts)
}

pub fn run_os_on(
    design: &StandardizedDesign,
    r: f64,
    _opts: &SelectOptions,
) -> Result<SelectionOutcome> {
    let p = design.p();
    let n_eff = design.n_effective();
    if p >= n_eff {
        return Err(Error::TooManyPredictors {
            size: p,
            n_effective: n_eff,
        });
    }
    let ordering = order_by_t(design, &ModelSet::full(p))?;
    finish(design, None, None, ordering, r)
}

fn finish(
    design: &StandardizedDesign,
    lasso: Option<LassoFit>,
    screen: Option<ScreenResult>,
    ordering: Ordering,
    r: f64,
) -> Result<SelectionOutcome> {
    let path = gic_path(design, &ordering, r)?;
    let selected = path.selected(&ordering);
    let refit = design::refit(design, &selected)?;
    let intercept = design.intercept(&selected, &refit.beta_hat);
    Ok(SelectionOutcome {
        mode: design.mode(),
        lasso,
        screen,
        ordering,
        path,
        selected,
        refit,
        intercept,
    })
}
