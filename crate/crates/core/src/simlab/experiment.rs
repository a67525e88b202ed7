use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, ScenarioConfig};
use super::generate::{self, DesignDraw, Trial};
use super::pivot::{self, PivotSummary};
use super::replicate_seed;
use crate::bounds::{self, BoundInput, BoundLedger, BoundResult};
use crate::design::{self, ModelSet, StandardizedDesign};
use crate::error::{Error, Result};
use crate::identifiability::{self, TruthSpec};
use crate::lasso::{self, LassoOptions, PenaltyPair};
use crate::linalg;
use crate::select::{self, Ordering};

/// Largest `p` for which `δ` is enumerated to attach a bound ledger.
pub const LEDGER_MAX_P: usize = 12;

/// Mutually exclusive outcome of one replicate, each step conditioned on the
/// previous ones succeeding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialCategory {
    ScreenFail,
    OrderFail,
    Underfit,
    Overfit,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub category: TrialCategory,
    pub screen_ok: bool,
    pub order_ok: bool,
    pub underfit: bool,
    pub overfit: bool,
    pub exact: bool,
    /// `T̂ = T`, regardless of which steps went wrong on the way.
    pub selection_correct: bool,
    pub s1_size: usize,
    /// 1-based, as `{i,j,…}`.
    pub selected: Option<String>,
    pub selected_size: Option<usize>,
    pub event_a: bool,
    pub exhaustive_exact: Option<bool>,
    /// The greedy choice agrees with brute force over the nested family.
    pub greedy_family_ok: bool,
    pub f_stat: Option<f64>,
    pub f_oracle: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: usize,
    pub freq: f64,
    /// `√(p̂(1−p̂)/R)`.
    pub se: f64,
}

impl Frequency {
    pub fn new(count: usize, total: usize) -> Self {
        let freq = count as f64 / total as f64;
        Self {
            count,
            freq,
            se: (freq * (1.0 - freq) / total as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventFrequencies {
    pub screen_fail: Frequency,
    pub order_fail: Frequency,
    pub underfit: Frequency,
    pub overfit: Frequency,
    pub exact: Frequency,
    pub selection_error: Frequency,
    pub event_a_fail: Frequency,
}

/// Bound values, worst case over the designs they were evaluated on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
    #[serde(with = "crate::bounds::extended_float")]
    pub raw: f64,
    pub assumptions_ok: bool,
    pub failed_assumptions: Vec<String>,
}

impl BoundEntry {
    fn from_result(r: &BoundResult) -> Self {
        Self {
            name: r.name.clone(),
            value: r.value,
            raw: r.raw,
            assumptions_ok: r.assumptions_ok,
            failed_assumptions: r.failed_assumptions.clone(),
        }
    }

    fn absorb(&mut self, r: &BoundResult) {
        self.value = self.value.max(r.value);
        self.raw = self.raw.max(r.raw);
        self.assumptions_ok &= r.assumptions_ok;
        for f in &r.failed_assumptions {
            if !self.failed_assumptions.contains(f) {
                self.failed_assumptions.push(f.clone());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// The ledger input, when the design is fixed.
    pub input: Option<BoundInput>,
    pub designs_checked: usize,
    pub entries: Vec<BoundEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCheck {
    pub bound: String,
    pub event: String,
    pub frequency: f64,
    pub se: f64,
    pub bound_value: f64,
    pub assumptions_ok: bool,
    /// `frequency ≤ bound + 2·se`.
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveComparison {
    pub greedy_error: Frequency,
    pub exhaustive_error: Frequency,
    pub lower_bound: f64,
    /// `exhaustive_error ≥ lower_bound − 2·se`.
    pub lower_bound_holds: bool,
    /// `greedy_error ≤ exhaustive_error + 2·se`.
    pub greedy_not_worse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub timestamp: String,
    pub runtime_secs: f64,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ScenarioConfig,
    pub penalties: PenaltyPair,
    pub replicates: usize,
    pub frequencies: EventFrequencies,
    pub greedy_family_violations: usize,
    pub bounds: Option<BoundsReport>,
    pub coverage: Vec<CoverageCheck>,
    pub exhaustive: Option<ExhaustiveComparison>,
    pub pivot: PivotSummary,
    /// Excluded from reproducibility comparisons.
    pub run_info: RunInfo,
}

impl ExperimentSummary {
    /// The JSON form without `run_info`, for bit-level comparisons.
    pub fn numeric_content(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("run_info");
        }
        Ok(serde_json::to_string(&v)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub summary: ExperimentSummary,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub lasso: LassoOptions,
}

struct Fixed {
    draw: DesignDraw,
    design: StandardizedDesign,
    screen_size: Option<usize>,
    ledger: Option<(BoundInput, BoundLedger)>,
}

/// `κ²(T,3) ≥ λ_min(Σ)`; `s = t + ⌊√t/κ²⌋` with that certified value.
fn certified_screen_size(design: &StandardizedDesign, t: usize) -> (f64, Option<usize>) {
    let k2 = linalg::min_eigenvalue(&design.gram()).max(0.0);
    if k2 <= 1e-12 {
        return (0.0, None);
    }
    let extra = ((t as f64).sqrt() / k2).floor();
    (k2, (extra < 1e15).then(|| t + extra as usize))
}

fn ledger_for(
    cfg: &ScenarioConfig,
    design: &StandardizedDesign,
    truth: &TruthSpec,
    penalties: &PenaltyPair,
) -> Result<Option<(BoundInput, BoundLedger)>> {
    if cfg.p > LEDGER_MAX_P || cfg.sigma2 <= 0.0 || penalties.r <= 0.0 {
        return Ok(None);
    }
    let (k2, s) = certified_screen_size(design, cfg.t);
    let profile = match identifiability::delta_scaled_profile(design, truth) {
        Ok(p) => p,
        Err(Error::EnumerationTooLarge { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let t = cfg.t;
    let delta_s = profile[s.map_or(cfg.p, |s| s.min(cfg.p)) - t];
    let kappa = k2.sqrt();
    let input = BoundInput {
        n: cfg.n,
        p: cfg.p,
        t,
        s,
        sigma2: cfg.sigma2,
        r: penalties.r,
        r_l: penalties.r_l,
        a: cfg.ledger_a(),
        delta_s,
        delta_t: profile[0],
        delta_p: profile[cfg.p - t],
        kappa_big_t: kappa,
        kappa_t3: kappa,
        theta_min: truth.theta_min(),
    };
    Ok(Some((input.clone(), bounds::evaluate_all(&input)?)))
}

struct TrialOutcome {
    record: TrialRecord,
    ledger: Option<BoundLedger>,
}

fn run_trial(
    cfg: &ScenarioConfig,
    penalties: &PenaltyPair,
    fixed: Option<&Fixed>,
    opts: &RunOptions,
    index: u64,
) -> Result<TrialOutcome> {
    let trial: Trial = generate::trial_from(cfg, fixed.map(|f| &f.draw), index);
    let (design, screen_size, fresh_ledger) = match fixed {
        Some(f) => (f.design.with_response(&trial.y)?, f.screen_size, None),
        None => {
            let d = design::standardize(&trial.dataset()?, cfg.mode)?;
            let (_, s) = certified_screen_size(&d, cfg.t);
            let truth = TruthSpec::new(&d, trial.support.clone(), trial.beta.clone(), cfg.sigma2)?;
            let ledger = ledger_for(cfg, &d, &truth, penalties)?.map(|l| l.1);
            (d, s, ledger)
        }
    };
    let t = cfg.t;
    let support = &trial.support;
    let n_eff = design.n_effective();
    let mut failure = None;

    let s1 = match cfg.algorithm {
        Algorithm::Os => ModelSet::full(cfg.p),
        Algorithm::Sos => {
            let fit =
                lasso::solve_lasso(&design, penalties.r_l, &opts.lasso)?.require_converged()?;
            lasso::screen(&fit)?.s1
        }
    };
    let screen_ok = match cfg.algorithm {
        Algorithm::Os => true,
        Algorithm::Sos => {
            support.is_subset(&s1) && screen_size.is_none_or(|s| s1.len() <= s) && s1.len() < n_eff
        }
    };

    let mut ordering: Option<Ordering> = None;
    let mut selected: Option<ModelSet> = None;
    let mut greedy_family_ok = true;
    if s1.len() < n_eff {
        match select::order_by_t(&design, &s1).and_then(|o| {
            let path = select::gic_path(&design, &o, penalties.r)?;
            Ok((path.selected(&o), path, o))
        }) {
            Ok((sel, path, o)) => {
                greedy_family_ok =
                    nested_family_check(&design, &o, penalties.r, path.selected_size);
                selected = Some(sel);
                ordering = Some(o);
            }
            Err(e) => failure = Some(e.to_string()),
        }
    } else {
        failure = Some(
            Error::ScreenTooLarge {
                size: s1.len(),
                n_effective: n_eff,
            }
            .to_string(),
        );
    }

    let order_ok = screen_ok
        && ordering.as_ref().is_some_and(|o| {
            o.len() >= t && ModelSet::from_indices(o.sequence[..t].iter().copied()) == *support
        });
    let k = selected.as_ref().map(ModelSet::len);
    let category = match (screen_ok, order_ok, k) {
        (false, _, _) => TrialCategory::ScreenFail,
        (true, false, _) => TrialCategory::OrderFail,
        (true, true, Some(k)) if k < t => TrialCategory::Underfit,
        (true, true, Some(k)) if k > t => TrialCategory::Overfit,
        _ => TrialCategory::Exact,
    };

    let event_a = lasso::event_a(&design, &trial.noise, penalties.r_l)?.holds;
    let exhaustive_exact = if cfg.compare_exhaustive {
        let max_size = cfg.p.min(n_eff.saturating_sub(1));
        Some(select::exhaustive_gic(&design, penalties.r, max_size)?.model == *support)
    } else {
        None
    };
    let mu = trial.mean();
    let f_stat = selected
        .as_ref()
        .and_then(|m| pivot::f_statistic(&trial.x, &trial.y, &mu, m, cfg.mode));
    let f_oracle = pivot::f_statistic(&trial.x, &trial.y, &mu, support, cfg.mode);

    let record = TrialRecord {
        index,
        seed: replicate_seed(cfg.master_seed, index),
        category,
        screen_ok,
        order_ok,
        underfit: category == TrialCategory::Underfit,
        overfit: category == TrialCategory::Overfit,
        exact: category == TrialCategory::Exact,
        selection_correct: selected.as_ref() == Some(support),
        s1_size: s1.len(),
        selected: selected.as_ref().map(|m| m.to_string()),
        selected_size: k,
        event_a,
        exhaustive_exact,
        greedy_family_ok,
        f_stat,
        f_oracle,
        failure,
    };
    Ok(TrialOutcome {
        record,
        ledger: fresh_ledger,
    })
}

/// Brute force over prefixes with directly computed RSS.
fn nested_family_check(
    design: &StandardizedDesign,
    ordering: &Ordering,
    r: f64,
    chosen: usize,
) -> bool {
    let mut gics = Vec::with_capacity(ordering.len() + 1);
    for k in 0..=ordering.len() {
        match design::rss(design, &ordering.prefix(k)) {
            Ok(v) => gics.push(v + r * k as f64),
            Err(_) => return false,
        }
    }
    let (best_k, best) =
        gics.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (k, &g)| if g < acc.1 { (k, g) } else { acc },
        );
    best_k == chosen || (gics[chosen] - best).abs() <= 1e-9 * (1.0 + best.abs())
}

pub fn run_experiment(cfg: &ScenarioConfig) -> Result<Experiment> {
    run_experiment_with(cfg, &RunOptions::default())
}

pub fn run_experiment_with(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Experiment> {
    cfg.validate()?;
    let start = Instant::now();
    let timestamp = chrono::Utc::now().to_rfc3339();
    let penalties = cfg.penalties()?;
    let fixed = if cfg.fixed_design {
        let draw = generate::fixed_draw(cfg);
        let placeholder = DVector::zeros(cfg.n);
        let design = design::standardize(
            &design::Dataset::new(draw.x.clone(), placeholder)?,
            cfg.mode,
        )?;
        let truth = TruthSpec::new(&design, draw.support.clone(), draw.beta.clone(), cfg.sigma2)?;
        let (_, screen_size) = certified_screen_size(&design, cfg.t);
        let ledger = ledger_for(cfg, &design, &truth, &penalties)?;
        Some(Fixed {
            draw,
            design,
            screen_size,
            ledger,
        })
    } else {
        None
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let jobs = pool.current_num_threads();
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|i| run_trial(cfg, &penalties, fixed.as_ref(), opts, i))
            .collect::<Result<Vec<_>>>()
    })?;

    let reps = cfg.replicates;
    let count = |f: &dyn Fn(&TrialRecord) -> bool| outcomes.iter().filter(|o| f(&o.record)).count();
    let freq = |f: &dyn Fn(&TrialRecord) -> bool| Frequency::new(count(f), reps);
    let frequencies = EventFrequencies {
        screen_fail: freq(&|r| r.category == TrialCategory::ScreenFail),
        order_fail: freq(&|r| r.category == TrialCategory::OrderFail),
        underfit: freq(&|r| r.category == TrialCategory::Underfit),
        overfit: freq(&|r| r.category == TrialCategory::Overfit),
        exact: freq(&|r| r.category == TrialCategory::Exact),
        selection_error: freq(&|r| !r.selection_correct),
        event_a_fail: freq(&|r| !r.event_a),
    };

    let bounds_report = match &fixed {
        Some(f) => f.ledger.as_ref().map(|(inp, l)| BoundsReport {
            input: Some(inp.clone()),
            designs_checked: 1,
            entries: l
                .results()
                .into_iter()
                .map(BoundEntry::from_result)
                .collect(),
        }),
        None => {
            let mut entries: Option<Vec<BoundEntry>> = None;
            let mut checked = 0;
            for l in outcomes.iter().filter_map(|o| o.ledger.as_ref()) {
                checked += 1;
                let res = l.results();
                match &mut entries {
                    None => entries = Some(res.into_iter().map(BoundEntry::from_result).collect()),
                    Some(es) => es.iter_mut().zip(res).for_each(|(e, r)| e.absorb(r)),
                }
            }
            entries.map(|entries| BoundsReport {
                input: None,
                designs_checked: checked,
                entries,
            })
        }
    };
    let coverage = bounds_report.as_ref().map_or_else(Vec::new, |b| {
        coverage_checks(cfg.algorithm, b, &frequencies)
    });

    let exhaustive = cfg.compare_exhaustive.then(|| {
        let exhaustive_error = freq(&|r| r.exhaustive_exact == Some(false));
        let greedy_error = frequencies.selection_error;
        let lower_bound = bounds::exhaustive_lower_bound(penalties.r, cfg.sigma2);
        ExhaustiveComparison {
            greedy_error,
            exhaustive_error,
            lower_bound,
            lower_bound_holds: exhaustive_error.freq >= lower_bound - 2.0 * exhaustive_error.se,
            greedy_not_worse: greedy_error.freq
                <= exhaustive_error.freq + 2.0 * exhaustive_error.se.max(greedy_error.se),
        }
    });

    let d1 = pivot::pivot_df(cfg.t, cfg.mode);
    let d2 = cfg.n.saturating_sub(d1);
    let fs: Vec<f64> = outcomes.iter().filter_map(|o| o.record.f_stat).collect();
    let fo: Vec<f64> = outcomes.iter().filter_map(|o| o.record.f_oracle).collect();
    let pivot = PivotSummary {
        d1,
        d2,
        used: fs.len(),
        degenerate: count(&|r| r.selected_size == Some(0)),
        ks_distance: pivot::ks_distance_f(&fs, d1, d2),
        ks_distance_oracle: pivot::ks_distance_f(&fo, d1, d2),
        dkw_95: pivot::dkw_epsilon(fs.len().max(1), 0.05),
    };

    let summary = ExperimentSummary {
        config: cfg.clone(),
        penalties,
        replicates: reps,
        frequencies,
        greedy_family_violations: count(&|r| !r.greedy_family_ok),
        bounds: bounds_report,
        coverage,
        exhaustive,
        pivot,
        run_info: RunInfo {
            timestamp,
            runtime_secs: start.elapsed().as_secs_f64(),
            jobs,
        },
    };
    Ok(Experiment {
        summary,
        trials: outcomes.into_iter().map(|o| o.record).collect(),
    })
}

fn coverage_checks(
    alg: Algorithm,
    report: &BoundsReport,
    fr: &EventFrequencies,
) -> Vec<CoverageCheck> {
    let pairs: &[(&str, &str, Frequency)] = match alg {
        Algorithm::Sos => &[
            ("event_A", "event_a_fail", fr.event_a_fail),
            ("T1", "screen_fail", fr.screen_fail),
            ("T2", "order_fail", fr.order_fail),
            ("T3", "underfit", fr.underfit),
            ("T4", "overfit", fr.overfit),
            ("C1", "selection_error", fr.selection_error),
        ],
        Algorithm::Os => &[
            ("event_A", "event_a_fail", fr.event_a_fail),
            ("Th2", "order_fail", fr.order_fail),
            ("T3", "underfit", fr.underfit),
            ("T4", "overfit", fr.overfit),
            ("C3", "selection_error", fr.selection_error),
        ],
    };
    pairs
        .iter()
        .filter_map(|(b, ev, f)| {
            let e = report.entries.iter().find(|e| e.name == *b)?;
            Some(CoverageCheck {
                bound: b.to_string(),
                event: ev.to_string(),
                frequency: f.freq,
                se: f.se,
                bound_value: e.value,
                assumptions_ok: e.assumptions_ok,
                covered: f.freq <= e.value + 2.0 * f.se,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Parametrization;
    use crate::simlab::config::{BetaPattern, DesignKind, PenaltyRule};

    fn strong() -> ScenarioConfig {
        ScenarioConfig {
            n: 100,
            p: 10,
            t: 3,
            design_kind: DesignKind::Orthogonal,
            beta_pattern: BetaPattern::Constant { b: 30.0 },
            sigma2: 1.0,
            mode: Parametrization::Practical,
            penalty_rule: PenaltyRule::Corollary1 { a: 0.5 },
            replicates: 200,
            master_seed: 11,
            algorithm: Algorithm::Sos,
            fixed_design: true,
            compare_exhaustive: false,
            bound_a: None,
        }
    }

    #[test]
    fn categories_partition_replicates() {
        let mut c = strong();
        c.design_kind = DesignKind::IidGaussian;
        c.beta_pattern = BetaPattern::Decaying { b: 1.0, ratio: 0.5 };
        c.fixed_design = false;
        let e = run_experiment(&c).unwrap();
        let f = &e.summary.frequencies;
        let total = f.screen_fail.count
            + f.order_fail.count
            + f.underfit.count
            + f.overfit.count
            + f.exact.count;
        assert_eq!(total, c.replicates);
        for r in &e.trials {
            if r.exact {
                assert!(
                    r.screen_ok && r.order_ok && !r.underfit && !r.overfit && r.selection_correct
                );
            }
        }
        assert_eq!(e.summary.greedy_family_violations, 0);
        assert!(e
            .summary
            .bounds
            .as_ref()
            .is_some_and(|b| b.designs_checked == c.replicates));
    }

    #[test]
    fn strong_signal_recovers_support() {
        let e = run_experiment(&strong()).unwrap();
        assert!(e.summary.frequencies.exact.freq >= 0.99);
        assert_eq!(e.summary.coverage.len(), 6);
        assert!(
            e.summary
                .coverage
                .iter()
                .all(|c| c.assumptions_ok && c.covered),
            "{:?}",
            e.summary.coverage
        );
    }

    #[test]
    fn noiseless_recovery() {
        let mut c = strong();
        c.sigma2 = 0.0;
        c.penalty_rule = PenaltyRule::Explicit { r: 5.0, r_l: 4.0 };
        c.design_kind = DesignKind::IidGaussian;
        c.fixed_design = false;
        c.replicates = 20;
        let e = run_experiment(&c).unwrap();
        assert_eq!(e.summary.frequencies.exact.count, 20);
        assert!(e.summary.bounds.is_none());
    }

    #[test]
    fn single_replicate_summary_mirrors_record() {
        let mut c = strong();
        c.replicates = 1;
        let e = run_experiment(&c).unwrap();
        let r = &e.trials[0];
        assert_eq!(e.summary.frequencies.exact.count, r.exact as usize);
        assert_eq!(
            e.summary.frequencies.event_a_fail.count,
            !r.event_a as usize
        );
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let mut c = strong();
        c.design_kind = DesignKind::Ar1 { rho: 0.6 };
        c.beta_pattern = BetaPattern::Constant { b: 0.4 };
        c.compare_exhaustive = true;
        c.replicates = 64;
        let one = run_experiment_with(
            &c,
            &RunOptions {
                jobs: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let four = run_experiment_with(
            &c,
            &RunOptions {
                jobs: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one.trials, four.trials);
        assert_eq!(
            one.summary.numeric_content().unwrap(),
            four.summary.numeric_content().unwrap()
        );
    }

    #[test]
    fn os_with_exhaustive_comparison() {
        let mut c = strong();
        c.algorithm = Algorithm::Os;
        c.design_kind = DesignKind::IidGaussian;
        c.p = 6;
        c.n = 60;
        c.t = 2;
        c.beta_pattern = BetaPattern::Constant { b: 0.5 };
        c.compare_exhaustive = true;
        c.penalty_rule = PenaltyRule::Explicit { r: 4.0, r_l: 4.0 };
        let e = run_experiment(&c).unwrap();
        assert!(e.trials.iter().all(|r| r.screen_ok && r.s1_size == 6));
        let ex = e.summary.exhaustive.unwrap();
        assert!(ex.exhaustive_error.freq >= 0.0);
        assert!(e.summary.coverage.iter().any(|c| c.bound == "Th2"));
    }

    #[test]
    fn duplicated_spurious_design_runs() {
        let mut c = strong();
        c.design_kind = DesignKind::DuplicatedSpurious { copies: 2 };
        c.beta_pattern = BetaPattern::Constant { b: 3.0 };
        c.replicates = 30;
        let e = run_experiment(&c).unwrap();
        assert_eq!(e.trials.len(), 30);
        let b = e.summary.bounds.unwrap();
        let t1 = b.entries.iter().find(|e| e.name == "T1").unwrap();
        assert!(!t1.assumptions_ok);
    }
}
