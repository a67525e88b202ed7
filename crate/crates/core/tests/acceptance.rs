//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p sosel --test acceptance`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma_ur;

use sosel::bounds;
use sosel::design::rss;
use sosel::identifiability::{self, DiagnoseOptions, TruthSpec};
use sosel::lasso::{self, LassoOptions};
use sosel::select::{self, gic_path, order_by_t};
use sosel::simlab::{
    self, run_experiment_with, Algorithm, BetaPattern, DesignKind, PenaltyRule, RunOptions,
    ScenarioConfig,
};
use sosel::{standardize, Dataset, ModelSet, Parametrization, PenaltyPair, SelectOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn noise(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Gaussian design where some columns are a small perturbation of column 0.
fn near_collinear(rng: &mut ChaCha8Rng, n: usize, p: usize, eps: f64) -> DMatrix<f64> {
    let mut x = gaussian(rng, n, p);
    let base = x.column(0).into_owned();
    for j in (1..p).step_by(2) {
        let z = noise(rng, n);
        x.set_column(j, &(&base + z * eps));
    }
    x
}

fn sparse_response(
    rng: &mut ChaCha8Rng,
    x: &DMatrix<f64>,
    t: usize,
    scale: f64,
) -> (DVector<f64>, Vec<usize>) {
    let p = x.ncols();
    let mut support: Vec<usize> = Vec::new();
    while support.len() < t {
        let j = rng.random_range(0..p);
        if !support.contains(&j) {
            support.push(j);
        }
    }
    let mut y = noise(rng, x.nrows());
    for &j in &support {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        y.axpy(sign * scale * rng.random_range(0.5..2.0), &x.column(j), 1.0);
    }
    (y, support)
}

fn mode_of(i: u64) -> Parametrization {
    if i % 2 == 0 {
        Parametrization::Practical
    } else {
        Parametrization::Formal
    }
}

fn criterion_1() -> Outcome {
    let mut matched = 0;
    let mut total = 0;
    for i in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + i);
        let n = rng.random_range(15..=60);
        let p = rng.random_range(2..=10usize);
        let x = if i % 4 == 3 {
            near_collinear(&mut rng, n, p, 0.05)
        } else {
            gaussian(&mut rng, n, p)
        };
        let t = rng.random_range(1..=p.min(3));
        let (y, _) = sparse_response(&mut rng, &x, t, 0.5);
        let d = standardize(&Dataset::new(x, y).unwrap(), mode_of(i)).unwrap();
        let r = rng.random_range(0.0..3.0) * (n as f64).ln();
        let ordering = order_by_t(&d, &ModelSet::full(p)).unwrap();
        let path = gic_path(&d, &ordering, r).unwrap();
        let mut best = (0, f64::INFINITY);
        for k in 0..=p {
            let g = rss(&d, &ordering.prefix(k)).unwrap() + r * k as f64;
            if g < best.1 {
                best = (k, g);
            }
        }
        total += 1;
        matched += (best.0 == path.selected_size) as usize;
    }
    outcome(
        matched == total,
        format!("{matched}/{total} argmin matches"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut instances = 0;
    for i in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2_000 + i);
        let n = rng.random_range(12..=60);
        let p = rng.random_range(2..=10usize).min(n - 2);
        let x = if i % 2 == 1 {
            near_collinear(&mut rng, n, p, 1e-3)
        } else {
            gaussian(&mut rng, n, p)
        };
        let t = rng.random_range(1..=p.min(4));
        let (y, _) = sparse_response(&mut rng, &x, t, 1.0);
        let d = standardize(&Dataset::new(x, y).unwrap(), mode_of(i / 2)).unwrap();
        let ordering = order_by_t(&d, &ModelSet::full(p)).unwrap();
        let path = gic_path(&d, &ordering, 1.0).unwrap();
        for k in 0..=p {
            let direct = rss(&d, &ordering.prefix(k)).unwrap();
            worst = worst.max((direct - path.rss_path[k]).abs());
        }
        instances += 1;
    }
    outcome(
        worst <= 1e-8,
        format!("{instances} instances, max |ΔRSS| = {worst:.2e} (tol 1e-8)"),
    )
}

fn criterion_3() -> Outcome {
    let opts = LassoOptions::default();
    let mut solves = 0;
    let mut converged = 0;
    let mut worst_gap = 0.0f64;
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3_000 + i);
        let n = rng.random_range(10..=60);
        let p = rng.random_range(2..=15usize);
        let x = if i % 3 == 2 {
            near_collinear(&mut rng, n, p, 0.1)
        } else {
            gaussian(&mut rng, n, p)
        };
        let (y, _) = sparse_response(&mut rng, &x, 1.min(p), 1.0);
        let d = standardize(&Dataset::new(x, y).unwrap(), mode_of(i)).unwrap();
        let lmax = d.x0().tr_mul(d.y0()).amax();
        for frac in [0.02, 0.1, 0.3, 0.6, 0.95] {
            let fit = lasso::solve_lasso(&d, frac * lmax, &opts).unwrap();
            solves += 1;
            if fit.converged {
                converged += 1;
                worst_gap = worst_gap.max(lasso::kkt_gap(&d, &fit.theta_hat, frac * lmax));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3_999);
    let (n, p) = (40, 8);
    let q = gaussian(&mut rng, n, p).qr().q();
    let y = noise(&mut rng, n) * 3.0;
    let d = standardize(
        &Dataset::new(q.clone(), y.clone()).unwrap(),
        Parametrization::Formal,
    )
    .unwrap();
    let z = d.x0().tr_mul(d.y0());
    let lmax = z.amax();
    let mut worst_closed = 0.0f64;
    for g in 0..20 {
        let r_l = lmax * (0.01 + 1.09 * g as f64 / 19.0);
        let fit = lasso::solve_lasso(&d, r_l, &opts).unwrap();
        for j in 0..p {
            let soft = z[j].signum() * (z[j].abs() - r_l).max(0.0);
            worst_closed = worst_closed.max((fit.theta_hat[j] - soft).abs());
        }
    }
    outcome(
        worst_gap <= 1e-8 && worst_closed <= 1e-8 && converged > 0,
        format!(
            "{converged}/{solves} converged, max kkt_gap = {worst_gap:.2e}; \
             orthonormal max |θ̂ − soft| = {worst_closed:.2e} over 20 penalties"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut points = 0;
    let mut violations = 0;
    let mut worst_ref_gap = 0.0f64;
    for k in 1..=10usize {
        let start = if k == 1 {
            0.0
        } else {
            (k as f64 - 2.0).max(0.0)
        };
        for i in 1..=400 {
            let x = start + 0.01 * i as f64 + 0.0005 * (i * i) as f64;
            let (lo, hi) = bounds::chi2_tail_sandwich(k, x).unwrap();
            let reference = gamma_ur(k as f64 / 2.0, x / 2.0);
            let own = bounds::chi2_survival(k, x);
            worst_ref_gap = worst_ref_gap.max((own - reference).abs() / reference);
            let slack = 1e-10 * reference;
            if !(lo <= reference + slack && reference <= hi + slack) {
                violations += 1;
            }
            points += 1;
        }
    }
    outcome(
        violations == 0 && worst_ref_gap <= 1e-10,
        format!(
            "{points} grid points, {violations} violations; \
             series/fraction vs reference max rel gap {worst_ref_gap:.1e}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut failures: Vec<String> = Vec::new();
    let mut instances = 0;
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5_000 + i);
        let p = rng.random_range(3..=8usize);
        let n = rng.random_range(p + 6..=40);
        let x = match i % 3 {
            0 => gaussian(&mut rng, n, p),
            1 => near_collinear(&mut rng, n, p, 0.3),
            _ => {
                let z = gaussian(&mut rng, n, p);
                let mut x = z.clone();
                for j in 1..p {
                    let prev = x.column(j - 1).into_owned();
                    x.set_column(j, &(prev * 0.7 + z.column(j) * 0.5));
                }
                x
            }
        };
        let t = rng.random_range(1..=(p - 1).min(3));
        let (_, mut support) = sparse_response(&mut rng, &x, t, 1.0);
        support.sort_unstable();
        let beta: Vec<f64> = (0..t)
            .map(|_| {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                s * rng.random_range(0.3..3.0)
            })
            .collect();
        let d = standardize(&Dataset::new(x, DVector::zeros(n)).unwrap(), mode_of(i)).unwrap();
        let truth = TruthSpec::new(&d, ModelSet::from_indices(support), beta, 1.0).unwrap();
        let report = identifiability::diagnose(&d, &truth, &DiagnoseOptions::default()).unwrap();
        for (name, ok) in report.flags.named() {
            if !ok {
                failures.push(format!("instance {i}: {name}"));
            }
        }
        instances += 1;
    }
    let detail = if failures.is_empty() {
        format!("{instances} instances, 8 flags each, 0 violations")
    } else {
        format!("{} violations: {}", failures.len(), failures.join(", "))
    };
    outcome(failures.is_empty(), detail)
}

fn strong_config(n: usize, p: usize, t: usize, b: f64, mode: Parametrization) -> ScenarioConfig {
    ScenarioConfig {
        n,
        p,
        t,
        design_kind: DesignKind::Orthogonal,
        beta_pattern: BetaPattern::Constant { b },
        sigma2: 1.0,
        mode,
        penalty_rule: PenaltyRule::Corollary1 { a: 0.5 },
        replicates: 5000,
        master_seed: 6_000 + n as u64,
        algorithm: Algorithm::Sos,
        fixed_design: true,
        compare_exhaustive: false,
        bound_a: None,
    }
}

fn criterion_6() -> Outcome {
    let configs = [
        strong_config(100, 10, 3, 30.0, Parametrization::Practical),
        strong_config(80, 8, 2, 30.0, Parametrization::Formal),
        strong_config(120, 12, 3, 35.0, Parametrization::Practical),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for cfg in &configs {
        let e = run_experiment_with(cfg, &RunOptions::default()).unwrap();
        let s = &e.summary;
        let ledger_ok = s.bounds.as_ref().is_some_and(|b| {
            b.entries
                .iter()
                .filter(|e| ["T1", "T2", "T3", "T4"].contains(&e.name.as_str()))
                .all(|e| e.assumptions_ok)
        });
        let names: Vec<&str> = s.coverage.iter().map(|c| c.bound.as_str()).collect();
        let complete = ["event_A", "T1", "T2", "T3", "T4", "C1"]
            .iter()
            .all(|b| names.contains(b));
        let covered = s.coverage.iter().all(|c| c.covered);
        let bad: Vec<String> = s
            .coverage
            .iter()
            .filter(|c| !c.covered)
            .map(|c| format!("{} {:.4}>{:.2e}", c.bound, c.frequency, c.bound_value))
            .collect();
        pass &= ledger_ok && complete && covered;
        parts.push(format!(
            "n={} p={} t={}: ledger {} coverage {}/{}{}",
            cfg.n,
            cfg.p,
            cfg.t,
            if ledger_ok { "ok" } else { "FAILED" },
            s.coverage.iter().filter(|c| c.covered).count(),
            s.coverage.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(" [{}]", bad.join(", "))
            }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn exhaustive_config() -> ScenarioConfig {
    ScenarioConfig {
        n: 60,
        p: 8,
        t: 2,
        design_kind: DesignKind::IidGaussian,
        beta_pattern: BetaPattern::Constant { b: 0.6 },
        sigma2: 1.0,
        mode: Parametrization::Practical,
        penalty_rule: PenaltyRule::Explicit {
            r: 60f64.ln(),
            r_l: 2.0 * 60f64.ln().sqrt(),
        },
        replicates: 5000,
        master_seed: 7_007,
        algorithm: Algorithm::Os,
        fixed_design: false,
        compare_exhaustive: true,
        bound_a: None,
    }
}

fn criteria_7_8() -> (Outcome, Outcome) {
    let e = run_experiment_with(&exhaustive_config(), &RunOptions::default()).unwrap();
    let ex = e
        .summary
        .exhaustive
        .expect("exhaustive comparison requested");
    let lower = ex.exhaustive_error.freq >= ex.lower_bound - 2.0 * ex.exhaustive_error.se;
    let direction = ex.greedy_error.freq <= ex.exhaustive_error.freq + 2.0 * ex.exhaustive_error.se;
    (
        outcome(
            lower,
            format!(
                "exhaustive error {:.4} (se {:.4}) vs lower bound {:.4}",
                ex.exhaustive_error.freq, ex.exhaustive_error.se, ex.lower_bound
            ),
        ),
        outcome(
            direction,
            format!(
                "greedy OS error {:.4} vs exhaustive {:.4} + 2·{:.4}",
                ex.greedy_error.freq, ex.exhaustive_error.freq, ex.exhaustive_error.se
            ),
        ),
    )
}

fn criterion_9() -> Outcome {
    let cfg = ScenarioConfig {
        n: 40,
        p: 8,
        t: 3,
        design_kind: DesignKind::IidGaussian,
        beta_pattern: BetaPattern::Decaying { b: 2.0, ratio: 0.6 },
        sigma2: 1.0,
        mode: Parametrization::Practical,
        penalty_rule: PenaltyRule::Corollary1 { a: 0.5 },
        replicates: 2000,
        master_seed: 9_009,
        algorithm: Algorithm::Sos,
        fixed_design: false,
        compare_exhaustive: false,
        bound_a: None,
    };
    let pen = cfg.penalties().unwrap();
    let mut on_a = 0;
    let mut violations = 0;
    let mut exact_checked = 0;
    for i in 0..cfg.replicates as u64 {
        let trial = simlab::generate_trial(&cfg, i).unwrap();
        let d = standardize(&trial.dataset().unwrap(), cfg.mode).unwrap();
        if !lasso::event_a(&d, &trial.noise, pen.r_l).unwrap().holds {
            continue;
        }
        on_a += 1;
        let fit = lasso::solve_lasso(&d, pen.r_l, &LassoOptions::default())
            .unwrap()
            .require_converged()
            .unwrap();
        let truth =
            TruthSpec::new(&d, trial.support.clone(), trial.beta.clone(), cfg.sigma2).unwrap();
        let mu0 = truth.mean(&d);
        let rep =
            lasso::verify_oracle_inequalities(&d, &fit, &truth.beta_full(cfg.p), &mu0).unwrap();
        exact_checked += rep.l1_exact.is_some() as usize;
        violations += (!rep.all_hold()) as usize;
    }
    outcome(
        violations == 0 && on_a > 0 && exact_checked == on_a,
        format!(
            "{on_a}/{} replicates on event A, {violations} violations",
            cfg.replicates
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut cfg = strong_config(100, 10, 3, 30.0, Parametrization::Practical);
    cfg.design_kind = DesignKind::IidGaussian;
    cfg.fixed_design = false;
    cfg.replicates = 2000;
    cfg.master_seed = 10_010;
    let e = run_experiment_with(&cfg, &RunOptions::default()).unwrap();
    let s = &e.summary;
    let err = s.frequencies.selection_error.freq;
    let ks = s.pivot.ks_distance.unwrap_or(f64::INFINITY);
    let limit = 0.01 + simlab::dkw_epsilon(2000, 0.05);
    outcome(
        err <= 0.01 && ks <= limit,
        format!(
            "P(T̂≠T) = {err:.4}, KS(f̂, F({},{})) = {ks:.4} ≤ {limit:.4} ({} used)",
            s.pivot.d1, s.pivot.d2, s.pivot.used
        ),
    )
}

fn criterion_11() -> Outcome {
    let opts = SelectOptions::default();
    let mut scale_ok = 0;
    let mut shift_ok = 0;
    let n = 64;
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(11_000 + i);
        let p = rng.random_range(3..=12usize);
        // Values on a dyadic grid keep shifting and centering exact.
        let x = gaussian(&mut rng, n, p).map(|v| (v * 1024.0).round() / 1024.0);
        let t = rng.random_range(1..=p.min(3));
        let (y, _) = sparse_response(&mut rng, &x, t, 4.0);
        let y = y.map(|v| (v * 1024.0).round() / 1024.0);
        let pen = PenaltyPair::explicit(2.0 * (n as f64).ln(), 1.0).unwrap();
        let mode = mode_of(i);
        let base = select::run_sos(
            &Dataset::new(x.clone(), y.clone()).unwrap(),
            mode,
            &pen,
            &opts,
        )
        .unwrap();

        let factors: Vec<f64> = (0..p).map(|_| rng.random_range(0.05..20.0)).collect();
        let mut xs = x.clone();
        for (j, f) in factors.iter().enumerate() {
            xs.column_mut(j).scale_mut(*f);
        }
        let scaled =
            select::run_sos(&Dataset::new(xs, y.clone()).unwrap(), mode, &pen, &opts).unwrap();
        let (a, b) = (
            base.screen.as_ref().unwrap(),
            scaled.screen.as_ref().unwrap(),
        );
        if a.s0 == b.s0
            && a.s1 == b.s1
            && base.ordering.sequence == scaled.ordering.sequence
            && base.selected == scaled.selected
        {
            scale_ok += 1;
        }

        if mode == Parametrization::Practical {
            let c = rng.random_range(-50i32..50) as f64;
            let shifted = select::run_sos(
                &Dataset::new(x, y.add_scalar(c)).unwrap(),
                mode,
                &pen,
                &opts,
            )
            .unwrap();
            let intercept_moves = (shifted.intercept - base.intercept - c).abs()
                <= 1e-9 * (1.0 + base.intercept.abs() + c.abs());
            let mut aligned = shifted.clone();
            aligned.intercept = base.intercept;
            if aligned == base && intercept_moves {
                shift_ok += 1;
            }
        } else {
            shift_ok += 1;
        }
    }
    outcome(
        scale_ok == 100 && shift_ok == 100,
        format!("rescaling {scale_ok}/100 identical, response shift {shift_ok}/100 identical"),
    )
}

fn criterion_12() -> Outcome {
    let cfg = ScenarioConfig {
        n: 50,
        p: 8,
        t: 2,
        design_kind: DesignKind::Ar1 { rho: 0.5 },
        beta_pattern: BetaPattern::Decaying { b: 3.0, ratio: 0.5 },
        sigma2: 1.0,
        mode: Parametrization::Practical,
        penalty_rule: PenaltyRule::Corollary1 { a: 0.5 },
        replicates: 400,
        master_seed: 12_012,
        algorithm: Algorithm::Sos,
        fixed_design: false,
        compare_exhaustive: true,
        bound_a: None,
    };
    let run = |jobs| {
        run_experiment_with(
            &cfg,
            &RunOptions {
                jobs,
                ..Default::default()
            },
        )
        .unwrap()
    };
    let (one, four) = (run(1), run(4));
    let dir1 = tempfile::tempdir().unwrap();
    let dir4 = tempfile::tempdir().unwrap();
    simlab::persist(&one, dir1.path()).unwrap();
    simlab::persist(&four, dir4.path()).unwrap();
    let files_equal = [simlab::TRIALS_FILE, simlab::BOUNDS_FILE].iter().all(|f| {
        std::fs::read(dir1.path().join(f)).unwrap() == std::fs::read(dir4.path().join(f)).unwrap()
    });
    let same = one.summary.numeric_content().unwrap() == four.summary.numeric_content().unwrap()
        && one.trials == four.trials
        && files_equal;
    outcome(
        same,
        format!(
            "{} replicates, jobs 1 vs 4: summary, trials and persisted files {}",
            cfg.replicates,
            if same { "bit-identical" } else { "DIFFER" }
        ),
    )
}

fn main() {
    type Check = Box<dyn FnOnce() -> Outcome>;
    let mut results = Vec::new();
    let mut report = |id: &str, name: &str, limit: f64, out: Outcome, secs: f64| {
        let pass = out.pass && secs < limit;
        println!(
            "[{}] #{id} {name}: {} ({secs:.2}s, limit {limit:.0}s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail
        );
        results.push(pass);
    };
    let checks: Vec<(&str, &str, f64, Check)> = vec![
        (
            "1",
            "greedy GIC equals brute force over the nested family",
            10.0,
            Box::new(criterion_1),
        ),
        (
            "2",
            "QR path RSS matches direct projection",
            5.0,
            Box::new(criterion_2),
        ),
        (
            "3",
            "lasso KKT and orthonormal soft-threshold",
            5.0,
            Box::new(criterion_3),
        ),
        ("4", "chi-square tail sandwich", 1.0, Box::new(criterion_4)),
        (
            "5",
            "separation and restricted eigenvalue inequalities",
            60.0,
            Box::new(criterion_5),
        ),
        (
            "6",
            "per-step bound coverage, fixed design",
            300.0,
            Box::new(criterion_6),
        ),
    ];
    for (id, name, limit, f) in checks {
        let start = Instant::now();
        let out = f();
        report(id, name, limit, out, start.elapsed().as_secs_f64());
    }
    let start = Instant::now();
    let (c7, c8) = criteria_7_8();
    let secs = start.elapsed().as_secs_f64();
    report(
        "7",
        "exhaustive GIC error above its lower bound",
        120.0,
        c7,
        secs,
    );
    report(
        "8",
        "greedy OS error not above exhaustive error",
        120.0,
        c8,
        secs,
    );
    let rest: Vec<(&str, &str, f64, Check)> = vec![
        (
            "9",
            "oracle inequalities on event A",
            60.0,
            Box::new(criterion_9),
        ),
        ("10", "post-selection F pivot", 60.0, Box::new(criterion_10)),
        (
            "11",
            "rescaling and response-shift invariance",
            5.0,
            Box::new(criterion_11),
        ),
        (
            "12",
            "determinism across parallelism",
            60.0,
            Box::new(criterion_12),
        ),
    ];
    for (id, name, limit, f) in rest {
        let start = Instant::now();
        let out = f();
        report(id, name, limit, out, start.elapsed().as_secs_f64());
    }
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
