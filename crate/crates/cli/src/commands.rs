use std::path::Path;

use serde::Serialize;

use sosel::design::{self, StandardizedDesign};
use sosel::identifiability::{self, DiagnoseOptions};
use sosel::io::{self, CsvOptions, NamedDataset, ResponseColumn, TruthFile};
use sosel::lasso::{self, LassoFit, LassoOptions, ScreenResult};
use sosel::select::{self, SelectOptions};
use sosel::simlab::{self, RunOptions, ScenarioConfig};
use sosel::{bounds, Error, ModelSet, Parametrization, PenaltyPair};

use crate::output;
use crate::{
    AlgorithmArg, BoundsArgs, DataArgs, DiagnoseArgs, FitArgs, Format, GlobalOptions, SimulateArgs,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable input files; exit code 2.
    Usage(String),
    /// The library refused the computation; exit code 1.
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Usage(format!("{context}: {e}"))
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Usage(format!("{command} does not support --format {format:?}").to_lowercase())
}

fn load_data(args: &DataArgs) -> CliResult<NamedDataset> {
    let response = args
        .response
        .as_deref()
        .map(str::parse::<ResponseColumn>)
        .transpose()
        .map_err(usage("--response"))?;
    let opts = CsvOptions {
        has_header: !args.no_header,
        response,
    };
    io::read_dataset_path(&args.data, &opts).map_err(usage(&args.data.display().to_string()))
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(usage(&path.display().to_string()))
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize)]
pub struct Coefficient {
    /// 1-based.
    pub index: usize,
    pub name: String,
    pub beta: f64,
}

#[derive(Debug, Serialize)]
pub struct PathStep {
    pub size: usize,
    /// 1-based predictor entering at this step.
    pub added: Option<usize>,
    pub rss: f64,
    pub gic: f64,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub algorithm: String,
    pub mode: Parametrization,
    pub n: usize,
    pub p: usize,
    pub response: String,
    pub penalties: PenaltyPair,
    pub selected: ModelSet,
    pub coefficients: Vec<Coefficient>,
    pub intercept: Option<f64>,
    pub path: Vec<PathStep>,
    pub lasso: Option<LassoFit>,
    pub screen: Option<ScreenResult>,
    pub exhaustive_evaluated: Option<u64>,
}

fn fit_penalties(args: &FitArgs, design: &StandardizedDesign) -> CliResult<PenaltyPair> {
    if let Some(r) = args.penalty_r {
        let r_l = args.penalty_rl.unwrap_or(2.0 * r.max(0.0).sqrt());
        return Ok(PenaltyPair::explicit(r, r_l).map_err(usage("penalty"))?);
    }
    let sigma2 = if args.sigma2.eq_ignore_ascii_case("auto") {
        let s = design::full_model_sigma2(design).map_err(|e| {
            CliError::Usage(format!(
                "cannot estimate sigma2 ({e}); pass --sigma2 <value>"
            ))
        })?;
        log::info!("estimated sigma2 = {s}");
        s
    } else {
        args.sigma2.parse::<f64>().map_err(usage("--sigma2"))?
    };
    lasso::default_penalties(design.p(), sigma2, args.a).map_err(usage("penalty"))
}

pub fn fit(args: &FitArgs, global: &GlobalOptions) -> CliResult<String> {
    let named = load_data(&args.data)?;
    let mode: Parametrization = args.data.mode.into();
    let design = design::standardize(&named.data, mode)?;
    let penalties = fit_penalties(args, &design)?;
    if !(args.tol > 0.0) || args.max_iter == 0 {
        return Err(CliError::Usage(
            "--tol and --max-iter must be positive".into(),
        ));
    }
    let opts = SelectOptions {
        lasso: LassoOptions {
            tol: args.tol,
            max_iter: args.max_iter,
        },
    };
    log::debug!(
        "n = {}, p = {}, r = {}, r_L = {}",
        design.n(),
        design.p(),
        penalties.r,
        penalties.r_l
    );

    let mut exhaustive_evaluated = None;
    let (selected, ordering, gic, lasso_fit, screen) = match args.algorithm {
        AlgorithmArg::Sos | AlgorithmArg::Os => {
            let out = if args.algorithm == AlgorithmArg::Sos {
                select::run_sos_on(&design, &penalties, &opts)?
            } else {
                select::run_os_on(&design, penalties.r, &opts)?
            };
            (
                out.selected,
                out.ordering.sequence,
                out.path,
                out.lasso,
                out.screen,
            )
        }
        AlgorithmArg::Exhaustive => {
            let max_size = design.p().min(design.n_effective().saturating_sub(1));
            let ex = select::exhaustive_gic(&design, penalties.r, max_size)?;
            exhaustive_evaluated = Some(ex.evaluated);
            // Report the path along the chosen model's own t ordering.
            let ordering = select::order_by_t(&design, &ex.model)?;
            let mut path = select::gic_path(&design, &ordering, penalties.r)?;
            path.selected_size = ex.model.len();
            (ex.model, ordering.sequence, path, None, None)
        }
    };
    let refit = design::refit(&design, &selected)?;
    let coefficients = selected
        .iter()
        .zip(&refit.beta_hat)
        .map(|(j, b)| Coefficient {
            index: j + 1,
            name: named.predictor_names[j].clone(),
            beta: *b,
        })
        .collect();
    let intercept =
        (mode == Parametrization::Practical).then(|| design.intercept(&selected, &refit.beta_hat));
    let path = gic
        .rss_path
        .iter()
        .zip(&gic.gic_path)
        .enumerate()
        .map(|(k, (rss, g))| PathStep {
            size: k,
            added: k.checked_sub(1).map(|i| ordering[i] + 1),
            rss: *rss,
            gic: *g,
        })
        .collect();
    let report = FitReport {
        algorithm: format!("{:?}", args.algorithm).to_lowercase(),
        mode,
        n: design.n(),
        p: design.p(),
        response: named.response_name.clone(),
        penalties,
        selected,
        coefficients,
        intercept,
        path,
        lasso: lasso_fit,
        screen,
        exhaustive_evaluated,
    };
    match global.format {
        Format::Json => to_json(&report),
        Format::Table => Ok(output::fit_table(&report)),
        Format::Tsv => Ok(output::fit_tsv(&report)),
    }
}

pub fn simulate(args: &SimulateArgs, global: &GlobalOptions) -> CliResult<String> {
    let text = read_text(&args.config)?;
    let mut cfg: ScenarioConfig =
        serde_json::from_str(&text).map_err(usage(&args.config.display().to_string()))?;
    if let Some(seed) = global.seed {
        cfg.master_seed = seed;
    }
    cfg.compare_exhaustive |= args.compare_exhaustive;
    cfg.fixed_design |= args.fixed_design;
    cfg.validate()
        .map_err(usage(&args.config.display().to_string()))?;
    if global.format == Format::Tsv {
        return Err(unsupported(global.format, "simulate"));
    }
    let exp = simlab::run_experiment_with(
        &cfg,
        &RunOptions {
            jobs: args.jobs,
            ..Default::default()
        },
    )?;
    log::info!(
        "{} replicates in {:.2}s on {} threads",
        cfg.replicates,
        exp.summary.run_info.runtime_secs,
        exp.summary.run_info.jobs
    );
    if let Some(dir) = &args.out {
        simlab::persist(&exp, dir)?;
        log::info!("wrote results to {}", dir.display());
    }
    match global.format {
        Format::Json => to_json(&exp.summary),
        _ => Ok(output::summary_table(&exp.summary)),
    }
}

pub fn diagnose(args: &DiagnoseArgs, global: &GlobalOptions) -> CliResult<String> {
    let named = load_data(&args.data)?;
    let truth_file = TruthFile::from_json_str(&read_text(&args.truth)?)
        .map_err(usage(&args.truth.display().to_string()))?;
    let design = design::standardize(&named.data, args.data.mode.into())?;
    let truth = truth_file.truth_spec(&design)?;
    if args.restarts == 0 {
        return Err(CliError::Usage("--restarts must be positive".into()));
    }
    let opts = DiagnoseOptions {
        restarts: args.restarts,
        ..Default::default()
    };
    let report = identifiability::diagnose(&design, &truth, &opts)?;
    match global.format {
        Format::Json => to_json(&report),
        Format::Table => Ok(output::diagnose_table(&report)),
        Format::Tsv => Err(unsupported(global.format, "diagnose")),
    }
}

pub fn bounds(args: &BoundsArgs, global: &GlobalOptions) -> CliResult<String> {
    let text = read_text(&args.input)?;
    let input: bounds::BoundInput =
        serde_json::from_str(&text).map_err(usage(&args.input.display().to_string()))?;
    input
        .validate()
        .map_err(usage(&args.input.display().to_string()))?;
    let ledger = bounds::evaluate_all(&input)?;
    match global.format {
        Format::Json => to_json(&ledger),
        Format::Table => Ok(output::bounds_table(&ledger)),
        Format::Tsv => Ok(output::bounds_tsv(&ledger)),
    }
}
