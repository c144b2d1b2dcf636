use serde::{Deserialize, Serialize};

use degen_dt::analytic::{
    grid2_distribution, polygon_distribution, probability_levels, OrthantMethod, ProbabilityEntry, ProbabilityLevel,
};
use degen_dt::corner::{corner_table, CornerRow};
use degen_dt::largegrid::{component_census, walk_statistics, CensusStats, GridModel, WalkStats};
use degen_dt::pointsets::{make_grid, make_polygon, perturb, PerturbationParams, SeedSpec};
use degen_dt::simulate::{
    estimate_grid_distribution, estimate_grid_distribution_with, estimate_polygon_distribution,
    estimate_triangle_frequencies, ReportKind,
};
use degen_dt::stats::{compensated_sum, one_sided_p_value};
use degen_dt::triangulate::canonical_class;

use crate::error::CliError;
use crate::manifest::{Output, Payload, RunManifest};
use crate::{report, Command, ModelArg, SetKind};

/// First-order probabilities of every triangulation of one configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub kind: ReportKind,
    pub sum: f64,
    pub entries: Vec<AnalyticEntry>,
    /// Codes grouped by equal probability, highest first.
    pub levels: Vec<ProbabilityLevel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<AnalyticClass>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticEntry {
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub probability: f64,
    pub standard_error: f64,
    pub method: OrthantMethod,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticClass {
    pub class: String,
    pub size: usize,
    pub probability_per_code: f64,
    pub probability_total: f64,
}

/// Runs of one or both grid models with the one-sided comparison when both
/// are present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkReport {
    pub runs: Vec<WalkStats>,
    /// p-value for "DT walks are longer than uniform ones".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value_dt_longer: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusReport {
    pub runs: Vec<CensusStats>,
    /// p-value for "DT grids have fewer components than uniform ones".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value_dt_fewer: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CornerReport {
    pub nodes: usize,
    pub tolerance: f64,
    pub rows: Vec<CornerRow>,
}

fn models(choice: Option<ModelArg>) -> Vec<GridModel> {
    match choice {
        Some(m) => vec![m.into()],
        None => vec![GridModel::DtPerturbed, GridModel::UniformDiagonals],
    }
}

fn find<T>(runs: &[T], model: GridModel, of: impl Fn(&T) -> GridModel) -> Option<&T> {
    runs.iter().find(|r| of(r) == model)
}

fn json<T: Serialize>(value: &T) -> Result<Payload, CliError> {
    Ok(Payload::Json(serde_json::to_value(value)?))
}

fn analytic_report<C: std::fmt::Display>(
    kind: ReportKind,
    entries: &[ProbabilityEntry<C>],
    class_of: impl Fn(&C) -> Option<String>,
) -> AnalyticReport {
    let max_se = entries.iter().map(|e| e.standard_error).fold(0.0, f64::max);
    let levels = probability_levels(entries, (4.0 * max_se).max(1e-9));
    let rows: Vec<AnalyticEntry> = entries
        .iter()
        .map(|e| AnalyticEntry {
            code: e.code.to_string(),
            class: class_of(&e.code),
            probability: e.probability,
            standard_error: e.standard_error,
            method: e.method,
        })
        .collect();
    let mut classes: Vec<AnalyticClass> = Vec::new();
    for row in &rows {
        let Some(class) = &row.class else { continue };
        match classes.iter_mut().find(|c| &c.class == class) {
            Some(c) => {
                c.size += 1;
                c.probability_total += row.probability;
            }
            None => classes.push(AnalyticClass {
                class: class.clone(),
                size: 1,
                probability_per_code: 0.0,
                probability_total: row.probability,
            }),
        }
    }
    for c in &mut classes {
        c.probability_per_code = c.probability_total / c.size as f64;
    }
    classes.sort_by(|a, b| b.probability_per_code.total_cmp(&a.probability_per_code));
    AnalyticReport {
        kind,
        sum: compensated_sum(entries.iter().map(|e| e.probability)),
        entries: rows,
        levels,
        classes,
    }
}

/// Executes one subcommand and returns what should be written.
pub fn run(command: &Command) -> Result<Output, CliError> {
    let mut out = Output::new(command.clone());
    match command {
        Command::Gen(a) => {
            let set = match a.kind {
                SetKind::Grid => make_grid(a.size)?,
                SetKind::Polygon => make_polygon(a.size)?,
            };
            let set = if a.perturb {
                out.master_seed = Some(a.seed.seed);
                let params = PerturbationParams::for_set(&set)?;
                perturb(&set, &params, SeedSpec::new(a.seed.seed, a.iteration))?
            } else {
                set
            };
            out.payload = Payload::Text(set.to_csv());
        }
        Command::SimGrid(a) => {
            let rep = match a.top_k {
                Some(k) => estimate_grid_distribution_with(a.m, a.iters, a.seed.seed, Some(k))?,
                None => estimate_grid_distribution(a.m, a.iters, a.seed.seed)?,
            };
            out.master_seed = Some(rep.master_seed);
            out.discards = Some(rep.discards);
            out.payload = json(&rep)?;
        }
        Command::SimPoly(a) => {
            let rep = estimate_polygon_distribution(a.n, a.iters, a.seed.seed, a.top_k)?;
            out.master_seed = Some(rep.master_seed);
            out.discards = Some(rep.discards);
            out.payload = json(&rep)?;
        }
        Command::TriFreq(a) => {
            let rep = estimate_triangle_frequencies(a.n, a.iters, a.seed.seed)?;
            out.master_seed = Some(rep.master_seed);
            out.discards = Some(rep.discards);
            out.payload = json(&rep)?;
        }
        Command::AnalyticGrid2(a) => {
            let entries = grid2_distribution(a.target_se)?;
            let rep = analytic_report(ReportKind::Grid { m: 2 }, &entries, |_| None);
            out.payload = json(&rep)?;
        }
        Command::AnalyticPoly(a) => {
            let entries = polygon_distribution(a.n, a.target_se)?;
            let rep = analytic_report(ReportKind::Polygon { n: a.n }, &entries, |c| {
                Some(canonical_class(c).to_string())
            });
            out.payload = json(&rep)?;
        }
        Command::Walk(a) => {
            let runs = models(a.model)
                .into_iter()
                .map(|m| walk_statistics(m, a.walks, a.cap, a.seed.seed))
                .collect::<Result<Vec<_>, _>>()?;
            let dt = find(&runs, GridModel::DtPerturbed, |r| r.model);
            let ut = find(&runs, GridModel::UniformDiagonals, |r| r.model);
            let p_value_dt_longer = dt.zip(ut).map(|(d, u)| d.p_value_greater(u));
            out.master_seed = Some(a.seed.seed);
            out.discards = Some(runs.iter().map(|r| r.discards).sum());
            out.payload = json(&WalkReport {
                runs,
                p_value_dt_longer,
            })?;
        }
        Command::Census(a) => {
            let runs = models(a.model)
                .into_iter()
                .map(|m| component_census(a.m, a.iters, m, a.seed.seed))
                .collect::<Result<Vec<_>, _>>()?;
            let dt = find(&runs, GridModel::DtPerturbed, |r| r.model);
            let ut = find(&runs, GridModel::UniformDiagonals, |r| r.model);
            let p_value_dt_fewer = dt.zip(ut).map(|(d, u)| {
                one_sided_p_value(u.mean_components, u.standard_error, d.mean_components, d.standard_error)
            });
            out.master_seed = Some(a.seed.seed);
            out.discards = Some(runs.iter().map(|r| r.discards).sum());
            out.payload = json(&CensusReport { runs, p_value_dt_fewer })?;
        }
        Command::Corner(a) => {
            let rows = corner_table(&a.n, a.nodes, a.tolerance, a.mc_iters, a.seed.seed)?;
            let failed: Vec<String> = rows.iter().filter(|r| r.p.is_none()).map(|r| r.n.to_string()).collect();
            if a.mc_iters > 0 {
                out.master_seed = Some(a.seed.seed);
                out.discards = Some(rows.iter().filter_map(|r| r.q_discards).sum());
            }
            if !failed.is_empty() {
                out.failure = Some(CliError::numeric(
                    "accuracy_failure",
                    format!(
                        "corner quadrature changed by more than {} under node doubling for n = {}",
                        a.tolerance,
                        failed.join(", ")
                    ),
                ));
            }
            out.payload = json(&CornerReport {
                nodes: a.nodes,
                tolerance: a.tolerance,
                rows,
            })?;
        }
        Command::Report(a) => {
            out.payload = Payload::Text(report::convert(a)?);
        }
        Command::Rerun(a) => {
            let recorded = RunManifest::load(&a.input)?.command()?;
            if matches!(recorded, Command::Rerun(_)) {
                return Err(CliError::usage("a manifest cannot record a rerun"));
            }
            return run(&recorded);
        }
    }
    Ok(out)
}
