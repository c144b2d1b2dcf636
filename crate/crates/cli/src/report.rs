//! Conversion of saved reports to CSV and SVG.

use serde::de::DeserializeOwned;
use serde_json::Value;

use degen_dt::corner::corner_table_csv;
use degen_dt::largegrid::GridModel;
use degen_dt::plot::bar_chart_svg;
use degen_dt::simulate::{DistributionReport, TriangleReport};

use crate::commands::{AnalyticReport, CensusReport, CornerReport, WalkReport};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::{Format, ReportArgs};

/// Bars shown for the largest distributions.
const MAX_BARS: usize = 40;

fn parse<T: DeserializeOwned>(report: &Value) -> Result<T, CliError> {
    Ok(serde_json::from_value(report.clone())?)
}

fn model_name(m: GridModel) -> &'static str {
    match m {
        GridModel::DtPerturbed => "dt",
        GridModel::UniformDiagonals => "uniform",
    }
}

/// CSV body, chart title and chart bars.
type Table = (String, String, Vec<(String, f64)>);

fn tabulate(command: &str, report: &Value) -> Result<Table, CliError> {
    Ok(match command {
        "sim-grid" | "sim-poly" => {
            let r: DistributionReport = parse(report)?;
            let mut csv = r.to_csv();
            if !r.classes.is_empty() {
                csv.push('\n');
                csv.push_str(&r.classes_csv());
            }
            let bars = r
                .entries
                .iter()
                .take(MAX_BARS)
                .map(|e| (e.code.clone(), e.frequency))
                .collect();
            (csv, "Empirical frequency by code".into(), bars)
        }
        "tri-freq" => {
            let r: TriangleReport = parse(report)?;
            let bars = r
                .arc_classes
                .iter()
                .take(MAX_BARS)
                .map(|c| (format!("{:?}", c.arcs), c.frequency))
                .collect();
            (r.to_csv(), "Triangle frequency by arc class".into(), bars)
        }
        "analytic-grid2" | "analytic-poly" => {
            let r: AnalyticReport = parse(report)?;
            let mut csv = String::from("code,class,probability,standard_error,method\n");
            for e in &r.entries {
                csv.push_str(&format!(
                    "{},{},{},{},{:?}\n",
                    e.code,
                    e.class.as_deref().unwrap_or(""),
                    e.probability,
                    e.standard_error,
                    e.method
                ));
            }
            let mut entries: Vec<_> = r.entries.iter().collect();
            entries.sort_by(|a, b| b.probability.total_cmp(&a.probability));
            let bars = entries
                .iter()
                .take(MAX_BARS)
                .map(|e| (e.code.clone(), e.probability))
                .collect();
            (csv, "First-order probability by code".into(), bars)
        }
        "walk" => {
            let r: WalkReport = parse(report)?;
            let mut csv = String::from("model,length,count\n");
            let mut bars = Vec::new();
            for run in &r.runs {
                let name = model_name(run.model);
                for line in run.to_csv().lines().skip(1) {
                    csv.push_str(&format!("{name},{line}\n"));
                }
                for (len, count) in &run.histogram {
                    bars.push((format!("{name} {len}"), *count as f64 / run.walks as f64));
                }
                bars.push((
                    format!("{name} >{}", run.cap),
                    run.overflow_count as f64 / run.walks as f64,
                ));
            }
            (csv, "Cycle length distribution".into(), bars)
        }
        "census" => {
            let r: CensusReport = parse(report)?;
            let mut csv = String::from(
                "model,m,iterations,discards,mean_components,sd_components,standard_error,mean_component_size\n",
            );
            for s in &r.runs {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    model_name(s.model),
                    s.m,
                    s.iterations,
                    s.discards,
                    s.mean_components,
                    s.sd_components,
                    s.standard_error,
                    s.mean_component_size
                ));
            }
            let bars = r
                .runs
                .iter()
                .map(|s| (model_name(s.model).to_string(), s.mean_components))
                .collect();
            (csv, "Mean number of components".into(), bars)
        }
        "corner" => {
            let r: CornerReport = parse(report)?;
            let bars = r
                .rows
                .iter()
                .filter_map(|row| row.p.map(|p| (format!("n={}", row.n), p)))
                .collect();
            (corner_table_csv(&r.rows), "Corner triangle probability".into(), bars)
        }
        other => return Err(CliError::usage(format!("no tabular view for `{other}` output"))),
    })
}

/// Renders the report at `args.input` in the requested format, writing the
/// SVG chart as a side effect when asked.
pub fn convert(args: &ReportArgs) -> Result<String, CliError> {
    let text =
        std::fs::read_to_string(&args.input).map_err(|e| CliError::io(format!("{}: {e}", args.input.display())))?;
    let envelope: Value = serde_json::from_str(&text)?;
    let manifest: RunManifest = serde_json::from_value(
        envelope
            .get("manifest")
            .cloned()
            .ok_or_else(|| CliError::usage("input has no embedded manifest"))?,
    )?;
    let report = envelope
        .get("report")
        .ok_or_else(|| CliError::usage("input has no report"))?;
    let (csv, title, bars) = tabulate(&manifest.command, report)?;
    if let Some(svg) = &args.svg {
        std::fs::write(svg, bar_chart_svg(&title, &bars))
            .map_err(|e| CliError::io(format!("{}: {e}", svg.display())))?;
    }
    Ok(match args.format {
        Format::Json => serde_json::to_string_pretty(&envelope)? + "\n",
        Format::Csv => csv,
    })
}
