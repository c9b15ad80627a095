//! Parameter sweeps over one or two config paths.

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde_json::Value;

use cavity_eo::Regime;

use crate::commands::{scenario_headers, scenario_row, ConfigFailure, Ctx};
use crate::config::{apply_override, RunConfig};
use crate::output::Cell;

#[derive(Debug, Clone)]
pub struct Axis {
    pub path: String,
    pub values: Vec<f64>,
}

/// Parse `path=start:stop:points[:log|:lin]`.
pub fn parse_axis(text: &str) -> Result<Axis> {
    let (path, spec) = text.split_once('=').ok_or_else(|| {
        anyhow!(ConfigFailure(format!(
            "--axis expects <path>=<range>, got `{text}`"
        )))
    })?;
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(anyhow!(ConfigFailure(format!(
            "--axis range must be start:stop:points[:log|:lin], got `{spec}`"
        ))));
    }
    let parse = |s: &str, what: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| {
            anyhow!(ConfigFailure(format!(
                "--axis {what} `{s}` is not a number"
            )))
        })
    };
    let start = parse(parts[0], "start")?;
    let stop = parse(parts[1], "stop")?;
    let points: usize = parts[2].parse().map_err(|_| {
        anyhow!(ConfigFailure(format!(
            "--axis points `{}` is not a count",
            parts[2]
        )))
    })?;
    if points == 0 {
        return Err(anyhow!(ConfigFailure(
            "--axis needs at least one point".into()
        )));
    }
    let log = match parts.get(3).copied().unwrap_or("lin") {
        "log" => true,
        "lin" => false,
        other => {
            return Err(anyhow!(ConfigFailure(format!(
                "--axis scale must be `log` or `lin`, got `{other}`"
            ))))
        }
    };
    if log && (start <= 0.0 || stop <= 0.0) {
        return Err(anyhow!(ConfigFailure(
            "--axis log scale needs positive endpoints".into()
        )));
    }
    let values = (0..points)
        .map(|k| {
            let f = if points == 1 {
                0.0
            } else {
                k as f64 / (points - 1) as f64
            };
            if log {
                (start.ln() + f * (stop.ln() - start.ln())).exp()
            } else {
                start + f * (stop - start)
            }
        })
        .collect();
    Ok(Axis {
        path: path.to_owned(),
        values,
    })
}

/// Run the sweep: the cartesian grid of up to two axes, rows in grid order
/// regardless of which thread finished first.
pub fn run_sweep(ctx: &Ctx, axes_spec: &[String]) -> Result<()> {
    if axes_spec.is_empty() || axes_spec.len() > 2 {
        return Err(anyhow!(ConfigFailure(
            "sweep takes one or two --axis arguments".into()
        )));
    }
    let axes: Vec<Axis> = axes_spec
        .iter()
        .map(|s| parse_axis(s))
        .collect::<Result<_>>()?;

    let regime = ctx.config.scenario;
    if regime == Regime::BackActionEvading {
        return Err(anyhow!(ConfigFailure(
            "sweep covers the steady-state scenarios (cooling, parametric, parasitic)".into()
        )));
    }

    // Grid points in deterministic order: axis 0 outer, axis 1 inner.
    let mut grid: Vec<Vec<(usize, f64)>> = Vec::new();
    match axes.len() {
        1 => {
            for &v in &axes[0].values {
                grid.push(vec![(0, v)]);
            }
        }
        _ => {
            for &v0 in &axes[0].values {
                for &v1 in &axes[1].values {
                    grid.push(vec![(0, v0), (1, v1)]);
                }
            }
        }
    }

    let rows: Vec<Result<Vec<Cell>>> = grid
        .par_iter()
        .map(|point| {
            let mut doc = ctx.raw_config.clone();
            for (axis_idx, value) in point {
                set_numeric(&mut doc, &axes[*axis_idx].path, *value)?;
            }
            let cfg =
                RunConfig::from_value(doc).map_err(|e| anyhow!(ConfigFailure(format!("{e:#}"))))?;
            let resolved = cfg
                .resolve()
                .map_err(|e| anyhow!(ConfigFailure(format!("{e:#}"))))?;
            let (obs_row, _report) = scenario_row(&resolved)?;
            let mut row: Vec<Cell> = point.iter().map(|(_, v)| Cell::Float(*v)).collect();
            row.extend(obs_row);
            Ok(row)
        })
        .collect();
    let rows: Vec<Vec<Cell>> = rows.into_iter().collect::<Result<_>>()?;

    let mut headers: Vec<&str> = axes.iter().map(|a| a.path.as_str()).collect();
    headers.extend_from_slice(scenario_headers(regime));
    let (headers, rows) =
        crate::commands::filter_columns(&ctx.config.outputs, &headers, rows, axes.len())?;
    let outputs = ctx.emit("sweep", &headers, &rows)?;
    println!(
        "sweep: {} points over {} axis(es) -> {}",
        rows.len(),
        axes.len(),
        outputs.join(", ")
    );
    Ok(())
}

fn set_numeric(doc: &mut Value, path: &str, value: f64) -> Result<()> {
    // Keep exact integers integral so counts can be swept too.
    if value.fract() == 0.0 && value.abs() < 9.0e15 {
        apply_override(doc, &format!("{path}={}", value as i64))
    } else {
        apply_override(doc, &format!("{path}={value:e}"))
    }
}
