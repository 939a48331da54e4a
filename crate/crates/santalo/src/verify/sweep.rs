//! One report per parameter value, plus a plotting column.

use serde::Serialize;

use super::suites::{
    flow_functional_path, scale_check, viscosity_datum, viscosity_probes, weighted_equality,
};
use super::{Suite, SuiteConfig};
use crate::error::{Error, Result};
use crate::fenchel::vanishing_viscosity_table;
use crate::gaussian::{mahler_witness_limit, mahler_witness_norm, p_endpoint};
use crate::grid::format_float;
use crate::quadrature::QuadratureRule;
use crate::report::{CheckReport, Provenance};
use crate::volumes::VolumeOptions;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub report: CheckReport,
    /// The quantity meant for plotting against `value`.
    pub extra: f64,
}

/// Sweepable `(suite, axis)` pairs.
pub const SWEEP_AXES: [(Suite, &str); 5] = [
    (Suite::Fenchel, "eps"),
    (Suite::Mahler, "s"),
    (Suite::Weighted, "a"),
    (Suite::Gaussian, "s"),
    (Suite::Flows, "t"),
];

/// Kappa of the equality body used by the weighted sweep.
pub const SWEEP_KAPPA: f64 = 0.8;

fn row(axis: &str, value: f64, id: String, report: CheckReport, extra: f64) -> SweepRow {
    SweepRow { axis: axis.to_string(), value, report: CheckReport { check_id: id, runtime_ms: 0, ..report }, extra }
}

/// Monotonicity report of a sequence: each entry against its predecessor.
fn monotone_rows(axis: &str, suite: Suite, values: &[f64], series: &[f64], anchor: &str, increasing: bool, tol: f64) -> Vec<SweepRow> {
    values
        .iter()
        .zip(series)
        .enumerate()
        .map(|(k, (&v, &y))| {
            let prev = if k == 0 { y } else { series[k - 1] };
            let margin = if increasing { y - prev } else { prev - y };
            let rep = CheckReport::builder("", anchor)
                .input(axis, v)
                .tolerance(tol)
                .provenance(Provenance::Quadrature)
                .verdict(y, prev, margin, margin >= -tol);
            row(axis, v, format!("{suite}.sweep[{axis}={v}]"), rep, y)
        })
        .collect()
}

/// Runs one check per value of `axis`; rows keep the order of `values`.
pub fn sweep(cfg: &SuiteConfig, axis: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if !SWEEP_AXES.contains(&(cfg.suite, axis)) {
        let known: Vec<String> = SWEEP_AXES.iter().map(|(s, a)| format!("{s}/{a}")).collect();
        return Err(Error::Config(format!("no sweep axis '{axis}' for suite {}; known: {}", cfg.suite, known.join(", "))));
    }
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("sweep values must be a nonempty list of finite numbers".into()));
    }
    let suite = cfg.suite;
    match (suite, axis) {
        (Suite::Fenchel, _) => {
            let table = vanishing_viscosity_table(
                &viscosity_datum()?,
                values,
                &viscosity_probes(),
                &QuadratureRule::gauss_hermite(cfg.quadrature_points, 1)?,
            )?;
            let gaps: Vec<f64> = table.rows.iter().map(|r| r.sup_gap).collect();
            let ordered: Vec<bool> = values.windows(2).map(|w| w[1] < w[0]).collect();
            // A decreasing viscosity should decrease the gap.
            let increasing = !ordered.iter().all(|&d| d);
            Ok(monotone_rows(axis, suite, values, &gaps, "vanishing_viscosity_gap", increasing, 0.0))
        }
        (Suite::Mahler, _) => {
            let tol = cfg.tol("mahler.witness", 0.02);
            let limit = mahler_witness_limit(1);
            values
                .iter()
                .map(|&s| {
                    let v = mahler_witness_norm(1, s)?.powf(-p_endpoint(s));
                    let rep = CheckReport::builder("", "one_sided_exponential_witness_limit")
                        .input("s", s)
                        .tolerance(tol)
                        .provenance(Provenance::ClosedForm)
                        .equal(v, limit);
                    Ok(row(axis, s, format!("{suite}.sweep[{axis}={s}]"), rep, v))
                })
                .collect()
        }
        (Suite::Weighted, _) => {
            let tol = cfg.tol("weighted.equality", 1e-3);
            let opts = VolumeOptions { mc_samples: cfg.mc_samples, seed: cfg.seed, ..Default::default() };
            values
                .iter()
                .map(|&a| {
                    let reps = weighted_equality(SWEEP_KAPPA, a, &opts, tol)?;
                    let rep = reps.into_iter().next().ok_or_else(|| Error::Config("no weighted report".into()))?;
                    let extra = rep.margin;
                    Ok(row(axis, a, format!("{suite}.sweep[{axis}={a}]"), rep, extra))
                })
                .collect()
        }
        (Suite::Gaussian, _) => {
            let tol = cfg.tol("gaussian.scale", 1e-12);
            values
                .iter()
                .map(|&s| {
                    let rep = scale_check(2.0, s, cfg.dim, tol)?;
                    let extra = rep.lhs;
                    Ok(row(axis, s, format!("{suite}.sweep[{axis}={s}]"), rep, extra))
                })
                .collect()
        }
        (Suite::Flows, _) => {
            let times = values;
            if times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
                return Err(Error::Config("flow times must be nonnegative and increasing".into()));
            }
            let series = flow_functional_path(cfg, 0.5, 0.5, times)?;
            Ok(monotone_rows(axis, suite, times, &series, "fokker_planck_monotone_functional", false, cfg.tol("flows.monotone", 1e-6)))
        }
        _ => unreachable!("axis table checked above"),
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("axis,value,check_id,lhs,rhs,margin,passed,extra\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.axis,
            format_float(r.value),
            r.report.check_id,
            format_float(r.report.lhs),
            format_float(r.report.rhs),
            format_float(r.report.margin),
            r.report.passed,
            format_float(r.extra)
        ));
    }
    out
}
