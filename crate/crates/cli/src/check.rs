use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tgeom::checker::{
    degeneracy_probe, run_suite, ConditionId, ConditionReport, ProbeOptions, SuiteOptions, Verdict,
};
use tgeom::solve::SearchBox;
use tgeom::worldfunc::load_geometry;
use tgeom::{Point, PointVector, WorldFunction};

use crate::io::{parse_point, write_json, CliError, CliResult, Overrides};
use crate::Common;

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Geometry spec (JSON).
    #[arg(long)]
    geometry: PathBuf,
    /// `COND:VERDICT` (e.g. `IV:fail`) or `all-pass`; repeatable.
    #[arg(long)]
    expect: Vec<String>,
    /// Degeneracy probe from the origin along this coordinate direction,
    /// with unit length; repeatable.
    #[arg(long, value_name = "X0,X1,...")]
    probe: Vec<String>,
    /// Skip the metric axiom checks.
    #[arg(long)]
    no_metric: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, PartialEq)]
enum Expectation {
    AllPass,
    One(ConditionId, Verdict),
}

impl Expectation {
    fn parse(s: &str) -> CliResult<Self> {
        if s.eq_ignore_ascii_case("all-pass") {
            return Ok(Expectation::AllPass);
        }
        let (c, v) = s.split_once(':').ok_or_else(|| {
            CliError::Input(format!(
                "--expect takes COND:VERDICT or all-pass, got `{s}`"
            ))
        })?;
        Ok(Expectation::One(c.trim().parse()?, v.trim().parse()?))
    }
}

#[derive(Serialize)]
struct Outcome {
    expectation: String,
    met: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    geometry: &'a str,
    seed: u64,
    conditions: &'a [ConditionReport],
    expectations: Vec<Outcome>,
}

pub fn run(args: CheckArgs) -> CliResult {
    let expectations = args
        .expect
        .iter()
        .map(|s| Expectation::parse(s))
        .collect::<CliResult<Vec<_>>>()?;
    let g = load_geometry(&args.geometry)?;

    let mut tol = Overrides::parse(&args.common.tol)?;
    let defaults = SuiteOptions::default();
    let opts = SuiteOptions {
        seed: args.common.seed,
        tol: tol.take("tol")?.unwrap_or(defaults.tol),
        sample_size: tol.take("sample_size")?,
        half_width: tol.take("half_width")?.unwrap_or(defaults.half_width),
        restarts: tol.take("restarts")?.unwrap_or(defaults.restarts),
        continuity_targets: tol
            .take("continuity_targets")?
            .unwrap_or(defaults.continuity_targets),
        continuity_starts: tol
            .take("continuity_starts")?
            .unwrap_or(defaults.continuity_starts),
        box_factor: tol.take("box_factor")?.unwrap_or(defaults.box_factor),
        metric: !args.no_metric,
    };
    let probe_defaults = ProbeOptions::default();
    let probe_opts = ProbeOptions {
        starts: tol.take("probe_starts")?.unwrap_or(probe_defaults.starts),
        seed: args.common.seed.wrapping_add(4),
        tol: tol.take("probe_tol")?.unwrap_or(probe_defaults.tol),
        cluster_radius: tol
            .take("cluster_radius")?
            .unwrap_or(probe_defaults.cluster_radius),
    };
    let probe_box: f64 = tol.take("probe_box")?.unwrap_or(3.0);
    tol.finish()?;

    let mut reports = run_suite(&g, &opts)?;
    for dir in &args.probe {
        let dir = parse_point(dir)?;
        if dir.dim() != g.dim() {
            return Err(CliError::Input(format!(
                "probe direction has {} coordinates, geometry has {}",
                dir.dim(),
                g.dim()
            )));
        }
        let p0 = Point::origin(g.dim());
        let direction = PointVector::new(p0.clone(), dir);
        let bx = SearchBox::cube(p0.coords(), probe_box);
        reports.push(degeneracy_probe(
            &g,
            &p0,
            &direction,
            1.0,
            &bx,
            &probe_opts,
        )?);
    }

    let mut outcomes = Vec::new();
    let mut missed = 0;
    for (raw, e) in args.expect.iter().zip(&expectations) {
        let met = match e {
            Expectation::AllPass => reports.iter().all(|r| r.verdict == Verdict::Pass),
            Expectation::One(id, v) => {
                let matching: Vec<_> = reports.iter().filter(|r| r.condition_id == *id).collect();
                if matching.is_empty() {
                    return Err(CliError::Input(format!(
                        "`{raw}`: condition {id} was not run"
                    )));
                }
                matching.iter().all(|r| r.verdict == *v)
            }
        };
        if !met {
            missed += 1;
            eprintln!("expectation `{raw}` not met");
        }
        outcomes.push(Outcome {
            expectation: raw.clone(),
            met,
        });
    }

    write_json(
        args.common.out.as_deref(),
        &Report {
            geometry: g.name(),
            seed: args.common.seed,
            conditions: &reports,
            expectations: outcomes,
        },
    )?;
    if missed > 0 {
        return Err(CliError::Mismatch(missed));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_expectations() {
        assert_eq!(
            Expectation::parse("all-pass").unwrap(),
            Expectation::AllPass
        );
        assert_eq!(
            Expectation::parse("IV:fail").unwrap(),
            Expectation::One(ConditionId::PositiveEigenvalues, Verdict::Fail)
        );
        assert_eq!(
            Expectation::parse("metric_triangle:Pass").unwrap(),
            Expectation::One(ConditionId::MetricTriangle, Verdict::Pass)
        );
        assert!(Expectation::parse("VI:fail").is_err());
        assert!(Expectation::parse("IV").is_err());
    }
}
