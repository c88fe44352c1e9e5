use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tgeom::checker::{degeneracy_probe, ConditionReport, ProbeOptions};
use tgeom::solve::SearchBox;
use tgeom::worldfunc::load_geometry;
use tgeom::{PointVector, WorldFunction};

use crate::io::{parse_pair, parse_point, write_json, CliError, CliResult, Overrides};
use crate::Common;

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[arg(long)]
    geometry: PathBuf,
    /// Base point of the probe.
    #[arg(long, value_name = "X0,X1,...")]
    p0: String,
    /// Direction vector `ORIGIN;END`.
    #[arg(long, value_name = "ORIGIN;END")]
    dir: String,
    /// Length of the sought vectors.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Half-width of the search cube around `p0`.
    #[arg(long = "box", default_value_t = 3.0)]
    half_width: f64,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct Output<'a> {
    geometry: &'static str,
    seed: u64,
    report: &'a ConditionReport,
}

pub fn run(args: ProbeArgs) -> CliResult {
    let mut tol = Overrides::parse(&args.common.tol)?;
    let defaults = ProbeOptions::default();
    let opts = ProbeOptions {
        starts: args.starts,
        seed: args.common.seed,
        tol: tol.take("tol")?.unwrap_or(defaults.tol),
        cluster_radius: tol
            .take("cluster_radius")?
            .unwrap_or(defaults.cluster_radius),
    };
    tol.finish()?;
    let g = load_geometry(&args.geometry)?;
    let p0 = parse_point(&args.p0)?;
    let (a, b) = parse_pair(&args.dir)?;
    for p in [&p0, &a, &b] {
        if p.dim() != g.dim() {
            return Err(CliError::Input(format!(
                "point {:?} has {} coordinates, geometry has {}",
                p.coords(),
                p.dim(),
                g.dim()
            )));
        }
    }
    let bx = SearchBox::cube(p0.coords(), args.half_width);
    let report = degeneracy_probe(&g, &p0, &PointVector::new(a, b), args.a, &bx, &opts)?;
    write_json(
        args.common.out.as_deref(),
        &Output {
            geometry: g.name(),
            seed: args.common.seed,
            report: &report,
        },
    )
}
