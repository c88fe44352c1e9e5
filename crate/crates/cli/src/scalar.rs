use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use tgeom::envelope::Expr;
use tgeom::sigma_algebra::{
    length_squared, same_direction_residual, scalar_general, DirectionClass, DEFAULT_TOL,
};
use tgeom::worldfunc::load_geometry;
use tgeom::{Point, PointVector, WorldFunction};

use crate::io::{parse_pair, write_json, CliError, CliResult, Overrides};
use crate::Common;

#[derive(Args, Debug)]
pub struct ScalarArgs {
    #[arg(long)]
    geometry: PathBuf,
    /// First vector, `ORIGIN;END` with comma-separated coordinates.
    #[arg(long, value_name = "ORIGIN;END")]
    v: Option<String>,
    /// Second vector.
    #[arg(long, value_name = "ORIGIN;END")]
    w: Option<String>,
    /// JSON file `{"skeleton": [[..], ..], "r": [..], "expr": {..}}`.
    #[arg(long)]
    expr: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExprFile {
    skeleton: Vec<Point>,
    r: Point,
    expr: Expr,
}

#[derive(Serialize)]
struct Products {
    scalar: f64,
    length_squared_v: f64,
    length_squared_w: f64,
    class_v: Option<&'static str>,
    class_w: Option<&'static str>,
    /// Collinear-and-same-direction residual, when both classes agree.
    same_direction_residual: Option<f64>,
    parallel_same_direction: Option<bool>,
}

#[derive(Serialize)]
struct Output {
    geometry: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    vectors: Option<Products>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expr_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expr_issue: Option<String>,
}

fn class_name(c: Option<DirectionClass>) -> Option<&'static str> {
    c.map(|c| match c {
        DirectionClass::Timelike => "timelike",
        DirectionClass::Spacelike => "spacelike",
    })
}

pub fn run(args: ScalarArgs) -> CliResult {
    let mut tol = Overrides::parse(&args.common.tol)?;
    let tol_value: f64 = tol.take("tol")?.unwrap_or(DEFAULT_TOL);
    tol.finish()?;
    let g = load_geometry(&args.geometry)?;

    let vectors = match (&args.v, &args.w) {
        (Some(v), Some(w)) => {
            let (a, b) = parse_pair(v)?;
            let (c, d) = parse_pair(w)?;
            let (v, w) = (PointVector::new(a, b), PointVector::new(c, d));
            let lv = length_squared(&g, &v)?;
            let lw = length_squared(&g, &w)?;
            let (cv, cw) = (DirectionClass::of(lv), DirectionClass::of(lw));
            let residual = match (cv, cw) {
                (Some(x), Some(y)) if x == y => Some(same_direction_residual(&g, &v, &w)?),
                _ => None,
            };
            Some(Products {
                scalar: scalar_general(&g, &v, &w)?,
                length_squared_v: lv,
                length_squared_w: lw,
                class_v: class_name(cv),
                class_w: class_name(cw),
                same_direction_residual: residual,
                parallel_same_direction: residual
                    .map(|r| r.abs() <= tol_value * (lv * lw).abs().sqrt().max(1.0)),
            })
        }
        (None, None) => None,
        _ => return Err(CliError::Input("--v and --w must be given together".into())),
    };

    let (mut expr_value, mut expr_issue) = (None, None);
    if let Some(path) = &args.expr {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let file: ExprFile = serde_json::from_str(&text)?;
        if let Some(p) = file
            .skeleton
            .iter()
            .chain([&file.r])
            .find(|p| p.dim() != g.dim())
        {
            return Err(CliError::Input(format!(
                "point {:?} has {} coordinates, geometry has {}",
                p.coords(),
                p.dim(),
                g.dim()
            )));
        }
        match file.expr.eval(&g, &file.skeleton, &file.r) {
            Ok(v) => expr_value = Some(v),
            Err(e) => expr_issue = Some(e.to_string()),
        }
    }
    if vectors.is_none() && args.expr.is_none() {
        return Err(CliError::Input(
            "nothing to evaluate: give --v/--w or --expr".into(),
        ));
    }

    write_json(
        args.common.out.as_deref(),
        &Output {
            geometry: g.name(),
            seed: args.common.seed,
            vectors,
            expr_value,
            expr_issue,
        },
    )
}
