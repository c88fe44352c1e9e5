use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use tgeom::spacetime::{
    avoids_band, checkpoints, joint_cosh_exact, simulate_ensemble, transverse_rms,
    wobble_angle_closed_form, ConeMeasure, DistortionParams,
};

use crate::io::{num, sink, write_json, CliResult, Overrides};
use crate::Common;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Measure {
    Reflected,
    RestFrame,
}

fn measure_name(m: Measure) -> &'static str {
    match m {
        Measure::Reflected => "reflected",
        Measure::RestFrame => "rest-frame",
    }
}

impl From<Measure> for ConeMeasure {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Reflected => ConeMeasure::Reflected,
            Measure::RestFrame => ConeMeasure::RestFrame,
        }
    }
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    #[arg(long)]
    d: f64,
    #[arg(long)]
    sigma0: f64,
    /// Link length `mu_d`.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1000)]
    links: usize,
    /// Number of chains; member 0 uses `--seed` and is the one written as CSV.
    #[arg(long, default_value_t = 1)]
    ensemble: usize,
    #[arg(long, value_enum, default_value_t = Measure::Reflected)]
    measure: Measure,
    /// Summary JSON; defaults to `<out stem>.summary.json` next to `--out`.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct Summary {
    seed: u64,
    measure: ConeMeasure,
    links: usize,
    ensemble: usize,
    d: f64,
    sigma0: f64,
    mu: f64,
    c: f64,
    mean_cosh: f64,
    cosh_theta_exact: f64,
    cosh_theta_closed_form: f64,
    theta_exact: f64,
    theta_closed_form: f64,
    theta_small_d: f64,
    max_link_length_error: f64,
    max_parallel_residual: f64,
    avoids_band: bool,
    transverse_rms_by_n: BTreeMap<usize, f64>,
}

pub fn run(args: ChainArgs) -> CliResult {
    Overrides::parse(&args.common.tol)?.finish()?;
    if args.ensemble == 0 {
        return Err(crate::io::CliError::Input(
            "--ensemble must be at least 1".into(),
        ));
    }
    let params = DistortionParams::new(args.d, args.sigma0, args.c, args.mu)?;
    let measure = ConeMeasure::from(args.measure);
    let seed = args.common.seed;
    let chains = simulate_ensemble(&params, args.links, seed, args.ensemble, measure)?;

    let mut joints = 0usize;
    let mut cosh_sum = 0.0;
    let mut len_err = 0.0_f64;
    let mut par_err = 0.0_f64;
    let mut band = true;
    for ch in &chains {
        joints += ch.cosh_theta_dm.len();
        cosh_sum += ch.cosh_theta_dm.iter().sum::<f64>();
        len_err = ch
            .link_length_errors(&params)?
            .into_iter()
            .fold(len_err, f64::max);
        par_err = ch
            .parallel_residuals(&params)?
            .into_iter()
            .fold(par_err, |m, r| m.max(r.abs()));
        band &= avoids_band(&params, ch);
    }
    let wobble = wobble_angle_closed_form(&params);
    let exact = joint_cosh_exact(&params);
    let summary = Summary {
        seed,
        measure,
        links: args.links,
        ensemble: args.ensemble,
        d: args.d,
        sigma0: args.sigma0,
        mu: args.mu,
        c: args.c,
        mean_cosh: if joints > 0 {
            cosh_sum / joints as f64
        } else {
            f64::NAN
        },
        cosh_theta_exact: exact,
        cosh_theta_closed_form: wobble.cosh_theta,
        theta_exact: exact.acosh(),
        theta_closed_form: wobble.theta,
        theta_small_d: wobble.small_d_approx,
        max_link_length_error: len_err,
        max_parallel_residual: par_err,
        avoids_band: band,
        transverse_rms_by_n: checkpoints(args.links)
            .into_iter()
            .map(|n| (n, transverse_rms(&chains, n)))
            .collect(),
    };

    let first = &chains[0];
    let mut w = sink(args.common.out.as_deref())?;
    writeln!(
        w,
        "# chain d={} sigma0={} mu={} c={} links={} measure={} seed={}",
        args.d,
        args.sigma0,
        args.mu,
        args.c,
        args.links,
        measure_name(args.measure),
        seed
    )?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["link_index", "t", "x", "y", "z", "cosh_theta_dM"])?;
    for (i, p) in first.points.iter().enumerate() {
        let x = p.coords();
        // joint j joins links j and j + 1 at point j + 1
        let cosh = i
            .checked_sub(1)
            .and_then(|j| first.cosh_theta_dm.get(j))
            .map_or(String::new(), |c| num(*c));
        csv.write_record([
            i.to_string(),
            num(x[0]),
            num(x[1]),
            num(x[2]),
            num(x[3]),
            cosh,
        ])?;
    }
    csv.flush()?;

    let summary_path = args.summary.or_else(|| {
        let out = args.common.out.as_ref()?;
        let stem = out.file_stem()?.to_string_lossy().into_owned();
        Some(out.with_file_name(format!("{stem}.summary.json")))
    });
    match summary_path {
        Some(p) => write_json(Some(&p), &summary)?,
        None => {
            let mut err = std::io::stderr();
            serde_json::to_writer_pretty(&mut err, &summary)?;
            writeln!(err)?;
        }
    }
    Ok(())
}
