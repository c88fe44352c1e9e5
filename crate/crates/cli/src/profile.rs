use std::io::Write;

use clap::Args;
use tgeom::spacetime::{segment_profile, DistortionParams};

use crate::io::{num, sink, CliResult, Overrides};
use crate::Common;

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[arg(long)]
    d: f64,
    #[arg(long)]
    sigma0: f64,
    /// Segment length `mu_d`.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Speed of light.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 101)]
    tau_points: usize,
    #[command(flatten)]
    common: Common,
}

/// Writes `tau,r_numeric,r_closed_form` rows followed by one
/// `summary,<max abs deviation>,<max rel deviation>` row.
pub fn run(args: ProfileArgs) -> CliResult {
    Overrides::parse(&args.common.tol)?.finish()?;
    let params = DistortionParams::new(args.d, args.sigma0, args.c, args.mu)?;
    let profile = segment_profile(&params, args.tau_points)?;
    let closed = profile.radius_closed_form.as_deref().unwrap_or_default();

    let mut w = sink(args.common.out.as_deref())?;
    writeln!(
        w,
        "# tube-profile d={} sigma0={} mu={} c={} tau_points={} seed={}",
        args.d, args.sigma0, args.mu, args.c, args.tau_points, args.common.seed
    )?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["tau", "r_numeric", "r_closed_form"])?;
    for (k, (t, r)) in profile.tau.iter().zip(&profile.radius).enumerate() {
        let c = closed.get(k).map_or(String::new(), |c| num(*c));
        csv.write_record([num(*t), num(*r), c])?;
    }
    let abs = profile.max_abs_deviation().map_or(String::new(), num);
    let rel = profile
        .max_rel_deviation()
        .map_or(String::new(), |(_, r)| num(r));
    csv.write_record(["summary".to_string(), abs, rel])?;
    csv.flush()?;
    Ok(())
}
