use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;

use crate::io::{sink, CliError, CliResult, Overrides};
use crate::Common;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// CSV written by `tube-profile` or `chain`.
    input: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, PartialEq)]
enum Kind {
    Profile,
    Chain,
}

struct Series {
    label: &'static str,
    colour: &'static str,
    points: Vec<(f64, f64)>,
    scatter: bool,
}

fn field(rec: &csv::StringRecord, i: usize, path: &Path) -> CliResult<Option<f64>> {
    let raw = rec.get(i).unwrap_or("");
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse()
        .map(Some)
        .map_err(|_| CliError::Input(format!("{}: bad number `{raw}`", path.display())))
}

fn read(path: &Path) -> CliResult<(Kind, Vec<Series>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let kind = match header
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["tau", "r_numeric", "r_closed_form"] => Kind::Profile,
        ["link_index", "t", "x", "y", "z", "cosh_theta_dM"] => Kind::Chain,
        [] | [""] => return Err(CliError::Input(format!("{}: empty CSV", path.display()))),
        other => {
            return Err(CliError::Input(format!(
                "{}: unrecognised header {other:?}",
                path.display()
            )))
        }
    };

    let mut series = match kind {
        Kind::Profile => vec![
            Series {
                label: "r numeric",
                colour: "#1f5fa8",
                points: Vec::new(),
                scatter: false,
            },
            Series {
                label: "r closed form",
                colour: "#c0392b",
                points: Vec::new(),
                scatter: false,
            },
        ],
        Kind::Chain => vec![Series {
            label: "transverse (x, y)",
            colour: "#1f5fa8",
            points: Vec::new(),
            scatter: true,
        }],
    };
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(CliError::Input(format!("{}: ragged row", path.display())));
        }
        match kind {
            Kind::Profile => {
                if rec.get(0) == Some("summary") {
                    continue;
                }
                let tau =
                    field(&rec, 0, path)?.ok_or_else(|| CliError::Input("missing tau".into()))?;
                for (k, s) in series.iter_mut().enumerate() {
                    if let Some(r) = field(&rec, k + 1, path)? {
                        s.points.push((tau, r));
                    }
                }
            }
            Kind::Chain => {
                if let (Some(x), Some(y)) = (field(&rec, 2, path)?, field(&rec, 3, path)?) {
                    series[0].points.push((x, y));
                }
            }
        }
    }
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    Ok((kind, series))
}

fn bounds(series: &[Series], square: bool) -> (f64, f64, f64, f64) {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if square {
        let half = 0.5 * (x1 - x0).max(y1 - y0);
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        (x0, x1, y0, y1) = (cx - half, cx + half, cy - half, cy + half);
    }
    let pad = |lo: f64, hi: f64| {
        let w = if hi > lo { hi - lo } else { 1.0 };
        (lo - 0.05 * w, hi + 0.05 * w)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    (x0, x1, y0, y1)
}

fn render(kind: &Kind, series: &[Series]) -> String {
    let (x0, x1, y0, y1) = bounds(series, *kind == Kind::Chain);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let (xlabel, ylabel, title) = match kind {
        Kind::Profile => ("tau", "r", "segment cross-section radius"),
        Kind::Chain => ("x", "y", "chain transverse projection"),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for (v, x, y, anchor) in [
        (x0, MARGIN, HEIGHT - MARGIN + 16.0, "start"),
        (x1, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "end"),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{v:.4e}</text>"#
        );
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">{v:.4e}</text>"#,
            MARGIN - 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (k, series) in series.iter().enumerate() {
        if series.scatter {
            for &(x, y) in &series.points {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{}"/>"#,
                    sx(x),
                    sy(y),
                    series.colour
                );
            }
        } else {
            let pts: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = if k > 0 {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                series.colour,
                pts.join(" ")
            );
        }
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{}">{}</text>"#,
            MARGIN + 8.0,
            series.colour,
            series.label
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn run(args: PlotArgs) -> CliResult {
    Overrides::parse(&args.common.tol)?.finish()?;
    let (kind, series) = read(&args.input)?;
    let mut w = sink(args.common.out.as_deref())?;
    w.write_all(render(&kind, &series).as_bytes())?;
    w.flush()?;
    Ok(())
}
