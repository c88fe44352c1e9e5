use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use tgeom::{Error, Point};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{0} expectation(s) not met")]
    Mismatch(usize),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::DegenerateSkeleton { .. } | Error::DegenerateProjection => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// `--tol KEY=VALUE` overrides. Every key must be consumed by the command.
pub struct Overrides(BTreeMap<String, String>);

impl Overrides {
    pub fn parse(raw: &[String]) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for item in raw {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("--tol expects KEY=VALUE, got `{item}`")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> CliResult<Option<T>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Input(format!("bad value `{v}` for --tol {key}"))),
        }
    }

    pub fn finish(self) -> CliResult {
        match self.0.keys().next() {
            None => Ok(()),
            Some(k) => Err(CliError::Input(format!("unknown --tol key `{k}`"))),
        }
    }
}

pub fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> CliResult {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// 17 significant digits, `.` decimal.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `x0,x1,...` into a point.
pub fn parse_point(s: &str) -> CliResult<Point> {
    let coords = s
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("bad coordinate `{f}` in `{s}`")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Point::new(coords))
}

/// `x0,...;y0,...` into a pair of points.
pub fn parse_pair(s: &str) -> CliResult<(Point, Point)> {
    let (a, b) = s
        .split_once(';')
        .ok_or_else(|| CliError::Input(format!("expected `ORIGIN;END`, got `{s}`")))?;
    Ok((parse_point(a)?, parse_point(b)?))
}
