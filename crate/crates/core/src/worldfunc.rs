//! Points, world functions and the built-in geometries.
//!
//! A geometry is nothing but its world function `sigma(P, Q)`: half the
//! squared distance between two points. Every other module of this crate is
//! generic over [`WorldFunction`], so switching from Euclidean to Minkowski or
//! to the distorted space-time is a matter of passing a different value.
//!
//! Coordinates are only a labelling of the carrier set. Outside this module
//! they are read directly only by the explicitly coordinate-based helpers
//! (coordinate parallelism, cross-section probing, the chain simulator).

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance used when ingesting tabulated world functions.
pub const TABULATED_TOLERANCE: f64 = 1e-9;

/// A point of the carrier set, labelled by coordinates.
///
/// For space-time geometries `coords[0]` is the time coordinate `t`; the
/// light speed is applied by the world function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Self {
            coords: coords.into(),
        }
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }

    /// `self + scale * direction`, component-wise.
    pub fn offset(&self, direction: &[f64], scale: f64) -> Point {
        Point::new(
            self.coords
                .iter()
                .zip(direction)
                .map(|(x, d)| x + scale * d)
                .collect::<Vec<_>>(),
        )
    }

    /// Euclidean coordinate distance. Used for clustering numerical roots,
    /// never as a geometric quantity.
    pub fn coordinate_distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn key(&self) -> Vec<u64> {
        self.coords
            .iter()
            .map(|&x| if x == 0.0 { 0 } else { x.to_bits() })
            .collect()
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(coords: [f64; N]) -> Self {
        Point::new(coords.to_vec())
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

/// `sqrt(2 sigma)` with its class made explicit.
///
/// Negative `2 sigma` (spacelike separations in Lorentzian geometries) is
/// returned as the magnitude `sqrt(-2 sigma)` tagged [`Distance::Spacelike`];
/// no complex arithmetic is ever involved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distance {
    Real(f64),
    Spacelike(f64),
}

impl Distance {
    pub fn from_sigma(sigma: f64) -> Self {
        if sigma >= 0.0 {
            Distance::Real((2.0 * sigma).sqrt())
        } else {
            Distance::Spacelike((-2.0 * sigma).sqrt())
        }
    }

    pub fn magnitude(self) -> f64 {
        match self {
            Distance::Real(m) | Distance::Spacelike(m) => m,
        }
    }

    pub fn real(self) -> Option<f64> {
        match self {
            Distance::Real(m) => Some(m),
            Distance::Spacelike(_) => None,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Distance::Real(_))
    }
}

/// The single primitive of a T-geometry.
pub trait WorldFunction: Send + Sync {
    /// Number of coordinates labelling a point.
    fn dim(&self) -> usize;

    fn sigma(&self, p: &Point, q: &Point) -> Result<f64>;

    /// The whole carrier set, when it is finite.
    fn carrier(&self) -> Option<&[Point]> {
        None
    }
}

impl<G: WorldFunction + ?Sized> WorldFunction for &G {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn sigma(&self, p: &Point, q: &Point) -> Result<f64> {
        (**self).sigma(p, q)
    }

    fn carrier(&self) -> Option<&[Point]> {
        (**self).carrier()
    }
}

impl<G: WorldFunction + ?Sized> WorldFunction for Box<G> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn sigma(&self, p: &Point, q: &Point) -> Result<f64> {
        (**self).sigma(p, q)
    }

    fn carrier(&self) -> Option<&[Point]> {
        (**self).carrier()
    }
}

/// `rho(P, Q) = sqrt(2 sigma(P, Q))`, tagged by class.
pub fn distance<G: WorldFunction + ?Sized>(g: &G, p: &Point, q: &Point) -> Result<Distance> {
    Ok(Distance::from_sigma(g.sigma(p, q)?))
}

/// Branch of the distorted world function a Minkowski value falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistortedBranch {
    /// `sigma_M < 0`: left untouched.
    Spacelike,
    /// `0 <= sigma_M <= sigma0`: scaled by `1 + d / sigma0`.
    Band,
    /// `sigma_M > sigma0`: shifted by `d`.
    Outer,
}

impl DistortedBranch {
    pub fn of(sigma_m: f64, sigma0: f64) -> Self {
        if sigma_m > sigma0 {
            DistortedBranch::Outer
        } else if sigma_m >= 0.0 {
            DistortedBranch::Band
        } else {
            DistortedBranch::Spacelike
        }
    }
}

/// `sigma_d = sigma_M + D(sigma_M)`.
pub fn distort(sigma_m: f64, d: f64, sigma0: f64) -> f64 {
    match DistortedBranch::of(sigma_m, sigma0) {
        DistortedBranch::Outer => sigma_m + d,
        DistortedBranch::Band => (1.0 + d / sigma0) * sigma_m,
        DistortedBranch::Spacelike => sigma_m,
    }
}

/// Coarse signature class, used for reporting only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Euclidean,
    Lorentzian,
    Unknown,
}

#[derive(Clone, Debug)]
pub enum Geometry {
    Euclidean {
        dim: usize,
    },
    Minkowski {
        dim: usize,
        c: f64,
    },
    Distorted {
        dim: usize,
        c: f64,
        d: f64,
        sigma0: f64,
    },
    Tabulated(Tabulated),
}

impl Geometry {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Geometry::Euclidean { dim })
    }

    pub fn minkowski(dim: usize, c: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        check_light_speed(c)?;
        Ok(Geometry::Minkowski { dim, c })
    }

    pub fn distorted(dim: usize, c: f64, d: f64, sigma0: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        check_light_speed(c)?;
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "distortion d must be >= 0, got {d}"
            )));
        }
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma0 must be > 0, got {sigma0}"
            )));
        }
        Ok(Geometry::Distorted { dim, c, d, sigma0 })
    }

    pub fn signature(&self) -> Signature {
        match self {
            Geometry::Euclidean { .. } => Signature::Euclidean,
            Geometry::Minkowski { .. } | Geometry::Distorted { .. } => Signature::Lorentzian,
            Geometry::Tabulated(_) => Signature::Unknown,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Euclidean { .. } => "euclidean",
            Geometry::Minkowski { .. } => "minkowski",
            Geometry::Distorted { .. } => "distorted",
            Geometry::Tabulated(_) => "tabulated",
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        let expected = self.dim();
        if p.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: p.dim(),
            });
        }
        if !p.is_finite() {
            return Err(Error::NonFinite(p.coords().to_vec()));
        }
        Ok(())
    }
}

fn check_light_speed(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "light speed c must be > 0, got {c}"
        )))
    }
}

/// `sigma_M(x, x') = (c^2 (t - t')^2 - |x - x'|^2) / 2`.
pub fn minkowski_sigma(p: &[f64], q: &[f64], c: f64) -> f64 {
    let dt = p[0] - q[0];
    let spatial: f64 = p[1..]
        .iter()
        .zip(&q[1..])
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    0.5 * (c * c * dt * dt - spatial)
}

fn euclidean_sigma(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

impl WorldFunction for Geometry {
    fn dim(&self) -> usize {
        match self {
            Geometry::Euclidean { dim }
            | Geometry::Minkowski { dim, .. }
            | Geometry::Distorted { dim, .. } => *dim,
            Geometry::Tabulated(t) => t.dim,
        }
    }

    fn sigma(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(match self {
            Geometry::Euclidean { .. } => euclidean_sigma(p.coords(), q.coords()),
            Geometry::Minkowski { c, .. } => minkowski_sigma(p.coords(), q.coords(), *c),
            Geometry::Distorted { c, d, sigma0, .. } => {
                distort(minkowski_sigma(p.coords(), q.coords(), *c), *d, *sigma0)
            }
            Geometry::Tabulated(t) => return t.lookup(p, q),
        })
    }

    fn carrier(&self) -> Option<&[Point]> {
        match self {
            Geometry::Tabulated(t) => Some(&t.points),
            _ => None,
        }
    }
}

/// A finite carrier with an explicitly tabulated world function.
#[derive(Clone, Debug)]
pub struct Tabulated {
    dim: usize,
    ids: Vec<String>,
    points: Vec<Point>,
    index: HashMap<Vec<u64>, usize>,
    // row-major, len = points.len()^2
    sigma: Vec<f64>,
}

impl Tabulated {
    /// Builds the table from `(id, point)` pairs and `(id_a, id_b, sigma)`
    /// samples. Both orders of a pair may be given; they are averaged when
    /// they agree within `tol` (relative) and rejected otherwise. Diagonal
    /// entries may be omitted.
    pub fn load(
        points: Vec<(String, Point)>,
        samples: &[(String, String, f64)],
        tol: f64,
    ) -> Result<Self> {
        let (ids, points, index, dim) = index_points(points)?;
        let n = ids.len();
        let by_id: HashMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let mut given: Vec<Option<f64>> = vec![None; n * n];
        let mut scale = 0.0_f64;
        for (a, b, value) in samples {
            let i = *by_id
                .get(a.as_str())
                .ok_or_else(|| Error::UnknownId(a.clone()))?;
            let j = *by_id
                .get(b.as_str())
                .ok_or_else(|| Error::UnknownId(b.clone()))?;
            if !value.is_finite() {
                return Err(Error::Format(format!(
                    "non-finite sigma for pair ({a}, {b})"
                )));
            }
            if let Some(previous) = given[i * n + j] {
                if previous != *value {
                    return Err(Error::Format(format!(
                        "conflicting duplicate sigma entries for ({a}, {b})"
                    )));
                }
            }
            given[i * n + j] = Some(*value);
            scale = scale.max(value.abs());
        }

        let mut sigma = vec![0.0; n * n];
        for i in 0..n {
            if let Some(value) = given[i * n + i] {
                if value.abs() > tol * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::DiagonalViolation {
                        id: ids[i].clone(),
                        value,
                    });
                }
            }
            for j in (i + 1)..n {
                let value = match (given[i * n + j], given[j * n + i]) {
                    (Some(ab), Some(ba)) => {
                        if (ab - ba).abs() > tol * ab.abs().max(ba.abs()) {
                            return Err(Error::SymmetryViolation {
                                a: ids[i].clone(),
                                b: ids[j].clone(),
                                ab,
                                ba,
                            });
                        }
                        0.5 * (ab + ba)
                    }
                    (Some(v), None) | (None, Some(v)) => v,
                    (None, None) => return Err(Error::MissingPair(ids[i].clone(), ids[j].clone())),
                };
                sigma[i * n + j] = value;
                sigma[j * n + i] = value;
            }
        }

        Ok(Self {
            dim,
            ids,
            points,
            index,
            sigma,
        })
    }

    /// Builds the table from a full matrix without any symmetrization or
    /// validation of its entries.
    pub fn from_matrix_unchecked(
        points: Vec<(String, Point)>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let (ids, points, index, dim) = index_points(points)?;
        let n = ids.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Format(format!("sigma matrix must be {n}x{n}")));
        }
        Ok(Self {
            dim,
            ids,
            points,
            index,
            sigma: matrix.into_iter().flatten().collect(),
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, id: &str) -> Option<&Point> {
        self.ids
            .iter()
            .position(|s| s == id)
            .map(|i| &self.points[i])
    }

    fn lookup(&self, p: &Point, q: &Point) -> Result<f64> {
        let i = self.position(p)?;
        let j = self.position(q)?;
        Ok(self.sigma[i * self.ids.len() + j])
    }

    fn position(&self, p: &Point) -> Result<usize> {
        self.index
            .get(&p.key())
            .copied()
            .ok_or_else(|| Error::UnknownPoint(p.coords().to_vec()))
    }
}

type IndexedPoints = (Vec<String>, Vec<Point>, HashMap<Vec<u64>, usize>, usize);

fn index_points(points: Vec<(String, Point)>) -> Result<IndexedPoints> {
    let dim = points
        .first()
        .map(|(_, p)| p.dim())
        .ok_or_else(|| Error::Format("tabulated geometry needs at least one point".into()))?;
    if dim == 0 {
        return Err(Error::Format("points need at least one coordinate".into()));
    }
    let mut ids = Vec::with_capacity(points.len());
    let mut coords = Vec::with_capacity(points.len());
    let mut index = HashMap::new();
    for (i, (id, p)) in points.into_iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        if !p.is_finite() {
            return Err(Error::NonFinite(p.coords().to_vec()));
        }
        if ids.contains(&id) || index.insert(p.key(), i).is_some() {
            return Err(Error::DuplicatePoint(id));
        }
        ids.push(id);
        coords.push(p);
    }
    Ok((ids, coords, index, dim))
}

/// Loads a tabulated geometry; see [`Tabulated::load`].
pub fn load_tabulated(
    points: Vec<(String, Point)>,
    samples: &[(String, String, f64)],
) -> Result<Geometry> {
    Tabulated::load(points, samples, TABULATED_TOLERANCE).map(Geometry::Tabulated)
}

/// Reads `point_id, x0, x1, ...` rows.
pub fn read_points_csv(path: &Path) -> Result<Vec<(String, Point)>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let mut fields = record.iter();
        let id = fields
            .next()
            .ok_or_else(|| Error::Format(format!("{}: empty row", path.display())))?
            .to_string();
        let coords = fields
            .map(|f| {
                f.parse::<f64>().map_err(|e| {
                    Error::Format(format!("{}: bad coordinate `{f}`: {e}", path.display()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push((id, Point::new(coords)));
    }
    Ok(out)
}

/// Reads `point_id_a, point_id_b, sigma` rows.
pub fn read_sigma_csv(path: &Path) -> Result<Vec<(String, String, f64)>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        if record.len() != 3 {
            return Err(Error::Format(format!(
                "{}: expected 3 columns, found {}",
                path.display(),
                record.len()
            )));
        }
        let value = record[2].parse::<f64>().map_err(|e| {
            Error::Format(format!(
                "{}: bad sigma `{}`: {e}",
                path.display(),
                &record[2]
            ))
        })?;
        out.push((record[0].to_string(), record[1].to_string(), value));
    }
    Ok(out)
}

fn default_light_speed() -> f64 {
    1.0
}

/// On-disk geometry description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeometrySpec {
    Euclidean {
        dim: usize,
    },
    Minkowski {
        dim: usize,
        #[serde(default = "default_light_speed")]
        c: f64,
    },
    Distorted {
        dim: usize,
        #[serde(default = "default_light_speed")]
        c: f64,
        d: f64,
        sigma0: f64,
    },
    Tabulated {
        file: PathBuf,
        points: PathBuf,
        #[serde(default)]
        tol: Option<f64>,
    },
}

impl GeometrySpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Builds the geometry; relative table paths are resolved against `base`.
    pub fn build(&self, base: &Path) -> Result<Geometry> {
        match self {
            GeometrySpec::Euclidean { dim } => Geometry::euclidean(*dim),
            GeometrySpec::Minkowski { dim, c } => Geometry::minkowski(*dim, *c),
            GeometrySpec::Distorted { dim, c, d, sigma0 } => {
                Geometry::distorted(*dim, *c, *d, *sigma0)
            }
            GeometrySpec::Tabulated { file, points, tol } => {
                let points = read_points_csv(&base.join(points))?;
                let samples = read_sigma_csv(&base.join(file))?;
                Tabulated::load(points, &samples, tol.unwrap_or(TABULATED_TOLERANCE))
                    .map(Geometry::Tabulated)
            }
        }
    }
}

/// Reads a geometry spec file and builds the geometry it describes.
pub fn load_geometry(path: &Path) -> Result<Geometry> {
    let spec = GeometrySpec::from_path(path)?;
    spec.build(path.parent().unwrap_or_else(|| Path::new(".")))
}
