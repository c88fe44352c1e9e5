//! Vector calculus expressed entirely through the world function.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::worldfunc::{Point, WorldFunction};

/// Library default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The ordered pair `{origin, end}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVector {
    pub origin: Point,
    pub end: Point,
}

impl PointVector {
    pub fn new(origin: impl Into<Point>, end: impl Into<Point>) -> Self {
        Self {
            origin: origin.into(),
            end: end.into(),
        }
    }
}

/// Ordered points `P0, P1, ..., Pn`.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    points: Vec<Point>,
}

impl Skeleton {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "skeleton needs at least one point".into(),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].iter().any(|q| q.coordinate_distance(p) == 0.0) {
                return Err(Error::DuplicatePoint(format!("{:?}", p.coords())));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn origin(&self) -> &Point {
        &self.points[0]
    }

    /// Number of basic vectors `P0Pi`.
    pub fn order(&self) -> usize {
        self.points.len() - 1
    }
}

impl TryFrom<Vec<Point>> for Skeleton {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        Skeleton::new(points)
    }
}

/// `|v|^2 = 2 sigma(origin, end)`; negative for spacelike vectors.
pub fn length_squared<G: WorldFunction + ?Sized>(g: &G, v: &PointVector) -> Result<f64> {
    Ok(2.0 * g.sigma(&v.origin, &v.end)?)
}

/// `(P0P1.P0P2) = sigma(P0,P1) + sigma(P0,P2) - sigma(P1,P2)`.
pub fn scalar_common_origin<G: WorldFunction + ?Sized>(
    g: &G,
    p0: &Point,
    p1: &Point,
    p2: &Point,
) -> Result<f64> {
    Ok(g.sigma(p0, p1)? + g.sigma(p0, p2)? - g.sigma(p1, p2)?)
}

/// `(P0P1.Q0Q1) = sigma(P0,Q1) + sigma(P1,Q0) - sigma(P0,Q0) - sigma(P1,Q1)`.
pub fn scalar_general<G: WorldFunction + ?Sized>(
    g: &G,
    v: &PointVector,
    w: &PointVector,
) -> Result<f64> {
    Ok(g.sigma(&v.origin, &w.end)? + g.sigma(&v.end, &w.origin)?
        - g.sigma(&v.origin, &w.origin)?
        - g.sigma(&v.end, &w.end)?)
}

/// The Gram matrix `g_il = (P0Pi.P0Pl)` of a skeleton.
pub fn gram_matrix<G: WorldFunction + ?Sized>(g: &G, skel: &Skeleton) -> Result<DMatrix<f64>> {
    let refs: Vec<&Point> = skel.points().iter().collect();
    gram_of_points(g, &refs)
}

/// Gram matrix of `pts[0], pts[1], ...` without building a [`Skeleton`].
pub fn gram_of_points<G: WorldFunction + ?Sized>(g: &G, pts: &[&Point]) -> Result<DMatrix<f64>> {
    let p0 = pts[0];
    let n = pts.len() - 1;
    // sigma(P0, Pi) is reused on every row
    let from_origin = pts[1..]
        .iter()
        .map(|p| g.sigma(p0, p))
        .collect::<Result<Vec<_>>>()?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 2.0 * from_origin[i];
        for l in (i + 1)..n {
            let v = from_origin[i] + from_origin[l] - g.sigma(pts[i + 1], pts[l + 1])?;
            m[(i, l)] = v;
            m[(l, i)] = v;
        }
    }
    Ok(m)
}

/// `|det G| / prod_i |row_i|`, which lies in `[0, 1]` by Hadamard's
/// inequality for any real matrix, definite or not.
pub fn hadamard_ratio(gram: &DMatrix<f64>) -> f64 {
    let det = gram.determinant().abs();
    if det == 0.0 {
        return 0.0;
    }
    let mut ratio = det;
    for row in gram.row_iter() {
        ratio /= row.norm();
    }
    ratio
}

/// `F_n(P^n) = det ||(P0Pi.P0Pk)||`.
pub fn gram_determinant<G: WorldFunction + ?Sized>(g: &G, skel: &Skeleton) -> Result<f64> {
    if skel.order() == 0 {
        return Err(Error::InvalidParameter(
            "gram determinant needs at least two points".into(),
        ));
    }
    Ok(gram_matrix(g, skel)?.determinant())
}

/// `(P0Q.P0R)^2 = (P0Q.P0Q)(P0R.P0R)`.
pub fn is_collinear<G: WorldFunction + ?Sized>(
    g: &G,
    p0: &Point,
    q: &Point,
    r: &Point,
    tol: f64,
) -> Result<bool> {
    let (residual, rhs) = collinearity_residual(g, p0, q, r)?;
    Ok(residual <= tol * rhs.abs().max(1.0))
}

/// Returns `(|lhs - rhs|, rhs)` for the collinearity identity.
pub fn collinearity_residual<G: WorldFunction + ?Sized>(
    g: &G,
    p0: &Point,
    q: &Point,
    r: &Point,
) -> Result<(f64, f64)> {
    let qr = scalar_common_origin(g, p0, q, r)?;
    let rhs = 4.0 * g.sigma(p0, q)? * g.sigma(p0, r)?;
    Ok(((qr * qr - rhs).abs(), rhs))
}

/// Which class a vector belongs to for the purpose of parallelism tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionClass {
    Timelike,
    Spacelike,
}

impl DirectionClass {
    pub fn of(length_squared: f64) -> Option<Self> {
        if length_squared > 0.0 {
            Some(DirectionClass::Timelike)
        } else if length_squared < 0.0 {
            Some(DirectionClass::Spacelike)
        } else {
            None
        }
    }
}

/// Residual of the same-direction condition between two vectors of the same
/// class.
///
/// For real lengths this is `(v.w) - |v||w|`; for two spacelike vectors with
/// tagged magnitudes `|v|_s = sqrt(-|v|^2)` it is `(v.w) + |v|_s |w|_s`.
pub fn same_direction_residual<G: WorldFunction + ?Sized>(
    g: &G,
    v: &PointVector,
    w: &PointVector,
) -> Result<f64> {
    let lv = length_squared(g, v)?;
    let lw = length_squared(g, w)?;
    let vw = scalar_general(g, v, w)?;
    match (DirectionClass::of(lv), DirectionClass::of(lw)) {
        (Some(DirectionClass::Timelike), Some(DirectionClass::Timelike)) => {
            Ok(vw - (lv * lw).sqrt())
        }
        (Some(DirectionClass::Spacelike), Some(DirectionClass::Spacelike)) => {
            Ok(vw + (lv * lw).sqrt())
        }
        _ => Err(Error::UndefinedDirectionClass(format!(
            "squared lengths {lv:e} and {lw:e} do not share a nonzero class"
        ))),
    }
}

/// `(v.w) - |v||w| = 0` for vectors of positive squared length.
pub fn is_parallel_same_direction<G: WorldFunction + ?Sized>(
    g: &G,
    v: &PointVector,
    w: &PointVector,
    tol: f64,
) -> Result<bool> {
    let lv = length_squared(g, v)?;
    let lw = length_squared(g, w)?;
    if !(lv > 0.0 && lw > 0.0) {
        return Err(Error::UndefinedDirectionClass(format!(
            "parallelism needs positive squared lengths, got {lv:e} and {lw:e}"
        )));
    }
    let residual = scalar_general(g, v, w)? - (lv * lw).sqrt();
    Ok(residual.abs() <= tol * (lv * lw).sqrt().max(1.0))
}

/// Outcome of the coordinate collinearity fit `(P0Pi.P0Q) = a (P0Pi.P0R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateFit {
    pub a: f64,
    pub residual: f64,
    pub collinear: bool,
}

/// Coordinate collinearity of `P0Q` and `P0R` with respect to a frame.
pub fn coordinate_collinearity<G: WorldFunction + ?Sized>(
    g: &G,
    frame: &Skeleton,
    q: &Point,
    r: &Point,
    tol: f64,
    require_positive: bool,
) -> Result<CoordinateFit> {
    let x = covariant_coordinates(g, frame, q)?;
    let y = covariant_coordinates(g, frame, r)?;
    fit_proportional(&x, &y, tol, require_positive)
}

/// Frame-relative parallelism of two arbitrary vectors:
/// `(P0Pi.Q0Q) = a (P0Pi.P0R)` for every basic vector.
pub fn coordinate_parallelism<G: WorldFunction + ?Sized>(
    g: &G,
    frame: &Skeleton,
    v: &PointVector,
    w: &PointVector,
    tol: f64,
    require_positive: bool,
) -> Result<CoordinateFit> {
    let pts = frame.points();
    let p0 = &pts[0];
    let mut x = Vec::with_capacity(frame.order());
    let mut y = Vec::with_capacity(frame.order());
    for pi in &pts[1..] {
        let basic = PointVector::new(p0.clone(), pi.clone());
        x.push(scalar_general(g, &basic, v)?);
        y.push(scalar_general(g, &basic, w)?);
    }
    fit_proportional(&x, &y, tol, require_positive)
}

fn fit_proportional(
    x: &[f64],
    y: &[f64],
    tol: f64,
    require_positive: bool,
) -> Result<CoordinateFit> {
    let scale = x.iter().chain(y).fold(0.0_f64, |m, v| m.max(v.abs()));
    if x.iter()
        .all(|v| v.abs() <= tol * scale.max(f64::MIN_POSITIVE))
    {
        return Err(Error::DegenerateProjection);
    }
    let yy: f64 = y.iter().map(|v| v * v).sum();
    if yy == 0.0 {
        return Ok(CoordinateFit {
            a: f64::INFINITY,
            residual: x.iter().map(|v| v.abs()).fold(0.0, f64::max),
            collinear: false,
        });
    }
    let a = x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>() / yy;
    let residual = x
        .iter()
        .zip(y)
        .map(|(p, q)| (p - a * q).abs())
        .fold(0.0, f64::max);
    let collinear = residual <= tol * scale.max(1.0) && a != 0.0 && (!require_positive || a > 0.0);
    Ok(CoordinateFit {
        a,
        residual,
        collinear,
    })
}

/// Metric tensor of a nondegenerate skeleton.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub skeleton: Skeleton,
    pub gram: DMatrix<f64>,
    pub gram_inverse: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub determinant: f64,
}

impl FrameData {
    /// `sigma(P, Q)` reconstructed from covariant coordinates:
    /// `1/2 sum g^ik dx_i dx_k`.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let dx = DVector::from_iterator(x.len(), x.iter().zip(y).map(|(a, b)| a - b));
        0.5 * dx.dot(&(&self.gram_inverse * &dx))
    }
}

pub fn frame_data<G: WorldFunction + ?Sized>(
    g: &G,
    skel: &Skeleton,
    tol: f64,
) -> Result<FrameData> {
    let n = skel.order();
    if n == 0 {
        return Err(Error::DegenerateSkeleton { det: 0.0 });
    }
    let gram = gram_matrix(g, skel)?;
    let determinant = gram.determinant();
    let scale = gram.amax();
    if determinant.is_nan() || determinant.abs() <= tol * scale.powi(n as i32) {
        return Err(Error::DegenerateSkeleton { det: determinant });
    }
    let gram_inverse = gram
        .clone()
        .try_inverse()
        .ok_or(Error::DegenerateSkeleton { det: determinant })?;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(gram.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(FrameData {
        skeleton: skel.clone(),
        gram,
        gram_inverse,
        eigenvalues,
        determinant,
    })
}

/// `x_i(P) = (P0Pi.P0P)`.
pub fn covariant_coordinates<G: WorldFunction + ?Sized>(
    g: &G,
    skel: &Skeleton,
    p: &Point,
) -> Result<Vec<f64>> {
    let pts = skel.points();
    let p0 = &pts[0];
    let s0p = g.sigma(p0, p)?;
    pts[1..]
        .iter()
        .map(|pi| Ok(g.sigma(p0, pi)? + s0p - g.sigma(pi, p)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldfunc::Geometry;

    fn e2() -> Geometry {
        Geometry::euclidean(2).unwrap()
    }

    fn unit_frame() -> Skeleton {
        Skeleton::new(vec![
            [0.0, 0.0].into(),
            [1.0, 0.0].into(),
            [0.0, 1.0].into(),
        ])
        .unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(
            length_squared(&e2(), &PointVector::new([0.0, 0.0], [1.0, 0.0])).unwrap(),
            1.0
        );
        let m = Geometry::minkowski(4, 1.0).unwrap();
        let t = PointVector::new([0.0; 4], [1.0, 0.0, 0.0, 0.0]);
        let x = PointVector::new([0.0; 4], [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(length_squared(&m, &t).unwrap(), 1.0);
        assert_eq!(length_squared(&m, &x).unwrap(), -1.0);
    }

    #[test]
    fn common_origin_products() {
        let g = e2();
        let o = Point::from([0.0, 0.0]);
        let s =
            |a: [f64; 2], b: [f64; 2]| scalar_common_origin(&g, &o, &a.into(), &b.into()).unwrap();
        assert_eq!(s([1.0, 0.0], [0.0, 1.0]), 0.0);
        assert_eq!(s([1.0, 0.0], [1.0, 1.0]), 1.0);
        assert_eq!(s([0.0, 0.0], [3.0, 1.0]), 0.0);
    }

    #[test]
    fn general_products() {
        let g = e2();
        let v = PointVector::new([0.0, 0.0], [1.0, 0.0]);
        assert_eq!(
            scalar_general(&g, &v, &PointVector::new([5.0, 5.0], [6.0, 5.0])).unwrap(),
            1.0
        );
        assert_eq!(
            scalar_general(&g, &v, &PointVector::new([0.0, 0.0], [-1.0, 0.0])).unwrap(),
            -1.0
        );
        assert_eq!(
            scalar_general(&g, &v, &PointVector::new([2.0, 7.0], [2.0, 7.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn gram_determinants() {
        let g = e2();
        assert_eq!(gram_determinant(&g, &unit_frame()).unwrap(), 1.0);
        let line = Skeleton::new(vec![
            [0.0, 0.0].into(),
            [1.0, 0.0].into(),
            [2.0, 0.0].into(),
        ])
        .unwrap();
        assert!(gram_determinant(&g, &line).unwrap().abs() < 1e-12);
        let four = Skeleton::new(vec![
            [0.0, 0.0].into(),
            [1.0, 0.0].into(),
            [0.0, 1.0].into(),
            [0.7, -0.4].into(),
        ])
        .unwrap();
        assert!(gram_determinant(&g, &four).unwrap().abs() < 1e-12);
    }

    #[test]
    fn collinearity() {
        let g = e2();
        let o = Point::from([0.0, 0.0]);
        assert!(is_collinear(&g, &o, &[1.0, 0.0].into(), &[2.0, 0.0].into(), DEFAULT_TOL).unwrap());
        assert!(
            !is_collinear(&g, &o, &[1.0, 0.0].into(), &[0.0, 1.0].into(), DEFAULT_TOL).unwrap()
        );
    }

    #[test]
    fn distorted_collinearity_breaks() {
        // sigma_d on the t-axis: 0.51 and 2.01; (P0Q.P0R) = 0.51 + 2.01 - 0.51 = 2.01
        // lhs = 2.01^2 = 4.0401, rhs = 1.02 * 4.02 = 4.1004
        let g = Geometry::distorted(4, 1.0, 0.01, 0.1).unwrap();
        let o = Point::origin(4);
        let q = Point::from([1.0, 0.0, 0.0, 0.0]);
        let r = Point::from([2.0, 0.0, 0.0, 0.0]);
        let (res, rhs) = collinearity_residual(&g, &o, &q, &r).unwrap();
        assert!((rhs - 4.1004).abs() < 1e-12);
        assert!((res - (4.1004 - 4.0401)).abs() < 1e-12);
        assert!(!is_collinear(&g, &o, &q, &r, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn parallelism() {
        let g = e2();
        let v = PointVector::new([0.0, 0.0], [1.0, 0.0]);
        assert!(is_parallel_same_direction(
            &g,
            &v,
            &PointVector::new([1.0, 0.0], [3.0, 0.0]),
            DEFAULT_TOL
        )
        .unwrap());
        assert!(!is_parallel_same_direction(
            &g,
            &v,
            &PointVector::new([0.0, 0.0], [-1.0, 0.0]),
            DEFAULT_TOL
        )
        .unwrap());
        let m = Geometry::minkowski(4, 1.0).unwrap();
        let a = PointVector::new([0.0; 4], [1.0, 0.0, 0.0, 0.0]);
        let b = PointVector::new([1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]);
        assert!(is_parallel_same_direction(&m, &a, &b, DEFAULT_TOL).unwrap());
        let s = PointVector::new([0.0; 4], [0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            is_parallel_same_direction(&m, &a, &s, DEFAULT_TOL),
            Err(Error::UndefinedDirectionClass(_))
        ));
    }

    #[test]
    fn spacelike_same_direction() {
        let m = Geometry::minkowski(4, 1.0).unwrap();
        let a = PointVector::new([0.0; 4], [0.0, 1.0, 0.0, 0.0]);
        let b = PointVector::new([3.0, 0.0, 1.0, 0.0], [3.0, 2.0, 1.0, 0.0]);
        assert!(same_direction_residual(&m, &a, &b).unwrap().abs() < 1e-12);
        let c = PointVector::new([0.0; 4], [0.0, -1.0, 0.0, 0.0]);
        assert!((same_direction_residual(&m, &a, &c).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coordinate_collinearity_fit() {
        let g = e2();
        let f = unit_frame();
        let fit = coordinate_collinearity(
            &g,
            &f,
            &[2.0, 1.0].into(),
            &[4.0, 2.0].into(),
            DEFAULT_TOL,
            false,
        )
        .unwrap();
        assert!(fit.collinear);
        assert!((fit.a - 0.5).abs() < 1e-15);
        let fit = coordinate_collinearity(
            &g,
            &f,
            &[1.0, 0.0].into(),
            &[0.0, 1.0].into(),
            DEFAULT_TOL,
            false,
        )
        .unwrap();
        assert!(!fit.collinear);
        let fit = coordinate_collinearity(
            &g,
            &f,
            &[1.0, 0.0].into(),
            &[-2.0, 0.0].into(),
            DEFAULT_TOL,
            true,
        )
        .unwrap();
        assert!(!fit.collinear);
        assert!((fit.a + 0.5).abs() < 1e-15);
        assert!(matches!(
            coordinate_collinearity(
                &g,
                &f,
                &[0.0, 0.0].into(),
                &[1.0, 0.0].into(),
                DEFAULT_TOL,
                false
            ),
            Err(Error::DegenerateProjection)
        ));
    }

    #[test]
    fn frames() {
        let fd = frame_data(&e2(), &unit_frame(), DEFAULT_TOL).unwrap();
        assert_eq!(fd.gram, DMatrix::identity(2, 2));
        assert_eq!(fd.eigenvalues, vec![1.0, 1.0]);
        let m = Geometry::minkowski(2, 1.0).unwrap();
        let fd = frame_data(&m, &unit_frame(), DEFAULT_TOL).unwrap();
        assert_eq!(
            fd.gram,
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
        );
        assert_eq!(fd.eigenvalues, vec![1.0, -1.0]);
        let line = Skeleton::new(vec![
            [0.0, 0.0].into(),
            [1.0, 0.0].into(),
            [2.0, 0.0].into(),
        ])
        .unwrap();
        assert!(matches!(
            frame_data(&e2(), &line, DEFAULT_TOL),
            Err(Error::DegenerateSkeleton { .. })
        ));
    }

    #[test]
    fn covariant() {
        let g = e2();
        let f = unit_frame();
        assert_eq!(
            covariant_coordinates(&g, &f, &[3.0, 4.0].into()).unwrap(),
            vec![3.0, 4.0]
        );
        assert_eq!(
            covariant_coordinates(&g, &f, &[1.0, 1.0].into()).unwrap(),
            vec![1.0, 1.0]
        );
        assert_eq!(
            covariant_coordinates(&g, &f, &[0.0, 0.0].into()).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn skeleton_rejects_duplicates() {
        assert!(Skeleton::new(vec![[0.0, 0.0].into(), [0.0, 0.0].into()]).is_err());
    }
}
