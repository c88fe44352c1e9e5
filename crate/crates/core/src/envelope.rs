//! Skeleton-envelope objects: zero sets of functions of the world function.
//!
//! An envelope is an [`Expr`] over sigma-terms whose arguments are the
//! running point `R` and the skeleton points `P0, P1, ...`. Evaluation hands
//! points to the geometry and never looks at their coordinates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma_algebra::{length_squared, DirectionClass, PointVector, Skeleton};
use crate::solve::bisect;
use crate::worldfunc::{Distance, Point, WorldFunction};

/// Grid used by [`cross_section_radius`] before bisection.
pub const RADIUS_GRID: usize = 1000;

/// An argument position of a sigma-term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Slot {
    /// The running point.
    R,
    /// Skeleton point `P<i>`.
    P(usize),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::R => f.write_str("R"),
            Slot::P(i) => write!(f, "P{i}"),
        }
    }
}

impl FromStr for Slot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "R" {
            return Ok(Slot::R);
        }
        s.strip_prefix('P')
            .and_then(|i| i.parse().ok())
            .map(Slot::P)
            .ok_or_else(|| Error::Format(format!("bad slot `{s}`, expected R or P<i>")))
    }
}

impl TryFrom<String> for Slot {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Slot> for String {
    fn from(s: Slot) -> String {
        s.to_string()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceClass {
    #[default]
    Real,
    Spacelike,
}

/// Envelope expression over sigma-terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    Const {
        value: f64,
    },
    Sigma {
        a: Slot,
        b: Slot,
    },
    /// Magnitude of `sqrt(2 sigma(a, b))`; undefined unless the pair has the
    /// requested class.
    Distance {
        a: Slot,
        b: Slot,
        #[serde(default)]
        class: DistanceClass,
    },
    /// Scalar product `(p0 p1 . q0 q1)`.
    Scalar {
        p0: Slot,
        p1: Slot,
        q0: Slot,
        q1: Slot,
    },
    Sum {
        terms: Vec<Expr>,
    },
    Sub {
        a: Box<Expr>,
        b: Box<Expr>,
    },
    Product {
        terms: Vec<Expr>,
    },
    Ratio {
        num: Box<Expr>,
        den: Box<Expr>,
    },
    Det {
        rows: Vec<Vec<Expr>>,
    },
    Abs {
        arg: Box<Expr>,
    },
    MaxOf {
        terms: Vec<Expr>,
    },
}

/// Why an envelope could not be evaluated at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalIssue {
    /// A distance term has the wrong class (e.g. imaginary where a real
    /// length is required).
    ImaginaryDistance,
    ZeroDenominator,
    Geometry(String),
}

impl fmt::Display for EvalIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalIssue::ImaginaryDistance => f.write_str("imaginary distance"),
            EvalIssue::ZeroDenominator => f.write_str("zero denominator"),
            EvalIssue::Geometry(e) => write!(f, "geometry error: {e}"),
        }
    }
}

struct Ctx<'a, G: ?Sized> {
    g: &'a G,
    skeleton: &'a [Point],
    r: &'a Point,
}

impl<G: WorldFunction + ?Sized> Ctx<'_, G> {
    fn point(&self, s: Slot) -> std::result::Result<&Point, EvalIssue> {
        match s {
            Slot::R => Ok(self.r),
            Slot::P(i) => self.skeleton.get(i).ok_or_else(|| {
                EvalIssue::Geometry(format!(
                    "slot P{i} outside a skeleton of {} points",
                    self.skeleton.len()
                ))
            }),
        }
    }

    fn sigma(&self, a: Slot, b: Slot) -> std::result::Result<f64, EvalIssue> {
        self.g
            .sigma(self.point(a)?, self.point(b)?)
            .map_err(|e| EvalIssue::Geometry(e.to_string()))
    }
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        Expr::Const { value }
    }

    pub fn sigma(a: Slot, b: Slot) -> Self {
        Expr::Sigma { a, b }
    }

    pub fn rho(a: Slot, b: Slot) -> Self {
        Expr::Distance {
            a,
            b,
            class: DistanceClass::Real,
        }
    }

    pub fn scalar(p0: Slot, p1: Slot, q0: Slot, q1: Slot) -> Self {
        Expr::Scalar { p0, p1, q0, q1 }
    }

    pub fn difference(a: Expr, b: Expr) -> Self {
        Expr::Sub {
            a: Box::new(a),
            b: Box::new(b),
        }
    }

    pub fn ratio(num: Expr, den: Expr) -> Self {
        Expr::Ratio {
            num: Box::new(num),
            den: Box::new(den),
        }
    }

    pub fn abs(arg: Expr) -> Self {
        Expr::Abs { arg: Box::new(arg) }
    }

    /// Second-order Gram determinant of `P0P1` and `P0X`.
    pub fn gram2(p0: Slot, p1: Slot, x: Slot) -> Self {
        Expr::Det {
            rows: vec![
                vec![Expr::scalar(p0, p1, p0, p1), Expr::scalar(p0, p1, p0, x)],
                vec![Expr::scalar(p0, x, p0, p1), Expr::scalar(p0, x, p0, x)],
            ],
        }
    }

    /// Evaluates the expression at running point `r`.
    pub fn eval<G: WorldFunction + ?Sized>(
        &self,
        g: &G,
        skeleton: &[Point],
        r: &Point,
    ) -> std::result::Result<f64, EvalIssue> {
        self.eval_in(&Ctx { g, skeleton, r })
    }

    fn eval_in<G: WorldFunction + ?Sized>(
        &self,
        c: &Ctx<'_, G>,
    ) -> std::result::Result<f64, EvalIssue> {
        Ok(match self {
            Expr::Const { value } => *value,
            Expr::Sigma { a, b } => c.sigma(*a, *b)?,
            Expr::Distance { a, b, class } => match (Distance::from_sigma(c.sigma(*a, *b)?), class)
            {
                (Distance::Real(m), DistanceClass::Real) => m,
                (Distance::Spacelike(m), DistanceClass::Spacelike) => m,
                // zero separation belongs to both classes
                (Distance::Real(0.0), DistanceClass::Spacelike) => 0.0,
                _ => return Err(EvalIssue::ImaginaryDistance),
            },
            Expr::Scalar { p0, p1, q0, q1 } => {
                c.sigma(*p0, *q1)? + c.sigma(*p1, *q0)? - c.sigma(*p0, *q0)? - c.sigma(*p1, *q1)?
            }
            Expr::Sum { terms } => {
                let mut s = 0.0;
                for t in terms {
                    s += t.eval_in(c)?;
                }
                s
            }
            Expr::Sub { a, b } => a.eval_in(c)? - b.eval_in(c)?,
            Expr::Product { terms } => {
                let mut p = 1.0;
                for t in terms {
                    p *= t.eval_in(c)?;
                }
                p
            }
            Expr::Ratio { num, den } => {
                let d = den.eval_in(c)?;
                if d == 0.0 {
                    return Err(EvalIssue::ZeroDenominator);
                }
                num.eval_in(c)? / d
            }
            Expr::Det { rows } => {
                let n = rows.len();
                let mut m = nalgebra::DMatrix::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(EvalIssue::Geometry(
                            "determinant rows must be square".into(),
                        ));
                    }
                    for (j, e) in row.iter().enumerate() {
                        m[(i, j)] = e.eval_in(c)?;
                    }
                }
                m.determinant()
            }
            Expr::Abs { arg } => arg.eval_in(c)?.abs(),
            Expr::MaxOf { terms } => {
                let mut best = f64::NEG_INFINITY;
                for t in terms {
                    best = best.max(t.eval_in(c)?);
                }
                best
            }
        })
    }
}

/// Membership of a point in an object's zero set.
#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub value: Option<f64>,
    pub flag: Option<EvalIssue>,
}

/// Sign of the envelope: negative is interior for ellipsoids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeObject {
    pub name: String,
    pub skeleton: Vec<Point>,
    pub envelope: Expr,
    /// Natural magnitude of the envelope near its zero set; membership is
    /// `|f| <= tol * |scale|`.
    pub scale: Expr,
}

impl EnvelopeObject {
    pub fn new(name: impl Into<String>, skeleton: Vec<Point>, envelope: Expr, scale: Expr) -> Self {
        Self {
            name: name.into(),
            skeleton,
            envelope,
            scale,
        }
    }

    pub fn evaluate<G: WorldFunction + ?Sized>(
        &self,
        g: &G,
        r: &Point,
    ) -> std::result::Result<f64, EvalIssue> {
        self.envelope.eval(g, &self.skeleton, r)
    }

    pub fn membership<G: WorldFunction + ?Sized>(&self, g: &G, r: &Point, tol: f64) -> Membership {
        let value = match self.evaluate(g, r) {
            Ok(v) => v,
            Err(issue) => {
                return Membership {
                    member: false,
                    value: None,
                    flag: Some(issue),
                }
            }
        };
        let scale = self
            .scale
            .eval(g, &self.skeleton, r)
            .map(f64::abs)
            .unwrap_or(1.0);
        Membership {
            member: value.abs() <= tol * scale.max(f64::MIN_POSITIVE),
            value: Some(value),
            flag: None,
        }
    }

    pub fn classify<G: WorldFunction + ?Sized>(
        &self,
        g: &G,
        r: &Point,
        tol: f64,
    ) -> std::result::Result<Region, EvalIssue> {
        let m = self.membership(g, r, tol);
        match (m.flag, m.value) {
            (Some(issue), _) => Err(issue),
            _ if m.member => Ok(Region::Boundary),
            (None, Some(v)) if v < 0.0 => Ok(Region::Interior),
            _ => Ok(Region::Exterior),
        }
    }
}

fn distinct(a: &Point, b: &Point, what: &str) -> Result<()> {
    if a.coordinate_distance(b) == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{what}: defining points coincide"
        )));
    }
    Ok(())
}

const P0: Slot = Slot::P(0);
const P1: Slot = Slot::P(1);
const P2: Slot = Slot::P(2);
const R: Slot = Slot::R;

/// Cylinder with axis `p0 p1` through `q`: `F2(P0,P1,Q) - F2(P0,P1,R)`.
pub fn cylinder<G: WorldFunction + ?Sized>(
    g: &G,
    p0: &Point,
    p1: &Point,
    q: &Point,
) -> Result<EnvelopeObject> {
    distinct(p0, p1, "cylinder")?;
    let _ = g.sigma(p0, q)?;
    Ok(EnvelopeObject::new(
        "cylinder",
        vec![p0.clone(), p1.clone(), q.clone()],
        Expr::difference(Expr::gram2(P0, P1, P2), Expr::gram2(P0, P1, R)),
        Expr::gram2(P0, P1, P2),
    ))
}

/// Ellipsoid with foci `p`, `q`: `rho(P,R) + rho(R,Q) - 2a`.
pub fn ellipsoid<G: WorldFunction + ?Sized>(
    g: &G,
    p: &Point,
    q: &Point,
    two_a: f64,
) -> Result<EnvelopeObject> {
    if !(two_a.is_finite() && two_a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ellipsoid needs 2a > 0, got {two_a}"
        )));
    }
    if !Distance::from_sigma(g.sigma(p, q)?).is_real() {
        return Err(Error::UndefinedDirectionClass(
            "ellipsoid foci are spacelike separated".into(),
        ));
    }
    Ok(EnvelopeObject::new(
        "ellipsoid",
        vec![p.clone(), q.clone()],
        Expr::Sum {
            terms: vec![Expr::rho(P0, R), Expr::rho(R, P1), Expr::constant(-two_a)],
        },
        Expr::constant(two_a),
    ))
}

/// Straight line (tube) through `p0` and `q`:
/// `(P0Q.P0R)^2 - (P0Q.P0Q)(P0R.P0R)`.
pub fn tube_straight<G: WorldFunction + ?Sized>(
    g: &G,
    p0: &Point,
    q: &Point,
) -> Result<EnvelopeObject> {
    distinct(p0, q, "tube_straight")?;
    let _ = g.sigma(p0, q)?;
    let qr = Expr::scalar(P0, P1, P0, R);
    let lhs = Expr::Product {
        terms: vec![qr.clone(), qr],
    };
    let rhs = Expr::Product {
        terms: vec![Expr::scalar(P0, P1, P0, P1), Expr::scalar(P0, R, P0, R)],
    };
    Ok(EnvelopeObject::new(
        "tube_straight",
        vec![p0.clone(), q.clone()],
        Expr::difference(lhs.clone(), rhs.clone()),
        Expr::MaxOf {
            terms: vec![Expr::abs(lhs), Expr::abs(rhs)],
        },
    ))
}

/// Segment `[p0 p1]`: `rho(P0,P1) - rho(P0,R) - rho(R,P1)`, all real.
pub fn segment<G: WorldFunction + ?Sized>(g: &G, p0: &Point, p1: &Point) -> Result<EnvelopeObject> {
    let rho = match Distance::from_sigma(g.sigma(p0, p1)?) {
        Distance::Real(v) if v > 0.0 => v,
        _ => {
            return Err(Error::UndefinedDirectionClass(
                "segment endpoints need a positive real distance".into(),
            ))
        }
    };
    Ok(EnvelopeObject::new(
        "segment",
        vec![p0.clone(), p1.clone()],
        Expr::Sum {
            terms: vec![
                Expr::rho(P0, P1),
                Expr::Product {
                    terms: vec![Expr::constant(-1.0), Expr::rho(P0, R)],
                },
                Expr::Product {
                    terms: vec![Expr::constant(-1.0), Expr::rho(R, P1)],
                },
            ],
        },
        Expr::constant(rho),
    ))
}

/// Points `R` with `Q0R` parallel (same direction) to `P0Q`.
///
/// Skeleton order is `[p0, q, q0]`. The residual is `(u.v) - |u||v|` for a
/// timelike `u = P0Q` and `(u.v) + |u|_s |v|_s` for a spacelike one; a `v`
/// of the other class is flagged as an imaginary distance.
pub fn tube_remote<G: WorldFunction + ?Sized>(
    g: &G,
    q0: &Point,
    p0: &Point,
    q: &Point,
) -> Result<EnvelopeObject> {
    distinct(p0, q, "tube_remote")?;
    let lu = length_squared(g, &PointVector::new(p0.clone(), q.clone()))?;
    let class = match DirectionClass::of(lu) {
        Some(DirectionClass::Timelike) => DistanceClass::Real,
        Some(DirectionClass::Spacelike) => DistanceClass::Spacelike,
        None => {
            return Err(Error::UndefinedDirectionClass(
                "direction P0Q has zero length".into(),
            ))
        }
    };
    let u_len = Expr::Distance {
        a: P0,
        b: P1,
        class,
    };
    let v_len = Expr::Distance { a: P2, b: R, class };
    let lengths = Expr::Product {
        terms: vec![u_len, v_len],
    };
    let uv = Expr::scalar(P0, P1, P2, R);
    let envelope = match class {
        DistanceClass::Real => Expr::difference(uv, lengths.clone()),
        DistanceClass::Spacelike => Expr::Sum {
            terms: vec![uv, lengths.clone()],
        },
    };
    Ok(EnvelopeObject::new(
        "tube_remote",
        vec![p0.clone(), q.clone(), q0.clone()],
        envelope,
        lengths,
    ))
}

/// Frame-dependent straight line through `P0` and `q`: the intersection
/// of the ratio surfaces
/// `(P0Pi.P0Q)/(P0P1.P0Q) = (P0Pi.P0R)/(P0P1.P0R)`, `i = 2..n`.
///
/// Skeleton order is `[P0, ..., Pn, q]`; the envelope is the largest ratio
/// mismatch.
pub fn tube_frame<G: WorldFunction + ?Sized>(
    g: &G,
    frame: &Skeleton,
    q: &Point,
) -> Result<EnvelopeObject> {
    let n = frame.order();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "tube_frame needs a frame with at least two basic vectors".into(),
        ));
    }
    let pts = frame.points();
    let q_slot = Slot::P(n + 1);
    let anchor = pts[0].clone();
    let denom_q = g.sigma(&pts[0], &pts[1])? + g.sigma(&anchor, q)? - g.sigma(&pts[1], q)?;
    if denom_q == 0.0 {
        return Err(Error::DegenerateProjection);
    }
    let mut residuals = Vec::with_capacity(n - 1);
    let mut scales = vec![Expr::constant(1.0)];
    for i in 2..=n {
        let pi = Slot::P(i);
        let ratio_q = Expr::ratio(
            Expr::scalar(P0, pi, P0, q_slot),
            Expr::scalar(P0, P1, P0, q_slot),
        );
        let ratio_r = Expr::ratio(Expr::scalar(P0, pi, P0, R), Expr::scalar(P0, P1, P0, R));
        residuals.push(Expr::abs(Expr::difference(ratio_q.clone(), ratio_r)));
        scales.push(Expr::abs(ratio_q));
    }
    let mut skeleton = pts.to_vec();
    skeleton.push(q.clone());
    Ok(EnvelopeObject::new(
        "tube_frame",
        skeleton,
        Expr::MaxOf { terms: residuals },
        Expr::MaxOf { terms: scales },
    ))
}

/// Outcome of a cross-section probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radius {
    pub radius: f64,
    /// True when no zero was found at all along the ray.
    pub no_zero: bool,
}

/// Largest `r` in `[0, r_max]` where the envelope vanishes along
/// `axis_point + r * normal`.
///
/// The ray is scanned on a uniform grid; the outermost sign change (or exact
/// zero) among defined values is refined by bisection to `tol`. When there is
/// no off-axis zero the radius is 0, and `no_zero` is set unless the envelope
/// already vanishes (within `member_tol` of its scale) at the axis point.
pub fn cross_section_radius<G: WorldFunction + ?Sized>(
    g: &G,
    obj: &EnvelopeObject,
    axis_point: &Point,
    normal: &[f64],
    r_max: f64,
    tol: f64,
    member_tol: f64,
) -> Result<Radius> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "r_max must be > 0, got {r_max}"
        )));
    }
    if normal.len() != axis_point.dim() {
        return Err(Error::DimensionMismatch {
            expected: axis_point.dim(),
            found: normal.len(),
        });
    }
    let f = |r: f64| obj.evaluate(g, &axis_point.offset(normal, r)).ok();
    let grid: Vec<(f64, Option<f64>)> = (0..=RADIUS_GRID)
        .map(|k| {
            let r = r_max * k as f64 / RADIUS_GRID as f64;
            (r, f(r))
        })
        .collect();

    let mut found: Option<f64> = None;
    let mut prev: Option<(f64, f64)> = None;
    for &(r, v) in &grid {
        let Some(v) = v else {
            prev = None;
            continue;
        };
        if v == 0.0 && r > 0.0 {
            found = Some(r);
        } else if let Some((pr, pv)) = prev {
            if pv != 0.0 && (pv > 0.0) != (v > 0.0) {
                found = Some(bisect(f, pr, r, pv, tol));
            }
        }
        prev = Some((r, v));
    }
    if let Some(radius) = found {
        return Ok(Radius {
            radius,
            no_zero: false,
        });
    }
    let on_axis = obj.membership(g, axis_point, member_tol).member;
    Ok(Radius {
        radius: 0.0,
        no_zero: !on_axis,
    })
}

/// Declarative object description, as read from configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoConfig {
    /// `cylinder`, `ellipsoid`, `segment`, `tube_straight`, `tube_remote`,
    /// `tube_frame` or `custom`.
    pub object: String,
    pub skeleton: Vec<String>,
    #[serde(default)]
    pub q: Option<String>,
    #[serde(default)]
    pub two_a: Option<f64>,
    /// Envelope of a `custom` object.
    #[serde(default)]
    pub envelope: Option<Expr>,
    #[serde(default)]
    pub scale: Option<Expr>,
}

impl EgoConfig {
    /// Builds the object, resolving point ids through `lookup`.
    pub fn build<G, F>(&self, g: &G, lookup: F) -> Result<EnvelopeObject>
    where
        G: WorldFunction + ?Sized,
        F: Fn(&str) -> Option<Point>,
    {
        let resolve = |id: &str| lookup(id).ok_or_else(|| Error::UnknownId(id.to_string()));
        let skel = self
            .skeleton
            .iter()
            .map(|id| resolve(id))
            .collect::<Result<Vec<_>>>()?;
        let q = || {
            self.q
                .as_deref()
                .ok_or_else(|| Error::Format(format!("object `{}` needs `q`", self.object)))
                .and_then(resolve)
        };
        let need = |k: usize| {
            if skel.len() == k {
                Ok(())
            } else {
                Err(Error::Format(format!(
                    "object `{}` needs {k} skeleton point(s), got {}",
                    self.object,
                    skel.len()
                )))
            }
        };
        match self.object.as_str() {
            "cylinder" => {
                need(2)?;
                cylinder(g, &skel[0], &skel[1], &q()?)
            }
            "ellipsoid" => {
                need(2)?;
                let two_a = self
                    .two_a
                    .ok_or_else(|| Error::Format("ellipsoid needs `two_a`".into()))?;
                ellipsoid(g, &skel[0], &skel[1], two_a)
            }
            "segment" => {
                need(2)?;
                segment(g, &skel[0], &skel[1])
            }
            "tube_straight" => {
                need(1)?;
                tube_straight(g, &skel[0], &q()?)
            }
            "tube_remote" => {
                // skeleton: [q0, p0]
                need(2)?;
                tube_remote(g, &skel[0], &skel[1], &q()?)
            }
            "tube_frame" => tube_frame(g, &Skeleton::new(skel)?, &q()?),
            "custom" => {
                let envelope = self
                    .envelope
                    .clone()
                    .ok_or_else(|| Error::Format("custom object needs `envelope`".into()))?;
                let scale = self.scale.clone().unwrap_or(Expr::constant(1.0));
                Ok(EnvelopeObject::new("custom", skel, envelope, scale))
            }
            other => Err(Error::Format(format!("unknown object `{other}`"))),
        }
    }
}
