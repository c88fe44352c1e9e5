//! The distorted Minkowski space-time: segment radius, link relations and
//! world-chain simulation.
//!
//! Points are `(t, x, y, z)`. Internally Minkowski vectors are handled as
//! `(c t, x, y, z)` so that the metric is `diag(1, -1, -1, -1)`.

use nalgebra::{Matrix4, Vector3, Vector4};
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envelope::{cross_section_radius, segment};
use crate::error::{Error, Result};
use crate::solve::rng;
use crate::worldfunc::{minkowski_sigma, Geometry, Point, WorldFunction};

/// Clamp threshold for tiny negative `r^2` in the closed-form radius.
pub const R2_CLAMP: f64 = 1e-12;

/// Relative accuracy demanded of every generated link.
pub const LINK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionParams {
    pub d: f64,
    pub sigma0: f64,
    pub c: f64,
    pub mu_d: f64,
}

impl DistortionParams {
    /// Validates `d >= 0`, `sigma0 > 0`, `c > 0`, `mu_d > 0`,
    /// `mu_d^2 > 2 d` and `mu_M^2 = mu_d^2 - 2d > 2 sigma0`.
    pub fn new(d: f64, sigma0: f64, c: f64, mu_d: f64) -> Result<Self> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(d.is_finite() && d >= 0.0) {
            return bad("d must be finite and >= 0");
        }
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return bad("sigma0 must be finite and > 0");
        }
        if !(c.is_finite() && c > 0.0) {
            return bad("c must be finite and > 0");
        }
        if !(mu_d.is_finite() && mu_d > 0.0) {
            return bad("mu_d must be finite and > 0");
        }
        if mu_d * mu_d <= 2.0 * d {
            return Err(Error::ParameterRegime(format!(
                "mu_d^2 = {} must exceed 2d = {}",
                mu_d * mu_d,
                2.0 * d
            )));
        }
        if mu_d * mu_d - 2.0 * d <= 2.0 * sigma0 {
            return Err(Error::ParameterRegime(format!(
                "mu_M^2 = mu_d^2 - 2d = {} must exceed 2 sigma0 = {}",
                mu_d * mu_d - 2.0 * d,
                2.0 * sigma0
            )));
        }
        Ok(Self { d, sigma0, c, mu_d })
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::Distorted {
            dim: 4,
            c: self.c,
            d: self.d,
            sigma0: self.sigma0,
        }
    }

    pub fn minkowski(&self) -> Geometry {
        Geometry::Minkowski { dim: 4, c: self.c }
    }

    /// Minkowski length of a link, `sqrt(mu_d^2 - 2d)`.
    pub fn mu_m(&self) -> f64 {
        (self.mu_d * self.mu_d - 2.0 * self.d).sqrt()
    }
}

/// Relations between distorted and Minkowski quantities of adjacent links.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkRelations {
    /// `mu_M^2 = mu_d^2 - 2d`.
    pub mu_m_sq: f64,
    /// `(u.v)_d - (u.v)_M` for adjacent outer-branch links.
    pub scalar_shift: f64,
}

/// Adjacent links `u = P_{i-1}P_i`, `v = P_iP_{i+1}` in the outer branch
/// have `|u|_d^2 = |u|_M^2 + 2d` and, since three of the four sigma-terms of
/// `(u.v)` are shifted by `d` with signs `+, -, -`, `(u.v)_d = (u.v)_M - d`.
pub fn link_relations(params: &DistortionParams) -> LinkRelations {
    LinkRelations {
        mu_m_sq: params.mu_d * params.mu_d - 2.0 * params.d,
        scalar_shift: -params.d,
    }
}

/// Start of the middle branch of the segment radius, `sqrt(2(sigma0+d))/mu_d`.
pub fn branch_boundary(params: &DistortionParams) -> f64 {
    (2.0 * (params.sigma0 + params.d)).sqrt() / params.mu_d
}

/// Closed-form spatial radius of the distorted segment at parameter `tau`.
pub fn radius_closed_form(params: &DistortionParams, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "tau must lie in [0, 1], got {tau}"
        )));
    }
    let tb = branch_boundary(params);
    if tb >= 0.5 {
        return Err(Error::ParameterRegime(format!(
            "branch boundary {tb} must be below 1/2 for the three branches to be ordered"
        )));
    }
    let DistortionParams {
        d, sigma0, mu_d, ..
    } = *params;
    let mu2 = mu_d * mu_d;
    let f = 1.0 - 2.0 * d / mu2;
    let edge = |s: f64| {
        let k = 1.0 - s * d / (2.0 * (sigma0 + d));
        s * s * mu2 * (k * k / f - sigma0 / (sigma0 + d))
    };
    let r2 = if tau <= tb {
        edge(tau)
    } else if tau < 1.0 - tb {
        1.5 * d + 2.0 * d * (tau - 0.5) * (tau - 0.5) / f
    } else {
        edge(1.0 - tau)
    };
    if r2 < 0.0 {
        if r2 > -R2_CLAMP {
            return Ok(0.0);
        }
        return Err(Error::Internal(format!(
            "negative r^2 = {r2:e} at tau = {tau}"
        )));
    }
    Ok(r2.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wobble {
    pub cosh_theta: f64,
    pub theta: f64,
    pub small_d_approx: f64,
}

/// Printed closed form of the joint angle: `cosh = (mu^2 - d)/(mu^2 - 2d)`,
/// with small-`d` approximation `sqrt(2d)/mu`.
pub fn wobble_angle_closed_form(params: &DistortionParams) -> Wobble {
    let mu2 = params.mu_d * params.mu_d;
    let cosh_theta = (mu2 - params.d) / (mu2 - 2.0 * params.d);
    Wobble {
        cosh_theta,
        theta: cosh_theta.acosh(),
        small_d_approx: (2.0 * params.d).sqrt() / params.mu_d,
    }
}

/// Joint cosh obtained by evaluating exact sigma_d-parallelism with the
/// sigma_d scalar product: `(mu^2 + d)/(mu^2 - 2d)`.
pub fn joint_cosh_exact(params: &DistortionParams) -> f64 {
    let mu2 = params.mu_d * params.mu_d;
    (mu2 + params.d) / (mu2 - 2.0 * params.d)
}

/// `d = hbar / (2 b c)`.
pub fn distortion_from_quantum(hbar: f64, b: f64, c: f64) -> Result<f64> {
    for (name, v) in [("hbar", hbar), ("b", b), ("c", c)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be > 0, got {v}"
            )));
        }
    }
    Ok(hbar / (2.0 * b * c))
}

/// Cross-section profile of the distorted segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeProfile {
    pub tau: Vec<f64>,
    pub radius: Vec<f64>,
    pub radius_closed_form: Option<Vec<f64>>,
}

impl TubeProfile {
    /// Largest `|r_numeric - r_closed|` over the grid.
    pub fn max_abs_deviation(&self) -> Option<f64> {
        let closed = self.radius_closed_form.as_ref()?;
        Some(
            self.radius
                .iter()
                .zip(closed)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Largest relative deviation over grid points where the closed form is
    /// nonzero.
    pub fn max_rel_deviation(&self) -> Option<(f64, f64)> {
        let closed = self.radius_closed_form.as_ref()?;
        self.tau
            .iter()
            .zip(self.radius.iter().zip(closed))
            .filter(|(_, (_, c))| **c > 0.0)
            .map(|(t, (r, c))| (*t, (r - c).abs() / c))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Segment `P0 = 0`, `P1 = (mu_d, 0, 0, 0)` (in units of `c t`) of the
/// distorted geometry, with `tau = x0 / mu_d`.
pub fn segment_endpoints(params: &DistortionParams) -> (Point, Point) {
    (
        Point::origin(4),
        Point::from([params.mu_d / params.c, 0.0, 0.0, 0.0]),
    )
}

/// Root-found radius of the distorted segment at `tau`, probed along `x`.
pub fn segment_radius(params: &DistortionParams, tau: f64) -> Result<f64> {
    let g = params.geometry();
    let (p0, p1) = segment_endpoints(params);
    let obj = segment(&g, &p0, &p1)?;
    let axis = Point::from([tau * params.mu_d / params.c, 0.0, 0.0, 0.0]);
    let r_max = params.mu_d;
    Ok(cross_section_radius(&g, &obj, &axis, &[0.0, 1.0, 0.0, 0.0], r_max, 1e-14, 1e-9)?.radius)
}

/// Numeric and closed-form radius on `points` evenly spaced `tau` values.
pub fn segment_profile(params: &DistortionParams, points: usize) -> Result<TubeProfile> {
    if points < 2 {
        return Err(Error::InvalidParameter(
            "a profile needs at least two tau points".into(),
        ));
    }
    let tau: Vec<f64> = (0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect();
    let radius = tau
        .par_iter()
        .map(|&t| segment_radius(params, t))
        .collect::<Result<Vec<_>>>()?;
    let closed = tau
        .iter()
        .map(|&t| radius_closed_form(params, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(TubeProfile {
        tau,
        radius,
        radius_closed_form: Some(closed),
    })
}

/// Probability measure on the cone of admissible next links.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeMeasure {
    /// Uniform direction in the rest frame of the previous link, mirrored
    /// when it points along the previous link's lab-frame spatial motion.
    #[default]
    Reflected,
    /// Uniform direction in the rest frame of the previous link.
    RestFrame,
}

/// Boost taking the rest 4-velocity `(1, 0, 0, 0)` to `u` (normalized,
/// `(c t, x)` components).
pub fn boost_to(u: &Vector4<f64>) -> Matrix4<f64> {
    let gamma = u[0];
    let mut m = Matrix4::identity();
    m[(0, 0)] = gamma;
    for i in 1..4 {
        m[(0, i)] = u[i];
        m[(i, 0)] = u[i];
        for j in 1..4 {
            m[(i, j)] += u[i] * u[j] / (1.0 + gamma);
        }
    }
    m
}

/// Boost with velocity `beta` (units of `c`).
pub fn lorentz_boost(beta: &Vector3<f64>) -> Result<Matrix4<f64>> {
    let b2 = beta.norm_squared();
    if b2 >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "|beta| = {} must be < 1",
            b2.sqrt()
        )));
    }
    let gamma = 1.0 / (1.0 - b2).sqrt();
    Ok(boost_to(&Vector4::new(
        gamma,
        gamma * beta[0],
        gamma * beta[1],
        gamma * beta[2],
    )))
}

/// Applies `x -> L x + a` to a `(t, x, y, z)` point, `L` acting on
/// `(c t, x, y, z)`.
pub fn transform_point(l: &Matrix4<f64>, shift: &Vector4<f64>, p: &Point, c: f64) -> Point {
    let x = to_ct(p.coords(), c);
    let y = l * x + shift;
    Point::new(vec![y[0] / c, y[1], y[2], y[3]])
}

fn to_ct(p: &[f64], c: f64) -> Vector4<f64> {
    Vector4::new(c * p[0], p[1], p[2], p[3])
}

fn minkowski_dot(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

fn check_spacetime_point(p: &Point) -> Result<()> {
    if p.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: p.dim(),
        });
    }
    Ok(())
}

/// Parallelism residual `(u.v)_d - |u|_d |v|_d` for the joint at `b`.
pub fn joint_residual_d(params: &DistortionParams, a: &Point, b: &Point, c: &Point) -> Result<f64> {
    let g = params.geometry();
    let uv = g.sigma(a, c)? - g.sigma(a, b)? - g.sigma(b, c)?;
    let lu = 2.0 * g.sigma(a, b)?;
    let lv = 2.0 * g.sigma(b, c)?;
    if !(lu > 0.0 && lv > 0.0) {
        return Err(Error::UndefinedDirectionClass(
            "joint links must be timelike".into(),
        ));
    }
    Ok(uv - (lu * lv).sqrt())
}

/// Next point of a world chain: the link `p_cur -> p_next` has distorted
/// length `mu_d` and is sigma_d-parallel to `p_prev -> p_cur`.
///
/// With `(u.v)_d = (u.v)_M - d`, the conditions read `|v|_M^2 = mu_M^2` and
/// `(u.v)_M = |u|_d mu_d + d`. In the rest frame of `u` this fixes the time
/// component of `v` and the length of its spatial part; the spatial
/// direction is drawn from `measure`.
pub fn extend_chain<R: Rng>(
    params: &DistortionParams,
    p_prev: &Point,
    p_cur: &Point,
    rng: &mut R,
    measure: ConeMeasure,
) -> Result<Point> {
    check_spacetime_point(p_prev)?;
    check_spacetime_point(p_cur)?;
    let g = params.geometry();
    let c = params.c;
    let u = to_ct(p_cur.coords(), c) - to_ct(p_prev.coords(), c);
    let u_m2 = minkowski_dot(&u, &u);
    if !(u_m2 > 0.0 && u[0] > 0.0) {
        return Err(Error::UndefinedDirectionClass(
            "previous link must be future timelike".into(),
        ));
    }
    let u_m = u_m2.sqrt();
    let u_d = (2.0 * g.sigma(p_prev, p_cur)?).sqrt();
    let mu_m2 = params.mu_m() * params.mu_m();

    let v0 = (u_d * params.mu_d + params.d) / u_m;
    let spatial = (v0 * v0 - mu_m2).max(0.0).sqrt();
    let dir: [f64; 3] = UnitSphere.sample(rng);
    let mut n = Vector3::from(dir);
    if measure == ConeMeasure::Reflected && n.dot(&Vector3::new(u[1], u[2], u[3])) > 0.0 {
        n = -n;
    }
    let v_rest = Vector4::new(v0, spatial * n[0], spatial * n[1], spatial * n[2]);
    let v = boost_to(&(u / u_m)) * v_rest;
    let cur = p_cur.coords();
    let next = Point::new(vec![
        cur[0] + v[0] / c,
        cur[1] + v[1],
        cur[2] + v[2],
        cur[3] + v[3],
    ]);

    let len = (2.0 * g.sigma(p_cur, &next)?).sqrt();
    if (len - params.mu_d).abs() > LINK_TOL * params.mu_d {
        return Err(Error::Internal(format!(
            "link length {len} differs from mu_d = {}",
            params.mu_d
        )));
    }
    let par = joint_residual_d(params, p_prev, p_cur, &next)?;
    if par.abs() > LINK_TOL * params.mu_d * params.mu_d {
        return Err(Error::Internal(format!(
            "sigma_d parallelism residual {par:e}"
        )));
    }
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldChain {
    pub points: Vec<Point>,
    pub link_length_d: f64,
    pub seed: u64,
    pub measure: ConeMeasure,
    /// `cosh` of the Minkowski angle at joint `i` (between links `i` and
    /// `i + 1`).
    pub cosh_theta_dm: Vec<f64>,
}

impl WorldChain {
    pub fn links(&self) -> usize {
        self.points.len() - 1
    }

    /// `|sqrt(2 sigma_d) - mu_d|` per link.
    pub fn link_length_errors(&self, params: &DistortionParams) -> Result<Vec<f64>> {
        let g = params.geometry();
        self.points
            .windows(2)
            .map(|w| Ok(((2.0 * g.sigma(&w[0], &w[1])?).sqrt() - params.mu_d).abs()))
            .collect()
    }

    /// sigma_d-parallelism residual per joint.
    pub fn parallel_residuals(&self, params: &DistortionParams) -> Result<Vec<f64>> {
        self.points
            .windows(3)
            .map(|w| joint_residual_d(params, &w[0], &w[1], &w[2]))
            .collect()
    }

    /// Spatial distance of each point from the initial time axis.
    pub fn transverse(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| {
                let x = p.coords();
                (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt()
            })
            .collect()
    }
}

fn minkowski_cosh(a: &Point, b: &Point, c: &Point, light: f64) -> f64 {
    let (a, b, c) = (a.coords(), b.coords(), c.coords());
    let uv =
        minkowski_sigma(a, c, light) - minkowski_sigma(a, b, light) - minkowski_sigma(b, c, light);
    let lu = 2.0 * minkowski_sigma(a, b, light);
    let lv = 2.0 * minkowski_sigma(b, c, light);
    uv / (lu * lv).sqrt()
}

/// A world chain of `n_links` links starting with `0 -> (mu_M, 0, 0, 0)`.
/// Link `i` draws from random stream `i` of `seed`.
pub fn simulate_chain(
    params: &DistortionParams,
    n_links: usize,
    seed: u64,
    measure: ConeMeasure,
) -> Result<WorldChain> {
    if n_links == 0 {
        return Err(Error::InvalidParameter(
            "a chain needs at least one link".into(),
        ));
    }
    let mut points = Vec::with_capacity(n_links + 1);
    points.push(Point::origin(4));
    points.push(Point::from([params.mu_m() / params.c, 0.0, 0.0, 0.0]));
    let mut cosh = Vec::with_capacity(n_links.saturating_sub(1));
    for i in 1..n_links {
        let mut r = rng(seed, i as u64);
        let next = extend_chain(params, &points[i - 1], &points[i], &mut r, measure)?;
        cosh.push(minkowski_cosh(&points[i - 1], &points[i], &next, params.c));
        points.push(next);
    }
    Ok(WorldChain {
        points,
        link_length_d: params.mu_d,
        seed,
        measure,
        cosh_theta_dm: cosh,
    })
}

/// SplitMix64 step; used to derive ensemble member seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of ensemble member `k`; member 0 uses the master seed itself.
pub fn ensemble_seed(master: u64, k: usize) -> u64 {
    if k == 0 {
        master
    } else {
        splitmix64(master ^ splitmix64(k as u64))
    }
}

/// `members` chains with seeds from [`ensemble_seed`], simulated in parallel.
pub fn simulate_ensemble(
    params: &DistortionParams,
    n_links: usize,
    master_seed: u64,
    members: usize,
    measure: ConeMeasure,
) -> Result<Vec<WorldChain>> {
    (0..members)
        .into_par_iter()
        .map(|k| simulate_chain(params, n_links, ensemble_seed(master_seed, k), measure))
        .collect()
}

/// Link counts `1, 2, 4, ...` up to and including `n_links`.
pub fn checkpoints(n_links: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 1;
    while n < n_links {
        out.push(n);
        n *= 2;
    }
    out.push(n_links);
    out
}

/// Ensemble root-mean-square transverse displacement after `n` links.
pub fn transverse_rms(chains: &[WorldChain], n: usize) -> f64 {
    let sq: f64 = chains
        .iter()
        .map(|ch| {
            let t = ch.transverse()[n];
            t * t
        })
        .sum();
    (sq / chains.len() as f64).sqrt()
}

/// True when no sigma evaluated by the simulation (links and
/// next-nearest pairs) falls in the band `0 <= sigma_M <= sigma0`.
pub fn avoids_band(params: &DistortionParams, chain: &WorldChain) -> bool {
    let pts = &chain.points;
    let outer =
        |a: &Point, b: &Point| minkowski_sigma(a.coords(), b.coords(), params.c) > params.sigma0;
    pts.windows(2).all(|w| outer(&w[0], &w[1])) && pts.windows(3).all(|w| outer(&w[0], &w[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> DistortionParams {
        DistortionParams::new(0.01, 0.1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn relations() {
        let r = link_relations(&base());
        assert!((r.mu_m_sq - 0.98).abs() < 1e-15);
        assert_eq!(r.scalar_shift, -0.01);
        let z = link_relations(&DistortionParams::new(0.0, 0.1, 1.0, 1.0).unwrap());
        assert_eq!((z.mu_m_sq, z.scalar_shift), (1.0, 0.0));
        assert!(DistortionParams::new(0.5, 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn scalar_shift_matches_direct_evaluation() {
        let p = base();
        let (g, m) = (p.geometry(), p.minkowski());
        let a = Point::from([0.0, 0.0, 0.0, 0.0]);
        let b = Point::from([1.1, 0.2, 0.0, 0.0]);
        let c = Point::from([2.0, 0.1, -0.3, 0.0]);
        let dot = |g: &Geometry| {
            g.sigma(&a, &c).unwrap() - g.sigma(&a, &b).unwrap() - g.sigma(&b, &c).unwrap()
        };
        assert!((dot(&g) - dot(&m) - link_relations(&p).scalar_shift).abs() < 1e-14);
    }

    #[test]
    fn closed_form_radius() {
        let p = base();
        assert_eq!(radius_closed_form(&p, 0.0).unwrap(), 0.0);
        assert_eq!(radius_closed_form(&p, 1.0).unwrap(), 0.0);
        assert!((radius_closed_form(&p, 0.5).unwrap() - 0.015f64.sqrt()).abs() < 1e-15);
        assert!(radius_closed_form(&p, 1.5).is_err());
        let wide = DistortionParams::new(0.01, 0.3, 1.0, 1.0).unwrap();
        assert!(matches!(
            radius_closed_form(&wide, 0.5),
            Err(Error::ParameterRegime(_))
        ));
    }

    #[test]
    fn wobble() {
        let w = wobble_angle_closed_form(&base());
        assert!((w.cosh_theta - 0.99 / 0.98).abs() < 1e-15);
        assert!((w.theta - 0.142_735_94).abs() < 1e-8);
        assert!((w.small_d_approx - 0.02f64.sqrt()).abs() < 1e-15);
        let z = wobble_angle_closed_form(&DistortionParams::new(0.0, 0.1, 1.0, 1.0).unwrap());
        assert_eq!((z.cosh_theta, z.theta), (1.0, 0.0));
        assert!((joint_cosh_exact(&base()) - 1.01 / 0.98).abs() < 1e-14);
    }

    #[test]
    fn quantum_distortion() {
        assert_eq!(distortion_from_quantum(1.0, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(distortion_from_quantum(2.0, 4.0, 0.25).unwrap(), 1.0);
        let d = distortion_from_quantum(1.0545718e-34, 1.0, 2.99792458e8).unwrap();
        assert!((d / 1.7588e-43 - 1.0).abs() < 1e-4);
        assert!(distortion_from_quantum(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn straight_chain_without_distortion() {
        let p = DistortionParams::new(0.0, 0.1, 1.0, 1.0).unwrap();
        let ch = simulate_chain(&p, 20, 3, ConeMeasure::Reflected).unwrap();
        for (k, pt) in ch.points.iter().enumerate() {
            assert!((pt.coords()[0] - k as f64).abs() < 1e-12);
            assert!(ch.transverse()[k] < 1e-12);
        }
    }

    #[test]
    fn boosts_preserve_interval() {
        let l = lorentz_boost(&Vector3::new(0.3, -0.4, 0.5)).unwrap();
        let shift = Vector4::new(0.1, 2.0, -1.0, 0.5);
        let (a, b) = (
            Point::from([0.2, 0.1, 0.3, -0.7]),
            Point::from([1.9, 0.4, -0.2, 0.1]),
        );
        let m = Geometry::minkowski(4, 2.0).unwrap();
        let before = m.sigma(&a, &b).unwrap();
        let after = m
            .sigma(
                &transform_point(&l, &shift, &a, 2.0),
                &transform_point(&l, &shift, &b, 2.0),
            )
            .unwrap();
        assert!((before - after).abs() < 1e-12);
        assert!(lorentz_boost(&Vector3::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(10), vec![1, 2, 4, 8, 10]);
        assert_eq!(checkpoints(8), vec![1, 2, 4, 8]);
        assert_eq!(checkpoints(1), vec![1]);
    }
}
