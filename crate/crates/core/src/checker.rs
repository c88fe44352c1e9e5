//! Numerical checks of a world function against the Euclideaness
//! conditions I-V, the metric axioms, degenerate-ellipsoid thinness and
//! direction degeneracy.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma_algebra::{
    covariant_coordinates, frame_data, gram_of_points, hadamard_ratio, length_squared,
    scalar_general, DirectionClass, PointVector, Skeleton,
};
use crate::solve::{cluster, multi_start, rng, SearchBox, SolveOptions};
use crate::worldfunc::{Distance, Point, WorldFunction};

/// How many of the worst records a report keeps.
const EVIDENCE_KEEP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "I_symmetry")]
    Symmetry,
    #[serde(rename = "II_dimension")]
    Dimension,
    #[serde(rename = "III_linear_structure")]
    LinearStructure,
    #[serde(rename = "IV_positive_eigenvalues")]
    PositiveEigenvalues,
    #[serde(rename = "V_continuity")]
    Continuity,
    #[serde(rename = "metric_positivity")]
    MetricPositivity,
    #[serde(rename = "metric_triangle")]
    MetricTriangle,
    #[serde(rename = "ellipsoid_1d")]
    Ellipsoid1d,
    #[serde(rename = "degeneracy_probe")]
    DegeneracyProbe,
}

impl ConditionId {
    pub const ALL: [ConditionId; 9] = [
        ConditionId::Symmetry,
        ConditionId::Dimension,
        ConditionId::LinearStructure,
        ConditionId::PositiveEigenvalues,
        ConditionId::Continuity,
        ConditionId::MetricPositivity,
        ConditionId::MetricTriangle,
        ConditionId::Ellipsoid1d,
        ConditionId::DegeneracyProbe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::Symmetry => "I_symmetry",
            ConditionId::Dimension => "II_dimension",
            ConditionId::LinearStructure => "III_linear_structure",
            ConditionId::PositiveEigenvalues => "IV_positive_eigenvalues",
            ConditionId::Continuity => "V_continuity",
            ConditionId::MetricPositivity => "metric_positivity",
            ConditionId::MetricTriangle => "metric_triangle",
            ConditionId::Ellipsoid1d => "ellipsoid_1d",
            ConditionId::DegeneracyProbe => "degeneracy_probe",
        }
    }

    /// Roman numeral for the five Euclideaness conditions.
    pub fn numeral(self) -> Option<&'static str> {
        match self {
            ConditionId::Symmetry => Some("I"),
            ConditionId::Dimension => Some("II"),
            ConditionId::LinearStructure => Some("III"),
            ConditionId::PositiveEigenvalues => Some("IV"),
            ConditionId::Continuity => Some("V"),
            _ => None,
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    /// Accepts the full id (`III_linear_structure`) or the numeral (`III`).
    fn from_str(s: &str) -> Result<Self> {
        ConditionId::ALL
            .into_iter()
            .find(|c| {
                c.as_str().eq_ignore_ascii_case(s)
                    || c.numeral().is_some_and(|n| n.eq_ignore_ascii_case(s))
            })
            .ok_or_else(|| Error::InvalidParameter(format!("unknown condition `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(Error::InvalidParameter(format!("unknown verdict `{s}`"))),
        }
    }
}

/// Input points of one measurement and its residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub points: Vec<Vec<f64>>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    pub verdict: Verdict,
    pub residual_max: f64,
    pub evidence: Vec<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimated_dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solution_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degenerate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn new(
        condition_id: ConditionId,
        verdict: Verdict,
        residual_max: f64,
        evidence: Vec<Evidence>,
    ) -> Self {
        Self {
            condition_id,
            verdict,
            residual_max,
            evidence,
            estimated_dimension: None,
            solution_count: None,
            degenerate: None,
            seed: None,
            notes: Vec::new(),
        }
    }

    fn inconclusive(condition_id: ConditionId, note: impl Into<String>) -> Self {
        let mut r = Self::new(condition_id, Verdict::Inconclusive, 0.0, Vec::new());
        r.notes.push(note.into());
        r
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Keeps the `EVIDENCE_KEEP` largest residuals seen.
#[derive(Default)]
struct Worst {
    items: Vec<Evidence>,
    max: f64,
}

impl Worst {
    fn offer(&mut self, residual: f64, points: impl FnOnce() -> Vec<Vec<f64>>) {
        if residual.is_nan() {
            return;
        }
        self.max = self.max.max(residual);
        let floor = self.items.last().map_or(f64::NEG_INFINITY, |e| e.residual);
        if self.items.len() < EVIDENCE_KEEP || residual > floor {
            self.items.push(Evidence {
                points: points(),
                residual,
            });
            self.items.sort_by(|a, b| b.residual.total_cmp(&a.residual));
            self.items.truncate(EVIDENCE_KEEP);
        }
    }

    /// Evidence restricted to records above `threshold`.
    fn above(self, threshold: f64) -> Vec<Evidence> {
        self.items
            .into_iter()
            .filter(|e| e.residual > threshold)
            .collect()
    }
}

fn coords(points: &[&Point]) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.coords().to_vec()).collect()
}

/// Condition I: `sigma(P, Q) = sigma(Q, P)` over all sample pairs.
pub fn check_symmetry<G: WorldFunction + ?Sized>(
    g: &G,
    sample: &[Point],
    tol: f64,
) -> Result<ConditionReport> {
    if sample.is_empty() {
        return Ok(ConditionReport::inconclusive(
            ConditionId::Symmetry,
            "empty sample",
        ));
    }
    let mut worst = Worst::default();
    let mut violated = false;
    for (i, p) in sample.iter().enumerate() {
        for q in &sample[i..] {
            let pq = g.sigma(p, q)?;
            let qp = g.sigma(q, p)?;
            let residual = (pq - qp).abs();
            violated |= residual > tol * pq.abs().max(qp.abs()).max(1.0);
            worst.offer(residual, || coords(&[p, q]));
        }
    }
    let max = worst.max;
    let verdict = if violated {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let evidence = if violated {
        worst.above(0.0)
    } else {
        worst.items
    };
    Ok(ConditionReport::new(
        ConditionId::Symmetry,
        verdict,
        max,
        evidence,
    ))
}

/// Result of a greedy volume-maximizing skeleton search.
#[derive(Clone, Debug)]
pub struct GreedySkeleton {
    /// Sample indices, `P0` first.
    pub indices: Vec<usize>,
    /// Hadamard ratio of the best rejected extension, if one was tested.
    pub rejected_ratio: Option<f64>,
    pub rejected_indices: Option<Vec<usize>>,
}

/// Grows a skeleton from `sample[first]`, each time adding the point with
/// the largest `|F_k|`. Stops at `max_order` basic vectors, or when the
/// best extension has Hadamard ratio `<= stop_ratio`.
pub fn greedy_skeleton<G: WorldFunction + ?Sized>(
    g: &G,
    sample: &[Point],
    first: usize,
    max_order: Option<usize>,
    stop_ratio: Option<f64>,
) -> Result<GreedySkeleton> {
    let mut chosen = vec![first];
    loop {
        if max_order.is_some_and(|n| chosen.len() > n) {
            return Ok(GreedySkeleton {
                indices: chosen,
                rejected_ratio: None,
                rejected_indices: None,
            });
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for cand in 0..sample.len() {
            if chosen.contains(&cand) {
                continue;
            }
            let mut pts: Vec<&Point> = chosen.iter().map(|&i| &sample[i]).collect();
            pts.push(&sample[cand]);
            let gram = gram_of_points(g, &pts)?;
            let raw = gram.determinant().abs();
            if best.is_none_or(|(_, b, _)| raw > b) {
                best = Some((cand, raw, hadamard_ratio(&gram)));
            }
        }
        let Some((cand, _, ratio)) = best else {
            return Ok(GreedySkeleton {
                indices: chosen,
                rejected_ratio: None,
                rejected_indices: None,
            });
        };
        if stop_ratio.is_some_and(|t| ratio <= t) {
            let mut rejected = chosen.clone();
            rejected.push(cand);
            return Ok(GreedySkeleton {
                indices: chosen,
                rejected_ratio: Some(ratio),
                rejected_indices: Some(rejected),
            });
        }
        chosen.push(cand);
    }
}

/// Condition II: the sample spans a consistent number `n` of independent
/// directions, with every tested `F_{n+1}` vanishing.
///
/// The search is heuristic, so this check never returns `Fail`.
pub fn estimate_dimension<G: WorldFunction + ?Sized>(
    g: &G,
    sample: &[Point],
    tol: f64,
    restarts: usize,
    seed: u64,
) -> Result<ConditionReport> {
    let id = ConditionId::Dimension;
    if sample.len() < 3 {
        let mut r = ConditionReport::inconclusive(id, "sample too small for a dimension estimate");
        r.seed = Some(seed);
        return Ok(r);
    }
    let mut r = rng(seed, 0);
    let mut dims = Vec::with_capacity(restarts.max(1));
    let mut worst = Worst::default();
    let mut saturated = false;
    for k in 0..restarts.max(1) {
        let first = if k == 0 {
            0
        } else {
            r.random_range(0..sample.len())
        };
        let found = greedy_skeleton(g, sample, first, None, Some(tol))?;
        dims.push(found.indices.len() - 1);
        match (found.rejected_ratio, found.rejected_indices) {
            (Some(ratio), Some(idx)) => {
                worst.offer(ratio, || {
                    idx.iter().map(|&i| sample[i].coords().to_vec()).collect()
                });
            }
            _ => saturated = true,
        }
    }
    let n = *dims.iter().max().expect("at least one restart");
    let consistent = dims.iter().all(|&d| d == n);
    let max = worst.max;
    let mut report = if saturated || n + 3 > sample.len() {
        ConditionReport::new(id, Verdict::Inconclusive, max, worst.items).note(format!(
            "sample of {} points saturated at dimension {n}",
            sample.len()
        ))
    } else if !consistent {
        ConditionReport::new(id, Verdict::Inconclusive, max, worst.items)
            .note(format!("restarts disagree on the dimension: {dims:?}"))
    } else {
        ConditionReport::new(id, Verdict::Pass, max, worst.items)
    };
    report.estimated_dimension = Some(n);
    report.seed = Some(seed);
    Ok(report)
}

/// Condition III: `sigma(P, Q) = 1/2 g^ik dx_i dx_k` in the frame `skel`.
pub fn check_linear_structure<G: WorldFunction + ?Sized>(
    g: &G,
    skel: &Skeleton,
    sample: &[Point],
    tol: f64,
) -> Result<ConditionReport> {
    let frame = frame_data(g, skel, tol)?;
    let xs = sample
        .iter()
        .map(|p| covariant_coordinates(g, skel, p))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = Worst::default();
    let mut violated = false;
    for i in 0..sample.len() {
        for j in (i + 1)..sample.len() {
            let lhs = g.sigma(&sample[i], &sample[j])?;
            let rhs = frame.quadratic_form(&xs[i], &xs[j]);
            let residual = (lhs - rhs).abs();
            violated |= residual > tol * lhs.abs().max(1.0);
            worst.offer(residual, || coords(&[&sample[i], &sample[j]]));
        }
    }
    let max = worst.max;
    Ok(if violated {
        ConditionReport::new(
            ConditionId::LinearStructure,
            Verdict::Fail,
            max,
            worst.above(0.0),
        )
    } else {
        ConditionReport::new(
            ConditionId::LinearStructure,
            Verdict::Pass,
            max,
            worst.items,
        )
    })
}

/// Condition IV: every eigenvalue of the frame's metric tensor is positive.
pub fn check_eigenvalues<G: WorldFunction + ?Sized>(
    g: &G,
    skel: &Skeleton,
    tol: f64,
) -> Result<ConditionReport> {
    let frame = frame_data(g, skel, tol)?;
    let scale = frame
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let min = frame
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let residual = (-min).max(0.0);
    let pts: Vec<&Point> = skel.points().iter().collect();
    let evidence = vec![Evidence {
        points: coords(&pts),
        residual,
    }];
    let verdict = if min > tol * scale {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut report = ConditionReport::new(
        ConditionId::PositiveEigenvalues,
        verdict,
        residual,
        evidence,
    );
    report
        .notes
        .push(format!("eigenvalues {:?}", frame.eigenvalues));
    Ok(report)
}

#[derive(Clone, Copy, Debug)]
pub struct ContinuityOptions {
    pub starts: usize,
    pub seed: u64,
}

impl Default for ContinuityOptions {
    fn default() -> Self {
        Self { starts: 8, seed: 0 }
    }
}

/// Condition V: each target `y` has exactly one `P` with `x_i(P) = y_i`.
///
/// Finite carriers are enumerated exactly. Otherwise the equations are
/// solved by multi-start root finding inside `search_box`, roots closer than
/// `10 tol` (relative to the box diameter) counting as one; this only
/// establishes uniqueness inside the box.
pub fn check_continuity<G: WorldFunction + ?Sized>(
    g: &G,
    skel: &Skeleton,
    targets: &[Vec<f64>],
    search_box: &SearchBox,
    tol: f64,
    opts: &ContinuityOptions,
) -> Result<ConditionReport> {
    let id = ConditionId::Continuity;
    frame_data(g, skel, tol)?;
    let n = skel.order();
    if let Some(bad) = targets.iter().find(|y| y.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }

    let mut counts = Vec::with_capacity(targets.len());
    let mut worst = Worst::default();
    let mut unsolved = 0;

    if let Some(carrier) = g.carrier() {
        let xs = carrier
            .iter()
            .map(|p| covariant_coordinates(g, skel, p))
            .collect::<Result<Vec<_>>>()?;
        for y in targets {
            let scale = y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let mismatch: Vec<f64> = xs
                .iter()
                .map(|x| {
                    x.iter()
                        .zip(y)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            let count = mismatch.iter().filter(|&&m| m <= tol * scale).count();
            let (best_i, best) = mismatch
                .iter()
                .copied()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty carrier");
            counts.push(count);
            worst.offer(best, || vec![y.clone(), carrier[best_i].coords().to_vec()]);
        }
        let verdict = if counts.iter().all(|&c| c == 1) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let max = worst.max;
        let evidence = if verdict == Verdict::Fail {
            worst.above(0.0)
        } else {
            worst.items
        };
        let mut report = ConditionReport::new(id, verdict, max, evidence)
            .note("finite carrier: solutions counted by enumeration");
        report.solution_count = counts.iter().copied().find(|&c| c != 1).or(Some(1));
        report.seed = Some(opts.seed);
        return Ok(report);
    }

    let radius = 10.0 * tol * search_box.diameter().max(1.0);
    for (k, y) in targets.iter().enumerate() {
        let scale = y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let f = |x: &[f64]| -> Option<Vec<f64>> {
            let p = Point::new(x.to_vec());
            let cov = covariant_coordinates(g, skel, &p).ok()?;
            Some(cov.iter().zip(y).map(|(a, b)| a - b).collect())
        };
        let solve = SolveOptions {
            tol: tol * scale,
            ..Default::default()
        };
        let roots = multi_start(
            &f,
            search_box,
            opts.starts,
            opts.seed.wrapping_add(k as u64),
            &solve,
        );
        let reps = cluster(&roots, radius);
        let best = roots
            .iter()
            .map(|r| r.residual)
            .fold(f64::INFINITY, f64::min);
        if reps.is_empty() {
            unsolved += 1;
        } else {
            worst.offer(best, || {
                std::iter::once(y.clone())
                    .chain(reps.iter().map(|r| r.x.clone()))
                    .collect()
            });
        }
        counts.push(reps.len());
    }
    let split = counts.iter().any(|&c| c > 1);
    let verdict = if split {
        Verdict::Fail
    } else if unsolved > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let max = worst.max;
    let mut report = ConditionReport::new(id, verdict, max, worst.items)
        .note("bounded-domain: existence and uniqueness checked inside the search box only");
    if unsolved > 0 {
        report
            .notes
            .push(format!("{unsolved} target(s) without a converged root"));
    }
    report.solution_count = counts.iter().copied().find(|&c| c != 1).or(Some(1));
    report.seed = Some(opts.seed);
    Ok(report)
}

/// Metric axioms on a sample: positivity of `rho` and the triangle
/// inequality. Returns `[positivity, triangle]`.
pub fn check_metric_axioms<G: WorldFunction + ?Sized>(
    g: &G,
    sample: &[Point],
    tol: f64,
) -> Result<[ConditionReport; 2]> {
    if sample.len() < 3 {
        return Ok([
            ConditionReport::inconclusive(ConditionId::MetricPositivity, "need at least 3 points"),
            ConditionReport::inconclusive(ConditionId::MetricTriangle, "need at least 3 points"),
        ]);
    }
    let m = sample.len();
    let mut sigma = vec![0.0; m * m];
    let mut scale = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            sigma[i * m + j] = g.sigma(&sample[i], &sample[j])?;
            scale = scale.max(sigma[i * m + j].abs());
        }
    }
    let threshold = tol * scale.max(1.0);

    let mut pos = Worst::default();
    let mut pos_fail = false;
    for i in 0..m {
        for j in 0..m {
            let s = sigma[i * m + j];
            let same = sample[i].coordinate_distance(&sample[j]) == 0.0;
            // negative 2 sigma, or a zero distance between distinct points
            let residual = if same {
                s.abs()
            } else if s <= threshold {
                -2.0 * s + threshold
            } else {
                0.0
            };
            if (same && s.abs() > threshold) || (!same && s <= threshold) {
                pos_fail = true;
            }
            pos.offer(residual.max(0.0), || coords(&[&sample[i], &sample[j]]));
        }
    }
    let pos_max = pos.max;
    let positivity = if pos_fail {
        ConditionReport::new(
            ConditionId::MetricPositivity,
            Verdict::Fail,
            pos_max,
            pos.above(0.0),
        )
    } else {
        ConditionReport::new(
            ConditionId::MetricPositivity,
            Verdict::Pass,
            pos_max,
            pos.items,
        )
    };

    let rho: Vec<Option<f64>> = sigma
        .iter()
        .map(|&s| Distance::from_sigma(s).real())
        .collect();
    let mut tri = Worst::default();
    let mut tri_fail = false;
    let mut skipped = 0usize;
    let mut tested = 0usize;
    let rho_threshold = tol * scale.max(1.0).sqrt();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let (Some(pr), Some(rq), Some(pq)) =
                    (rho[i * m + k], rho[k * m + j], rho[i * m + j])
                else {
                    skipped += 1;
                    continue;
                };
                tested += 1;
                let slack = pr + rq - pq;
                if slack < -rho_threshold {
                    tri_fail = true;
                }
                tri.offer((-slack).max(0.0), || {
                    coords(&[&sample[i], &sample[j], &sample[k]])
                });
            }
        }
    }
    let tri_max = tri.max;
    let mut triangle = if tested == 0 {
        ConditionReport::inconclusive(
            ConditionId::MetricTriangle,
            "no triple with three real distances",
        )
    } else if tri_fail {
        ConditionReport::new(
            ConditionId::MetricTriangle,
            Verdict::Fail,
            tri_max,
            tri.above(0.0),
        )
    } else {
        ConditionReport::new(
            ConditionId::MetricTriangle,
            Verdict::Pass,
            tri_max,
            tri.items,
        )
    };
    if skipped > 0 {
        triangle
            .notes
            .push(format!("{skipped} triple(s) skipped: imaginary distance"));
    }
    Ok([positivity, triangle])
}

/// Thinness of the degenerate ellipsoid `rho(P,R) + rho(R,Q) = rho(P,Q)`:
/// fails when some probe lies strictly inside it.
pub fn check_degenerate_ellipsoid<G: WorldFunction + ?Sized>(
    g: &G,
    p: &Point,
    q: &Point,
    probes: &[Point],
    tol: f64,
) -> Result<ConditionReport> {
    let id = ConditionId::Ellipsoid1d;
    let pq = match Distance::from_sigma(g.sigma(p, q)?) {
        Distance::Real(v) if v > 0.0 => v,
        _ => {
            return Err(Error::UndefinedDirectionClass(
                "degenerate ellipsoid needs a positive real distance between its foci".into(),
            ))
        }
    };
    let mut worst = Worst::default();
    let mut interior = 0usize;
    let mut skipped = 0usize;
    for r in probes {
        let (Some(pr), Some(rq)) = (
            Distance::from_sigma(g.sigma(p, r)?).real(),
            Distance::from_sigma(g.sigma(r, q)?).real(),
        ) else {
            skipped += 1;
            continue;
        };
        let f = pr + rq - pq;
        if f < -tol * pq.max(1.0) {
            interior += 1;
        }
        worst.offer((-f).max(0.0), || vec![r.coords().to_vec()]);
    }
    let max = worst.max;
    let mut report = if interior > 0 {
        ConditionReport::new(id, Verdict::Fail, max, worst.above(0.0)).note(format!(
            "{interior} internal point(s): the degenerate ellipsoid is not one-dimensional"
        ))
    } else {
        ConditionReport::new(id, Verdict::Pass, max, worst.items)
    };
    if skipped > 0 {
        report
            .notes
            .push(format!("{skipped} probe(s) skipped: imaginary distance"));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeOptions {
    pub starts: usize,
    pub seed: u64,
    /// Root acceptance, relative to the problem scale.
    pub tol: f64,
    /// Roots closer than this (coordinate distance) are one solution.
    pub cluster_radius: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            tol: 1e-9,
            cluster_radius: 1e-4,
        }
    }
}

/// Searches for points `R` with `P0R` parallel to `direction` (same class,
/// same orientation) and `|P0R| = a`.
///
/// The geometry is degenerate at `p0` in this direction when there is at
/// most one such `R`; the report passes in that case.
pub fn degeneracy_probe<G: WorldFunction + ?Sized>(
    g: &G,
    p0: &Point,
    direction: &PointVector,
    a: f64,
    search_box: &SearchBox,
    opts: &ProbeOptions,
) -> Result<ConditionReport> {
    let id = ConditionId::DegeneracyProbe;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "probe length must be > 0, got {a}"
        )));
    }
    let lu = length_squared(g, direction)?;
    let class = DirectionClass::of(lu).ok_or_else(|| {
        Error::UndefinedDirectionClass("direction has zero squared length".into())
    })?;
    let sign = match class {
        DirectionClass::Timelike => 1.0,
        DirectionClass::Spacelike => -1.0,
    };
    let u_len = lu.abs().sqrt();
    let scale = (a * a).max(u_len * a).max(1.0);

    let f = |x: &[f64]| -> Option<Vec<f64>> {
        let r = Point::new(x.to_vec());
        let v = PointVector::new(p0.clone(), r);
        let lv = length_squared(g, &v).ok()?;
        let uv = scalar_general(g, direction, &v).ok()?;
        Some(vec![lv - sign * a * a, uv - sign * u_len * a])
    };
    let solve = SolveOptions {
        tol: opts.tol * scale,
        ..Default::default()
    };
    let roots = multi_start(&f, search_box, opts.starts, opts.seed, &solve);
    // keep only roots of the requested class
    let roots: Vec<_> = roots
        .into_iter()
        .filter(|root| {
            let v = PointVector::new(p0.clone(), Point::new(root.x.clone()));
            length_squared(g, &v).is_ok_and(|l| DirectionClass::of(l) == Some(class))
        })
        .collect();
    let reps = cluster(&roots, opts.cluster_radius);

    let mut worst = Worst::default();
    for root in &roots {
        worst.offer(root.residual, || vec![root.x.clone()]);
    }
    let max = worst.max;
    let mut report = if reps.is_empty() {
        ConditionReport::inconclusive(id, "no start converged to a solution")
    } else {
        let degenerate = reps.len() <= 1;
        let verdict = if degenerate {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let mut r = ConditionReport::new(id, verdict, max, worst.items);
        r.degenerate = Some(degenerate);
        r
    };
    report.solution_count = Some(reps.len());
    report.seed = Some(opts.seed);
    report.notes.push(format!(
        "{} of {} starts converged; {} cluster(s) at radius {:e}",
        roots.len(),
        opts.starts,
        reps.len(),
        opts.cluster_radius
    ));
    Ok(report)
}

/// `m` seeded points uniform in `[-half, half]^dim`.
pub fn random_sample(dim: usize, m: usize, half: f64, seed: u64) -> Vec<Point> {
    let mut r = rng(seed, 0);
    (0..m)
        .map(|_| {
            Point::new(
                (0..dim)
                    .map(|_| r.random_range(-half..half))
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub tol: f64,
    /// Sample size for geometries without a finite carrier; defaults to
    /// `max(dim + 8, 20)`.
    pub sample_size: Option<usize>,
    /// Half-width of the sampling cube.
    pub half_width: f64,
    pub restarts: usize,
    pub continuity_targets: usize,
    pub continuity_starts: usize,
    /// Inflation of the sample bounding box used as the condition V box.
    pub box_factor: f64,
    pub metric: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-9,
            sample_size: None,
            half_width: 1.0,
            restarts: 16,
            continuity_targets: 5,
            continuity_starts: 8,
            box_factor: 1.5,
            metric: true,
        }
    }
}

/// Runs conditions I-V (and optionally the metric axioms) on a seeded
/// sample of the geometry.
pub fn run_suite<G: WorldFunction + ?Sized>(
    g: &G,
    opts: &SuiteOptions,
) -> Result<Vec<ConditionReport>> {
    let sample: Vec<Point> = match g.carrier() {
        Some(c) => c.to_vec(),
        None => {
            let m = opts.sample_size.unwrap_or((g.dim() + 8).max(20));
            random_sample(g.dim(), m, opts.half_width, opts.seed)
        }
    };
    let mut reports = vec![check_symmetry(g, &sample, opts.tol)?];

    let dim_report = estimate_dimension(
        g,
        &sample,
        opts.tol,
        opts.restarts,
        opts.seed.wrapping_add(1),
    )?;
    let order = match g.carrier() {
        Some(_) => dim_report.estimated_dimension.unwrap_or(1),
        None => g.dim(),
    };
    reports.push(dim_report);

    let chosen = greedy_skeleton(g, &sample, 0, Some(order), None)?;
    let skel = Skeleton::new(chosen.indices.iter().map(|&i| sample[i].clone()).collect())?;
    let frame_ok = chosen.indices.len() == order + 1 && frame_data(g, &skel, opts.tol).is_ok();

    if frame_ok {
        reports.push(check_linear_structure(g, &skel, &sample, opts.tol)?);
        reports.push(check_eigenvalues(g, &skel, opts.tol)?);

        let mut r = rng(opts.seed, 2);
        let xs = sample
            .iter()
            .map(|p| covariant_coordinates(g, &skel, p))
            .collect::<Result<Vec<_>>>()?;
        let targets: Vec<Vec<f64>> = (0..opts.continuity_targets)
            .map(|_| {
                let mut idx: Vec<usize> = (0..sample.len()).collect();
                idx.shuffle(&mut r);
                let take = idx.len().min(3);
                let w: Vec<f64> = (0..take).map(|_| r.random_range(0.05..1.0)).collect();
                let total: f64 = w.iter().sum();
                (0..order)
                    .map(|c| {
                        idx[..take]
                            .iter()
                            .zip(&w)
                            .map(|(&i, wi)| wi / total * xs[i][c])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = sample.iter().map(|p| p.coords()).collect();
        let bx = SearchBox::around(&refs, opts.box_factor);
        let copts = ContinuityOptions {
            starts: opts.continuity_starts,
            seed: opts.seed.wrapping_add(3),
        };
        reports.push(check_continuity(g, &skel, &targets, &bx, opts.tol, &copts)?);
    } else {
        for id in [
            ConditionId::LinearStructure,
            ConditionId::PositiveEigenvalues,
            ConditionId::Continuity,
        ] {
            reports.push(ConditionReport::inconclusive(
                id,
                "no nondegenerate skeleton found in the sample",
            ));
        }
    }

    if opts.metric {
        reports.extend(check_metric_axioms(g, &sample, opts.tol)?);
    }
    for r in &mut reports {
        r.seed.get_or_insert(opts.seed);
    }
    Ok(reports)
}
