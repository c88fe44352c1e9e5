//! Small numerical kit: damped least-squares root finding, root clustering,
//! bisection and seeded random streams.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Deterministic random stream `stream` of the master `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Axis-aligned coordinate box.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds must have equal length");
        Self { lo, hi }
    }

    /// `center +- half` in every coordinate.
    pub fn cube(center: &[f64], half: f64) -> Self {
        Self::new(
            center.iter().map(|c| c - half).collect(),
            center.iter().map(|c| c + half).collect(),
        )
    }

    /// Bounding box of `points`, inflated about its center by `factor`.
    pub fn around(points: &[&[f64]], factor: f64) -> Self {
        let dim = points[0].len();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        for k in 0..dim {
            let mid = 0.5 * (lo[k] + hi[k]);
            let half = (0.5 * (hi[k] - lo[k])).max(0.5) * factor;
            lo[k] = mid - half;
            hi[k] = mid + half;
        }
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l) * (h - l))
            .sum::<f64>()
            .sqrt()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| if h > l { rng.random_range(*l..*h) } else { *l })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Convergence threshold on the residual norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            fd_step: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn jacobian<F>(f: &F, x: &[f64], m: usize, step: f64) -> Option<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = step * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let plus = f(&probe)?;
        probe[j] = x[j] - h;
        let minus = f(&probe)?;
        probe[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Some(jac)
}

/// Damped minimum-norm Gauss-Newton for `f(x) = 0`.
///
/// The step is `-J^T (J J^T + lambda I)^-1 r`, which stays well defined for
/// underdetermined systems and moves to the nearest point of a solution
/// manifold. `f` returns `None` where it is undefined; such trial points are
/// treated as failed steps. Returns `None` unless `|f| <= tol` was reached.
pub fn solve_min_norm<F>(f: &F, x0: &[f64], opts: &SolveOptions) -> Option<Root>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let m = r.len();
    let mut rn = norm(&r);
    let mut lambda: Option<f64> = None;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let jac = jacobian(f, &x, m, opts.fd_step)?;
        let jjt = &jac * jac.transpose();
        let lam =
            *lambda.get_or_insert_with(|| 1e-3 * jjt.diagonal().amax().max(f64::MIN_POSITIVE));
        let mut a = jjt;
        for i in 0..m {
            a[(i, i)] += lam;
        }
        let Some(y) = a.lu().solve(&DVector::from_column_slice(&r)) else {
            lambda = Some(lam * 8.0);
            continue;
        };
        let delta = -(jac.transpose() * y);
        let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
        match f(&trial) {
            Some(rt) if norm(&rt) < rn => {
                let step = delta.norm();
                x = trial;
                r = rt;
                rn = norm(&r);
                lambda = Some(lam / 4.0);
                if rn <= opts.tol && step < 1e-12 {
                    break;
                }
            }
            _ => {
                if rn <= opts.tol {
                    break;
                }
                lambda = Some(lam * 8.0);
                if lam > 1e30 {
                    break;
                }
            }
        }
    }
    (rn <= opts.tol).then_some(Root {
        x,
        residual: rn,
        iterations,
    })
}

/// Runs [`solve_min_norm`] from `starts` seeded points in `bx` and keeps the
/// converged roots that lie inside the box. Deterministic for a fixed seed.
pub fn multi_start<F>(
    f: &F,
    bx: &SearchBox,
    starts: usize,
    seed: u64,
    opts: &SolveOptions,
) -> Vec<Root>
where
    F: Fn(&[f64]) -> Option<Vec<f64>> + Sync,
{
    let mut r = rng(seed, 0);
    let initial: Vec<Vec<f64>> = (0..starts).map(|_| bx.sample(&mut r)).collect();
    initial
        .par_iter()
        .filter_map(|x0| solve_min_norm(f, x0, opts))
        .filter(|root| bx.contains(&root.x))
        .collect()
}

/// Greedy clustering: a root opens a new cluster unless it lies within
/// `radius` of an existing representative.
pub fn cluster(roots: &[Root], radius: f64) -> Vec<Root> {
    let mut reps: Vec<Root> = Vec::new();
    for root in roots {
        let near = reps.iter().any(|rep| {
            rep.x
                .iter()
                .zip(&root.x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                <= radius
        });
        if !near {
            reps.push(root.clone());
        }
    }
    reps
}

/// Bisection on a bracket `[a, b]` with `fa`, `fb` of opposite sign.
/// Undefined interior values are treated as the sign of `fa`.
pub fn bisect<F>(f: F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64
where
    F: Fn(f64) -> Option<f64>,
{
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid).unwrap_or(fa);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
