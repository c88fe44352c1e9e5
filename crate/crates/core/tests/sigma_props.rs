use proptest::prelude::*;
use tgeom::sigma_algebra::{
    coordinate_collinearity, gram_determinant, is_collinear, scalar_common_origin, scalar_general,
    DEFAULT_TOL,
};
use tgeom::worldfunc::distort;
use tgeom::{Geometry, Point, PointVector, Skeleton};

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn rel_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1.0)
}

fn four_points(max_dim: usize) -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1..=max_dim).prop_flat_map(|n| (Just(n), prop::collection::vec(coords(n), 4)))
}

proptest! {
    #[test]
    fn euclidean_scalar_matches_dot((n, pts) in four_points(5)) {
        let g = Geometry::euclidean(n).unwrap();
        let v = PointVector::new(pts[0].clone(), pts[1].clone());
        let w = PointVector::new(pts[2].clone(), pts[3].clone());
        let a = diff(&pts[1], &pts[0]);
        let b = diff(&pts[3], &pts[2]);
        let oracle = dot(&a, &b);
        let scale = dot(&a, &a).sqrt() * dot(&b, &b).sqrt();
        prop_assert!(rel_close(scalar_general(&g, &v, &w).unwrap(), oracle, 1e-10, scale));
    }

    #[test]
    fn minkowski_scalar_matches_interval(pts in prop::collection::vec(coords(4), 4), c in 0.5..3.0f64) {
        let g = Geometry::minkowski(4, c).unwrap();
        let v = PointVector::new(pts[0].clone(), pts[1].clone());
        let w = PointVector::new(pts[2].clone(), pts[3].clone());
        let a = diff(&pts[1], &pts[0]);
        let b = diff(&pts[3], &pts[2]);
        let oracle = c * c * a[0] * b[0] - dot(&a[1..], &b[1..]);
        let scale = (c * c * a[0] * a[0] + dot(&a[1..], &a[1..])).sqrt()
            * (c * c * b[0] * b[0] + dot(&b[1..], &b[1..])).sqrt();
        prop_assert!(rel_close(scalar_general(&g, &v, &w).unwrap(), oracle, 1e-10, scale));
    }

    #[test]
    fn scalar_product_telescopes((n, pts) in four_points(4)) {
        let g = Geometry::euclidean(n).unwrap();
        let v = PointVector::new(pts[0].clone(), pts[1].clone());
        let w1 = PointVector::new(pts[1].clone(), pts[2].clone());
        let w2 = PointVector::new(pts[2].clone(), pts[3].clone());
        let w12 = PointVector::new(pts[1].clone(), pts[3].clone());
        let lhs = scalar_general(&g, &v, &w1).unwrap() + scalar_general(&g, &v, &w2).unwrap();
        let rhs = scalar_general(&g, &v, &w12).unwrap();
        prop_assert!(rel_close(lhs, rhs, 1e-10, 100.0));

        // the telescoping identity does not depend on the geometry
        let d = Geometry::distorted(n, 1.0, 0.05, 0.2).unwrap();
        let lhs = scalar_general(&d, &v, &w1).unwrap() + scalar_general(&d, &v, &w2).unwrap();
        prop_assert!(rel_close(lhs, scalar_general(&d, &v, &w12).unwrap(), 1e-10, 100.0));
    }

    #[test]
    fn scalar_product_is_symmetric(pts in prop::collection::vec(coords(4), 4)) {
        let g = Geometry::distorted(4, 1.0, 0.01, 0.1).unwrap();
        let v = PointVector::new(pts[0].clone(), pts[1].clone());
        let w = PointVector::new(pts[2].clone(), pts[3].clone());
        let a = scalar_general(&g, &v, &w).unwrap();
        let b = scalar_general(&g, &w, &v).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn common_origin_is_special_case(pts in prop::collection::vec(coords(3), 3)) {
        let g = Geometry::minkowski(3, 1.0).unwrap();
        let p: Vec<Point> = pts.into_iter().map(Point::new).collect();
        let a = scalar_common_origin(&g, &p[0], &p[1], &p[2]).unwrap();
        let b = scalar_general(
            &g,
            &PointVector::new(p[0].clone(), p[1].clone()),
            &PointVector::new(p[0].clone(), p[2].clone()),
        )
        .unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn surplus_gram_vanishes(n in 1usize..=4, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = Geometry::euclidean(n).unwrap();
        let pts: Vec<Point> = (0..n + 2)
            .map(|_| Point::new((0..n).map(|_| r.random_range(-1.0..1.0)).collect::<Vec<_>>()))
            .collect();
        let skel = Skeleton::new(pts).unwrap();
        prop_assert!(gram_determinant(&g, &skel).unwrap().abs() < 1e-8);
    }

    #[test]
    fn frame_collinearity_agrees_with_sigma_test_in_euclidean(
        frame in prop::collection::vec(coords(2), 3),
        q in coords(2),
        s in -2.0..2.0f64,
        generic in coords(2),
        on_line in any::<bool>(),
    ) {
        let g = Geometry::euclidean(2).unwrap();
        let frame: Vec<Point> = frame.into_iter().map(Point::new).collect();
        let Ok(skel) = Skeleton::new(frame.clone()) else { return Ok(()) };
        prop_assume!(gram_determinant(&g, &skel).unwrap().abs() > 1e-3);
        prop_assume!(s.abs() > 1e-3);
        let p0 = frame[0].coords();
        let q_vec = diff(&q, p0);
        prop_assume!(dot(&q_vec, &q_vec) > 1e-3);
        let r: Vec<f64> = if on_line {
            p0.iter().zip(&q_vec).map(|(a, b)| a + s * b).collect()
        } else {
            generic
        };
        let r_vec = diff(&r, p0);
        prop_assume!(dot(&r_vec, &r_vec) > 1e-3);
        // keep generic probes away from the line so the two tolerances agree
        let cross = q_vec[0] * r_vec[1] - q_vec[1] * r_vec[0];
        prop_assume!(on_line || cross.abs() > 1e-3);
        let (q, r) = (Point::new(q), Point::new(r));
        let by_frame = coordinate_collinearity(&g, &skel, &q, &r, DEFAULT_TOL, false).unwrap().collinear;
        let by_sigma = is_collinear(&g, &frame[0], &q, &r, DEFAULT_TOL).unwrap();
        prop_assert_eq!(by_frame, by_sigma);
        prop_assert_eq!(by_frame, on_line);
    }

    #[test]
    fn distortion_is_continuous(d in 0.0..0.5f64, sigma0 in 0.01..2.0f64, eps in 1e-12..1e-9f64) {
        for x in [0.0, sigma0] {
            let below = distort(x - eps, d, sigma0);
            let above = distort(x + eps, d, sigma0);
            prop_assert!((below - above).abs() < 1e-6 * (1.0 + d / sigma0));
        }
    }
}
