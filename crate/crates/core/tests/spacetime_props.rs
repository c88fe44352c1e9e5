use nalgebra::{Vector3, Vector4};
use proptest::prelude::*;
use tgeom::solve::rng;
use tgeom::spacetime::{
    avoids_band, branch_boundary, extend_chain, joint_cosh_exact, lorentz_boost,
    radius_closed_form, segment_radius, simulate_chain, transform_point, wobble_angle_closed_form,
    ConeMeasure, DistortionParams,
};
use tgeom::{Point, WorldFunction};

fn params() -> impl Strategy<Value = DistortionParams> {
    (0.001..0.03f64, 0.03..0.12f64, 1.0..3.0f64)
        .prop_map(|(d, sigma0, mu)| DistortionParams::new(d, sigma0, 1.0, mu).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_is_continuous_at_branch_edges(p in params()) {
        let tb = branch_boundary(&p);
        prop_assume!(tb < 0.5 - 1e-6);
        for edge in [tb, 1.0 - tb] {
            let lo = radius_closed_form(&p, edge - 1e-9).unwrap();
            let hi = radius_closed_form(&p, edge + 1e-9).unwrap();
            prop_assert!((lo - hi).abs() <= 1e-6 * lo.max(hi), "edge {edge}: {lo} vs {hi}");
        }
    }

    #[test]
    fn closed_form_is_symmetric(p in params(), tau in 0.0..1.0f64) {
        prop_assume!(branch_boundary(&p) < 0.5);
        let a = radius_closed_form(&p, tau).unwrap();
        let b = radius_closed_form(&p, 1.0 - tau).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn numeric_radius_is_symmetric(p in params(), tau in 0.0..0.5f64) {
        let a = segment_radius(&p, tau).unwrap();
        let b = segment_radius(&p, 1.0 - tau).unwrap();
        prop_assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn wobble_decreases_with_mass(d in 0.001..0.05f64, m1 in 1.0..5.0f64, dm in 0.01..5.0f64) {
        let a = DistortionParams::new(d, 0.1, 1.0, m1).unwrap();
        let b = DistortionParams::new(d, 0.1, 1.0, m1 + dm).unwrap();
        prop_assert!(wobble_angle_closed_form(&a).theta > wobble_angle_closed_form(&b).theta);
        prop_assert!(joint_cosh_exact(&a) > joint_cosh_exact(&b));
    }

    #[test]
    fn distorted_sigma_is_poincare_invariant(
        a in prop::array::uniform4(-2.0..2.0f64),
        b in prop::array::uniform4(-2.0..2.0f64),
        beta in prop::array::uniform3(-0.55..0.55f64),
        shift in prop::array::uniform4(-5.0..5.0f64),
    ) {
        let p = DistortionParams::new(0.01, 0.1, 1.0, 1.0).unwrap();
        let g = p.geometry();
        let l = lorentz_boost(&Vector3::from(beta)).unwrap();
        let s = Vector4::from(shift);
        let (a, b) = (Point::from(a), Point::from(b));
        let before = g.sigma(&a, &b).unwrap();
        let after = g.sigma(&transform_point(&l, &s, &a, 1.0), &transform_point(&l, &s, &b, 1.0)).unwrap();
        prop_assert!((before - after).abs() <= 1e-9 * before.abs().max(1.0));
    }

    #[test]
    fn chains_keep_lengths_and_parallelism(p in params(), seed in any::<u64>()) {
        let ch = simulate_chain(&p, 60, seed, ConeMeasure::Reflected).unwrap();
        for e in ch.link_length_errors(&p).unwrap() {
            prop_assert!(e < 1e-9 * p.mu_d);
        }
        for r in ch.parallel_residuals(&p).unwrap() {
            prop_assert!(r.abs() < 1e-9 * p.mu_d * p.mu_d);
        }
        for w in ch.points.windows(2) {
            prop_assert!(w[1].coords()[0] > w[0].coords()[0]);
        }
        let exact = joint_cosh_exact(&p);
        for c in &ch.cosh_theta_dm {
            prop_assert!((c - exact).abs() < 1e-9);
        }
        prop_assert!(avoids_band(&p, &ch));
    }
}

#[test]
fn no_distortion_continues_straight() {
    let p = DistortionParams::new(0.0, 0.1, 1.0, 1.3).unwrap();
    let prev = Point::from([0.0, 0.1, 0.0, 0.0]);
    let cur = Point::from([1.4, 0.3, 0.1, -0.2]);
    // rescale the link to Minkowski length mu
    let u: Vec<f64> = cur
        .coords()
        .iter()
        .zip(prev.coords())
        .map(|(a, b)| a - b)
        .collect();
    let len = (u[0] * u[0] - u[1] * u[1] - u[2] * u[2] - u[3] * u[3]).sqrt();
    let cur = prev.offset(&u, 1.3 / len);
    let next = extend_chain(&p, &prev, &cur, &mut rng(1, 1), ConeMeasure::RestFrame).unwrap();
    let expected = cur.offset(&u, 1.3 / len);
    assert!(next.coordinate_distance(&expected) < 1e-9);
}

#[test]
fn chains_are_reproducible() {
    let p = DistortionParams::new(0.01, 0.1, 1.0, 1.0).unwrap();
    let a = simulate_chain(&p, 200, 9, ConeMeasure::Reflected).unwrap();
    let b = simulate_chain(&p, 200, 9, ConeMeasure::Reflected).unwrap();
    let c = simulate_chain(&p, 200, 10, ConeMeasure::Reflected).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.points, c.points);
}

#[test]
fn rest_frame_measure_satisfies_constraints_while_it_lasts() {
    let p = DistortionParams::new(0.01, 0.1, 1.0, 1.0).unwrap();
    let ch = simulate_chain(&p, 40, 5, ConeMeasure::RestFrame).unwrap();
    let exact = joint_cosh_exact(&p);
    assert!(ch.cosh_theta_dm.iter().all(|c| (c - exact).abs() < 1e-9));
}

#[test]
fn light_speed_is_honoured() {
    let p = DistortionParams::new(0.01, 0.1, 2.5, 1.0).unwrap();
    let ch = simulate_chain(&p, 100, 3, ConeMeasure::Reflected).unwrap();
    assert!(ch.link_length_errors(&p).unwrap().iter().all(|e| *e < 1e-9));
    assert!(ch
        .parallel_residuals(&p)
        .unwrap()
        .iter()
        .all(|r| r.abs() < 1e-9));
}
