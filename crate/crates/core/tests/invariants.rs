use std::f64::consts::{PI, TAU};

use gptlab::jointopt::{grid_noise, noise_sum, JointMeasurement};
use gptlab::polygon::{ideal_measurement, radius, Address, IdealMeasurement, Order, Site};
use gptlab::theory::{Symmetry, Theory};
use gptlab::uncertainty::{entropy, entropy_sum, gamma, pur_bound, table_entry, LogBase, PAIRS};
use gptlab::VecV;
use proptest::prelude::*;

fn vx(n: usize, i: usize) -> IdealMeasurement {
    ideal_measurement(Address::vertex(n, i).unwrap()).unwrap()
}

fn disc(t: f64) -> IdealMeasurement {
    ideal_measurement(Address::disc(t).unwrap()).unwrap()
}

fn order_strategy() -> impl Strategy<Value = usize> {
    // 0 stands for the disc
    prop_oneof![3usize..=16, Just(0usize)]
}

fn pair_for(n: usize, i: usize, j: usize, ti: f64, tj: f64) -> (IdealMeasurement, IdealMeasurement) {
    if n == 0 {
        (disc(ti), disc(tj))
    } else {
        (vx(n, i % n), vx(n, j % n))
    }
}

/// Mixed state from barycentric weights on the pure states (or disc angles).
fn mixed_state(th: &Theory, weights: &[f64], angles: &[f64]) -> VecV {
    let total: f64 = weights.iter().sum::<f64>().max(1e-12);
    let points: Vec<VecV> = if th.pure_states().is_empty() || th.order() == Some(Order::Disc) {
        angles.iter().map(|&t| VecV::polar(1.0, t, 1.0)).collect()
    } else {
        (0..weights.len()).map(|k| th.pure_states()[k % th.pure_states().len()]).collect()
    };
    points.iter().zip(weights).map(|(p, w)| (w / total) * *p).sum()
}

/// Independent polygon membership: the point `(x/z, y/z)` against the edge half-planes.
fn in_polygon_cone(n: usize, v: &VecV) -> Option<bool> {
    if v.z() <= 1e-9 {
        return None;
    }
    let (px, py) = (v.x() / v.z(), v.y() / v.z());
    let apothem = radius(Order::Polygon(n)) * (PI / n as f64).cos();
    let margin = (0..n)
        .map(|k| {
            let phi = (2 * k + 1) as f64 * PI / n as f64;
            apothem - (px * phi.cos() + py * phi.sin())
        })
        .fold(f64::INFINITY, f64::min);
    (margin.abs() > 1e-7).then_some(margin > 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn primal_cone_matches_polygon_geometry(n in 3usize..=16, x in -2.0..2.0f64, y in -2.0..2.0f64, z in 0.01..2.0f64) {
        let th = Theory::polygon(n).unwrap();
        let v = VecV::new(x, y, z);
        if let Some(inside) = in_polygon_cone(n, &v) {
            prop_assert_eq!(th.primal_cone_contains(&v), inside);
        }
    }

    #[test]
    fn primal_and_dual_cones_pair_nonnegatively(
        n in 3usize..=16,
        ws in prop::collection::vec(0.0..1.0f64, 16),
        es in prop::collection::vec(0.0..1.0f64, 16),
    ) {
        let th = Theory::polygon(n).unwrap();
        let w: VecV = th.pure_states().iter().zip(&ws).map(|(p, c)| *c * *p).sum();
        let e: VecV = th.dual_generators().iter().zip(&es).map(|(g, c)| *c * *g).sum();
        prop_assert!(th.primal_cone_contains(&w));
        prop_assert!(th.dual_cone_contains(&e));
        prop_assert!(w.dot(&e) >= -1e-12);
    }

    #[test]
    fn dihedral_maps_preserve_the_theory(n in 3usize..=16, rot in 0usize..16, reflect: bool, k in 0usize..16) {
        let th = Theory::polygon(n).unwrap();
        let g = Symmetry::Dihedral { rotation: rot % n, reflect };
        let w = th.pure_states()[k % n];
        let gw = th.apply_symmetry(g, &w).unwrap();
        prop_assert!(th.pure_states().iter().any(|p| p.approx_eq(&gw, 1e-12)));
        let u = th.unit_effect().vector();
        prop_assert!((u.dot(&gw) - 1.0).abs() < 1e-12);
        for e in th.dual_generators() {
            let ge = th.apply_symmetry(g, e).unwrap();
            prop_assert!((ge.dot(&gw) - e.dot(&w)).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_sum_is_symmetry_invariant(
        n in 3usize..=16, i in 0usize..16, j in 0usize..16, s in 0usize..16,
        ws in prop::collection::vec(0.0..1.0f64, 16),
    ) {
        let th = Theory::polygon(n).unwrap();
        let w = mixed_state(&th, &ws[..n], &[]);
        let (a, b) = (vx(n, i % n), vx(n, j % n));
        let (ga, gb) = (vx(n, (i + s) % n), vx(n, (j + s) % n));
        let g = Symmetry::Dihedral { rotation: s % n, reflect: false };
        let gw = th.apply_symmetry(g, &w).unwrap();
        let h = entropy_sum(&a, &b, &th.state(w).unwrap(), LogBase::Bits).unwrap();
        let gh = entropy_sum(&ga, &gb, &th.state(gw).unwrap(), LogBase::Bits).unwrap();
        prop_assert!((h - gh).abs() < 1e-9, "{} vs {}", h, gh);
    }

    #[test]
    fn gamma_is_rotation_covariant(n in order_strategy(), i in 0usize..16, j in 0usize..16, s in 0usize..16, ti in 0.0..TAU, tj in 0.0..TAU, shift in 0.0..TAU) {
        let (a, b) = pair_for(n, i, j, ti, tj);
        let (ga, gb) = if n == 0 {
            (disc(ti + shift), disc(tj + shift))
        } else {
            (vx(n, (i + s) % n), vx(n, (j + s) % n))
        };
        let g0 = gamma(&a, &b).unwrap().gamma;
        let g1 = gamma(&ga, &gb).unwrap().gamma;
        prop_assert!((g0 - g1).abs() < 1e-9);
    }

    #[test]
    fn gamma_scan_equals_table_maximum(n in 3usize..=16, i in 0usize..16, j in 0usize..16) {
        let (i, j) = (i % n, j % n);
        let g = gamma(&vx(n, i), &vx(n, j)).unwrap().gamma;
        let order = Order::Polygon(n);
        let mut table_max = f64::MIN;
        for k in 0..n {
            for (x, y) in PAIRS {
                let t = table_entry(order, Site::Index(i), Site::Index(j), Site::Index(k), x, y).unwrap();
                table_max = table_max.max(t);
            }
        }
        prop_assert!((g - table_max).abs() < 1e-9);
    }

    #[test]
    fn preparation_bound_holds(
        n in order_strategy(), i in 0usize..16, j in 0usize..16, ti in 0.0..TAU, tj in 0.0..TAU,
        ws in prop::collection::vec(0.0..1.0f64, 16),
        angles in prop::collection::vec(0.0..TAU, 16),
    ) {
        let (a, b) = pair_for(n, i, j, ti, tj);
        let th = a.theory();
        let k = if n == 0 { 16 } else { n };
        let w = th.state(mixed_state(th, &ws[..k], &angles)).unwrap();
        let g = gamma(&a, &b).unwrap().gamma;
        for base in [LogBase::Bits, LogBase::Nats] {
            let h = entropy_sum(&a, &b, &w, base).unwrap();
            prop_assert!(h >= pur_bound(g, base).unwrap() - 1e-9);
        }
        // Landau–Pollak: the two largest outcome probabilities add up to at most γ
        let pa = a.effects().iter().map(|e| e.dot(&w.vector())).fold(f64::MIN, f64::max);
        let pb = b.effects().iter().map(|e| e.dot(&w.vector())).fold(f64::MIN, f64::max);
        prop_assert!(pa + pb <= g + 1e-9);
    }

    #[test]
    fn min_entropy_lower_bounds_shannon(raw in prop::collection::vec(0.0..1.0f64, 1..10)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-9);
        let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let max = p.iter().copied().fold(0.0, f64::max);
        let h = entropy(&p, LogBase::Bits);
        prop_assert!(h >= -max.log2() - 1e-12);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn rejection_sampled_joints_respect_the_bound(
        n in order_strategy(), i in 0usize..16, j in 0usize..16, ti in 0.0..TAU, tj in 0.0..TAU,
        noise in prop::collection::vec(-0.08..0.08f64, 9),
    ) {
        let (a, b) = pair_for(n, i, j, ti, tj);
        let th = a.theory();
        let u = th.unit_effect().vector();
        let q = 0.25 * u;
        let m00 = q + VecV::new(noise[0], noise[1], noise[2]);
        let m01 = q + VecV::new(noise[3], noise[4], noise[5]);
        let m10 = q + VecV::new(noise[6], noise[7], noise[8]);
        let cells = vec![vec![m00, m01], vec![m10, u - m00 - m01 - m10]];
        let Ok(m) = JointMeasurement::new(th, cells) else {
            return Err(TestCaseError::reject("grid outside the cone"));
        };
        let bound = pur_bound(gamma(&a, &b).unwrap().gamma, LogBase::Bits).unwrap();
        let ns = noise_sum(&m, &a, &b, LogBase::Bits).unwrap();
        let grid = grid_noise(&m, &a, LogBase::Bits).unwrap() + grid_noise(&m, &b, LogBase::Bits).unwrap();
        prop_assert!(grid >= bound - 1e-9);
        prop_assert!(ns >= grid - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn disc_cones_coincide(x in -2.0..2.0f64, y in -2.0..2.0f64, z in -2.0..2.0f64) {
        let th = Theory::disc();
        let v = VecV::new(x, y, z);
        let inside = z - x.hypot(y);
        prop_assert_eq!(th.dual_cone_contains(&v), th.primal_cone_contains(&v));
        if inside.abs() > 1e-9 {
            prop_assert_eq!(th.primal_cone_contains(&v), inside > 0.0);
        }
    }
}
