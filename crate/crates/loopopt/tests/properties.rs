//! Randomized structural checks of the metric layer: symmetry,
//! homogeneity, Cauchy–Schwarz, the Riesz defining equation, and the
//! square-root velocity round trip.  Curves and fields come from the
//! crate's own seeded generators so every case is a valid immersion.

use loopopt::metrics::{inner, norm, riesz};
use loopopt::probes::{random_immersed_curves, random_smooth_fields};
use loopopt::{srvt_inverse, LoopCurve, MetricKind, TangentField};
use proptest::prelude::*;

const N: usize = 32;

fn curve(seed: u64) -> LoopCurve {
    random_immersed_curves(N, 1, seed).unwrap().pop().unwrap()
}

fn fields(seed: u64, count: usize) -> Vec<TangentField> {
    random_smooth_fields(N, count, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_product_is_symmetric(seed in 0u64..10_000) {
        let c = curve(seed);
        let f = fields(seed ^ 0x5bd1e995, 2);
        for m in MetricKind::ALL {
            let uv = inner(m, &c, &f[0], &f[1]).unwrap();
            let vu = inner(m, &c, &f[1], &f[0]).unwrap();
            let scale = uv.abs().max(vu.abs()).max(1e-30);
            prop_assert!(
                (uv - vu).abs() <= 1e-12 * scale,
                "{}: {uv} vs {vu}", m.name()
            );
        }
    }

    #[test]
    fn norm_is_absolutely_homogeneous(seed in 0u64..10_000, t in -4.0f64..4.0) {
        let c = curve(seed);
        let u = fields(seed ^ 0x9e3779b9, 1).pop().unwrap();
        for m in MetricKind::ALL {
            let lhs = norm(m, &c, &u.scaled(t)).unwrap();
            let rhs = t.abs() * norm(m, &c, &u).unwrap();
            prop_assert!(
                (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs),
                "{}: {lhs} vs {rhs}", m.name()
            );
        }
    }

    #[test]
    fn cauchy_schwarz_holds(seed in 0u64..10_000) {
        let c = curve(seed);
        let f = fields(seed ^ 0x2545f491, 2);
        for m in MetricKind::ALL {
            let uv = inner(m, &c, &f[0], &f[1]).unwrap().abs();
            let bound = norm(m, &c, &f[0]).unwrap() * norm(m, &c, &f[1]).unwrap();
            prop_assert!(
                uv <= bound * (1.0 + 1e-10) + 1e-30,
                "{}: |<u,v>| = {uv} > {bound}", m.name()
            );
        }
    }

    #[test]
    fn riesz_map_solves_the_pairing_equation(seed in 0u64..10_000) {
        // For the metrics with everywhere-solvable Riesz problems, the
        // lift u of a covector w must satisfy g(u, v) = (w, v)_flat for
        // every probe v.
        let c = curve(seed);
        let mut f = fields(seed ^ 0x94d049bb, 3);
        let v2 = f.pop().unwrap();
        let v1 = f.pop().unwrap();
        let w = f.pop().unwrap();
        for m in [MetricKind::FlatL2, MetricKind::InvariantL2, MetricKind::InvariantH1] {
            let u = riesz(m, &c, &w).unwrap();
            for v in [&v1, &v2] {
                let lhs = inner(m, &c, &u, v).unwrap();
                let rhs = inner(MetricKind::FlatL2, &c, &w, v).unwrap();
                let scale = norm(MetricKind::FlatL2, &c, &w).unwrap()
                    * norm(MetricKind::FlatL2, &c, v).unwrap();
                prop_assert!(
                    (lhs - rhs).abs() <= 1e-9 * (1.0 + scale),
                    "{}: g(u,v) = {lhs} vs (w,v) = {rhs}", m.name()
                );
            }
        }
    }

    #[test]
    fn srvt_round_trip_recovers_the_curve(seed in 0u64..10_000) {
        let c = curve(seed);
        let q = c.srvt().unwrap();
        let back = srvt_inverse(&q, c.point(0)).unwrap();
        let dev = back.sub(&c).unwrap().linf_norm();
        prop_assert!(dev <= 1e-10 * (1.0 + c.linf_norm()), "deviation {dev}");
    }
}
