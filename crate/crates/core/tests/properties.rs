use minimal_timelike::algebra::{AlgebraError, SplitComplex};
use minimal_timelike::canonical::{ApplyGauge, CanonicalGauge, Sign};
use minimal_timelike::classify::{classify_cubic, CubicParametrization, Verdict};
use minimal_timelike::domain::{Grid, Rect};
use minimal_timelike::equivalence::{
    lorentz_defect, minkowski_metric, moebius_transform, motion_witness, witness_discrepancy, MoebiusParams,
};
use minimal_timelike::geometry::{minkowski_inner, SampledField};
use minimal_timelike::holofn::HoloExpr;
use minimal_timelike::weierstrass::GeneratingData;
use nalgebra::Vector3;
use proptest::prelude::*;

fn d(re: f64, im: f64) -> SplitComplex {
    SplitComplex::new(re, im)
}

fn h(s: &str) -> HoloExpr {
    HoloExpr::parse(s).unwrap()
}

fn close(a: SplitComplex, b: SplitComplex, scale: f64) -> bool {
    (a - b).magnitude() <= 1e-12 * scale.max(1.0)
}

fn number() -> impl Strategy<Value = SplitComplex> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(a, b)| d(a, b))
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

/// α away from the null cone |α|² = 1 where the map degenerates.
fn alpha() -> impl Strategy<Value = SplitComplex> {
    (-0.7..0.7f64, -0.7..0.7f64)
        .prop_map(|(a, b)| d(a, b))
        .prop_filter("|α|² near 1", |a| (1.0 - a.norm_sqr()).abs() > 0.2)
}

fn fractional() -> impl Strategy<Value = MoebiusParams> {
    (-1.0..1.0f64, alpha(), sign()).prop_map(|(phi, a, s)| MoebiusParams::fractional(phi, a, s).unwrap())
}

fn gauge() -> impl Strategy<Value = CanonicalGauge> {
    (prop_oneof![Just(1i8), Just(-1i8)], -2.0..2.0f64, -2.0..2.0f64).prop_map(|(e, a, b)| CanonicalGauge::new(e, a, b))
}

fn grid() -> Grid {
    Grid::new(Rect::new(-0.3, 0.3, -0.3, 0.3).unwrap(), 5, 5).unwrap()
}

const PROBES: [(f64, f64); 4] = [(0.1, 0.05), (-0.2, 0.1), (0.25, -0.2), (0.0, 0.0)];

proptest! {
    #[test]
    fn ring_axioms(a in number(), b in number(), c in number()) {
        let s = a.magnitude() * b.magnitude() * c.magnitude();
        prop_assert!(close((a * b) * c, a * (b * c), s));
        prop_assert!(close(a * (b + c), a * b + a * c, a.magnitude() * (b.magnitude() + c.magnitude())));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(a * SplitComplex::ONE, a);
    }

    #[test]
    fn null_coordinates_multiply_componentwise(a in number(), b in number()) {
        let (ap, aq) = a.to_null();
        let (bp, bq) = b.to_null();
        let (p, q) = (a * b).to_null();
        let s = a.magnitude() * b.magnitude();
        prop_assert!((p - ap * bp).abs() <= 1e-12 * s.max(1.0));
        prop_assert!((q - aq * bq).abs() <= 1e-12 * s.max(1.0));
        prop_assert!(close(SplitComplex::from_null(ap, aq), a, a.magnitude()));
    }

    #[test]
    fn norm_is_multiplicative(a in number(), b in number()) {
        let s = (a.magnitude() * b.magnitude()).powi(2);
        prop_assert!(((a * b).norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() <= 1e-12 * s.max(1.0));
    }

    #[test]
    fn division_by_null_numbers_is_typed(x in -10.0..10.0f64, minus in any::<bool>(), a in number()) {
        let z = d(x, if minus { -x } else { x });
        prop_assert!(matches!(a.checked_div(z), Err(AlgebraError::ZeroDivisor(_))));
    }

    #[test]
    fn division_inverts_multiplication(a in number(), b in number()) {
        prop_assume!(b.norm_sqr().abs() > 1e-3 * b.magnitude().powi(2));
        let q = a.checked_div(b).unwrap();
        prop_assert!(close(q * b, a, a.magnitude() * 1e3));
    }

    #[test]
    fn witness_is_a_motion(m in fractional()) {
        let w = motion_witness(&m).unwrap();
        let l = w.linear();
        prop_assert!(lorentz_defect(&w.a) < 1e-12);
        prop_assert!(lorentz_defect(&l) < 1e-10);
        let eta = minkowski_metric();
        let x = Vector3::new(0.3, -1.2, 0.7);
        let y = Vector3::new(-0.4, 0.5, 2.0);
        let before = (x.transpose() * eta * y)[0];
        let (lx, ly) = (l * x, l * y);
        let after = minkowski_inner([lx[0], lx[1], lx[2]], [ly[0], ly[1], ly[2]]);
        prop_assert!((before - after).abs() < 1e-10, "{before} vs {after}");
    }

    #[test]
    fn witness_maps_curve_derivatives(m in fractional(), c in -0.5..0.5f64) {
        let g = HoloExpr::var().add(&HoloExpr::var().powi(2).scale(SplitComplex::real(c)));
        let (err, count) = witness_discrepancy(&g, &m, &grid()).unwrap();
        prop_assert!(count > 0);
        prop_assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn curvature_is_invariant(m in fractional()) {
        let g = h("z + 0.2*z^2");
        let (before, after) = (GeneratingData::canonical(g.clone()), GeneratingData::canonical(moebius_transform(&g, &m).unwrap()));
        for (u, v) in PROBES {
            let z = d(u, v);
            let (k0, k1) = (before.gauss_curvature(z).unwrap(), after.gauss_curvature(z).unwrap());
            prop_assert!((k0 - k1).abs() <= 1e-9 * k0.abs().max(1.0), "{k0} vs {k1}");
        }
    }

    #[test]
    fn fractional_maps_compose(outer in fractional(), inner in fractional()) {
        let g = h("z");
        let Ok(both) = outer.compose(&inner) else { return Ok(()) };
        let direct = moebius_transform(&g, &both).unwrap();
        let two_step = moebius_transform(&moebius_transform(&g, &inner).unwrap(), &outer).unwrap();
        for (u, v) in PROBES {
            let z = d(u, v);
            if let (Ok(a), Ok(b)) = (direct.eval(z), two_step.eval(z)) {
                prop_assert!(close(a, b, 1e3 * a.magnitude().max(b.magnitude())), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn gauges_form_a_group(a in gauge(), b in gauge(), u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let (x, y) = a.compose(&b).map(u, v);
        let (bx, by) = b.map(u, v);
        let (ex, ey) = a.map(bx, by);
        // apply(a, apply(b, X)) at p̄ reads X at b(a(p̄))
        let (sx, sy) = a.map(u, v);
        let (rx, ry) = b.map(sx, sy);
        prop_assert!((x - rx).abs() < 1e-12 && (y - ry).abs() < 1e-12, "({x},{y}) vs ({rx},{ry}) / ({ex},{ey})");
        let (ix, iy) = a.inverse().map(sx, sy);
        prop_assert!((ix - u).abs() < 1e-12 && (iy - v).abs() < 1e-12);
    }

    #[test]
    fn gauged_fields_read_the_source(g in gauge()) {
        let source = Grid::new(Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 9, 9).unwrap();
        let field = SampledField::sample(source, &|u: f64, v: f64| Some(u * u * u - 2.0 * v + u * v));
        let moved = field.apply_gauge(&g);
        for (i, k, value) in moved.defined() {
            let p = moved.grid.node(i, k);
            let (u, v) = g.map(p.re, p.im);
            let expected = u * u * u - 2.0 * v + u * v;
            prop_assert!((value - expected).abs() < 1e-9, "{value} vs {expected}");
        }
    }

    #[test]
    fn classification_ignores_position_and_scale(m in fractional(), scale in 0.5..3.0f64, t in prop::array::uniform3(-2.0..2.0f64)) {
        let linear = motion_witness(&m).unwrap().linear();
        let v = classify_cubic(&CubicParametrization::enneper().transformed(&linear, t, scale));
        prop_assert_eq!(v.verdict, Verdict::EnneperNegative, "{:?}", v.notes);
        let found = v.scale.unwrap();
        prop_assert!((found - scale).abs() < 1e-8 * scale, "{found} vs {scale}");
    }
}
