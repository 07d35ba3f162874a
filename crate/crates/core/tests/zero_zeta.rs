use zzsim::coupler::{default_operating_point, default_search_interval, find_zero_zeta, RootOptions, ZetaEvaluator, ZetaMethod};
use zzsim::geometry::{Geometry, GeometryCurve};
use zzsim::units::to_ghz;
use zzsim::DeviceParams;

fn roots(params: &DeviceParams, method: ZetaMethod) -> Vec<f64> {
    let eval = ZetaEvaluator::new(params.clone(), method);
    let search = find_zero_zeta(&eval, default_search_interval(params), &RootOptions::default()).unwrap();
    for r in &search.roots {
        assert!(r.zeta.abs() / std::f64::consts::TAU < 100.0);
        assert!(r.bracket.0 <= r.omega_minus && r.omega_minus <= r.bracket.1);
    }
    search.roots.iter().map(|r| to_ghz(r.detuning)).collect()
}

#[test]
fn device_a_exact_roots() {
    let r = roots(&DeviceParams::device_a(), ZetaMethod::Exact);
    assert_eq!(r.len(), 2);
    assert!((r[0] + 1.47).abs() < 0.06 && (r[1] + 0.75).abs() < 0.06, "{r:?}");
}

#[test]
fn device_b_exact_roots() {
    let r = roots(&DeviceParams::device_b(), ZetaMethod::Exact);
    assert_eq!(r.len(), 2);
    assert!((r[0] + 0.84).abs() < 0.06 && (r[1] + 0.53).abs() < 0.06, "{r:?}");
}

#[test]
fn exact_and_perturbative_roots_agree_on_devices() {
    for params in [DeviceParams::device_a(), DeviceParams::device_b()] {
        let exact = roots(&params, ZetaMethod::Exact);
        let pert = roots(&params, ZetaMethod::Perturbative);
        assert_eq!(exact.len(), pert.len());
        for (e, p) in exact.iter().zip(&pert) {
            assert!((e - p).abs() < 0.05 * e.abs(), "{} exact {e} pert {p}", params.name);
        }
    }
}

#[test]
fn operating_points() {
    let a = default_operating_point(&DeviceParams::device_a()).unwrap();
    let b = default_operating_point(&DeviceParams::device_b()).unwrap();
    assert!((to_ghz(a.detuning) + 1.475).abs() < 0.01);
    assert!((to_ghz(b.detuning) + 0.85).abs() < 0.01);
    assert!(a.phi.is_some() && b.phi.is_some());
}

fn geometry_roots(g: Geometry, method: ZetaMethod) -> Vec<f64> {
    let curve = GeometryCurve::new(g, method, [4, 4, 3, 4]).unwrap();
    curve.roots(&RootOptions::default()).unwrap().roots.iter().map(|r| to_ghz(r.x)).collect()
}

#[test]
fn geometry_roots_frozen() {
    // Values from an independent numpy implementation of both methods.
    let expected: [(Geometry, &[f64], &[f64]); 4] = [
        (Geometry::FarApart, &[0.8301], &[0.8221]),
        (Geometry::StraddlingBothCouplers, &[1.1605, 1.7266], &[1.1609, 1.7429]),
        (Geometry::StraddlingCouplerAbove, &[0.6340], &[0.7294]),
        (Geometry::OutsideStraddling, &[], &[]),
    ];
    for (g, exact, pert) in expected {
        let e = geometry_roots(g, ZetaMethod::Exact);
        let p = geometry_roots(g, ZetaMethod::Perturbative);
        assert_eq!(e.len(), exact.len(), "{} exact {e:?}", g.id());
        assert_eq!(p.len(), pert.len(), "{} pert {p:?}", g.id());
        for (got, want) in e.iter().zip(exact).chain(p.iter().zip(pert)) {
            assert!((got - want).abs() < 1e-3, "{}: {got} vs {want}", g.id());
        }
    }
}
