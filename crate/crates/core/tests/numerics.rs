use l1lab_core::numerics::*;
use l1lab_core::Error;
use proptest::prelude::*;

// Maclaurin series, an evaluation path independent of the rational fits.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1.0;
        term *= -x * x / n;
        sum += term / (2.0 * n + 1.0);
    }
    sum * std::f64::consts::FRAC_2_SQRT_PI
}

#[test]
fn erf_at_origin_and_saturation() {
    assert_eq!(erf(0.0), 0.0);
    assert!((erf(10.0) - 1.0).abs() <= 1e-15);
}

#[test]
fn erf_half_matches_series() {
    assert!((erf(0.5) - erf_series(0.5)).abs() <= 1e-13);
    for x in [0.1, 0.9, 1.1, 1.3, 1.6] {
        assert!((erf(x) - erf_series(x)).abs() <= 1e-14, "x = {x}");
    }
}

#[test]
fn erfinv_examples() {
    assert_eq!(erfinv(0.0).unwrap(), 0.0);
    assert!((erfinv(erf(1.5)).unwrap() - 1.5).abs() <= 1e-12);
    let x = erfinv(0.999999).unwrap();
    assert!(x.is_finite());
    assert!((erf(x) - 0.999999).abs() <= 1e-10);
    assert!(matches!(erfinv(1.0), Err(Error::Domain(_))));
    assert!(matches!(erfinv(-1.0), Err(Error::Domain(_))));
}

#[test]
fn find_root_examples() {
    let r = find_root(|x| x - 2.0, Bracket::new(0.0, 5.0).unwrap(), 1e-12).unwrap();
    assert!((r - 2.0).abs() < 1e-12);
    let r = find_root(|x| erf(x) - 0.5, Bracket::new(0.0, 2.0).unwrap(), 1e-14).unwrap();
    assert!((r - erfinv(0.5).unwrap()).abs() < 1e-12);
    let e = find_root(|x| x * x + 1.0, Bracket::new(-1.0, 1.0).unwrap(), 1e-12);
    assert!(matches!(e, Err(Error::NoSignChange { .. })));
}

#[test]
fn minimize_examples() {
    let cfg = MinimizeConfig::default();
    let m = minimize_local(
        |x| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2),
        &[0.0, 0.0],
        &[(-10.0, 10.0), (-10.0, 10.0)],
        &cfg,
    )
    .unwrap();
    assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 2.0).abs() < 1e-6);

    let m = minimize_local(|x| (x[0] - 1.0).powi(2), &[5.0], &[(3.0, 10.0)], &cfg).unwrap();
    assert_eq!(m.x[0], 3.0);
}

#[test]
fn gauss_expectation_examples() {
    let spec = QuadratureSpec::default();
    assert!((gauss_expectation(|_| 1.0, &spec).unwrap() - 1.0).abs() <= 1e-12);
    assert!((gauss_expectation(|h| h * h, &spec).unwrap() - 1.0).abs() <= 1e-10);
    let v = gauss_expectation(|h| (0.3 * h * h).exp(), &QuadratureSpec { half_width: 30.0, ..spec }).unwrap();
    assert!((v - 1.0 / 0.4f64.sqrt()).abs() <= 1e-8, "{v}");
}

#[test]
fn polynomial_moments() {
    // E h^{2j} = (2j-1)!!
    let spec = QuadratureSpec::default();
    let exact = [1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0];
    for (d, &m) in exact.iter().enumerate() {
        let v = gauss_expectation(|h| h.powi(d as i32), &spec).unwrap();
        assert!((v - m).abs() <= 1e-9 * m.max(1.0), "degree {d}: {v}");
    }
}

proptest! {
    #[test]
    fn erf_erfc_complement(x in -8.0f64..8.0) {
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn erf_is_odd(x in -30.0f64..30.0) {
        prop_assert_eq!(erf(-x), -erf(x));
    }

    #[test]
    fn erfinv_inverts_erf(x in -5.0f64..5.0) {
        let p = erf(x);
        prop_assume!(p.abs() < 1.0);
        let y = erfinv(p).unwrap();
        // |x| up to 5 puts erf within a few ulps of 1, so compare through erf too
        prop_assert!((y - x).abs() <= 1e-12 || (erf(y) - p).abs() <= 1e-15, "x={} y={}", x, y);
    }

    #[test]
    fn erfinv_is_odd(p in -0.999f64..0.999) {
        prop_assert_eq!(erfinv(-p).unwrap(), -erfinv(p).unwrap());
    }

    #[test]
    fn root_stays_in_bracket(c in -3.0f64..3.0, lo in -5.0f64..-3.5, hi in 3.5f64..5.0) {
        let r = find_root(|x| (x - c).powi(3), Bracket::new(lo, hi).unwrap(), 1e-10).unwrap();
        prop_assert!(r >= lo && r <= hi);
        prop_assert!((r - c).abs() < 1e-3);
    }

    #[test]
    fn minimizer_never_worse_than_start(a in -3.0f64..3.0, b in -3.0f64..3.0, x0 in -4.0f64..4.0, y0 in -4.0f64..4.0) {
        let f = |x: &[f64]| (x[0] - a).powi(2) + 3.0 * (x[1] - b).powi(4) + (x[0] * x[1]).sin();
        let m = minimize_local(f, &[x0, y0], &[(-5.0, 5.0), (-5.0, 5.0)], &MinimizeConfig::default()).unwrap();
        prop_assert!(m.f <= f(&[x0, y0]));
        prop_assert!(m.x.iter().all(|v| (-5.0..=5.0).contains(v)));
    }
}

#[test]
fn ln_erfc_tracks_erfc() {
    for x in [-2.0, 0.0, 1.0, 1.3, 3.0, 10.0, 26.0] {
        let a = ln_erfc(x);
        let b = erfc(x).ln();
        assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "x = {x}");
    }
    assert!(ln_erfc(100.0).is_finite());
    assert!((ln_erfc(100.0) - (-10000.0 - (100.0 * std::f64::consts::PI.sqrt()).ln())).abs() < 1e-4);
}
