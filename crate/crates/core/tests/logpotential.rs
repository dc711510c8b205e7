use std::f64::consts::{E, PI};

use freelab::logpotential::{chi, chi_plus, log_energy, log_jacobian, relative_entropy_semicircular};
use freelab::measures::{
    make_arcsine, make_marchenko_pastur_family, make_quarter_circle, make_semicircular, pushforward_monotone_with,
    GridMeasure,
};
use freelab::potentials::polynomial;
use proptest::prelude::*;

#[test]
fn energy_scales_by_log() {
    for mu in [make_semicircular(0.3, 1.7).unwrap(), make_arcsine(0.8).unwrap(), make_marchenko_pastur_family(1.0).unwrap()] {
        let base = log_energy(&mu).unwrap();
        for a in [0.5, 2.0, 4.0] {
            let scaled = log_energy(&mu.dilate(a).unwrap()).unwrap();
            let tol = 2.0 * (base.quadrature_error_estimate + scaled.quadrature_error_estimate) + 1e-12;
            let gap = (scaled.value - base.value - f64::ln(a)).abs();
            assert!(gap <= tol, "a = {a}: gap {gap:.3e} > {tol:.3e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn chi_is_translation_invariant(var in 0.2f64..4.0, a in -5.0f64..5.0) {
        let mu = make_semicircular(0.0, var).unwrap();
        prop_assert!((chi(&mu.translate(a)).unwrap() - chi(&mu).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn change_of_variables(a in 0.3f64..3.0, g in 0.0f64..0.3, var in 0.3f64..2.0) {
        let u = polynomial(&[0.0, 0.0, 0.5 * a, 0.0, g]).unwrap();
        let rho = make_semicircular(0.0, var).unwrap();
        let pushed = pushforward_monotone_with(&rho, |x| u.derivative(x), |x| u.second_derivative(x)).unwrap();
        let lhs = chi(&pushed).unwrap();
        let rhs = chi(&rho).unwrap() + log_jacobian(&rho, &u);
        prop_assert!((lhs - rhs).abs() < 5e-4, "lhs {lhs}, rhs {rhs}");
    }
}

#[test]
fn relative_entropy_is_nonnegative() {
    let mut family: Vec<(String, GridMeasure)> = Vec::new();
    for (m, v) in [(0.0, 0.25), (0.0, 2.0), (1.0, 1.0), (-0.5, 0.7), (0.2, 1.3)] {
        family.push((format!("semicircle({m},{v})"), make_semicircular(m, v).unwrap()));
    }
    for r in [0.5, 1.0, 2.0, 3.0] {
        family.push((format!("arcsine({r})"), make_arcsine(r).unwrap()));
    }
    for c in [0.5, 1.0, 2.0] {
        let mp = make_marchenko_pastur_family(c).unwrap();
        family.push((format!("mp({c}) centred"), mp.translate(-c)));
    }
    let at_sigma = relative_entropy_semicircular(&make_semicircular(0.0, 1.0).unwrap()).unwrap();
    assert!(at_sigma.abs() < 1e-6);
    for (name, mu) in &family {
        let h = relative_entropy_semicircular(mu).unwrap();
        assert!(h > 1e-4, "H({name}, sigma) = {h}");
    }
}

#[test]
fn chi_plus_is_maximized_by_marchenko_pastur() {
    let best = chi_plus(&make_marchenko_pastur_family(1.0).unwrap()).unwrap();
    assert!((best - (PI * E).ln()).abs() < 1e-5);
    let mut family: Vec<GridMeasure> = Vec::new();
    for c in [0.2, 0.4, 0.6, 0.8, 0.9, 0.95] {
        family.push(make_marchenko_pastur_family(c).unwrap());
    }
    for r in [0.25, 0.5, 0.75, 1.0] {
        family.push(make_arcsine(r).unwrap().translate(r));
    }
    for s in [0.25, 0.4, 0.5] {
        // Radius 2s, so the support starts at the origin.
        family.push(make_semicircular(2.0 * s, s * s).unwrap());
    }
    family.push(make_quarter_circle().unwrap());
    for a in [0.5, 0.75, 1.0] {
        family.push(make_quarter_circle().unwrap().dilate(a).unwrap());
    }
    for w in [1.0, 1.5, 2.0] {
        family.push(GridMeasure::from_density(0.0, w, 4096, |_| 1.0 / w).unwrap());
    }
    assert_eq!(family.len(), 20);
    for mu in &family {
        assert!(mu.support_lo() >= -1e-12 && mu.barycenter() <= 1.0 + 1e-9);
        let v = chi_plus(mu).unwrap();
        assert!(v <= best + 1e-6, "chi_plus = {v} exceeds {best} on support {:?}", mu.support());
    }
}
