use std::f64::consts::PI;

use freelab::equilibrium::{free_pressure, solve_equilibrium, SolverConfig};
use freelab::measures::{ks_distance, make_semicircular};
use freelab::potentials::{absolute, hard_wall, polynomial, quadratic, quartic, Potential};
use proptest::prelude::*;

fn perturbed_quadratic(amp: f64, freq: f64) -> Potential {
    Potential::with_second(
        format!("quadratic+{amp}sin({freq}x)"),
        (f64::NEG_INFINITY, f64::INFINITY),
        move |x| 0.5 * x * x + amp * (freq * x).sin(),
        move |x| x + amp * freq * (freq * x).cos(),
        move |x| 1.0 - amp * freq * freq * (freq * x).sin(),
    )
    .unwrap()
}

#[test]
fn quadratic_pressure_closed_form() {
    for c in [0.25, 1.0, 4.0] {
        let eq = solve_equilibrium(&quadratic(c).unwrap(), &SolverConfig::default()).unwrap();
        assert!((eq.pressure - 0.5 * (2.0 * PI).ln() + 0.5 * f64::ln(c)).abs() < 1e-6);
        assert!(ks_distance(&eq.measure, &make_semicircular(0.0, 1.0 / c).unwrap()) < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pressure_is_one_lipschitz(amp in 0.01f64..0.4, freq in 0.3f64..1.5) {
        prop_assume!(amp * freq * freq < 0.9);
        let base = free_pressure(&quadratic(1.0).unwrap()).unwrap();
        let moved = free_pressure(&perturbed_quadratic(amp, freq)).unwrap();
        prop_assert!((moved - base).abs() <= amp + 1e-9, "|{moved} - {base}| > {amp}");
    }

    #[test]
    fn pressure_is_convex(c in 0.3f64..3.0, g in 0.01f64..0.5) {
        let (u, w) = (quadratic(c).unwrap(), quartic(g).unwrap());
        let (pu, pw) = (free_pressure(&u).unwrap(), free_pressure(&w).unwrap());
        for th in [0.25, 0.5, 0.75] {
            let mix = Potential::combine(th, &u, 1.0 - th, &w).unwrap();
            prop_assert!(free_pressure(&mix).unwrap() <= th * pu + (1.0 - th) * pw + 1e-9);
        }
    }

    #[test]
    fn adding_a_constant_shifts_pressure(c in 0.3f64..3.0, k in -2.0f64..2.0) {
        let u = quadratic(c).unwrap();
        let p = free_pressure(&u).unwrap();
        prop_assert!((free_pressure(&u.add_constant(k).unwrap()).unwrap() - (p - k)).abs() < 1e-8);
    }
}

fn variational_family() -> Vec<Potential> {
    vec![
        quadratic(1.0).unwrap(),
        quadratic(3.0).unwrap(),
        quartic(0.25).unwrap(),
        polynomial(&[0.0, 0.3, 0.5, 0.0, 0.1]).unwrap(),
        absolute().unwrap(),
        hard_wall(1.0).unwrap(),
    ]
}

#[test]
fn equilibrium_beats_probe_family() {
    let cfg = SolverConfig::default();
    for u in variational_family() {
        let eq = solve_equilibrium(&u, &cfg).unwrap();
        assert!(eq.variational_defect <= cfg.tolerance, "{}: defect {}", u.label(), eq.variational_defect);
    }
}

#[test]
fn even_potentials_give_symmetric_measures() {
    for u in [quadratic(2.0).unwrap(), quartic(0.5).unwrap(), absolute().unwrap(), polynomial(&[0.0, 0.0, 0.2, 0.0, 0.3]).unwrap()] {
        assert!(u.is_even());
        let eq = solve_equilibrium(&u, &SolverConfig::default()).unwrap();
        assert!((eq.support_lo + eq.support_hi).abs() < 1e-8);
        assert!(eq.measure.barycenter().abs() < 1e-8);
        let r = eq.support_hi;
        for k in 1..40 {
            let x = r * k as f64 / 40.0;
            let (a, b) = (eq.measure.density_at(x), eq.measure.density_at(-x));
            assert!((a - b).abs() < 1e-6 * a.max(1.0), "{}: {a} vs {b} at {x}", u.label());
        }
    }
}
