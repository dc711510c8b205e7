use freelab::potentials::{absolute, hard_wall, legendre_transform, moreau_yosida, polynomial, quadratic, quartic, Potential};
use proptest::prelude::*;

fn smooth_convex(a: f64, g: f64) -> Potential {
    polynomial(&[0.0, 0.0, 0.5 * a, 0.0, g]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn double_legendre_is_identity(a in 0.2f64..4.0, g in 0.0f64..0.5, x in -2.0f64..2.0) {
        let u = smooth_convex(a, g);
        let uss = legendre_transform(&legendre_transform(&u).unwrap()).unwrap();
        prop_assert!((uss.value(x) - u.value(x)).abs() < 1e-6, "u**({x}) = {}, u = {}", uss.value(x), u.value(x));
    }

    #[test]
    fn fenchel_young_equality_at_gradient(a in 0.2f64..4.0, g in 0.0f64..0.5, x in -2.0f64..2.0) {
        let u = smooth_convex(a, g);
        let us = legendre_transform(&u).unwrap();
        let y = u.derivative(x);
        prop_assert!((us.value(y) - (x * y - u.value(x))).abs() < 1e-6);
        prop_assert!((us.derivative(y) - x).abs() < 1e-6);
    }

    #[test]
    fn fenchel_young_inequality(g in 0.01f64..1.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let u = quartic(g).unwrap();
        let us = legendre_transform(&u).unwrap();
        prop_assert!(u.value(x) + us.value(y) >= x * y - 1e-9);
    }
}

#[test]
fn quadratic_conjugates_in_closed_form() {
    for c in [0.25, 1.0, 4.0] {
        let us = legendre_transform(&quadratic(c).unwrap()).unwrap();
        for y in [-1.5, -0.2, 0.0, 0.7, 2.0] {
            assert!((us.value(y) - y * y / (2.0 * c)).abs() < 1e-9);
        }
    }
}

#[test]
fn conjugate_of_wall_is_abs() {
    let us = legendre_transform(&hard_wall(1.5).unwrap()).unwrap();
    for y in [-3.0, -1.0, 0.5, 2.0] {
        assert!((us.value(y) - 1.5 * f64::abs(y)).abs() < 1e-9);
    }
}

#[test]
fn moreau_yosida_is_convex_and_below() {
    let grid: Vec<f64> = (0..=400).map(|i| -2.0 + 4.0 * i as f64 / 400.0).collect();
    for u in [absolute().unwrap(), quartic(0.25).unwrap(), quadratic(2.0).unwrap(), smooth_convex(0.5, 0.1)] {
        for lam in [1e-3, 1e-2, 1e-1] {
            let m = moreau_yosida(&u, lam).unwrap();
            for &x in &grid {
                assert!(m.value(x) <= u.value(x) + 1e-12, "{} at {x}", m.label());
            }
            for w in grid.windows(3) {
                let second = m.value(w[0]) - 2.0 * m.value(w[1]) + m.value(w[2]);
                assert!(second >= -1e-12, "{} not convex at {}", m.label(), w[1]);
            }
            assert!(m.is_convex());
        }
    }
}

#[test]
fn moreau_yosida_of_abs_is_huber() {
    let lam = 0.1;
    let m = moreau_yosida(&absolute().unwrap(), lam).unwrap();
    for x in [-1.0, -0.05, 0.0, 0.03, 0.5] {
        let huber = if f64::abs(x) <= lam { x * x / (2.0 * lam) } else { f64::abs(x) - lam / 2.0 };
        assert!((m.value(x) - huber).abs() < 1e-10);
    }
}
