//! Every inequality kind evaluated once through the common dispatcher.
//!
//! A report carries both sides, the deficit (positive when the inequality
//! holds with room to spare) and a pass flag at the given tolerance.

use freelab::inequalities::{verify, InequalityInputs, InequalityKind};
use freelab::measures::{make_arcsine, make_semicircular};
use freelab::potentials::{hard_wall, legendre_transform, linear_on_half_line, polynomial, quadratic, quartic};

fn main() -> freelab::Result<()> {
    let q = quartic(0.25)?;
    let poly = polynomial(&[0.0, 0.0, 0.5, 0.0, 0.1])?;
    let cases = vec![
        (InequalityKind::FreeTalagrand, InequalityInputs::new().with_mu("arcsine:radius=1", make_arcsine(1.0)?)),
        (
            InequalityKind::Ssfti,
            InequalityInputs::new()
                .with_mu("semicircle:var=4", make_semicircular(0.0, 4.0)?)
                .with_nu("semicircle:var=0.25", make_semicircular(0.0, 0.25)?),
        ),
        (
            InequalityKind::SsftiGeneral,
            InequalityInputs::new()
                .with_mu("semicircle:mean=1", make_semicircular(1.0, 1.0)?)
                .with_nu("arcsine:radius=1", make_arcsine(1.0)?),
        ),
        (InequalityKind::InverseFreeLsi, InequalityInputs::new().with_f(q.clone())),
        (InequalityKind::FreeSantalo, InequalityInputs::new().with_f(q.clone()).with_g(legendre_transform(&q)?)),
        (InequalityKind::FreeSantaloShifted, {
            let f = polynomial(&[0.0, 0.4, 0.5, 0.0, 0.1])?;
            let g = legendre_transform(&f)?;
            InequalityInputs::new().with_f(f).with_g(g)
        }),
        (InequalityKind::InverseSantalo, InequalityInputs::new().with_f(hard_wall(1.0)?)),
        (
            InequalityKind::FreeBrunnMinkowski,
            InequalityInputs::new().with_f(quadratic(1.0)?).with_g(quadratic(4.0)?).with_h(quadratic(1.5)?).with_theta(0.5),
        ),
        (
            InequalityKind::FreeLogPrekopa,
            InequalityInputs::new().with_f(linear_on_half_line(2.0)?).with_g(linear_on_half_line(1.0)?),
        ),
        (InequalityKind::InverseSsfti, InequalityInputs::new().with_f(poly)),
    ];

    println!("{:<22} {:>14} {:>14} {:>12}  pass  inputs", "kind", "lhs", "rhs", "deficit");
    for (kind, inputs) in cases {
        let r = verify(kind, &inputs, 1e-3)?;
        println!("{:<22} {:>14.8} {:>14.8} {:>12.3e}  {:<5} {}", kind.name(), r.lhs, r.rhs, r.deficit, r.pass, inputs.descriptor());
    }
    Ok(())
}
