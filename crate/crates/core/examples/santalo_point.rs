//! Locating the linear tilt that centers an equilibrium measure, then
//! evaluating the shifted Santaló inequality.

use freelab::equilibrium::{find_centering_shift, SolverConfig};
use freelab::inequalities::{verify, InequalityInputs, InequalityKind};
use freelab::potentials::{legendre_transform, polynomial};

fn main() -> freelab::Result<()> {
    let f = polynomial(&[0.0, 0.4, 0.5, 0.0, 0.1])?;
    let shift = find_centering_shift(&f, (-3.0, 3.0), &SolverConfig::default())?;
    println!("barycenter of nu_(f + lambda x) along the search:");
    for (lambda, b) in shift.curve.iter().step_by(3) {
        println!("  lambda {lambda:+.6}  barycenter {b:+.3e}");
    }
    println!("monotone: {}, centering lambda: {:?}", shift.monotone, shift.lambda);

    let g = legendre_transform(&f)?;
    let r = verify(InequalityKind::FreeSantaloShifted, &InequalityInputs::new().with_f(f).with_g(g), 1e-3)?;
    println!("shifted Santaló: eta + eta = {:.10} <= log 2 pi = {:.10}, deficit {:.3e}", r.lhs, r.rhs, r.deficit);
    Ok(())
}
