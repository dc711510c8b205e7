//! Serializing results in the versioned report schema.

use freelab::equilibrium::{solve_equilibrium, SolverConfig};
use freelab::inequalities::{verify, InequalityInputs, InequalityKind};
use freelab::measures::make_arcsine;
use freelab::potentials::{absolute, quartic};
use freelab::report::{to_json_string, EquilibriumJson, InequalityJson};

fn main() -> freelab::Result<()> {
    let r = verify(InequalityKind::FreeTalagrand, &InequalityInputs::new().with_mu("arcsine", make_arcsine(1.0)?), 1e-3)?;
    print!("{}", to_json_string(&InequalityJson::new(&r, 0, false))?);

    // An infinite side becomes a sentinel string and the report fails.
    let r = verify(InequalityKind::InverseFreeLsi, &InequalityInputs::new().with_f(absolute()?), 1e-3)?;
    print!("{}", to_json_string(&InequalityJson::new(&r, 0, false))?);

    let eq = solve_equilibrium(&quartic(0.25)?, &SolverConfig { nodes: 256, ..SolverConfig::default() })?;
    let text = to_json_string(&EquilibriumJson::new(&eq, 0))?;
    println!("equilibrium report: {} bytes, first lines:", text.len());
    for line in text.lines().take(8) {
        println!("  {line}");
    }
    Ok(())
}
