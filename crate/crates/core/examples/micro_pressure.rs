//! Finite-N pressure: exact for small N, thermodynamic integration above.

use freelab::equilibrium::{solve_equilibrium, SolverConfig};
use freelab::potentials::quartic;
use freelab::rmt::{gue_entropy_identity, micro_pressure_estimate};

fn main() -> freelab::Result<()> {
    let v = quartic(0.25)?;
    let eq = solve_equilibrium(&v, &SolverConfig::default())?;
    println!("free pressure of {}: {:.10}", v.label(), eq.pressure);
    println!("{:>4} {:>14} {:>10} {:>8}  method", "N", "estimate", "std err", "flag");
    for n in [1, 2, 4, 6, 8, 16, 32] {
        let p = micro_pressure_estimate(&v, 4.0, n, 7, eq.support_hi)?;
        let flag = if p.low_confidence { "low" } else { "" };
        println!("{n:>4} {:>14.8} {:>10.2e} {flag:>8}  {:?}", p.value, p.std_error, p.method);
    }
    println!("\nGUE entropy identity defect at N = 1, 10, 100: {:.1e} {:.1e} {:.1e}",
        gue_entropy_identity(1)?, gue_entropy_identity(10)?, gue_entropy_identity(100)?);
    Ok(())
}
