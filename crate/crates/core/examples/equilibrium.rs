//! Equilibrium measure of a quartic potential, compared against a particle
//! minimizer and tabulated.
//!
//! ```text
//! cargo run --release --example equilibrium
//! ```

use freelab::equilibrium::particles::particle_edges;
use freelab::equilibrium::{free_pressure, solve_equilibrium, SolverConfig};
use freelab::potentials::{quartic, shift_potential};

fn main() -> freelab::Result<()> {
    let v = quartic(0.25)?;
    let eq = solve_equilibrium(&v, &SolverConfig::default())?;
    println!("potential      {}", eq.potential);
    println!("method         {}", eq.method);
    println!("support        [{:.10}, {:.10}]", eq.support_lo, eq.support_hi);
    println!("pressure       {:.12}", eq.pressure);
    println!("EL constant    {:.12}", eq.el_constant);
    println!("residuals      EL {:.1e}, potential {:.1e}, SD {:.1e}", eq.el_residual, eq.potential_residual, eq.sd_residual);
    println!("probe defect   {:.3e} (negative means the solution wins)", eq.variational_defect);

    let (lo, hi) = particle_edges(&v, 400)?;
    println!("particle edges [{lo:.6}, {hi:.6}]");

    println!("\n{:>8} {:>12}", "x", "density");
    for k in 0..=8 {
        let x = eq.support_lo + (eq.support_hi - eq.support_lo) * k as f64 / 8.0;
        println!("{x:>8.4} {:>12.8}", eq.measure.density_at(x));
    }

    for z in [-1.0, 0.5] {
        let p = free_pressure(&shift_potential(&v, z)?)?;
        println!("pressure after shifting by {z:+}: {p:.12}");
    }
    Ok(())
}
