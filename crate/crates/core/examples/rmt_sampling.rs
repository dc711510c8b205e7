//! Metropolis sampling of β = 2 eigenvalues and comparison with the
//! equilibrium measure of the same potential.
//!
//! ```text
//! cargo run --release --example rmt_sampling
//! ```

use freelab::equilibrium::{solve_equilibrium, SolverConfig};
use freelab::potentials::quartic;
use freelab::rmt::{empirical_vs_equilibrium, sample_eigenvalues_with, SamplerConfig};

fn main() -> freelab::Result<()> {
    let v = quartic(0.25)?;
    let eq = solve_equilibrium(&v, &SolverConfig::default())?;
    let cfg = SamplerConfig { chains: 4, burn_in: 500, sweeps: 500, radius: None };
    let mut samples = Vec::new();
    for n in [8, 16, 32, 64] {
        let s = sample_eigenvalues_with(&v, n, &cfg, 2024)?;
        let k = s.eigenvalue_sets.len() as f64;
        let top = s.eigenvalue_sets.iter().map(|x| x[x.len() - 1]).sum::<f64>() / k;
        println!("N = {n:>3}: acceptance {:.3}, mean largest eigenvalue {top:.4} (edge {:.4})", s.acceptance_rate, eq.support_hi);
        samples.push(s);
    }
    let cmp = empirical_vs_equilibrium(&samples, &eq, &v)?;
    println!("\n{:>4} {:>10} {:>14}", "N", "KS", "J_V surrogate");
    for ((n, ks), rate) in cmp.ks.n_values.iter().zip(&cmp.ks.statistic).zip(&cmp.rate_surrogate.statistic) {
        println!("{n:>4} {ks:>10.5} {rate:>14.5}");
    }
    Ok(())
}
