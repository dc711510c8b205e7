use std::f64::consts::{E, PI};

use freelab::logpotential::{chi, chi_plus, hilbert_transform, log_energy, relative_entropy_semicircular};
use freelab::measures::{make_arcsine, make_marchenko_pastur_family, make_semicircular};

fn main() -> freelab::Result<()> {
    let sigma = make_semicircular(0.0, 1.0)?;
    println!("chi(semicircle)       = {:.12}  (1/2 log 2 pi e = {:.12})", chi(&sigma)?, 0.5 * (2.0 * PI * E).ln());

    let e = log_energy(&make_arcsine(1.0)?)?;
    println!("log energy(arcsine)   = {:.12}  (-log 2 = {:.12}), error estimate {:.1e}", e.value, -(2f64.ln()), e.quadrature_error_estimate);

    println!("chi_plus(mp(1))       = {:.12}  (log pi e = {:.12})", chi_plus(&make_marchenko_pastur_family(1.0)?)?, (PI * E).ln());

    println!("\nrelative entropy to the semicircle");
    for var in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let h = relative_entropy_semicircular(&make_semicircular(0.0, var)?)?;
        println!("  var {var:<5} H = {h:.10}  ((v - 1 - log v)/2 = {:.10})", 0.5 * (var - 1.0 - f64::ln(var)));
    }

    println!("\nHilbert transform of the semicircle, x/2 inside the support");
    for t in [-1.5, 0.0, 0.7] {
        println!("  H(sigma)({t}) = {:+.10}", hilbert_transform(&sigma, t)?);
    }
    Ok(())
}
