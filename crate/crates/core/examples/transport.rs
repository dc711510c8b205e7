use freelab::measures::{make_arcsine, make_semicircular, AtomicMeasure};
use freelab::transport::{max_correlation, ssfti_functional, translation_identity_check, w2, w2_atomic, w2_atomic_oracle};

fn main() -> freelab::Result<()> {
    let a = make_semicircular(0.0, 4.0)?;
    let b = make_semicircular(0.0, 0.25)?;
    let d = w2(&a, &b);
    println!("W2(sigma_4, sigma_1/4) = {:.12}, squared {:.12} via {}", d.cost, d.squared(), d.coupling.as_str());
    println!("max correlation        = {:.12}", max_correlation(&a, &b));

    let arc = make_arcsine(1.0)?;
    let sigma = make_semicircular(0.0, 1.0)?;
    for shift in [-1.0, 0.5, 2.0] {
        println!("translation identity defect at a = {shift:+}: {:.2e}", translation_identity_check(&arc, &sigma, shift));
    }
    println!("SSFTI functional at (arcsine, semicircle): {:.10}", ssfti_functional(&arc, &sigma)?);

    let mu = AtomicMeasure::new(vec![(-1.0, 0.2), (0.0, 0.5), (3.0, 0.3)])?;
    let nu = AtomicMeasure::new(vec![(-2.0, 0.4), (1.0, 0.6)])?;
    let fast = w2_atomic(&mu, &nu);
    let exact = w2_atomic_oracle(&mu, &nu)?;
    println!("atomic pair: quantile formula {:.15}, transportation simplex {:.15}", fast.squared(), exact.squared());
    Ok(())
}
