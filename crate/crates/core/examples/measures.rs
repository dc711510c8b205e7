//! Building measures on the line and reading them back through their CDF,
//! quantiles and moments.
//!
//! ```text
//! cargo run --release --example measures
//! ```

use freelab::measures::{
    make_arcsine, make_marchenko_pastur_family, make_semicircular, mixture, pushforward_monotone, AtomicMeasure,
};

fn main() -> freelab::Result<()> {
    let sigma = make_semicircular(0.0, 1.0)?;
    let arc = make_arcsine(2.0)?;
    let mp = make_marchenko_pastur_family(1.0)?;

    println!("{:<14} {:>10} {:>10} {:>10} {:>10}", "measure", "lo", "hi", "mean", "var");
    for (name, m) in [("semicircle", &sigma), ("arcsine(2)", &arc), ("mp(1)", &mp)] {
        let (lo, hi) = m.support();
        println!("{name:<14} {lo:>10.4} {hi:>10.4} {:>10.6} {:>10.6}", m.barycenter(), m.variance());
    }

    println!("\nquantiles of the semicircle");
    for p in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let x = sigma.quantile(p);
        println!("  Q({p:.2}) = {x:+.8}   F(Q(p)) = {:.12}", sigma.cdf(x));
    }

    // Both components live on [-2, 2], so the mixed density stays smooth in the angle.
    let mix = mixture(&[(0.3, &sigma), (0.7, &arc)], 4096)?;
    println!("\n0.3 semicircle + 0.7 arcsine: mean {:+.2e}, m2 {:.10} (expected {:.10})", mix.barycenter(), mix.moment(2), 0.3 + 0.7 * 2.0);

    let pushed = pushforward_monotone(&sigma, |x| 3.0 * x + 1.0)?;
    println!("x -> 3x + 1 sends the semicircle to mean {:.8}, variance {:.8}", pushed.barycenter(), pushed.variance());

    let moved = sigma.translate(2.5);
    println!("translate by 2.5: support {:?}", moved.support());

    let atoms = AtomicMeasure::new(vec![(-1.0, 0.25), (0.5, 0.5), (2.0, 0.25)])?;
    println!("atomic measure: mean {}, second moment {}, Q(0.6) = {}", atoms.barycenter(), atoms.second_moment(), atoms.quantile(0.6));
    Ok(())
}
