use freelab::potentials::{legendre_transform, quadratic, quartic};
use freelab::rmt::{matrix_fenchel_young_check, micro_santalo_1d};

fn main() -> freelab::Result<()> {
    let q = quadratic(1.0)?;
    let f = quartic(0.25)?;
    let g = legendre_transform(&f)?;
    for n in [1, 4, 8] {
        let a = matrix_fenchel_young_check(&q, &q, n, 500, 1)?;
        let b = matrix_fenchel_young_check(&f, &g, n, 500, 2)?;
        println!("N = {n}: min trace slack  quadratic pair {a:.4e}   quartic pair {b:.4e}");
    }
    // The scalar Santaló inequality: zero slack exactly at Gaussians.
    println!("Santaló slack, quadratic with its conjugate: {:.2e}", micro_santalo_1d(&q, &legendre_transform(&q)?)?);
    println!("Santaló slack, quartic with its conjugate:   {:.6}", micro_santalo_1d(&f, &g)?);
    Ok(())
}
