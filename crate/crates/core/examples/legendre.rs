//! Convex potentials, their Legendre transforms and Moreau–Yosida envelopes.

use freelab::potentials::{absolute, hard_wall, legendre_transform, moreau_yosida, quartic, shift_potential};

fn main() -> freelab::Result<()> {
    let u = quartic(0.25)?;
    let us = legendre_transform(&u)?;
    let uss = legendre_transform(&us)?;
    println!("u = x^4/4, u* = (3/4)|y|^(4/3)");
    println!("{:>6} {:>14} {:>14} {:>14}", "y", "u*(y)", "closed form", "u**(y) - u(y)");
    for y in [-2.0f64, -0.5, 0.0, 1.0, 3.0] {
        println!("{y:>6.2} {:>14.10} {:>14.10} {:>14.2e}", us.value(y), 0.75 * y.abs().powf(4.0 / 3.0), uss.value(y) - u.value(y));
    }

    // Fenchel–Young is an equality along the graph of u'.
    let x = 1.3;
    let y = u.derivative(x);
    println!("\nu(x) + u*(u'(x)) - x u'(x) at x = {x}: {:.2e}", u.value(x) + us.value(y) - x * y);

    let wall = hard_wall(1.0)?;
    println!("wall(1)* at y = -2, 0.5: {}, {}", legendre_transform(&wall)?.value(-2.0), legendre_transform(&wall)?.value(0.5));

    let shifted = shift_potential(&u, 0.5)?;
    println!("{} has its minimum at {:.6}", shifted.label(), shifted.argmin());

    let abs = absolute()?;
    for lam in [1e-3, 1e-2, 1e-1] {
        let env = moreau_yosida(&abs, lam)?;
        println!("my(|x|, {lam}): value at 0.005 = {:.6e}, at 1 = {:.6}", env.value(0.005), env.value(1.0));
    }
    Ok(())
}
