//! Recovering a convex potential from a centered target measure.

use freelab::equilibrium::{moment_map, MomentMapConfig};
use freelab::measures::{make_arcsine, make_semicircular};

fn main() -> freelab::Result<()> {
    for (name, target) in [("semicircle var 2", make_semicircular(0.0, 2.0)?), ("arcsine radius 1.5", make_arcsine(1.5)?)] {
        let map = moment_map(&target, &MomentMapConfig::default())?;
        let eq = &map.equilibrium;
        println!("{name}");
        println!("  iterations        {}", map.iterations);
        println!("  pushforward KS    {:.2e}", map.pushforward_defect);
        println!("  nu_u support      [{:.6}, {:.6}]", eq.support_lo, eq.support_hi);
        let u = &map.potential;
        println!("  u' at -1, 0, 1    {:+.6} {:+.6} {:+.6}", u.derivative(-1.0), u.derivative(0.0), u.derivative(1.0));
    }
    Ok(())
}
