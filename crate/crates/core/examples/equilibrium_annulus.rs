//! Equilibrium support, bulk and Robin constant, plus the radial density
//! of the limiting zero distribution.

use wrz::equilibrium::{measure_mass, solve};
use wrz::weights::parse_weight_spec;

fn main() -> wrz::Result<()> {
    let w = parse_weight_spec("circular:alpha=1,beta=2")?;
    let eq = solve(&w)?;
    let s = eq.summary()?;
    println!("r0 = {:.6}, R0 = {:.6}, F = {:.6}", s.r0, s.big_r0, s.robin_constant);
    println!("limit of E N / sqrt(n): {:.6}", s.limit_integral);
    for r in [0.5, 0.75, 0.9, 1.2] {
        println!("r = {r:<4}  U(r) = {:+.5}  density = {:.5}", eq.potential(r), eq.measure_radial_density(r));
    }
    println!("mass of 0.8 <= |z| <= 0.9: {:.5}", measure_mass(&eq, 0.8, 0.9)?);
    Ok(())
}
