//! Parse weight specs, inspect φ and its radial slope, and check growth.

use wrz::weights::{check_growth, parse_weight_spec};

fn main() -> wrz::Result<()> {
    for spec in ["weyl", "circular:alpha=1,beta=2", "circular:alpha=0,beta=4"] {
        let w = parse_weight_spec(spec)?;
        let g = check_growth(&w, 50.0, 200)?;
        println!("{:<26} phi(1) = {:+.4}  r phi'(1) = {:.4}  laplacian(1) = {:.4}  growth ok = {}",
            w.name(), w.phi(1.0), w.radial_slope(1.0), w.laplacian(1.0), g.holds);
    }
    match parse_weight_spec("circular:alpha=2,beta=1") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
