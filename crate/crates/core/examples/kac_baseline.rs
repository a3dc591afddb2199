//! Classical Kac polynomials: (2/π) log n plus a constant.

use std::f64::consts::PI;

use wrz::kacrice::kac_classical;

fn main() -> wrz::Result<()> {
    for n in [10, 1_000, 100_000, 10_000_000] {
        let e = kac_classical(n)?.value;
        println!("n={n:<9} E N = {e:.6}  minus (2/pi) ln n = {:.6}", e - 2.0 / PI * (n as f64).ln());
    }
    Ok(())
}
