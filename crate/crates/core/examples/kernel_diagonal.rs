//! Kernel diagonal in log form and the scaled density ratio inside the bulk.

use wrz::kernel::{kernel_diagonal, scaled_density_ratio};
use wrz::orthonorm::basis_scale;
use wrz::weights::parse_weight_spec;

fn main() -> wrz::Result<()> {
    let w = parse_weight_spec("circular:alpha=1,beta=2")?;
    for n in [100, 500, 2000] {
        let bs = basis_scale(&w, n)?;
        let k = kernel_diagonal(&bs, 0.8);
        println!(
            "n={n:<5} log K = {:.4}  log V = {:.4}  ratio at 0.8 = {:.6} (sqrt 2 = {:.6})",
            k.log_k,
            k.log_v,
            scaled_density_ratio(&bs, 0.8),
            2f64.sqrt()
        );
    }
    Ok(())
}
