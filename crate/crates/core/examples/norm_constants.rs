//! Orthonormal scaling constants c_j against the Weyl closed form, and
//! their exponential growth rate against the Robin constant.

use std::f64::consts::PI;

use wrz::equilibrium::solve;
use wrz::orthonorm::{basis_scale, coef_limit_check};
use wrz::weights::{make_weyl, parse_weight_spec};

fn main() -> wrz::Result<()> {
    let n = 30;
    let bs = basis_scale(&make_weyl(), n)?;
    let mut log_fact = 0.0;
    let mut worst: f64 = 0.0;
    for j in 0..=n {
        if j > 0 {
            log_fact += (j as f64).ln();
        }
        let exact = 0.5 * ((j + 1) as f64 * (n as f64).ln() - log_fact - PI.ln());
        worst = worst.max((bs.log_c()[j] - exact).abs());
    }
    println!("weyl n={n}: max |log c_j - exact| = {worst:.2e}");

    let w = parse_weight_spec("circular:alpha=1,beta=2")?;
    let f = solve(&w)?.robin_constant();
    for (n, rate) in coef_limit_check(&w, &[100, 400, 1600])? {
        println!("circular n={n:<5} (1/n) log c_n = {rate:.6}  (F = {f:.6})");
    }
    Ok(())
}
