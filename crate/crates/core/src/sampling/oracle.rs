//! Independent root count from companion-matrix eigenvalues. Used only as a
//! cross-check on the exact counter.

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues of the balanced companion matrix of `Σ coeffs[j] x^j`.
pub fn companion_eigenvalues(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let top = coeffs.iter().rposition(|&c| c != 0.0).ok_or(Error::ZeroPolynomial)?;
    let d = top;
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[top];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -coeffs[i] / lead;
    }
    balance_parlett_reinsch(&mut m);
    Ok(m.complex_eigenvalues().iter().cloned().collect())
}

/// Eigenvalues with `|Im λ| < 1e-9·(1 + |λ|)` counted as real.
pub fn eigenvalue_real_count(coeffs: &[f64]) -> Result<usize> {
    Ok(companion_eigenvalues(coeffs)?
        .iter()
        .filter(|l| l.im.abs() < 1e-9 * (1.0 + l.norm()))
        .count())
}
