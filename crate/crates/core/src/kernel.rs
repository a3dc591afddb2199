//! Diagonal of the reproducing kernel of the scaled monomial basis at real
//! points, and the variance combination that drives the real-zero density.

use serde::{Deserialize, Serialize};

use crate::orthonorm::BasisScale;

/// Kernel sums at a real point `x`, all in the log domain.
///
/// * `K(x)   = Σ c_j² x^{2j}`
/// * `K01(x) = Σ j c_j² x^{2j−1}`
/// * `K11(x) = Σ j² c_j² x^{2j−2}`
/// * `V(x)   = K·K11 − K01²`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelDiagonal {
    pub x: f64,
    #[serde(rename = "log_K")]
    pub log_k: f64,
    #[serde(rename = "K01_sign")]
    pub k01_sign: i8,
    #[serde(rename = "log_K01_abs")]
    pub log_k01_abs: f64,
    #[serde(rename = "log_K11")]
    pub log_k11: f64,
    #[serde(rename = "log_V")]
    pub log_v: f64,
}

/// Pair terms this many log units below the largest one are dropped.
pub const PAIR_CUTOFF: f64 = 40.0;

/// Below this the shifted exponentials are no longer safe to multiply.
const TINY: f64 = 1e-290;

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Kernel sums at `x`, with pair truncation.
pub fn kernel_diagonal(bs: &BasisScale, x: f64) -> KernelDiagonal {
    kernel_diagonal_with(bs, x, true)
}

/// Kernel sums at `x`. With `truncate` the variance pair sum skips indices
/// whose pairs are all at least [`PAIR_CUTOFF`] log units (plus a margin for
/// their number) below the largest pair.
pub fn kernel_diagonal_with(bs: &BasisScale, x: f64, truncate: bool) -> KernelDiagonal {
    let lc = bs.log_c();
    let n = bs.n();
    if x == 0.0 {
        let c1 = if n >= 1 { 2.0 * lc[1] } else { f64::NEG_INFINITY };
        return KernelDiagonal {
            x,
            log_k: 2.0 * lc[0],
            k01_sign: 0,
            log_k01_abs: f64::NEG_INFINITY,
            log_k11: c1,
            log_v: 2.0 * lc[0] + c1,
        };
    }
    let lx = x.abs().ln();
    let t: Vec<f64> = lc
        .iter()
        .enumerate()
        .map(|(j, c)| 2.0 * c + 2.0 * j as f64 * lx)
        .collect();
    let ln_j = |j: usize| (j as f64).ln();
    let log_k = log_sum_exp(t.iter().copied());
    if n == 0 {
        return KernelDiagonal {
            x,
            log_k,
            k01_sign: 0,
            log_k01_abs: f64::NEG_INFINITY,
            log_k11: f64::NEG_INFINITY,
            log_v: f64::NEG_INFINITY,
        };
    }
    let log_k01_abs = log_sum_exp((1..=n).map(|j| t[j] + ln_j(j))) - lx;
    let log_k11 = log_sum_exp((1..=n).map(|j| t[j] + 2.0 * ln_j(j))) - 2.0 * lx;
    let log_v = log_pair_sum(&t, truncate) - 2.0 * lx;
    KernelDiagonal {
        x,
        log_k,
        k01_sign: if x > 0.0 { 1 } else { -1 },
        log_k01_abs,
        log_k11,
        log_v,
    }
}

/// `log Σ_{j<k} (k−j)² e^{t_j + t_k}`.
fn log_pair_sum(t: &[f64], truncate: bool) -> f64 {
    let n = t.len() - 1;
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &v in t {
        if v > first {
            second = first;
            first = v;
        } else if v > second {
            second = v;
        }
    }
    // the largest pair is at least e^{first + second}; a pair through j is at
    // most n²·e^{t_j + first}
    let keep: Vec<usize> = if truncate {
        let floor = second - 4.0 * ((n + 1) as f64).ln() - PAIR_CUTOFF;
        (0..=n).filter(|&j| t[j] >= floor).collect()
    } else {
        (0..=n).collect()
    };
    let e: Vec<f64> = keep.iter().map(|&j| (t[j] - first).exp()).collect();
    if e.iter().all(|&v| v >= TINY) {
        let mut total = 0.0;
        for (a, &j) in keep.iter().enumerate() {
            let mut inner = 0.0;
            for (b, &k) in keep.iter().enumerate().skip(a + 1) {
                let d = (k - j) as f64;
                inner += d * d * e[b];
            }
            total += e[a] * inner;
        }
        return 2.0 * first + total.ln();
    }
    // terms span too many decades for plain products
    let shift = first + second;
    let mut total = 0.0;
    for (a, &j) in keep.iter().enumerate() {
        for &k in &keep[a + 1..] {
            let d = (k - j) as f64;
            total += (2.0 * d.ln() + t[j] + t[k] - shift).exp();
        }
    }
    shift + total.ln()
}

/// `(1/√n)·√V/K`, which tends to `√(Δφ(x)/2)` in the bulk.
pub fn scaled_density_ratio(bs: &BasisScale, x: f64) -> f64 {
    if bs.n() == 0 {
        return 0.0;
    }
    let kd = kernel_diagonal(bs, x);
    (0.5 * kd.log_v - kd.log_k).exp() / (bs.n() as f64).sqrt()
}
