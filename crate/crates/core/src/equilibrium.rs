//! Weighted equilibrium problem for radial weights.
//!
//! In logarithmic coordinates `s = log r` the equilibrium potential is the
//! largest convex minorant of `Φ(s) = φ(e^s)` whose slopes lie in `[0, 1]`.
//! It is computed here as a discrete double Legendre–Fenchel transform on a
//! uniform `s` grid. The equilibrium measure is `Δφ/(2π)` on the contact set
//! between `r0` and `R0`, and the modified Robin constant follows from the
//! radial reduction of the logarithmic energy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::weights::{RadialWeight, WeightKind};

/// Default number of grid points for the envelope.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Default Gauss–Legendre order for the energy quadrature.
pub const DEFAULT_ENERGY_POINTS: usize = 128;

/// `Φ(s) = φ(e^s)` sampled on a uniform log-radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCoordinateProfile {
    s_grid: Vec<f64>,
    big_phi: Vec<f64>,
}

impl LogCoordinateProfile {
    /// Samples `w` at `n_points` uniformly spaced log-radii in `[s_min, s_max]`.
    pub fn sample(w: &RadialWeight, s_min: f64, s_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 8 || !(s_min < s_max) {
            return Err(Error::InvalidArgument(format!(
                "log grid needs s_min < s_max and at least 8 points, got [{s_min}, {s_max}] with {n_points}"
            )));
        }
        let h = (s_max - s_min) / (n_points - 1) as f64;
        let s_grid: Vec<f64> = (0..n_points).map(|i| s_min + h * i as f64).collect();
        Self::from_values(s_grid.clone(), s_grid.iter().map(|&s| w.log_profile(s)).collect())
    }

    /// Builds a profile from explicit samples. The grid must be uniform.
    pub fn from_values(s_grid: Vec<f64>, big_phi: Vec<f64>) -> Result<Self> {
        if s_grid.len() != big_phi.len() || s_grid.len() < 8 {
            return Err(Error::InvalidArgument(
                "profile needs matching grids of at least 8 points".into(),
            ));
        }
        let h = s_grid[1] - s_grid[0];
        let uniform = h > 0.0
            && s_grid
                .windows(2)
                .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(1.0));
        if !uniform {
            return Err(Error::InvalidArgument(
                "log grid must be strictly increasing and uniform".into(),
            ));
        }
        if let Some(i) = big_phi.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "weight is not finite at s = {}",
                s_grid[i]
            )));
        }
        Ok(Self { s_grid, big_phi })
    }

    /// Default grid for `w`: `DEFAULT_GRID_POINTS` points on
    /// `[ln r_min, ln r_max]` with `r_min = max(1e-6, 0.01·r0_guess)` and
    /// `r_max = 10·R0_guess`, the guesses solving `r·φ'(r) ∈ {0, 1}`.
    pub fn for_weight(w: &RadialWeight) -> Result<Self> {
        Self::for_weight_with(w, DEFAULT_GRID_POINTS)
    }

    pub fn for_weight_with(w: &RadialWeight, n_points: usize) -> Result<Self> {
        let (r0_guess, big_r0_guess) = support_guesses(w)?;
        let r_min = (0.01 * r0_guess).max(1e-6);
        let r_max = 10.0 * big_r0_guess;
        Self::sample(w, r_min.ln(), r_max.ln(), n_points)
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s_grid
    }

    pub fn big_phi(&self) -> &[f64] {
        &self.big_phi
    }

    pub fn n_points(&self) -> usize {
        self.s_grid.len()
    }

    pub fn spacing(&self) -> f64 {
        self.s_grid[1] - self.s_grid[0]
    }
}

/// Solves `r·φ'(r) = target` by bracketing and bisection in `s = log r`.
fn solve_radial_slope(w: &RadialWeight, target: f64) -> Option<f64> {
    let g = |s: f64| w.radial_slope(s.exp()) - target;
    let (mut lo, mut hi) = (-40.0, 40.0);
    if g(lo) >= 0.0 {
        return None;
    }
    if g(hi) < 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((0.5 * (lo + hi)).exp())
}

fn support_guesses(w: &RadialWeight) -> Result<(f64, f64)> {
    let r0 = solve_radial_slope(w, 0.0).unwrap_or(0.0);
    let big_r0 = solve_radial_slope(w, 1.0).ok_or(Error::EnvelopeSlope {
        target: 1.0,
        s_lo: -40.0,
        s_hi: 40.0,
    })?;
    Ok((r0, big_r0))
}

/// `u(t) = sup_s (t·s − Φ(s))` on a grid of slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreTransform {
    t_grid: Vec<f64>,
    u_values: Vec<f64>,
    argmax_s: Vec<f64>,
}

impl LegendreTransform {
    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn u_values(&self) -> &[f64] {
        &self.u_values
    }

    /// Location of the maximiser for each slope.
    pub fn argmax_s(&self) -> &[f64] {
        &self.argmax_s
    }
}

/// Vertex of the parabola through three equally spaced samples, returned as
/// (offset in units of the spacing, value).
fn parabolic_vertex(f_left: f64, f_mid: f64, f_right: f64) -> (f64, f64) {
    let curvature = f_left - 2.0 * f_mid + f_right;
    if curvature >= 0.0 {
        return (0.0, f_mid);
    }
    let offset = 0.5 * (f_left - f_right) / curvature;
    let value = f_mid - 0.125 * (f_right - f_left) * (f_right - f_left) / curvature;
    if offset.abs() > 1.0 {
        return (0.0, f_mid);
    }
    (offset, value.max(f_mid))
}

/// Discrete Legendre–Fenchel transform of the profile at the given slopes,
/// refined by parabolic interpolation around each discrete maximiser.
///
/// A maximiser on either end of the grid means the supremum is not attained
/// inside it and is reported as [`Error::BoundaryArgmax`].
pub fn legendre_fenchel(profile: &LogCoordinateProfile, t_grid: &[f64]) -> Result<LegendreTransform> {
    let s = profile.s_grid();
    let phi = profile.big_phi();
    let n = s.len();
    let h = profile.spacing();
    let mut u_values = Vec::with_capacity(t_grid.len());
    let mut argmax_s = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for i in 0..n {
            let v = t * s[i] - phi[i];
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        let f = |i: usize| t * s[i] - phi[i];
        // a flat stretch reaching the boundary still attains the sup inside
        let tie = |i: usize, j: usize| f(j) >= f(i) - 1e-12 * (1.0 + f(i).abs());
        if best == 0 && tie(0, 1) {
            best = 1;
        } else if best == n - 1 && tie(n - 1, n - 2) {
            best = n - 2;
        }
        if best == 0 || best == n - 1 {
            return Err(Error::BoundaryArgmax { slope: t, s: s[best] });
        }
        let best_val = f(best);
        let (offset, value) = parabolic_vertex(f(best - 1), best_val, f(best + 1));
        u_values.push(value);
        argmax_s.push(s[best] + offset * h);
    }
    Ok(LegendreTransform {
        t_grid: t_grid.to_vec(),
        u_values,
        argmax_s,
    })
}

/// Biconjugate of the sampled profile for slopes in `[0, 1]`, evaluated on
/// the grid. For sampled data this is the lower convex hull of the points,
/// held flat left of its minimum and continued with slope one once the hull
/// gets steeper than that.
fn restricted_hull(profile: &LogCoordinateProfile) -> Vec<f64> {
    let s = profile.s_grid();
    let phi = profile.big_phi();
    let slope = |a: usize, b: usize| (phi[b] - phi[a]) / (s[b] - s[a]);
    let mut hull: Vec<usize> = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if slope(a, b) >= slope(a, i) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let first = hull
        .windows(2)
        .position(|v| slope(v[0], v[1]) >= 0.0)
        .unwrap_or(hull.len() - 1);
    let last = hull
        .windows(2)
        .position(|v| slope(v[0], v[1]) > 1.0)
        .unwrap_or(hull.len() - 1);
    let (lo, hi) = (hull[first], hull[last.max(first)]);
    let mut env = vec![0.0; s.len()];
    let mut seg = first;
    for i in 0..s.len() {
        env[i] = if i <= lo {
            phi[lo]
        } else if i >= hi {
            phi[hi] + (s[i] - s[hi])
        } else {
            while hull[seg + 1] < i {
                seg += 1;
            }
            let (a, b) = (hull[seg], hull[seg + 1]);
            if i == a {
                phi[a]
            } else if i == b {
                phi[b]
            } else {
                phi[a] + slope(a, b) * (s[i] - s[a])
            }
        };
        env[i] = env[i].min(phi[i]);
    }
    env
}

/// Slope-restricted convex envelope of a profile, i.e. the double transform
/// with slopes in `[0, 1]`, together with the transform on `[t_lo, 1]`.
///
/// `t_lo` is zero unless the profile is still increasing at the left end of
/// the grid, in which case smaller slopes are only attained further left and
/// are dropped. The transform doubles as a check that the grid is wide
/// enough: a slope-one sup on the right end is reported as
/// [`Error::EnvelopeSlope`].
pub fn slope_restricted_envelope(profile: &LogCoordinateProfile) -> Result<(LegendreTransform, Vec<f64>)> {
    let phi = profile.big_phi();
    let h = profile.spacing();
    let left_slope = (phi[2] - phi[1]) / h;
    let t_lo = left_slope.max(0.0);
    if t_lo >= 1.0 {
        return Err(Error::EnvelopeSlope {
            target: 0.0,
            s_lo: profile.s_grid()[0],
            s_hi: profile.s_grid()[profile.n_points() - 1],
        });
    }
    let m = profile.n_points();
    let t_grid: Vec<f64> = (0..m)
        .map(|k| {
            if k + 1 == m {
                1.0
            } else {
                t_lo + (1.0 - t_lo) * k as f64 / (m - 1) as f64
            }
        })
        .collect();
    let s_end = profile.s_grid()[profile.n_points() - 1];
    let lt = legendre_fenchel(profile, &t_grid).map_err(|e| match e {
        Error::BoundaryArgmax { s, .. } if s == s_end => Error::EnvelopeSlope {
            target: 1.0,
            s_lo: profile.s_grid()[0],
            s_hi: profile.s_grid()[profile.n_points() - 1],
        },
        other => other,
    })?;
    let env = restricted_hull(profile);
    Ok((lt, env))
}

/// Closed radius interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }

    pub fn contains(&self, r: f64) -> bool {
        self.lo <= r && r <= self.hi
    }
}

/// Solution of the weighted equilibrium problem for a radial weight.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    weight: RadialWeight,
    r0: f64,
    big_r0: f64,
    envelope_radii: (f64, f64),
    support: Vec<Interval>,
    bulk: Vec<Interval>,
    robin_constant: f64,
    s_grid: Vec<f64>,
    envelope: Vec<f64>,
    warnings: Vec<String>,
}

impl EquilibriumResult {
    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    /// Inner radius of the support.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Outer radius of the support (`R0`).
    pub fn outer_radius(&self) -> f64 {
        self.big_r0
    }

    /// `(r0, R0)` as read off the discrete envelope, before any closed-form
    /// override.
    pub fn envelope_radii(&self) -> (f64, f64) {
        self.envelope_radii
    }

    /// Radius intervals on which the potential touches the weight.
    pub fn support(&self) -> &[Interval] {
        &self.support
    }

    /// Sub-intervals of the support where `Δφ > 0`.
    pub fn bulk_intervals(&self) -> &[Interval] {
        &self.bulk
    }

    pub fn robin_constant(&self) -> f64 {
        self.robin_constant
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The discrete envelope `Φ_φ` on the log grid it was computed on.
    pub fn envelope_samples(&self) -> (&[f64], &[f64]) {
        (&self.s_grid, &self.envelope)
    }

    /// Equilibrium potential `U_φ` at `|z| = r`.
    pub fn potential(&self, r: f64) -> f64 {
        let w = &self.weight;
        if r >= self.big_r0 {
            return w.phi(self.big_r0) + r.ln() - self.big_r0.ln();
        }
        if self.r0 > 0.0 && r <= self.r0 {
            return w.phi(self.r0);
        }
        if self.support.iter().any(|iv| iv.contains(r)) {
            return w.phi(r);
        }
        // in a gap between two contact intervals the envelope is affine in log r
        let below = self.support.iter().rev().find(|iv| iv.hi < r);
        let above = self.support.iter().find(|iv| iv.lo > r);
        match (below, above) {
            (Some(b), Some(a)) => {
                let (s0, s1) = (b.hi.ln(), a.lo.ln());
                let (v0, v1) = (w.phi(b.hi), w.phi(a.lo));
                v0 + (v1 - v0) * (r.ln() - s0) / (s1 - s0)
            }
            _ => w.phi(r),
        }
    }

    /// Density of the equilibrium measure with respect to `r dr dθ`.
    pub fn measure_radial_density(&self, r: f64) -> f64 {
        if self.support.iter().any(|iv| iv.contains(r)) {
            self.weight.laplacian(r).max(0.0) / (2.0 * PI)
        } else {
            0.0
        }
    }

    /// Summary used by the JSON front end.
    pub fn summary(&self) -> Result<EquilibriumSummary> {
        Ok(EquilibriumSummary {
            r0: self.r0,
            big_r0: self.big_r0,
            robin_constant: self.robin_constant,
            limit_integral: limit_density_integral(&self.weight, self)?,
            bulk: self.bulk.clone(),
        })
    }
}

/// Serialisable digest of an [`EquilibriumResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSummary {
    pub r0: f64,
    #[serde(rename = "R0")]
    pub big_r0: f64,
    pub robin_constant: f64,
    pub limit_integral: f64,
    pub bulk: Vec<Interval>,
}

/// Solves the equilibrium problem for `w` on the default grid.
pub fn solve(w: &RadialWeight) -> Result<EquilibriumResult> {
    let grid = LogCoordinateProfile::for_weight(w)?;
    equilibrium_potential(w, &grid)
}

/// Equilibrium potential, support and bulk of `w` from the envelope of the
/// sampled profile.
///
/// For circular weights `r0` and `R0` are replaced by their closed forms; the
/// grid-derived values stay available through
/// [`EquilibriumResult::envelope_radii`].
pub fn equilibrium_potential(w: &RadialWeight, grid: &LogCoordinateProfile) -> Result<EquilibriumResult> {
    let (lt, env) = slope_restricted_envelope(grid)?;
    let s = grid.s_grid();
    let phi = grid.big_phi();
    let n = s.len();
    let h = grid.spacing();
    let slopes: Vec<f64> = env.windows(2).map(|p| (p[1] - p[0]) / h).collect();

    // R0: first cell on the slope-one ray, refined by extrapolating the
    // slopes of the last cells that are still in contact
    let flat_tol = 1e-9;
    let first_ray = slopes
        .iter()
        .position(|&d| d >= 1.0 - flat_tol)
        .ok_or(Error::EnvelopeSlope {
            target: 1.0,
            s_lo: s[0],
            s_hi: s[n - 1],
        })?;
    let s_big_r0 = extrapolate_slope(&slopes, s, h, first_ray, 1.0, Direction::Before);

    // r0: end of the flat part, if there is one
    let starts_flat = lt.t_grid()[0] == 0.0 && slopes[0].abs() <= flat_tol;
    let s_r0 = if starts_flat {
        let last_flat = slopes.iter().position(|&d| d > flat_tol).unwrap_or(0).saturating_sub(1);
        Some(extrapolate_slope(&slopes, s, h, last_flat, 0.0, Direction::After))
    } else {
        None
    };
    let envelope_radii = (s_r0.map_or(0.0, f64::exp), s_big_r0.exp());

    let (r0, big_r0) = match w.kind() {
        WeightKind::Circular(p) => (p.inner_radius(), p.outer_radius()),
        _ => (
            s_r0.map_or(0.0, |s0| polish_radial_slope(w, s0, h, 0.0).exp()),
            polish_radial_slope(w, s_big_r0, h, 1.0).exp(),
        ),
    };

    let support = match w.kind() {
        WeightKind::Circular(_) => vec![Interval { lo: r0, hi: big_r0 }],
        _ => contact_intervals(w, s, phi, r0, big_r0),
    };

    let mut warnings = Vec::new();
    let bulk = match w.kind() {
        WeightKind::Circular(_) | WeightKind::Weyl => vec![Interval { lo: r0, hi: big_r0 }],
        WeightKind::Custom(_) => positive_laplacian_runs(w, &support, s, h),
    };
    if bulk.iter().all(Interval::is_empty) {
        warnings.push(format!("weight '{}' has an empty bulk; the limit integral is 0", w.name()));
    }

    let mut eq = EquilibriumResult {
        weight: w.clone(),
        r0,
        big_r0,
        envelope_radii,
        support,
        bulk,
        robin_constant: f64::NAN,
        s_grid: s.to_vec(),
        envelope: env,
        warnings,
    };
    eq.robin_constant = robin_constant(w, &eq, DEFAULT_ENERGY_POINTS)?;
    Ok(eq)
}

#[derive(Clone, Copy)]
enum Direction {
    Before,
    After,
}

/// Locates where the envelope slope reaches `target`, extrapolating linearly
/// from two cells that lie strictly inside the contact region next to the
/// boundary cell `k`.
fn extrapolate_slope(slopes: &[f64], s: &[f64], h: f64, k: usize, target: f64, dir: Direction) -> f64 {
    let mid = |i: usize| s[i] + 0.5 * h;
    let (a, b) = match dir {
        Direction::Before => (k.checked_sub(3), k.checked_sub(2)),
        Direction::After => (Some(k + 3), Some(k + 2)),
    };
    match (a, b) {
        (Some(a), Some(b)) if a < slopes.len() && b < slopes.len() => {
            let (da, db) = (slopes[a], slopes[b]);
            if (db - da).abs() > 0.0 {
                let t = mid(b) + (target - db) * (mid(b) - mid(a)) / (db - da);
                // never move further than the cells we extrapolate from
                let (lo, hi) = match dir {
                    Direction::Before => (mid(b), s[(k + 1).min(s.len() - 1)]),
                    Direction::After => (s[k], mid(b)),
                };
                return t.clamp(lo, hi);
            }
            match dir {
                Direction::Before => s[k],
                Direction::After => s[k + 1],
            }
        }
        _ => s[k],
    }
}

/// Bisection on `r·φ'(r) = target` in a window of a few cells around `s0`;
/// keeps `s0` when the window holds no sign change.
fn polish_radial_slope(w: &RadialWeight, s0: f64, h: f64, target: f64) -> f64 {
    let g = |s: f64| w.radial_slope(s.exp()) - target;
    let (mut lo, mut hi) = (s0 - 4.0 * h, s0 + 4.0 * h);
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        return s0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid points of `[r0, R0]` where the tangent line of `Φ` supports the
/// whole sampled profile, grouped into runs.
fn contact_intervals(w: &RadialWeight, s: &[f64], phi: &[f64], r0: f64, big_r0: f64) -> Vec<Interval> {
    let (s_lo, s_hi) = (if r0 > 0.0 { r0.ln() } else { f64::NEG_INFINITY }, big_r0.ln());
    let touches = |i: usize| {
        let d = w.radial_slope(s[i].exp());
        let here = phi[i] - d * s[i];
        let tol = 1e-10 * (1.0 + phi[i].abs() + (d * s[i]).abs());
        s.iter().zip(phi).all(|(&sk, &pk)| pk - d * sk >= here - tol)
    };
    let mut out: Vec<Interval> = Vec::new();
    let mut run: Option<(f64, f64)> = None;
    for (i, &si) in s.iter().enumerate() {
        let touching = si >= s_lo && si <= s_hi && touches(i);
        match (touching, run) {
            (true, None) => run = Some((si, si)),
            (true, Some((a, _))) => run = Some((a, si)),
            (false, Some((a, b))) => {
                out.push(Interval { lo: a.exp(), hi: b.exp() });
                run = None;
            }
            (false, None) => {}
        }
    }
    if let Some((a, b)) = run {
        out.push(Interval { lo: a.exp(), hi: b.exp() });
    }
    if let Some(first) = out.first_mut() {
        first.lo = if r0 > 0.0 { r0 } else { 0.0 };
    }
    if let Some(last) = out.last_mut() {
        last.hi = big_r0;
    }
    out.retain(|iv| !iv.is_empty());
    out
}

fn positive_laplacian_runs(w: &RadialWeight, support: &[Interval], s: &[f64], h: f64) -> Vec<Interval> {
    let mut out = Vec::new();
    for iv in support {
        let lo_s = if iv.lo > 0.0 { iv.lo.ln() } else { s[0] };
        let hi_s = iv.hi.ln();
        let steps = (((hi_s - lo_s) / h).ceil() as usize).max(8);
        let rs: Vec<f64> = (0..=steps)
            .map(|i| (lo_s + (hi_s - lo_s) * i as f64 / steps as f64).exp())
            .collect();
        let mut start: Option<f64> = None;
        for (i, &r) in rs.iter().enumerate() {
            let positive = w.laplacian(r) > 0.0;
            match (positive, start) {
                (true, None) => {
                    start = Some(if i == 0 { iv.lo } else { bisect_sign(w, rs[i - 1], r) });
                }
                (false, Some(a)) => {
                    out.push(Interval { lo: a, hi: bisect_sign(w, rs[i - 1], r) });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(a) = start {
            out.push(Interval { lo: a, hi: iv.hi });
        }
    }
    out.retain(|iv| !iv.is_empty());
    out
}

fn bisect_sign(w: &RadialWeight, mut a: f64, mut b: f64) -> f64 {
    let pa = w.laplacian(a) > 0.0;
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if (w.laplacian(m) > 0.0) == pa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Modified Robin constant `I_φ(μ_e) − ∫φ dμ_e`.
///
/// For a radial measure `ν` the logarithmic potential at radius `r` is
/// `∫ log max(r, ρ) dν(ρ)`, so the energy reduces to
/// `−2 ∫ log r · ν([0, r]) dν(r)`. Both the outer integral and the inner
/// cumulative masses use Gauss–Legendre rules of `quad_points` nodes on each
/// support interval.
pub fn robin_constant(w: &RadialWeight, eq: &EquilibriumResult, quad_points: usize) -> Result<f64> {
    if quad_points < 64 {
        return Err(Error::InvalidArgument(format!(
            "energy quadrature needs at least 64 points, got {quad_points}"
        )));
    }
    let rule = quadrature::gauss_legendre(quad_points);
    let density = |r: f64| w.laplacian(r).max(0.0) * r;
    let mut mass_below = 0.0;
    let mut log_energy = 0.0;
    let mut phi_moment = 0.0;
    for iv in eq.support() {
        let (c, half) = (0.5 * (iv.lo + iv.hi), 0.5 * (iv.hi - iv.lo));
        for (x, wt) in rule.0.iter().zip(&rule.1) {
            let r = c + half * x;
            let dnu = wt * half * density(r);
            let inner = mass_below + quadrature::gauss_legendre_on(density, iv.lo, r, &rule);
            log_energy -= 2.0 * r.ln() * inner * dnu;
            phi_moment += w.phi(r) * dnu;
        }
        mass_below += quadrature::gauss_legendre_on(density, iv.lo, iv.hi, &rule);
    }
    Ok(log_energy + phi_moment)
}

/// `(2/π)·∫ √(Δφ(r)/2) dr` over the bulk radii: the limit of `E N_n / √n`.
pub fn limit_density_integral(w: &RadialWeight, eq: &EquilibriumResult) -> Result<f64> {
    let mut total = 0.0;
    for iv in eq.bulk_intervals() {
        let r = quadrature::integrate(
            |r| (0.5 * w.laplacian(r).max(0.0)).sqrt(),
            iv.lo,
            iv.hi,
            Tolerance::relative(1e-12).with_abs(1e-15),
        )?;
        total += r.value;
    }
    Ok(2.0 / PI * total)
}

/// Equilibrium mass of the annulus `a ≤ |z| ≤ b`.
pub fn measure_mass(eq: &EquilibriumResult, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && a <= b) {
        return Err(Error::InvalidArgument(format!(
            "annulus needs 0 ≤ a ≤ b, got [{a}, {b}]"
        )));
    }
    if let Some(p) = eq.weight().circular_params() {
        let hi = b.min(eq.outer_radius());
        let lo = a.max(eq.r0());
        if hi <= lo {
            return Ok(0.0);
        }
        return Ok((p.beta * (hi.powf(p.beta) - lo.powf(p.beta))).clamp(0.0, 1.0));
    }
    // r·φ'(r) is an antiderivative of Δφ(r)·r
    let w = eq.weight();
    let slope = |r: f64| if r > 0.0 { w.radial_slope(r) } else { 0.0 };
    let mut total = 0.0;
    for iv in eq.support() {
        let lo = iv.lo.max(a);
        let hi = iv.hi.min(b);
        if hi > lo {
            total += slope(hi) - slope(lo);
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{make_circular, make_weyl, CircularWeightParams};

    fn circ(alpha: f64, beta: f64) -> RadialWeight {
        make_circular(CircularWeightParams::new(alpha, beta).unwrap()).unwrap()
    }

    /// Brute-force sup of `t·s − Φ(s)` on a very fine grid.
    fn dense_sup(big_phi: impl Fn(f64) -> f64, t: f64, lo: f64, hi: f64) -> f64 {
        let n = 2_000_000;
        (0..=n)
            .map(|i| {
                let s = lo + (hi - lo) * i as f64 / n as f64;
                t * s - big_phi(s)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn legendre_weyl_at_slope_one() {
        let w = make_weyl();
        let profile = LogCoordinateProfile::sample(&w, -8.0, 3.0, 4096).unwrap();
        let lt = legendre_fenchel(&profile, &[1.0, 0.5, 0.25]).unwrap();
        let oracle = dense_sup(|s| 0.5 * (2.0 * s).exp(), 1.0, -8.0, 3.0);
        assert!((oracle + 0.5).abs() < 1e-9);
        assert!((lt.u_values()[0] + 0.5).abs() < 1e-8);
        for (t, u) in lt.t_grid().iter().zip(lt.u_values()) {
            let exact = 0.5 * t * (t.ln() - 1.0);
            assert!((u - exact).abs() < 1e-8, "t={t}: {u} vs {exact}");
        }
    }

    #[test]
    fn legendre_weyl_zero_slope_is_a_boundary_sup() {
        let profile = LogCoordinateProfile::sample(&make_weyl(), -8.0, 3.0, 512).unwrap();
        let err = legendre_fenchel(&profile, &[0.0]).unwrap_err();
        assert!(matches!(err, Error::BoundaryArgmax { .. }));
    }

    #[test]
    fn legendre_circular_alpha_one() {
        let w = circ(1.0, 2.0);
        let profile = LogCoordinateProfile::sample(&w, -6.0, 3.0, 4096).unwrap();
        let lt = legendre_fenchel(&profile, &[1.0, 0.3]).unwrap();
        let oracle = dense_sup(|s| -s + (2.0 * s).exp(), 1.0, -6.0, 3.0);
        assert!((oracle + 1.0).abs() < 1e-9);
        assert!((lt.u_values()[0] + 1.0).abs() < 1e-8);
        assert!(lt.argmax_s()[0].abs() < 1e-5);
        // stationary point e^(2s) = (t+1)/2
        let s_star = 0.5 * (1.3f64 / 2.0).ln();
        let exact = 1.3 * s_star - (1.3f64 / 2.0);
        assert!((lt.u_values()[1] - exact).abs() < 1e-8);
    }

    #[test]
    fn transform_is_convex_in_slope() {
        let w = circ(0.5, 3.0);
        let profile = LogCoordinateProfile::for_weight(&w).unwrap();
        let (lt, _) = slope_restricted_envelope(&profile).unwrap();
        let u = lt.u_values();
        let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for k in 1..u.len() - 1 {
            assert!(u[k - 1] - 2.0 * u[k] + u[k + 1] >= -1e-9 * scale);
        }
    }

    #[test]
    fn circular_support_and_potential() {
        let w = circ(1.0, 2.0);
        let eq = solve(&w).unwrap();
        assert!((eq.r0() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(eq.outer_radius(), 1.0);
        let (er0, e_big_r0) = eq.envelope_radii();
        assert!((er0 / 0.5f64.sqrt() - 1.0).abs() < 1e-3, "{er0}");
        assert!((e_big_r0 - 1.0).abs() < 1e-3, "{e_big_r0}");
        assert!((eq.potential(2.0) - (2f64.ln() + 1.0)).abs() < 1e-14);
        assert!((eq.potential(0.3) - w.phi(0.5f64.sqrt())).abs() < 1e-14);
        assert_eq!(eq.potential(0.85), w.phi(0.85));
    }

    #[test]
    fn weyl_support() {
        let eq = solve(&make_weyl()).unwrap();
        assert_eq!(eq.r0(), 0.0);
        assert!((eq.outer_radius() - 1.0).abs() < 1e-10);
        assert_eq!(eq.envelope_radii().0, 0.0);
        assert!((eq.envelope_radii().1 - 1.0).abs() < 1e-3);
        assert_eq!(eq.bulk_intervals().len(), 1);
    }

    #[test]
    fn envelope_radii_match_closed_forms() {
        for (a, b) in [(0.0, 2.0), (0.5, 2.0), (1.0, 2.0), (2.0, 3.0), (0.0, 4.0), (1.0, 3.0), (0.3, 1.5)] {
            let w = circ(a, b);
            let eq = solve(&w).unwrap();
            let p = w.circular_params().unwrap();
            let (er0, e_big_r0) = eq.envelope_radii();
            if a > 0.0 {
                assert!((er0 / p.inner_radius() - 1.0).abs() < 1e-3, "α={a} β={b}: {er0}");
            } else {
                assert_eq!(er0, 0.0);
            }
            assert!((e_big_r0 / p.outer_radius() - 1.0).abs() < 1e-3, "α={a} β={b}: {e_big_r0}");
        }
    }

    #[test]
    fn envelope_invariants() {
        for w in [make_weyl(), circ(1.0, 2.0), circ(0.5, 3.0)] {
            let eq = solve(&w).unwrap();
            let (s, env) = eq.envelope_samples();
            let h = s[1] - s[0];
            let slopes: Vec<f64> = env.windows(2).map(|p| (p[1] - p[0]) / h).collect();
            for d in slopes.windows(2) {
                assert!(d[1] >= d[0] - 1e-6, "slopes must not decrease: {} then {}", d[0], d[1]);
            }
            for &d in &slopes {
                assert!((-1e-9..=1.0 + 1e-9).contains(&d), "slope {d}");
            }
            for (i, &si) in s.iter().enumerate() {
                assert!(env[i] <= w.log_profile(si) + 1e-12);
            }
            // the potential is log r plus a constant beyond R0
            let big_r0 = eq.outer_radius();
            let c = eq.potential(big_r0) - big_r0.ln();
            for r in [1.5 * big_r0, 3.0 * big_r0, 40.0 * big_r0] {
                assert!((eq.potential(r) - r.ln() - c).abs() < 1e-8);
            }
            for i in 1..200 {
                let r = 3.0 * big_r0 * i as f64 / 200.0;
                assert!(eq.potential(r) <= w.phi(r) + 1e-8);
                if r >= eq.r0() && r <= big_r0 {
                    assert!((eq.potential(r) - w.phi(r)).abs() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn envelope_is_idempotent() {
        let w = circ(1.0, 2.0);
        let profile = LogCoordinateProfile::for_weight(&w).unwrap();
        let (_, env) = slope_restricted_envelope(&profile).unwrap();
        let again = LogCoordinateProfile::from_values(profile.s_grid().to_vec(), env.clone()).unwrap();
        let (_, env2) = slope_restricted_envelope(&again).unwrap();
        let scale = env.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let worst = env.iter().zip(&env2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9 * scale, "idempotence defect {worst}");
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let w = circ(1.0, 2.0);
        let profile = LogCoordinateProfile::sample(&w, -3.0, -0.5, 512).unwrap();
        let err = equilibrium_potential(&w, &profile).unwrap_err();
        assert!(matches!(err, Error::EnvelopeSlope { .. }), "{err:?}");
    }

    #[test]
    fn total_mass_is_one() {
        for w in [make_weyl(), circ(1.0, 2.0), circ(0.0, 4.0), circ(0.5, 3.0)] {
            let eq = solve(&w).unwrap();
            let mut total = 0.0;
            for iv in eq.support() {
                total += quadrature::integrate(
                    |r| 2.0 * PI * eq.measure_radial_density(r) * r,
                    iv.lo,
                    iv.hi,
                    Tolerance::relative(1e-12),
                )
                .unwrap()
                .value;
            }
            assert!((total - 1.0).abs() < 1e-6, "{}: {total}", w.name());
        }
    }

    #[test]
    fn robin_constants() {
        let eq = solve(&make_weyl()).unwrap();
        assert!((eq.robin_constant() - 0.5).abs() < 1e-6, "{}", eq.robin_constant());
        // F = φ(R0) − log R0 for radial weights
        for (a, b) in [(0.0, 2.0), (1.0, 2.0), (0.5, 3.0), (0.0, 4.0)] {
            let w = circ(a, b);
            let eq = solve(&w).unwrap();
            let big_r0 = eq.outer_radius();
            let expected = w.phi(big_r0) - big_r0.ln();
            assert!((eq.robin_constant() - expected).abs() < 1e-6, "α={a} β={b}: {} vs {expected}", eq.robin_constant());
        }
        let eq = solve(&circ(0.0, 2.0)).unwrap();
        assert!((eq.robin_constant() - 0.5 * (1.0 + 2f64.ln())).abs() < 1e-6);
        assert!(robin_constant(eq.weight(), &eq, 32).is_err());
    }

    #[test]
    fn limit_integrals() {
        let weyl = solve(&make_weyl()).unwrap();
        assert!((limit_density_integral(weyl.weight(), &weyl).unwrap() - 2.0 / PI).abs() < 1e-9);
        for a in [0.0, 0.5, 1.0, 1.5] {
            let eq = solve(&circ(a, 2.0)).unwrap();
            let v = limit_density_integral(eq.weight(), &eq).unwrap();
            let exact = 2.0 / PI * ((a + 1.0f64).sqrt() - a.sqrt());
            assert!((v / exact - 1.0).abs() < 1e-6, "α={a}: {v} vs {exact}");
        }
        let eq = solve(&circ(1.0, 2.0)).unwrap();
        assert!((limit_density_integral(eq.weight(), &eq).unwrap() - 0.263_696_5).abs() < 1e-6);
        let eq = solve(&circ(0.0, 4.0)).unwrap();
        let v = limit_density_integral(eq.weight(), &eq).unwrap();
        assert!((v - 2f64.sqrt() / PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn annulus_masses() {
        let eq = solve(&circ(1.0, 2.0)).unwrap();
        assert!((measure_mass(&eq, eq.r0(), eq.outer_radius()).unwrap() - 1.0).abs() < 1e-12);
        assert!((measure_mass(&eq, 0.8, 0.9).unwrap() - 0.34).abs() < 1e-12);
        assert_eq!(measure_mass(&eq, 0.0, eq.r0()).unwrap(), 0.0);
        assert_eq!(measure_mass(&eq, 2.0, 3.0).unwrap(), 0.0);
        assert!(measure_mass(&eq, 0.5, 0.2).is_err());

        let weyl = solve(&make_weyl()).unwrap();
        assert!((measure_mass(&weyl, 0.0, 0.5).unwrap() - 0.25).abs() < 1e-9);
        assert!((measure_mass(&weyl, 0.0, 10.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn custom_weight_matches_builtin() {
        let custom = RadialWeight::custom(
            "r^2 copy",
            |r| -(r.ln()) + r * r,
            |r| -1.0 / r + 2.0 * r,
            |_| 4.0,
            1.0,
            2.0,
        )
        .unwrap();
        let eq = solve(&custom).unwrap();
        assert!((eq.r0() - 0.5f64.sqrt()).abs() < 1e-9, "{}", eq.r0());
        assert!((eq.outer_radius() - 1.0).abs() < 1e-9);
        assert!((eq.robin_constant() - 1.0).abs() < 1e-6);
        assert_eq!(eq.bulk_intervals().len(), 1);
        assert!((measure_mass(&eq, 0.8, 0.9).unwrap() - 0.34).abs() < 1e-9);
    }

    #[test]
    fn harmonic_band_is_excluded_from_bulk() {
        // φ = r² up to 0.5, harmonic (radial slope 1/2) on [0.5, 0.6], then
        // strictly subharmonic again
        let a = 0.5;
        let b = 0.25 - a * 0.5f64.ln();
        let v = a * 0.6f64.ln() + b;
        let phi = move |r: f64| {
            if r < 0.5 {
                r * r
            } else if r <= 0.6 {
                a * r.ln() + b
            } else {
                v + a / 0.6 * (r - 0.6) + (r - 0.6) * (r - 0.6)
            }
        };
        let dphi = move |r: f64| {
            if r < 0.5 {
                2.0 * r
            } else if r <= 0.6 {
                a / r
            } else {
                a / 0.6 + 2.0 * (r - 0.6)
            }
        };
        let lap = move |r: f64| {
            if r < 0.5 {
                4.0
            } else if r <= 0.6 {
                0.0
            } else {
                2.0 + dphi(r) / r
            }
        };
        let w = RadialWeight::custom("harmonic band", phi, dphi, lap, 0.5, 3.0).unwrap();
        let eq = solve(&w).unwrap();
        assert_eq!(eq.support().len(), 1, "{:?}", eq.support());
        let bulk = eq.bulk_intervals();
        assert_eq!(bulk.len(), 2, "{bulk:?}");
        assert!((bulk[0].hi - 0.5).abs() < 1e-9 && (bulk[1].lo - 0.6).abs() < 1e-9);
        assert!((measure_mass(&eq, 0.0, 10.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(measure_mass(&eq, 0.5, 0.6).unwrap().abs() < 1e-12);
    }
}
