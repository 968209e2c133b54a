//! High-frequency window probe of the data-to-solution map.
//!
//! The probe data lives on two opposite frequency windows `[N, N + gamma]`
//! and `[-N - gamma, -N]` with spectral amplitude `N^(-s) gamma^(-1/2)`,
//! sized to have order-one `H^s` norm. The first term of the solution's
//! expansion that couples the windows is cubic in the data; its spectrum
//! concentrates near `+-N` (two windows against one) and `+-3N` (all
//! three together), and its `H^s` size tracks `t * gamma * N^(1 - 2s)`.
//! Sweeping the carrier `N` therefore resolves the Sobolev threshold
//! `s = 1/2`: below it the cubic response grows with `N`, above it the
//! response decays. Everything here is computed on the continuum by
//! quadrature — no grid, no time stepping — so the carrier is not tied
//! to any resolvable mode range.

use crate::dispersion::{resonance, Dispersion};
use crate::dynamics::phi1;
use crate::{FdfError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Midpoint nodes per dimension of each window-pair integral.
pub const DEFAULT_INNER_NODES: usize = 128;

/// Trapezoid intervals per output region for the `H^s` integral.
pub const DEFAULT_OUTPUT_SAMPLES: usize = 256;

/// Outcome of [`illposed_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    /// Carrier frequency `N` of the window pair.
    pub carrier: f64,
    /// Window width.
    pub gamma: f64,
    /// Sobolev order the response is measured in.
    pub s: f64,
    /// Evaluation time.
    pub t: f64,
    /// Depth of the dispersion relation.
    pub delta: f64,
    /// `H^s` size of the cubic response.
    pub hs_value: f64,
}

/// Evaluates the cubic response at the default quadrature resolution.
pub fn illposed_probe(carrier: f64, gamma: f64, s: f64, t: f64, delta: f64) -> Result<ProbeResult> {
    illposed_probe_with_resolution(
        carrier,
        gamma,
        s,
        t,
        delta,
        DEFAULT_INNER_NODES,
        DEFAULT_OUTPUT_SAMPLES,
    )
}

/// [`illposed_probe`] with explicit quadrature resolution, for
/// sensitivity studies.
///
/// For each output frequency `xi` the cubic term's spectrum is a double
/// integral over the window assignments `(xi_1, xi_2, xi - xi_1 - xi_2)`
/// of `t * phi1(i t P)`, with `P` the resonance function of the three
/// inputs; near `+-N` three assignments contribute (two windows against
/// the opposite one), near `+-3N` one. The inner integral runs over the
/// exact interval the window constraints admit, so the integrand stays
/// smooth and midpoint quadrature converges cleanly. The `H^s` integral
/// is a trapezoid rule over each output region, and the mirror regions
/// at negative frequency enter through a factor of two.
pub fn illposed_probe_with_resolution(
    carrier: f64,
    gamma: f64,
    s: f64,
    t: f64,
    delta: f64,
    inner_nodes: usize,
    output_samples: usize,
) -> Result<ProbeResult> {
    validate(carrier, gamma, s, t, delta, inner_nodes, output_samples)?;
    let result = |hs_value| ProbeResult {
        carrier,
        gamma,
        s,
        t,
        delta,
        hs_value,
    };
    if t == 0.0 {
        return Ok(result(0.0));
    }

    let dispersion = Dispersion::Fdf { delta };
    let plus = (carrier, carrier + gamma);
    let minus = (-carrier - gamma, -carrier);
    let near_carrier = (
        carrier - gamma,
        carrier + 2.0 * gamma,
        vec![[plus, plus, minus], [plus, minus, plus], [minus, plus, plus]],
    );
    let near_triple = (3.0 * carrier, 3.0 * carrier + 3.0 * gamma, vec![[plus, plus, plus]]);

    let amp_cubed = (carrier.powf(-s) / gamma.sqrt()).powi(3);
    let prefactor = amp_cubed / (3.0 * (2.0 * PI).powi(2));
    let mut weighted_sq = 0.0_f64;
    for (lo, hi, combos) in [near_carrier, near_triple] {
        let step = (hi - lo) / output_samples as f64;
        for i in 0..=output_samples {
            let xi = lo + i as f64 * step;
            let mut inner = Complex64::new(0.0, 0.0);
            for windows in &combos {
                inner += window_pair_integral(xi, windows, t, dispersion, inner_nodes);
            }
            let f = prefactor * xi.abs() * inner.norm();
            let weight = if i == 0 || i == output_samples { 0.5 } else { 1.0 };
            weighted_sq += weight * step * (1.0 + xi * xi).powf(s) * f * f;
        }
    }
    Ok(result((weighted_sq / PI).sqrt()))
}

/// Integral of `t * phi1(i t P)` over one window assignment: `xi_1`
/// ranges over the first window, `xi_2` over the part of the second
/// window for which `xi - xi_1 - xi_2` lands in the third.
fn window_pair_integral(
    xi: f64,
    windows: &[(f64, f64); 3],
    t: f64,
    dispersion: Dispersion,
    nodes: usize,
) -> Complex64 {
    let [(a_lo, a_hi), (b_lo, b_hi), (c_lo, c_hi)] = *windows;
    let wa = (a_hi - a_lo) / nodes as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..nodes {
        let x1 = a_lo + (i as f64 + 0.5) * wa;
        let lo2 = b_lo.max(xi - x1 - c_hi);
        let hi2 = b_hi.min(xi - x1 - c_lo);
        if hi2 <= lo2 {
            continue;
        }
        let wb = (hi2 - lo2) / nodes as f64;
        let mut slice = Complex64::new(0.0, 0.0);
        for j in 0..nodes {
            let x2 = lo2 + (j as f64 + 0.5) * wb;
            let p = resonance(x1, x2, xi - x1 - x2, dispersion);
            slice += phi1(Complex64::new(0.0, t * p));
        }
        total += slice * (t * wa * wb);
    }
    total
}

fn validate(
    carrier: f64,
    gamma: f64,
    s: f64,
    t: f64,
    delta: f64,
    inner_nodes: usize,
    output_samples: usize,
) -> Result<()> {
    if !(carrier.is_finite() && carrier >= 64.0) {
        return Err(FdfError::InvalidArgument(format!(
            "carrier frequency {carrier} must be at least 64 for the windows to decouple"
        )));
    }
    if !(gamma.is_finite() && gamma > 0.0 && gamma <= carrier / 2.0) {
        return Err(FdfError::InvalidArgument(format!(
            "window width gamma = {gamma} must be positive and at most half the carrier"
        )));
    }
    if !(0.0 < s && s < 1.0) {
        return Err(FdfError::InvalidArgument(format!(
            "Sobolev order s = {s} must lie strictly between 0 and 1"
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "time t = {t} must be finite and non-negative"
        )));
    }
    if gamma * t > 0.1 {
        return Err(FdfError::InvalidArgument(format!(
            "gamma * t = {} exceeds 0.1, outside the short-time window regime",
            gamma * t
        )));
    }
    if !(delta.is_finite() && delta >= 1.0) {
        return Err(FdfError::InvalidArgument(format!(
            "depth delta = {delta} must be at least 1"
        )));
    }
    if inner_nodes < 8 || output_samples < 16 {
        return Err(FdfError::InvalidArgument(format!(
            "quadrature resolution {inner_nodes} x {output_samples} is too coarse to trust"
        )));
    }
    Ok(())
}
