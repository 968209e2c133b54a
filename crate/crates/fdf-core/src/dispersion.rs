//! Dispersion relations of the equation family, their resonance function,
//! and samplers that verify the expected growth rates numerically.
//!
//! The finite-depth relation is
//!
//! ```text
//! omega_delta(xi) = (coth(2 pi delta xi) - 1/(2 pi delta xi)) xi^2,
//! ```
//!
//! an odd function interpolating between `delta * xi^3` behavior at small
//! `xi` (up to a factor 2 pi / 3) and `xi |xi|` at large `xi`. Its
//! deep-water limit is the Benjamin-Ono relation `xi |xi|`; the rescaled
//! variant `(3 / (2 pi delta)) omega_delta` tends to the Airy relation
//! `xi^3` in the shallow limit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::FdfError;
use crate::Result;

use std::f64::consts::PI;

/// Linear part of the equation. `delta` is the depth parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dispersion {
    /// Finite-depth symbol `(coth(2 pi delta xi) - 1/(2 pi delta xi)) xi^2`.
    Fdf { delta: f64 },
    /// The finite-depth symbol rescaled by `3 / (2 pi delta)`; its shallow
    /// limit is [`Dispersion::Airy`].
    Fdf2 { delta: f64 },
    /// Deep-water (Benjamin-Ono) symbol `xi |xi|`.
    Bo,
    /// Airy symbol `xi^3`.
    Airy,
}

impl Dispersion {
    /// The depth parameter, when the symbol has one.
    pub fn depth(self) -> Option<f64> {
        match self {
            Dispersion::Fdf { delta } | Dispersion::Fdf2 { delta } => Some(delta),
            Dispersion::Bo | Dispersion::Airy => None,
        }
    }
}

/// Sign of the nonlinear term `sign * u^k du/dx` on the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Defocusing,
    Focusing,
}

impl Sign {
    /// The factor multiplying `d/dx(u^(k+1))/(k+1)`.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
        }
    }
}

/// Full equation description: linear symbol, nonlinearity power, and sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationSpec {
    pub dispersion: Dispersion,
    pub k: u32,
    pub sign: Sign,
}

impl EquationSpec {
    pub fn new(dispersion: Dispersion, k: u32, sign: Sign) -> Result<Self> {
        if let Dispersion::Fdf { delta } | Dispersion::Fdf2 { delta } = dispersion {
            if !(delta.is_finite() && delta > 0.0) {
                return Err(FdfError::InvalidArgument(format!(
                    "depth parameter delta = {delta} must be finite and positive"
                )));
            }
        }
        if !(1..=4).contains(&k) {
            return Err(FdfError::InvalidArgument(format!(
                "nonlinearity power k = {k} is outside the supported range 1..=4"
            )));
        }
        Ok(EquationSpec { dispersion, k, sign })
    }

    /// The cubic defocusing finite-depth equation.
    pub fn fdf(delta: f64) -> Result<Self> {
        EquationSpec::new(Dispersion::Fdf { delta }, 2, Sign::Defocusing)
    }

    /// The cubic defocusing deep-water limit equation.
    pub fn bo() -> Self {
        EquationSpec {
            dispersion: Dispersion::Bo,
            k: 2,
            sign: Sign::Defocusing,
        }
    }
}

/// Below this value of `|2 pi delta xi|` the finite-depth symbol switches
/// to a truncated Taylor expansion; three terms give full precision there.
pub const SERIES_THRESHOLD: f64 = 1.0e-2;

/// `coth(x) - 1/x`, odd, with a series branch near 0.
fn coth_minus_inv(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_THRESHOLD {
        // x/3 - x^3/45 + 2 x^5/945; next term ~ x^7/4725 is below 1e-16
        // relative for |x| < 1e-2.
        let x2 = x * x;
        x * (1.0 / 3.0 - x2 / 45.0 + 2.0 * x2 * x2 / 945.0)
    } else {
        // coth(x) = 1 + 2 e^{-2x} / (1 - e^{-2x}) for x > 0, odd extension.
        let e = (-2.0 * ax).exp();
        let coth = 1.0 + 2.0 * e / (1.0 - e);
        (coth - 1.0 / ax) * x.signum()
    }
}

/// d/dx of `coth(x) - 1/x`: `1/x^2 - csch(x)^2`, even.
fn coth_minus_inv_d1(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 15.0 + 2.0 * x2 * x2 / 189.0
    } else {
        let e = (-ax).exp();
        let csch = 2.0 * e / (1.0 - e * e);
        1.0 / (x * x) - csch * csch
    }
}

/// Second derivative of `coth(x) - 1/x`: `-2/x^3 + 2 coth(x) csch(x)^2`, odd.
fn coth_minus_inv_d2(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_THRESHOLD {
        let x2 = x * x;
        x * (-2.0 / 15.0 + 8.0 * x2 / 189.0 - 2.0 * x2 * x2 / 225.0)
    } else {
        let e2 = (-2.0 * ax).exp();
        let coth = 1.0 + 2.0 * e2 / (1.0 - e2);
        let e = (-ax).exp();
        let csch = 2.0 * e / (1.0 - e * e);
        (-2.0 / (ax * ax * ax) + 2.0 * coth * csch * csch) * x.signum()
    }
}

/// Phase speed symbol `omega(xi)`; odd in `xi`, with `omega(0) = 0`.
pub fn omega(xi: f64, dispersion: Dispersion) -> f64 {
    match dispersion {
        Dispersion::Fdf { delta } => coth_minus_inv(2.0 * PI * delta * xi) * xi * xi,
        Dispersion::Fdf2 { delta } => {
            let c = 3.0 / (2.0 * PI * delta);
            c * coth_minus_inv(2.0 * PI * delta * xi) * xi * xi
        }
        Dispersion::Bo => xi * xi.abs(),
        Dispersion::Airy => xi * xi * xi,
    }
}

/// `omega` together with its first two derivatives in `xi`.
pub fn omega_derivatives(xi: f64, dispersion: Dispersion) -> (f64, f64, f64) {
    match dispersion {
        Dispersion::Fdf { delta } => {
            let a = 2.0 * PI * delta;
            let x = a * xi;
            let g = coth_minus_inv(x);
            let g1 = coth_minus_inv_d1(x);
            let g2 = coth_minus_inv_d2(x);
            (
                g * xi * xi,
                a * g1 * xi * xi + 2.0 * xi * g,
                a * a * g2 * xi * xi + 4.0 * a * g1 * xi + 2.0 * g,
            )
        }
        Dispersion::Fdf2 { delta } => {
            let c = 3.0 / (2.0 * PI * delta);
            let (w, w1, w2) = omega_derivatives(xi, Dispersion::Fdf { delta });
            (c * w, c * w1, c * w2)
        }
        Dispersion::Bo => (xi * xi.abs(), 2.0 * xi.abs(), 2.0 * if xi < 0.0 { -1.0 } else { 1.0 }),
        Dispersion::Airy => (xi * xi * xi, 3.0 * xi * xi, 6.0 * xi),
    }
}

/// The multiplier `i omega(xi)` driving `d uhat/dt = i omega uhat`; odd and
/// purely imaginary, so it preserves real fields.
pub fn linear_symbol(dispersion: Dispersion) -> impl Fn(f64) -> Complex64 {
    move |xi| Complex64::new(0.0, omega(xi, dispersion))
}

/// Four-wave resonance function
/// `omega(x1) + omega(x2) + omega(x3) - omega(x1 + x2 + x3)`;
/// symmetric under permutations of its three arguments.
pub fn resonance(x1: f64, x2: f64, x3: f64, dispersion: Dispersion) -> f64 {
    omega(x1, dispersion) + omega(x2, dispersion) + omega(x3, dispersion)
        - omega(x1 + x2 + x3, dispersion)
}

/// Which side of the depth scale a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `|xi| < 1/(2 delta)`: the symbol looks like `delta xi^3`.
    Low,
    /// `|xi| > 2/delta`: the symbol looks like `xi |xi|`.
    High,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::High => "high",
        }
    }
}

/// Which derivative of the symbol a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Omega,
    OmegaPrime,
    OmegaDoublePrime,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::Omega => "omega",
            Quantity::OmegaPrime => "omega_prime",
            Quantity::OmegaDoublePrime => "omega_double_prime",
        }
    }
}

/// Extremal ratios of `|quantity|` to its comparison function over the
/// sampled points of one regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub regime: Regime,
    pub quantity: Quantity,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub sample_count: usize,
}

impl RatioReport {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Samples the finite-depth symbol on a dyadic grid and reports the ratio
/// of `|omega|, |omega'|, |omega''|` to their regime comparison functions
/// `delta |xi|^3, delta xi^2, delta |xi|` (low) and `xi^2, |xi|, 1` (high).
///
/// Sampling covers `[xi_min, xi_max)` at `samples_per_octave` points per
/// octave, `xi = xi_min * 2^(i / spo)`; a guard band `[1/(2 delta), 2/delta]`
/// around the crossover is excluded from both regimes.
pub fn verify_dispersion_bounds(
    delta: f64,
    xi_min: f64,
    xi_max: f64,
    samples_per_octave: usize,
) -> Result<Vec<RatioReport>> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "delta = {delta} must be finite and positive"
        )));
    }
    if !(xi_min.is_finite() && xi_max.is_finite() && 0.0 < xi_min && xi_min < xi_max) {
        return Err(FdfError::InvalidArgument(format!(
            "empty or invalid dyadic range [{xi_min}, {xi_max})"
        )));
    }
    if samples_per_octave == 0 {
        return Err(FdfError::InvalidArgument(
            "samples_per_octave must be at least 1".into(),
        ));
    }
    let dispersion = Dispersion::Fdf { delta };
    let octaves = (xi_max / xi_min).log2();
    let count = (octaves * samples_per_octave as f64).ceil() as usize;
    if count == 0 {
        return Err(FdfError::InvalidArgument(
            "dyadic range contains no sample points".into(),
        ));
    }
    let log2_min = xi_min.log2();
    let spo = samples_per_octave as f64;

    struct Acc {
        min: f64,
        max: f64,
        count: usize,
    }
    let mut acc: Vec<Vec<Acc>> = (0..2)
        .map(|_| {
            (0..3)
                .map(|_| Acc {
                    min: f64::INFINITY,
                    max: f64::NEG_INFINITY,
                    count: 0,
                })
                .collect()
        })
        .collect();

    for i in 0..count {
        let xi = (log2_min + i as f64 / spo).exp2();
        if xi >= xi_max {
            break;
        }
        let regime = if xi < 1.0 / (2.0 * delta) {
            Regime::Low
        } else if xi > 2.0 / delta {
            Regime::High
        } else {
            continue; // guard band around the crossover
        };
        let (w, w1, w2) = omega_derivatives(xi, dispersion);
        let comparisons = match regime {
            Regime::Low => [delta * xi * xi * xi, delta * xi * xi, delta * xi],
            Regime::High => [xi * xi, xi, 1.0],
        };
        let values = [w.abs(), w1.abs(), w2.abs()];
        let r = match regime {
            Regime::Low => 0,
            Regime::High => 1,
        };
        for q in 0..3 {
            let ratio = values[q] / comparisons[q];
            let slot = &mut acc[r][q];
            slot.min = slot.min.min(ratio);
            slot.max = slot.max.max(ratio);
            slot.count += 1;
        }
    }

    let mut reports = Vec::new();
    for (r, regime) in [Regime::Low, Regime::High].into_iter().enumerate() {
        for (q, quantity) in [Quantity::Omega, Quantity::OmegaPrime, Quantity::OmegaDoublePrime]
            .into_iter()
            .enumerate()
        {
            let slot = &acc[r][q];
            if slot.count > 0 {
                reports.push(RatioReport {
                    regime,
                    quantity,
                    min_ratio: slot.min,
                    max_ratio: slot.max,
                    sample_count: slot.count,
                });
            }
        }
    }
    if reports.is_empty() {
        return Err(FdfError::EmptySample(
            "no sample point fell outside the crossover guard band".into(),
        ));
    }
    Ok(reports)
}

/// Constraints for drawing resonance triples `(x1, x2, x3)` with
/// `|x1| <= |x2| <= |x3|`, `|x1|` well separated below `|x3|`, a sum
/// comparable to `|x3|`, and `|x3|` large.
#[derive(Debug, Clone)]
pub struct ResonanceSampler {
    pub seed: u64,
    /// Number of admissible triples to draw.
    pub count: usize,
    /// Smallest admissible `|x3|`.
    pub xi3_min: f64,
    /// Largest magnitude drawn for `|x3|`.
    pub xi3_max: f64,
    /// Separation factor: `|x1| <= |x3| / separation`.
    pub separation: f64,
    /// Smallest magnitude drawn for `|x1|`.
    pub xi1_min: f64,
}

impl Default for ResonanceSampler {
    fn default() -> Self {
        ResonanceSampler {
            seed: 0,
            count: 10_000,
            xi3_min: 64.0,
            xi3_max: 4096.0,
            separation: 64.0,
            xi1_min: 1.0e-2,
        }
    }
}

impl ResonanceSampler {
    fn admissible(&self, x1: f64, x2: f64, x3: f64) -> bool {
        let (a1, a2, a3) = (x1.abs(), x2.abs(), x3.abs());
        let sum = (x1 + x2 + x3).abs();
        a1 <= a2
            && a2 <= a3
            && a1 <= a3 / self.separation
            && a3 >= self.xi3_min
            && sum >= a3 / 2.0
            && sum <= 2.0 * a3
    }

    /// Draws the configured number of admissible triples by rejection.
    pub fn draw(&self) -> Result<Vec<(f64, f64, f64)>> {
        if self.count == 0 {
            return Err(FdfError::EmptySample(
                "resonance sampler asked for zero triples".into(),
            ));
        }
        if !(self.xi3_min >= 1.0 && self.xi3_max > self.xi3_min && self.separation > 1.0) {
            return Err(FdfError::InvalidArgument(
                "resonance sampler needs xi3_min >= 1, xi3_max > xi3_min, separation > 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut triples = Vec::with_capacity(self.count);
        let max_attempts = self.count.saturating_mul(1000).max(100_000);
        let log3 = (self.xi3_min.ln(), self.xi3_max.ln());
        for _ in 0..max_attempts {
            if triples.len() == self.count {
                break;
            }
            let a3 = (rng.gen_range(log3.0..log3.1)).exp();
            let a1_max = a3 / self.separation;
            let a1 = (rng.gen_range(self.xi1_min.ln()..a1_max.ln())).exp();
            let a2 = rng.gen_range(a1..a3);
            let x1 = if rng.gen::<bool>() { a1 } else { -a1 };
            let x2 = if rng.gen::<bool>() { a2 } else { -a2 };
            let x3 = if rng.gen::<bool>() { a3 } else { -a3 };
            if self.admissible(x1, x2, x3) {
                triples.push((x1, x2, x3));
            }
        }
        if triples.len() < self.count {
            return Err(FdfError::EmptySample(format!(
                "resonance sampler produced only {} of {} admissible triples",
                triples.len(),
                self.count
            )));
        }
        Ok(triples)
    }
}

/// Draws admissible triples and reports the extremal ratios of
/// `|resonance| / (|x1 + x2| * |x3|)`, the modulation scale of the
/// dominant four-wave interactions.
pub fn verify_resonance_bounds(delta: f64, sampler: &ResonanceSampler) -> Result<RatioReport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "delta = {delta} must be finite and positive"
        )));
    }
    let dispersion = Dispersion::Fdf { delta };
    let triples = sampler.draw()?;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    for &(x1, x2, x3) in &triples {
        let gap = (x1 + x2).abs();
        if gap == 0.0 {
            continue; // measure-zero configuration; the ratio is a limit there
        }
        let ratio = resonance(x1, x2, x3, dispersion).abs() / (gap * x3.abs());
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    if !min_ratio.is_finite() {
        return Err(FdfError::EmptySample(
            "no triple with |x1 + x2| > 0 was drawn".into(),
        ));
    }
    Ok(RatioReport {
        regime: Regime::High,
        quantity: Quantity::Omega,
        min_ratio,
        max_ratio,
        sample_count: triples.len(),
    })
}
