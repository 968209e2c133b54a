//! Initial-data library: smooth bumps, seeded band-limited noise, and the
//! paired spectral windows used by the frequency-localized experiments.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{inverse, Field, SpectralGrid, Spectrum};
use crate::{FdfError, Result};

/// A parsed initial-data descriptor, ready to be realized on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Gaussian { amplitude: f64, sigma: f64 },
    Sech { amplitude: f64, width: f64 },
    Bandlimited { amplitude: f64, jmax: usize },
    /// Real field whose coefficients are constant on the frequency bands
    /// `[carrier, carrier + gamma]` and its mirror, with the height
    /// `carrier^(-s) gamma^(-1/2)` tied to the Sobolev index `s`.
    PhiN { carrier: f64, gamma: f64, s: f64 },
}

impl InitialData {
    /// Realizes the descriptor on `grid`; `seed` feeds the band-limited
    /// generator and is ignored by the deterministic shapes.
    pub fn build(&self, grid: &SpectralGrid, seed: u64) -> Result<Field> {
        match *self {
            InitialData::Gaussian { amplitude, sigma } => gaussian(grid, amplitude, sigma),
            InitialData::Sech { amplitude, width } => sech(grid, amplitude, width),
            InitialData::Bandlimited { amplitude, jmax } => {
                bandlimited(grid, seed, jmax, amplitude)
            }
            InitialData::PhiN { carrier, gamma, s } => {
                if !s.is_finite() {
                    return Err(FdfError::InvalidArgument(format!(
                        "window exponent s = {s} must be finite"
                    )));
                }
                if !(carrier > 0.0 && gamma > 0.0) {
                    return Err(FdfError::InvalidArgument(format!(
                        "window bands need positive carrier and width, got \
                         carrier = {carrier}, gamma = {gamma}"
                    )));
                }
                spectral_window_pair(grid, carrier, gamma, carrier.powf(-s) / gamma.sqrt())
            }
        }
    }
}

fn check_shape_params(amplitude: f64, scale: f64, scale_name: &str) -> Result<()> {
    if !amplitude.is_finite() {
        return Err(FdfError::InvalidArgument(format!(
            "amplitude = {amplitude} must be finite"
        )));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "{scale_name} = {scale} must be finite and positive"
        )));
    }
    Ok(())
}

/// `amplitude * exp(-x^2 / sigma^2)` sampled on the grid.
pub fn gaussian(grid: &SpectralGrid, amplitude: f64, sigma: f64) -> Result<Field> {
    check_shape_params(amplitude, sigma, "sigma")?;
    Field::from_fn(grid.clone(), |x| {
        amplitude * (-x * x / (sigma * sigma)).exp()
    })
}

/// `amplitude * sech(x / width)` sampled on the grid.
pub fn sech(grid: &SpectralGrid, amplitude: f64, width: f64) -> Result<Field> {
    check_shape_params(amplitude, width, "width")?;
    Field::from_fn(grid.clone(), |x| amplitude / (x / width).cosh())
}

/// Random real field with Hermitian coefficients on modes `1..=jmax`
/// (mirrored below zero), zero mean, rescaled so `max|u| = amplitude`.
/// The same seed always produces the same field.
pub fn bandlimited(grid: &SpectralGrid, seed: u64, jmax: usize, amplitude: f64) -> Result<Field> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "amplitude = {amplitude} must be finite and non-negative"
        )));
    }
    let n = grid.n();
    if jmax == 0 || jmax >= n / 2 {
        return Err(FdfError::InvalidArgument(format!(
            "jmax = {jmax} must lie in 1..{} to stay below the Nyquist mode",
            n / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for j in 1..=jmax {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        coeffs[j] = c;
        coeffs[n - j] = c.conj();
    }
    let raw = inverse(&Spectrum::new(grid.clone(), coeffs)?);
    let peak = raw.max_abs();
    let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
    Field::new(
        grid.clone(),
        raw.values().iter().map(|&v| scale * v).collect(),
    )
}

/// Real field whose coefficients equal `coeff / L` exactly on the grid
/// frequencies with `|xi| in [center, center + width]` and vanish
/// elsewhere — the periodization of a function whose transform is `coeff`
/// on that band pair.
pub fn spectral_window_pair(
    grid: &SpectralGrid,
    center: f64,
    width: f64,
    coeff: f64,
) -> Result<Field> {
    if !(center.is_finite() && center > 0.0) || !(width.is_finite() && width > 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "frequency window needs positive center and width, got \
             center = {center}, width = {width}"
        )));
    }
    if !coeff.is_finite() {
        return Err(FdfError::InvalidArgument(format!(
            "window coefficient = {coeff} must be finite"
        )));
    }
    let nyquist = std::f64::consts::PI * grid.n() as f64 / grid.length();
    if center + width >= nyquist {
        return Err(FdfError::InvalidArgument(format!(
            "frequency window [{center}, {}] reaches the Nyquist frequency {nyquist}; \
             use a finer grid",
            center + width
        )));
    }
    let value = Complex64::new(coeff / grid.length(), 0.0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n()];
    let mut hit = 0usize;
    for (i, &xi) in grid.wavenumbers().iter().enumerate() {
        if (center..=center + width).contains(&xi.abs()) {
            coeffs[i] = value;
            hit += 1;
        }
    }
    if hit == 0 {
        return Err(FdfError::InvalidArgument(format!(
            "frequency window [{center}, {}] contains no grid frequencies \
             (spacing {})",
            center + width,
            2.0 * std::f64::consts::PI / grid.length()
        )));
    }
    Ok(inverse(&Spectrum::new(grid.clone(), coeffs)?))
}
