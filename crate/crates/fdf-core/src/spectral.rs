//! Periodic spectral grids, Fourier transforms, and dealiased products.
//!
//! A field on the grid is expanded as
//!
//! ```text
//! u(x) = sum_j uhat_j exp(i xi_j x),    xi_j = 2 pi j / L,
//! ```
//!
//! with modes j in {-n/2+1, ..., n/2} stored in the usual transform order
//! (0, 1, ..., n/2, -n/2+1, ..., -1). Grid points are x_j = j L / n - L/2,
//! so the box is centered on the origin; the half-box offset shows up as an
//! alternating-sign phase relative to the raw DFT.

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::FdfError;
use crate::Result;

/// Smallest supported grid size.
pub const MIN_GRID_SIZE: usize = 8;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

struct GridInner {
    n: usize,
    length: f64,
    points: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// A uniform periodic grid of `n` points on a box of the given length,
/// together with cached transform plans. Cloning is cheap.
#[derive(Clone)]
pub struct SpectralGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.length == other.inner.length
    }
}

impl SpectralGrid {
    /// Builds a grid with an even number of points `n >= 8` on a box of
    /// positive length.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < MIN_GRID_SIZE {
            return Err(FdfError::InvalidGrid(format!(
                "grid size {n} is below the minimum of {MIN_GRID_SIZE}"
            )));
        }
        if !n.is_multiple_of(2) {
            return Err(FdfError::InvalidGrid(format!(
                "grid size {n} must be even"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(FdfError::InvalidGrid(format!(
                "box length {length} must be finite and positive"
            )));
        }
        let points = (0..n)
            .map(|j| j as f64 * length / n as f64 - length / 2.0)
            .collect();
        let wavenumbers = (0..n)
            .map(|i| {
                let j = if i <= n / 2 { i as i64 } else { i as i64 - n as i64 };
                2.0 * std::f64::consts::PI * j as f64 / length
            })
            .collect();
        let (forward, inverse) = {
            let mut planner = planner().lock().expect("fft planner poisoned");
            (
                planner.plan_fft_forward(n),
                planner.plan_fft_inverse(n),
            )
        };
        Ok(SpectralGrid {
            inner: Arc::new(GridInner {
                n,
                length,
                points,
                wavenumbers,
                forward,
                inverse,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    /// Grid spacing `L / n`.
    pub fn dx(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    /// Physical coordinates `x_j = j L / n - L / 2`.
    pub fn points(&self) -> &[f64] {
        &self.inner.points
    }

    /// Wavenumbers `2 pi j / L` in transform order; index `n/2` holds the
    /// (positive) Nyquist frequency.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// Storage index of the Nyquist mode.
    pub fn nyquist_index(&self) -> usize {
        self.inner.n / 2
    }

    /// Signed mode number at storage index `i`.
    pub fn mode_number(&self, i: usize) -> i64 {
        let n = self.inner.n;
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Grid with the same box length and `factor * n` points, used for
    /// padded (dealiased) products.
    pub fn padded(&self, factor: usize) -> Result<SpectralGrid> {
        SpectralGrid::new(self.inner.n * factor, self.inner.length)
    }
}

/// Real point values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    values: Vec<f64>,
}

impl Field {
    /// Wraps point values, requiring one finite value per grid point.
    pub fn new(grid: SpectralGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(FdfError::InvalidArgument(format!(
                "field has {} values but the grid has {} points",
                values.len(),
                grid.n()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FdfError::NonFinite(format!(
                "field value at index {i} is not finite"
            )));
        }
        Ok(Field { grid, values })
    }

    /// Builds a field by sampling `f` at the grid points.
    pub fn from_fn(grid: SpectralGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Field::new(grid, values)
    }

    /// All-zero field.
    pub fn zeros(grid: SpectralGrid) -> Self {
        let values = vec![0.0; grid.n()];
        Field { grid, values }
    }

    pub(crate) fn from_values_unchecked(grid: SpectralGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Field { grid, values }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Fourier coefficients on a grid, in transform order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(FdfError::InvalidArgument(format!(
                "spectrum has {} coefficients but the grid has {} modes",
                coeffs.len(),
                grid.n()
            )));
        }
        Ok(Spectrum { grid, coeffs })
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); grid.n()];
        Spectrum { grid, coeffs }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Sum of |uhat_j|^2; `L * l2_sum()` is the squared L2 norm.
    pub fn l2_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Zeroes the (unpaired) Nyquist coefficient.
    pub fn zero_nyquist(&mut self) {
        let i = self.grid.nyquist_index();
        self.coeffs[i] = Complex64::new(0.0, 0.0);
    }

    /// Largest deviation from Hermitian symmetry, `max_j |uhat_-j - conj(uhat_j)|`,
    /// including the imaginary parts of the self-paired modes 0 and n/2.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut defect: f64 = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for i in 1..n / 2 {
            let d = (self.coeffs[n - i] - self.coeffs[i].conj()).norm();
            defect = defect.max(d);
        }
        defect
    }
}

/// Forward transform: point values to Fourier coefficients.
///
/// The half-box offset of the grid points is absorbed into an alternating
/// sign so that the coefficients refer to `exp(i xi_j x)` with `x` the
/// physical coordinate.
pub fn transform(field: &Field) -> Spectrum {
    let grid = field.grid().clone();
    let n = grid.n();
    let mut buf: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    grid.inner.forward.process(&mut buf);
    let scale = 1.0 / n as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        let sign = if i % 2 == 0 { scale } else { -scale };
        *c *= sign;
    }
    Spectrum { grid, coeffs: buf }
}

/// Inverse transform: Fourier coefficients to point values.
///
/// The imaginary residue of the complex inverse FFT is discarded; for
/// Hermitian-symmetric input it is at the rounding level.
pub fn inverse(spectrum: &Spectrum) -> Field {
    let (values, _) = inverse_with_residue(spectrum);
    Field::from_values_unchecked(spectrum.grid().clone(), values)
}

/// Inverse transform returning the discarded imaginary residue
/// `max_j |Im u(x_j)|`, used by reality-preservation tests.
pub fn inverse_with_residue(spectrum: &Spectrum) -> (Vec<f64>, f64) {
    let grid = spectrum.grid();
    let mut buf: Vec<Complex64> = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c } else { -c })
        .collect();
    grid.inner.inverse.process(&mut buf);
    let mut residue: f64 = 0.0;
    let values = buf
        .iter()
        .map(|c| {
            residue = residue.max(c.im.abs());
            c.re
        })
        .collect();
    (values, residue)
}

/// Applies a Fourier multiplier `m(xi)` coefficient-wise.
///
/// The Nyquist mode has no negative-frequency partner on an even grid, so
/// only the real (even) part of the symbol acts there; the odd-imaginary
/// part of a symbol maps the Nyquist cosine to a sine that vanishes at
/// every grid point. This keeps real-symmetric input real-symmetric for any
/// symbol with `m(-xi) = conj(m(xi))`.
pub fn apply_multiplier(
    spectrum: &Spectrum,
    m: impl Fn(f64) -> Complex64,
) -> Result<Spectrum> {
    let grid = spectrum.grid().clone();
    let nyq = grid.nyquist_index();
    let mut coeffs = Vec::with_capacity(grid.n());
    for (i, (&xi, &c)) in grid
        .wavenumbers()
        .iter()
        .zip(spectrum.coeffs())
        .enumerate()
    {
        let mut mv = m(xi);
        if !(mv.re.is_finite() && mv.im.is_finite()) {
            return Err(FdfError::NonFinite(format!(
                "multiplier is not finite at xi = {xi:.6e}"
            )));
        }
        if i == nyq {
            mv = Complex64::new(mv.re, 0.0);
        }
        coeffs.push(mv * c);
    }
    Ok(Spectrum { grid, coeffs })
}

/// Padding factor that makes the pseudospectral evaluation of `f^(k+1)`
/// alias-free: a product of `k+2` half-bands must fit in the padded band.
pub fn dealias_pad_factor(k: u32) -> usize {
    ((k as usize) + 3) / 2
}

/// Embeds a spectrum into a larger grid with the same box length, splitting
/// the Nyquist coefficient evenly between its two images.
pub fn embed(spectrum: &Spectrum, big: &SpectralGrid) -> Result<Spectrum> {
    let small = spectrum.grid();
    if big.length() != small.length() || big.n() < small.n() {
        return Err(FdfError::InvalidArgument(
            "embedding target must share the box length and be at least as fine".into(),
        ));
    }
    if big.n() == small.n() {
        return Ok(spectrum.clone());
    }
    let n = small.n();
    let m = big.n();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..n {
        let j = small.mode_number(i);
        let c = spectrum.coeffs()[i];
        if i == n / 2 {
            // The small grid's Nyquist cosine splits into exp(+-i xi x)/2.
            coeffs[n / 2] += 0.5 * c;
            coeffs[m - n / 2] += 0.5 * c;
        } else {
            let idx = if j >= 0 { j as usize } else { (m as i64 + j) as usize };
            coeffs[idx] = c;
        }
    }
    Ok(Spectrum {
        grid: big.clone(),
        coeffs,
    })
}

/// Projects a spectrum onto a coarser grid with the same box length by
/// dropping modes beyond the target band; the target's Nyquist mode
/// collects both images, matching pointwise sampling on the coarse grid.
pub fn truncate(spectrum: &Spectrum, small: &SpectralGrid) -> Result<Spectrum> {
    let big = spectrum.grid();
    if big.length() != small.length() || big.n() < small.n() {
        return Err(FdfError::InvalidArgument(
            "truncation target must share the box length and be at most as fine".into(),
        ));
    }
    if big.n() == small.n() {
        return Ok(spectrum.clone());
    }
    let n = small.n();
    let m = big.n();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in coeffs.iter_mut().enumerate() {
        if i == n / 2 {
            *c = spectrum.coeffs()[n / 2] + spectrum.coeffs()[m - n / 2];
        } else {
            let j = small.mode_number(i);
            let idx = if j >= 0 { j as usize } else { (m as i64 + j) as usize };
            *c = spectrum.coeffs()[idx];
        }
    }
    Ok(Spectrum {
        grid: small.clone(),
        coeffs,
    })
}

/// Computes `d/dx (f^(k+1)) / (k+1)` with exact dealiasing.
///
/// The field is zero-padded in Fourier space, raised to the power on the
/// fine grid, transformed back, truncated, and differentiated; the result
/// equals the band-limited projection of the analytic product up to
/// rounding. Supported powers are `k` in 1..=4.
pub fn dealiased_power_derivative(field: &Field, k: u32) -> Result<Field> {
    let spectrum = transform(field);
    let out = dealiased_power_derivative_spec(&spectrum, k)?;
    Ok(inverse(&out))
}

/// Spectrum-to-spectrum form of [`dealiased_power_derivative`]; this is the
/// shape the time stepper consumes.
pub fn dealiased_power_derivative_spec(spectrum: &Spectrum, k: u32) -> Result<Spectrum> {
    if !(1..=4).contains(&k) {
        return Err(FdfError::InvalidArgument(format!(
            "nonlinearity power k = {k} is outside the supported range 1..=4"
        )));
    }
    let grid = spectrum.grid();
    let big = grid.padded(dealias_pad_factor(k))?;
    let padded = embed(spectrum, &big)?;
    let (values, _) = inverse_with_residue(&padded);
    let powered: Vec<f64> = values.iter().map(|&v| v.powi(k as i32 + 1)).collect();
    let powered_spec = transform(&Field::from_values_unchecked(big, powered));
    let truncated = truncate(&powered_spec, grid)?;
    let scale = 1.0 / (k as f64 + 1.0);
    let mut out = apply_multiplier(&truncated, |xi| Complex64::new(0.0, xi * scale))?;
    out.zero_nyquist();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &SpectralGrid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Field::new(grid.clone(), values).unwrap()
    }

    /// Random real field with no Nyquist content, via a Hermitian spectrum.
    fn random_bandlimited(grid: &SpectralGrid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = grid.n();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for i in 1..n / 2 {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            coeffs[i] = c;
            coeffs[n - i] = c.conj();
        }
        let spec = Spectrum::new(grid.clone(), coeffs).unwrap();
        inverse(&spec)
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(SpectralGrid::new(6, 1.0).is_err());
        assert!(SpectralGrid::new(9, 1.0).is_err());
        assert!(SpectralGrid::new(16, 0.0).is_err());
        assert!(SpectralGrid::new(16, -2.0).is_err());
        assert!(SpectralGrid::new(16, f64::NAN).is_err());
        assert!(SpectralGrid::new(8, 1.0).is_ok());
    }

    #[test]
    fn grid_layout_matches_convention() {
        let grid = SpectralGrid::new(8, 2.0 * PI).unwrap();
        let expected: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0, 4.0, -3.0, -2.0, -1.0];
        for (w, e) in grid.wavenumbers().iter().zip(&expected) {
            assert!((w - e).abs() < 1e-15, "wavenumbers {:?}", grid.wavenumbers());
        }
        assert_eq!(grid.nyquist_index(), 4);
        assert!((grid.points()[0] + PI).abs() < 1e-15);
        assert!((grid.points()[4]).abs() < 1e-15);
        assert!((grid.dx() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn wavenumber_spacing_scales_with_length() {
        let grid = SpectralGrid::new(8, PI).unwrap();
        assert!((grid.wavenumbers()[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_transforms_to_half_weight_modes() {
        let grid = SpectralGrid::new(8, 2.0 * PI).unwrap();
        let field = Field::from_fn(grid, |x| x.cos()).unwrap();
        let spec = transform(&field);
        for (i, c) in spec.coeffs().iter().enumerate() {
            let expected = if i == 1 || i == 7 { 0.5 } else { 0.0 };
            assert!(
                (c - Complex64::new(expected, 0.0)).norm() < 1e-12,
                "mode {i}: {c}"
            );
        }
    }

    #[test]
    fn constant_field_lives_in_mode_zero() {
        let grid = SpectralGrid::new(16, 5.0).unwrap();
        let field = Field::from_fn(grid, |_| 3.25).unwrap();
        let spec = transform(&field);
        assert!((spec.coeffs()[0] - Complex64::new(3.25, 0.0)).norm() < 1e-13);
        for c in &spec.coeffs()[1..] {
            assert!(c.norm() < 1e-13);
        }
    }

    #[test]
    fn field_rejects_non_finite_values() {
        let grid = SpectralGrid::new(8, 1.0).unwrap();
        let mut values = vec![0.0; 8];
        values[3] = f64::NAN;
        assert!(matches!(
            Field::new(grid, values),
            Err(FdfError::NonFinite(_))
        ));
    }

    #[test]
    fn roundtrip_recovers_values() {
        let grid = SpectralGrid::new(64, 3.0).unwrap();
        let field = random_field(&grid, 1);
        let back = inverse(&transform(&field));
        let scale = field.max_abs();
        for (a, b) in field.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn transform_of_real_field_is_hermitian() {
        let grid = SpectralGrid::new(32, 7.0).unwrap();
        let spec = transform(&random_field(&grid, 2));
        assert!(spec.hermitian_defect() < 1e-14);
    }

    #[test]
    fn plancherel_identity_holds() {
        let grid = SpectralGrid::new(48, 11.0).unwrap();
        let field = random_field(&grid, 3);
        let spec = transform(&field);
        let quadrature: f64 =
            field.values().iter().map(|v| v * v).sum::<f64>() * grid.dx();
        let spectral = grid.length() * spec.l2_sum();
        assert!((quadrature - spectral).abs() <= 1e-12 * quadrature.max(1.0));
    }

    #[test]
    fn derivative_multiplier_rotates_cosine() {
        let grid = SpectralGrid::new(32, 2.0 * PI).unwrap();
        let field = Field::from_fn(grid.clone(), |x| (2.0 * x).cos()).unwrap();
        let spec = transform(&field);
        let deriv = apply_multiplier(&spec, |xi| Complex64::new(0.0, xi)).unwrap();
        let out = inverse(&deriv);
        for (&x, &v) in grid.points().iter().zip(out.values()) {
            assert!((v + 2.0 * (2.0 * x).sin()).abs() < 1e-12, "x = {x}, v = {v}");
        }
    }

    #[test]
    fn hilbert_symbol_maps_cosine_to_sine() {
        // -i sgn(xi) sends cos(x) to sin(x).
        let grid = SpectralGrid::new(32, 2.0 * PI).unwrap();
        let field = Field::from_fn(grid.clone(), |x| x.cos()).unwrap();
        let spec = transform(&field);
        let h = apply_multiplier(&spec, |xi| Complex64::new(0.0, -xi.signum())).unwrap();
        let out = inverse(&h);
        for (&x, &v) in grid.points().iter().zip(out.values()) {
            assert!((v - x.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_symbol_kills_nyquist_and_preserves_reality() {
        let grid = SpectralGrid::new(16, 2.0 * PI).unwrap();
        // Pure Nyquist cosine: values alternate in sign.
        let field = Field::from_fn(grid.clone(), |x| (8.0 * x).cos()).unwrap();
        let spec = transform(&field);
        assert!((spec.coeffs()[8] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let deriv = apply_multiplier(&spec, |xi| Complex64::new(0.0, xi)).unwrap();
        assert!(deriv.coeffs()[8].norm() < 1e-14);
        let (_, residue) = inverse_with_residue(&deriv);
        assert!(residue < 1e-13);
    }

    #[test]
    fn multiplier_rejects_non_finite_symbols() {
        let grid = SpectralGrid::new(8, 1.0).unwrap();
        let spec = transform(&random_field(&grid, 4));
        let res = apply_multiplier(&spec, |xi| Complex64::new(1.0 / xi, 0.0));
        assert!(matches!(res, Err(FdfError::NonFinite(_))));
    }

    #[test]
    fn pad_factors_cover_supported_powers() {
        assert_eq!(dealias_pad_factor(1), 2);
        assert_eq!(dealias_pad_factor(2), 2);
        assert_eq!(dealias_pad_factor(3), 3);
        assert_eq!(dealias_pad_factor(4), 3);
    }

    #[test]
    fn embed_truncate_roundtrip_is_identity() {
        let grid = SpectralGrid::new(32, 4.0).unwrap();
        let big = grid.padded(2).unwrap();
        let spec = transform(&random_field(&grid, 5));
        let back = truncate(&embed(&spec, &big).unwrap(), &grid).unwrap();
        for (a, b) in spec.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn cubic_derivative_of_cosine_matches_identity() {
        // d/dx (cos^3 x) / 3 = -(sin x + sin 3x) / 4.
        let grid = SpectralGrid::new(32, 2.0 * PI).unwrap();
        let field = Field::from_fn(grid.clone(), |x| x.cos()).unwrap();
        let out = dealiased_power_derivative(&field, 2).unwrap();
        for (&x, &v) in grid.points().iter().zip(out.values()) {
            let expected = -(x.sin() + (3.0 * x).sin()) / 4.0;
            assert!((v - expected).abs() < 1e-12, "x = {x}: {v} vs {expected}");
        }
    }

    #[test]
    fn power_derivative_of_constant_vanishes() {
        let grid = SpectralGrid::new(16, 3.0).unwrap();
        let field = Field::from_fn(grid, |_| 0.7).unwrap();
        for k in 1..=4 {
            let out = dealiased_power_derivative(&field, k).unwrap();
            assert!(out.max_abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn power_derivative_rejects_unsupported_k() {
        let grid = SpectralGrid::new(16, 1.0).unwrap();
        let field = Field::zeros(grid);
        assert!(dealiased_power_derivative(&field, 0).is_err());
        assert!(dealiased_power_derivative(&field, 5).is_err());
    }

    /// Direct mode-space convolution of `k+1` copies of the spectrum,
    /// keeping only true integer mode sums (no aliasing by construction),
    /// followed by the derivative and normalization.
    fn convolution_oracle(spec: &Spectrum, k: u32) -> Vec<Complex64> {
        let grid = spec.grid();
        let n = grid.n() as i64;
        let half = n / 2;
        let modes: Vec<i64> = (0..grid.n()).map(|i| grid.mode_number(i)).collect();
        // product[j] = coefficient of mode j in f^(k+1), indexed by j + offset.
        let width = (k as i64 + 1) * half;
        let offset = width;
        let mut product = vec![Complex64::new(0.0, 0.0); (2 * width + 1) as usize];
        product[offset as usize] = Complex64::new(1.0, 0.0);
        for _ in 0..=k {
            let mut next = vec![Complex64::new(0.0, 0.0); product.len()];
            for (p, &c) in product.iter().enumerate() {
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                for (i, &j) in modes.iter().enumerate() {
                    let q = p as i64 + j;
                    if (0..product.len() as i64).contains(&q) {
                        next[q as usize] += c * spec.coeffs()[i];
                    }
                }
            }
            product = next;
        }
        let scale = 1.0 / (k as f64 + 1.0);
        (0..grid.n())
            .map(|i| {
                let j = modes[i];
                if i == grid.nyquist_index() {
                    return Complex64::new(0.0, 0.0);
                }
                let xi = grid.wavenumbers()[i];
                let c = product[(j + offset) as usize];
                Complex64::new(0.0, xi * scale) * c
            })
            .collect()
    }

    #[test]
    fn cubic_dealiasing_matches_convolution_oracle() {
        let grid = SpectralGrid::new(32, 5.0).unwrap();
        for seed in 0..5 {
            let field = random_bandlimited(&grid, seed);
            let spec = transform(&field);
            let fast = dealiased_power_derivative_spec(&spec, 2).unwrap();
            let oracle = convolution_oracle(&spec, 2);
            let scale = field.max_abs().powi(3).max(1e-300);
            for (i, (a, b)) in fast.coeffs().iter().zip(&oracle).enumerate() {
                assert!(
                    (a - b).norm() <= 1e-12 * scale,
                    "seed {seed}, mode {i}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn all_powers_match_convolution_oracle_on_restricted_band() {
        // Inputs supported on |j| <= n/(k+2) stress every supported power.
        let grid = SpectralGrid::new(24, 2.0).unwrap();
        for k in 1..=4u32 {
            let jmax = grid.n() / (k as usize + 2);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
            let n = grid.n();
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
            for j in 1..=jmax {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                coeffs[j] = c;
                coeffs[n - j] = c.conj();
            }
            let spec = Spectrum::new(grid.clone(), coeffs).unwrap();
            let fast = dealiased_power_derivative_spec(&spec, k).unwrap();
            let oracle = convolution_oracle(&spec, k);
            for (i, (a, b)) in fast.coeffs().iter().zip(&oracle).enumerate() {
                assert!(
                    (a - b).norm() <= 1e-11,
                    "k = {k}, mode {i}: {a} vs {b}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_roundtrip_and_plancherel(
            seed in 0u64..1000,
            n_idx in 0usize..4,
            length in 0.5f64..50.0,
        ) {
            let n = [8, 16, 32, 48][n_idx];
            let grid = SpectralGrid::new(n, length).unwrap();
            let field = random_field(&grid, seed);
            let spec = transform(&field);
            let back = inverse(&spec);
            let scale = field.max_abs().max(1e-9);
            for (a, b) in field.values().iter().zip(back.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
            let quadrature: f64 =
                field.values().iter().map(|v| v * v).sum::<f64>() * grid.dx();
            let spectral = grid.length() * spec.l2_sum();
            prop_assert!((quadrature - spectral).abs() <= 1e-12 * quadrature.max(1.0));
        }

        #[test]
        fn prop_odd_imaginary_symbols_preserve_reality(
            seed in 0u64..1000,
            amp in 0.1f64..5.0,
        ) {
            let grid = SpectralGrid::new(32, 2.0 * PI).unwrap();
            let field = random_field(&grid, seed);
            let spec = transform(&field);
            // f64::signum(0.0) is 1.0, so spell out an actual odd sign.
            let sgn = |xi: f64| if xi == 0.0 { 0.0 } else { xi.signum() };
            let out = apply_multiplier(&spec, |xi| {
                Complex64::new(0.0, amp * xi + sgn(xi))
            }).unwrap();
            let (_, residue) = inverse_with_residue(&out);
            prop_assert!(residue <= 1e-12 * field.max_abs().max(1e-9) * amp.max(1.0) * 40.0);
        }
    }
}

