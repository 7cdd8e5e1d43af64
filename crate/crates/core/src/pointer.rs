//! One-dimensional pointer apparatus on a periodic grid.
//!
//! Momentum is spectral: the discrete Fourier basis diagonalizes it with
//! wavenumbers `2 pi m / L` (Nyquist mode set to zero), so translation by
//! any real distance is an exact phase in frequency space.

use nalgebra::{DMatrix, DVector};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg::{DimensionSpec, Operator, StateVector, C64};

/// Number of Gaussian widths that must fit between the pointer centre and
/// the box edge.
pub const CONTAINMENT_SIGMAS: f64 = 6.0;
/// Largest continuum tail mass allowed outside the box for an initial
/// Gaussian.
pub const TAIL_LIMIT: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointerGrid {
    points: usize,
    length: f64,
    center: f64,
}

impl PointerGrid {
    pub fn new(points: usize, length: f64, center: f64) -> Result<Self> {
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {points} must be a power of two >= 8")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("L = {length} must be positive")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidGrid("centre must be finite".into()));
        }
        Ok(Self { points, length, center })
    }

    /// N = 256, L = 16: readout accuracy.
    pub fn fine() -> Self {
        Self::new(256, 16.0, 0.0).expect("valid default grid")
    }

    /// N = 16, L = 16: separability analyses.
    pub fn coarse() -> Self {
        Self::new(16, 16.0, 0.0).expect("valid default grid")
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn half_width(&self) -> f64 {
        self.length / 2.0
    }

    pub fn position(&self, k: usize) -> f64 {
        self.center - self.length / 2.0 + k as f64 * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.position(k)).collect()
    }

    /// Angular wavenumbers in FFT order; the Nyquist entry is zero.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points as i64;
        let dk = 2.0 * std::f64::consts::PI / self.length;
        (0..n)
            .map(|m| {
                if 2 * m < n {
                    m as f64 * dk
                } else if 2 * m == n {
                    0.0
                } else {
                    (m - n) as f64 * dk
                }
            })
            .collect()
    }

    /// Same grid with a different number of points.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(points, self.length, self.center)
    }
}

/// A labelled pointer: grid plus Gaussian initial state parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointerSpec {
    label: String,
    grid: PointerGrid,
    x0: f64,
    sigma: f64,
}

impl PointerSpec {
    pub fn new(label: impl Into<String>, grid: PointerGrid, x0: f64, sigma: f64) -> Result<Self> {
        let label = label.into();
        if !(sigma > 0.0 && sigma.is_finite()) || !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("pointer `{label}` needs sigma > 0 and finite x0")));
        }
        let spec = Self { label, grid, x0, sigma };
        spec.check_shift(0.0)?;
        Ok(spec)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &PointerGrid {
        &self.grid
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dims(&self) -> DimensionSpec {
        DimensionSpec::single(self.label.clone(), self.grid.points).expect("positive dimension")
    }

    pub fn with_grid(&self, grid: PointerGrid) -> Result<Self> {
        Self::new(self.label.clone(), grid, self.x0, self.sigma)
    }

    /// Half-width needed to contain the Gaussian after a total displacement
    /// of at most `reach` in either direction.
    pub fn required_half_width(&self, reach: f64) -> f64 {
        (self.x0 - self.grid.center).abs() + reach.abs() + CONTAINMENT_SIGMAS * self.sigma
    }

    /// Fails when the Gaussian displaced by `reach` would leave the box.
    pub fn check_shift(&self, reach: f64) -> Result<()> {
        let required = self.required_half_width(reach);
        let available = self.grid.half_width();
        if required.is_nan() || required > available {
            return Err(Error::Leakage { label: self.label.clone(), required, available });
        }
        Ok(())
    }

    /// Continuum probability of the initial Gaussian outside the box.
    pub fn tail_mass(&self) -> f64 {
        let lo = self.grid.center - self.grid.half_width();
        let hi = self.grid.center + self.grid.half_width();
        let s = std::f64::consts::SQRT_2 * self.sigma;
        0.5 * erfc((self.x0 - lo) / s) + 0.5 * erfc((hi - self.x0) / s)
    }
}

/// Continuum Gaussian `(2 pi sigma^2)^(-1/4) exp(-(x-x0)^2 / (4 sigma^2))`
/// sampled on the grid and multiplied by `sqrt(dx)`; unnormalized.
pub fn sampled_gaussian(grid: &PointerGrid, x0: f64, sigma: f64) -> DVector<f64> {
    let pref = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25) * grid.spacing().sqrt();
    DVector::from_iterator(
        grid.points,
        grid.positions().into_iter().map(|x| pref * (-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp()),
    )
}

/// Normalized Gaussian pointer state.
pub fn gaussian_state(spec: &PointerSpec) -> Result<StateVector> {
    let mass = spec.tail_mass();
    if mass > TAIL_LIMIT {
        return Err(Error::TailLeakage { mass, limit: TAIL_LIMIT });
    }
    let amps = sampled_gaussian(&spec.grid, spec.x0, spec.sigma).map(|v| C64::new(v, 0.0));
    StateVector::normalize(spec.dims(), amps)
}

pub fn position_operator(grid: &PointerGrid, label: &str) -> Result<Operator> {
    let diag = DVector::from_iterator(grid.points, grid.positions().into_iter().map(|x| C64::new(x, 0.0)));
    Operator::new(DimensionSpec::single(label, grid.points)?, DMatrix::from_diagonal(&diag))
}

/// Dense spectral momentum operator, built from explicit Fourier sums.
pub fn momentum_operator(grid: &PointerGrid, label: &str) -> Result<Operator> {
    let n = grid.points;
    let k = grid.wavenumbers();
    // P_{jl} = c[(j - l) mod n], c[d] = (1/n) sum_m k_m e^{2 pi i m d / n}
    let column: Vec<C64> = (0..n)
        .map(|d| {
            k.iter()
                .enumerate()
                .map(|(m, &km)| {
                    let angle = 2.0 * std::f64::consts::PI * ((m * d) % n) as f64 / n as f64;
                    C64::from_polar(km, angle)
                })
                .sum::<C64>()
                / n as f64
        })
        .collect();
    let m = DMatrix::from_fn(n, n, |j, l| column[(j + n - l) % n]);
    Operator::new(DimensionSpec::single(label, n)?, m)
}

/// In-place FFT along one axis of a row-major tensor.
pub(crate) fn fft_axis(data: &mut [C64], dims: &[usize], axis: usize, inverse: bool) {
    let n = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let scale = if inverse { 1.0 / n as f64 } else { 1.0 };
    if stride == 1 {
        fft.process(data);
        if inverse {
            data.iter_mut().for_each(|z| *z *= scale);
        }
        return;
    }
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for o in 0..outer {
        let base = o * n * stride;
        for inner in 0..stride {
            for (j, b) in buf.iter_mut().enumerate() {
                *b = data[base + inner + j * stride];
            }
            fft.process(&mut buf);
            for (j, b) in buf.iter().enumerate() {
                data[base + inner + j * stride] = *b * scale;
            }
        }
    }
}

/// Multiply the tensor (already in momentum space along `axis`) by
/// `f(k_m)` along that axis.
pub(crate) fn scale_axis(data: &mut [C64], dims: &[usize], axis: usize, factors: &[C64]) {
    let n = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    for (idx, z) in data.iter_mut().enumerate() {
        let m = (idx / stride) % n;
        *z *= factors[m];
    }
}

/// Translate each listed axis of a row-major tensor by its own distance.
pub(crate) fn translate_axes(data: &mut [C64], dims: &[usize], shifts: &[(usize, &PointerGrid, f64)]) {
    for &(axis, grid, a) in shifts {
        if a == 0.0 {
            continue;
        }
        fft_axis(data, dims, axis, false);
        let phases: Vec<C64> = grid.wavenumbers().iter().map(|&k| C64::from_polar(1.0, -k * a)).collect();
        scale_axis(data, dims, axis, &phases);
        fft_axis(data, dims, axis, true);
    }
}

/// Apply the spectral momentum operator along `axis`.
pub(crate) fn apply_momentum(data: &[C64], dims: &[usize], axis: usize, grid: &PointerGrid) -> Vec<C64> {
    let mut out = data.to_vec();
    fft_axis(&mut out, dims, axis, false);
    let k: Vec<C64> = grid.wavenumbers().iter().map(|&k| C64::new(k, 0.0)).collect();
    scale_axis(&mut out, dims, axis, &k);
    fft_axis(&mut out, dims, axis, true);
    out
}

/// Exact translation `exp(-i a pi)` of a pointer state by distance `a`.
pub fn translate(spec: &PointerSpec, state: &StateVector, a: f64) -> Result<StateVector> {
    if state.dims().dims() != vec![spec.grid.points] {
        return Err(Error::DimensionMismatch(format!(
            "pointer state on {:?} does not match a {}-point grid",
            state.dims().dims(),
            spec.grid.points
        )));
    }
    let required = (spec.x0 - spec.grid.center + a).abs() + CONTAINMENT_SIGMAS * spec.sigma;
    if required.is_nan() || required > spec.grid.half_width() {
        return Err(Error::Leakage { label: spec.label.clone(), required, available: spec.grid.half_width() });
    }
    let mut data: Vec<C64> = state.amplitudes().iter().copied().collect();
    translate_axes(&mut data, &[spec.grid.points], &[(0, &spec.grid, a)]);
    let amps = DVector::from_vec(data);
    Ok(if state.is_normalized() {
        StateVector::new(state.dims().clone(), amps)?
    } else {
        StateVector::unnormalized(state.dims().clone(), amps)
    })
}
