//! Uniform time grids and the sampled series that live on them.
//!
//! All fields are stored as baseband analytic signals: the carrier factor
//! `exp(-i w0 t)` is dropped and the carrier frequency kept as metadata.
//! Intensities and every correlation computed here are unchanged by that
//! convention.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform sampling grid `t_k = start + k * step`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::invalid("start", format!("{start} is not finite")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::invalid("step", format!("{step} must be positive")));
        }
        if count < 2 {
            return Err(Error::invalid("count", format!("{count} must be >= 2")));
        }
        Ok(TimeGrid { start, step, count })
    }

    /// Grid of `round(span / step)` points centered on `t = 0`.
    pub fn centered(span: f64, step: f64) -> Result<Self> {
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::invalid("span", format!("{span} must be positive")));
        }
        let count = (span / step).round() as usize;
        TimeGrid::new(-span / 2.0, step, count)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Total window length `step * count`.
    pub fn window(&self) -> f64 {
        self.step * self.count as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.time(k))
    }

    pub(crate) fn ensure_matches(&self, other: &TimeGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: format!("{self:?}"),
                right: format!("{other:?}"),
            })
        }
    }
}

/// A complex baseband field sampled on a [`TimeGrid`].
#[derive(Clone, Debug)]
pub struct ComplexFieldSeries {
    grid: TimeGrid,
    samples: Vec<Complex64>,
    carrier: f64,
}

impl ComplexFieldSeries {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>, carrier: f64) -> Result<Self> {
        if samples.len() != grid.count() {
            return Err(Error::invalid(
                "samples",
                format!("{} samples on a {}-point grid", samples.len(), grid.count()),
            ));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("samples", "non-finite sample"));
        }
        Ok(ComplexFieldSeries {
            grid,
            samples,
            carrier,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Carrier frequency metadata; never enters any computation here.
    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// The pointwise complex conjugate, i.e. the phase-conjugate partner of
    /// this field in the baseband convention.
    pub fn conjugated(&self) -> ComplexFieldSeries {
        ComplexFieldSeries {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z.conj()).collect(),
            carrier: self.carrier,
        }
    }

    /// Instantaneous intensity `|E(t_k)|^2`.
    pub fn intensity(&self) -> RealSeries {
        RealSeries {
            grid: self.grid,
            values: self.samples.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Total energy `sum |E|^2 * step`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.step()
    }

    /// Root-mean-square magnitude of the samples.
    pub fn rms(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64).sqrt()
    }
}

/// A nonnegative real series (an intensity trace) on a [`TimeGrid`].
#[derive(Clone, Debug)]
pub struct RealSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl RealSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::invalid(
                "values",
                format!("{} values on a {}-point grid", values.len(), grid.count()),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("values", "negative or non-finite value"));
        }
        Ok(RealSeries { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// RMS width of the series treated as a (nonnegative) weight over time:
    /// the square root of the second central moment.
    pub fn rms_width(&self) -> f64 {
        crate::correlation::rms_width(
            &self.grid.times().collect::<Vec<_>>(),
            &self.values,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 0.1, 8).is_ok());
        assert!(TimeGrid::new(0.0, 0.0, 8).is_err());
        assert!(TimeGrid::new(0.0, -0.1, 8).is_err());
        assert!(TimeGrid::new(0.0, 0.1, 1).is_err());
        assert!(TimeGrid::new(f64::NAN, 0.1, 8).is_err());
    }

    #[test]
    fn centered_grid_spans_symmetric_window() {
        let g = TimeGrid::centered(40.0, 0.05).unwrap();
        assert_eq!(g.count(), 800);
        assert!((g.start() + 20.0).abs() < 1e-12);
        assert!((g.window() - 40.0).abs() < 1e-12);
    }

    #[test]
    fn constant_field_has_unit_intensity() {
        let g = TimeGrid::new(0.0, 0.1, 16).unwrap();
        let f =
            ComplexFieldSeries::new(g, vec![Complex64::new(1.0, 0.0); 16], 0.0).unwrap();
        assert!(f.intensity().values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn one_plus_i_has_intensity_two() {
        let g = TimeGrid::new(0.0, 0.1, 4).unwrap();
        let f =
            ComplexFieldSeries::new(g, vec![Complex64::new(1.0, 1.0); 4], 0.0).unwrap();
        assert!(f.intensity().values().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn conjugate_intensity_is_bit_identical() {
        let g = TimeGrid::new(-1.0, 0.25, 9).unwrap();
        let samples: Vec<Complex64> = (0..9)
            .map(|k| Complex64::new(0.3 * k as f64, 1.0 - 0.2 * k as f64))
            .collect();
        let f = ComplexFieldSeries::new(g, samples, 0.0).unwrap();
        let i1 = f.intensity();
        let i2 = f.conjugated().intensity();
        assert_eq!(i1.values(), i2.values());
    }
}
