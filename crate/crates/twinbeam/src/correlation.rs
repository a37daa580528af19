//! Intensity correlation estimators, the dispersion sweep, and the
//! quadratic surface fit.
//!
//! The normalized cross-correlation
//! `g2(tau) = <I1(t) I2(t+tau)> / (<I1><I2>)` is estimated by time-averaging
//! within each realization (the beams are stationary) and ensemble-averaging
//! across realizations. Each realization contributes one time-averaged
//! number per lag, so the realization-to-realization scatter already
//! accounts for correlations within the window; standard errors come from
//! that scatter. For chaotic light the curve shows the
//! Hanbury-Brown-Twiss peak: `g2(0)/background = 2`.
//!
//! The lag products are evaluated with FFTs; an explicit double-loop oracle
//! in the tests pins the two to 1e-10.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

use crate::dispersion::{apply_dispersion_modes, DispersiveMedium};
use crate::error::{Error, Result};
use crate::field::{
    conjugate_partner_modes, realization_rng, sample_chaotic_modes_with, synthesize_field,
    SpectralEnvelope,
};
use crate::grid::{ComplexFieldSeries, RealSeries, TimeGrid};

/// A normalized intensity correlation curve with per-lag standard errors
/// and peak metrics.
#[derive(Clone, Debug)]
pub struct CorrelationEstimate {
    pub lags: Vec<f64>,
    pub g2: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_realizations: usize,
    /// Mean of `g2` over lags beyond the background threshold.
    pub background: f64,
    /// `g2` at zero lag.
    pub peak_height: f64,
    /// Full width at half maximum of `g2 - background`, by linear
    /// interpolation of the half-maximum crossings; NaN when the curve
    /// never drops below half maximum (no peak).
    pub peak_fwhm: f64,
}

impl CorrelationEstimate {
    /// Peak-to-background ratio, the Hanbury-Brown-Twiss figure of merit.
    pub fn peak_ratio(&self) -> f64 {
        self.peak_height / self.background
    }
}

/// Streaming estimator state: one accumulator per ensemble, mergeable in
/// any order (results agree up to floating-point reassociation).
pub struct CorrelationAccumulator {
    grid: TimeGrid,
    lags: Vec<f64>,
    steps: Vec<i64>,
    background_after: f64,
    correlator: LagCorrelator,
    n: usize,
    sum_prod: Vec<f64>,
    sum_prod_sq: Vec<f64>,
    sum_mean1: f64,
    sum_mean2: f64,
}

impl CorrelationAccumulator {
    /// `background_after` is the |lag| beyond which `g2` is treated as
    /// background; it must leave at least one qualifying lag.
    pub fn new(grid: TimeGrid, lags: &[f64], background_after: f64) -> Result<Self> {
        if lags.is_empty() || !lags.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("lags", "must be nonempty, strictly increasing"));
        }
        if !(background_after.is_finite() && background_after > 0.0) {
            return Err(Error::invalid(
                "background_after",
                format!("{background_after} must be positive"),
            ));
        }
        let steps = lags
            .iter()
            .map(|&lag| {
                let ratio = lag / grid.step();
                let step = ratio.round();
                if (ratio - step).abs() > 1e-6 {
                    return Err(Error::LagOffGrid {
                        lag,
                        step: grid.step(),
                    });
                }
                if step.abs() as usize >= grid.count() {
                    return Err(Error::LagBeyondWindow {
                        lag,
                        window: grid.window(),
                    });
                }
                Ok(step as i64)
            })
            .collect::<Result<Vec<_>>>()?;
        if !steps.contains(&0) {
            return Err(Error::invalid("lags", "must include zero lag"));
        }
        if !lags.iter().any(|&l| l.abs() > background_after) {
            return Err(Error::invalid(
                "lags",
                format!("no lag beyond the background threshold {background_after}"),
            ));
        }
        let max_abs_step = steps.iter().map(|s| s.unsigned_abs() as usize).max().unwrap();
        Ok(CorrelationAccumulator {
            grid,
            lags: lags.to_vec(),
            steps,
            background_after,
            correlator: LagCorrelator::new(grid.count(), max_abs_step),
            n: 0,
            sum_prod: vec![0.0; lags.len()],
            sum_prod_sq: vec![0.0; lags.len()],
            sum_mean1: 0.0,
            sum_mean2: 0.0,
        })
    }

    /// Folds in one realization (a pair of intensity traces on the shared
    /// grid).
    pub fn push(&mut self, i1: &RealSeries, i2: &RealSeries) -> Result<()> {
        self.grid.ensure_matches(i1.grid())?;
        self.grid.ensure_matches(i2.grid())?;
        let per_lag = self.lag_products(i1.values(), i2.values());
        self.push_products(&per_lag, i1.mean(), i2.mean());
        Ok(())
    }

    /// Per-realization lag products for [`push_products`], computed with
    /// this accumulator's lag grid but without touching its state; lets
    /// callers evaluate realizations in parallel and fold them in a fixed
    /// order.
    ///
    /// [`push_products`]: CorrelationAccumulator::push_products
    pub fn lag_products(&self, i1: &[f64], i2: &[f64]) -> Vec<f64> {
        self.correlator.mean_lag_products(i1, i2, &self.steps)
    }

    /// Folds in one realization from products computed by [`lag_products`].
    ///
    /// [`lag_products`]: CorrelationAccumulator::lag_products
    pub fn push_products(&mut self, per_lag: &[f64], mean1: f64, mean2: f64) {
        debug_assert_eq!(per_lag.len(), self.sum_prod.len());
        for (j, &v) in per_lag.iter().enumerate() {
            self.sum_prod[j] += v;
            self.sum_prod_sq[j] += v * v;
        }
        self.sum_mean1 += mean1;
        self.sum_mean2 += mean2;
        self.n += 1;
    }

    /// Combines two partial accumulations over disjoint realization sets.
    pub fn merge(&mut self, other: &CorrelationAccumulator) -> Result<()> {
        self.grid.ensure_matches(&other.grid)?;
        if self.steps != other.steps {
            return Err(Error::invalid("lags", "accumulators use different lag grids"));
        }
        for j in 0..self.sum_prod.len() {
            self.sum_prod[j] += other.sum_prod[j];
            self.sum_prod_sq[j] += other.sum_prod_sq[j];
        }
        self.sum_mean1 += other.sum_mean1;
        self.sum_mean2 += other.sum_mean2;
        self.n += other.n;
        Ok(())
    }

    pub fn n_realizations(&self) -> usize {
        self.n
    }

    pub fn finalize(&self) -> Result<CorrelationEstimate> {
        if self.n < 2 {
            return Err(Error::invalid(
                "n_realizations",
                format!("{} realizations; need >= 2 for standard errors", self.n),
            ));
        }
        let n = self.n as f64;
        let denom = (self.sum_mean1 / n) * (self.sum_mean2 / n);
        if !denom.is_finite() || denom <= 0.0 {
            return Err(Error::invalid("intensity", "zero mean intensity"));
        }
        let mut g2 = Vec::with_capacity(self.lags.len());
        let mut stderr = Vec::with_capacity(self.lags.len());
        for j in 0..self.lags.len() {
            let mean = self.sum_prod[j] / n;
            let var = ((self.sum_prod_sq[j] / n - mean * mean) * n / (n - 1.0)).max(0.0);
            g2.push(mean / denom);
            stderr.push((var / n).sqrt() / denom);
        }
        let (bg_sum, bg_count) = self
            .lags
            .iter()
            .zip(&g2)
            .filter(|(l, _)| l.abs() > self.background_after)
            .fold((0.0, 0usize), |(s, c), (_, &v)| (s + v, c + 1));
        let background = bg_sum / bg_count as f64;
        let zero_idx = self.steps.iter().position(|&s| s == 0).unwrap();
        let peak_height = g2[zero_idx];
        let peak_fwhm = half_max_full_width(&self.lags, &g2, background);
        Ok(CorrelationEstimate {
            lags: self.lags.clone(),
            g2,
            stderr,
            n_realizations: self.n,
            background,
            peak_height,
            peak_fwhm,
        })
    }
}

/// Time- and ensemble-averaged `g2` over two matched intensity ensembles.
pub fn cross_correlation(
    ensemble1: &[RealSeries],
    ensemble2: &[RealSeries],
    lags: &[f64],
    background_after: f64,
) -> Result<CorrelationEstimate> {
    if ensemble1.len() != ensemble2.len() {
        return Err(Error::invalid(
            "ensembles",
            format!("sizes differ: {} vs {}", ensemble1.len(), ensemble2.len()),
        ));
    }
    if ensemble1.len() < 2 {
        return Err(Error::invalid("ensembles", "need at least 2 realizations"));
    }
    let mut acc = CorrelationAccumulator::new(*ensemble1[0].grid(), lags, background_after)?;
    for (i1, i2) in ensemble1.iter().zip(ensemble2) {
        acc.push(i1, i2)?;
    }
    acc.finalize()
}

/// Intensity autocorrelation: [`cross_correlation`] of an ensemble with
/// itself.
pub fn auto_correlation(
    ensemble: &[RealSeries],
    lags: &[f64],
    background_after: f64,
) -> Result<CorrelationEstimate> {
    cross_correlation(ensemble, ensemble, lags, background_after)
}

/// Largest pointwise intensity difference between two fields on a shared
/// grid, relative to the mean intensity of the first. Zero (to round-off)
/// exactly when the two beams are conjugate partners, with or without
/// opposite-coefficient media.
pub fn per_realization_intensity_gap(
    f1: &ComplexFieldSeries,
    f2: &ComplexFieldSeries,
) -> Result<f64> {
    f1.grid().ensure_matches(f2.grid())?;
    let i1 = f1.intensity();
    let i2 = f2.intensity();
    let max_gap = i1
        .values()
        .iter()
        .zip(i2.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(max_gap / i1.mean().max(f64::MIN_POSITIVE))
}

/// Ensemble parameters for [`dispersion_sweep`].
#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub envelope: SpectralEnvelope,
    pub n_modes: usize,
    pub half_span: f64,
    pub grid: TimeGrid,
    pub n_realizations: usize,
    pub seed: u64,
}

/// One sweep result: dimensionless media pair, unnormalized zero-lag
/// correlation deficit, and its Monte Carlo standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepPoint {
    pub d1: f64,
    pub d2: f64,
    pub deficit: f64,
    pub stderr: f64,
}

/// Sweeps dimensionless media pairs `(d1, d2)` and measures, per pair, the
/// zero-lag correlation deficit
/// `<I1(t) I2(t)> - <I1'(t) I2'(t)>` for the conjugate beam pair.
///
/// The same field realizations underlie every grid point (common random
/// numbers), so each deficit is a difference of strongly correlated
/// estimates and its standard error reflects that.
pub fn dispersion_sweep(cfg: &SweepConfig, pairs: &[(f64, f64)]) -> Result<Vec<SweepPoint>> {
    if pairs.is_empty() {
        return Err(Error::invalid("pairs", "empty sweep grid"));
    }
    if cfg.n_realizations < 2 {
        return Err(Error::invalid("n_realizations", "need >= 2"));
    }
    let media = pairs
        .iter()
        .map(|&(d1, d2)| {
            Ok((
                DispersiveMedium::dimensionless(d1)?,
                DispersiveMedium::dimensionless(d2)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sum = vec![0.0; pairs.len()];
    let mut sum_sq = vec![0.0; pairs.len()];
    const CHUNK: usize = 64;
    let mut start = 0;
    while start < cfg.n_realizations {
        let end = (start + CHUNK).min(cfg.n_realizations);
        let parts: Vec<Result<Vec<f64>>> = (start..end)
            .into_par_iter()
            .map(|r| sweep_realization(cfg, &media, r as u64))
            .collect();
        for part in parts {
            let diffs = part?;
            for (j, d) in diffs.into_iter().enumerate() {
                sum[j] += d;
                sum_sq[j] += d * d;
            }
        }
        start = end;
    }

    let n = cfg.n_realizations as f64;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(j, &(d1, d2))| {
            let mean = sum[j] / n;
            let var = ((sum_sq[j] / n - mean * mean) * n / (n - 1.0)).max(0.0);
            SweepPoint {
                d1,
                d2,
                deficit: mean,
                stderr: (var / n).sqrt(),
            }
        })
        .collect())
}

fn sweep_realization(
    cfg: &SweepConfig,
    media: &[(DispersiveMedium, DispersiveMedium)],
    realization: u64,
) -> Result<Vec<f64>> {
    let mut rng = realization_rng(cfg.seed, realization);
    let modes = sample_chaotic_modes_with(&mut rng, &cfg.envelope, cfg.n_modes, cfg.half_span)?;
    let partner = conjugate_partner_modes(&modes);
    let i1 = synthesize_field(&modes, &cfg.grid)?.intensity();
    let i2 = synthesize_field(&partner, &cfg.grid)?.intensity();
    let baseline = mean_product(i1.values(), i2.values());
    media
        .iter()
        .map(|(med1, med2)| {
            let d1 = synthesize_field(&apply_dispersion_modes(&modes, med1), &cfg.grid)?;
            let d2 = synthesize_field(&apply_dispersion_modes(&partner, med2), &cfg.grid)?;
            let dispersed = mean_product(d1.intensity().values(), d2.intensity().values());
            Ok(baseline - dispersed)
        })
        .collect()
}

fn mean_product(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// Least-squares fit of `deficit = a + b1 d1 + b2 d2 + c1 d1^2 + c2 d2^2
/// + d d1 d2` over a sweep table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadraticFit {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub d: f64,
    pub residual_rms: f64,
}

/// Rank of the quadratic-surface design matrix for a set of `(d1, d2)`
/// points; 6 means the fit is fully determined.
pub fn quadratic_design_rank(pairs: &[(f64, f64)]) -> usize {
    if pairs.is_empty() {
        return 0;
    }
    let x = design_matrix(pairs);
    let svd = x.svd(false, false);
    let eps = svd.singular_values.max() * 1e-10;
    svd.rank(eps)
}

fn design_matrix(pairs: &[(f64, f64)]) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(pairs.len(), 6, |r, c| {
        let (d1, d2) = pairs[r];
        match c {
            0 => 1.0,
            1 => d1,
            2 => d2,
            3 => d1 * d1,
            4 => d2 * d2,
            _ => d1 * d2,
        }
    })
}

/// Fits the six-coefficient quadratic surface to a sweep table.
/// Fails on fewer than six points or a rank-deficient (collinear) grid.
pub fn fit_quadratic_surface(points: &[SweepPoint]) -> Result<QuadraticFit> {
    if points.len() < 6 {
        return Err(Error::RankDeficient(format!(
            "{} points cannot determine 6 coefficients",
            points.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.d1, p.d2)).collect();
    let x = design_matrix(&pairs);
    let y = nalgebra::DVector::from_iterator(points.len(), points.iter().map(|p| p.deficit));
    let svd = x.clone().svd(true, true);
    let eps = svd.singular_values.max() * 1e-10;
    if svd.rank(eps) < 6 {
        return Err(Error::RankDeficient(
            "sweep grid leaves quadratic coefficients collinear".into(),
        ));
    }
    let coeffs = svd
        .solve(&y, eps)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let residual = &x * &coeffs - &y;
    Ok(QuadraticFit {
        a: coeffs[0],
        b1: coeffs[1],
        b2: coeffs[2],
        c1: coeffs[3],
        c2: coeffs[4],
        d: coeffs[5],
        residual_rms: (residual.norm_squared() / points.len() as f64).sqrt(),
    })
}

/// RMS width of nonnegative weights `w` over coordinates `x`: the square
/// root of the second central moment.
pub fn rms_width(x: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    let centroid = x.iter().zip(w).map(|(xi, wi)| xi * wi).sum::<f64>() / total;
    let second = x
        .iter()
        .zip(w)
        .map(|(xi, wi)| wi * (xi - centroid) * (xi - centroid))
        .sum::<f64>()
        / total;
    second.max(0.0).sqrt()
}

/// FWHM of `values - background` by linear interpolation around the global
/// maximum; NaN when no half-maximum crossing exists on either side.
pub fn half_max_full_width(lags: &[f64], values: &[f64], background: f64) -> f64 {
    let peak_idx = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let half = background + (values[peak_idx] - background) / 2.0;

    let mut right = f64::NAN;
    for k in peak_idx..values.len() - 1 {
        if values[k] >= half && values[k + 1] < half {
            let frac = (values[k] - half) / (values[k] - values[k + 1]);
            right = lags[k] + frac * (lags[k + 1] - lags[k]);
            break;
        }
    }
    let mut left = f64::NAN;
    for k in (1..=peak_idx).rev() {
        if values[k] >= half && values[k - 1] < half {
            let frac = (values[k] - half) / (values[k] - values[k - 1]);
            left = lags[k] + frac * (lags[k - 1] - lags[k]);
            break;
        }
    }
    right - left
}

/// Symmetric lag grid `-max_lag ..= max_lag` in whole grid steps.
pub fn symmetric_lags(max_lag: f64, step: f64) -> Vec<f64> {
    let j = (max_lag / step).round() as i64;
    (-j..=j).map(|k| k as f64 * step).collect()
}

/// FFT-backed evaluator of time-averaged lag products
/// `(1/(K-|j|)) sum_k a[k] b[k+j]`.
struct LagCorrelator {
    len: usize,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl LagCorrelator {
    fn new(len: usize, max_abs_step: usize) -> Self {
        let fft_len = (len + max_abs_step + 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        LagCorrelator {
            len,
            fft_len,
            forward: planner.plan_fft_forward(fft_len),
            inverse: planner.plan_fft_inverse(fft_len),
        }
    }

    fn mean_lag_products(&self, a: &[f64], b: &[f64], steps: &[i64]) -> Vec<f64> {
        let mut fa: Vec<Complex64> = a
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(self.fft_len)
            .collect();
        let mut fb: Vec<Complex64> = b
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(self.fft_len)
            .collect();
        self.forward.process(&mut fa);
        self.forward.process(&mut fb);
        for (za, zb) in fa.iter_mut().zip(&fb) {
            *za = za.conj() * zb;
        }
        self.inverse.process(&mut fa);
        let scale = 1.0 / self.fft_len as f64;
        steps
            .iter()
            .map(|&s| {
                let idx = if s >= 0 {
                    s as usize
                } else {
                    self.fft_len - s.unsigned_abs() as usize
                };
                let overlap = (self.len - s.unsigned_abs() as usize) as f64;
                fa[idx].re * scale / overlap
            })
            .collect()
    }
}
