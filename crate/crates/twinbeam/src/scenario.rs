//! Seeded scenario runners behind the command-line interface.
//!
//! Each runner resolves a [`ScenarioConfig`] (built-in defaults, overridden
//! by a config file, overridden by flags), simulates, and can write
//! plot-ready CSV curves plus a JSON summary that echoes the fully resolved
//! configuration. Ensembles are computed in parallel but accumulated in
//! realization order, so outputs are byte-identical across runs and thread
//! counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::correlation::{
    dispersion_sweep, fit_quadratic_surface, per_realization_intensity_gap, quadratic_design_rank,
    symmetric_lags, CorrelationAccumulator, CorrelationEstimate, QuadraticFit, SweepPoint,
};
use crate::dispersion::{apply_dispersion_modes, DispersiveMedium};
use crate::error::{Error, Result};
use crate::field::{
    conjugate_partner_modes, pulse_modes, realization_rng, sample_chaotic_modes_with,
    synthesize_field, SpectralEnvelope,
};
use crate::grid::TimeGrid;
use crate::quantum::{coincidence_profile, profile_rms_width, BiphotonSpectrum};

/// Fully resolved scenario parameters. Unknown keys are rejected when
/// deserializing a config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    /// Modes per beam for the chaotic scenarios.
    pub modes: usize,
    /// Ensemble size for the correlation scenarios.
    pub realizations: usize,
    /// Mode grid half-width in envelope widths.
    pub half_span: f64,
    pub envelope: EnvelopeConfig,
    pub grid: GridConfig,
    pub media: MediaConfig,
    /// Correlation curves span `-lag_max ..= lag_max`.
    pub lag_max: f64,
    pub sweep: SweepOptions,
    pub pulse: PulseOptions,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub rms_width: f64,
    pub mean_intensity: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Time window, centered on zero.
    pub window: f64,
    pub step: f64,
}

/// Dimensionless dispersion strengths `d = b L` of the two media.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediaConfig {
    pub d1: f64,
    pub d2: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    /// Sweep grid spans `[-d_max, d_max]` per axis.
    pub d_max: f64,
    /// Grid points per axis.
    pub points: usize,
    /// Ensemble size per sweep (smaller than the correlation default since
    /// every realization is re-dispersed at every grid point).
    pub realizations: usize,
    pub modes: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseOptions {
    pub bandwidth: f64,
    /// RMS of seeded per-mode phase jitter; zero keeps the pulse
    /// transform-limited.
    pub phase_jitter: f64,
    /// Time window for the pulse scenario; must hold the broadened pulse.
    pub window: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 7,
            modes: 256,
            realizations: 10_000,
            half_span: 4.0,
            envelope: EnvelopeConfig::default(),
            grid: GridConfig::default(),
            media: MediaConfig::default(),
            lag_max: 15.0,
            sweep: SweepOptions::default(),
            pulse: PulseOptions::default(),
        }
    }
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            rms_width: 1.0,
            mean_intensity: 1.0,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            window: 40.0,
            step: 0.05,
        }
    }
}

impl Default for MediaConfig {
    fn default() -> Self {
        MediaConfig { d1: 2.0, d2: -2.0 }
    }
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            d_max: 0.5,
            points: 5,
            realizations: 2_000,
            modes: 128,
        }
    }
}

impl Default for PulseOptions {
    fn default() -> Self {
        PulseOptions {
            bandwidth: 1.0,
            phase_jitter: 0.0,
            window: 120.0,
        }
    }
}

/// Command-line overrides; `None` keeps the config-file or default value.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub modes: Option<usize>,
    pub realizations: Option<usize>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub lag_max: Option<f64>,
}

impl ScenarioConfig {
    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(v) = overrides.seed {
            self.seed = v;
        }
        if let Some(v) = overrides.modes {
            self.modes = v;
        }
        if let Some(v) = overrides.realizations {
            self.realizations = v;
        }
        if let Some(v) = overrides.d1 {
            self.media.d1 = v;
        }
        if let Some(v) = overrides.d2 {
            self.media.d2 = v;
        }
        if let Some(v) = overrides.lag_max {
            self.lag_max = v;
        }
    }

    pub fn envelope(&self) -> Result<SpectralEnvelope> {
        SpectralEnvelope::gaussian(self.envelope.rms_width, self.envelope.mean_intensity)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::centered(self.grid.window, self.grid.step)
    }

    pub fn media(&self) -> Result<(DispersiveMedium, DispersiveMedium)> {
        Ok((
            DispersiveMedium::dimensionless(self.media.d1)?,
            DispersiveMedium::dimensionless(self.media.d2)?,
        ))
    }

    pub fn lags(&self) -> Result<Vec<f64>> {
        if !(self.lag_max.is_finite() && self.lag_max > 0.0) {
            return Err(Error::invalid("lag_max", format!("{} must be positive", self.lag_max)));
        }
        Ok(symmetric_lags(self.lag_max, self.grid.step))
    }

    /// Lag threshold beyond which `g2` counts as background: ten coherence
    /// times, past the envelope's field correlations.
    pub fn background_after(&self) -> Result<f64> {
        Ok(10.0 * self.envelope()?.coherence_time())
    }

    fn validate_ensemble(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::invalid("modes", "must be >= 1"));
        }
        if self.realizations < 2 {
            return Err(Error::invalid(
                "realizations",
                format!("{} must be >= 2", self.realizations),
            ));
        }
        Ok(())
    }
}

/// How beam 2 relates to beam 1 in a pair scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartnerKind {
    /// Anti-correlated phases and frequencies: `E2 = E1*`.
    Conjugate,
    /// An identical copy: `E2 = E1`.
    Identical,
}

/// Outcome of a pair-correlation scenario: the `g2` curves without and with
/// the media, plus the unnormalized zero-lag correlation deficit between
/// them (estimated on common random numbers).
#[derive(Clone, Debug)]
pub struct PairCorrelationReport {
    pub config: ScenarioConfig,
    pub partner: PartnerKind,
    pub baseline: CorrelationEstimate,
    pub dispersed: CorrelationEstimate,
    pub deficit: f64,
    pub deficit_stderr: f64,
}

/// Cross-correlation of the conjugate ("phase-sensitive") pair, with and
/// without the configured media.
pub fn run_hbt(cfg: &ScenarioConfig) -> Result<PairCorrelationReport> {
    pair_correlation(cfg, PartnerKind::Conjugate)
}

/// Variant with beam 2 an identical copy of beam 1: correlations survive
/// equal media (`d1 = d2`) and degrade for opposite media - the mirror
/// image of the conjugate pair.
pub fn run_identical_beams(cfg: &ScenarioConfig) -> Result<PairCorrelationReport> {
    pair_correlation(cfg, PartnerKind::Identical)
}

struct PairSample {
    base_products: Vec<f64>,
    disp_products: Vec<f64>,
    base_means: (f64, f64),
    disp_means: (f64, f64),
}

fn pair_correlation(cfg: &ScenarioConfig, partner: PartnerKind) -> Result<PairCorrelationReport> {
    cfg.validate_ensemble()?;
    let env = cfg.envelope()?;
    let grid = cfg.time_grid()?;
    let (med1, med2) = cfg.media()?;
    let lags = cfg.lags()?;
    let background_after = cfg.background_after()?;

    // One never-mutated instance evaluates lag products inside the parallel
    // map; the two mutable accumulators only ever see precomputed products.
    let evaluator = CorrelationAccumulator::new(grid, &lags, background_after)?;
    let mut acc_base = CorrelationAccumulator::new(grid, &lags, background_after)?;
    let mut acc_disp = CorrelationAccumulator::new(grid, &lags, background_after)?;
    let zero_idx = lags.iter().position(|&l| l == 0.0).unwrap();
    let mut deficit_sum = 0.0;
    let mut deficit_sum_sq = 0.0;

    let one_realization = |r: u64| -> Result<PairSample> {
        let mut rng = realization_rng(cfg.seed, r);
        let modes = sample_chaotic_modes_with(&mut rng, &env, cfg.modes, cfg.half_span)?;
        let partner_modes = match partner {
            PartnerKind::Conjugate => conjugate_partner_modes(&modes),
            PartnerKind::Identical => modes.clone(),
        };
        let i1 = synthesize_field(&modes, &grid)?.intensity();
        let i2 = synthesize_field(&partner_modes, &grid)?.intensity();
        let i1d = synthesize_field(&apply_dispersion_modes(&modes, &med1), &grid)?.intensity();
        let i2d =
            synthesize_field(&apply_dispersion_modes(&partner_modes, &med2), &grid)?.intensity();
        Ok(PairSample {
            base_products: evaluator.lag_products(i1.values(), i2.values()),
            disp_products: evaluator.lag_products(i1d.values(), i2d.values()),
            base_means: (i1.mean(), i2.mean()),
            disp_means: (i1d.mean(), i2d.mean()),
        })
    };

    const CHUNK: usize = 128;
    let mut start = 0;
    while start < cfg.realizations {
        let end = (start + CHUNK).min(cfg.realizations);
        let samples: Vec<Result<PairSample>> = (start..end)
            .into_par_iter()
            .map(|r| one_realization(r as u64))
            .collect();
        for sample in samples {
            let s = sample?;
            let diff = s.base_products[zero_idx] - s.disp_products[zero_idx];
            deficit_sum += diff;
            deficit_sum_sq += diff * diff;
            acc_base.push_products(&s.base_products, s.base_means.0, s.base_means.1);
            acc_disp.push_products(&s.disp_products, s.disp_means.0, s.disp_means.1);
        }
        start = end;
    }

    let n = cfg.realizations as f64;
    let deficit = deficit_sum / n;
    let var = ((deficit_sum_sq / n - deficit * deficit) * n / (n - 1.0)).max(0.0);
    Ok(PairCorrelationReport {
        config: cfg.clone(),
        partner,
        baseline: acc_base.finalize()?,
        dispersed: acc_disp.finalize()?,
        deficit,
        deficit_stderr: (var / n).sqrt(),
    })
}

impl PairCorrelationReport {
    fn prefix(&self) -> &'static str {
        match self.partner {
            PartnerKind::Conjugate => "hbt",
            PartnerKind::Identical => "identical_beams",
        }
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let prefix = self.prefix();
        let base_csv = dir.join(format!("{prefix}_baseline.csv"));
        let disp_csv = dir.join(format!("{prefix}_dispersed.csv"));
        write_curve_csv(&base_csv, &self.baseline)?;
        write_curve_csv(&disp_csv, &self.dispersed)?;
        let summary = dir.join(format!("{prefix}_summary.json"));
        write_json(
            &summary,
            &serde_json::json!({
                "config": self.config,
                "partner": self.partner,
                "baseline": curve_summary(&self.baseline),
                "dispersed": curve_summary(&self.dispersed),
                "deficit": self.deficit,
                "deficit_stderr": self.deficit_stderr,
            }),
        )?;
        Ok(vec![base_csv, disp_csv, summary])
    }
}

/// Intensity traces of one seeded realization: both beams before the media
/// and after them, plus the pointwise intensity gaps.
#[derive(Clone, Debug)]
pub struct FieldsReport {
    pub config: ScenarioConfig,
    pub times: Vec<f64>,
    pub beam1: Vec<f64>,
    pub beam2: Vec<f64>,
    pub beam1_dispersed: Vec<f64>,
    pub beam2_dispersed: Vec<f64>,
    pub gap_before: f64,
    pub gap_after: f64,
}

pub fn run_fields(cfg: &ScenarioConfig) -> Result<FieldsReport> {
    if cfg.modes == 0 {
        return Err(Error::invalid("modes", "must be >= 1"));
    }
    let env = cfg.envelope()?;
    let grid = cfg.time_grid()?;
    let (med1, med2) = cfg.media()?;
    let mut rng = realization_rng(cfg.seed, 0);
    let modes = sample_chaotic_modes_with(&mut rng, &env, cfg.modes, cfg.half_span)?;
    let partner = conjugate_partner_modes(&modes);

    let e1 = synthesize_field(&modes, &grid)?;
    let e2 = synthesize_field(&partner, &grid)?;
    let e1d = synthesize_field(&apply_dispersion_modes(&modes, &med1), &grid)?;
    let e2d = synthesize_field(&apply_dispersion_modes(&partner, &med2), &grid)?;
    let gap_before = per_realization_intensity_gap(&e1, &e2)?;
    let gap_after = per_realization_intensity_gap(&e1d, &e2d)?;
    Ok(FieldsReport {
        config: cfg.clone(),
        times: grid.times().collect(),
        beam1: e1.intensity().values().to_vec(),
        beam2: e2.intensity().values().to_vec(),
        beam1_dispersed: e1d.intensity().values().to_vec(),
        beam2_dispersed: e2d.intensity().values().to_vec(),
        gap_before,
        gap_after,
    })
}

impl FieldsReport {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let csv = dir.join("fields.csv");
        let mut body = String::from("t,i1,i2,i1_dispersed,i2_dispersed\n");
        for k in 0..self.times.len() {
            body.push_str(&format!(
                "{},{},{},{},{}\n",
                self.times[k],
                self.beam1[k],
                self.beam2[k],
                self.beam1_dispersed[k],
                self.beam2_dispersed[k]
            ));
        }
        fs::write(&csv, body)?;
        let summary = dir.join("fields_summary.json");
        write_json(
            &summary,
            &serde_json::json!({
                "config": self.config,
                "gap_before": self.gap_before,
                "gap_after": self.gap_after,
            }),
        )?;
        Ok(vec![csv, summary])
    }
}

/// Sweep over media pairs plus the fitted quadratic surface.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub config: ScenarioConfig,
    pub points: Vec<SweepPoint>,
    pub fit: QuadraticFit,
}

pub fn run_sweep(cfg: &ScenarioConfig) -> Result<SweepReport> {
    let opts = cfg.sweep;
    if opts.points < 2 {
        return Err(Error::invalid("sweep.points", "need >= 2 points per axis"));
    }
    if !(opts.d_max.is_finite()) {
        return Err(Error::invalid("sweep.d_max", "must be finite"));
    }
    let mut pairs = Vec::with_capacity(opts.points * opts.points);
    for i in 0..opts.points {
        for j in 0..opts.points {
            let d = |k: usize| -opts.d_max + 2.0 * opts.d_max * k as f64 / (opts.points - 1) as f64;
            pairs.push((d(i), d(j)));
        }
    }
    // A degenerate grid is a config error; report it before simulating.
    if quadratic_design_rank(&pairs) < 6 {
        return Err(Error::RankDeficient(
            "sweep grid cannot determine the quadratic surface".into(),
        ));
    }
    let sweep_cfg = crate::correlation::SweepConfig {
        envelope: cfg.envelope()?,
        n_modes: opts.modes,
        half_span: cfg.half_span,
        grid: cfg.time_grid()?,
        n_realizations: opts.realizations,
        seed: cfg.seed,
    };
    let points = dispersion_sweep(&sweep_cfg, &pairs)?;
    let fit = fit_quadratic_surface(&points)?;
    Ok(SweepReport {
        config: cfg.clone(),
        points,
        fit,
    })
}

impl SweepReport {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let csv = dir.join("sweep_points.csv");
        let mut body = String::from("d1,d2,deficit,stderr\n");
        for p in &self.points {
            body.push_str(&format!("{},{},{},{}\n", p.d1, p.d2, p.deficit, p.stderr));
        }
        fs::write(&csv, body)?;
        let summary = dir.join("sweep_summary.json");
        write_json(
            &summary,
            &serde_json::json!({
                "config": self.config,
                "fit": self.fit,
            }),
        )?;
        Ok(vec![csv, summary])
    }
}

/// Pulse widths before and after the media, for both beams and for the
/// matched biphoton profile.
#[derive(Clone, Debug, Serialize)]
pub struct PulseWidths {
    pub beam1_before: f64,
    pub beam2_before: f64,
    pub beam1_after: f64,
    pub beam2_after: f64,
    pub broadening_beam1: f64,
    pub broadening_beam2: f64,
    /// Closed-form broadening factors for the transform-limited pulse.
    pub predicted_broadening_beam1: f64,
    pub predicted_broadening_beam2: f64,
    pub quantum_before: f64,
    pub quantum_after: f64,
}

#[derive(Clone, Debug)]
pub struct PulseReport {
    pub config: ScenarioConfig,
    pub widths: PulseWidths,
}

pub fn run_pulse(cfg: &ScenarioConfig) -> Result<PulseReport> {
    if cfg.modes == 0 {
        return Err(Error::invalid("modes", "must be >= 1"));
    }
    let opts = cfg.pulse;
    let grid = TimeGrid::centered(opts.window, cfg.grid.step)?;
    let (med1, med2) = cfg.media()?;
    let modes = pulse_modes(cfg.modes, opts.bandwidth, opts.phase_jitter, cfg.seed)?;
    let partner = conjugate_partner_modes(&modes);

    let i1 = synthesize_field(&modes, &grid)?.intensity();
    let i2 = synthesize_field(&partner, &grid)?.intensity();
    let i1d = synthesize_field(&apply_dispersion_modes(&modes, &med1), &grid)?.intensity();
    let i2d = synthesize_field(&apply_dispersion_modes(&partner, &med2), &grid)?.intensity();
    for trace in [&i1, &i2, &i1d, &i2d] {
        check_window_spill(trace.values())?;
    }

    // Matched biphoton pair: same spectral amplitudes, single coherent sum.
    let spectrum = BiphotonSpectrum::from_mode_amplitudes(&modes)?;
    let lags = symmetric_lags(opts.window / 2.0, cfg.grid.step);
    let vacuum = DispersiveMedium::vacuum();
    let q_before = coincidence_profile(&spectrum, &lags, &vacuum, &vacuum)?;
    let q_after = coincidence_profile(&spectrum, &lags, &med1, &med2)?;

    // Transform-limited prediction: a field spectrum exp(-a dw^2) under
    // quadratic phase B dw^2 broadens from sqrt(a) to sqrt(a + B^2/a).
    let a = 1.0 / (4.0 * opts.bandwidth * opts.bandwidth);
    let predict = |b: f64| (1.0 + (b / a) * (b / a)).sqrt();

    let w1 = i1.rms_width();
    let w2 = i2.rms_width();
    let w1d = i1d.rms_width();
    let w2d = i2d.rms_width();
    Ok(PulseReport {
        config: cfg.clone(),
        widths: PulseWidths {
            beam1_before: w1,
            beam2_before: w2,
            beam1_after: w1d,
            beam2_after: w2d,
            broadening_beam1: w1d / w1,
            broadening_beam2: w2d / w2,
            predicted_broadening_beam1: predict(med1.quadratic_strength()),
            predicted_broadening_beam2: predict(med2.quadratic_strength()),
            quantum_before: profile_rms_width(&q_before),
            quantum_after: profile_rms_width(&q_after),
        },
    })
}

fn check_window_spill(values: &[f64]) -> Result<()> {
    let n = values.len();
    let edge = (n as f64 * 0.05).ceil() as usize;
    let total: f64 = values.iter().sum();
    let outer: f64 = values[..edge].iter().sum::<f64>() + values[n - edge..].iter().sum::<f64>();
    let fraction = 100.0 * outer / total;
    if fraction > 1.0 {
        return Err(Error::WindowSpill { fraction });
    }
    Ok(())
}

impl PulseReport {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let summary = dir.join("pulse_summary.json");
        write_json(
            &summary,
            &serde_json::json!({
                "config": self.config,
                "widths": self.widths,
            }),
        )?;
        Ok(vec![summary])
    }
}

/// Biphoton coincidence profile for the configured media and a spectrum
/// matched to the chaotic-beam envelope.
#[derive(Clone, Debug)]
pub struct QuantumReport {
    pub config: ScenarioConfig,
    pub profile: CorrelationEstimate,
    pub rms_width: f64,
}

pub fn run_quantum(cfg: &ScenarioConfig) -> Result<QuantumReport> {
    let env = cfg.envelope()?;
    let spectrum = BiphotonSpectrum::matched_to_envelope(&env, cfg.modes, cfg.half_span)?;
    let (med1, med2) = cfg.media()?;
    let lags = cfg.lags()?;
    let profile = coincidence_profile(&spectrum, &lags, &med1, &med2)?;
    let rms_width = profile_rms_width(&profile);
    Ok(QuantumReport {
        config: cfg.clone(),
        profile,
        rms_width,
    })
}

impl QuantumReport {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let csv = dir.join("quantum_profile.csv");
        write_curve_csv(&csv, &self.profile)?;
        let summary = dir.join("quantum_summary.json");
        write_json(
            &summary,
            &serde_json::json!({
                "config": self.config,
                "peak_fwhm": self.profile.peak_fwhm,
                "rms_width": self.rms_width,
                "background": self.profile.background,
            }),
        )?;
        Ok(vec![csv, summary])
    }
}

fn curve_summary(est: &CorrelationEstimate) -> serde_json::Value {
    serde_json::json!({
        "n_realizations": est.n_realizations,
        "peak_height": est.peak_height,
        "background": est.background,
        "peak_ratio": est.peak_ratio(),
        "peak_fwhm": est.peak_fwhm,
    })
}

fn write_curve_csv(path: &Path, est: &CorrelationEstimate) -> Result<()> {
    let mut body = String::from("lag,g2,stderr\n");
    for k in 0..est.lags.len() {
        body.push_str(&format!("{},{},{}\n", est.lags[k], est.g2[k], est.stderr[k]));
    }
    fs::write(path, body)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_cfg() -> ScenarioConfig {
        ScenarioConfig {
            modes: 32,
            realizations: 120,
            grid: GridConfig {
                window: 30.0,
                step: 0.05,
            },
            lag_max: 12.0,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn defaults_resolve_to_valid_domain_objects() {
        let cfg = ScenarioConfig::default();
        assert!(cfg.envelope().is_ok());
        assert!(cfg.time_grid().is_ok());
        assert!(cfg.media().is_ok());
        assert!(cfg.lags().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_value::<ScenarioConfig>(serde_json::json!({
            "seed": 1,
            "wavelength": 780.0,
        }))
        .unwrap_err();
        assert!(err.to_string().contains("wavelength"));

        let err = serde_json::from_value::<ScenarioConfig>(serde_json::json!({
            "media": { "d1": 1.0, "d3": 2.0 },
        }))
        .unwrap_err();
        assert!(err.to_string().contains("d3"));
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = ScenarioConfig::default();
        cfg.apply(&Overrides {
            seed: Some(11),
            d2: Some(-3.5),
            ..Overrides::default()
        });
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.media.d2, -3.5);
        assert_eq!(cfg.media.d1, 2.0);
    }

    #[test]
    fn zero_realizations_is_a_config_error() {
        let mut cfg = small_cfg();
        cfg.realizations = 0;
        let err = run_hbt(&cfg).unwrap_err();
        assert!(err.to_string().contains("realizations"));
    }

    #[test]
    fn fields_traces_satisfy_identities() {
        let mut cfg = small_cfg();
        cfg.media = MediaConfig { d1: 2.0, d2: -2.0 };
        let report = run_fields(&cfg).unwrap();
        assert!(report.gap_before <= 1e-12);
        assert!(report.gap_after <= 1e-9);
        // The dispersed trace genuinely differs from the input trace.
        let max_change = report
            .beam1
            .iter()
            .zip(&report.beam1_dispersed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_change > 0.1);

        // Identity media leave the trace in place.
        let mut quiet = small_cfg();
        quiet.media = MediaConfig { d1: 0.0, d2: 0.0 };
        let report = run_fields(&quiet).unwrap();
        let max_change = report
            .beam1
            .iter()
            .zip(&report.beam1_dispersed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_change <= 1e-12);
    }

    #[test]
    fn pulse_guard_rejects_short_windows() {
        let mut cfg = small_cfg();
        cfg.media = MediaConfig { d1: 5.0, d2: -5.0 };
        cfg.pulse = PulseOptions {
            bandwidth: 1.0,
            phase_jitter: 0.0,
            window: 30.0, // broadened width ~10, far too tight
        };
        assert!(matches!(run_pulse(&cfg), Err(Error::WindowSpill { .. })));
    }

    #[test]
    fn pulse_widths_follow_the_broadening_law() {
        let mut cfg = small_cfg();
        cfg.modes = 256;
        cfg.media = MediaConfig { d1: 2.0, d2: -2.0 };
        let report = run_pulse(&cfg).unwrap();
        let w = &report.widths;
        assert_relative_eq!(
            w.broadening_beam1,
            w.predicted_broadening_beam1,
            max_relative = 0.03
        );
        assert_relative_eq!(w.beam1_before, 0.5, max_relative = 0.05);
        // Opposite media broaden the partner identically.
        assert_relative_eq!(w.beam1_after, w.beam2_after, max_relative = 1e-9);
        // The matched biphoton profile is untouched by d2 = -d1.
        assert_eq!(w.quantum_before, w.quantum_after);
    }

    #[test]
    fn equal_media_reduce_the_hbt_peak() {
        let mut cfg = small_cfg();
        cfg.realizations = 400;
        cfg.media = MediaConfig { d1: 1.0, d2: 1.0 };
        let report = run_hbt(&cfg).unwrap();
        assert!(
            report.deficit > 5.0 * report.deficit_stderr,
            "deficit {} stderr {}",
            report.deficit,
            report.deficit_stderr
        );
        assert!(report.dispersed.peak_height < report.baseline.peak_height - 0.2);
        // Background is untouched; only the coincident part degrades.
        assert!((report.dispersed.background - report.baseline.background).abs() < 0.05);
    }

    #[test]
    fn sweep_rank_check_precedes_simulation() {
        let mut cfg = small_cfg();
        cfg.sweep.d_max = 0.0; // every pair identical
        assert!(matches!(run_sweep(&cfg), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn small_sweep_fits_positive_curvature() {
        let mut cfg = small_cfg();
        cfg.sweep = SweepOptions {
            d_max: 0.4,
            points: 3,
            realizations: 300,
            modes: 32,
        };
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.points.len(), 9);
        assert!(report.fit.c1 > 0.0);
        // Diagonal pairs cancel.
        for p in report.points.iter().filter(|p| p.d1 == -p.d2) {
            assert!(p.deficit.abs() <= 3.0 * p.stderr);
        }
    }

    #[test]
    fn quantum_profile_cancels_for_opposite_media() {
        let mut with = small_cfg();
        with.media = MediaConfig { d1: 4.0, d2: -4.0 };
        let mut without = small_cfg();
        without.media = MediaConfig { d1: 0.0, d2: 0.0 };
        let a = run_quantum(&with).unwrap();
        let b = run_quantum(&without).unwrap();
        assert_eq!(a.profile.g2, b.profile.g2);
    }

    #[test]
    fn results_are_identical_across_thread_counts() {
        let mut cfg = small_cfg();
        cfg.realizations = 60;
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_hbt(&cfg))
            .unwrap();
        let several = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_hbt(&cfg))
            .unwrap();
        assert_eq!(single.baseline.g2, several.baseline.g2);
        assert_eq!(single.dispersed.stderr, several.dispersed.stderr);
        assert_eq!(single.deficit, several.deficit);
    }

    #[test]
    fn written_outputs_are_reproducible() {
        let dir = std::env::temp_dir().join(format!("twinbeam-test-{}", std::process::id()));
        let mut cfg = small_cfg();
        cfg.realizations = 40;
        let report = run_hbt(&cfg).unwrap();
        let first = report.write(&dir.join("a")).unwrap();
        let again = run_hbt(&cfg).unwrap();
        let second = again.write(&dir.join("b")).unwrap();
        for (a, b) in first.iter().zip(&second) {
            let left = fs::read(a).unwrap();
            let right = fs::read(b).unwrap();
            assert_eq!(left, right, "{} vs {}", a.display(), b.display());
        }
        fs::remove_dir_all(&dir).ok();
    }
}
