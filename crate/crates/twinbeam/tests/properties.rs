//! Property tests for the structural identities the simulator rests on.

use proptest::prelude::*;

use twinbeam::correlation::{symmetric_lags, CorrelationAccumulator};
use twinbeam::dispersion::{apply_dispersion_modes, apply_dispersion_series, DispersiveMedium};
use twinbeam::field::{
    conjugate_partner_modes, realization_rng, sample_chaotic_modes, sample_chaotic_modes_with,
    synthesize_field, SpectralEnvelope,
};
use twinbeam::grid::TimeGrid;
use twinbeam::quantum::{coincidence_amplitude, BiphotonSpectrum};

fn env() -> SpectralEnvelope {
    SpectralEnvelope::gaussian(1.0, 1.0).unwrap()
}

fn grid() -> TimeGrid {
    TimeGrid::centered(12.0, 0.05).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Synthesizing the partner always gives the pointwise conjugate.
    #[test]
    fn partner_synthesis_is_conjugation(seed in 0u64..1_000_000, n_modes in 1usize..64) {
        let m = sample_chaotic_modes(&env(), n_modes, 4.0, seed).unwrap();
        let g = grid();
        let e1 = synthesize_field(&m, &g).unwrap();
        let e2 = synthesize_field(&conjugate_partner_modes(&m), &g).unwrap();
        let scale = e1.rms().max(1e-30);
        for (a, b) in e1.samples().iter().zip(e2.samples()) {
            prop_assert!((a.conj() - b).norm() <= 1e-12 * scale);
        }
    }

    /// The partner of the partner is the original mode set.
    #[test]
    fn partner_is_an_involution(seed in 0u64..1_000_000, n_modes in 1usize..64) {
        let m = sample_chaotic_modes(&env(), n_modes, 4.0, seed).unwrap();
        let back = conjugate_partner_modes(&conjugate_partner_modes(&m));
        prop_assert_eq!(back, m);
    }

    /// Mode-path media compose additively.
    #[test]
    fn dispersion_composes(seed in 0u64..1_000_000, da in -3.0f64..3.0, db in -3.0f64..3.0) {
        let m = sample_chaotic_modes(&env(), 32, 4.0, seed).unwrap();
        let step = apply_dispersion_modes(
            &apply_dispersion_modes(&m, &DispersiveMedium::dimensionless(da).unwrap()),
            &DispersiveMedium::dimensionless(db).unwrap(),
        );
        let once = apply_dispersion_modes(&m, &DispersiveMedium::dimensionless(da + db).unwrap());
        for (a, b) in step.phases().iter().zip(once.phases()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    /// The spectral path is phase-only: energy is conserved.
    #[test]
    fn spectral_path_conserves_energy(seed in 0u64..1_000_000, d in -4.0f64..4.0, alpha in -1.0f64..1.0) {
        let m = sample_chaotic_modes(&env(), 32, 4.0, seed).unwrap();
        let f = synthesize_field(&m, &grid()).unwrap();
        let medium = DispersiveMedium::new(alpha, d, 1.0).unwrap();
        let out = apply_dispersion_series(&f, &medium).unwrap();
        let rel = (f.energy() - out.energy()).abs() / f.energy();
        prop_assert!(rel <= 1e-9, "energy drifted by {}", rel);
    }

    /// Accumulator merges commute up to floating-point reassociation.
    #[test]
    fn accumulator_merge_commutes(seed in 0u64..1_000_000, split in 1usize..19) {
        let g = grid();
        let lags = symmetric_lags(5.0, 0.05);
        let series: Vec<_> = (0..20u64)
            .map(|r| {
                let mut rng = realization_rng(seed, r);
                let m = sample_chaotic_modes_with(&mut rng, &env(), 16, 4.0).unwrap();
                synthesize_field(&m, &g).unwrap().intensity()
            })
            .collect();

        let mut left = CorrelationAccumulator::new(g, &lags, 4.0).unwrap();
        let mut right = CorrelationAccumulator::new(g, &lags, 4.0).unwrap();
        for (k, s) in series.iter().enumerate() {
            if k < split {
                left.push(s, s).unwrap();
            } else {
                right.push(s, s).unwrap();
            }
        }
        let mut ab = CorrelationAccumulator::new(g, &lags, 4.0).unwrap();
        ab.merge(&left).unwrap();
        ab.merge(&right).unwrap();
        let mut ba = CorrelationAccumulator::new(g, &lags, 4.0).unwrap();
        ba.merge(&right).unwrap();
        ba.merge(&left).unwrap();

        let fa = ab.finalize().unwrap();
        let fb = ba.finalize().unwrap();
        for (a, b) in fa.g2.iter().zip(&fb.g2) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    /// |amplitude| never exceeds the total pair amplitude.
    #[test]
    fn coincidence_amplitude_is_bounded(
        tau in -20.0f64..20.0,
        d1 in -5.0f64..5.0,
        d2 in -5.0f64..5.0,
    ) {
        let s = BiphotonSpectrum::gaussian(64, 4.0, 1.0).unwrap();
        let total: f64 = s.amplitudes().iter().sum();
        let a = coincidence_amplitude(
            &s,
            tau,
            0.0,
            &DispersiveMedium::dimensionless(d1).unwrap(),
            &DispersiveMedium::dimensionless(d2).unwrap(),
        );
        prop_assert!(a.norm() <= total * (1.0 + 1e-12));
    }
}
