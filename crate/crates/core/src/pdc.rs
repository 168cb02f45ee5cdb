//! Coherence transfer from a pump photon to the down-converted pair.
//!
//! A trace-preserving, entropy non-decreasing generation process cannot make
//! the pair purer than the pump, which caps P₂⊗₂ of the pair at
//! √((1 + 2P₂²)/3). An isometric (unitary) process meets the cap exactly;
//! any added depolarization falls strictly below it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coherence::p2x2;
use crate::correlations::{BoundReport, BOUND_TOL};
use crate::error::{check_unit_interval, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::states::{random_complex_vector, RngSeed, SingleQubitState, TwoQubitState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpectrum {
    pub eps1: f64,
    pub eps2: f64,
    pub p2_pump: f64,
}

pub fn pump_spectrum(p2_pump: f64) -> Result<PumpSpectrum> {
    check_unit_interval("P2 of the pump", p2_pump)?;
    Ok(PumpSpectrum {
        eps1: 0.5 * (1.0 + p2_pump),
        eps2: 0.5 * (1.0 - p2_pump),
        p2_pump,
    })
}

/// Diagonal pump state with the given degree of polarization.
pub fn pump_state(p2_pump: f64) -> Result<SingleQubitState> {
    let s = pump_spectrum(p2_pump)?;
    SingleQubitState::from_diagonal(s.eps1, s.eps2)
}

/// Upper bound √((1 + 2P²)/3) on the pair's P₂⊗₂.
pub fn p2x2_bound(p2_pump: f64) -> Result<f64> {
    check_unit_interval("P2 of the pump", p2_pump)?;
    Ok(((1.0 + 2.0 * p2_pump * p2_pump) / 3.0).sqrt())
}

/// 4×2 matrix with orthonormal columns, V†V = I₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    columns: [[C64; 4]; 2],
}

impl Isometry {
    /// Gram–Schmidt on two independent complex Gaussian vectors.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut a = random_complex_vector(rng);
        normalize(&mut a);
        let mut b = random_complex_vector(rng);
        let overlap: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        for (bi, ai) in b.iter_mut().zip(&a) {
            *bi -= overlap * ai;
        }
        normalize(&mut b);
        Self { columns: [a, b] }
    }

    /// V ρ V†
    pub fn apply(&self, pump: &SingleQubitState) -> Result<TwoQubitState> {
        let p = pump.matrix();
        let mut out = ComplexMatrix::zeros(4)?;
        for i in 0..4 {
            for j in 0..4 {
                let mut s = C64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        s += self.columns[a][i] * p[(a, b)] * self.columns[b][j].conj();
                    }
                }
                out[(i, j)] = s;
            }
        }
        for i in 0..4 {
            out[(i, i)] = C64::new(out[(i, i)].re, 0.0);
        }
        TwoQubitState::new(out)
    }

    /// max |V†V − I|
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                let g: C64 = self.columns[a]
                    .iter()
                    .zip(&self.columns[b])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - want).norm());
            }
        }
        worst
    }
}

fn normalize(v: &mut [C64; 4]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Pair state from an isometric embedding of the pump, ρ_si = VρV†.
pub fn unitary_generation<R: Rng + ?Sized>(
    pump: &SingleQubitState,
    rng: &mut R,
) -> Result<TwoQubitState> {
    Isometry::random(rng).apply(pump)
}

/// (1 − q)ρ + q·I/4
pub fn depolarize(rho: &TwoQubitState, q: f64) -> Result<TwoQubitState> {
    check_unit_interval("depolarizing q", q)?;
    let mixed = TwoQubitState::maximally_mixed();
    TwoQubitState::new(&rho.matrix().scale(1.0 - q) + &mixed.matrix().scale(q))
}

/// How the pump is turned into a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenerationChannel {
    /// Random isometry.
    Unitary,
    /// Random isometry followed by global depolarization with strength `q`.
    Depolarizing { q: f64 },
}

impl GenerationChannel {
    pub fn apply(&self, pump: &SingleQubitState, seed: RngSeed) -> Result<TwoQubitState> {
        let si = unitary_generation(pump, &mut seed.stream(0))?;
        match *self {
            GenerationChannel::Unitary => Ok(si),
            GenerationChannel::Depolarizing { q } => depolarize(&si, q),
        }
    }
}

/// Purity comparison of pump and pair spectra, plus partial-sum dominance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    /// Σλᵢ² ≤ Σεᵢ²
    pub purity: BoundReport,
    /// λ₁ ≤ ε₁
    pub leading: bool,
    /// λ₁ + λ₂ ≤ ε₁ + ε₂
    pub leading_pair: bool,
}

impl MajorizationReport {
    pub fn ok(&self) -> bool {
        self.purity.satisfied && self.leading && self.leading_pair
    }
}

pub fn majorization_check(pump: &SingleQubitState, si: &TwoQubitState) -> MajorizationReport {
    let eps = pump.eigenvalues();
    let lam = si.eigenvalues();
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    MajorizationReport {
        purity: BoundReport::check("sum lambda^2 <= sum eps^2", sq(&lam), sq(&eps), BOUND_TOL),
        leading: lam[0] <= eps[0] + BOUND_TOL,
        leading_pair: lam[0] + lam[1] <= eps[0] + eps[1] + BOUND_TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdcReport {
    pub p2_pump: f64,
    pub bound: f64,
    pub p2x2_si: f64,
    pub slack: f64,
    pub majorization_ok: bool,
}

pub fn pdc_study(p2_pump: f64, channel: GenerationChannel, seed: RngSeed) -> Result<PdcReport> {
    let pump = pump_state(p2_pump)?;
    let bound = p2x2_bound(p2_pump)?;
    let si = channel.apply(&pump, seed)?;
    let p = p2x2(&si);
    Ok(PdcReport {
        p2_pump,
        bound,
        p2x2_si: p,
        slack: bound - p,
        majorization_ok: majorization_check(&pump, &si).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::werner;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spectrum_examples() {
        let s = pump_spectrum(1.0).unwrap();
        assert_eq!((s.eps1, s.eps2), (1.0, 0.0));
        let s = pump_spectrum(0.0).unwrap();
        assert_eq!((s.eps1, s.eps2), (0.5, 0.5));
        let s = pump_spectrum(0.6).unwrap();
        assert_abs_diff_eq!(s.eps1, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eps2, 0.2, epsilon = 1e-15);
        assert!(pump_spectrum(1.2).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_abs_diff_eq!(p2x2_bound(1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            p2x2_bound(0.0).unwrap(),
            1.0 / 3.0f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(p2x2_bound(0.5).unwrap(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(p2x2_bound(-0.1).is_err());
    }

    #[test]
    fn isometry_is_orthonormal_and_reproducible() {
        let a = Isometry::random(&mut RngSeed(4).stream(0));
        let b = Isometry::random(&mut RngSeed(4).stream(0));
        assert_eq!(a, b);
        assert!(a.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn unitary_generation_examples() {
        let mut rng = RngSeed(9).stream(0);
        let pure = pump_state(1.0).unwrap();
        let si = unitary_generation(&pure, &mut rng).unwrap();
        assert_abs_diff_eq!(p2x2(&si), 1.0, epsilon = 1e-12);

        let unpolarized = pump_state(0.0).unwrap();
        let si = unitary_generation(&unpolarized, &mut rng).unwrap();
        assert_abs_diff_eq!(p2x2(&si), 1.0 / 3.0f64.sqrt(), epsilon = 1e-12);

        let pump = pump_state(0.37).unwrap();
        let si = unitary_generation(&pump, &mut rng).unwrap();
        let ev = si.eigenvalues();
        let eps = pump.eigenvalues();
        for (got, want) in ev.iter().zip([eps[0], eps[1], 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn depolarize_examples() {
        let w = werner(1.0).unwrap();
        assert_eq!(depolarize(&w, 0.0).unwrap(), w);
        assert!(
            depolarize(&w, 1.0)
                .unwrap()
                .matrix()
                .max_abs_diff(TwoQubitState::maximally_mixed().matrix())
                < 1e-16
        );
        let w7 = werner(0.7).unwrap();
        assert!(
            depolarize(&w, 0.3)
                .unwrap()
                .matrix()
                .max_abs_diff(w7.matrix())
                < 1e-15
        );
        assert!(depolarize(&w, 1.5).is_err());
    }

    #[test]
    fn majorization_examples() {
        let pump = pump_state(0.8).unwrap();
        let si = unitary_generation(&pump, &mut RngSeed(1).stream(0)).unwrap();
        let r = majorization_check(&pump, &si);
        assert!(r.ok());
        assert!(r.purity.slack.abs() < 1e-12);

        let noisy = depolarize(&si, 0.5).unwrap();
        let r = majorization_check(&pump, &noisy);
        assert!(r.ok());
        assert!(r.purity.slack > 0.0);

        let pure = pump_state(1.0).unwrap();
        let r = majorization_check(&pure, &TwoQubitState::maximally_mixed());
        assert!(r.ok());
        assert_abs_diff_eq!(r.purity.quantity, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(r.purity.bound, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn channels_preserve_trace() {
        let pump = pump_state(0.4).unwrap();
        for channel in [
            GenerationChannel::Unitary,
            GenerationChannel::Depolarizing { q: 0.25 },
        ] {
            let si = channel.apply(&pump, RngSeed(3)).unwrap();
            assert_abs_diff_eq!(si.matrix().trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn study_reports() {
        let r = pdc_study(1.0, GenerationChannel::Unitary, RngSeed(0)).unwrap();
        assert_abs_diff_eq!(r.p2x2_si, 1.0, epsilon = 1e-12);
        assert!(r.slack.abs() < 1e-12 && r.majorization_ok);
        let r = pdc_study(0.0, GenerationChannel::Unitary, RngSeed(0)).unwrap();
        assert_abs_diff_eq!(r.p2x2_si, 1.0 / 3.0f64.sqrt(), epsilon = 1e-12);
        let r = pdc_study(0.8, GenerationChannel::Depolarizing { q: 0.5 }, RngSeed(0)).unwrap();
        assert!(r.slack > 0.0 && r.majorization_ok);
    }
}
