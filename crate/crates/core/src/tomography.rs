//! Sixteen-setting coincidence scheme for measuring P₂⊗₂.
//!
//! Each photon passes a phase retarder (δ) and a rotation plate (θ) before a
//! horizontal-polarization detector; the coincidence probability at a
//! setting is ⟨HH|UρU†|HH⟩ with U = U_s ⊗ U_i. Fifteen fixed linear
//! combinations of the sixteen probabilities give the Stokes vector up to a
//! single overall factor, [`STOKES_CALIBRATION`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::coherence::{p2x2_from_stokes, stokes_decompose, StokesVector, STOKES_LEN};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, ComplexMatrix, C64};
use crate::states::{RngSeed, TwoQubitState, NEGATIVE_EIGENVALUE_TOL};

pub const NUM_SETTINGS: usize = 16;

/// Factor turning the raw inversion combinations into Stokes components.
///
/// Every raw combination equals Tr(ρΛⱼ)/2 while rⱼ = √(2/3)·Tr(ρΛⱼ), so the
/// factor is 4/√6 for all fifteen channels. [`calibrate`] recovers it
/// numerically.
pub const STOKES_CALIBRATION: f64 = 1.632_993_161_855_452; // 4/√6

/// Waveplate angles for one coincidence measurement, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub theta_s: f64,
    pub theta_i: f64,
    pub delta_s: f64,
    pub delta_i: f64,
}

impl MeasurementSetting {
    pub const fn new(theta_s: f64, theta_i: f64, delta_s: f64, delta_i: f64) -> Self {
        Self {
            theta_s,
            theta_i,
            delta_s,
            delta_i,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.theta_s, self.theta_i, self.delta_s, self.delta_i]
    }

    /// U = U_s ⊗ U_i
    pub fn unitary(&self) -> ComplexMatrix {
        kron(
            &analyzer_unitary(self.theta_s, self.delta_s),
            &analyzer_unitary(self.theta_i, self.delta_i),
        )
        .expect("2x2 factors")
    }
}

/// Rotation plate after phase retarder:
/// [[cos θ, sin θ], [−sin θ, cos θ]]·diag(1, e^{iδ}).
pub fn analyzer_unitary(theta: f64, delta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let phase = C64::from_polar(1.0, delta);
    ComplexMatrix::from_rows(&[
        vec![C64::new(c, 0.0), phase * s],
        vec![C64::new(-s, 0.0), phase * c],
    ])
    .expect("2x2")
}

const Q: f64 = FRAC_PI_4;
const H: f64 = FRAC_PI_2;

const SETTINGS: [MeasurementSetting; NUM_SETTINGS] = [
    MeasurementSetting::new(0.0, 0.0, 0.0, 0.0),
    MeasurementSetting::new(0.0, H, 0.0, 0.0),
    MeasurementSetting::new(H, 0.0, 0.0, 0.0),
    MeasurementSetting::new(H, H, 0.0, 0.0),
    MeasurementSetting::new(0.0, Q, 0.0, 0.0),
    MeasurementSetting::new(0.0, Q, 0.0, H),
    MeasurementSetting::new(H, Q, 0.0, 0.0),
    MeasurementSetting::new(H, Q, 0.0, H),
    MeasurementSetting::new(Q, 0.0, 0.0, 0.0),
    MeasurementSetting::new(Q, 0.0, H, 0.0),
    MeasurementSetting::new(Q, H, 0.0, 0.0),
    MeasurementSetting::new(Q, H, H, 0.0),
    MeasurementSetting::new(Q, Q, 0.0, 0.0),
    MeasurementSetting::new(Q, Q, H, 0.0),
    MeasurementSetting::new(Q, Q, 0.0, H),
    MeasurementSetting::new(Q, Q, H, H),
];

/// The sixteen settings, in measurement order M₁…M₁₆.
pub fn standard_settings() -> &'static [MeasurementSetting; NUM_SETTINGS] {
    &SETTINGS
}

/// ⟨HH|UρU†|HH⟩
pub fn coincidence_probability(rho: &TwoQubitState, setting: &MeasurementSetting) -> f64 {
    let u = setting.unitary();
    // row 0 of U is ⟨HH|U
    let mut m = C64::new(0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            m += u[(0, a)] * rho.matrix()[(a, b)] * u[(0, b)].conj();
        }
    }
    m.re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Noise {
    Exact,
    /// Poisson counts with mean `shots`·Mᵢ per setting.
    Shots(u64),
}

/// The sixteen coincidence values M₁…M₁₆.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceSet {
    pub m: [f64; NUM_SETTINGS],
    pub shots: Option<u64>,
}

impl CoincidenceSet {
    pub fn exact(m: [f64; NUM_SETTINGS]) -> Self {
        Self { m, shots: None }
    }

    /// Mᵢ with a 1-based index.
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.m[i - 1]
    }
}

/// Runs the sixteen settings on `rho`. Setting `i` draws its counts from
/// substream `i` of `seed`; the seed is unused for [`Noise::Exact`].
pub fn simulate_measurements(
    rho: &TwoQubitState,
    noise: Noise,
    seed: RngSeed,
) -> Result<CoincidenceSet> {
    let exact: [f64; NUM_SETTINGS] =
        std::array::from_fn(|i| coincidence_probability(rho, &SETTINGS[i]));
    match noise {
        Noise::Exact => Ok(CoincidenceSet::exact(exact)),
        Noise::Shots(0) => Err(Error::OutOfRange {
            name: "shots",
            value: 0.0,
            range: ">= 1",
        }),
        Noise::Shots(n) => {
            let m = std::array::from_fn(|i| {
                let mut rng = seed.stream(i as u64);
                poisson_count(&mut rng, n as f64 * exact[i].max(0.0)) / n as f64
            });
            Ok(CoincidenceSet { m, shots: Some(n) })
        }
    }
}

fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng)
}

/// The fifteen inversion combinations, before calibration.
pub fn raw_stokes(set: &CoincidenceSet) -> [f64; STOKES_LEN] {
    let m = |i: usize| set.get(i);
    let middle: f64 = (5..=12).map(m).sum::<f64>() - (1..=4).map(m).sum::<f64>();
    let s3 = 3.0f64.sqrt();
    let s6 = 6.0f64.sqrt();
    [
        -0.5 * (m(1) + m(2) - 2.0 * m(5)),
        -0.5 * (m(1) + m(3) - 2.0 * m(9)),
        0.5 * (m(12) - m(11) + m(10) - m(9) + m(8) - m(7) + m(6) - m(5) + 2.0 * (m(13) - m(16))),
        0.5 * (2.0 * (m(13) + m(16)) - middle),
        -0.5 * (m(2) + m(4) - 2.0 * m(11)),
        -0.5 * (m(3) + m(4) - 2.0 * m(7)),
        0.5 * (m(1) + m(2) - 2.0 * m(6)),
        0.5 * (m(1) + m(3) - 2.0 * m(10)),
        -0.5 * (2.0 * (m(14) + m(15)) - middle),
        -0.5 * (-m(12) + m(11) - m(10) + m(9) + m(8) - m(7) + m(6) - m(5) + 2.0 * (m(14) - m(15))),
        0.5 * (m(2) + m(4) - 2.0 * m(12)),
        0.5 * (m(3) + m(4) - 2.0 * m(8)),
        0.5 * (m(1) - m(2)),
        (m(1) + m(2) - 2.0 * m(3)) / (2.0 * s3),
        (m(1) + m(2) + m(3) - 3.0 * m(4)) / (2.0 * s6),
    ]
}

pub fn invert_stokes(set: &CoincidenceSet) -> StokesVector {
    StokesVector(raw_stokes(set).map(|r| r * STOKES_CALIBRATION))
}

pub fn reconstruct_p2x2(set: &CoincidenceSet) -> f64 {
    p2x2_from_stokes(&invert_stokes(set))
}

/// Per-channel ratio between the direct decomposition and the raw inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub per_channel: [f64; STOKES_LEN],
}

impl Calibration {
    pub fn mean(&self) -> f64 {
        self.per_channel.iter().sum::<f64>() / STOKES_LEN as f64
    }

    /// Largest deviation of any channel from the mean.
    pub fn spread(&self) -> f64 {
        let mean = self.mean();
        self.per_channel
            .iter()
            .map(|k| (k - mean).abs())
            .fold(0.0, f64::max)
    }
}

/// Least-squares fit, channel by channel, of
/// `stokes_decompose(ρ)ⱼ = κⱼ · raw_stokes(simulate(ρ))ⱼ` over `states`.
pub fn calibrate(states: &[TwoQubitState]) -> Calibration {
    let mut num = [0.0; STOKES_LEN];
    let mut den = [0.0; STOKES_LEN];
    for rho in states {
        let direct = stokes_decompose(rho);
        let set = simulate_measurements(rho, Noise::Exact, RngSeed(0)).expect("exact");
        let raw = raw_stokes(&set);
        for j in 0..STOKES_LEN {
            num[j] += direct.0[j] * raw[j];
            den[j] += raw[j] * raw[j];
        }
    }
    Calibration {
        per_channel: std::array::from_fn(|j| num[j] / den[j]),
    }
}

/// Result of running the whole scheme on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    pub settings: Vec<[f64; 4]>,
    pub m: Vec<f64>,
    pub stokes: StokesVector,
    pub p2x2: f64,
    /// Whether the matrix rebuilt from `stokes` is positive semidefinite.
    pub physical: bool,
    pub shots: Option<u64>,
}

pub fn is_physical(stokes: &StokesVector) -> bool {
    let m = stokes.to_matrix();
    hermitian_eigenvalues(&m)
        .map(|ev| ev[3] >= NEGATIVE_EIGENVALUE_TOL)
        .unwrap_or(false)
}

pub fn run_tomography(
    rho: &TwoQubitState,
    noise: Noise,
    seed: RngSeed,
) -> Result<TomographyReport> {
    let set = simulate_measurements(rho, noise, seed)?;
    Ok(report_from_coincidences(&set))
}

pub fn report_from_coincidences(set: &CoincidenceSet) -> TomographyReport {
    let stokes = invert_stokes(set);
    TomographyReport {
        settings: SETTINGS.iter().map(MeasurementSetting::as_array).collect(),
        m: set.m.to_vec(),
        p2x2: p2x2_from_stokes(&stokes),
        physical: is_physical(&stokes),
        stokes,
        shots: set.shots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::p2x2;
    use crate::states::{bell_state, random_mixed, werner, BellState};
    use approx::assert_abs_diff_eq;

    fn hh() -> TwoQubitState {
        TwoQubitState::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap())
            .unwrap()
    }

    /// The expanded coincidence formula, term by term, with ρ_ab read as
    /// ⟨b|ρ|a⟩ (see `printed_expansion_is_sandwich_of_transpose`).
    fn expanded_probability(rho: &TwoQubitState, s: &MeasurementSetting) -> f64 {
        let r = |a: usize, b: usize| rho.matrix()[(b - 1, a - 1)];
        expansion(r, s)
    }

    fn expansion(r: impl Fn(usize, usize) -> C64, s: &MeasurementSetting) -> f64 {
        let (ss, cs) = s.theta_s.sin_cos();
        let (si, ci) = s.theta_i.sin_cos();
        let e = |x: f64| C64::from_polar(1.0, x);
        let (ds, di) = (s.delta_s, s.delta_i);
        let block = |a: usize| {
            (r(1, a) * ci + r(2, a) * e(-di) * si) * cs
                + (r(3, a) * e(-ds) * ci + r(4, a) * e(-(ds + di)) * si) * ss
        };
        let m = block(1) * (cs * ci)
            + e(di) * block(2) * (cs * si)
            + e(ds) * block(3) * (ss * ci)
            + e(ds + di) * block(4) * (ss * si);
        m.re
    }

    #[test]
    fn analyzer_examples() {
        let id = analyzer_unitary(0.0, 0.0);
        assert!(id.max_abs_diff(&ComplexMatrix::identity(2).unwrap()) < 1e-16);
        let rot = analyzer_unitary(FRAC_PI_2, 0.0);
        let want = ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(rot.max_abs_diff(&want) < 1e-15);
        let ret = analyzer_unitary(0.0, FRAC_PI_2);
        assert!((ret[(1, 1)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(ret[(0, 1)].norm() < 1e-16);
        for (t, d) in [(0.3, 1.1), (2.0, -0.4), (FRAC_PI_4, FRAC_PI_2)] {
            let u = analyzer_unitary(t, d);
            let uu = u * u.adjoint();
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(2).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn settings_table_rows() {
        let s = standard_settings();
        assert_eq!(s[0].as_array(), [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s[5].as_array(), [0.0, FRAC_PI_4, 0.0, FRAC_PI_2]);
        assert_eq!(
            s[15].as_array(),
            [FRAC_PI_4, FRAC_PI_4, FRAC_PI_2, FRAC_PI_2]
        );
    }

    #[test]
    fn coincidence_examples() {
        let origin = MeasurementSetting::new(0.0, 0.0, 0.0, 0.0);
        assert_abs_diff_eq!(
            coincidence_probability(&hh(), &origin),
            1.0,
            epsilon = 1e-15
        );
        let phi = bell_state(BellState::PhiPlus);
        assert_abs_diff_eq!(coincidence_probability(&phi, &origin), 0.5, epsilon = 1e-15);
        let diag = MeasurementSetting::new(FRAC_PI_4, FRAC_PI_4, 0.0, 0.0);
        assert_abs_diff_eq!(coincidence_probability(&phi, &diag), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn expansion_agrees_with_sandwich() {
        let mut rng = RngSeed(91).stream(0);
        for k in 0..1000 {
            let rho = random_mixed(&mut rng, 1 + k % 4).unwrap();
            let s = MeasurementSetting::new(
                rng.random::<f64>() * 3.2,
                rng.random::<f64>() * 3.2,
                rng.random::<f64>() * 6.3,
                rng.random::<f64>() * 6.3,
            );
            let a = coincidence_probability(&rho, &s);
            let b = expanded_probability(&rho, &s);
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    /// Read literally (ρ_ab = ⟨a|ρ|b⟩) the expansion is the sandwich on ρᵀ.
    #[test]
    fn printed_expansion_is_sandwich_of_transpose() {
        let mut rng = RngSeed(92).stream(0);
        for _ in 0..200 {
            let rho = random_mixed(&mut rng, 3).unwrap();
            let s = MeasurementSetting::new(0.4, 1.3, 0.9, 2.2);
            let literal = expansion(|a, b| rho.matrix()[(a - 1, b - 1)], &s);
            let transposed = TwoQubitState::new(rho.matrix().transpose()).unwrap();
            assert_abs_diff_eq!(
                literal,
                coincidence_probability(&transposed, &s),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn exact_simulation_examples() {
        let set =
            simulate_measurements(&TwoQubitState::maximally_mixed(), Noise::Exact, RngSeed(0))
                .unwrap();
        for m in set.m {
            assert_abs_diff_eq!(m, 0.25, epsilon = 1e-15);
        }
        assert_eq!(invert_stokes(&set), StokesVector::zero());

        let set = simulate_measurements(&hh(), Noise::Exact, RngSeed(0)).unwrap();
        assert_abs_diff_eq!(set.get(1), 1.0, epsilon = 1e-15);
        for i in 2..=4 {
            assert_abs_diff_eq!(set.get(i), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(raw_stokes(&set)[12], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            invert_stokes(&set).r(13),
            (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn calibration_constant_is_uniform() {
        assert_abs_diff_eq!(STOKES_CALIBRATION, 4.0 / 6.0f64.sqrt(), epsilon = 1e-15);
        let mut rng = RngSeed(17).stream(0);
        let states: Vec<_> = (0..200)
            .map(|k| random_mixed(&mut rng, 1 + k % 4).unwrap())
            .collect();
        let cal = calibrate(&states);
        for k in cal.per_channel {
            assert_abs_diff_eq!(k, STOKES_CALIBRATION, epsilon = 1e-10);
        }
        assert!(cal.spread() < 1e-10);
    }

    #[test]
    fn reconstruction_examples() {
        let exact = |rho: &TwoQubitState| {
            reconstruct_p2x2(&simulate_measurements(rho, Noise::Exact, RngSeed(0)).unwrap())
        };
        assert_abs_diff_eq!(
            exact(&TwoQubitState::maximally_mixed()),
            0.0,
            epsilon = 1e-15
        );
        for kind in BellState::ALL {
            assert_abs_diff_eq!(exact(&bell_state(kind)), 1.0, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(exact(&werner(0.7).unwrap()), 0.7, epsilon = 1e-10);
        let mut rng = RngSeed(18).stream(0);
        for rank in 1..=4 {
            let rho = random_mixed(&mut rng, rank).unwrap();
            assert_abs_diff_eq!(exact(&rho), p2x2(&rho), epsilon = 1e-10);
        }
    }

    #[test]
    fn shot_noise_is_close_and_seeded() {
        let phi = bell_state(BellState::PhiPlus);
        let exact = simulate_measurements(&phi, Noise::Exact, RngSeed(0)).unwrap();
        let noisy = simulate_measurements(&phi, Noise::Shots(1_000_000), RngSeed(5)).unwrap();
        assert_eq!(noisy.shots, Some(1_000_000));
        for (a, b) in exact.m.iter().zip(noisy.m) {
            assert!((a - b).abs() < 5e-3);
        }
        let again = simulate_measurements(&phi, Noise::Shots(1_000_000), RngSeed(5)).unwrap();
        assert_eq!(noisy, again);
        assert!(simulate_measurements(&phi, Noise::Shots(0), RngSeed(5)).is_err());
    }

    #[test]
    fn shot_noise_converges_for_werner() {
        let rho = werner(0.5).unwrap();
        let set = simulate_measurements(&rho, Noise::Shots(10_000_000), RngSeed(2024)).unwrap();
        assert!((reconstruct_p2x2(&set) - 0.5).abs() < 2e-3);
    }

    #[test]
    fn low_shot_reports_flag_unphysical_estimates() {
        let phi = bell_state(BellState::PhiPlus);
        let exact = run_tomography(&phi, Noise::Exact, RngSeed(0)).unwrap();
        assert!(exact.physical);
        let unphysical = (0..20)
            .map(|s| run_tomography(&phi, Noise::Shots(10_000), RngSeed(s)).unwrap())
            .filter(|r| !r.physical)
            .count();
        assert!(unphysical > 0);
    }
}
