//! Density matrices: validation, named constructors, and seeded samplers.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, partial_trace, purity, ComplexMatrix, HermitianEigen,
    Subsystem, C64, HERMITIAN_TOL,
};

/// Smallest eigenvalue a density matrix may have before it is rejected.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = -1e-10;

fn validate_matrix(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::InvalidDimension {
            expected: dim,
            got: m.dim(),
        });
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > HERMITIAN_TOL || trace.im.abs() > HERMITIAN_TOL {
        return Err(Error::TraceNotUnit { trace: trace.re });
    }
    let min_eigenvalue = *hermitian_eigenvalues(m)?
        .last()
        .expect("non-empty spectrum");
    if min_eigenvalue < NEGATIVE_EIGENVALUE_TOL {
        return Err(Error::NegativeEigenvalue { min_eigenvalue });
    }
    Ok(())
}

/// A validated 4×4 two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState(ComplexMatrix);

/// A validated 2×2 single-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitState(ComplexMatrix);

impl TwoQubitState {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_matrix(&m, 4)?;
        Ok(Self(m))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(4).expect("4x4").scale(0.25))
    }

    /// Normalized projector onto `psi`.
    pub fn pure(psi: &[C64; 4]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(Error::TraceNotUnit { trace: 0.0 });
        }
        Self::new(ComplexMatrix::outer(psi)?.scale(1.0 / norm2))
    }

    pub fn product(a: &SingleQubitState, b: &SingleQubitState) -> Self {
        Self(crate::linalg::kron(a.matrix(), b.matrix()).expect("2x2 factors"))
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn reduced(&self, keep: Subsystem) -> SingleQubitState {
        SingleQubitState(partial_trace(&self.0, keep).expect("4x4 state"))
    }

    pub fn purity(&self) -> f64 {
        purity(&self.0)
    }

    pub fn eigen(&self) -> HermitianEigen {
        hermitian_eigen(&self.0).expect("validated states are Hermitian")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values
    }

    /// U ρ U† for a unitary U. The caller is responsible for U being unitary.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.0.conjugate_by(u))
    }

    /// Reads the seven X-state parameters back if every off-X entry is
    /// below `tol` in magnitude.
    pub fn x_params(&self, tol: f64) -> Option<XStateParams> {
        let m = &self.0;
        for i in 0..4 {
            for j in 0..4 {
                let on_x = i == j || i + j == 3;
                if !on_x && m[(i, j)].norm() >= tol {
                    return None;
                }
            }
        }
        Some(XStateParams {
            p11: m[(0, 0)].re,
            p22: m[(1, 1)].re,
            p33: m[(2, 2)].re,
            p44: m[(3, 3)].re,
            c14: m[(0, 3)],
            c23: m[(1, 2)],
        })
    }
}

impl SingleQubitState {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_matrix(&m, 2)?;
        Ok(Self(m))
    }

    pub fn from_diagonal(p0: f64, p1: f64) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(&[p0, p1])?)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        purity(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.0).expect("validated states are Hermitian")
    }
}

/// Either kind of validated state, as returned by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum State {
    Single(SingleQubitState),
    Pair(TwoQubitState),
}

/// Checks Hermiticity, unit trace and positivity, dispatching on dimension.
pub fn validate(m: ComplexMatrix) -> Result<State> {
    match m.dim() {
        2 => SingleQubitState::new(m).map(State::Single),
        _ => TwoQubitState::new(m).map(State::Pair),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn vector(self) -> [C64; 4] {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let o = C64::new(0.0, 0.0);
        match self {
            BellState::PhiPlus => [s, o, o, s],
            BellState::PhiMinus => [s, o, o, -s],
            BellState::PsiPlus => [o, s, s, o],
            BellState::PsiMinus => [o, s, -s, o],
        }
    }
}

pub fn bell_state(kind: BellState) -> TwoQubitState {
    TwoQubitState::pure(&kind.vector()).expect("Bell vectors are normalized")
}

/// p·|Ψ⁻⟩⟨Ψ⁻| + (1 − p)·I/4
pub fn werner(p: f64) -> Result<TwoQubitState> {
    check_unit_interval("werner p", p)?;
    let singlet = bell_state(BellState::PsiMinus);
    let mixed = TwoQubitState::maximally_mixed();
    TwoQubitState::new(&singlet.matrix().scale(p) + &mixed.matrix().scale(1.0 - p))
}

/// Populations and the two coherences of a state with X-shaped support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub c14: C64,
    pub c23: C64,
}

impl XStateParams {
    pub fn populations(&self) -> [f64; 4] {
        [self.p11, self.p22, self.p33, self.p44]
    }

    pub fn validate(&self) -> Result<()> {
        let pops = self.populations();
        if let Some(p) = pops.iter().find(|p| **p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidXState(format!("negative population {p}")));
        }
        let total: f64 = pops.iter().sum();
        if (total - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::InvalidXState(format!(
                "populations sum to {total}, not 1"
            )));
        }
        let outer = (self.p11 * self.p44).sqrt();
        if self.c14.norm() > outer + HERMITIAN_TOL {
            return Err(Error::InvalidXState(format!(
                "|c14| = {} exceeds sqrt(p11 p44) = {outer}",
                self.c14.norm()
            )));
        }
        let inner = (self.p22 * self.p33).sqrt();
        if self.c23.norm() > inner + HERMITIAN_TOL {
            return Err(Error::InvalidXState(format!(
                "|c23| = {} exceeds sqrt(p22 p33) = {inner}",
                self.c23.norm()
            )));
        }
        Ok(())
    }

    /// The matrix itself, without validation.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::from_real_diagonal(&self.populations()).expect("4x4");
        m[(0, 3)] = self.c14;
        m[(3, 0)] = self.c14.conj();
        m[(1, 2)] = self.c23;
        m[(2, 1)] = self.c23.conj();
        m
    }
}

pub fn x_state(params: &XStateParams) -> Result<TwoQubitState> {
    params.validate()?;
    TwoQubitState::new(params.matrix())
}

/// Seed for the reproducible samplers.
///
/// Sample `k` of any stream is drawn from ChaCha12 seeded with `seed` and
/// switched to stream `k`, so a sample depends only on `(seed, k)` and never
/// on how the index range is split across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn stream(self, index: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }

    /// A derived seed for an independent family of streams.
    pub fn derive(self, tag: u64) -> RngSeed {
        let mut rng = ChaCha12Rng::seed_from_u64(self.0);
        rng.set_stream(u64::MAX - tag);
        RngSeed(rng.random())
    }
}

fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * TAU)
}

/// Random X-state: flat Dirichlet populations, coherence magnitudes uniform
/// on [0, √(pᵢᵢpⱼⱼ)], independent uniform phases.
pub fn random_x_state<R: Rng + ?Sized>(rng: &mut R) -> XStateParams {
    let draws: [f64; 4] = std::array::from_fn(|_| Exp1.sample(rng));
    let total: f64 = draws.iter().sum();
    let [p11, p22, p33, p44] = draws.map(|d| d / total);
    let m14 = rng.random::<f64>() * (p11 * p44).sqrt();
    let m23 = rng.random::<f64>() * (p22 * p33).sqrt();
    XStateParams {
        p11,
        p22,
        p33,
        p44,
        c14: uniform_phase(rng) * m14,
        c23: uniform_phase(rng) * m23,
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Ginibre ensemble: ρ = GG†/Tr(GG†) with G a 4×rank complex Gaussian matrix.
pub fn random_mixed<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Result<TwoQubitState> {
    if !(1..=4).contains(&rank) {
        return Err(Error::OutOfRange {
            name: "rank",
            value: rank as f64,
            range: "{1, 2, 3, 4}",
        });
    }
    let g: Vec<[C64; 4]> = (0..rank)
        .map(|_| std::array::from_fn(|_| complex_gaussian(rng)))
        .collect();
    let mut m = ComplexMatrix::zeros(4)?;
    for col in &g {
        m = &m + &ComplexMatrix::outer(col)?;
    }
    let tr = m.trace().re;
    let mut m = m.scale(1.0 / tr);
    // make the diagonal exactly real so validation sees no round-off
    for i in 0..4 {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    TwoQubitState::new(m)
}

/// Random 4-vector with independent standard complex Gaussian entries.
pub(crate) fn random_complex_vector<R: Rng + ?Sized>(rng: &mut R) -> [C64; 4] {
    std::array::from_fn(|_| complex_gaussian(rng))
}

/// On-disk representation of a state: `{"dim": 4, "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = m.rows();
        Self {
            dim: m.dim(),
            re: rows
                .iter()
                .map(|r| r.iter().map(|z| z.re).collect())
                .collect(),
            im: rows
                .iter()
                .map(|r| r.iter().map(|z| z.im).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.re.len() != self.dim {
            return Err(Error::Parse(format!(
                "declared dim {} but `re` has {} rows",
                self.dim,
                self.re.len()
            )));
        }
        ComplexMatrix::from_parts(&self.re, &self.im)
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }
}

/// Parses a state file and validates the matrix it holds.
pub fn parse_state(json: &str) -> Result<State> {
    validate(StateFile::parse(json)?.to_matrix()?)
}
