//! Intrinsic degree of coherence and the SU(4) Stokes decomposition.
//!
//! For a single qubit the intrinsic degree of coherence is the familiar
//! degree of polarization `P₂ = √(2Tr ρ² − 1)`; for a qubit pair it is
//! `P₂⊗₂ = √((4Tr ρ² − 1)/3)`, which equals the norm of the 15-component
//! Stokes vector of ρ in the generalized Gell-Mann basis.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, C64};
use crate::states::{SingleQubitState, TwoQubitState, XStateParams};

/// Radicands down to this negative value are treated as round-off and clamped.
pub const RADICAND_CLAMP: f64 = -1e-12;

pub(crate) fn clamped_sqrt(x: f64) -> f64 {
    debug_assert!(
        x >= RADICAND_CLAMP || x.is_nan(),
        "radicand {x} is negative"
    );
    x.max(0.0).sqrt()
}

/// ‖ρ − I/d‖², which equals Trρ² − 1/d for unit trace but does not cancel
/// near the maximally mixed state. Callers clip the final value at 1, which
/// pure states can overshoot by an ulp.
fn distance_from_mixed_sqr(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let shift = 1.0 / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let z = if i == j { m[(i, j)] - shift } else { m[(i, j)] };
            acc += z.norm_sqr();
        }
    }
    acc
}

/// Degree of polarization of a single qubit.
pub fn p2(rho: &SingleQubitState) -> f64 {
    (2.0 * distance_from_mixed_sqr(rho.matrix()))
        .sqrt()
        .min(1.0)
}

/// Intrinsic degree of coherence of a two-qubit state.
pub fn p2x2(rho: &TwoQubitState) -> f64 {
    (4.0 / 3.0 * distance_from_mixed_sqr(rho.matrix()))
        .sqrt()
        .min(1.0)
}

pub fn p2x2_from_purity(purity: f64) -> f64 {
    clamped_sqrt((4.0 * purity - 1.0) / 3.0)
}

/// Closed form of [`p2x2`] for an X-state, straight from its parameters.
pub fn p2x2_x(params: &XStateParams) -> f64 {
    let pops: f64 = params.populations().iter().map(|p| p * p).sum();
    let coh = params.c14.norm_sqr() + params.c23.norm_sqr();
    ((4.0f64 / 3.0).sqrt() * clamped_sqrt(pops + 2.0 * coh - 0.25)).min(1.0)
}

pub const STOKES_LEN: usize = 15;

/// The 15 Gell-Mann generators of SU(4), normalized to Tr(ΛⱼΛₖ) = 2δⱼₖ.
///
/// Order (1-based, pairs are basis indices):
/// * Λ₁…Λ₆: symmetric, pairs (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
/// * Λ₇…Λ₁₂: antisymmetric with −i at (j,k) and +i at (k,j), same pair order
/// * Λ₁₃…Λ₁₅: diag(1,−1,0,0), diag(1,1,−2,0)/√3, diag(1,1,1,−3)/√6
///
/// This is exactly the order in which the 16-setting inversion of the
/// tomography module produces its channels.
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    lambdas: [ComplexMatrix; STOKES_LEN],
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl GellMannBasis {
    fn build() -> Self {
        let zero = ComplexMatrix::zeros(4).expect("4x4");
        let mut lambdas = [zero; STOKES_LEN];
        for (k, &(j, l)) in PAIRS.iter().enumerate() {
            let sym = &mut lambdas[k];
            sym[(j, l)] = C64::new(1.0, 0.0);
            sym[(l, j)] = C64::new(1.0, 0.0);
            let anti = &mut lambdas[6 + k];
            anti[(j, l)] = C64::new(0.0, -1.0);
            anti[(l, j)] = C64::new(0.0, 1.0);
        }
        let s3 = 3.0f64.sqrt();
        let s6 = 6.0f64.sqrt();
        lambdas[12] = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 0.0, 0.0]).expect("4x4");
        lambdas[13] =
            ComplexMatrix::from_real_diagonal(&[1.0 / s3, 1.0 / s3, -2.0 / s3, 0.0]).expect("4x4");
        lambdas[14] = ComplexMatrix::from_real_diagonal(&[1.0 / s6, 1.0 / s6, 1.0 / s6, -3.0 / s6])
            .expect("4x4");
        Self { lambdas }
    }

    pub fn lambdas(&self) -> &[ComplexMatrix; STOKES_LEN] {
        &self.lambdas
    }

    /// Λⱼ with a 1-based index, matching the rⱼ numbering.
    pub fn get(&self, j: usize) -> &ComplexMatrix {
        &self.lambdas[j - 1]
    }
}

pub fn gellmann_basis() -> &'static GellMannBasis {
    static BASIS: OnceLock<GellMannBasis> = OnceLock::new();
    BASIS.get_or_init(GellMannBasis::build)
}

/// Tr(AB) without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.dim();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Components r₁…r₁₅ with ρ = (I + √6·Σ rⱼΛⱼ)/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StokesVector(pub [f64; STOKES_LEN]);

impl StokesVector {
    pub fn zero() -> Self {
        Self([0.0; STOKES_LEN])
    }

    /// rⱼ with a 1-based index.
    pub fn r(&self, j: usize) -> f64 {
        self.0[j - 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|r| r * r).sum()
    }

    /// Rebuilds (I + √6·Σ rⱼΛⱼ)/4. The result need not be positive.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let basis = gellmann_basis();
        let mut m = ComplexMatrix::identity(4).expect("4x4");
        for (r, lambda) in self.0.iter().zip(basis.lambdas()) {
            m = &m + &lambda.scale(6.0f64.sqrt() * r);
        }
        m.scale(0.25)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// rⱼ = √(2/3)·Tr(ρΛⱼ)
pub fn stokes_decompose(rho: &TwoQubitState) -> StokesVector {
    let scale = (2.0f64 / 3.0).sqrt();
    let basis = gellmann_basis();
    StokesVector(std::array::from_fn(|j| {
        scale * trace_of_product(rho.matrix(), &basis.lambdas[j]).re
    }))
}

pub fn p2x2_from_stokes(r: &StokesVector) -> f64 {
    r.norm_sqr().sqrt()
}
