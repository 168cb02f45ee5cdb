//! Entanglement and correlation measures, and the coherence bounds on them.
//!
//! The measures here are computed independently of the intrinsic degree of
//! coherence (Horodecki CHSH maximum, Dakić closed-form geometric discord,
//! Wootters concurrence), so every bound is checked against a separate route.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::{clamped_sqrt, p2, p2x2, p2x2_x};
use crate::error::{check_unit_interval, Result};
use crate::linalg::{hermitian_eigenvalues, kron, pauli, ComplexMatrix, Subsystem, C64};
use crate::states::{random_x_state, RngSeed, TwoQubitState, XStateParams};

/// Default slack tolerance for bound checks.
pub const BOUND_TOL: f64 = 1e-10;
/// Slack tolerance for checks involving entropic discord.
pub const DISCORD_TOL: f64 = 1e-9;
/// Margin by which the entanglement criterion must hold.
pub const CRITERION_TOL: f64 = 1e-12;

/// Eigenvalues of ρ below this are treated as exact zeros by [`concurrence`].
const RANK_CUTOFF: f64 = 1e-14;

/// Outcome of checking `quantity ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub quantity: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// `bound − quantity`
    pub slack: f64,
    pub tolerance: f64,
}

impl BoundReport {
    pub fn check(name: impl Into<String>, quantity: f64, bound: f64, tolerance: f64) -> Self {
        let slack = bound - quantity;
        Self {
            name: name.into(),
            quantity,
            bound,
            satisfied: slack >= -tolerance,
            slack,
            tolerance,
        }
    }

    /// `satisfied` agrees with `slack` and `tolerance`.
    pub fn is_consistent(&self) -> bool {
        self.satisfied == (self.slack >= -self.tolerance)
            && (self.slack - (self.bound - self.quantity)).abs() <= f64::EPSILON * 4.0
    }
}

fn sigma_yy() -> ComplexMatrix {
    kron(&pauli::y(), &pauli::y()).expect("2x2 factors")
}

/// Wootters concurrence.
///
/// The λᵢ are the singular values of τ = Wᵀ(σ_y⊗σ_y)W, where the columns of
/// W are √μₖ·eₖ over the nonzero eigenpairs of ρ. They coincide with the
/// square roots of the eigenvalues of √ρ·ρ̃·√ρ, but never take the square
/// root of a round-off-sized eigenvalue for rank-deficient ρ.
pub fn concurrence(rho: &TwoQubitState) -> f64 {
    let lambdas = wootters_lambdas(rho);
    let tail: f64 = lambdas[1..].iter().sum();
    (lambdas[0] - tail).clamp(0.0, 1.0)
}

/// The four Wootters λᵢ, descending (zeros padded for rank-deficient ρ).
pub fn wootters_lambdas(rho: &TwoQubitState) -> [f64; 4] {
    let eig = rho.eigen();
    let yy = sigma_yy();
    let w: Vec<Vec<C64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > RANK_CUTOFF)
        .map(|(k, &mu)| eig.vector(k).into_iter().map(|z| z * mu.sqrt()).collect())
        .collect();
    let rank = w.len();
    let mut out = [0.0; 4];
    if rank == 0 {
        return out;
    }
    // τ_jk = w_jᵀ Σ w_k
    let tau = |j: usize, k: usize| -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                s += w[j][a] * yy[(a, b)] * w[k][b];
            }
        }
        s
    };
    if rank == 1 {
        out[0] = tau(0, 0).norm();
        return out;
    }
    let dim = if rank == 2 { 2 } else { 4 };
    let mut t = ComplexMatrix::zeros(dim).expect("2 or 4");
    for j in 0..rank {
        for k in 0..rank {
            t[(j, k)] = tau(j, k);
        }
    }
    let gram = t * t.adjoint();
    let ev = hermitian_eigenvalues(&gram).expect("Gram matrices are Hermitian");
    for (o, e) in out.iter_mut().zip(ev) {
        *o = e.max(0.0).sqrt();
    }
    out
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    -xlog2x(x) - xlog2x(1.0 - x)
}

/// Eigenvalues of an X-state, from its two 2×2 blocks.
pub fn x_state_eigenvalues(params: &XStateParams) -> [f64; 4] {
    let block = |a: f64, b: f64, c: f64| {
        let mean = 0.5 * (a + b);
        let rad = (0.25 * (a - b) * (a - b) + c * c).sqrt();
        [mean + rad, mean - rad]
    };
    let [l1, l2] = block(params.p11, params.p44, params.c14.norm());
    let [l3, l4] = block(params.p22, params.p33, params.c23.norm());
    [l1, l2, l3, l4]
}

/// The two candidate values whose minimum is the X-state discord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XDiscordBranches {
    pub q1: f64,
    pub q2: f64,
}

/// Q₁ = Σλlog₂λ + H(ρ₁₁+ρ₃₃) + H(τ) and Q₂ = Σλlog₂λ − Σρᵢᵢlog₂ρᵢᵢ.
pub fn x_state_discord_branches(params: &XStateParams) -> XDiscordBranches {
    let neg_entropy: f64 = x_state_eigenvalues(params)
        .iter()
        .map(|&l| xlog2x(l.max(0.0)))
        .sum();
    let pops = params.populations();
    let diag_neg_entropy: f64 = pops.iter().map(|&p| xlog2x(p)).sum();
    let marginal = binary_entropy(params.p11 + params.p33);
    let tau = x_state_tau(params);
    XDiscordBranches {
        q1: neg_entropy + marginal + binary_entropy(tau),
        q2: neg_entropy - diag_neg_entropy,
    }
}

/// τ = (1 + √((1 − 2(ρ₃₃+ρ₄₄))² + 4(|ρ₁₄|+|ρ₂₃|)²))/2
pub fn x_state_tau(params: &XStateParams) -> f64 {
    let z = 1.0 - 2.0 * (params.p33 + params.p44);
    let c = params.c14.norm() + params.c23.norm();
    0.5 * (1.0 + (z * z + 4.0 * c * c).sqrt())
}

/// Closed-form quantum discord of an X-state, min(Q₁, Q₂).
pub fn x_state_discord(params: &XStateParams) -> f64 {
    let b = x_state_discord_branches(params);
    b.q1.min(b.q2).max(0.0)
}

/// Tᵢⱼ = Tr(ρ·σᵢ⊗σⱼ)
pub fn correlation_matrix(rho: &TwoQubitState) -> [[f64; 3]; 3] {
    let paulis = pauli::all();
    let mut t = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            let op = kron(si, sj).expect("2x2 factors");
            t[i][j] = crate::coherence::trace_of_product(rho.matrix(), &op).re;
        }
    }
    t
}

/// Bloch vector of one reduced state, e.g. xᵢ = Tr(ρ·σᵢ⊗I) for side A.
pub fn local_bloch_vector(rho: &TwoQubitState, side: Subsystem) -> [f64; 3] {
    let reduced = rho.reduced(side);
    let paulis = pauli::all();
    std::array::from_fn(|i| crate::coherence::trace_of_product(reduced.matrix(), &paulis[i]).re)
}

/// Descending eigenvalues of a real symmetric 3×3 matrix.
fn symmetric3_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    // Embed in a 4×4 block-diagonal matrix; the padded zero row and column
    // are never touched by the Jacobi rotations.
    let mut padded = ComplexMatrix::zeros(4).expect("4x4");
    for i in 0..3 {
        for j in 0..3 {
            padded[(i, j)] = C64::new(0.5 * (m[i][j] + m[j][i]), 0.0);
        }
    }
    let mut ev = hermitian_eigenvalues(&padded).expect("symmetric");
    // drop one zero, the one that came from the padding
    let pad = ev.iter().position(|&x| x == 0.0).unwrap_or_else(|| {
        ev.iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, _)| k)
            .expect("four eigenvalues")
    });
    ev.remove(pad);
    [ev[0], ev[1], ev[2]]
}

fn mat3_mul_transpose(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    // a · bᵀ
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[j][k]).sum()))
}

fn transpose3(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

/// Maximal CHSH value over all measurement settings, 2√(t₁ + t₂) with t₁ ≥ t₂
/// the largest eigenvalues of TᵀT.
pub fn chsh_max(rho: &TwoQubitState) -> f64 {
    let t = correlation_matrix(rho);
    let tt = transpose3(&t);
    let ttt = mat3_mul_transpose(&tt, &tt);
    let ev = symmetric3_eigenvalues(&ttt);
    2.0 * clamped_sqrt(ev[0].max(0.0) + ev[1].max(0.0))
}

/// Geometric discord (measurement on A): (‖x‖² + ‖T‖²_F − k_max)/4.
pub fn geometric_discord(rho: &TwoQubitState) -> f64 {
    let x = local_bloch_vector(rho, Subsystem::A);
    let t = correlation_matrix(rho);
    let mut k = mat3_mul_transpose(&t, &t);
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] += x[i] * x[j];
        }
    }
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let t2: f64 = t.iter().flatten().map(|v| v * v).sum();
    let kmax = symmetric3_eigenvalues(&k)[0];
    (0.25 * (x2 + t2 - kmax)).max(0.0)
}

/// Largest CHSH value compatible with a given P₂⊗₂.
pub fn bell_bound(p: f64) -> Result<f64> {
    check_unit_interval("P2x2", p)?;
    Ok(if p >= 1.0 / 3.0f64.sqrt() {
        (6.0 * p * p + 2.0).sqrt()
    } else {
        2.0 * 3.0f64.sqrt() * p
    })
}

/// Largest quantum discord compatible with a given P₂⊗₂.
pub fn discord_bound(p: f64) -> Result<f64> {
    check_unit_interval("P2x2", p)?;
    Ok(1.5f64.sqrt() * p)
}

/// 1/Tr(ρ²)
pub fn participation_ratio(rho: &TwoQubitState) -> f64 {
    1.0 / rho.purity()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Range of concurrence allowed by the global and marginal coherences.
///
/// Evaluated through purities: 1 − (P₂ᵏ)² = 2(1 − Tr ρₖ²) and
/// (3/2)P₂⊗₂² − 1/2 − (P₂ᴬ)² = 2(Tr ρ² − Tr ρ_A²).
pub fn concurrence_bounds(rho: &TwoQubitState) -> ConcurrenceBounds {
    let pa = rho.reduced(Subsystem::A).purity();
    let pb = rho.reduced(Subsystem::B).purity();
    let upper_a = clamped_sqrt(2.0 * (1.0 - pa));
    let upper_b = clamped_sqrt(2.0 * (1.0 - pb));
    let lower = (2.0 * (rho.purity() - pa)).max(0.0).sqrt();
    ConcurrenceBounds {
        lower,
        upper: upper_a.min(upper_b).min(1.0),
    }
}

/// 3P₂⊗₂² − 1 > 2(P₂ᴬ)² certifies entanglement.
pub fn entanglement_criterion(rho: &TwoQubitState) -> bool {
    let p = p2x2(rho);
    let pa = p2(&rho.reduced(Subsystem::A));
    3.0 * p * p - 1.0 - 2.0 * pa * pa > CRITERION_TOL
}

/// Every coherence bound evaluated on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsAudit {
    pub bounds: Vec<BoundReport>,
    pub entanglement_criterion: bool,
    pub all_satisfied: bool,
}

pub fn audit_bounds(rho: &TwoQubitState) -> BoundsAudit {
    let p = p2x2(rho);
    let pa = p2(&rho.reduced(Subsystem::A));
    let pb = p2(&rho.reduced(Subsystem::B));
    let c = concurrence(rho);
    let cb = concurrence_bounds(rho);
    let dg = geometric_discord(rho);

    let mut bounds = vec![
        BoundReport::check(
            "chsh_max <= bell_bound(P2x2)",
            chsh_max(rho),
            bell_bound(p).expect("P2x2 in [0,1]"),
            BOUND_TOL,
        ),
        BoundReport::check(
            "sqrt(geometric_discord) <= sqrt(3/4) P2x2",
            dg.sqrt(),
            0.75f64.sqrt() * p,
            BOUND_TOL,
        ),
        BoundReport::check(
            "concurrence <= min_k sqrt(1 - P2_k^2)",
            c,
            cb.upper,
            BOUND_TOL,
        ),
        BoundReport::check(
            "concurrence^2 <= 1 - (P2_A^2 + P2_B^2)/2",
            c * c,
            1.0 - 0.5 * (pa * pa + pb * pb),
            BOUND_TOL,
        ),
        BoundReport::check(
            "sqrt(max(0, 3/2 P2x2^2 - 1/2 - P2_A^2)) <= concurrence",
            cb.lower,
            c,
            BOUND_TOL,
        ),
    ];
    if let Some(params) = rho.x_params(1e-12) {
        let d = x_state_discord(&params);
        let px = p2x2_x(&params);
        bounds.push(BoundReport::check(
            "discord <= sqrt(3/2) P2x2",
            d,
            discord_bound(px).expect("P2x2 in [0,1]"),
            DISCORD_TOL,
        ));
        bounds.push(BoundReport::check(
            "discord <= P2x2 (X-states)",
            d,
            px,
            DISCORD_TOL,
        ));
    }
    let all_satisfied = bounds.iter().all(|b| b.satisfied);
    BoundsAudit {
        bounds,
        entanglement_criterion: entanglement_criterion(rho),
        all_satisfied,
    }
}

/// One point of the discord-versus-coherence scatter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterRecord {
    pub index: u64,
    pub p2x2: f64,
    pub discord: f64,
}

pub fn scatter_record(seed: RngSeed, index: u64) -> ScatterRecord {
    let params = random_x_state(&mut seed.stream(index));
    ScatterRecord {
        index,
        p2x2: p2x2_x(&params),
        discord: x_state_discord(&params),
    }
}

/// `n` random X-states, record `k` drawn from substream `k` of `seed`.
///
/// Runs on the current rayon pool; the output does not depend on its size.
pub fn scatter_sample(n: u64, seed: RngSeed) -> Vec<ScatterRecord> {
    (0..n)
        .into_par_iter()
        .map(|k| scatter_record(seed, k))
        .collect()
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    s
}

pub const SCATTER_HEADER: &str = "index,p2x2,discord";

pub fn write_scatter_csv<W: Write>(records: &[ScatterRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{SCATTER_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{}",
            r.index,
            format_significant(r.p2x2, 12),
            format_significant(r.discord, 12)
        )?;
    }
    out.flush()
}

/// Envelope statistics of a scatter against D ≤ P₂⊗₂ and D ≤ √(3/2)·P₂⊗₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSummary {
    pub n: u64,
    /// max(D − P₂⊗₂) over all records.
    pub max_discord_minus_p2x2: f64,
    pub violations_tight: u64,
    pub violations_coherence_bound: u64,
    pub max_discord: f64,
    /// Smallest P₂⊗₂ − D among records with P₂⊗₂ ≥ 0.9.
    pub min_gap_near_pure: Option<f64>,
    /// Smallest P₂⊗₂ − D among records with |P₂⊗₂ − 1/3| < 0.05.
    pub min_gap_near_third: Option<f64>,
}

pub fn summarize_scatter(records: &[ScatterRecord]) -> ScatterSummary {
    let mut s = ScatterSummary {
        n: records.len() as u64,
        max_discord_minus_p2x2: f64::NEG_INFINITY,
        violations_tight: 0,
        violations_coherence_bound: 0,
        max_discord: 0.0,
        min_gap_near_pure: None,
        min_gap_near_third: None,
    };
    let fold_min = |slot: &mut Option<f64>, v: f64| {
        *slot = Some(slot.map_or(v, |m| m.min(v)));
    };
    for r in records {
        let gap = r.p2x2 - r.discord;
        s.max_discord_minus_p2x2 = s.max_discord_minus_p2x2.max(-gap);
        if gap < -DISCORD_TOL {
            s.violations_tight += 1;
        }
        if 1.5f64.sqrt() * r.p2x2 - r.discord < -DISCORD_TOL {
            s.violations_coherence_bound += 1;
        }
        s.max_discord = s.max_discord.max(r.discord);
        if r.p2x2 >= 0.9 {
            fold_min(&mut s.min_gap_near_pure, gap);
        }
        if (r.p2x2 - 1.0 / 3.0).abs() < 0.05 {
            fold_min(&mut s.min_gap_near_third, gap);
        }
    }
    s
}
