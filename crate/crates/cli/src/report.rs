//! Everything `analyze` knows about a single two-qubit state.

use serde::{Deserialize, Serialize};

use qubit_coherence::coherence::{p2, p2x2, stokes_decompose};
use qubit_coherence::correlations::{
    audit_bounds, chsh_max, concurrence, geometric_discord, participation_ratio, x_state_discord,
};
use qubit_coherence::{BoundReport, StokesVector, Subsystem, TwoQubitState};

/// Off-X entries must be below this for discord to be reported.
pub const X_SPARSITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub p2x2: f64,
    pub p2_a: f64,
    pub p2_b: f64,
    pub concurrence: f64,
    pub chsh_max: f64,
    pub geometric_discord: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discord: Option<f64>,
    pub participation_ratio: f64,
    pub entanglement_criterion: bool,
    pub bounds: Vec<BoundReport>,
    pub stokes: StokesVector,
}

impl AnalysisReport {
    pub fn new(rho: &TwoQubitState) -> Self {
        let audit = audit_bounds(rho);
        Self {
            p2x2: p2x2(rho),
            p2_a: p2(&rho.reduced(Subsystem::A)),
            p2_b: p2(&rho.reduced(Subsystem::B)),
            concurrence: concurrence(rho),
            chsh_max: chsh_max(rho),
            geometric_discord: geometric_discord(rho),
            discord: rho.x_params(X_SPARSITY_TOL).map(|p| x_state_discord(&p)),
            participation_ratio: participation_ratio(rho),
            entanglement_criterion: audit.entanglement_criterion,
            bounds: audit.bounds,
            stokes: stokes_decompose(rho),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qubit_coherence::states::{bell_state, random_mixed, BellState};
    use qubit_coherence::RngSeed;

    #[test]
    fn bell_report() {
        let r = AnalysisReport::new(&bell_state(BellState::PhiPlus));
        assert!((r.p2x2 - 1.0).abs() < 1e-12);
        assert!((r.concurrence - 1.0).abs() < 1e-12);
        assert!((r.chsh_max - 8f64.sqrt()).abs() < 1e-12);
        assert!((r.discord.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.bounds.iter().all(|b| b.satisfied && b.is_consistent()));
    }

    #[test]
    fn discord_absent_off_x() {
        let rho = random_mixed(&mut RngSeed(3).stream(0), 4).unwrap();
        let r = AnalysisReport::new(&rho);
        assert!(r.discord.is_none());
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("\"discord\""));
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
