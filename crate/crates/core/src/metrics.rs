//! Schedule metrics, the overall error-rate estimate and the array-width
//! sweep.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::arch::FpqaConfig;
use crate::circuit::Circuit;
use crate::qaoa::{route_qaoa, EdgeSet};
use crate::qsim::{route_pauli, PauliTerm};
use crate::schedule::{validate, RydbergRole, Schedule, Stage};
use crate::{generic, Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Rydberg stages with at least one pair.
    pub depth: usize,
    pub g1: usize,
    pub g2: usize,
    /// Data atoms plus the peak number of live ancillas.
    pub n_atoms: usize,
    /// Per-move maximum displacement, normalised to the array diagonal.
    pub stage_distances: Vec<f64>,
    /// Pairs per Rydberg stage -> number of such stages.
    pub parallelism_hist: BTreeMap<usize, usize>,
    /// Same, restricted to stages that execute circuit gates (not copies or
    /// recycles).
    pub gate_parallelism_hist: BTreeMap<usize, usize>,
}

impl Metrics {
    fn mean(hist: &BTreeMap<usize, usize>) -> f64 {
        let stages: usize = hist.values().sum();
        if stages == 0 {
            return 0.0;
        }
        let pairs: usize = hist.iter().map(|(k, v)| k * v).sum();
        pairs as f64 / stages as f64
    }

    pub fn mean_parallelism(&self) -> f64 {
        Metrics::mean(&self.parallelism_hist)
    }

    /// Mean gates per gate-executing stage.
    pub fn mean_gate_parallelism(&self) -> f64 {
        Metrics::mean(&self.gate_parallelism_hist)
    }
}

/// Counts everything on a schedule that passes [`validate`].
pub fn evaluate(s: &Schedule) -> Result<Metrics> {
    validate(s).map_err(|v| Error::InvalidSchedule(v.len()))?;
    let mut m = Metrics { n_atoms: s.n_qubits() as usize + s.peak_ancillas(), ..Metrics::default() };
    for st in &s.stages {
        match st {
            Stage::Raman { gates } => m.g1 += gates.len(),
            Stage::Move { max_distance, .. } => m.stage_distances.push(*max_distance),
            Stage::Rydberg { pairs, role, .. } if !pairs.is_empty() => {
                m.depth += 1;
                m.g2 += pairs.len();
                *m.parallelism_hist.entry(pairs.len()).or_default() += 1;
                if *role == RydbergRole::Gate {
                    *m.gate_parallelism_hist.entry(pairs.len()).or_default() += 1;
                }
            }
            _ => {}
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub f1: f64,
    pub f2: f64,
    /// Coherence time in seconds.
    pub t2: f64,
    /// Time to move across the full array, in seconds.
    pub t0: f64,
}

impl Default for NoiseParams {
    fn default() -> NoiseParams {
        NoiseParams { f1: 0.999, f2: 0.999, t2: 1.5, t0: 300e-6 }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.f1 > 0.0 && self.f1 <= 1.0) {
            return Err(Error::InvalidNoise("f1 must lie in (0, 1]"));
        }
        if !(self.f2 > 0.0 && self.f2 <= 1.0) {
            return Err(Error::InvalidNoise("f2 must lie in (0, 1]"));
        }
        if !(self.t2 > 0.0) || !(self.t0 > 0.0) {
            return Err(Error::InvalidNoise("t2 and t0 must be positive"));
        }
        Ok(())
    }
}

/// Exponent of the two-qubit fidelity term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoQubitExponent {
    /// `N · T`: atoms times depth.
    #[default]
    AtomsTimesDepth,
    /// `g2`: the two-qubit gate count.
    GateCount,
}

/// `ε = 1 - f2^E · f1^G1 · exp(-N · Σ T0 √D_i / T2)` with `E` chosen by
/// `mode`. Evaluated in log space.
pub fn fidelity(m: &Metrics, p: &NoiseParams, mode: TwoQubitExponent) -> Result<f64> {
    p.validate()?;
    if let Some(&d) = m.stage_distances.iter().find(|&&d| !(d >= 0.0)) {
        return Err(Error::NegativeDistance(d));
    }
    let e2 = match mode {
        TwoQubitExponent::AtomsTimesDepth => (m.n_atoms * m.depth) as f64,
        TwoQubitExponent::GateCount => m.g2 as f64,
    };
    let travel: f64 = m.stage_distances.iter().map(|&d| p.t0 * libm::sqrt(d)).sum();
    let log_success = e2 * libm::log(p.f2) + m.g1 as f64 * libm::log(p.f1) - m.n_atoms as f64 * travel / p.t2;
    Ok(-libm::expm1(log_success))
}

/// A workload that can be recompiled at any array width.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    /// Any circuit; decomposed to CZ + single-qubit gates first.
    Circuit(Circuit),
    Pauli(Vec<PauliTerm>),
    Qaoa {
        graph: EdgeSet,
        gamma: f64,
    },
}

impl Problem {
    pub fn n_qubits(&self) -> u32 {
        match self {
            Problem::Circuit(c) => c.n_qubits(),
            Problem::Pauli(t) => t.first().map_or(0, |t| t.string.n_qubits()),
            Problem::Qaoa { graph, .. } => graph.n_qubits(),
        }
    }

    pub fn compile(&self, cfg: &FpqaConfig) -> Result<Schedule> {
        match self {
            Problem::Circuit(c) => generic::compile(c, cfg),
            Problem::Pauli(t) => route_pauli(t, cfg),
            Problem::Qaoa { graph, gamma } => route_qaoa(graph, *gamma, cfg),
        }
    }
}

/// Recompiles `problem` on a reading-order array of each width.
pub fn sweep_array_width(problem: &Problem, widths: &[u32]) -> Result<BTreeMap<u32, Metrics>> {
    let n = problem.n_qubits();
    widths
        .iter()
        .map(|&w| {
            let s = problem.compile(&FpqaConfig::for_qubits(n, w))?;
            Ok((w, evaluate(&s)?))
        })
        .collect()
}

/// Width with the smallest depth; ties go to the narrower array.
pub fn argmin_depth(sweep: &BTreeMap<u32, Metrics>) -> Option<u32> {
    sweep.iter().min_by_key(|(w, m)| (m.depth, **w)).map(|(w, _)| *w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::reading_order_mapping;
    use crate::circuit::Gate;
    use crate::schedule::ScheduleBuilder;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn empty_schedule_is_zero() {
        let cfg = FpqaConfig::with_grid(1, 1);
        let s = ScheduleBuilder::new(cfg.clone(), reading_order_mapping(0, &cfg).unwrap()).finish();
        assert_eq!(evaluate(&s).unwrap(), Metrics::default());
    }

    #[test]
    fn single_cz_counts() {
        let c = Circuit::from_gates(2, [Gate::cz(0, 1)]).unwrap();
        let m = evaluate(&generic::route(&c, &FpqaConfig::square_for(2)).unwrap()).unwrap();
        assert_eq!((m.depth, m.g2, m.n_atoms), (3, 3, 3));
        assert_eq!(m.parallelism_hist, BTreeMap::from([(1, 3)]));
        assert_eq!(m.mean_gate_parallelism(), 1.0);
    }

    #[test]
    fn invalid_schedule_is_rejected() {
        let mut s = crate::testutil::single_cz();
        s.stages.retain(|st| !matches!(st, Stage::Transfer { .. }));
        assert!(matches!(evaluate(&s), Err(Error::InvalidSchedule(_))));
    }

    #[test]
    fn perfect_machine() {
        let m = Metrics { depth: 10, g1: 40, g2: 30, n_atoms: 8, stage_distances: vec![0.0; 3], ..Default::default() };
        let p = NoiseParams { f1: 1.0, f2: 1.0, ..Default::default() };
        assert_eq!(fidelity(&m, &p, TwoQubitExponent::AtomsTimesDepth).unwrap(), 0.0);
    }

    #[test]
    fn worked_error_rate() {
        let m = Metrics { depth: 4, g1: 10, g2: 7, n_atoms: 5, stage_distances: vec![0.25], ..Default::default() };
        let p = NoiseParams { f1: 0.999, f2: 0.999, t2: 1.5, t0: 300e-6 };
        let want = 1.0 - 0.999f64.powi(20) * 0.999f64.powi(10) * (-5.0 * (300e-6 * 0.5) / 1.5f64).exp();
        let got = fidelity(&m, &p, TwoQubitExponent::AtomsTimesDepth).unwrap();
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        // frozen: 1 - 0.999^30 * exp(-5e-4)
        assert!((got - 0.030_054_126_936_89).abs() < 1e-9, "{got}");
        let by_gates = fidelity(&m, &p, TwoQubitExponent::GateCount).unwrap();
        assert!(by_gates < got);
    }

    #[test]
    fn noise_validation() {
        let bad = NoiseParams { f2: 0.0, ..Default::default() };
        assert!(matches!(
            fidelity(&Metrics::default(), &bad, TwoQubitExponent::GateCount),
            Err(Error::InvalidNoise(_))
        ));
    }

    #[test]
    fn single_width_sweep() {
        let g = EdgeSet::new(4, [(0, 1), (2, 3)]).unwrap();
        let r = sweep_array_width(&Problem::Qaoa { graph: g, gamma: 0.1 }, &[2]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(argmin_depth(&r), Some(2));
    }

    fn arb_metrics() -> impl Strategy<Value = Metrics> {
        (0usize..50, 0usize..500, 1usize..40, proptest::collection::vec(0.0f64..2.0, 0..20)).prop_map(
            |(depth, g1, n, d)| Metrics {
                depth,
                g1,
                g2: depth * 2,
                n_atoms: n,
                stage_distances: d,
                ..Default::default()
            },
        )
    }

    fn arb_noise() -> impl Strategy<Value = NoiseParams> {
        (0.9f64..=1.0, 0.9f64..=1.0, 0.1f64..10.0, 1e-5f64..1e-3).prop_map(|(f1, f2, t2, t0)| NoiseParams {
            f1,
            f2,
            t2,
            t0,
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn epsilon_is_monotone(m in arb_metrics(), p in arb_noise(), which in 0usize..6, bump in 0.0f64..0.05) {
            let mode = TwoQubitExponent::AtomsTimesDepth;
            let e = fidelity(&m, &p, mode).unwrap();
            prop_assert!((0.0..=1.0).contains(&e));
            let mut m2 = m.clone();
            let mut p2 = p;
            let worse = match which {
                0 => { p2.f1 = (p.f1 - bump).max(1e-3); true }
                1 => { p2.f2 = (p.f2 - bump).max(1e-3); true }
                2 => { m2.depth += 1; true }
                3 => { m2.g1 += 1; true }
                4 => { m2.n_atoms += 1; true }
                _ => {
                    if let Some(d) = m2.stage_distances.first_mut() { *d += bump; }
                    true
                }
            };
            let e2 = fidelity(&m2, &p2, mode).unwrap();
            prop_assert!(!worse || e2 >= e - 1e-15);
        }
    }
}
