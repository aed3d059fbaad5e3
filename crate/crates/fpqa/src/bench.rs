//! Seeded benchmark generators: random circuits, random Pauli strings and
//! QAOA graphs.

use std::f64::consts::TAU;

use fpqa_core::circuit::{Axis, Circuit, Gate, Pauli, PauliString};
use fpqa_core::qaoa::EdgeSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Configuration-model attempts before a regular graph is declared
/// infeasible.
const REGULAR_ATTEMPTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BenchKind {
    /// `n · cnot_factor` CNOTs.
    RandomCircuit {
        n: u32,
        cnot_factor: u32,
    },
    PauliStrings {
        n: u32,
        count: usize,
        p: f64,
    },
    QaoaRandom {
        n: u32,
        edge_p: f64,
    },
    QaoaRegular {
        n: u32,
        k: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchSpec {
    pub kind: BenchKind,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bench {
    Circuit(Circuit),
    Pauli(Vec<PauliString>),
    Graph(EdgeSet),
}

impl BenchSpec {
    pub fn generate(&self) -> Result<Bench> {
        Ok(match self.kind {
            BenchKind::RandomCircuit { n, cnot_factor } => {
                Bench::Circuit(gen_random_circuit(n, cnot_factor, self.seed)?)
            }
            BenchKind::PauliStrings { n, count, p } => Bench::Pauli(gen_pauli_strings(n, count, p, self.seed)?),
            BenchKind::QaoaRandom { n, edge_p } => Bench::Graph(gen_er_graph(n, edge_p, self.seed)?),
            BenchKind::QaoaRegular { n, k } => Bench::Graph(gen_regular_graph(n, k, self.seed)?),
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Probability(p))
    }
}

fn random_rotations(c: &mut Circuit, rng: &mut ChaCha8Rng) {
    for q in 0..c.n_qubits() {
        let axis = [Axis::X, Axis::Y, Axis::Z][rng.random_range(0..3)];
        c.push(Gate::rot(axis, rng.random_range(0.0..TAU), q)).unwrap();
    }
}

/// Layers of disjoint random CNOTs with one random-axis rotation per qubit
/// before, between and after them. Exactly `n · factor` CNOTs.
pub fn gen_random_circuit(n: u32, factor: u32, seed: u64) -> Result<Circuit> {
    let total = n as usize * factor as usize;
    if total > 0 && n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    let mut qubits: Vec<u32> = (0..n).collect();
    let mut placed = 0;
    random_rotations(&mut c, &mut rng);
    while placed < total {
        qubits.shuffle(&mut rng);
        for pair in qubits.chunks_exact(2).take(total - placed) {
            c.push(Gate::cnot(pair[0], pair[1])).unwrap();
            placed += 1;
        }
        random_rotations(&mut c, &mut rng);
    }
    Ok(c)
}

/// Each position is non-identity with probability `p`, uniform over
/// `X, Y, Z`. All-identity draws are resampled.
pub fn gen_pauli_strings(n: u32, count: usize, p: f64, seed: u64) -> Result<Vec<PauliString>> {
    check_p(p)?;
    if n == 0 && count > 0 {
        return Err(Error::TooFewQubits(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let ops: Vec<Pauli> = (0..n)
            .map(|_| if rng.random_bool(p) { [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)] } else { Pauli::I })
            .collect();
        let s = PauliString::new(ops);
        if s.weight() > 0 {
            out.push(s);
        }
    }
    Ok(out)
}

/// Erdős–Rényi graph: each pair is an edge with probability `p`.
pub fn gen_er_graph(n: u32, p: f64, seed: u64) -> Result<EdgeSet> {
    check_p(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(EdgeSet::new(n, edges)?)
}

/// Uniform simple `k`-regular graph by the pairing model, rejecting
/// pairings with loops or multi-edges.
pub fn gen_regular_graph(n: u32, k: u32, seed: u64) -> Result<EdgeSet> {
    if k >= n || (n as u64 * k as u64) % 2 == 1 {
        return Err(Error::InfeasibleRegular { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<u32> = (0..n).flat_map(|v| std::iter::repeat_n(v, k as usize)).collect();
    'attempt: for _ in 0..REGULAR_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = std::collections::BTreeSet::new();
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Ok(EdgeSet::new(n, seen)?);
    }
    Err(Error::InfeasibleRegular { n, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpqa_core::circuit::GateKind;

    fn cnots(c: &Circuit) -> usize {
        c.gates().iter().filter(|g| g.kind() == GateKind::Cnot).count()
    }

    #[test]
    fn random_circuit_counts() {
        assert_eq!(cnots(&gen_random_circuit(5, 2, 1).unwrap()), 10);
        for f in [2, 5, 10, 20, 50] {
            assert_eq!(cnots(&gen_random_circuit(7, f, 3).unwrap()), 7 * f as usize);
        }
        let c = gen_random_circuit(4, 0, 9).unwrap();
        assert!(!c.is_empty() && c.two_qubit_count() == 0);
        assert!(matches!(gen_random_circuit(1, 2, 0), Err(Error::TooFewQubits(1))));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_random_circuit(6, 5, 42).unwrap(), gen_random_circuit(6, 5, 42).unwrap());
        assert_ne!(gen_random_circuit(6, 5, 42).unwrap(), gen_random_circuit(6, 5, 43).unwrap());
        assert_eq!(gen_pauli_strings(8, 10, 0.3, 7).unwrap(), gen_pauli_strings(8, 10, 0.3, 7).unwrap());
        assert_eq!(gen_er_graph(20, 0.2, 7).unwrap(), gen_er_graph(20, 0.2, 7).unwrap());
        assert_eq!(gen_regular_graph(20, 3, 7).unwrap(), gen_regular_graph(20, 3, 7).unwrap());
    }

    #[test]
    fn full_pauli_strings() {
        for s in gen_pauli_strings(10, 50, 1.0, 0).unwrap() {
            assert_eq!(s.weight(), 10);
        }
    }

    #[test]
    fn pauli_weight_mean() {
        // Binomial(100, 0.1) has mean 10 and sd 3; the mean of 100 draws
        // has sd 0.3. Resampling all-I strings is negligible here.
        let strings = gen_pauli_strings(100, 100, 0.1, 11).unwrap();
        let mean = strings.iter().map(|s| s.weight()).sum::<usize>() as f64 / 100.0;
        assert!((mean - 10.0).abs() < 0.9, "{mean}");
        assert!(strings.iter().all(|s| s.weight() > 0));
    }

    #[test]
    fn er_edge_count() {
        // 4950 pairs at p = 0.3: mean 1485, sd ≈ 32.2
        let g = gen_er_graph(100, 0.3, 5).unwrap();
        assert!((g.len() as f64 - 1485.0).abs() < 3.0 * 32.25, "{}", g.len());
        assert!(matches!(gen_er_graph(10, 0.0, 0), Err(Error::Probability(_))));
        assert!(matches!(gen_er_graph(10, 1.5, 0), Err(Error::Probability(_))));
        assert_eq!(gen_er_graph(6, 1.0, 0).unwrap().len(), 15);
    }

    #[test]
    fn regular_graphs() {
        let g = gen_regular_graph(6, 3, 0).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.degrees().iter().all(|&d| d == 3));
        for (n, k) in [(10, 3), (20, 3), (100, 3), (100, 4), (50, 5)] {
            let g = gen_regular_graph(n, k, 1).unwrap();
            assert!(g.degrees().iter().all(|&d| d == k), "{n} {k}");
        }
        assert!(matches!(gen_regular_graph(5, 3, 0), Err(Error::InfeasibleRegular { .. })));
        assert!(matches!(gen_regular_graph(4, 4, 0), Err(Error::InfeasibleRegular { .. })));
    }
}
