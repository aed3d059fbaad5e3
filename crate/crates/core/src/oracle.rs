//! Dense statevector simulator used as ground truth for compiled schedules.
//!
//! Qubit `q` is bit `q` of the amplitude index (little-endian).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arch::AtomId;
use crate::circuit::{Axis, Circuit, Gate, GateKind};
use crate::schedule::{Schedule, Stage, Transfer};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 14;

/// Largest `|1>` weight tolerated on an ancilla when it is unloaded.
pub const LEAKAGE_TOLERANCE: f64 = 1e-9;

const RANDOM_INPUTS: usize = 20;

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn expi(theta: f64) -> Complex64 {
    c(libm::cos(theta), libm::sin(theta))
}

/// Matrix of a single-qubit gate kind.
pub fn matrix(kind: GateKind) -> Option<Mat2> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let h = c(FRAC_1_SQRT_2, 0.0);
    Some(match kind {
        GateKind::H => [[h, h], [h, -h]],
        GateKind::S => [[one, z], [z, c(0.0, 1.0)]],
        GateKind::Sdg => [[one, z], [z, c(0.0, -1.0)]],
        GateKind::Rot(axis, t) => {
            let (co, si) = (libm::cos(t / 2.0), libm::sin(t / 2.0));
            match axis {
                Axis::X => [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]],
                Axis::Y => [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]],
                Axis::Z => [[expi(-t / 2.0), z], [z, expi(t / 2.0)]],
            }
        }
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<StateVector> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits { n: n_qubits, max: MAX_QUBITS });
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n_qubits];
        amps[0] = c(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Product state from per-qubit `(amp0, amp1)` pairs, normalised per
    /// qubit.
    pub fn product(qubits: &[(Complex64, Complex64)]) -> Result<StateVector> {
        let mut s = StateVector::zero(qubits.len())?;
        for (i, amp) in s.amps.iter_mut().enumerate() {
            *amp = qubits.iter().enumerate().fold(c(1.0, 0.0), |acc, (q, &(a0, a1))| {
                let norm = libm::sqrt(a0.norm_sqr() + a1.norm_sqr());
                acc * if i >> q & 1 == 1 { a1 / norm } else { a0 / norm }
            });
        }
        Ok(s)
    }

    /// Random single-qubit states with Haar-distributed Bloch vectors.
    pub fn random_product<R: Rng>(n_qubits: usize, rng: &mut R) -> Result<StateVector> {
        let qubits: Vec<_> = (0..n_qubits)
            .map(|_| {
                let cos_t: f64 = rng.random_range(-1.0..=1.0);
                let phi: f64 = rng.random_range(0.0..2.0 * PI);
                let half = libm::acos(cos_t) / 2.0;
                (c(libm::cos(half), 0.0), expi(phi) * libm::sin(half))
            })
            .collect();
        StateVector::product(&qubits)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Option<StateVector> {
        let n = amps.len().trailing_zeros() as usize;
        (amps.len().is_power_of_two() && n <= MAX_QUBITS).then_some(StateVector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        if self.n_qubits != other.n_qubits {
            return 0.0;
        }
        self.inner(other).norm_sqr()
    }

    pub fn apply_1q(&mut self, m: &Mat2, q: usize) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Controlled phase `diag(1, 1, 1, e^{i phase})`.
    pub fn apply_cphase(&mut self, phase: f64, a: usize, b: usize) {
        let mask = (1 << a) | (1 << b);
        let f = expi(phase);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp *= f;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let q = g.qubits();
        let (a, b) = (q[0] as usize, q.get(1).map(|&x| x as usize).unwrap_or(0));
        match g.kind() {
            GateKind::Cz => self.apply_cphase(PI, a, b),
            GateKind::Cnot => self.apply_cnot(a, b),
            GateKind::Swap => {
                self.apply_cnot(a, b);
                self.apply_cnot(b, a);
                self.apply_cnot(a, b);
            }
            GateKind::Zz(t) => {
                let mask = (1 << a) | (1 << b);
                let (even, odd) = (expi(-t / 2.0), expi(t / 2.0));
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if (i & mask).count_ones() % 2 == 0 { even } else { odd };
                }
            }
            kind => self.apply_1q(&matrix(kind).unwrap(), a),
        }
    }

    /// Weight of `|1>` on qubit `q`.
    pub fn prob_one(&self, q: usize) -> f64 {
        self.amps.iter().enumerate().filter(|(i, _)| i >> q & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projects qubit `q` onto `|0>` and renormalises.
    fn reset_to_zero(&mut self, q: usize) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i >> q & 1 == 1 {
                *a = c(0.0, 0.0);
            }
        }
        let n = libm::sqrt(self.norm_sqr());
        for a in &mut self.amps {
            *a /= n;
        }
    }

    /// Keeps the first `n` qubits, assuming every other qubit is `|0>`.
    fn truncate(&self, n: usize) -> StateVector {
        StateVector { n_qubits: n, amps: self.amps[..1 << n].to_vec() }
    }

    /// Tensor product with `extra` qubits in `|0>` placed above the
    /// existing ones.
    fn extend(&self, extra: usize) -> Result<StateVector> {
        let n = self.n_qubits + extra;
        let mut out = StateVector::zero(n)?;
        out.amps[0] = c(0.0, 0.0);
        out.amps[..self.amps.len()].copy_from_slice(&self.amps);
        Ok(out)
    }
}

pub fn simulate(c: &Circuit) -> Result<StateVector> {
    simulate_from(c, StateVector::zero(c.n_qubits() as usize)?)
}

pub fn simulate_from(c: &Circuit, mut state: StateVector) -> Result<StateVector> {
    if state.n_qubits != c.n_qubits() as usize {
        return Err(Error::MalformedSchedule(alloc::format!(
            "input state has {} qubits, circuit {}",
            state.n_qubits,
            c.n_qubits()
        )));
    }
    for g in c.gates() {
        state.apply_gate(g);
    }
    Ok(state)
}

pub fn simulate_schedule(s: &Schedule) -> Result<StateVector> {
    simulate_schedule_from(s, StateVector::zero(s.n_qubits() as usize)?)
}

/// Replays Raman and Rydberg stages on data atoms plus ancilla slots. Moves
/// act as identity. An unloaded ancilla must be back in `|0>`.
pub fn simulate_schedule_from(s: &Schedule, input: StateVector) -> Result<StateVector> {
    let n = s.n_qubits() as usize;
    if input.n_qubits != n {
        return Err(Error::MalformedSchedule(alloc::format!(
            "input state has {} qubits, schedule {}",
            input.n_qubits,
            n
        )));
    }
    let peak = s.peak_ancillas();
    if n + peak > MAX_QUBITS {
        return Err(Error::TooManyQubits { n: n + peak, max: MAX_QUBITS });
    }
    let mut state = input.extend(peak)?;
    let mut free: Vec<usize> = (n..n + peak).rev().collect();
    let mut slots: BTreeMap<u32, usize> = BTreeMap::new();
    for &a in s.initial_layout.aod_atoms.keys() {
        slots.insert(a, free.pop().unwrap());
    }
    let slot = |slots: &BTreeMap<u32, usize>, atom: AtomId| -> Result<usize> {
        match atom {
            AtomId::Data(q) if (q as usize) < n => Ok(q as usize),
            AtomId::Ancilla(a) => slots
                .get(&a)
                .copied()
                .ok_or_else(|| Error::MalformedSchedule(alloc::format!("ancilla a{a} is not loaded"))),
            _ => Err(Error::MalformedSchedule(alloc::format!("unknown atom {atom}"))),
        }
    };
    let retire = |state: &mut StateVector, ancilla: u32, q: usize| -> Result<()> {
        let leakage = state.prob_one(q);
        if leakage >= LEAKAGE_TOLERANCE {
            return Err(Error::AncillaNotDisentangled { ancilla, leakage });
        }
        state.reset_to_zero(q);
        Ok(())
    };
    for st in &s.stages {
        match st {
            Stage::Raman { gates } => {
                for g in gates {
                    let m = matrix(g.kind).ok_or_else(|| {
                        Error::MalformedSchedule(alloc::format!("{} in a Raman stage", g.kind.name()))
                    })?;
                    state.apply_1q(&m, slot(&slots, g.atom)?);
                }
            }
            Stage::Rydberg { pairs, phase, .. } => {
                for &(a, b) in pairs {
                    state.apply_cphase(*phase, slot(&slots, a)?, slot(&slots, b)?);
                }
            }
            Stage::Transfer { transfers } => {
                for t in transfers {
                    match *t {
                        Transfer::Load { ancilla, .. } => {
                            let q = free.pop().ok_or_else(|| {
                                Error::MalformedSchedule(alloc::format!("ancilla a{ancilla} loaded twice"))
                            })?;
                            if slots.insert(ancilla, q).is_some() {
                                return Err(Error::MalformedSchedule(alloc::format!(
                                    "ancilla a{ancilla} loaded twice"
                                )));
                            }
                        }
                        Transfer::Unload { ancilla } => {
                            let q = slot(&slots, AtomId::Ancilla(ancilla))?;
                            retire(&mut state, ancilla, q)?;
                            slots.remove(&ancilla);
                            free.push(q);
                        }
                    }
                }
            }
            Stage::Move { .. } | Stage::Measure => {}
        }
    }
    for (&ancilla, &q) in &slots {
        retire(&mut state, ancilla, q)?;
    }
    Ok(state.truncate(n))
}

/// Worst-case fidelity between the circuit and the schedule over `|0...0>`
/// and 20 seeded random product inputs. A value of 1 certifies equality up
/// to global phase on those inputs.
pub fn equivalence(c: &Circuit, s: &Schedule) -> Result<f64> {
    if c.n_qubits() != s.n_qubits() {
        return Ok(0.0);
    }
    let n = c.n_qubits() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = simulate(c)?.fidelity(&simulate_schedule(s)?);
    for _ in 0..RANDOM_INPUTS {
        let input = StateVector::random_product(n, &mut rng)?;
        let a = simulate_from(c, input.clone())?;
        let b = simulate_schedule_from(s, input)?;
        worst = worst.min(a.fidelity(&b));
    }
    Ok(worst)
}
