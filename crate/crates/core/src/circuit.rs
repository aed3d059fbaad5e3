//! Circuit IR: gates over logical qubits, basis decomposition and dependency
//! front layers.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Qubit = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Gate alphabet. Rotation angles are in radians with the `exp(-i θ/2 σ)`
/// convention; `Zz(θ)` is `exp(-i θ/2 Z⊗Z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    Rot(Axis, f64),
    H,
    S,
    Sdg,
    Cz,
    Cnot,
    Zz(f64),
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rot(..) | GateKind::H | GateKind::S | GateKind::Sdg => 1,
            GateKind::Cz | GateKind::Cnot | GateKind::Zz(_) | GateKind::Swap => 2,
        }
    }

    /// QASM-style mnemonic, also used as the JSON `kind` tag.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rot(Axis::X, _) => "rx",
            GateKind::Rot(Axis::Y, _) => "ry",
            GateKind::Rot(Axis::Z, _) => "rz",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Cz => "cz",
            GateKind::Cnot => "cx",
            GateKind::Zz(_) => "rzz",
            GateKind::Swap => "swap",
        }
    }

    pub fn angle(self) -> Option<f64> {
        match self {
            GateKind::Rot(_, a) | GateKind::Zz(a) => Some(a),
            _ => None,
        }
    }

    /// Builds a kind from its mnemonic. `angle` is required for rotations and
    /// ignored otherwise.
    pub fn from_name(name: &str, angle: Option<f64>) -> Option<GateKind> {
        let rot = |axis| angle.map(|a| GateKind::Rot(axis, a));
        match name {
            "rx" => rot(Axis::X),
            "ry" => rot(Axis::Y),
            "rz" => rot(Axis::Z),
            "h" => Some(GateKind::H),
            "s" => Some(GateKind::S),
            "sdg" => Some(GateKind::Sdg),
            "cz" => Some(GateKind::Cz),
            "cx" | "cnot" => Some(GateKind::Cnot),
            "rzz" | "zz" => angle.map(GateKind::Zz),
            "swap" => Some(GateKind::Swap),
            _ => None,
        }
    }
}

/// A gate applied to one or two distinct logical qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRepr", into = "GateRepr")]
pub struct Gate {
    kind: GateKind,
    qubits: [Qubit; 2],
}

impl Gate {
    pub fn one(kind: GateKind, q: Qubit) -> Result<Gate> {
        Gate::new(kind, &[q])
    }

    pub fn two(kind: GateKind, a: Qubit, b: Qubit) -> Result<Gate> {
        Gate::new(kind, &[a, b])
    }

    pub fn new(kind: GateKind, qubits: &[Qubit]) -> Result<Gate> {
        if qubits.len() != kind.arity() {
            return Err(Error::Arity { gate: kind.name(), expected: kind.arity(), got: qubits.len() });
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        let second = if qubits.len() == 2 { qubits[1] } else { qubits[0] };
        Ok(Gate { kind, qubits: [qubits[0], second] })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    // Shorthands used all over the routers and tests. Arity is fixed by the
    // constructor so only repeated qubits can fail, and those panic.
    pub fn h(q: Qubit) -> Gate {
        Gate::one(GateKind::H, q).unwrap()
    }
    pub fn s(q: Qubit) -> Gate {
        Gate::one(GateKind::S, q).unwrap()
    }
    pub fn sdg(q: Qubit) -> Gate {
        Gate::one(GateKind::Sdg, q).unwrap()
    }
    pub fn rot(axis: Axis, angle: f64, q: Qubit) -> Gate {
        Gate::one(GateKind::Rot(axis, angle), q).unwrap()
    }
    pub fn cz(a: Qubit, b: Qubit) -> Gate {
        Gate::two(GateKind::Cz, a, b).expect("cz on repeated qubit")
    }
    pub fn cnot(control: Qubit, target: Qubit) -> Gate {
        Gate::two(GateKind::Cnot, control, target).expect("cnot on repeated qubit")
    }
    pub fn zz(angle: f64, a: Qubit, b: Qubit) -> Gate {
        Gate::two(GateKind::Zz(angle), a, b).expect("zz on repeated qubit")
    }
    pub fn swap(a: Qubit, b: Qubit) -> Gate {
        Gate::two(GateKind::Swap, a, b).expect("swap on repeated qubit")
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if let Some(a) = self.kind.angle() {
            write!(f, "({a})")?;
        }
        let mut sep = " ";
        for q in self.qubits() {
            write!(f, "{sep}q[{q}]")?;
            sep = ",";
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: String,
    qubits: Vec<Qubit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl TryFrom<GateRepr> for Gate {
    type Error = Error;

    fn try_from(r: GateRepr) -> Result<Gate> {
        let kind = GateKind::from_name(&r.kind, r.angle)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown gate kind `{}`", r.kind)))?;
        Gate::new(kind, &r.qubits)
    }
}

impl From<Gate> for GateRepr {
    fn from(g: Gate) -> GateRepr {
        GateRepr { kind: g.kind.name().to_string(), qubits: g.qubits().to_vec(), angle: g.kind.angle() }
    }
}

/// Ordered gate list over `n_qubits` logical qubits. Gate ids are list
/// positions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr")]
pub struct Circuit {
    n_qubits: u32,
    gates: Vec<Gate>,
}

#[derive(Deserialize)]
struct CircuitRepr {
    n_qubits: u32,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRepr) -> Result<Circuit> {
        Circuit::from_gates(r.n_qubits, r.gates)
    }
}

impl Circuit {
    pub fn new(n_qubits: u32) -> Circuit {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn from_gates(n_qubits: u32, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for &q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    // Pushes gates produced by decomposition, which only reuse the source
    // gate's qubits and therefore cannot go out of range.
    fn push_trusted(&mut self, gate: Gate) {
        self.gates.push(gate);
    }
}

/// Rewrites the circuit into single-qubit gates plus CZ and ZZ.
///
/// `CNOT(a,b)` becomes `H(b) CZ(a,b) H(b)` and `SWAP` becomes three CNOTs,
/// themselves expanded. ZZ is kept because the QAOA router schedules it
/// natively.
pub fn decompose_to_cz_basis(c: &Circuit) -> Circuit {
    decompose(c, false)
}

/// Like [`decompose_to_cz_basis`] but also expands `ZZ(θ)` into
/// `CNOT·Rz(θ)·CNOT`, leaving only CZ as two-qubit gate.
pub fn decompose_to_cz_only(c: &Circuit) -> Circuit {
    decompose(c, true)
}

fn decompose(c: &Circuit, expand_zz: bool) -> Circuit {
    let mut out = Circuit::new(c.n_qubits);
    for g in &c.gates {
        match g.kind {
            GateKind::Cnot => push_cnot(&mut out, g.qubits[0], g.qubits[1]),
            GateKind::Swap => {
                let (a, b) = (g.qubits[0], g.qubits[1]);
                push_cnot(&mut out, a, b);
                push_cnot(&mut out, b, a);
                push_cnot(&mut out, a, b);
            }
            GateKind::Zz(theta) if expand_zz => {
                let (a, b) = (g.qubits[0], g.qubits[1]);
                push_cnot(&mut out, a, b);
                out.push_trusted(Gate::rot(Axis::Z, theta, b));
                push_cnot(&mut out, a, b);
            }
            _ => out.push_trusted(*g),
        }
    }
    out
}

fn push_cnot(out: &mut Circuit, control: Qubit, target: Qubit) {
    out.push_trusted(Gate::h(target));
    out.push_trusted(Gate::cz(control, target));
    out.push_trusted(Gate::h(target));
}

/// Immediate predecessors of every gate: the latest earlier gate on each of
/// its qubits.
pub fn predecessors(c: &Circuit) -> Vec<[Option<usize>; 2]> {
    let mut last: Vec<Option<usize>> = alloc::vec![None; c.n_qubits as usize];
    let mut preds = Vec::with_capacity(c.gates.len());
    for (id, g) in c.gates.iter().enumerate() {
        let mut p = [None, None];
        for (slot, &q) in g.qubits().iter().enumerate() {
            p[slot] = last[q as usize];
            last[q as usize] = Some(id);
        }
        if p[0] == p[1] {
            p[1] = None;
        }
        preds.push(p);
    }
    preds
}

/// Gates not in `done` whose predecessors are all in `done`, in id order.
///
/// `done` must be dependency-closed.
pub fn front_layer(c: &Circuit, done: &BTreeSet<usize>) -> Vec<usize> {
    predecessors(c)
        .iter()
        .enumerate()
        .filter(|(id, p)| !done.contains(id) && p.iter().flatten().all(|pred| done.contains(pred)))
        .map(|(id, _)| id)
        .collect()
}

/// Incremental front-layer tracking for the routers: O(1) amortised per
/// completed gate instead of rescanning the circuit.
#[derive(Clone, Debug)]
pub struct FrontTracker {
    pending: Vec<u8>,
    successors: Vec<Vec<usize>>,
    ready: BTreeSet<usize>,
    remaining: usize,
}

impl FrontTracker {
    pub fn new(c: &Circuit) -> FrontTracker {
        let preds = predecessors(c);
        let mut pending = alloc::vec![0u8; c.len()];
        let mut successors = alloc::vec![Vec::new(); c.len()];
        for (id, p) in preds.iter().enumerate() {
            for &pred in p.iter().flatten() {
                pending[id] += 1;
                successors[pred].push(id);
            }
        }
        let ready = (0..c.len()).filter(|&id| pending[id] == 0).collect();
        FrontTracker { pending, successors, ready, remaining: c.len() }
    }

    pub fn front(&self) -> impl Iterator<Item = usize> + '_ {
        self.ready.iter().copied()
    }

    pub fn is_done(&self) -> bool {
        self.remaining == 0
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Marks a front-layer gate as executed.
    ///
    /// # Panics
    /// If `id` is not currently in the front layer.
    pub fn complete(&mut self, id: usize) {
        assert!(self.ready.remove(&id), "gate {id} is not in the front layer");
        self.remaining -= 1;
        for i in 0..self.successors[id].len() {
            let s = self.successors[id][i];
            self.pending[s] -= 1;
            if self.pending[s] == 0 {
                self.ready.insert(s);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis; position `i` acts on qubit `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> PauliString {
        PauliString { ops }
    }

    pub fn n_qubits(&self) -> u32 {
        self.ops.len() as u32
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// Qubits carrying a non-identity operator, ascending.
    pub fn support(&self) -> Vec<Qubit> {
        self.ops.iter().enumerate().filter(|(_, p)| **p != Pauli::I).map(|(q, _)| q as Qubit).collect()
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|p| **p != Pauli::I).count()
    }
}

impl core::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<PauliString> {
        s.chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidConfig(alloc::format!("bad Pauli letter `{c}`"))))
            .collect::<Result<Vec<_>>>()
            .map(PauliString::new)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}
