//! Router for Pauli-string evolution `exp(-i θ P)`.
//!
//! The smallest-index qubit of the string is the root. Its value is fanned
//! out into diagonal AOD ancillas in `O(√N)` CNOT layers, then the remaining
//! qubits are covered by repeated longest dominance chains, each executed as
//! one parallel Rydberg stage.
//!
//! The parity is gathered in the Hadamard frame of the root: `CNOT(t, r)` is
//! `H_r CZ(t, r) H_r`, so every chain stage applies CZs between the copies
//! and the targets. The copies are recycled before the root rotation (a
//! Z-basis copy does not survive it) and the whole sweep is repeated to
//! uncompute.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::arch::{complete_lines, reading_order_mapping, AodState, AtomId, AtomLayout, Crossing, FpqaConfig, Site};
use crate::circuit::{Axis, Circuit, Gate, GateKind, Pauli, PauliString, Qubit};
use crate::generic::park_beside;
use crate::schedule::{AtomGate, RydbergRole, Schedule, ScheduleBuilder};
use crate::{Error, Result};

/// Pauli string with its evolution angle.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub angle: f64,
}

impl PauliTerm {
    pub fn new(string: PauliString, angle: f64) -> PauliTerm {
        PauliTerm { string, angle }
    }
}

/// Targets ordered by `(row, col)`. `v` is a successor of `u` iff `v`
/// dominates `u` (row and column both at least as large).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceDag {
    nodes: Vec<(Qubit, Site)>,
}

impl DominanceDag {
    pub fn new(mut nodes: Vec<(Qubit, Site)>) -> DominanceDag {
        nodes.sort_by_key(|&(q, s)| (s.row, s.col, q));
        DominanceDag { nodes }
    }

    pub fn from_layout(targets: &[Qubit], layout: &AtomLayout) -> DominanceDag {
        DominanceDag::new(targets.iter().map(|&q| (q, layout.site(q))).collect())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[(Qubit, Site)] {
        &self.nodes
    }

    pub fn remove(&mut self, chain: &[Qubit]) {
        self.nodes.retain(|(q, _)| !chain.contains(q));
    }
}

/// A maximum-length dominance chain. Among maximum chains the one that is
/// lexicographically smallest in `(row, col)` order is returned.
pub fn longest_chain(dag: &DominanceDag) -> Result<Vec<Qubit>> {
    let nodes = &dag.nodes;
    if nodes.is_empty() {
        return Err(Error::EmptyDag);
    }
    let n = nodes.len();
    let dominates = |i: usize, j: usize| nodes[i].1.dominated_by(nodes[j].1);
    // best[i]: longest chain starting at node i
    let mut best = vec![1usize; n];
    for i in (0..n).rev() {
        for j in i + 1..n {
            if dominates(i, j) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    let top = *best.iter().max().unwrap();
    let mut i = best.iter().position(|&b| b == top).unwrap();
    let mut chain = vec![nodes[i].0];
    while best[i] > 1 {
        i = (i + 1..n).find(|&j| dominates(i, j) && best[j] + 1 == best[i]).unwrap();
        chain.push(nodes[i].0);
    }
    Ok(chain)
}

/// Chains removed greedily until every target is covered.
pub fn chain_rounds(mut dag: DominanceDag) -> Vec<Vec<Qubit>> {
    let mut rounds = Vec::new();
    while let Ok(chain) = longest_chain(&dag) {
        dag.remove(&chain);
        rounds.push(chain);
    }
    rounds
}

/// Fresh copies made by fan-out layer `k` (1-based): 1, 2, 4, 6, 8, ...
pub fn copies_in_layer(k: usize) -> usize {
    if k <= 1 {
        1
    } else {
        2 * (k - 1)
    }
}

/// Fewest fan-out layers giving at least `n` copies.
pub fn fanout_depth(n: usize) -> usize {
    let (mut depth, mut total) = (0, 0);
    while total < n {
        depth += 1;
        total += copies_in_layer(depth);
    }
    depth
}

/// One fan-out layer: CNOT `(source, fresh)` pairs and the AOD state that
/// brings each pair within the Rydberg radius.
#[derive(Clone, Debug, PartialEq)]
pub struct FanoutLayer {
    pub pairs: Vec<(AtomId, AtomId)>,
    pub aod: AodState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FanoutTree {
    pub root: Qubit,
    pub n_copies: usize,
    pub layers: Vec<FanoutLayer>,
}

impl FanoutTree {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }
}

/// Logical fan-out: per layer, the `(source, fresh)` slot pairs, `None`
/// standing for the root.
///
/// Layer `j` seeds block `j` from the root; every earlier block grows by
/// index-adjacent copies, first to the right, then on both ends. With `d`
/// layers block `j` ends up with `2(d - j)` copies and the last block with
/// one, so all blocks stay contiguous and every pair is `(i, i ± 1)`.
fn fanout_slots(n: usize) -> Vec<Vec<(Option<usize>, usize)>> {
    let d = fanout_depth(n);
    let sizes: Vec<usize> = (1..=d).map(|j| if j < d { 2 * (d - j) } else { 1 }).collect();
    let mut start = 0;
    let mut seeds = Vec::with_capacity(d);
    for (j, &size) in (1..=d).zip(&sizes) {
        seeds.push(start + d.saturating_sub(j + 1));
        start += size;
    }
    // current [lo, hi] interval of each seeded block
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut layers = Vec::with_capacity(d);
    for k in 0..d {
        let mut layer = Vec::new();
        for (b, span) in spans.iter_mut().enumerate() {
            if span.0 == span.1 && span.0 == seeds[b] && k == b + 1 {
                layer.push((Some(span.1), span.1 + 1));
                span.1 += 1;
            } else {
                layer.push((Some(span.0), span.0 - 1));
                layer.push((Some(span.1), span.1 + 1));
                span.0 -= 1;
                span.1 += 1;
            }
        }
        layer.push((None, seeds[k]));
        spans.push((seeds[k], seeds[k]));
        layers.push(layer);
    }
    // drop surplus copies from the last layer, newest blocks first
    let total: usize = start;
    let mut surplus = total - n;
    if let Some(last) = layers.last_mut() {
        while surplus > 0 {
            last.pop();
            surplus -= 1;
        }
    }
    // compress slot numbers onto 0..n
    let mut used = vec![false; total];
    for &(_, t) in layers.iter().flatten() {
        used[t] = true;
    }
    let mut id = vec![0; total];
    let mut next = 0;
    for (s, &u) in used.iter().enumerate() {
        id[s] = next;
        next += u as usize;
    }
    layers.into_iter().map(|l| l.into_iter().map(|(s, t)| (s.map(|s| id[s]), id[t])).collect()).collect()
}

/// Fan-out of `root` into ancillas `0..n_targets` on the AOD diagonal.
///
/// In every layer the root's fresh partner parks beside the root. Lower
/// ancillas sit on a diagonal left of and above the array, higher ones right
/// of and below it; a copying pair is half a unit apart on both axes and any
/// other neighbours one site spacing apart.
pub fn fanout_tree(root: Qubit, n_targets: usize, layout: &AtomLayout, cfg: &FpqaConfig) -> Result<FanoutTree> {
    if n_targets > cfg.diagonal_capacity() {
        return Err(Error::Capacity { needed: n_targets, capacity: cfg.diagonal_capacity() });
    }
    let m = cfg.parking_offset()?;
    let s = cfg.site_spacing;
    let (rx, ry) = cfg.site_position(layout.site(root));
    let pair_gap = 0.5 * cfg.rydberg_radius;
    let layers = fanout_slots(n_targets)
        .into_iter()
        .map(|slots| {
            let seed = slots.iter().find(|(src, _)| src.is_none()).map(|&(_, t)| t);
            let paired = |i: usize| {
                slots.iter().any(|&(a, b)| a.is_some() && (a == Some(i) && b == i + 1 || b == i && a == Some(i + 1)))
            };
            let gap = |i: usize| if paired(i) { pair_gap } else { s };
            let mut xs = vec![0.0; n_targets];
            let mut ys = vec![0.0; n_targets];
            // right region starts after the seed, or at 0 when no seed
            let split = seed.unwrap_or(n_targets);
            if let Some(seed) = seed {
                xs[seed] = rx + m;
                ys[seed] = ry;
            }
            for i in split + 1..n_targets {
                if i == split + 1 {
                    xs[i] = cfg.x_extent().max(rx) + 3.0 * s;
                    ys[i] = ry + s;
                } else {
                    xs[i] = xs[i - 1] + gap(i - 1);
                    ys[i] = ys[i - 1] + gap(i - 1);
                }
            }
            for i in (0..split.min(n_targets)).rev() {
                if i + 1 == split {
                    xs[i] = -3.0 * s;
                    ys[i] = ry - s;
                } else {
                    xs[i] = xs[i + 1] - gap(i);
                    ys[i] = ys[i + 1] - gap(i);
                }
            }
            let mut cols: Vec<Option<f64>> = xs.into_iter().map(Some).collect();
            let mut rows: Vec<Option<f64>> = ys.into_iter().map(Some).collect();
            cols.resize(cfg.aod_cols as usize, None);
            rows.resize(cfg.aod_rows as usize, None);
            let pairs = slots
                .into_iter()
                .map(|(src, t)| {
                    let src = src.map_or(AtomId::Data(root), |a| AtomId::Ancilla(a as u32));
                    (src, AtomId::Ancilla(t as u32))
                })
                .collect();
            FanoutLayer {
                pairs,
                aod: AodState {
                    row_y: complete_lines(&rows, cfg.y_extent(), s),
                    col_x: complete_lines(&cols, cfg.x_extent(), s),
                },
            }
        })
        .collect();
    Ok(FanoutTree { root, n_copies: n_targets, layers })
}

/// Single-qubit gates mapping the string's Z frame onto its Pauli frame,
/// as `(before, after)`.
fn basis_change(p: &PauliString) -> (Vec<AtomGate>, Vec<AtomGate>) {
    let mut before = Vec::new();
    let mut after = Vec::new();
    for (q, &op) in p.ops().iter().enumerate() {
        let a = AtomId::Data(q as u32);
        match op {
            Pauli::X => {
                before.push(AtomGate::new(a, GateKind::H));
                after.push(AtomGate::new(a, GateKind::H));
            }
            Pauli::Y => {
                before.push(AtomGate::new(a, GateKind::Sdg));
                before.push(AtomGate::new(a, GateKind::H));
                after.push(AtomGate::new(a, GateKind::H));
                after.push(AtomGate::new(a, GateKind::S));
            }
            _ => {}
        }
    }
    (before, after)
}

fn check_terms(terms: &[PauliTerm]) -> Result<u32> {
    let n = terms.first().map_or(0, |t| t.string.n_qubits());
    for t in terms {
        if t.string.n_qubits() != n {
            return Err(Error::PauliLength { expected: n, got: t.string.ops().len() });
        }
        if t.string.weight() == 0 {
            return Err(Error::EmptyPauliString);
        }
    }
    Ok(n)
}

/// Routes the terms in order on the first `n` sites of `cfg`, where `n` is
/// the string length.
pub fn route_pauli(terms: &[PauliTerm], cfg: &FpqaConfig) -> Result<Schedule> {
    let n = check_terms(terms)?;
    cfg.validate()?;
    let layout = reading_order_mapping(n, cfg)?;
    let mut b = ScheduleBuilder::new(cfg.clone(), layout.clone());
    for t in terms {
        route_term(&mut b, t, &layout, cfg)?;
    }
    Ok(b.finish())
}

fn route_term(b: &mut ScheduleBuilder, t: &PauliTerm, layout: &AtomLayout, cfg: &FpqaConfig) -> Result<()> {
    let support = t.string.support();
    let root = support[0];
    let targets = &support[1..];
    let (before, after) = basis_change(&t.string);
    let rz = |q: Qubit| AtomGate::new(AtomId::Data(q), GateKind::Rot(Axis::Z, 2.0 * t.angle));
    let h_root = || [AtomGate::new(AtomId::Data(root), GateKind::H)];
    b.raman(before);
    match targets.len() {
        0 => b.raman([rz(root)]),
        1 => {
            let tree = fanout_tree(root, 1, layout, cfg)?;
            b.load([(0, Crossing::diagonal(0))]);
            copy(b, &tree);
            let m = cfg.parking_offset()?;
            b.move_to(park_beside(&[layout.site(targets[0])], cfg, m));
            b.raman([rz(root), rz(targets[0])]);
            b.rydberg(vec![(AtomId::Ancilla(0), AtomId::Data(targets[0]))], -4.0 * t.angle, RydbergRole::Gate);
            recycle(b, &tree);
            b.unload_all();
        }
        k => {
            let tree = fanout_tree(root, k, layout, cfg)?;
            let rounds = chain_rounds(DominanceDag::from_layout(targets, layout));
            b.load((0..k as u32).map(|i| (i, Crossing::diagonal(i))));
            b.raman(h_root());
            parity_sweep(b, &tree, &rounds, layout, cfg)?;
            b.raman(h_root());
            b.raman([rz(root)]);
            b.raman(h_root());
            parity_sweep(b, &tree, &rounds, layout, cfg)?;
            b.raman(h_root());
            b.unload_all();
        }
    }
    b.raman(after);
    Ok(())
}

fn copy(b: &mut ScheduleBuilder, tree: &FanoutTree) {
    for layer in &tree.layers {
        cnot_layer(b, layer, RydbergRole::Copy);
    }
}

fn recycle(b: &mut ScheduleBuilder, tree: &FanoutTree) {
    for layer in tree.layers.iter().rev() {
        cnot_layer(b, layer, RydbergRole::Recycle);
    }
}

fn cnot_layer(b: &mut ScheduleBuilder, layer: &FanoutLayer, role: RydbergRole) {
    let h: Vec<AtomGate> = layer.pairs.iter().map(|&(_, t)| AtomGate::new(t, GateKind::H)).collect();
    b.move_to(layer.aod.clone());
    b.raman(h.clone());
    b.rydberg(layer.pairs.clone(), PI, role);
    b.raman(h);
}

fn parity_sweep(
    b: &mut ScheduleBuilder,
    tree: &FanoutTree,
    rounds: &[Vec<Qubit>],
    layout: &AtomLayout,
    cfg: &FpqaConfig,
) -> Result<()> {
    let m = cfg.parking_offset()?;
    copy(b, tree);
    for chain in rounds {
        let sites: Vec<Site> = chain.iter().map(|&q| layout.site(q)).collect();
        b.move_to(park_beside(&sites, cfg, m));
        let pairs = chain.iter().enumerate().map(|(i, &q)| (AtomId::Ancilla(i as u32), AtomId::Data(q))).collect();
        b.rydberg(pairs, PI, RydbergRole::Gate);
    }
    recycle(b, tree);
    Ok(())
}

/// Reference circuit: basis change, CNOT ladder into the root, `Rz(2θ)`,
/// ladder again, basis restore.
pub fn pauli_evolution_circuit(terms: &[PauliTerm]) -> Result<Circuit> {
    let n = check_terms(terms)?;
    let mut c = Circuit::new(n);
    for t in terms {
        let support = t.string.support();
        let (root, targets) = (support[0], &support[1..]);
        let (before, after) = basis_change(&t.string);
        let to_gate = |g: AtomGate| match g.atom {
            AtomId::Data(q) => Gate::one(g.kind, q),
            AtomId::Ancilla(_) => unreachable!(),
        };
        for g in before {
            c.push(to_gate(g)?)?;
        }
        for &q in targets {
            c.push(Gate::cnot(q, root))?;
        }
        c.push(Gate::rot(Axis::Z, 2.0 * t.angle, root))?;
        for &q in targets.iter().rev() {
            c.push(Gate::cnot(q, root))?;
        }
        for g in after {
            c.push(to_gate(g)?)?;
        }
    }
    Ok(c)
}
