//! Router for one QAOA cost layer: a ZZ(γ) on every edge of a graph.
//!
//! Every qubit `q` gets one ancilla `q'` on the AOD crossing that mirrors its
//! SLM site, copied once at the start and recycled once at the end. An edge
//! `(a, b)` with `a < b` runs as a controlled phase between `a'` and `b`;
//! since `ZZ(γ) = Rz(γ) ⊗ Rz(γ) · CP(-2γ)` up to global phase, the
//! single-qubit parts collapse into one `Rz(γ · deg)` per qubit.
//!
//! Each stage starts from the smallest remaining edge, extends along the
//! seed's AOD row through consecutive columns, then drops every later AOD
//! row onto the SLM row that matches the most remaining edges without any
//! unintended interaction.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::arch::{complete_lines, reading_order_mapping, AodState, AtomId, AtomLayout, Crossing, FpqaConfig};
use crate::circuit::{Axis, Circuit, Gate, GateKind};
use crate::schedule::{AtomGate, RydbergRole, Schedule, ScheduleBuilder};
use crate::{Error, Result};

/// Undirected simple graph, edges stored as `(low, high)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeSet {
    n_qubits: u32,
    edges: BTreeSet<(u32, u32)>,
}

impl EdgeSet {
    pub fn new(n_qubits: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<EdgeSet> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v || u >= n_qubits || v >= n_qubits {
                return Err(Error::InvalidEdge(u, v));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u, v));
            }
        }
        Ok(EdgeSet { n_qubits, edges: set })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn edges(&self) -> &BTreeSet<(u32, u32)> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.n_qubits as usize];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }
}

/// Edges not yet executed, bucketed by their lower endpoint.
#[derive(Clone, Debug)]
pub struct RemainingEdges {
    by_low: Vec<BTreeSet<u32>>,
    first: usize,
    len: usize,
}

impl RemainingEdges {
    pub fn new(g: &EdgeSet) -> RemainingEdges {
        let mut by_low = vec![BTreeSet::new(); g.n_qubits as usize];
        for &(u, v) in &g.edges {
            by_low[u as usize].insert(v);
        }
        RemainingEdges { by_low, first: 0, len: g.len() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, low: u32, high: u32) -> bool {
        low < high && self.by_low.get(low as usize).is_some_and(|s| s.contains(&high))
    }

    /// Lexicographically smallest remaining edge.
    pub fn smallest(&mut self) -> Option<(u32, u32)> {
        while self.first < self.by_low.len() {
            if let Some(&v) = self.by_low[self.first].first() {
                return Some((self.first as u32, v));
            }
            self.first += 1;
        }
        None
    }

    pub fn remove(&mut self, low: u32, high: u32) -> bool {
        let hit = self.by_low[low as usize].remove(&high);
        self.len -= hit as usize;
        hit
    }
}

/// One Rydberg stage of the QAOA router.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagePlan {
    /// `(ancilla qubit, data qubit)` pairs coupled in this stage.
    pub matched: Vec<(u32, u32)>,
    /// SLM row each AOD row is dropped onto; `None` parks it outside.
    pub row_targets: Vec<Option<u32>>,
    /// SLM column each AOD column is moved next to; `None` parks it.
    pub col_targets: Vec<Option<u32>>,
}

impl StagePlan {
    pub fn parked_columns(&self) -> Vec<u32> {
        (0..self.col_targets.len() as u32).filter(|&c| self.col_targets[c as usize].is_none()).collect()
    }

    /// Lines placed beside SLM sites sit at `+offset` in x; parked lines
    /// leave the array.
    pub fn aod(&self, cfg: &FpqaConfig, offset: f64) -> AodState {
        let s = cfg.site_spacing;
        let mut rows: Vec<Option<f64>> = self.row_targets.iter().map(|r| r.map(|r| r as f64 * s)).collect();
        let mut cols: Vec<Option<f64>> = self.col_targets.iter().map(|c| c.map(|c| c as f64 * s + offset)).collect();
        rows.resize(cfg.aod_rows as usize, None);
        cols.resize(cfg.aod_cols as usize, None);
        AodState { row_y: complete_lines(&rows, cfg.y_extent(), s), col_x: complete_lines(&cols, cfg.x_extent(), s) }
    }
}

/// Plans the next stage. Ancilla `q'` sits on AOD crossing
/// `(q / cols, q % cols)`, data `q` on the SLM site with the same
/// coordinates.
pub fn plan_stage(remaining: &mut RemainingEdges, layout: &AtomLayout, cfg: &FpqaConfig) -> Option<StagePlan> {
    let (seed_a, seed_b) = remaining.smallest()?;
    let n = layout.n_qubits();
    let cols = cfg.slm_cols;
    let rows = cfg.slm_rows;
    let qubit_at = |r: u32, c: u32| Some(r * cols + c).filter(|&q| q < n);
    let (ar, ac) = (seed_a / cols, seed_a % cols);
    let (br, bc) = (seed_b / cols, seed_b % cols);

    let mut matched = vec![(seed_a, seed_b)];
    let mut row_targets = vec![None; rows as usize];
    let mut col_targets = vec![None; cols as usize];
    row_targets[ar as usize] = Some(br);
    col_targets[ac as usize] = Some(bc);

    // the seed row, through consecutive AOD columns
    let mut last_col = bc;
    for c in ac + 1..cols {
        let Some(a) = qubit_at(ar, c) else { break };
        let lo = br * cols + last_col + 1;
        let hi = (br + 1) * cols;
        let next = remaining.by_low[a as usize].range(lo..hi).next().copied();
        let Some(b) = next else { break };
        // data atoms in the seed row are distinct by construction
        matched.push((a, b));
        col_targets[c as usize] = Some(b % cols);
        last_col = b % cols;
    }
    let placed: Vec<(u32, u32)> = (0..cols).filter_map(|c| col_targets[c as usize].map(|j| (c, j))).collect();

    // later rows, each on the best SLM row below the previous one
    let mut last_row = br;
    for k in ar + 1..rows {
        let mut best: Option<(usize, u32)> = None;
        let mut empty_fit: Option<u32> = None;
        for i in last_row + 1..rows {
            let mut hits = 0;
            let mut legal = true;
            for &(c, j) in &placed {
                let (Some(a), Some(d)) = (qubit_at(k, c), qubit_at(i, j)) else { continue };
                if remaining.contains(a, d) {
                    hits += 1;
                } else {
                    legal = false;
                    break;
                }
            }
            if !legal {
                continue;
            }
            if hits == 0 {
                empty_fit = empty_fit.or(Some(i));
            } else if best.is_none_or(|(h, _)| hits > h) {
                best = Some((hits, i));
            }
        }
        let Some(i) = best.map(|(_, i)| i).or(empty_fit) else { break };
        row_targets[k as usize] = Some(i);
        last_row = i;
        for &(c, j) in &placed {
            if let (Some(a), Some(d)) = (qubit_at(k, c), qubit_at(i, j)) {
                matched.push((a, d));
            }
        }
    }
    for &(a, b) in &matched {
        remaining.remove(a, b);
    }
    Some(StagePlan { matched, row_targets, col_targets })
}

/// Routes a single cost layer with angle `gamma`.
pub fn route_qaoa(g: &EdgeSet, gamma: f64, cfg: &FpqaConfig) -> Result<Schedule> {
    cfg.validate()?;
    let layout = reading_order_mapping(g.n_qubits(), cfg)?;
    let n = g.n_qubits();
    let used_rows = n.div_ceil(cfg.slm_cols);
    let used_cols = n.min(cfg.slm_cols);
    if used_rows > cfg.aod_rows || used_cols > cfg.aod_cols {
        return Err(Error::Capacity {
            needed: n as usize,
            capacity: (cfg.aod_rows.min(used_rows) * cfg.aod_cols.min(used_cols)) as usize,
        });
    }
    let m = cfg.parking_offset()?;
    let mut b = ScheduleBuilder::new(cfg.clone(), layout.clone());
    let anc = |q: u32| AtomId::Ancilla(q);
    let copy_pairs: Vec<_> = (0..n).map(|q| (AtomId::Data(q), anc(q))).collect();
    let hadamards = || (0..n).map(|q| AtomGate::new(anc(q), GateKind::H));
    let home = StagePlan {
        matched: Vec::new(),
        row_targets: (0..cfg.slm_rows).map(|r| (r < used_rows).then_some(r)).collect(),
        col_targets: (0..cfg.slm_cols).map(|c| (c < used_cols).then_some(c)).collect(),
    }
    .aod(cfg, m);

    if n > 0 {
        b.load((0..n).map(|q| (q, Crossing::new(q / cfg.slm_cols, q % cfg.slm_cols))));
        b.move_to(home.clone());
        b.raman(hadamards());
        b.rydberg(copy_pairs.clone(), PI, RydbergRole::Copy);
        b.raman(hadamards());
    }
    b.raman(
        g.degrees()
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d > 0)
            .map(|(q, d)| AtomGate::new(AtomId::Data(q as u32), GateKind::Rot(Axis::Z, gamma * d as f64))),
    );
    let mut remaining = RemainingEdges::new(g);
    while let Some(plan) = plan_stage(&mut remaining, &layout, cfg) {
        b.move_to(plan.aod(cfg, m));
        let pairs = plan.matched.iter().map(|&(a, d)| (anc(a), AtomId::Data(d))).collect();
        b.rydberg(pairs, -2.0 * gamma, RydbergRole::Gate);
    }
    if n > 0 {
        b.move_to(home);
        b.raman(hadamards());
        b.rydberg(copy_pairs, PI, RydbergRole::Recycle);
        b.raman(hadamards());
        b.unload_all();
    }
    Ok(b.finish())
}

/// Reference circuit: `ZZ(γ)` on every edge in order.
pub fn qaoa_circuit(g: &EdgeSet, gamma: f64) -> Circuit {
    Circuit::from_gates(g.n_qubits(), g.edges().iter().map(|&(u, v)| Gate::zz(gamma, u, v)))
        .expect("edges are in range")
}
