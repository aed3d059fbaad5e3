//! Router for arbitrary CZ + single-qubit circuits.
//!
//! Each round takes the dependency front layer, runs its single-qubit gates,
//! then greedily picks a movement-legal subset of its CZs. Gate `i` of the
//! subset gets a fresh ancilla on AOD crossing `(i, i)`, which copies the
//! control, flies to the target for the CZ, flies back and is recycled.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::arch::{
    complete_lines, reading_order_mapping, spread_ties, AodState, AtomId, AtomLayout, Crossing, FpqaConfig, Site,
};
use crate::circuit::{decompose_to_cz_only, Circuit, FrontTracker, GateKind, Qubit};
use crate::schedule::{AtomGate, RydbergRole, Schedule, ScheduleBuilder};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetGate {
    pub id: usize,
    pub control: Qubit,
    pub target: Qubit,
}

/// Gates sorted by control qubit whose control and target sites are both
/// non-decreasing in row and column along the order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LegalSubset {
    pub gates: Vec<SubsetGate>,
    pub ancilla_slots: Vec<Crossing>,
}

impl LegalSubset {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.gates.iter().map(|g| g.id).collect()
    }

    fn insert(&mut self, g: SubsetGate) {
        let at = self.gates.partition_point(|x| x.control < g.control);
        self.gates.insert(at, g);
        self.ancilla_slots.push(Crossing::diagonal(self.ancilla_slots.len() as u32));
    }
}

fn monotone(a: SubsetGate, b: SubsetGate, layout: &AtomLayout) -> bool {
    let (ca, cb) = (layout.site(a.control), layout.site(b.control));
    let (ta, tb) = (layout.site(a.target), layout.site(b.target));
    ca.dominated_by(cb) && ta.dominated_by(tb)
}

/// Whether `candidate` can join `subset` keeping all four chains monotone.
/// Checking the neighbours at the insertion point suffices since the
/// subset is already monotone.
pub fn is_legal(subset: &LegalSubset, candidate: SubsetGate, layout: &AtomLayout) -> bool {
    let at = subset.gates.partition_point(|x| x.control < candidate.control);
    let before = at.checked_sub(1).map(|i| subset.gates[i]);
    let after = subset.gates.get(at).copied();
    before.is_none_or(|b| monotone(b, candidate, layout)) && after.is_none_or(|a| monotone(candidate, a, layout))
}

/// Single greedy pass over the front-layer CZs sorted by
/// `(control, target, id)`, capped at `capacity` gates.
pub fn select_subset(c: &Circuit, front: &[usize], layout: &AtomLayout, capacity: usize) -> LegalSubset {
    let mut candidates: Vec<SubsetGate> = front
        .iter()
        .filter_map(|&id| {
            let q = c.gates()[id].qubits();
            (q.len() == 2).then(|| SubsetGate { id, control: q[0].min(q[1]), target: q[0].max(q[1]) })
        })
        .collect();
    candidates.sort_by_key(|g| (g.control, g.target, g.id));
    let mut subset = LegalSubset::default();
    for cand in candidates {
        if subset.len() == capacity {
            break;
        }
        if is_legal(&subset, cand, layout) {
            subset.insert(cand);
        }
    }
    subset
}

/// AOD state parking ancilla `i` beside `sites[i]`. `sites` must be
/// non-decreasing in both row and column.
pub(crate) fn park_beside(sites: &[Site], cfg: &FpqaConfig, m: f64) -> AodState {
    let xs: Vec<f64> = sites.iter().map(|&s| cfg.site_position(s).0).collect();
    let ys: Vec<f64> = sites.iter().map(|&s| cfg.site_position(s).1).collect();
    let mut cols: Vec<Option<f64>> = spread_ties(&xs, m, m).into_iter().map(Some).collect();
    let mut rows: Vec<Option<f64>> = spread_ties(&ys, m, 0.0).into_iter().map(Some).collect();
    cols.resize(cfg.aod_cols as usize, None);
    rows.resize(cfg.aod_rows as usize, None);
    AodState {
        row_y: complete_lines(&rows, cfg.y_extent(), cfg.site_spacing),
        col_x: complete_lines(&cols, cfg.x_extent(), cfg.site_spacing),
    }
}

/// Routes a circuit already in the CZ + single-qubit basis.
pub fn route(c: &Circuit, cfg: &FpqaConfig) -> Result<Schedule> {
    if let Some(g) = c.gates().iter().find(|g| !matches!(g.kind(), GateKind::Cz) && g.is_two_qubit()) {
        return Err(Error::NotInBasis(g.kind().name()));
    }
    cfg.validate()?;
    let layout = reading_order_mapping(c.n_qubits(), cfg)?;
    let m = cfg.parking_offset()?;
    let capacity = cfg.diagonal_capacity();
    if capacity == 0 && c.two_qubit_count() > 0 {
        return Err(Error::Capacity { needed: 1, capacity });
    }
    let mut b = ScheduleBuilder::new(cfg.clone(), layout.clone());
    let mut tracker = FrontTracker::new(c);
    loop {
        loop {
            let singles: Vec<usize> = tracker.front().filter(|&id| !c.gates()[id].is_two_qubit()).collect();
            if singles.is_empty() {
                break;
            }
            b.raman(singles.iter().map(|&id| {
                let g = &c.gates()[id];
                AtomGate::new(AtomId::Data(g.qubits()[0]), g.kind())
            }));
            for id in singles {
                tracker.complete(id);
            }
        }
        if tracker.is_done() {
            break;
        }
        let front: Vec<usize> = tracker.front().collect();
        let subset = select_subset(c, &front, &layout, capacity);
        emit_block(&mut b, &subset, &layout, cfg, m);
        for g in &subset.gates {
            tracker.complete(g.id);
        }
    }
    Ok(b.finish())
}

/// Decomposes to CZ + single-qubit gates, then routes.
pub fn compile(c: &Circuit, cfg: &FpqaConfig) -> Result<Schedule> {
    route(&decompose_to_cz_only(c), cfg)
}

fn emit_block(b: &mut ScheduleBuilder, s: &LegalSubset, layout: &AtomLayout, cfg: &FpqaConfig, m: f64) {
    let controls: Vec<Site> = s.gates.iter().map(|g| layout.site(g.control)).collect();
    let targets: Vec<Site> = s.gates.iter().map(|g| layout.site(g.target)).collect();
    let anc = |i: usize| AtomId::Ancilla(i as u32);
    let hadamards = || (0..s.len()).map(|i| AtomGate::new(anc(i), GateKind::H));
    let with = |f: &dyn Fn(&SubsetGate) -> Qubit| -> Vec<(AtomId, AtomId)> {
        s.gates.iter().enumerate().map(|(i, g)| (AtomId::Data(f(g)), anc(i))).collect()
    };
    let copy_aod = park_beside(&controls, cfg, m);

    b.load(s.ancilla_slots.iter().enumerate().map(|(i, &x)| (i as u32, x)));
    b.move_to(copy_aod.clone());
    b.raman(hadamards());
    b.rydberg(with(&|g| g.control), PI, RydbergRole::Copy);
    b.raman(hadamards());
    b.move_to(park_beside(&targets, cfg, m));
    b.rydberg(with(&|g| g.target), PI, RydbergRole::Gate);
    b.move_to(copy_aod);
    b.raman(hadamards());
    b.rydberg(with(&|g| g.control), PI, RydbergRole::Recycle);
    b.raman(hadamards());
    b.unload_all();
}
