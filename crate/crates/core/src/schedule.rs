//! Compiled FPQA programs and their end-to-end validator.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::arch::{
    check_move, ordered_pair, rydberg_pairs, AodState, AtomId, AtomLayout, Crossing, FpqaConfig, MoveViolation,
};
use crate::circuit::GateKind;

/// A single-qubit gate addressed to a physical atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomGateRepr", into = "AtomGateRepr")]
pub struct AtomGate {
    pub atom: AtomId,
    pub kind: GateKind,
}

#[derive(Serialize, Deserialize)]
struct AtomGateRepr {
    atom: AtomId,
    kind: alloc::string::String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl TryFrom<AtomGateRepr> for AtomGate {
    type Error = alloc::string::String;

    fn try_from(r: AtomGateRepr) -> Result<AtomGate, Self::Error> {
        match GateKind::from_name(&r.kind, r.angle) {
            Some(kind) if kind.arity() == 1 => Ok(AtomGate { atom: r.atom, kind }),
            _ => Err(alloc::format!("`{}` is not a single-qubit gate", r.kind)),
        }
    }
}

impl From<AtomGate> for AtomGateRepr {
    fn from(g: AtomGate) -> AtomGateRepr {
        AtomGateRepr { atom: g.atom, kind: g.kind.name().into(), angle: g.kind.angle() }
    }
}

impl AtomGate {
    pub fn new(atom: AtomId, kind: GateKind) -> AtomGate {
        AtomGate { atom, kind }
    }
}

/// What a Rydberg pulse is for. Only bookkeeping: the validator and the
/// simulator treat all roles alike.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RydbergRole {
    Copy,
    Gate,
    Recycle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Transfer {
    /// A fresh |0> atom is loaded onto an AOD crossing.
    Load { ancilla: u32, crossing: Crossing },
    /// The atom is dropped; it must already be back in |0>.
    Unload { ancilla: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stage {
    Raman {
        gates: Vec<AtomGate>,
    },
    Move {
        aod: AodState,
        /// Largest displacement of an occupied crossing, as a fraction of
        /// the array diagonal.
        max_distance: f64,
    },
    Rydberg {
        pairs: Vec<(AtomId, AtomId)>,
        /// Controlled-phase angle applied to every pair; π is a CZ.
        phase: f64,
        role: RydbergRole,
    },
    Transfer {
        transfers: Vec<Transfer>,
    },
    Measure,
}

impl Stage {
    pub fn cz(pairs: Vec<(AtomId, AtomId)>, role: RydbergRole) -> Stage {
        Stage::Rydberg { pairs, phase: PI, role }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub config: FpqaConfig,
    pub initial_layout: AtomLayout,
    pub initial_aod: AodState,
    pub stages: Vec<Stage>,
}

impl Schedule {
    pub fn n_qubits(&self) -> u32 {
        self.initial_layout.n_qubits()
    }

    /// Number of Rydberg stages that couple at least one pair.
    pub fn depth(&self) -> usize {
        depth(self)
    }

    /// Largest number of ancillas live at once.
    pub fn peak_ancillas(&self) -> usize {
        let mut live = self.initial_layout.aod_atoms.len();
        let mut peak = live;
        for st in &self.stages {
            if let Stage::Transfer { transfers } = st {
                for t in transfers {
                    match t {
                        Transfer::Load { .. } => live += 1,
                        Transfer::Unload { .. } => live = live.saturating_sub(1),
                    }
                    peak = peak.max(live);
                }
            }
        }
        peak
    }
}

pub fn depth(s: &Schedule) -> usize {
    s.stages.iter().filter(|st| matches!(st, Stage::Rydberg { pairs, .. } if !pairs.is_empty())).count()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    InitialAod(MoveViolation),
    InitialLayout,
    Move {
        stage: usize,
        violation: MoveViolation,
    },
    MoveDistance {
        stage: usize,
        declared: f64,
        actual: f64,
    },
    /// Two atoms sit in the forbidden band `(r_b, separation · r_b]`.
    Separation {
        stage: usize,
        pair: (AtomId, AtomId),
    },
    UnintendedPair {
        stage: usize,
        pair: (AtomId, AtomId),
    },
    MissingPair {
        stage: usize,
        pair: (AtomId, AtomId),
    },
    Transfer {
        stage: usize,
        ancilla: u32,
    },
    RamanTarget {
        stage: usize,
        atom: AtomId,
    },
    UnrecycledAncilla {
        stage: usize,
        ancilla: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitialAod(v) => write!(f, "initial AOD state: {v}"),
            Violation::InitialLayout => write!(f, "initial layout does not fit the configuration"),
            Violation::Move { stage, violation } => write!(f, "stage {stage}: {violation}"),
            Violation::MoveDistance { stage, declared, actual } => {
                write!(f, "stage {stage}: declared distance {declared} but atoms moved {actual}")
            }
            Violation::Separation { stage, pair } => {
                write!(f, "stage {stage}: {} and {} inside the separation band", pair.0, pair.1)
            }
            Violation::UnintendedPair { stage, pair } => {
                write!(f, "stage {stage}: {} and {} coupled but not intended", pair.0, pair.1)
            }
            Violation::MissingPair { stage, pair } => {
                write!(f, "stage {stage}: intended pair {} {} is not coupled", pair.0, pair.1)
            }
            Violation::Transfer { stage, ancilla } => {
                write!(f, "stage {stage}: illegal transfer of ancilla a{ancilla}")
            }
            Violation::RamanTarget { stage, atom } => {
                write!(f, "stage {stage}: Raman gate on absent atom {atom} or not single-qubit")
            }
            Violation::UnrecycledAncilla { stage, ancilla } => {
                write!(f, "stage {stage}: ancilla a{ancilla} still live at the end")
            }
        }
    }
}

/// Atom positions while a schedule is replayed.
#[derive(Clone, Debug)]
pub struct Replay<'a> {
    pub config: &'a FpqaConfig,
    pub layout: &'a AtomLayout,
    pub aod: AodState,
    pub live: BTreeMap<u32, Crossing>,
}

impl<'a> Replay<'a> {
    pub fn new(s: &'a Schedule) -> Replay<'a> {
        Replay {
            config: &s.config,
            layout: &s.initial_layout,
            aod: s.initial_aod.clone(),
            live: s.initial_layout.aod_atoms.clone(),
        }
    }

    pub fn position(&self, atom: AtomId) -> Option<(f64, f64)> {
        match atom {
            AtomId::Data(q) => self.layout.slm_atoms.get(q as usize).map(|&site| self.config.site_position(site)),
            AtomId::Ancilla(a) => self.live.get(&a).map(|&c| self.aod.position(c)),
        }
    }

    pub fn positions(&self) -> Vec<(AtomId, f64, f64)> {
        let data = (0..self.layout.n_qubits()).map(AtomId::Data);
        let anc = self.live.keys().map(|&a| AtomId::Ancilla(a));
        data.chain(anc)
            .map(|id| {
                let (x, y) = self.position(id).unwrap();
                (id, x, y)
            })
            .collect()
    }

    /// Normalised max displacement of occupied crossings if the AOD moved
    /// to `to`.
    pub fn move_distance(&self, to: &AodState) -> f64 {
        let raw = self
            .live
            .values()
            .map(|&c| {
                let (x0, y0) = self.aod.position(c);
                let (x1, y1) = to.position(c);
                libm::hypot(x1 - x0, y1 - y0)
            })
            .fold(0.0, f64::max);
        raw / self.config.array_diagonal()
    }
}

/// Replays every stage and collects all physical and bookkeeping
/// violations.
pub fn validate(s: &Schedule) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let cfg = &s.config;
    if s.initial_aod.row_y.len() != cfg.aod_rows as usize || s.initial_aod.col_x.len() != cfg.aod_cols as usize {
        out.push(Violation::InitialAod(MoveViolation::Dimension {
            rows: (cfg.aod_rows as usize, s.initial_aod.row_y.len()),
            cols: (cfg.aod_cols as usize, s.initial_aod.col_x.len()),
        }));
        return Err(out);
    }
    if let Err(v) = check_move(&s.initial_aod, &s.initial_aod) {
        out.push(Violation::InitialAod(v));
    }
    let sites: BTreeSet<_> = s.initial_layout.slm_atoms.iter().collect();
    if sites.len() != s.initial_layout.slm_atoms.len()
        || s.initial_layout.slm_atoms.iter().any(|st| st.row >= cfg.slm_rows || st.col >= cfg.slm_cols)
        || s.initial_layout.aod_atoms.values().any(|&c| !s.initial_aod.contains(c))
    {
        out.push(Violation::InitialLayout);
        return Err(out);
    }

    let mut r = Replay::new(s);
    for (i, stage) in s.stages.iter().enumerate() {
        match stage {
            Stage::Raman { gates } => {
                for g in gates {
                    if g.kind.arity() != 1 || r.position(g.atom).is_none() {
                        out.push(Violation::RamanTarget { stage: i, atom: g.atom });
                    }
                }
            }
            Stage::Move { aod, max_distance } => match check_move(&r.aod, aod) {
                Err(violation) => out.push(Violation::Move { stage: i, violation }),
                Ok(()) => {
                    let actual = r.move_distance(aod);
                    if !((actual - max_distance).abs() <= 1e-9) {
                        out.push(Violation::MoveDistance { stage: i, declared: *max_distance, actual });
                    }
                    r.aod = aod.clone();
                }
            },
            Stage::Rydberg { pairs, .. } => {
                let found = rydberg_pairs(&r.positions(), cfg);
                let intended: BTreeSet<_> = pairs.iter().map(|&(a, b)| ordered_pair(a, b)).collect();
                for &pair in &found.violations {
                    out.push(Violation::Separation { stage: i, pair });
                }
                for &pair in found.coupled.difference(&intended) {
                    out.push(Violation::UnintendedPair { stage: i, pair });
                }
                for &pair in intended.difference(&found.coupled) {
                    out.push(Violation::MissingPair { stage: i, pair });
                }
            }
            Stage::Transfer { transfers } => {
                for t in transfers {
                    match *t {
                        Transfer::Load { ancilla, crossing } => {
                            let taken = r.live.values().any(|&c| c == crossing);
                            if taken || !r.aod.contains(crossing) || r.live.contains_key(&ancilla) {
                                out.push(Violation::Transfer { stage: i, ancilla });
                            } else {
                                r.live.insert(ancilla, crossing);
                            }
                        }
                        Transfer::Unload { ancilla } => {
                            if r.live.remove(&ancilla).is_none() {
                                out.push(Violation::Transfer { stage: i, ancilla });
                            }
                        }
                    }
                }
            }
            Stage::Measure => {
                for &ancilla in r.live.keys() {
                    out.push(Violation::UnrecycledAncilla { stage: i, ancilla });
                }
            }
        }
    }
    if !matches!(s.stages.last(), Some(Stage::Measure)) {
        for &ancilla in r.live.keys() {
            out.push(Violation::UnrecycledAncilla { stage: s.stages.len(), ancilla });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Incremental schedule construction used by the routers. Tracks the AOD
/// state and live ancillas so move distances are filled in correctly.
#[derive(Clone, Debug)]
pub struct ScheduleBuilder {
    schedule: Schedule,
    aod: AodState,
    live: BTreeMap<u32, Crossing>,
}

impl ScheduleBuilder {
    pub fn new(config: FpqaConfig, layout: AtomLayout) -> ScheduleBuilder {
        let aod = AodState::parked(&config);
        ScheduleBuilder {
            live: layout.aod_atoms.clone(),
            schedule: Schedule { config, initial_layout: layout, initial_aod: aod.clone(), stages: Vec::new() },
            aod,
        }
    }

    pub fn config(&self) -> &FpqaConfig {
        &self.schedule.config
    }

    pub fn layout(&self) -> &AtomLayout {
        &self.schedule.initial_layout
    }

    pub fn aod(&self) -> &AodState {
        &self.aod
    }

    pub fn live(&self) -> &BTreeMap<u32, Crossing> {
        &self.live
    }

    /// Appends 1-Q gates, merging into a directly preceding Raman stage.
    pub fn raman(&mut self, gates: impl IntoIterator<Item = AtomGate>) {
        let mut gates = gates.into_iter().peekable();
        if gates.peek().is_none() {
            return;
        }
        if let Some(Stage::Raman { gates: prev }) = self.schedule.stages.last_mut() {
            prev.extend(gates);
        } else {
            self.schedule.stages.push(Stage::Raman { gates: gates.collect() });
        }
    }

    pub fn move_to(&mut self, aod: AodState) {
        if aod == self.aod {
            return;
        }
        let replay = Replay {
            config: &self.schedule.config,
            layout: &self.schedule.initial_layout,
            aod: self.aod.clone(),
            live: self.live.clone(),
        };
        let max_distance = replay.move_distance(&aod);
        self.aod = aod.clone();
        self.schedule.stages.push(Stage::Move { aod, max_distance });
    }

    pub fn rydberg(&mut self, pairs: Vec<(AtomId, AtomId)>, phase: f64, role: RydbergRole) {
        self.schedule.stages.push(Stage::Rydberg { pairs, phase, role });
    }

    pub fn load(&mut self, loads: impl IntoIterator<Item = (u32, Crossing)>) {
        let transfers: Vec<_> = loads
            .into_iter()
            .map(|(ancilla, crossing)| {
                self.live.insert(ancilla, crossing);
                Transfer::Load { ancilla, crossing }
            })
            .collect();
        if !transfers.is_empty() {
            self.schedule.stages.push(Stage::Transfer { transfers });
        }
    }

    pub fn unload_all(&mut self) {
        let transfers: Vec<_> =
            core::mem::take(&mut self.live).into_keys().map(|ancilla| Transfer::Unload { ancilla }).collect();
        if !transfers.is_empty() {
            self.schedule.stages.push(Stage::Transfer { transfers });
        }
    }

    pub fn finish(mut self) -> Schedule {
        self.schedule.stages.push(Stage::Measure);
        self.schedule
    }
}
