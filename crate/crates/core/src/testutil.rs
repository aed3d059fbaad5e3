//! Fixtures shared by unit tests.

use alloc::vec;
use core::f64::consts::PI;

use crate::arch::{reading_order_mapping, AtomId, Crossing, FpqaConfig, Site};
use crate::circuit::{Circuit, Gate, GateKind};
use crate::schedule::{AtomGate, RydbergRole, Schedule, ScheduleBuilder};

/// The worked generic-router example: 12 qubits on a 3x4 array. Front layer
/// `g0..g3`; the greedy keeps `g0, g1, g3` and `g2` conflicts on target
/// columns.
pub(crate) fn greedy_example_circuit() -> Circuit {
    Circuit::from_gates(
        12,
        [
            Gate::cz(0, 5),
            Gate::cz(1, 6),
            Gate::cz(2, 4),
            Gate::cz(3, 11),
            Gate::cz(0, 8),
            Gate::cz(6, 9),
            Gate::cz(7, 11),
        ],
    )
    .unwrap()
}

/// Hand-built copy / gate / recycle for CZ(0, 2) on a 1x3 row.
pub(crate) fn single_cz() -> Schedule {
    let cfg = FpqaConfig::with_grid(1, 3);
    let layout = reading_order_mapping(3, &cfg).unwrap();
    let m = cfg.parking_offset().unwrap();
    let mut b = ScheduleBuilder::new(cfg.clone(), layout);
    let a = AtomId::Ancilla(0);
    b.load([(0, Crossing::diagonal(0))]);
    let at = |b: &ScheduleBuilder, x: f64, y: f64| {
        let mut aod = b.aod().clone();
        aod.col_x[0] = x;
        aod.row_y[0] = y;
        aod
    };
    let (x0, _) = cfg.site_position(Site::new(0, 0));
    let (x2, _) = cfg.site_position(Site::new(0, 2));
    let next = at(&b, x0 + m, 0.0);
    b.move_to(next);
    b.raman([AtomGate::new(a, GateKind::H)]);
    b.rydberg(vec![(AtomId::Data(0), a)], PI, RydbergRole::Copy);
    b.raman([AtomGate::new(a, GateKind::H)]);
    let next = at(&b, x2 + m, 0.0);
    b.move_to(next);
    b.rydberg(vec![(AtomId::Data(2), a)], PI, RydbergRole::Gate);
    let next = at(&b, x0 + m, 0.0);
    b.move_to(next);
    b.raman([AtomGate::new(a, GateKind::H)]);
    b.rydberg(vec![(AtomId::Data(0), a)], PI, RydbergRole::Recycle);
    b.raman([AtomGate::new(a, GateKind::H)]);
    b.unload_all();
    b.finish()
}
