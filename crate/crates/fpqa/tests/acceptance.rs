//! End-to-end acceptance run: one PASS/FAIL line per criterion. Exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fpqa::bench::{gen_er_graph, gen_pauli_strings, gen_random_circuit, gen_regular_graph};
use fpqa_core::ancilla::{CzVariant, Protocol};
use fpqa_core::arch::{reading_order_mapping, Crossing, FpqaConfig};
use fpqa_core::circuit::{front_layer, Axis, Circuit, Gate};
use fpqa_core::generic::{self, select_subset};
use fpqa_core::metrics::{
    argmin_depth, evaluate, fidelity, sweep_array_width, Metrics, NoiseParams, Problem, TwoQubitExponent,
};
use fpqa_core::oracle::{equivalence, simulate_from, StateVector};
use fpqa_core::qaoa::route_qaoa;
use fpqa_core::qsim::{fanout_depth, fanout_tree, route_pauli, PauliTerm};
use fpqa_core::schedule::{validate, Schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;
const WIDTHS: [u32; 5] = [8, 16, 32, 64, 128];
/// Width used for QAOA instances: the widest array of the sweep, where QAOA
/// depth is smallest.
const QAOA_WIDTH: u32 = 128;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn terms(strings: Vec<fpqa_core::circuit::PauliString>) -> Vec<PauliTerm> {
    strings.into_iter().map(|s| PauliTerm::new(s, 0.1)).collect()
}

/// Product state: random single-qubit states on `data`, then `zeros` |0>s.
fn product_input(data: usize, zeros: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let mut qubits = Vec::with_capacity(data + zeros);
    for _ in 0..data {
        let a = StateVector::random_product(1, rng).unwrap();
        qubits.push((a.amplitudes()[0], a.amplitudes()[1]));
    }
    let zero = StateVector::zero(1).unwrap();
    qubits.extend(std::iter::repeat_n((zero.amplitudes()[0], zero.amplitudes()[1]), zeros));
    StateVector::product(&qubits).unwrap()
}

fn c1_flying_ancilla() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_f, mut worst_leak) = (1.0f64, 0.0f64);
    for _ in 0..500 {
        let n = rng.random_range(2..=5u32);
        let mut pairs = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                if rng.random_bool(0.5) {
                    pairs.push(((j, k), CzVariant::ALL[rng.random_range(0..4)]));
                }
            }
        }
        let protocol = Protocol::with_variants(n, &pairs).unwrap();
        let direct = Circuit::from_gates(2 * n, pairs.iter().map(|&((j, k), _)| Gate::cz(j, k))).unwrap();
        let input = product_input(n as usize, n as usize, &mut rng);
        let got = simulate_from(&protocol.to_circuit(), input.clone()).unwrap();
        let want = simulate_from(&direct, input).unwrap();
        worst_f = worst_f.min(got.fidelity(&want));
        for a in n..2 * n {
            worst_leak = worst_leak.max(got.prob_one(a as usize));
        }
    }
    let t = start.elapsed();
    outcome(
        worst_f >= 1.0 - TOL && worst_leak < TOL && t < Duration::from_secs(30),
        format!(
            "500 cases, min fidelity {worst_f:.3e} deviation {:.1e}, max leakage {worst_leak:.1e}, {t:.2?}",
            1.0 - worst_f
        ),
    )
}

fn random_small_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.random_range(2..=5u32);
    let len = rng.random_range(0..=12);
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        let angle = rng.random_range(-3.0..3.0);
        let g = match rng.random_range(0..9) {
            0 => Gate::h(a),
            1 => Gate::s(a),
            2 => Gate::sdg(a),
            3 => Gate::rot([Axis::X, Axis::Y, Axis::Z][rng.random_range(0..3)], angle, a),
            4 => Gate::cz(a, b),
            5 | 6 => Gate::cnot(a, b),
            7 => Gate::zz(angle, a, b),
            _ => Gate::swap(a, b),
        };
        c.push(g).unwrap();
    }
    c
}

fn c2_generic_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 1.0f64;
    for _ in 0..200 {
        let c = random_small_circuit(&mut rng);
        let s = generic::compile(&c, &FpqaConfig::square_for(c.n_qubits())).unwrap();
        worst = worst.min(equivalence(&c, &s).unwrap());
    }
    let t = start.elapsed();
    outcome(
        worst >= 1.0 - TOL && t < Duration::from_secs(60),
        format!("200 circuits, min fidelity deviation {:.1e}, {t:.2?}", 1.0 - worst),
    )
}

fn random_config(n: u32, rng: &mut ChaCha8Rng) -> FpqaConfig {
    if rng.random_bool(0.5) {
        FpqaConfig::square_for(n)
    } else {
        FpqaConfig::for_qubits(n, rng.random_range(1..=n))
    }
}

fn c3_legality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = [0usize; 3];
    for _ in 0..1000 {
        let n = rng.random_range(2..=100u32);
        let cfg = random_config(n, &mut rng);
        let c = gen_random_circuit(n, rng.random_range(1..=3), rng.random()).unwrap();
        let s = generic::compile(&c, &cfg).unwrap();
        bad[0] += validate(&s).is_err() as usize;

        let n = rng.random_range(2..=100u32);
        let cfg = random_config(n, &mut rng);
        let count = rng.random_range(1..=5);
        let p = [0.05, 0.1, 0.2, 0.5][rng.random_range(0..4)];
        let s = route_pauli(&terms(gen_pauli_strings(n, count, p, rng.random()).unwrap()), &cfg).unwrap();
        bad[1] += validate(&s).is_err() as usize;

        let n = rng.random_range(2..=100u32);
        let cfg = random_config(n, &mut rng);
        let p = [0.1, 0.2, 0.3, 0.4, 0.5][rng.random_range(0..5)];
        let s = route_qaoa(&gen_er_graph(n, p, rng.random()).unwrap(), 0.1, &cfg).unwrap();
        bad[2] += validate(&s).is_err() as usize;
    }
    outcome(
        bad == [0, 0, 0],
        format!("invalid schedules generic/qsim/qaoa = {bad:?} of 1000 each, {:.2?}", start.elapsed()),
    )
}

fn c4_greedy_example() -> Outcome {
    let c = Circuit::from_gates(
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
    .unwrap();
    let cfg = FpqaConfig::with_grid(3, 4);
    let layout = reading_order_mapping(12, &cfg).unwrap();
    let front = front_layer(&c, &BTreeSet::new());
    let subset = select_subset(&c, &front, &layout, cfg.diagonal_capacity());
    let done: BTreeSet<usize> = subset.ids().into_iter().collect();
    let next = front_layer(&c, &done);
    let slots: Vec<Crossing> = (0..3).map(Crossing::diagonal).collect();
    outcome(
        subset.ids() == [0, 1, 3] && subset.ancilla_slots == slots && next == [2, 4, 5, 6],
        format!("subset {:?} at {:?}, next front {next:?}", subset.ids(), subset.ancilla_slots),
    )
}

fn c5_fanout_depth() -> Outcome {
    let mut cfg = FpqaConfig::with_grid(1, 1);
    cfg.aod_rows = 1000;
    cfg.aod_cols = 1000;
    let layout = reading_order_mapping(1, &cfg).unwrap();
    let mut mismatches = Vec::new();
    for n in 1..=1000usize {
        // smallest k with sum_{j<=k} max(1, 2(j-1)) >= n
        let (mut k, mut total) = (0usize, 0usize);
        while total < n {
            k += 1;
            total += 1.max(2 * (k - 1));
        }
        let depth = fanout_tree(0, n, &layout, &cfg).unwrap().depth();
        let bound = (n as f64).sqrt().ceil() as usize + 1;
        if depth != k || fanout_depth(n) != k || depth > bound {
            mismatches.push(n);
        }
    }
    outcome(mismatches.is_empty(), format!("N in 1..=1000, mismatches {mismatches:?}"))
}

fn qaoa_metrics(n: u32, seed: u64) -> Metrics {
    let g = gen_regular_graph(n, 3, seed).unwrap();
    evaluate(&route_qaoa(&g, 0.1, &FpqaConfig::for_qubits(n, QAOA_WIDTH)).unwrap()).unwrap()
}

fn c6_qaoa_depth() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, target) in [(6, 6.0), (10, 7.7), (20, 13.0)] {
        let depths: Vec<usize> = (0..10).map(|s| qaoa_metrics(n, s).depth).collect();
        let max = *depths.iter().max().unwrap();
        let mean = depths.iter().sum::<usize>() as f64 / depths.len() as f64;
        pass &= max <= 12 && mean <= 2.0 * target;
        detail.push(format!("n={n} max {max} mean {mean:.1} (target {target})"));
    }
    outcome(pass, format!("depth <= 12 over 10 seeds: {}", detail.join(", ")))
}

fn c7_parallelism() -> Outcome {
    let mut means = Vec::new();
    let mut gate_only = Vec::new();
    for n in [20, 50, 100] {
        let ms: Vec<Metrics> = (0..10).map(|s| qaoa_metrics(n, s)).collect();
        means.push(ms.iter().map(Metrics::mean_parallelism).sum::<f64>() / 10.0);
        gate_only.push(ms.iter().map(Metrics::mean_gate_parallelism).sum::<f64>() / 10.0);
    }
    let monotone = means.windows(2).all(|w| w[1] > w[0]);
    let close = (means[2] - 4.90).abs() <= 0.25 * 4.90;
    outcome(
        monotone && close,
        format!(
            "mean 2-Q gates per Rydberg stage n=20/50/100: {:.2}/{:.2}/{:.2} (gate stages only {:.2}/{:.2}/{:.2})",
            means[0], means[1], means[2], gate_only[0], gate_only[1], gate_only[2]
        ),
    )
}

fn timed(f: impl FnOnce() -> Schedule) -> Duration {
    let start = Instant::now();
    let s = f();
    let t = start.elapsed();
    assert!(!s.stages.is_empty());
    t
}

fn c8_scalability() -> Outcome {
    let qaoa = gen_er_graph(500, 0.5, 8).unwrap();
    let pauli = terms(gen_pauli_strings(500, 100, 0.1, 8).unwrap());
    let random = gen_random_circuit(500, 10, 8).unwrap();
    let regular = gen_regular_graph(100, 3, 8).unwrap();
    let sq = FpqaConfig::square_for;
    let times = [
        timed(|| route_qaoa(&qaoa, 0.1, &sq(500)).unwrap()),
        timed(|| route_pauli(&pauli, &sq(500)).unwrap()),
        timed(|| generic::compile(&random, &sq(500)).unwrap()),
        timed(|| route_qaoa(&regular, 0.1, &sq(100)).unwrap()),
    ];
    let limits = [60, 120, 120, 2].map(Duration::from_secs);
    outcome(
        times.iter().zip(&limits).all(|(t, l)| t < l),
        format!(
            "qaoa-500 {:.2?}, qsim-500 {:.2?}, random-500 {:.2?}, regular-100 {:.2?}",
            times[0], times[1], times[2], times[3]
        ),
    )
}

fn c9_error_model() -> Outcome {
    let p = NoiseParams { f1: 0.999, f2: 1.0 - 1e-3, t2: 1.5, t0: 300e-6 };
    let mode = TwoQubitExponent::AtomsTimesDepth;
    let mut means = Vec::new();
    for class in 0..3 {
        let mut total = 0.0;
        for seed in 0..10 {
            let problem = match class {
                0 => Problem::Pauli(terms(gen_pauli_strings(5, 100, 0.1, seed).unwrap())),
                1 => Problem::Circuit(gen_random_circuit(5, 2, seed).unwrap()),
                // no 3-regular graph exists on 5 vertices
                _ => Problem::Qaoa { graph: gen_regular_graph(6, 3, seed).unwrap(), gamma: 0.1 },
            };
            let s = problem.compile(&FpqaConfig::square_for(problem.n_qubits())).unwrap();
            total += fidelity(&evaluate(&s).unwrap(), &p, mode).unwrap();
        }
        means.push(total / 10.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut monotone_failures = 0;
    for _ in 0..1000 {
        let m = Metrics {
            depth: rng.random_range(0..200),
            g1: rng.random_range(0..2000),
            g2: rng.random_range(0..400),
            n_atoms: rng.random_range(1..50),
            stage_distances: (0..rng.random_range(0..30)).map(|_| rng.random_range(0.0..1.5)).collect(),
            ..Metrics::default()
        };
        let q = NoiseParams {
            f1: rng.random_range(0.95..=1.0),
            f2: rng.random_range(0.95..=1.0),
            t2: rng.random_range(0.1..10.0),
            t0: rng.random_range(1e-5..1e-3),
        };
        let e = |m: &Metrics, q: &NoiseParams| fidelity(m, q, mode).unwrap();
        let base = e(&m, &q);
        let mut worse = Vec::new();
        worse.push(e(&m, &NoiseParams { f1: q.f1 * 0.999, ..q }));
        worse.push(e(&m, &NoiseParams { f2: q.f2 * 0.999, ..q }));
        for bump in 0..4 {
            let mut m2 = m.clone();
            match bump {
                0 => m2.depth += 1,
                1 => m2.g1 += 1,
                2 => m2.n_atoms += 1,
                _ => m2.stage_distances.push(0.3),
            }
            worse.push(e(&m2, &q));
        }
        if let Some(d) = m.stage_distances.first() {
            let mut m2 = m.clone();
            m2.stage_distances[0] = d + 0.1;
            worse.push(e(&m2, &q));
        }
        if !(0.0..=1.0).contains(&base) || worse.iter().any(|&w| w < base) {
            monotone_failures += 1;
        }
    }
    outcome(
        means.iter().all(|&e| e < 0.5) && monotone_failures == 0,
        format!(
            "mean epsilon over 10 seeds qsim/random/qaoa = {:.3}/{:.3}/{:.3}; monotonicity failures {monotone_failures}/1000",
            means[0], means[1], means[2]
        ),
    )
}

fn c10_width_sweep() -> Outcome {
    let problems = [
        ("qaoa", Problem::Qaoa { graph: gen_regular_graph(100, 3, 10).unwrap(), gamma: 0.1 }),
        ("random", Problem::Circuit(gen_random_circuit(100, 10, 10).unwrap())),
        ("qsim", Problem::Pauli(terms(gen_pauli_strings(100, 100, 0.1, 10).unwrap()))),
    ];
    let mut argmins = Vec::new();
    let mut detail = Vec::new();
    for (name, p) in &problems {
        let sweep = sweep_array_width(p, &WIDTHS).unwrap();
        let best = argmin_depth(&sweep).unwrap();
        let depths: Vec<usize> = sweep.values().map(|m| m.depth).collect();
        detail.push(format!("{name} depths {depths:?} argmin {best}"));
        argmins.push(best);
    }
    outcome(
        argmins[0] == 128 && [32, 64].contains(&argmins[1]) && [32, 64].contains(&argmins[2]),
        format!("widths {WIDTHS:?}: {}", detail.join("; ")),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("flying-ancilla protocol correctness", c1_flying_ancilla),
        ("generic router equivalence", c2_generic_equivalence),
        ("router legality", c3_legality),
        ("worked greedy selection example", c4_greedy_example),
        ("fan-out depth", c5_fanout_depth),
        ("QAOA depth vs optimum", c6_qaoa_depth),
        ("QAOA parallelism trend", c7_parallelism),
        ("scalability", c8_scalability),
        ("error model", c9_error_model),
        ("array-width sweep", c10_width_sweep),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let res = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += !res.pass as usize;
        println!("criterion {:>2} {} {name}: {}", i + 1, if res.pass { "PASS" } else { "FAIL" }, res.detail);
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
