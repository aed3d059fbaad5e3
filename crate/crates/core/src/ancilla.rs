//! The flying-ancilla primitive at the logical level.
//!
//! A transversal CNOT copies the Z-basis value of data qubit `j` onto a fresh
//! ancilla `j'`, so `|x>|0>` becomes `|x>|x>`. A CZ between `j` and `k` can
//! then be applied to any of `(j, k)`, `(j', k)`, `(j, k')` or `(j', k')`
//! because each picks up the same phase `(-1)^{x_j x_k}`. A second CNOT
//! returns every ancilla to `|0>`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::arch::AtomId;
use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

/// One CNOT layer: `(control, target)` pairs acting in parallel.
pub type CnotLayer = Vec<(AtomId, AtomId)>;
type CzLayer = Vec<(AtomId, AtomId)>;

/// Ancillas holding Z-basis copies of `root`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoutGroup {
    pub root: u32,
    pub ancillas: Vec<u32>,
}

impl FanoutGroup {
    pub fn new(root: u32, ancillas: Vec<u32>) -> FanoutGroup {
        FanoutGroup { root, ancillas }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaState {
    Fresh,
    Live,
    Retired,
}

/// Tracks ancilla lifetimes so a group can only be copied into fresh atoms
/// and only recycled while live. Unknown ids count as fresh.
#[derive(Clone, Debug, Default)]
pub struct AncillaPool {
    state: BTreeMap<u32, AncillaState>,
}

impl AncillaPool {
    pub fn new() -> AncillaPool {
        AncillaPool::default()
    }

    pub fn state(&self, ancilla: u32) -> AncillaState {
        self.state.get(&ancilla).copied().unwrap_or(AncillaState::Fresh)
    }

    /// CNOT layers copying the root into every ancilla of the group. Each
    /// layer doubles the number of holders, so a single ancilla takes one
    /// CNOT and `k` ancillas take `ceil(log2(k + 1))` layers.
    pub fn copy_stage(&mut self, g: &FanoutGroup) -> Result<Vec<CnotLayer>> {
        let distinct: BTreeSet<_> = g.ancillas.iter().collect();
        if let Some(&a) = g.ancillas.iter().find(|&&a| self.state(a) != AncillaState::Fresh) {
            return Err(Error::AncillaNotFresh(a));
        }
        if distinct.len() != g.ancillas.len() {
            return Err(Error::AncillaNotFresh(g.ancillas[0]));
        }
        for &a in &g.ancillas {
            self.state.insert(a, AncillaState::Live);
        }
        Ok(doubling_layers(g))
    }

    /// Mirror of [`AncillaPool::copy_stage`]; retires the group.
    pub fn recycle_stage(&mut self, g: &FanoutGroup) -> Result<Vec<CnotLayer>> {
        if g.ancillas.iter().any(|&a| self.state(a) != AncillaState::Live) {
            return Err(Error::GroupNotLive(g.root));
        }
        for &a in &g.ancillas {
            self.state.insert(a, AncillaState::Retired);
        }
        let mut layers = doubling_layers(g);
        layers.reverse();
        Ok(layers)
    }
}

fn doubling_layers(g: &FanoutGroup) -> Vec<CnotLayer> {
    let mut holders = vec![AtomId::Data(g.root)];
    let mut fresh = g.ancillas.iter().map(|&a| AtomId::Ancilla(a));
    let mut layers = Vec::new();
    loop {
        let layer: CnotLayer = holders.iter().zip(fresh.by_ref()).map(|(&c, t)| (c, t)).collect();
        if layer.is_empty() {
            return layers;
        }
        holders.extend(layer.iter().map(|&(_, t)| t));
        layers.push(layer);
    }
}

/// Which atoms carry a CZ on the logical pair `(j, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CzVariant {
    Original,
    AncillaFirst,
    AncillaSecond,
    BothAncillas,
}

impl CzVariant {
    pub const ALL: [CzVariant; 4] =
        [CzVariant::Original, CzVariant::AncillaFirst, CzVariant::AncillaSecond, CzVariant::BothAncillas];

    /// Physical endpoints when ancilla `j'` is `ancilla_of(j)`.
    pub fn atoms(self, j: u32, k: u32, ancilla_of: impl Fn(u32) -> u32) -> (AtomId, AtomId) {
        let (d, a) = (AtomId::Data, |q| AtomId::Ancilla(ancilla_of(q)));
        match self {
            CzVariant::Original => (d(j), d(k)),
            CzVariant::AncillaFirst => (a(j), d(k)),
            CzVariant::AncillaSecond => (d(j), a(k)),
            CzVariant::BothAncillas => (a(j), a(k)),
        }
    }
}

/// Which of `j`, `j'`, `k`, `k'` can take part in the current stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Availability {
    pub data_j: bool,
    pub ancilla_j: bool,
    pub data_k: bool,
    pub ancilla_k: bool,
}

impl Availability {
    pub const ALL: Availability = Availability { data_j: true, ancilla_j: true, data_k: true, ancilla_k: true };

    fn allows(self, v: CzVariant) -> bool {
        match v {
            CzVariant::Original => self.data_j && self.data_k,
            CzVariant::AncillaFirst => self.ancilla_j && self.data_k,
            CzVariant::AncillaSecond => self.data_j && self.ancilla_k,
            CzVariant::BothAncillas => self.ancilla_j && self.ancilla_k,
        }
    }
}

/// Picks a variant for `(j, k)`. Ancilla-carried variants come first since
/// they free the data atoms; the bare pair wins when it is already within
/// the Rydberg radius.
pub fn select_cz_variant(j: u32, k: u32, avail: Availability, adjacent: bool) -> Result<CzVariant> {
    if adjacent && avail.allows(CzVariant::Original) {
        return Ok(CzVariant::Original);
    }
    [CzVariant::AncillaFirst, CzVariant::AncillaSecond, CzVariant::BothAncillas, CzVariant::Original]
        .into_iter()
        .find(|&v| avail.allows(v))
        .ok_or(Error::NoLegalVariant(j, k))
}

/// Copy / variant-CZ / recycle over `n` data qubits, ancilla `j'` numbered
/// `j`. Every data qubit gets one ancilla.
#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub n_qubits: u32,
    pub copy: Vec<CnotLayer>,
    pub cz_layers: Vec<Vec<(AtomId, AtomId)>>,
    pub recycle: Vec<CnotLayer>,
}

impl Protocol {
    /// Schedules `pairs` greedily into atom-disjoint CZ layers, choosing a
    /// variant per pair with [`select_cz_variant`]. A pair that fits in no
    /// variant of the current layer opens the next one.
    pub fn greedy(n_qubits: u32, pairs: &[(u32, u32)]) -> Result<Protocol> {
        let mut layers: Vec<(BTreeSet<AtomId>, CzLayer)> = Vec::new();
        for &(j, k) in pairs {
            check_pair(n_qubits, j, k)?;
            let placed = layers.iter_mut().any(|(used, layer)| {
                let free = |a| !used.contains(&a);
                let avail = Availability {
                    data_j: free(AtomId::Data(j)),
                    ancilla_j: free(AtomId::Ancilla(j)),
                    data_k: free(AtomId::Data(k)),
                    ancilla_k: free(AtomId::Ancilla(k)),
                };
                match select_cz_variant(j, k, avail, false) {
                    Ok(v) => {
                        let (a, b) = v.atoms(j, k, |q| q);
                        used.insert(a);
                        used.insert(b);
                        layer.push((a, b));
                        true
                    }
                    Err(_) => false,
                }
            });
            if !placed {
                let (a, b) = CzVariant::AncillaFirst.atoms(j, k, |q| q);
                layers.push((BTreeSet::from([a, b]), vec![(a, b)]));
            }
        }
        Protocol::with_layers(n_qubits, layers.into_iter().map(|(_, l)| l).collect())
    }

    /// One CZ per layer with the given variants.
    pub fn with_variants(n_qubits: u32, pairs: &[((u32, u32), CzVariant)]) -> Result<Protocol> {
        let mut layers = Vec::new();
        for &((j, k), v) in pairs {
            check_pair(n_qubits, j, k)?;
            layers.push(vec![v.atoms(j, k, |q| q)]);
        }
        Protocol::with_layers(n_qubits, layers)
    }

    fn with_layers(n_qubits: u32, cz_layers: Vec<Vec<(AtomId, AtomId)>>) -> Result<Protocol> {
        let mut pool = AncillaPool::new();
        let mut copy: Vec<CnotLayer> = vec![Vec::new()];
        let mut recycle: Vec<CnotLayer> = vec![Vec::new()];
        for q in 0..n_qubits {
            let g = FanoutGroup::new(q, vec![q]);
            copy[0].extend(pool.copy_stage(&g)?.concat());
            recycle[0].extend(pool.recycle_stage(&g)?.concat());
        }
        if n_qubits == 0 {
            copy.clear();
            recycle.clear();
        }
        Ok(Protocol { n_qubits, copy, cz_layers, recycle })
    }

    /// Number of 2-Q layers.
    pub fn depth(&self) -> usize {
        self.copy.len() + self.cz_layers.len() + self.recycle.len()
    }

    /// The protocol as a circuit on `2n` qubits, ancilla `j'` at index
    /// `n + j`.
    pub fn to_circuit(&self) -> Circuit {
        let n = self.n_qubits;
        let idx = |a: AtomId| match a {
            AtomId::Data(q) => q,
            AtomId::Ancilla(q) => n + q,
        };
        let cnots = |layers: &[CnotLayer]| -> Vec<Gate> {
            layers.iter().flatten().map(|&(c, t)| Gate::cnot(idx(c), idx(t))).collect()
        };
        let mut gates = cnots(&self.copy);
        gates.extend(self.cz_layers.iter().flatten().map(|&(a, b)| Gate::cz(idx(a), idx(b))));
        gates.extend(cnots(&self.recycle));
        Circuit::from_gates(2 * n, gates).expect("protocol atoms are in range")
    }
}

fn check_pair(n: u32, j: u32, k: u32) -> Result<()> {
    for q in [j, k] {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
        }
    }
    if j == k {
        return Err(Error::RepeatedQubit(j));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{simulate_from, StateVector};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transversal_copy_is_one_layer() {
        let mut pool = AncillaPool::new();
        let layers: Vec<_> = (0..3).map(|q| pool.copy_stage(&FanoutGroup::new(q, vec![q])).unwrap()).collect();
        assert!(layers.iter().all(|l| l.len() == 1 && l[0].len() == 1));
        assert_eq!(pool.copy_stage(&FanoutGroup::new(0, vec![])).unwrap(), Vec::<CnotLayer>::new());
        assert_eq!(pool.copy_stage(&FanoutGroup::new(1, vec![1])), Err(Error::AncillaNotFresh(1)));
    }

    #[test]
    fn recycle_mirrors_copy() {
        let mut pool = AncillaPool::new();
        let g = FanoutGroup::new(4, vec![10, 11, 12]);
        assert_eq!(pool.recycle_stage(&g), Err(Error::GroupNotLive(4)));
        let mut copy = pool.copy_stage(&g).unwrap();
        assert_eq!(copy.len(), 2);
        let recycle = pool.recycle_stage(&g).unwrap();
        copy.reverse();
        assert_eq!(recycle, copy);
        assert_eq!(pool.recycle_stage(&g), Err(Error::GroupNotLive(4)));
        assert_eq!(pool.state(10), AncillaState::Retired);
    }

    #[test]
    fn variant_preferences() {
        assert_eq!(select_cz_variant(0, 1, Availability::ALL, true), Ok(CzVariant::Original));
        assert_eq!(select_cz_variant(0, 1, Availability::ALL, false), Ok(CzVariant::AncillaFirst));
        let only_both = Availability { ancilla_j: true, ancilla_k: true, ..Default::default() };
        assert_eq!(select_cz_variant(0, 1, only_both, false), Ok(CzVariant::BothAncillas));
        assert_eq!(select_cz_variant(0, 1, Availability::default(), true), Err(Error::NoLegalVariant(0, 1)));
    }

    #[test]
    fn triangle_fits_one_step() {
        let p = Protocol::greedy(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let a = AtomId::Ancilla;
        let d = AtomId::Data;
        assert_eq!(p.cz_layers, vec![vec![(a(0), d(1)), (a(1), d(2)), (a(2), d(0))]]);
        assert_eq!(p.depth(), 3);
    }

    #[test]
    fn one_cz_costs_two_extra_layers() {
        let p = Protocol::greedy(2, &[(0, 1)]).unwrap();
        assert_eq!(p.depth(), 1 + 2);
    }

    #[test]
    fn copy_fans_out_basis_states() {
        // n = 2: sum C_x |x>|00> -> sum C_x |x>|x>
        let n = 2;
        let p = Protocol::greedy(n, &[]).unwrap();
        let mut c = Circuit::new(2 * n);
        for g in p.to_circuit().gates().iter().take(2) {
            c.push(*g).unwrap();
        }
        let coeffs =
            [Complex64::new(0.1, 0.3), Complex64::new(-0.5, 0.2), Complex64::new(0.4, 0.0), Complex64::new(0.3, -0.6)];
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[..4].copy_from_slice(&coeffs);
        let out = simulate_from(&c, StateVector::from_amplitudes(amps).unwrap()).unwrap();
        for (x, cx) in coeffs.iter().enumerate() {
            assert!((out.amplitudes()[x | x << 2] - cx).norm() < 1e-15);
        }
    }

    #[test]
    fn full_protocol_equals_direct_czs() {
        let pairs = [(0, 1), (1, 2), (2, 0)];
        let p = Protocol::greedy(3, &pairs).unwrap();
        let direct = Circuit::from_gates(6, pairs.iter().map(|&(a, b)| Gate::cz(a, b))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = StateVector::random_product(3, &mut rng).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 64];
        amps[..8].copy_from_slice(data.amplitudes());
        let input = StateVector::from_amplitudes(amps).unwrap();
        let want = simulate_from(&direct, input.clone()).unwrap();
        let got = simulate_from(&p.to_circuit(), input).unwrap();
        for (a, b) in want.amplitudes().iter().zip(got.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
