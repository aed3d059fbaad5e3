//! Pauli-string files, edge lists and the CSV outputs.

use std::collections::BTreeMap;
use std::io::Write;

use fpqa_core::arch::AtomId;
use fpqa_core::circuit::PauliString;
use fpqa_core::metrics::Metrics;
use fpqa_core::qaoa::EdgeSet;
use fpqa_core::qsim::PauliTerm;
use fpqa_core::schedule::{Replay, Schedule, Stage, Transfer};
use serde::Serialize;

use crate::error::{parse_err, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// One string per line over `IXYZ`, optionally followed by an angle.
/// Blank lines and `#` comments are skipped.
pub fn parse_pauli(text: &str, default_angle: f64) -> Result<Vec<PauliTerm>> {
    let mut terms: Vec<PauliTerm> = Vec::new();
    for (line, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let word = it.next().unwrap_or_default();
        let string: PauliString = word.parse().map_err(|_| parse_err(line, format!("bad Pauli string `{word}`")))?;
        let angle = match it.next() {
            Some(a) => a.parse().map_err(|_| parse_err(line, format!("bad angle `{a}`")))?,
            None => default_angle,
        };
        if let Some(extra) = it.next() {
            return Err(parse_err(line, format!("unexpected `{extra}`")));
        }
        if let Some(first) = terms.first() {
            if first.string.n_qubits() != string.n_qubits() {
                return Err(parse_err(
                    line,
                    format!("string has {} operators, expected {}", string.n_qubits(), first.string.n_qubits()),
                ));
            }
        }
        terms.push(PauliTerm::new(string, angle));
    }
    Ok(terms)
}

pub fn write_pauli(terms: &[PauliTerm]) -> String {
    terms.iter().map(|t| format!("{} {:?}\n", t.string, t.angle)).collect()
}

/// `n m` on the first line, then `m` lines of `u v`.
pub fn parse_edges(text: &str) -> Result<EdgeSet> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n m` header"))?;
    let nums = |line: usize, l: &str| -> Result<(u32, u32)> {
        let v: Vec<&str> = l.split_whitespace().collect();
        match v[..] {
            [a, b] => Ok((
                a.parse().map_err(|_| parse_err(line, format!("bad integer `{a}`")))?,
                b.parse().map_err(|_| parse_err(line, format!("bad integer `{b}`")))?,
            )),
            _ => Err(parse_err(line, format!("expected two integers, got `{l}`"))),
        }
    };
    let (n, m) = nums(hl, header)?;
    let mut edges = Vec::with_capacity(m as usize);
    let mut last = hl;
    for (line, l) in lines {
        edges.push(nums(line, l)?);
        last = line;
        if edges.len() > m as usize {
            return Err(parse_err(line, format!("more than the {m} declared edges")));
        }
    }
    if edges.len() != m as usize {
        return Err(parse_err(last, format!("{} edges listed, {m} declared", edges.len())));
    }
    Ok(EdgeSet::new(n, edges)?)
}

pub fn write_edges(g: &EdgeSet) -> String {
    let mut out = format!("{} {}\n", g.n_qubits(), g.len());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

#[derive(Debug, Serialize)]
struct MovementRow {
    time: usize,
    atom: String,
    x: f64,
    y: f64,
}

/// Atom trajectories as `time,atom,x,y` rows. `time` is the stage index;
/// every atom appears at time 0, and live ancillas are listed again after
/// each move or transfer.
pub fn write_movement_csv<W: Write>(s: &Schedule, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut replay = Replay::new(s);
    let emit = |w: &mut csv::Writer<W>, time: usize, pos: &[(AtomId, f64, f64)]| -> Result<()> {
        for &(id, x, y) in pos {
            w.serialize(MovementRow { time, atom: id.to_string(), x, y })?;
        }
        Ok(())
    };
    emit(&mut w, 0, &replay.positions())?;
    for (i, st) in s.stages.iter().enumerate() {
        match st {
            Stage::Move { aod, .. } => replay.aod = aod.clone(),
            Stage::Transfer { transfers } => {
                for t in transfers {
                    match *t {
                        Transfer::Load { ancilla, crossing } => {
                            replay.live.insert(ancilla, crossing);
                        }
                        Transfer::Unload { ancilla } => {
                            replay.live.remove(&ancilla);
                        }
                    }
                }
            }
            _ => continue,
        }
        let anc: Vec<_> = replay.positions().into_iter().filter(|(id, ..)| matches!(id, AtomId::Ancilla(_))).collect();
        emit(&mut w, i + 1, &anc)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    width: u32,
    depth: usize,
    g2: usize,
    epsilon: f64,
}

/// `width,depth,g2,epsilon` rows; `epsilon` maps a width to its error rate.
pub fn write_sweep_csv<W: Write>(
    sweep: &BTreeMap<u32, Metrics>,
    epsilon: impl Fn(&Metrics) -> f64,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (&width, m) in sweep {
        w.serialize(SweepRow { width, depth: m.depth, g2: m.g2, epsilon: epsilon(m) })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn pauli_file() {
        let t = parse_pauli("# header\nXYZI 0.3\n\nIIZZ\n", 0.1).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].string.to_string(), "XYZI");
        assert_eq!((t[0].angle, t[1].angle), (0.3, 0.1));
        assert_eq!(parse_pauli(&write_pauli(&t), 0.0).unwrap(), t);
    }

    #[test]
    fn pauli_errors() {
        for (src, line) in [("XX\nXQ", 2), ("XX\nXXX", 2), ("XX 0.1 0.2", 1), ("XX abc", 1)] {
            assert!(matches!(parse_pauli(src, 0.1), Err(Error::Parse { line: l, .. }) if l == line), "{src}");
        }
    }

    #[test]
    fn edge_list() {
        let g = parse_edges("4 3\n0 1\n1 2\n3 2\n").unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.edges().contains(&(2, 3)));
        assert_eq!(parse_edges(&write_edges(&g)).unwrap(), g);
    }

    #[test]
    fn edge_errors() {
        assert!(matches!(parse_edges(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edges("3 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edges("3 1\n0 1\n1 2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_edges("3 1\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edges("3 1\n0 3\n"), Err(Error::Core(_))));
        assert!(matches!(parse_edges("3 2\n0 1\n1 0\n"), Err(Error::Core(_))));
    }
}
