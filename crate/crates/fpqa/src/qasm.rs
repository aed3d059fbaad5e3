//! OpenQASM 2 subset: one quantum register and the gates
//! `h s sdg rx ry rz cx cz swap rzz`. `barrier`, `measure`, `creg` and the
//! header lines are accepted and ignored.

use std::f64::consts::PI;

use fpqa_core::circuit::{Circuit, Gate, GateKind};

use crate::error::{parse_err, Error, Result};

/// Statements with the line each one starts on. Comments are stripped.
fn statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for ch in line.chars() {
            if ch == ';' {
                out.push((start, std::mem::take(&mut cur).trim().to_string()));
            } else {
                if cur.trim().is_empty() && !ch.is_whitespace() {
                    start = i + 1;
                }
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if !cur.trim().is_empty() {
        out.push((start, cur.trim().to_string()));
    }
    out
}

/// Evaluates `pi`, numbers, `+ - * /`, unary minus and parentheses.
struct Expr<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Expr<'_> {
    fn eval(src: &str) -> Option<f64> {
        let mut e = Expr { s: src.as_bytes(), pos: 0 };
        let v = e.sum()?;
        e.skip_ws();
        (e.pos == e.s.len()).then_some(v)
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Option<f64> {
        let mut v = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            v = if op == b'+' { v + r } else { v - r };
        }
        Some(v)
    }

    fn product(&mut self) -> Option<f64> {
        let mut v = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let r = self.unary()?;
            v = if op == b'*' { v * r } else { v / r };
        }
        Some(v)
    }

    fn unary(&mut self) -> Option<f64> {
        match self.peek()? {
            b'-' => {
                self.pos += 1;
                Some(-self.unary()?)
            }
            b'+' => {
                self.pos += 1;
                self.unary()
            }
            b'(' => {
                self.pos += 1;
                let v = self.sum()?;
                (self.peek()? == b')').then(|| self.pos += 1)?;
                Some(v)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Option<f64> {
        let start = self.pos;
        if self.s[start..].starts_with(b"pi") {
            self.pos += 2;
            return Some(PI);
        }
        while let Some(&c) = self.s.get(self.pos) {
            let exp_sign = (c == b'-' || c == b'+') && matches!(self.s.get(self.pos - 1), Some(b'e' | b'E'));
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }
}

fn parse_operand(op: &str, reg: &str, n: u32, line: usize) -> Result<u32> {
    let op = op.trim();
    let (name, rest) = op.split_once('[').ok_or_else(|| parse_err(line, format!("expected `{reg}[i]`, got `{op}`")))?;
    if name.trim() != reg {
        return Err(parse_err(line, format!("unknown register `{}`", name.trim())));
    }
    let idx: u32 = rest
        .strip_suffix(']')
        .and_then(|i| i.trim().parse().ok())
        .ok_or_else(|| parse_err(line, format!("bad qubit operand `{op}`")))?;
    if idx >= n {
        return Err(parse_err(line, format!("qubit {idx} out of range for {reg}[{n}]")));
    }
    Ok(idx)
}

pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut reg: Option<(String, u32)> = None;
    let mut circuit = Circuit::new(0);
    for (line, stmt) in statements(text) {
        let head = stmt.split(|c: char| c.is_whitespace() || c == '(').next().unwrap_or("");
        match head {
            "OPENQASM" | "include" | "creg" | "barrier" | "measure" => continue,
            "qreg" => {
                if reg.is_some() {
                    return Err(parse_err(line, "only one quantum register is supported"));
                }
                let decl = stmt["qreg".len()..].trim();
                let (name, size) = decl
                    .split_once('[')
                    .and_then(|(name, rest)| Some((name.trim(), rest.strip_suffix(']')?.trim().parse::<u32>().ok()?)))
                    .ok_or_else(|| parse_err(line, format!("bad register declaration `{stmt}`")))?;
                reg = Some((name.to_string(), size));
                circuit = Circuit::new(size);
                continue;
            }
            _ => {}
        }
        let (name, rest) = match stmt.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) => stmt.split_at(i),
            None => return Err(parse_err(line, format!("expected operands after `{stmt}`"))),
        };
        let rest = rest.trim_start();
        let (angle, operands) = if let Some(r) = rest.strip_prefix('(') {
            let close = r.rfind(')').ok_or_else(|| parse_err(line, "unclosed parameter list"))?;
            let v = Expr::eval(&r[..close])
                .ok_or_else(|| parse_err(line, format!("bad angle expression `{}`", &r[..close])))?;
            (Some(v), &r[close + 1..])
        } else {
            (None, rest)
        };
        let kind = match GateKind::from_name(name, angle) {
            Some(k) if name != "cnot" && name != "zz" => k,
            _ if matches!(name, "rx" | "ry" | "rz" | "rzz") => {
                return Err(parse_err(line, format!("gate `{name}` needs an angle")))
            }
            _ => return Err(Error::UnsupportedGate { line, name: name.to_string() }),
        };
        if angle.is_some() && kind.angle().is_none() {
            return Err(parse_err(line, format!("gate `{name}` takes no parameters")));
        }
        let (rname, n) = reg.as_ref().ok_or_else(|| parse_err(line, "gate before any `qreg` declaration"))?;
        let qubits = operands.split(',').map(|op| parse_operand(op, rname, *n, line)).collect::<Result<Vec<_>>>()?;
        let gate = Gate::new(kind, &qubits).map_err(|e| parse_err(line, e.to_string()))?;
        circuit.push(gate)?;
    }
    Ok(circuit)
}

/// Writes `c` back out in the subset `parse_qasm` reads.
pub fn to_qasm(c: &Circuit) -> String {
    let mut out = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n", c.n_qubits());
    for g in c.gates() {
        let kind = g.kind();
        out.push_str(kind.name());
        if let Some(a) = kind.angle() {
            out.push_str(&format!("({a:?})"));
        }
        let ops: Vec<String> = g.qubits().iter().map(|q| format!("q[{q}]")).collect();
        out.push_str(&format!(" {};\n", ops.join(",")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpqa_core::circuit::Axis;

    #[test]
    fn single_cz() {
        let c = parse_qasm("qreg q[2]; cz q[0],q[1];").unwrap();
        assert_eq!(c, Circuit::from_gates(2, [Gate::cz(0, 1)]).unwrap());
    }

    #[test]
    fn single_h() {
        let c = parse_qasm("qreg q[1]; h q[0];").unwrap();
        assert_eq!(c, Circuit::from_gates(1, [Gate::h(0)]).unwrap());
    }

    #[test]
    fn toffoli_is_unsupported() {
        let err = parse_qasm("qreg q[3];\nccx q[0],q[1],q[2];").unwrap_err();
        assert!(matches!(err, Error::UnsupportedGate { line: 2, ref name } if name == "ccx"), "{err}");
    }

    #[test]
    fn header_comments_and_angles() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// comment\nqreg q[3];\ncreg c[3];\n\
                   rz(-pi/4) q[2];\nrzz(2*(0.25+0.25)) q[0], q[1];\ncx q[1],\n  q[2];\nbarrier q;\nmeasure q -> c;\n";
        let c = parse_qasm(src).unwrap();
        let want =
            Circuit::from_gates(3, [Gate::rot(Axis::Z, -PI / 4.0, 2), Gate::zz(1.0, 0, 1), Gate::cnot(1, 2)]).unwrap();
        assert_eq!(c, want);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("qreg q[2];\n\ncz q[0],q[5];", 3),
            ("qreg q[2];\nrx q[0];", 2),
            ("h q[0];", 1),
            ("qreg q[2];\nqreg r[2];", 2),
            ("qreg q[2];\nrz(1+) q[0];", 2),
            ("qreg q[2];\ncz q[0],q[0];", 2),
            ("qreg q[2];\nh(0.1) q[0];", 2),
        ];
        for (src, line) in cases {
            match parse_qasm(src) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn exponent_literals() {
        assert_eq!(Expr::eval("1e-3"), Some(1e-3));
        assert_eq!(Expr::eval("-2.5E+1 / 5"), Some(-5.0));
        assert_eq!(Expr::eval("pi*2"), Some(2.0 * PI));
        assert_eq!(Expr::eval("1 2"), None);
    }

    #[test]
    fn round_trip() {
        let c = Circuit::from_gates(
            3,
            [Gate::h(0), Gate::sdg(1), Gate::rot(Axis::X, 0.1, 2), Gate::swap(0, 2), Gate::zz(-0.7, 1, 2)],
        )
        .unwrap();
        assert_eq!(parse_qasm(&to_qasm(&c)).unwrap(), c);
    }
}
