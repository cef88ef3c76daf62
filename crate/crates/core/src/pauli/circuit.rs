//! Clifford circuits and their text format.
//!
//! ```text
//! # comment
//! n 4
//! H 0
//! CNOT 0 3
//! CZ 1 2
//! ```

use std::fmt;

use rand::Rng;

use super::{CliffordGate, GateKind, PauliError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    gates: Vec<CliffordGate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<CliffordGate>) -> Result<Self, PauliError> {
        for g in &gates {
            g.check_width(width)?;
        }
        Ok(Self { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: CliffordGate) -> Result<(), PauliError> {
        g.check_width(self.width)?;
        self.gates.push(g);
        Ok(())
    }

    /// The inverse as a Pauli-frame map: every gate is its own inverse
    /// modulo phase, so this is the reversed gate list.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.width)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit, PauliError> {
    let err = |line: usize, message: String| PauliError::Parse { line, message };
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tok: Vec<&str> = content.split_whitespace().collect();
        if tok[0] == "n" {
            if circuit.is_some() {
                return Err(err(line, "width declared twice".into()));
            }
            let [_, w] = tok[..] else {
                return Err(err(line, "expected `n <width>`".into()));
            };
            let width = w
                .parse()
                .map_err(|_| err(line, format!("invalid width `{w}`")))?;
            circuit = Some(Circuit::new(width));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| err(line, "gate before `n <width>` declaration".into()))?;
        let kind = GateKind::from_name(tok[0])
            .ok_or_else(|| err(line, format!("unknown gate `{}`", tok[0])))?;
        let qubits = tok[1..]
            .iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| err(line, format!("invalid qubit index `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let g = CliffordGate::new(kind, &qubits).map_err(|e| err(line, e.to_string()))?;
        c.push(g).map_err(|e| err(line, e.to_string()))?;
    }
    circuit.ok_or_else(|| {
        err(
            text.lines().count().max(1),
            "missing `n <width>` declaration".into(),
        )
    })
}

/// `size` gates with kinds uniform over the gate set (two-qubit kinds are
/// skipped when `width < 2`) and uniformly random distinct qubits.
pub fn random_circuit(rng: &mut impl Rng, width: usize, size: usize) -> Circuit {
    assert!(width > 0, "circuit needs at least one qubit");
    let kinds: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| k.arity() <= width)
        .collect();
    let mut c = Circuit::new(width);
    for _ in 0..size {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let g = if kind.arity() == 1 {
            CliffordGate::single(kind, rng.gen_range(0..width))
        } else {
            let a = rng.gen_range(0..width);
            let mut b = rng.gen_range(0..width - 1);
            if b >= a {
                b += 1;
            }
            CliffordGate::pair(kind, a, b)
        };
        c.gates.push(g.expect("valid by construction"));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_print() {
        let text = "# demo\nn 4\nH 0\ncnot 0 3   # lower case accepted\nCZ 1 2\nS 1\nSWAP 2 3\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.width(), 4);
        assert_eq!(c.len(), 5);
        assert_eq!(
            c.gates()[1],
            CliffordGate::pair(GateKind::Cnot, 0, 3).unwrap()
        );
        assert_eq!(parse_circuit(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("H 0\n", 1),
            ("n 2\nH 0\nCNOT 0 2\n", 3),
            ("n 2\n\nFOO 1\n", 3),
            ("n 2\nCZ 1\n", 2),
            ("n 2\nCZ 1 1\n", 2),
            ("n x\n", 1),
            ("n 2\nn 3\n", 2),
            ("n 2\nH a\n", 2),
            ("# nothing\n", 1),
        ];
        for (text, line) in cases {
            match parse_circuit(text) {
                Err(PauliError::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn random_circuits_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for width in 1..6 {
            let c = random_circuit(&mut rng, width, 50);
            assert_eq!(c.len(), 50);
            assert!(Circuit::from_gates(width, c.gates().to_vec()).is_ok());
            assert_eq!(c.inverse().inverse(), c);
        }
    }
}
