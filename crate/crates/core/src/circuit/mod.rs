//! Gate-level intermediate representation.
//!
//! A [`Circuit`] is an ordered list of primitive gates over a fixed register.
//! Multi-controlled Z stays a single IR node; [`MczMode`] decides whether it
//! is executed and counted as one primitive or through its ancilla-free
//! expansion ([`Circuit::expand_mcz`]).

mod dump;
mod mcz;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use dump::DumpError;
pub use mcz::mcz_gates;

pub type Qubit = usize;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: Qubit, width: usize },
    #[error("gate acts on qubit {0} twice")]
    RepeatedQubit(Qubit),
    #[error("MCZ needs at least one qubit")]
    EmptyMcz,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// `exp(-i theta Y / 2)`.
    RotY {
        q: Qubit,
        theta: f64,
    },
    /// `diag(1, e^{i phi})`. Only produced by the compiled MCZ expansion.
    Phase {
        q: Qubit,
        phi: f64,
    },
    X {
        q: Qubit,
    },
    Cnot {
        control: Qubit,
        target: Qubit,
    },
    /// Phase -1 iff every listed qubit is 1. Symmetric in its qubits.
    Mcz {
        qubits: Vec<Qubit>,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<Qubit> {
        match self {
            Gate::RotY { q, .. } | Gate::Phase { q, .. } | Gate::X { q } => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Mcz { qubits } => qubits.clone(),
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::RotY { q, theta } => Gate::RotY {
                q: *q,
                theta: -theta,
            },
            Gate::Phase { q, phi } => Gate::Phase { q: *q, phi: -phi },
            g => g.clone(),
        }
    }

    fn validate(&self, width: usize) -> Result<(), CircuitError> {
        let qs = self.qubits();
        if qs.is_empty() {
            return Err(CircuitError::EmptyMcz);
        }
        for (i, &q) in qs.iter().enumerate() {
            if q >= width {
                return Err(CircuitError::QubitOutOfRange { qubit: q, width });
            }
            if qs[..i].contains(&q) {
                return Err(CircuitError::RepeatedQubit(q));
            }
        }
        Ok(())
    }
}

/// How multi-controlled Z gates are executed and counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MczMode {
    /// One MCZ node is one primitive; the simulator applies it directly.
    #[default]
    Primitive,
    /// MCZ is replaced by its ancilla-free RotY/Phase/X/CNOT expansion.
    Compiled,
}

impl std::str::FromStr for MczMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "primitive" => Ok(Self::Primitive),
            "compiled" => Ok(Self::Compiled),
            _ => Err(format!("unknown MCZ mode `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCount {
    pub roty: usize,
    pub phase: usize,
    pub x: usize,
    pub cnot: usize,
    pub mcz: usize,
    pub total: usize,
}

impl GateCount {
    fn add_gate(&mut self, g: &Gate) {
        match g {
            Gate::RotY { .. } => self.roty += 1,
            Gate::Phase { .. } => self.phase += 1,
            Gate::X { .. } => self.x += 1,
            Gate::Cnot { .. } => self.cnot += 1,
            Gate::Mcz { .. } => self.mcz += 1,
        }
        self.total += 1;
    }
}

impl std::ops::Add for GateCount {
    type Output = GateCount;
    fn add(self, o: GateCount) -> GateCount {
        GateCount {
            roty: self.roty + o.roty,
            phase: self.phase + o.phase,
            x: self.x + o.x,
            cnot: self.cnot + o.cnot,
            mcz: self.mcz + o.mcz,
            total: self.total + o.total,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Self::new(width);
        c.extend(gates)?;
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self, CircuitError> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(
        &mut self,
        gates: I,
    ) -> Result<&mut Self, CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(self)
    }

    /// Appends `other` after `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self, CircuitError> {
        if other.width != self.width {
            return Err(CircuitError::WidthMismatch(self.width, other.width));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(self)
    }

    /// Concatenation in time order: `circuits[0]` runs first.
    pub fn concat(circuits: &[&Circuit]) -> Result<Circuit, CircuitError> {
        let Some(first) = circuits.first() else {
            return Ok(Circuit::new(0));
        };
        let mut out = Circuit::new(first.width);
        for c in circuits {
            out.append(c)?;
        }
        Ok(out)
    }

    /// Reversed sequence with each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same circuit with every MCZ replaced by its ancilla-free expansion.
    pub fn expand_mcz(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match g {
                Gate::Mcz { qubits } => gates.extend(mcz_gates(qubits)),
                g => gates.push(g.clone()),
            }
        }
        Circuit {
            width: self.width,
            gates,
        }
    }

    pub fn gate_count(&self, mode: MczMode) -> GateCount {
        let mut count = GateCount::default();
        for g in &self.gates {
            match (g, mode) {
                (Gate::Mcz { qubits }, MczMode::Compiled) => {
                    mcz_gates(qubits).iter().for_each(|e| count.add_gate(e))
                }
                (g, _) => count.add_gate(g),
            }
        }
        count
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_jsonl())
    }
}
