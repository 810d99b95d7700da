//! JSON-lines circuit dump: one gate object per line, angles at 10 decimals.
//!
//! ```text
//! {"g":"RY","q":0,"theta":1.0471975512}
//! {"g":"P","q":2,"phi":0.7853981634}
//! {"g":"CNOT","c":0,"t":1}
//! {"g":"X","q":2}
//! {"g":"MCZ","qs":[1,2,3]}
//! ```

use serde::Deserialize;
use thiserror::Error;

use super::{Circuit, CircuitError, Gate, Qubit};

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: CircuitError },
}

#[derive(Deserialize)]
#[serde(tag = "g")]
enum GateRecord {
    #[serde(rename = "RY")]
    RotY {
        q: Qubit,
        theta: f64,
    },
    #[serde(rename = "P")]
    Phase {
        q: Qubit,
        phi: f64,
    },
    X {
        q: Qubit,
    },
    #[serde(rename = "CNOT")]
    Cnot {
        c: Qubit,
        t: Qubit,
    },
    #[serde(rename = "MCZ")]
    Mcz {
        qs: Vec<Qubit>,
    },
}

fn gate_line(g: &Gate) -> String {
    match g {
        Gate::RotY { q, theta } => format!(r#"{{"g":"RY","q":{q},"theta":{theta:.10}}}"#),
        Gate::Phase { q, phi } => format!(r#"{{"g":"P","q":{q},"phi":{phi:.10}}}"#),
        Gate::X { q } => format!(r#"{{"g":"X","q":{q}}}"#),
        Gate::Cnot { control, target } => format!(r#"{{"g":"CNOT","c":{control},"t":{target}}}"#),
        Gate::Mcz { qubits } => {
            let qs: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
            format!(r#"{{"g":"MCZ","qs":[{}]}}"#, qs.join(","))
        }
    }
}

impl Circuit {
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&gate_line(g));
            s.push('\n');
        }
        s
    }

    pub fn from_jsonl(width: usize, text: &str) -> Result<Circuit, DumpError> {
        let mut c = Circuit::new(width);
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let rec: GateRecord = serde_json::from_str(line).map_err(|e| DumpError::Syntax {
                line: line_no,
                msg: e.to_string(),
            })?;
            let gate = match rec {
                GateRecord::RotY { q, theta } => Gate::RotY { q, theta },
                GateRecord::Phase { q, phi } => Gate::Phase { q, phi },
                GateRecord::X { q } => Gate::X { q },
                GateRecord::Cnot { c, t } => Gate::Cnot {
                    control: c,
                    target: t,
                },
                GateRecord::Mcz { qs } => Gate::Mcz { qubits: qs },
            };
            c.push(gate).map_err(|source| DumpError::Invalid {
                line: line_no,
                source,
            })?;
        }
        Ok(c)
    }
}
