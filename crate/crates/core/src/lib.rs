//! Quantum rejection sampling on Bayesian networks.
//!
//! The crate compiles a binary Bayesian network into the gate-level circuit
//! that prepares its q-sample `sum_x sqrt(P(x)) |x>`, builds the phase-flip
//! and Grover operators for a piece of evidence, and runs amplitude-amplified
//! rejection sampling on a dense statevector. Classical ancestral and
//! rejection samplers plus a brute-force exact-inference oracle are included
//! as baselines.
//!
//! ```
//! use qbayes::{BayesNet, Assignment, compiler, simulator::Statevector, MczMode};
//!
//! let net = BayesNet::parse(r#"{"nodes": [
//!     {"name": "A", "parents": [], "cpt": [0.25]},
//!     {"name": "B", "parents": ["A"], "cpt": [0.5, 0.8]}
//! ]}"#).unwrap();
//! let prep = compiler::compile_qsample(&net);
//! let mut psi = Statevector::zero(net.len()).unwrap();
//! psi.apply(&prep, MczMode::Primitive).unwrap();
//! // amplitude of |A=1, B=1> is sqrt(0.25 * 0.8)
//! assert!((psi.amplitudes()[0b11].re - 0.2f64.sqrt()).abs() < 1e-12);
//! ```

pub mod bayesnet;
pub mod circuit;
pub mod compiler;
pub mod inference;
pub mod rng;
pub mod simulator;
pub mod stats;

pub use bayesnet::{Assignment, BayesNet, BayesNetError, Distribution, NodeSpec};
pub use circuit::{Circuit, CircuitError, Gate, GateCount, MczMode};
pub use compiler::{CompileError, GroverOperators, QubitLayout};
pub use inference::{
    InferenceError, SampleCost, SampleRecord, SampleReport, ScheduleConfig, ScheduleMode,
};
pub use simulator::{MeasurementOutcome, SimError, Statevector};
