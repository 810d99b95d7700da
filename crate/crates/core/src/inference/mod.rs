//! Quantum rejection sampling with exponentially growing amplification.
//!
//! One sample is drawn by repeating: prepare the q-sample, apply the Grover
//! iterate `N` times, measure the evidence qubits. Round `k` uses `N = 2^k`
//! in [`ScheduleMode::Paper`] or `N` uniform in `[0, 2^k)` in
//! [`ScheduleMode::Randomized`]. Once the evidence reads `e`, the query
//! qubits of the post-measurement state are measured.
//!
//! Cost is counted in applications of the preparation circuit: each attempt
//! costs `1 + 2N` (one preparation, then one forward and one inverse
//! preparation per iterate).

mod orbit;
mod scaling;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bayesnet::{Assignment, BayesNet, BayesNetError};
use crate::circuit::{MczMode, Qubit};
use crate::compiler::{CompileError, GroverOperators};
use crate::rng::{split, SampleRng};
use crate::simulator::{SimError, Statevector, MIN_BRANCH_MASS};

use orbit::GroverOrbit;
pub use scaling::{
    chain_family, scaling_run, FamilyPoint, ScalingConfig, ScalingPoint, ScalingTable,
};

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("quantum sampling needs at least one evidence node")]
    EmptyEvidence,
    #[error("no accepted sample after {attempts} attempts (restart cap)")]
    RestartCap { attempts: u64 },
    #[error("evidence mass {mass:e} of the prepared state is numerically zero")]
    VanishingEvidence { mass: f64 },
    #[error(transparent)]
    Net(#[from] BayesNetError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    /// Exactly `2^k` iterates in round `k`.
    #[default]
    Paper,
    /// A uniformly random count in `[0, 2^k)` in round `k`.
    Randomized,
}

impl std::str::FromStr for ScheduleMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Self::Paper),
            "randomized" => Ok(Self::Randomized),
            _ => Err(format!("unknown schedule `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleConfig {
    pub mode: ScheduleMode,
    /// Rounds before `k` resets to 0.
    pub max_rounds: u32,
    /// Evidence measurements allowed per sample before giving up.
    pub restart_cap: u64,
    pub mcz: MczMode,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            mode: ScheduleMode::Paper,
            max_rounds: 30,
            restart_cap: 10_000,
            mcz: MczMode::Primitive,
        }
    }
}

impl ScheduleConfig {
    /// Caps the iterate count near `sqrt(2^|E|)`: `max_rounds = ceil(|E|/2) + 2`.
    pub fn evidence_bounded(mode: ScheduleMode, evidence_len: usize) -> Self {
        Self {
            mode,
            max_rounds: evidence_len.div_ceil(2) as u32 + 2,
            ..Self::default()
        }
    }

    fn iterations<R: Rng + ?Sized>(&self, round: u32, rng: &mut R) -> u64 {
        let span = 1u64 << round;
        match self.mode {
            ScheduleMode::Paper => span,
            ScheduleMode::Randomized => rng.random_range(0..span),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleCost {
    /// Evidence measurements, the successful one included.
    pub rounds: u64,
    pub grover: u64,
    /// Applications of the preparation circuit or its inverse.
    pub a_applications: u64,
}

impl std::ops::AddAssign for SampleCost {
    fn add_assign(&mut self, o: SampleCost) {
        self.rounds += o.rounds;
        self.grover += o.grover;
        self.a_applications += o.a_applications;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    /// Query outcome, `query[j]` in bit `j`.
    pub query_bits: u64,
    /// Measured evidence, evidence node `j` (ascending) in bit `j`.
    pub evidence_bits: u64,
    pub cost: SampleCost,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SampleReport {
    pub query: Vec<usize>,
    pub evidence: Vec<(usize, bool)>,
    pub samples: Vec<SampleRecord>,
    pub totals: SampleCost,
}

impl SampleReport {
    fn mean(&self, total: u64) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            total as f64 / self.samples.len() as f64
        }
    }

    pub fn mean_a_applications(&self) -> f64 {
        self.mean(self.totals.a_applications)
    }

    pub fn mean_grover(&self) -> f64 {
        self.mean(self.totals.grover)
    }

    pub fn mean_rounds(&self) -> f64 {
        self.mean(self.totals.rounds)
    }

    /// Evidence bits every accepted sample must carry, packed like
    /// [`SampleRecord::evidence_bits`].
    pub fn expected_evidence_bits(&self) -> u64 {
        self.evidence
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &(_, b))| acc | (b as u64) << j)
    }

    fn push(&mut self, record: SampleRecord) {
        self.totals += record.cost;
        self.samples.push(record);
    }
}

/// A batch that stopped early; `partial` holds the samples drawn before the failure.
#[derive(Debug, Error)]
#[error("sampling stopped after {} samples: {source}", partial.samples.len())]
pub struct BatchError {
    pub partial: Box<SampleReport>,
    #[source]
    pub source: InferenceError,
}

/// Compiled operators plus the cached Grover orbit for one (net, evidence) pair.
pub struct QuantumSampler {
    query: Vec<Qubit>,
    evidence_qubits: Vec<Qubit>,
    target: u64,
    schedule: ScheduleConfig,
    orbit: GroverOrbit,
}

impl QuantumSampler {
    pub fn new(
        net: &BayesNet,
        query: &[usize],
        evidence: &Assignment,
        schedule: ScheduleConfig,
    ) -> Result<Self, InferenceError> {
        if evidence.is_empty() {
            return Err(InferenceError::EmptyEvidence);
        }
        net.check_disjoint(query, evidence)?;
        let ops = GroverOperators::compile(net, evidence)?;
        let mut prepared = Statevector::zero(net.len())?;
        prepared.apply(&ops.prep, schedule.mcz)?;
        let mass = prepared.evidence_mass(&ops.evidence_qubits, &ops.evidence_bits);
        if mass < MIN_BRANCH_MASS {
            return Err(InferenceError::VanishingEvidence { mass });
        }
        let target = ops
            .evidence_bits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | (b as u64) << j);
        Ok(Self {
            query: query.to_vec(),
            evidence_qubits: ops.evidence_qubits.clone(),
            target,
            schedule,
            orbit: GroverOrbit::new(prepared, ops.iterate, schedule.mcz),
        })
    }

    /// One accepted sample.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<SampleRecord, InferenceError> {
        let mut cost = SampleCost::default();
        let mut round = 0u32;
        while cost.rounds < self.schedule.restart_cap {
            let n = self.schedule.iterations(round, rng);
            cost.rounds += 1;
            cost.grover += n;
            cost.a_applications += 1 + 2 * n;
            let state = self.orbit.state_at(n);
            let seen = state.measure_subset(&self.evidence_qubits, rng)?;
            if seen.packed == self.target {
                let query_bits = if self.query.is_empty() {
                    0
                } else {
                    seen.state.measure_subset(&self.query, rng)?.packed
                };
                return Ok(SampleRecord {
                    query_bits,
                    evidence_bits: seen.packed,
                    cost,
                });
            }
            round += 1;
            if round >= self.schedule.max_rounds {
                round = 0;
            }
        }
        Err(InferenceError::RestartCap {
            attempts: cost.rounds,
        })
    }
}

/// One sample of `P(query | evidence)` using stream 0 of `seed`.
pub fn quantum_sample(
    net: &BayesNet,
    query: &[usize],
    evidence: &Assignment,
    schedule: ScheduleConfig,
    seed: u64,
) -> Result<SampleRecord, InferenceError> {
    let mut sampler = QuantumSampler::new(net, query, evidence, schedule)?;
    sampler.sample(&mut split(seed, 0))
}

/// `count` independent samples; sample `i` uses stream `i` of `seed`.
pub fn batch_sample(
    net: &BayesNet,
    query: &[usize],
    evidence: &Assignment,
    count: usize,
    schedule: ScheduleConfig,
    seed: u64,
) -> Result<SampleReport, BatchError> {
    let mut report = SampleReport {
        query: query.to_vec(),
        evidence: evidence.iter().collect(),
        ..Default::default()
    };
    if count == 0 {
        return Ok(report);
    }
    let mut sampler = match QuantumSampler::new(net, query, evidence, schedule) {
        Ok(s) => s,
        Err(source) => {
            return Err(BatchError {
                partial: Box::new(report),
                source,
            })
        }
    };
    for i in 0..count {
        let mut rng: SampleRng = split(seed, i as u64);
        match sampler.sample(&mut rng) {
            Ok(record) => report.push(record),
            Err(source) => {
                return Err(BatchError {
                    partial: Box::new(report),
                    source,
                })
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{histogram, tv_distance};

    const TWO_NODE: &str = r#"{"nodes": [
        {"name": "A", "parents": [], "cpt": [0.25]},
        {"name": "B", "parents": ["A"], "cpt": [0.5, 0.8]}
    ]}"#;

    fn two_node() -> BayesNet {
        BayesNet::parse(TWO_NODE).unwrap()
    }

    #[test]
    fn certain_evidence_accepts_in_round_zero() {
        let net =
            BayesNet::parse(r#"{"nodes":[{"name":"A","cpt":[0.3]},{"name":"B","cpt":[1.0]}]}"#)
                .unwrap();
        let e = Assignment::new().with(1, true);
        for seed in 0..20 {
            let r = quantum_sample(&net, &[0], &e, ScheduleConfig::default(), seed).unwrap();
            assert_eq!(
                r.cost,
                SampleCost {
                    rounds: 1,
                    grover: 1,
                    a_applications: 3
                }
            );
            assert_eq!(r.evidence_bits, 1);
        }
        let report = batch_sample(&net, &[0], &e, 100, ScheduleConfig::default(), 1).unwrap();
        assert_eq!(report.totals.grover, 100);
    }

    #[test]
    fn quarter_evidence_is_amplified_to_certainty() {
        // P(B=1) = 1/4: one iterate rotates the state fully onto the evidence.
        let net =
            BayesNet::parse(r#"{"nodes":[{"name":"A","cpt":[0.6]},{"name":"B","cpt":[0.25]}]}"#)
                .unwrap();
        let e = Assignment::new().with(1, true);
        let report = batch_sample(&net, &[0], &e, 200, ScheduleConfig::default(), 4).unwrap();
        assert!(report.samples.iter().all(|s| s.cost.rounds == 1));
    }

    #[test]
    fn two_node_posterior() {
        let net = two_node();
        let e = Assignment::new().with(1, true);
        let report = batch_sample(&net, &[0], &e, 10_000, ScheduleConfig::default(), 2024).unwrap();
        let bits: Vec<u64> = report.samples.iter().map(|s| s.query_bits).collect();
        let empirical = histogram(&bits, 2);
        assert!(tv_distance(&empirical, &[15.0 / 23.0, 8.0 / 23.0]) < 0.05);
        let expected = report.expected_evidence_bits();
        assert!(report.samples.iter().all(|s| s.evidence_bits == expected));
    }

    #[test]
    fn empty_batch() {
        let r = batch_sample(
            &two_node(),
            &[0],
            &Assignment::new().with(1, true),
            0,
            ScheduleConfig::default(),
            0,
        )
        .unwrap();
        assert!(r.samples.is_empty());
        assert_eq!(r.totals, SampleCost::default());
        assert_eq!(r.mean_a_applications(), 0.0);
    }

    #[test]
    fn errors() {
        let net = two_node();
        assert_eq!(
            quantum_sample(&net, &[0], &Assignment::new(), ScheduleConfig::default(), 0)
                .unwrap_err(),
            InferenceError::EmptyEvidence
        );
        let impossible =
            BayesNet::parse(r#"{"nodes":[{"name":"A","cpt":[0.5]},{"name":"B","cpt":[0.0]}]}"#)
                .unwrap();
        let err = batch_sample(
            &impossible,
            &[0],
            &Assignment::new().with(1, true),
            5,
            ScheduleConfig::default(),
            0,
        )
        .unwrap_err();
        assert!(matches!(
            err.source,
            InferenceError::VanishingEvidence { .. }
        ));
        assert!(err.partial.samples.is_empty());
    }

    #[test]
    fn restart_cap_reports_partial_results() {
        // P(e) = 0.02 with a one-attempt cap fails quickly; earlier samples survive.
        let net =
            BayesNet::parse(r#"{"nodes":[{"name":"A","cpt":[0.5]},{"name":"B","cpt":[0.02]}]}"#)
                .unwrap();
        let schedule = ScheduleConfig {
            restart_cap: 1,
            ..Default::default()
        };
        let err = batch_sample(
            &net,
            &[0],
            &Assignment::new().with(1, true),
            50,
            schedule,
            3,
        )
        .unwrap_err();
        assert_eq!(err.source, InferenceError::RestartCap { attempts: 1 });
        assert!(err.partial.samples.len() < 50);
        assert!(err.partial.samples.iter().all(|s| s.cost.rounds == 1));
    }

    #[test]
    fn deterministic_and_totals_consistent() {
        let net = two_node();
        let e = Assignment::new().with(1, false);
        for mode in [ScheduleMode::Paper, ScheduleMode::Randomized] {
            let schedule = ScheduleConfig {
                mode,
                ..Default::default()
            };
            let a = batch_sample(&net, &[0], &e, 300, schedule, 77).unwrap();
            let b = batch_sample(&net, &[0], &e, 300, schedule, 77).unwrap();
            assert_eq!(a, b);
            let mut sum = SampleCost::default();
            a.samples.iter().for_each(|s| sum += s.cost);
            assert_eq!(sum, a.totals);
            for s in &a.samples {
                assert_eq!(s.cost.a_applications, s.cost.rounds + 2 * s.cost.grover);
            }
        }
    }

    #[test]
    fn compiled_mcz_mode_gives_same_samples() {
        let net = two_node();
        let e = Assignment::new().with(1, true);
        let prim = batch_sample(&net, &[0], &e, 200, ScheduleConfig::default(), 9).unwrap();
        let comp = batch_sample(
            &net,
            &[0],
            &e,
            200,
            ScheduleConfig {
                mcz: MczMode::Compiled,
                ..Default::default()
            },
            9,
        )
        .unwrap();
        let agree = prim
            .samples
            .iter()
            .zip(&comp.samples)
            .filter(|(a, b)| a.query_bits == b.query_bits && a.cost == b.cost)
            .count();
        // identical streams; rounding differences can flip at most a rare boundary draw
        assert!(agree >= 198, "{agree}");
    }

    #[test]
    fn evidence_bounded_cap() {
        assert_eq!(
            ScheduleConfig::evidence_bounded(ScheduleMode::Randomized, 6).max_rounds,
            5
        );
        assert_eq!(
            ScheduleConfig::evidence_bounded(ScheduleMode::Paper, 1).max_rounds,
            3
        );
    }
}
