use rand::Rng;
use serde::Serialize;

use super::{batch_sample, InferenceError, ScheduleConfig, ScheduleMode};
use crate::bayesnet::{Assignment, BayesNet, NodeSpec};
use crate::circuit::MczMode;
use crate::rng::split;
use crate::stats::loglog_slope;

/// One member of a parametrized family: a network with its query and evidence.
#[derive(Clone, Debug)]
pub struct FamilyPoint {
    pub net: BayesNet,
    pub query: Vec<usize>,
    pub evidence: Assignment,
}

/// `k` independent fair evidence nodes `E1..Ek` observed as all ones, so
/// `P(e) = 2^-k`, plus a query node `Q` whose CPT depends on `Ek`.
pub fn chain_family(k: usize) -> FamilyPoint {
    let mut specs: Vec<NodeSpec> = (1..=k)
        .map(|i| NodeSpec {
            name: format!("E{i}"),
            parents: vec![],
            cpt: vec![0.5],
        })
        .collect();
    specs.push(NodeSpec {
        name: "Q".into(),
        parents: if k > 0 { vec![format!("E{k}")] } else { vec![] },
        cpt: if k > 0 { vec![0.3, 0.7] } else { vec![0.3] },
    });
    let net = BayesNet::from_specs(specs).expect("chain family is valid");
    let evidence = (0..k).map(|i| (i, true)).collect();
    FamilyPoint {
        query: vec![k],
        net,
        evidence,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingConfig {
    pub samples: usize,
    pub seed: u64,
    pub schedule: ScheduleMode,
    /// `None` picks [`ScheduleConfig::evidence_bounded`] per point.
    pub max_rounds: Option<u32>,
    pub mcz: MczMode,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            samples: 500,
            seed: 1,
            schedule: ScheduleMode::Randomized,
            max_rounds: None,
            mcz: MczMode::Primitive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub k: usize,
    pub p_evidence: f64,
    pub classical_mean_draws: f64,
    pub quantum_mean_a_applications: f64,
    pub quantum_mean_grover: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingTable {
    pub points: Vec<ScalingPoint>,
    /// Fitted exponent of classical draws per sample against `P(e)`.
    pub classical_slope: Option<f64>,
    /// Fitted exponent of preparation-circuit applications against `P(e)`.
    pub quantum_slope: Option<f64>,
}

/// Classical and quantum cost per accepted sample at each `k`, with log-log fits.
pub fn scaling_run(
    family: impl Fn(usize) -> FamilyPoint,
    ks: &[usize],
    config: &ScalingConfig,
) -> Result<ScalingTable, InferenceError> {
    let mut points = Vec::with_capacity(ks.len());
    for &k in ks {
        let point = family(k);
        let p_evidence = point.net.marginal_probability(&point.evidence)?;
        let mut seeds = split(config.seed, k as u64);
        let (classical_seed, quantum_seed): (u64, u64) = (seeds.random(), seeds.random());

        let classical = point.net.classical_rejection_sample(
            &point.query,
            &point.evidence,
            config.samples,
            classical_seed,
            crate::bayesnet::DEFAULT_DRAW_BUDGET,
        )?;
        let mut schedule = ScheduleConfig::evidence_bounded(config.schedule, point.evidence.len());
        if let Some(r) = config.max_rounds {
            schedule.max_rounds = r;
        }
        schedule.mcz = config.mcz;
        let quantum = batch_sample(
            &point.net,
            &point.query,
            &point.evidence,
            config.samples,
            schedule,
            quantum_seed,
        )
        .map_err(|e| e.source)?;
        points.push(ScalingPoint {
            k,
            p_evidence,
            classical_mean_draws: classical.mean_draws(),
            quantum_mean_a_applications: quantum.mean_a_applications(),
            quantum_mean_grover: quantum.mean_grover(),
        });
    }
    let pe: Vec<f64> = points.iter().map(|p| p.p_evidence).collect();
    let fit = |ys: Vec<f64>| {
        if config.samples == 0 {
            None
        } else {
            loglog_slope(&pe, &ys)
        }
    };
    Ok(ScalingTable {
        classical_slope: fit(points.iter().map(|p| p.classical_mean_draws).collect()),
        quantum_slope: fit(points
            .iter()
            .map(|p| p.quantum_mean_a_applications)
            .collect()),
        points,
    })
}
